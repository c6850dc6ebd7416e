"""Convert corpus records into training representations: plain seq2seq
pairs, markup-preserving denoising lines, and retrieval records with
positive/negative contexts."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .records import ACCEPTED_ANSWER, strip_markup

__all__ = [
    "RetrievalRecord",
    "render_question",
    "question_markup",
    "to_seq2seq",
    "to_denoising",
    "to_retrieval",
    "write_seq2seq",
    "write_denoising",
    "write_retrieval",
]

_NEWLINES = re.compile(r"[\r\n]+")


@dataclass
class RetrievalRecord:
    question: str
    positive_ctxs: list[str] = field(default_factory=list)
    negative_ctxs: list[str] = field(default_factory=list)


def render_question(question):
    """Plain question text: stripped name then stripped text, joined by a
    space when both exist (the name is the short summary, so it leads)."""
    parts = []
    if question.name_markup is not None:
        parts.append(strip_markup(question.name_markup))
    if question.text_markup is not None:
        parts.append(strip_markup(question.text_markup))
    return " ".join(part for part in parts if part)


def question_markup(question):
    """Same join as render_question but with markup kept."""
    parts = []
    if question.name_markup is not None:
        parts.append(question.name_markup)
    if question.text_markup is not None:
        parts.append(question.text_markup)
    return " ".join(part for part in parts if part)


def to_seq2seq(record, accepted_only=False):
    """(source, target) pairs: one per answer, question as the source."""
    pairs = []
    for question in record.questions:
        source = render_question(question)
        for answer in question.answers:
            if accepted_only and answer.status != ACCEPTED_ANSWER:
                continue
            pairs.append((source, strip_markup(answer.text_markup)))
    return pairs


def to_denoising(record):
    """One "Q: <question> A: <answer>" line per answer, markup retained.

    Embedded newlines are folded to spaces so each example stays one line.
    """
    lines = []
    for question in record.questions:
        q_markup = question_markup(question)
        for answer in question.answers:
            line = f"Q: {q_markup} A: {answer.text_markup}"
            lines.append(_NEWLINES.sub(" ", line))
    return lines


def _net_votes(answer):
    up = answer.upvote_count or 0
    down = answer.downvote_count or 0
    return up - down


def to_retrieval(record):
    """RetrievalRecord per answered question, three-tier context rule.

    Tier 1 (any answer carries an upvote count): net votes >= +2 is
    positive, the rest negative.  Tier 2 (no votes): accepted answers are
    positive, suggested negative.  Tier 3: when the applicable tier yields
    no positive at all, every answer counts as positive.
    """
    out = []
    for question in record.questions:
        if not question.answers:
            continue
        texts = [strip_markup(a.text_markup) for a in question.answers]
        if any(a.upvote_count is not None for a in question.answers):
            positive_mask = [_net_votes(a) >= 2 for a in question.answers]
        else:
            positive_mask = [a.status == ACCEPTED_ANSWER for a in question.answers]
        if not any(positive_mask):
            positive_mask = [True] * len(question.answers)
        out.append(RetrievalRecord(
            question=render_question(question),
            positive_ctxs=[t for t, pos in zip(texts, positive_mask) if pos],
            negative_ctxs=[t for t, pos in zip(texts, positive_mask) if not pos],
        ))
    return out


def write_seq2seq(records, out_handle, style="tsv", accepted_only=False):
    count = 0
    for record in records:
        for source, target in to_seq2seq(record, accepted_only=accepted_only):
            if style == "tsv":
                out_handle.write(f"{source}\t{target}\n")
            else:
                out_handle.write(json.dumps(
                    {"question": source, "answer": target}, ensure_ascii=False,
                    separators=(",", ":"),
                ))
                out_handle.write("\n")
            count += 1
    return count


def write_denoising(records, out_handle):
    count = 0
    for record in records:
        for line in to_denoising(record):
            out_handle.write(line)
            out_handle.write("\n")
            count += 1
    return count


def write_retrieval(records, out_handle):
    count = 0
    for record in records:
        for item in to_retrieval(record):
            out_handle.write(json.dumps(
                {
                    "question": item.question,
                    "positive_ctxs": item.positive_ctxs,
                    "negative_ctxs": item.negative_ctxs,
                },
                ensure_ascii=False, separators=(",", ":"),
            ))
            out_handle.write("\n")
            count += 1
    return count
