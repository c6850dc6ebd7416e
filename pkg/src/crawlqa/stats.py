"""Mergeable corpus statistics: headline dimensions plus domain,
question-word and markup-tag distributions.

One aggregate per worker, merged at the end; merge is associative and
commutative so any split of the stream gives the single-pass result.
"""
from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from urllib.parse import urlsplit

from .records import strip_markup
from .suffixes import MULTI_LABEL_SUFFIXES

__all__ = [
    "QUESTION_WORDS",
    "StatsConfig",
    "StatsAggregate",
    "CorpusDimensions",
    "DistributionReport",
    "accumulate",
    "merge",
    "report",
    "registrable_label",
    "render_report_json",
    "render_report_table",
]

QUESTION_WORDS = ("what", "how", "when", "which", "where", "why", "who", "whose")

_TAG_RE = re.compile(r"<([a-zA-Z][a-zA-Z0-9]*)")
_TOKEN_PUNCT = re.compile(r"[^\w]+", re.UNICODE)


@dataclass(frozen=True)
class StatsConfig:
    # Tags ignored when deciding whether a question "has markup".
    trivial_markup_tags: frozenset[str] = frozenset({"br"})


@dataclass
class StatsAggregate:
    config: StatsConfig = field(default_factory=StatsConfig)
    n_pages: int = 0
    n_questions: int = 0
    n_answers: int = 0
    n_markup_questions: int = 0
    n_qsumm_questions: int = 0
    n_no_answer_questions: int = 0
    n_lang_tagged_pages: int = 0
    sum_question_words: int = 0
    sum_answer_words: int = 0
    domains: Counter = field(default_factory=Counter)
    question_words: Counter = field(default_factory=Counter)
    markup_tags: Counter = field(default_factory=Counter)


def registrable_label(host):
    """Second-level label under the public suffix of *host*.

    "quant.stackexchange.com" -> "stackexchange".  Hosts that are a bare
    suffix, a single label or an address literal are returned as-is.
    """
    host = (host or "").strip().strip(".").lower()
    if not host or host.startswith("[") or _is_ipv4(host):
        return host
    labels = host.split(".")
    if len(labels) == 1:
        return host
    # Longest listed multi-label suffix wins; otherwise the last label is
    # the suffix (the default public-suffix rule).
    for start in range(len(labels) - 1):
        if ".".join(labels[start:]) in MULTI_LABEL_SUFFIXES:
            if start == 0:
                return host
            return labels[start - 1]
    return labels[-2]


def _is_ipv4(host):
    parts = host.split(".")
    return len(parts) == 4 and all(p.isdigit() for p in parts)


def _count_tags(markup, tags):
    for match in _TAG_RE.finditer(markup):
        tags[match.group(1).lower()] += 1


def _question_word(question):
    """Case-insensitive first token of the stripped question text (the
    name is used when there is no text); None when it is not one of the
    eight English question words."""
    source = question.text_markup if question.text_markup else question.name_markup
    if not source:
        return None
    text = strip_markup(source)
    if not text:
        return None
    first = _TOKEN_PUNCT.sub("", text.split(None, 1)[0].lower())
    return first if first in QUESTION_WORDS else None


def _word_count(markup):
    return len(strip_markup(markup).split())


def accumulate(agg, record):
    """Fold one webpage record into the aggregate (mutates and returns it)."""
    agg.n_pages += 1
    if record.language_attr != "-":
        agg.n_lang_tagged_pages += 1
    host = urlsplit(record.uri).hostname or ""
    label = registrable_label(host)
    if label:
        agg.domains[label] += 1
    trivial = agg.config.trivial_markup_tags
    for question in record.questions:
        agg.n_questions += 1
        question_tags = Counter()
        q_words = 0
        if question.name_markup is not None:
            _count_tags(question.name_markup, question_tags)
            q_words += _word_count(question.name_markup)
        if question.text_markup is not None:
            _count_tags(question.text_markup, question_tags)
            q_words += _word_count(question.text_markup)
        agg.sum_question_words += q_words
        if question.name_markup is not None and question.text_markup is not None:
            agg.n_qsumm_questions += 1
        if not question.answers:
            agg.n_no_answer_questions += 1
        for answer in question.answers:
            agg.n_answers += 1
            _count_tags(answer.text_markup, question_tags)
            agg.sum_answer_words += _word_count(answer.text_markup)
        if any(tag not in trivial for tag in question_tags):
            agg.n_markup_questions += 1
        agg.markup_tags.update(question_tags)
        word = _question_word(question)
        if word is not None:
            agg.question_words[word] += 1
    return agg


def merge(a, b):
    """Combine two aggregates built with the same configuration."""
    if a.config != b.config:
        raise ValueError("cannot merge aggregates with different configurations")
    out = StatsAggregate(config=a.config)
    out.n_pages = a.n_pages + b.n_pages
    out.n_questions = a.n_questions + b.n_questions
    out.n_answers = a.n_answers + b.n_answers
    out.n_markup_questions = a.n_markup_questions + b.n_markup_questions
    out.n_qsumm_questions = a.n_qsumm_questions + b.n_qsumm_questions
    out.n_no_answer_questions = a.n_no_answer_questions + b.n_no_answer_questions
    out.n_lang_tagged_pages = a.n_lang_tagged_pages + b.n_lang_tagged_pages
    out.sum_question_words = a.sum_question_words + b.sum_question_words
    out.sum_answer_words = a.sum_answer_words + b.sum_answer_words
    out.domains = a.domains + b.domains
    out.question_words = a.question_words + b.question_words
    out.markup_tags = a.markup_tags + b.markup_tags
    return out


@dataclass(frozen=True)
class CorpusDimensions:
    n_pages: int
    n_questions: int
    n_answers: int
    markup_fraction: float
    q_summ_fraction: float
    no_answer_fraction: float
    avg_answers_excl_empty: float | None
    mean_q_words: float | None
    mean_a_words: float | None
    lang_tag_fraction: float


@dataclass(frozen=True)
class DistributionReport:
    domains: dict
    question_words: dict
    markup_tags: dict
    domain_pct: dict
    question_word_pct: dict
    markup_tag_pct: dict


def _top_k(counter, k, total):
    ordered = sorted(counter.items(), key=lambda item: (-item[1], item[0]))[:k]
    counts = dict(ordered)
    pct = {label: (100.0 * count / total if total else 0.0) for label, count in ordered}
    return counts, pct


def report(agg, top_k=5):
    """Final dimensions and top-k distributions.

    Distribution percentages are shares of all occurrences in their map
    (pages for domains, question-word hits, tag occurrences); means are
    None on an empty aggregate.
    """
    n_q = agg.n_questions
    answered = n_q - agg.n_no_answer_questions
    dims = CorpusDimensions(
        n_pages=agg.n_pages,
        n_questions=n_q,
        n_answers=agg.n_answers,
        markup_fraction=agg.n_markup_questions / n_q if n_q else 0.0,
        q_summ_fraction=agg.n_qsumm_questions / n_q if n_q else 0.0,
        no_answer_fraction=agg.n_no_answer_questions / n_q if n_q else 0.0,
        avg_answers_excl_empty=agg.n_answers / answered if answered else None,
        mean_q_words=agg.sum_question_words / n_q if n_q else None,
        mean_a_words=agg.sum_answer_words / agg.n_answers if agg.n_answers else None,
        lang_tag_fraction=agg.n_lang_tagged_pages / agg.n_pages if agg.n_pages else 0.0,
    )
    domains, domain_pct = _top_k(agg.domains, top_k, agg.n_pages)
    q_words, q_word_pct = _top_k(agg.question_words, top_k, sum(agg.question_words.values()))
    tags, tag_pct = _top_k(agg.markup_tags, top_k, sum(agg.markup_tags.values()))
    dist = DistributionReport(
        domains=domains,
        question_words=q_words,
        markup_tags=tags,
        domain_pct=domain_pct,
        question_word_pct=q_word_pct,
        markup_tag_pct=tag_pct,
    )
    return dims, dist


def render_report_json(dims, dist):
    payload = {
        "dimensions": {
            "pages": dims.n_pages,
            "questions": dims.n_questions,
            "answers": dims.n_answers,
            "markup_fraction": dims.markup_fraction,
            "q_summ_fraction": dims.q_summ_fraction,
            "no_answer_fraction": dims.no_answer_fraction,
            "avg_answers_excl_empty": dims.avg_answers_excl_empty,
            "mean_q_words": dims.mean_q_words,
            "mean_a_words": dims.mean_a_words,
            "lang_tag_fraction": dims.lang_tag_fraction,
        },
        "distributions": {
            "domains": _dist_json(dist.domains, dist.domain_pct),
            "question_words": _dist_json(dist.question_words, dist.question_word_pct),
            "markup_tags": _dist_json(dist.markup_tags, dist.markup_tag_pct),
        },
    }
    return json.dumps(payload, ensure_ascii=False, indent=2)


def _dist_json(counts, pct):
    return [
        {"label": label, "count": count, "pct": round(pct[label], 2)}
        for label, count in counts.items()
    ]


def render_report_table(dims, dist):
    lines = []

    def row(name, value):
        lines.append(f"{name:<24}{value}")

    def fraction(value):
        return f"{100.0 * value:.1f}%"

    row("pages", dims.n_pages)
    row("questions", dims.n_questions)
    row("answers", dims.n_answers)
    row("markup questions", fraction(dims.markup_fraction))
    row("name+text questions", fraction(dims.q_summ_fraction))
    row("no-answer questions", fraction(dims.no_answer_fraction))
    row("avg answers (answered)", "-" if dims.avg_answers_excl_empty is None else f"{dims.avg_answers_excl_empty:.2f}")
    row("mean question words", "-" if dims.mean_q_words is None else f"{dims.mean_q_words:.1f}")
    row("mean answer words", "-" if dims.mean_a_words is None else f"{dims.mean_a_words:.1f}")
    row("language-tagged pages", fraction(dims.lang_tag_fraction))
    for title, counts, pct in (
        ("domains", dist.domains, dist.domain_pct),
        ("question words", dist.question_words, dist.question_word_pct),
        ("markup tags", dist.markup_tags, dist.markup_tag_pct),
    ):
        lines.append("")
        lines.append(title)
        for label, count in counts.items():
            lines.append(f"  {label:<22}{count:>10}  {pct[label]:6.2f}%")
    return "\n".join(lines) + "\n"
