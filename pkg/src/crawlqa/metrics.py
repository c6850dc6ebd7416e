"""Scoring metrics for prediction files: Exact Match, Answer-level Recall
and Rouge-L.

EM uses the community-standard normalization (case, punctuation and
English articles folded).  AR checks that some reference's tokens occur as
a contiguous run of the prediction's tokens, so super/sub-word matches
("fundamental" for "fun") do not count; it keeps articles since extra
context is explicitly allowed.  An exact match always counts as recalled.
"""
from __future__ import annotations

import re
import string
from dataclasses import dataclass

__all__ = [
    "exact_match",
    "answer_recall",
    "rouge_l",
    "ScoredPair",
    "score_pair",
    "corpus_scores",
]

_ARTICLES_RE = re.compile(r"\b(a|an|the)\b")
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def _em_normalize(text):
    text = text.lower().translate(_PUNCT_TABLE)
    text = _ARTICLES_RE.sub(" ", text)
    return " ".join(text.split())


def _ar_tokens(text):
    tokens = []
    for token in text.lower().split():
        token = token.translate(_PUNCT_TABLE)
        if token:
            tokens.append(token)
    return tokens


def exact_match(prediction, references):
    """1 iff the normalized prediction equals any normalized reference."""
    normalized = _em_normalize(prediction)
    return int(any(normalized == _em_normalize(ref) for ref in references))


def _contains_run(haystack, needle):
    if not needle:
        return False
    first = needle[0]
    span = len(needle)
    limit = len(haystack) - span
    for i, token in enumerate(haystack):
        if i > limit:
            return False
        if token == first and haystack[i : i + span] == needle:
            return True
    return False


def answer_recall(prediction, references):
    """1 iff some reference occurs as a contiguous token run of the
    prediction (whole-token equality), or the pair is an exact match."""
    pred_tokens = _ar_tokens(prediction)
    for ref in references:
        if _contains_run(pred_tokens, _ar_tokens(ref)):
            return 1
    return exact_match(prediction, references)


def _lcs_length(a, b):
    """Longest common subsequence length, two-row dynamic program."""
    if not a or not b:
        return 0
    if len(b) > len(a):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        append = current.append
        for j, y in enumerate(b, start=1):
            if x == y:
                append(previous[j - 1] + 1)
            else:
                left = current[j - 1]
                up = previous[j]
                append(left if left >= up else up)
        previous = current
    return previous[-1]


def rouge_l(prediction, reference):
    """Token-level Rouge-L: LCS-based precision/recall/F1.

    Tokens are lower-cased whitespace words; F is the plain harmonic mean
    and zero when either side is empty.
    """
    pred_tokens = prediction.lower().split()
    ref_tokens = reference.lower().split()
    lcs = _lcs_length(pred_tokens, ref_tokens)
    precision = lcs / len(pred_tokens) if pred_tokens else 0.0
    recall = lcs / len(ref_tokens) if ref_tokens else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f": f}


@dataclass(frozen=True)
class ScoredPair:
    prediction: str
    references: tuple
    em: int
    ar: int
    rouge: dict

    def __post_init__(self):
        if self.em > self.ar:
            raise ValueError("exact match without answer recall")


def score_pair(prediction, references):
    """All three metrics for one pair; Rouge takes the best reference."""
    if not references:
        raise ValueError("references must be non-empty")
    em = exact_match(prediction, references)
    ar = answer_recall(prediction, references)
    best_rouge = max(
        (rouge_l(prediction, ref) for ref in references),
        key=lambda score: score["f"],
    )
    return ScoredPair(prediction=prediction, references=tuple(references),
                      em=em, ar=ar, rouge=best_rouge)


def corpus_scores(pairs):
    """Mean em/ar/rouge-l(F) over scored pairs, scaled by 100."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("no pairs to score")
    n = len(pairs)
    return {
        "em": 100.0 * sum(p.em for p in pairs) / n,
        "ar": 100.0 * sum(p.ar for p in pairs) / n,
        "rouge-l": 100.0 * sum(p.rouge["f"] for p in pairs) / n,
    }
