"""N-gram bloom filter for train/test question overlap auditing.

Questions are normalized, cut into 8-token windows (shorter questions
contribute their whole token sequence), hashed with a seeded double-hashing
scheme and inserted into a bit array sized from the target false-positive
rate.  Querying a test set yields the fraction of overlapping questions and
grams; false negatives are impossible by construction.
"""
from __future__ import annotations

import hashlib
import logging
import math
import re
import struct
from dataclasses import dataclass

from .records import strip_markup

__all__ = [
    "DEFAULT_GRAM_LENGTH",
    "DEFAULT_FP_TARGET",
    "DEFAULT_SEED",
    "NGramBloomFilter",
    "OverlapReport",
    "normalize_question",
    "question_grams",
    "build_filter",
    "overlap",
    "filter_parameters",
]

logger = logging.getLogger(__name__)

DEFAULT_GRAM_LENGTH = 8
DEFAULT_FP_TARGET = 1e-8
DEFAULT_SEED = 0x9E3779B97F4A7C15

_MAGIC = b"CCQABF1"
_HEADER = struct.Struct("<QQQQQ")  # n, m, k, seed, item_count

_PUNCT_RE = re.compile(r"[^\w\s]+", re.UNICODE)


def normalize_question(question):
    """Markup-or-plain string -> token list (stripped, lower, no punct)."""
    text = strip_markup(question) if ("<" in question or "&" in question) else question
    return _PUNCT_RE.sub("", text.lower()).split()


def question_grams(tokens, n=DEFAULT_GRAM_LENGTH):
    """All n-token windows; a shorter question is one whole-sequence gram."""
    if not tokens:
        return []
    if len(tokens) < n:
        return [" ".join(tokens)]
    return [" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def filter_parameters(n_items, fp_target):
    """Standard sizing: m = ceil(-n ln p / (ln 2)^2), k = round((m/n) ln 2)."""
    if not 0.0 < fp_target < 1.0:
        raise ValueError(f"fp_target must be in (0, 1), got {fp_target}")
    if n_items <= 0:
        raise ValueError(f"capacity must be positive, got {n_items}")
    m = math.ceil(-n_items * math.log(fp_target) / (math.log(2) ** 2))
    k = max(1, round((m / n_items) * math.log(2)))
    return m, k


@dataclass
class NGramBloomFilter:
    n: int
    m: int
    k: int
    seed: int
    bits: bytearray
    item_count: int = 0
    capacity: int = 0
    fp_target: float | None = None

    @classmethod
    def sized_for(cls, capacity, fp_target=DEFAULT_FP_TARGET, n=DEFAULT_GRAM_LENGTH, seed=DEFAULT_SEED):
        m, k = filter_parameters(capacity, fp_target)
        return cls(n=n, m=m, k=k, seed=seed, bits=bytearray((m + 7) // 8),
                   capacity=capacity, fp_target=fp_target)

    def _hash_pair(self, gram):
        digest = hashlib.blake2b(
            gram.encode("utf-8"), digest_size=16,
            key=self.seed.to_bytes(8, "little"),
        ).digest()
        h1 = int.from_bytes(digest[:8], "little")
        h2 = int.from_bytes(digest[8:], "little") | 1
        return h1, h2

    def insert(self, gram):
        h1, h2 = self._hash_pair(gram)
        bits = self.bits
        m = self.m
        for i in range(self.k):
            index = (h1 + i * h2) % m
            bits[index >> 3] |= 1 << (index & 7)
        self.item_count += 1
        if self.capacity and self.item_count == self.capacity + 1:
            logger.warning(
                "bloom filter past declared capacity %d; effective false-positive "
                "rate now about %.3g and rising", self.capacity, self.effective_fp_rate(),
            )

    def might_contain(self, gram):
        h1, h2 = self._hash_pair(gram)
        bits = self.bits
        m = self.m
        for i in range(self.k):
            index = (h1 + i * h2) % m
            if not (bits[index >> 3] >> (index & 7)) & 1:
                return False
        return True

    def effective_fp_rate(self):
        """(1 - e^(-kn/m))^k for the current fill level."""
        if self.m == 0:
            return 1.0
        return (1.0 - math.exp(-self.k * self.item_count / self.m)) ** self.k

    def add_question(self, question):
        grams = question_grams(normalize_question(question), self.n)
        for gram in grams:
            self.insert(gram)
        return len(grams)

    def to_bytes(self):
        header = _HEADER.pack(self.n, self.m, self.k, self.seed, self.item_count)
        return _MAGIC + header + bytes(self.bits)

    @classmethod
    def from_bytes(cls, blob):
        if not blob.startswith(_MAGIC):
            raise ValueError("not a bloom filter file (bad magic)")
        n, m, k, seed, item_count = _HEADER.unpack_from(blob, len(_MAGIC))
        bits = bytearray(blob[len(_MAGIC) + _HEADER.size :])
        expected = (m + 7) // 8
        if len(bits) != expected:
            raise ValueError(f"bloom filter bit array truncated: {len(bits)} != {expected}")
        return cls(n=n, m=m, k=k, seed=seed, bits=bits, item_count=item_count)

    def save(self, path):
        with open(path, "wb") as handle:
            handle.write(self.to_bytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as handle:
            return cls.from_bytes(handle.read())

    def merge_from(self, other):
        """OR-merge a filter built with identical parameters (parallel build)."""
        if (self.n, self.m, self.k, self.seed) != (other.n, other.m, other.k, other.seed):
            raise ValueError("cannot merge bloom filters with different parameters")
        self.bits = bytearray(a | b for a, b in zip(self.bits, other.bits))
        self.item_count += other.item_count
        return self


def build_filter(train_questions, capacity_hint, fp_target=DEFAULT_FP_TARGET,
                 n=DEFAULT_GRAM_LENGTH, seed=DEFAULT_SEED):
    """Insert every gram of every training question into a fresh filter."""
    bloom = NGramBloomFilter.sized_for(capacity_hint, fp_target, n=n, seed=seed)
    for question in train_questions:
        bloom.add_question(question)
    return bloom


@dataclass(frozen=True)
class OverlapReport:
    question_rate: float  # fraction of test questions with >= 1 gram present
    gram_rate: float  # fraction of all test grams present
    n_test: int
    n_grams: int

    def as_percentages(self):
        return 100.0 * self.question_rate, 100.0 * self.gram_rate


def overlap(test_questions, bloom):
    """Overlap of a test question stream against a built filter."""
    n_test = 0
    n_hit_questions = 0
    n_grams = 0
    n_hit_grams = 0
    for question in test_questions:
        n_test += 1
        hit = False
        for gram in question_grams(normalize_question(question), bloom.n):
            n_grams += 1
            if bloom.might_contain(gram):
                n_hit_grams += 1
                hit = True
        if hit:
            n_hit_questions += 1
    if n_test == 0:
        raise ValueError("no test questions")
    return OverlapReport(
        question_rate=n_hit_questions / n_test,
        gram_rate=n_hit_grams / n_grams if n_grams else 0.0,
        n_test=n_test,
        n_grams=n_grams,
    )
