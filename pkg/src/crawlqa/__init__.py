"""crawlqa: mine schema.org question-answer pairs from web archives.

Streams WARC files, extracts question/answer microdata into a nested JSONL
corpus, and ships the supporting toolkit: deduplication, corpus statistics,
n-gram overlap auditing, training-format exports and scoring metrics.
"""

from .records import (
    ACCEPTED_ANSWER,
    SUGGESTED_ANSWER,
    AnswerRecord,
    QuestionRecord,
    WebpageRecord,
    parse_record,
    serialize_record,
    strip_markup,
)
from .warc import WarcRecordMeta, derive_warc_id, open_warc_stream

__version__ = "0.1.0"

__all__ = [
    "ACCEPTED_ANSWER",
    "SUGGESTED_ANSWER",
    "AnswerRecord",
    "QuestionRecord",
    "WebpageRecord",
    "WarcRecordMeta",
    "derive_warc_id",
    "open_warc_stream",
    "parse_record",
    "serialize_record",
    "strip_markup",
    "__version__",
]
