"""Three-level corpus record schema and its JSONL wire format.

A webpage record nests questions, which nest answers.  Wire keys and their
order are fixed so serialized corpora are byte-stable; unknown keys found
when parsing are kept in ``extra`` maps and re-emitted on serialization.
"""
from __future__ import annotations

import html
import json
import uuid as uuid_module
from dataclasses import dataclass, field

from .dom import iter_markup_events

__all__ = [
    "ACCEPTED_ANSWER",
    "SUGGESTED_ANSWER",
    "AnswerRecord",
    "QuestionRecord",
    "WebpageRecord",
    "RecordError",
    "RecordParseError",
    "validate_record",
    "serialize_record",
    "parse_record",
    "read_records",
    "strip_markup",
]

ACCEPTED_ANSWER = "acceptedAnswer"
SUGGESTED_ANSWER = "suggestedAnswer"
_STATUSES = (ACCEPTED_ANSWER, SUGGESTED_ANSWER)


class RecordError(ValueError):
    """A record violates the schema invariants."""


class RecordParseError(RecordError):
    """A JSONL line could not be parsed into a valid record."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


@dataclass
class AnswerRecord:
    text_markup: str
    status: str
    author: str | None = None
    date_created: str | None = None
    upvote_count: int | None = None
    downvote_count: int | None = None
    comment_count: int | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class QuestionRecord:
    name_markup: str | None = None
    text_markup: str | None = None
    author: str | None = None
    date_created: str | None = None
    upvote_count: int | None = None
    downvote_count: int | None = None
    answer_count: int | None = None
    answers: list[AnswerRecord] = field(default_factory=list)
    extra: dict = field(default_factory=dict)


@dataclass
class WebpageRecord:
    uri: str
    uuid: str
    warc_id: str
    language_attr: str = "-"
    detected_language: str | None = None
    questions: list[QuestionRecord] = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def validate_record(record):
    """Raise RecordError when *record* breaks an invariant."""
    if not record.uri:
        raise RecordError("empty URI")
    try:
        uuid_module.UUID(record.uuid)
    except (ValueError, AttributeError, TypeError):
        raise RecordError(f"UUID does not parse: {record.uuid!r}") from None
    if not record.warc_id:
        raise RecordError("empty WARC id")
    if not record.questions:
        raise RecordError("record without questions")
    for question in record.questions:
        if question.name_markup is None and question.text_markup is None:
            raise RecordError("question with neither name nor text")
        for count_name in ("upvote_count", "downvote_count", "answer_count"):
            _check_count(getattr(question, count_name), count_name)
        for answer in question.answers:
            if answer.status not in _STATUSES:
                raise RecordError(f"answer status missing or unknown: {answer.status!r}")
            if not answer.text_markup:
                raise RecordError("answer without text")
            for count_name in ("upvote_count", "downvote_count", "comment_count"):
                _check_count(getattr(answer, count_name), count_name)


def _check_count(value, name):
    if value is None:
        return
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise RecordError(f"{name} must be a non-negative integer, got {value!r}")


def _put_count(obj, key, value, as_strings):
    if value is not None:
        obj[key] = str(value) if as_strings else value


def _answer_to_json(answer, as_strings):
    obj = {}
    if answer.author is not None:
        obj["author"] = answer.author
    obj["text_markup"] = answer.text_markup
    obj["status"] = answer.status
    if answer.date_created is not None:
        obj["date_created"] = answer.date_created
    _put_count(obj, "upvote_count", answer.upvote_count, as_strings)
    _put_count(obj, "downvote_count", answer.downvote_count, as_strings)
    _put_count(obj, "comment_count", answer.comment_count, as_strings)
    obj.update(answer.extra)
    return obj


def _question_to_json(question, as_strings):
    obj = {}
    if question.author is not None:
        obj["author"] = question.author
    if question.name_markup is not None:
        obj["name_markup"] = question.name_markup
    if question.text_markup is not None:
        obj["text_markup"] = question.text_markup
    if question.date_created is not None:
        obj["date_created"] = question.date_created
    _put_count(obj, "upvote_count", question.upvote_count, as_strings)
    _put_count(obj, "downvote_count", question.downvote_count, as_strings)
    _put_count(obj, "answer_count", question.answer_count, as_strings)
    obj.update(question.extra)
    obj["Answers"] = [_answer_to_json(a, as_strings) for a in question.answers]
    return obj


def serialize_record(record, numeric_as_strings=True):
    """One JSONL line (no trailing newline), keys in canonical order.

    Numeric metadata is emitted as digit strings by default; pass
    ``numeric_as_strings=False`` for bare JSON numbers.
    """
    validate_record(record)
    obj = {"Language": record.language_attr or "-"}
    if record.detected_language is not None:
        obj["Fasttext_language"] = record.detected_language
    obj["URI"] = record.uri
    obj["UUID"] = record.uuid
    obj["WARC_ID"] = record.warc_id
    obj.update(record.extra)
    obj["Questions"] = [_question_to_json(q, numeric_as_strings) for q in record.questions]
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


_ANSWER_KEYS = {
    "author": "author",
    "text_markup": "text_markup",
    "status": "status",
    "date_created": "date_created",
}
_ANSWER_COUNTS = {
    "upvote_count": "upvote_count",
    "downvote_count": "downvote_count",
    "comment_count": "comment_count",
}
_QUESTION_KEYS = {
    "author": "author",
    "name_markup": "name_markup",
    "text_markup": "text_markup",
    "date_created": "date_created",
}
_QUESTION_COUNTS = {
    "upvote_count": "upvote_count",
    "downvote_count": "downvote_count",
    "answer_count": "answer_count",
}


def _count_from_json(value, key, line_no):
    if isinstance(value, int) and not isinstance(value, bool):
        result = value
    elif isinstance(value, str) and value.isdigit():
        result = int(value)
    else:
        raise RecordParseError(f"bad numeric value for {key}: {value!r}", line_no)
    if result < 0:
        raise RecordParseError(f"negative value for {key}: {value!r}", line_no)
    return result


def _string_from_json(value, key, line_no):
    if not isinstance(value, str):
        raise RecordParseError(f"expected string for {key}, got {type(value).__name__}", line_no)
    return value


def _answer_from_json(obj, line_no):
    answer = AnswerRecord(text_markup="", status="")
    for key, value in obj.items():
        if key in _ANSWER_KEYS:
            setattr(answer, _ANSWER_KEYS[key], _string_from_json(value, key, line_no))
        elif key in _ANSWER_COUNTS:
            setattr(answer, _ANSWER_COUNTS[key], _count_from_json(value, key, line_no))
        else:
            answer.extra[key] = value
    return answer


def _question_from_json(obj, line_no):
    question = QuestionRecord()
    for key, value in obj.items():
        if key in _QUESTION_KEYS:
            setattr(question, _QUESTION_KEYS[key], _string_from_json(value, key, line_no))
        elif key in _QUESTION_COUNTS:
            setattr(question, _QUESTION_COUNTS[key], _count_from_json(value, key, line_no))
        elif key == "Answers":
            if not isinstance(value, list):
                raise RecordParseError("Answers is not a list", line_no)
            question.answers = [_answer_from_json(a, line_no) for a in value]
        else:
            question.extra[key] = value
    return question


def parse_record(line, line_no=None):
    """Inverse of serialize_record; unknown keys survive a round trip."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordParseError(f"not valid JSON ({exc.msg})", line_no) from None
    if not isinstance(obj, dict):
        raise RecordParseError("line is not a JSON object", line_no)
    record = WebpageRecord(uri="", uuid="", warc_id="")
    for key, value in obj.items():
        if key == "Language":
            record.language_attr = _string_from_json(value, key, line_no)
        elif key == "Fasttext_language":
            record.detected_language = _string_from_json(value, key, line_no)
        elif key == "URI":
            record.uri = _string_from_json(value, key, line_no)
        elif key == "UUID":
            record.uuid = _string_from_json(value, key, line_no)
        elif key == "WARC_ID":
            record.warc_id = _string_from_json(value, key, line_no)
        elif key == "Questions":
            if not isinstance(value, list):
                raise RecordParseError("Questions is not a list", line_no)
            record.questions = [_question_from_json(q, line_no) for q in value]
        else:
            record.extra[key] = value
    try:
        validate_record(record)
    except RecordError as exc:
        raise RecordParseError(str(exc), line_no) from None
    return record


def read_records(lines, on_error=None):
    """Yield records from an iterable of JSONL lines.

    Bad lines call ``on_error(exc)`` (or are raised when no handler is given)
    and parsing continues with the next line.
    """
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield parse_record(line, line_no)
        except RecordParseError as exc:
            if on_error is None:
                raise
            on_error(exc)


# End tags that act as visual breaks when markup is flattened to plain text.
_BLOCK_CLOSES = frozenset({
    "p", "li", "div", "blockquote", "tr", "h1", "h2", "h3", "h4", "h5", "h6",
})


def strip_markup(markup):
    """Flatten a markup string to plain text.

    Tags are removed; ``<br>`` and closes of block-level elements become
    single spaces; character references are decoded; whitespace (including
    non-breaking spaces) is collapsed and the result trimmed.
    """
    if "<" not in markup:
        if "&" in markup:
            markup = html.unescape(markup)
        return " ".join(markup.split())
    parts = []
    for kind, value, _ in iter_markup_events(markup):
        if kind == "text":
            parts.append(value)
        elif kind == "start":
            if value == "br":
                parts.append(" ")
        elif value in _BLOCK_CLOSES:
            parts.append(" ")
    return " ".join("".join(parts).split())
