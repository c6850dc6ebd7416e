"""Shared builders for WARC fixtures and randomized corpus records."""
from __future__ import annotations

import gzip
import io
import random

import pytest

from crawlqa.records import AnswerRecord, QuestionRecord, WebpageRecord


def warc_record_bytes(payload, uri="https://example.com/page", warc_type="response",
                      content_type="text/html", date="2020-10-26T03:14:08Z",
                      http_envelope=False):
    """One serialized WARC record (headers + payload + separator)."""
    if http_envelope:
        body = payload
        payload = (
            b"HTTP/1.1 200 OK\r\n"
            b"Content-Type: " + content_type.encode() + b"\r\n"
            b"Content-Length: " + str(len(body)).encode() + b"\r\n"
            b"\r\n" + body
        )
        content_type = "application/http; msgtype=response"
    header = (
        "WARC/1.0\r\n"
        f"WARC-Type: {warc_type}\r\n"
        f"WARC-Date: {date}\r\n"
        f"WARC-Target-URI: {uri}\r\n"
        f"Content-Type: {content_type}\r\n"
        f"Content-Length: {len(payload)}\r\n"
        "\r\n"
    ).encode()
    return header + payload + b"\r\n\r\n"


def build_warc(records, gzip_members=False):
    """Concatenate record byte blocks into one archive."""
    if not gzip_members:
        return b"".join(records)
    out = io.BytesIO()
    for record in records:
        out.write(gzip.compress(record))
    return out.getvalue()


def write_warc(path, records, gzip_members=False):
    path.write_bytes(build_warc(records, gzip_members))
    return path


_WORDS = (
    "what how when which where why who whose answer question silver water"
    " jewelry profile account photo option pricing software python free"
    " model number time steps detail steps clean simple integrates training"
).split()


def random_text(rng, lo=1, hi=12):
    return " ".join(rng.choice(_WORDS) for _ in range(rng.randint(lo, hi)))


def random_markup(rng, lo=1, hi=10):
    """Markup string over a safe alphabet (no raw entities or brackets)."""
    parts = []
    for _ in range(rng.randint(1, 3)):
        text = random_text(rng, lo, hi)
        tag = rng.choice(("", "p", "b", "span", "li"))
        parts.append(f"<{tag}>{text}</{tag}>" if tag else text)
    return "".join(parts)


def random_answer(rng):
    return AnswerRecord(
        text_markup=random_markup(rng),
        status=rng.choice(("acceptedAnswer", "suggestedAnswer")),
        author=random_text(rng, 1, 2) if rng.random() < 0.4 else None,
        date_created="2021-03-05T18:33:24" if rng.random() < 0.3 else None,
        upvote_count=rng.randint(0, 40) if rng.random() < 0.5 else None,
        downvote_count=rng.randint(0, 10) if rng.random() < 0.2 else None,
        comment_count=rng.randint(0, 10) if rng.random() < 0.2 else None,
    )


def random_question(rng):
    has_name = rng.random() < 0.85
    question = QuestionRecord(
        name_markup=random_markup(rng, 1, 8) if has_name else None,
        text_markup=random_markup(rng) if (not has_name or rng.random() < 0.4) else None,
        author=random_text(rng, 1, 2) if rng.random() < 0.3 else None,
        upvote_count=rng.randint(0, 99) if rng.random() < 0.3 else None,
        answer_count=rng.randint(0, 5) if rng.random() < 0.3 else None,
        answers=[random_answer(rng) for _ in range(rng.randint(0, 3))],
    )
    return question


def random_record(rng, uri=None, warc_id=None):
    snapshot = rng.choice(("20201026031408", "20210305183324", "20210512100748"))
    return WebpageRecord(
        uri=uri or f"https://site{rng.randint(0, 500)}.example.com/q/{rng.randint(0, 10**6)}",
        uuid=f"{rng.getrandbits(32):08x}-{rng.getrandbits(16):04x}-4{rng.getrandbits(12):03x}-8{rng.getrandbits(12):03x}-{rng.getrandbits(48):012x}",
        warc_id=warc_id or f"CC-MAIN-{snapshot}-{snapshot}-{rng.randint(0, 800):05d}",
        language_attr=rng.choice(("-", "en", "en-US", "de")),
        detected_language=rng.choice((None, "en", "de", "fr")),
        questions=[random_question(rng) for _ in range(rng.randint(1, 3))],
    )


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
