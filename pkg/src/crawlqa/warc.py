"""Streaming WARC reader with bounded memory and per-record error recovery.

Handles plain archives and the member-per-record gzip convention used by
large crawls (detected by magic bytes, so mixed fixtures also work).  A
malformed record is skipped and counted, never fatal; only a truncated
stream ends iteration with a terminal error on the stream object.
"""
from __future__ import annotations

import os
import zlib
from dataclasses import dataclass

__all__ = [
    "WarcRecordMeta",
    "WarcStream",
    "TruncatedArchiveError",
    "open_warc_stream",
    "contains_question_marker",
    "derive_warc_id",
    "QUESTION_MARKER",
]

QUESTION_MARKER = b"schema.org/Question"

_GZIP_MAGIC = b"\x1f\x8b"
_CHUNK_SIZE = 1 << 20
_HEADER_END = b"\r\n\r\n"
_MAX_HEADER = 1 << 16


class TruncatedArchiveError(Exception):
    """The archive ended in the middle of a record."""


@dataclass(frozen=True, slots=True)
class WarcRecordMeta:
    target_uri: str
    warc_date: str
    record_type: str  # "response" (HTML response) or "other"
    content_type: str
    record_offset: int
    warc_id: str


def contains_question_marker(payload):
    """Cheap pre-filter: byte-level search for the question itemtype marker.

    False here guarantees full extraction would find no questions, since the
    marker string is a mandatory substring of a matching itemtype value.
    """
    return QUESTION_MARKER in payload


def derive_warc_id(archive_name):
    """Archive stem with container extensions (.warc, .warc.gz) removed."""
    name = os.path.basename(str(archive_name))
    for suffix in (".warc.gz", ".warc"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return name


def _looks_like_html(payload):
    head = payload[:256]
    if head.startswith(b"\xef\xbb\xbf"):
        head = head[3:]
    return head.lstrip(b" \t\r\n\x0c").startswith(b"<")


def _split_http_payload(payload):
    """Peel an HTTP response envelope; returns (mime type or None, body)."""
    if not payload.startswith(b"HTTP/"):
        return None, payload
    end = payload.find(_HEADER_END)
    if end < 0:
        return None, payload
    mime = None
    for line in payload[:end].split(b"\r\n")[1:]:
        colon = line.find(b":")
        if colon > 0 and line[:colon].strip().lower() == b"content-type":
            mime = line[colon + 1 :].strip().decode("latin-1")
            break
    return mime, payload[end + 4 :]


class _MemberError:
    """Sentinel: a compressed member could not be decoded."""


class _TruncatedSignal:
    """Sentinel: the raw stream ended mid-member."""


class WarcStream:
    """Iterator of (WarcRecordMeta, payload bytes) over one archive.

    Attributes updated during iteration: ``records`` (yielded count),
    ``skipped`` (malformed records or members), ``bytes_read`` (raw bytes
    consumed) and ``error`` (set to a TruncatedArchiveError when the stream
    ends early; None otherwise).
    """

    def __init__(self, path):
        self.path = str(path)
        self.warc_id = derive_warc_id(path)
        self.records = 0
        self.skipped = 0
        self.bytes_read = 0
        self.error = None
        self._file = open(path, "rb")

    def close(self):
        if self._file is not None:
            self._file.close()
            self._file = None

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()

    def __iter__(self):
        try:
            head = self._file.read(2)
            chunks = self._gzip_chunks(head) if head == _GZIP_MAGIC else self._plain_chunks(head)
            yield from self._parse_records(chunks)
        finally:
            self.close()

    def _plain_chunks(self, head):
        if head:
            self.bytes_read += len(head)
            yield head
        while True:
            chunk = self._file.read(_CHUNK_SIZE)
            if not chunk:
                return
            self.bytes_read += len(chunk)
            yield chunk

    def _gzip_chunks(self, head):
        """Decompress gzip members one by one, resyncing past bad members."""
        raw = bytearray(head)
        self.bytes_read += len(head)
        eof = False
        decomp = None
        while True:
            if not eof and len(raw) < _CHUNK_SIZE:
                chunk = self._file.read(_CHUNK_SIZE)
                if chunk:
                    self.bytes_read += len(chunk)
                    raw += chunk
                else:
                    eof = True
            if decomp is None:
                if len(raw) >= 2 and not raw.startswith(_GZIP_MAGIC):
                    idx = raw.find(_GZIP_MAGIC)
                    if idx < 0:
                        del raw[:-1]
                        if eof:
                            return
                        continue
                    del raw[:idx]
                if not raw:
                    if eof:
                        return
                    continue
                if len(raw) < 2 and not eof:
                    continue
                if eof and len(raw) < 2:
                    yield _TruncatedSignal()
                    return
                decomp = zlib.decompressobj(47)
            if not raw:
                if eof:
                    if decomp is not None:
                        yield _TruncatedSignal()
                    return
                continue
            feed = bytes(raw)
            try:
                out = decomp.decompress(feed)
            except zlib.error:
                yield _MemberError()
                decomp = None
                idx = raw.find(_GZIP_MAGIC, 1)
                if idx < 0:
                    del raw[:-1]
                else:
                    del raw[:idx]
                continue
            if decomp.eof:
                consumed = len(feed) - len(decomp.unused_data)
                decomp = None
            else:
                consumed = len(feed)
                if eof:
                    if out:
                        yield out
                    yield _TruncatedSignal()
                    return
            del raw[:consumed]
            if out:
                yield out

    def _parse_records(self, chunks):
        buf = bytearray()
        pos = 0
        base = 0
        eof = False

        class _Resync(Exception):
            """A compressed member failed; abandon the in-flight record."""

        def refill():
            """Append one chunk; returns False at end of source."""
            nonlocal eof, pos, base
            if eof:
                return False
            for item in chunks:
                if isinstance(item, _MemberError):
                    # Drop partial record bytes from the bad member.
                    self.skipped += 1
                    base += len(buf)
                    del buf[:]
                    pos = 0
                    raise _Resync
                if isinstance(item, _TruncatedSignal):
                    eof = True
                    self.error = TruncatedArchiveError(self.path)
                    return False
                buf.extend(item)
                return True
            eof = True
            return False

        def discard_unparsed():
            nonlocal pos, base
            base += len(buf)
            del buf[:]
            pos = 0

        while True:
            try:
                # Skip record separators before the next header.
                while True:
                    while pos < len(buf) and buf[pos] in (13, 10):
                        pos += 1
                    if pos < len(buf) or not refill():
                        break
                if pos >= len(buf):
                    return
                # Locate the end of the header block.
                while True:
                    header_end = buf.find(_HEADER_END, pos)
                    if header_end >= 0 or len(buf) - pos > _MAX_HEADER:
                        break
                    if not refill():
                        break
                if header_end < 0:
                    if len(buf) - pos > _MAX_HEADER:
                        # Oversized garbage: resync past it.
                        self.skipped += 1
                        idx = buf.find(b"\r\nWARC/", pos)
                        if idx >= 0:
                            pos = idx + 2
                        else:
                            discard_unparsed()
                        continue
                    if buf.startswith(b"WARC/", pos):
                        self.error = TruncatedArchiveError(self.path)
                    else:
                        self.skipped += 1
                    return
                header = bytes(buf[pos:header_end])
                parsed = _parse_header(header)
                if parsed is None:
                    self.skipped += 1
                    idx = buf.find(b"\r\nWARC/", pos)
                    if idx >= 0:
                        pos = idx + 2
                    else:
                        discard_unparsed()
                    continue
                warc_type, target_uri, warc_date, content_type, content_length = parsed
                record_offset = base + pos
                body_end_abs = header_end + 4 + content_length
                while len(buf) < body_end_abs:
                    if not refill():
                        if self.error is None:
                            self.error = TruncatedArchiveError(self.path)
                        return
            except _Resync:
                continue
            payload = bytes(buf[header_end + 4 : body_end_abs])
            pos = body_end_abs
            if pos > _CHUNK_SIZE:
                base += pos
                del buf[:pos]
                pos = 0
            if content_type.startswith("application/http"):
                mime, payload = _split_http_payload(payload)
                if mime is not None:
                    content_type = mime
            is_response = warc_type == "response" and (
                "html" in content_type
                or "html" in content_type.lower()
                or _looks_like_html(payload)
            )
            meta = WarcRecordMeta(
                target_uri=target_uri,
                warc_date=warc_date,
                record_type="response" if is_response else "other",
                content_type=content_type,
                record_offset=record_offset,
                warc_id=self.warc_id,
            )
            self.records += 1
            yield meta, payload


def _parse_header(header):
    """Parse one WARC header block; None when it is not usable.

    Canonically-cased header names take a startswith fast path; anything
    else falls back to case-insensitive matching.
    """
    if not header.startswith(b"WARC/1."):
        return None
    warc_type = ""
    target_uri = ""
    warc_date = ""
    content_type = ""
    content_length = -1
    for line in header.split(b"\r\n")[1:]:
        if line.startswith(b"WARC-Type: "):
            warc_type = line[11:].decode("latin-1").strip()
            continue
        if line.startswith(b"WARC-Target-URI: "):
            target_uri = line[17:].decode("latin-1").strip().strip("<>")
            continue
        if line.startswith(b"Content-Length: "):
            value = line[16:].strip()
            if value.isdigit():
                content_length = int(value)
                continue
            return None
        if line.startswith(b"WARC-Date: "):
            warc_date = line[11:].decode("latin-1").strip()
            continue
        if line.startswith(b"Content-Type: "):
            content_type = line[14:].decode("latin-1").strip()
            continue
        colon = line.find(b":")
        if colon <= 0:
            continue
        key = line[:colon].strip().lower()
        value = line[colon + 1 :].strip()
        if key == b"content-length":
            try:
                content_length = int(value)
            except ValueError:
                return None
        elif key == b"warc-type":
            warc_type = value.decode("latin-1").strip()
        elif key == b"warc-target-uri":
            target_uri = value.decode("latin-1").strip().strip("<>")
        elif key == b"warc-date":
            warc_date = value.decode("latin-1").strip()
        elif key == b"content-type":
            content_type = value.decode("latin-1").strip()
    if content_length < 0:
        return None
    return warc_type, target_uri, warc_date, content_type, content_length


def open_warc_stream(path):
    """Open an archive for streaming; see WarcStream for counters."""
    return WarcStream(path)
