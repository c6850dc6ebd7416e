"""Same-URL and content deduplication over corpus streams.

Same-URL keeps, per URI, the record from the latest crawl snapshot (ties:
first encountered); content dedup drops questions whose normalized text was
already emitted and drops pages left with no questions.  Each regime runs
either fully in memory or via external merge sort for corpora that do not
fit, with byte-identical output between the two modes.
"""
from __future__ import annotations

import heapq
import json
import os
import re
import tempfile
from collections import Counter
from dataclasses import dataclass

from .records import RecordParseError, parse_record, serialize_record, strip_markup

__all__ = [
    "DedupKey",
    "snapshot_timestamp",
    "question_key",
    "page_key",
    "same_url_dedup",
    "content_dedup",
    "dedup_file",
    "external_sort",
    "MISSING_TIMESTAMP",
]

MISSING_TIMESTAMP = "00000000000000"

_SNAPSHOT_RE = re.compile(r"CC-MAIN-(\d{14})")


@dataclass(frozen=True)
class DedupKey:
    """Identity of a record under one dedup regime.

    ``kind`` is "url" or "content"; ``key`` is the URI or the normalized
    question text; ``snapshot_ts`` orders same-key records by crawl time
    (url regime only).
    """

    kind: str
    key: str
    snapshot_ts: str = ""

    def __post_init__(self):
        if self.kind not in ("url", "content"):
            raise ValueError(f"unknown dedup key kind: {self.kind!r}")
        if not self.key:
            raise ValueError("empty dedup key")
        if self.kind == "url" and not self.snapshot_ts.isdigit():
            raise ValueError(f"url keys need a digit timestamp, got {self.snapshot_ts!r}")


def snapshot_timestamp(warc_id, counters=None):
    """14-digit snapshot timestamp from a crawl segment id.

    Records without an extractable timestamp sort before every real
    snapshot (and are counted when a counter is passed).
    """
    match = _SNAPSHOT_RE.search(warc_id or "")
    if match:
        return match.group(1)
    if counters is not None:
        counters["missing_snapshot_timestamp"] += 1
    return MISSING_TIMESTAMP


def question_key(question):
    """Normalized question text used for content identity."""
    name = question.name_markup or ""
    text = question.text_markup or ""
    return " ".join(strip_markup(name + " " + text).lower().split())


def page_key(record, counters=None):
    """Same-URL dedup key of a webpage record."""
    return DedupKey("url", record.uri, snapshot_timestamp(record.warc_id, counters))


def same_url_dedup(records, counters=None):
    """One record per URI: latest snapshot wins, first occurrence on ties.

    Survivors come out in first-occurrence order of their URI.  The whole
    input is consumed before anything is yielded.
    """
    if counters is None:
        counters = Counter()
    best = {}
    for record in records:
        counters["pages_in"] += 1
        key = page_key(record, counters)
        kept = best.get(key.key)
        if kept is None or key.snapshot_ts > kept[0]:
            best[key.key] = (key.snapshot_ts, record)
    for ts, record in best.values():
        counters["pages_out"] += 1
        yield record


def content_dedup(records, counters=None):
    """Drop questions whose key was already emitted; drop emptied pages."""
    if counters is None:
        counters = Counter()
    seen = set()
    for record in records:
        counters["pages_in"] += 1
        survivors = []
        for question in record.questions:
            counters["questions_in"] += 1
            key = question_key(question)
            if key in seen:
                continue
            seen.add(key)
            survivors.append(question)
        if not survivors:
            continue
        counters["pages_out"] += 1
        counters["questions_out"] += len(survivors)
        if len(survivors) == len(record.questions):
            yield record
        else:
            record.questions = survivors
            yield record


def external_sort(entries, temp_dir=None, chunk_size=100_000):
    """Sort JSON-encodable list entries of any size via sorted runs on disk."""
    runs = []
    chunk = []
    try:
        for entry in entries:
            chunk.append(entry)
            if len(chunk) >= chunk_size:
                runs.append(_dump_run(chunk, temp_dir))
                chunk = []
        if not runs:
            chunk.sort()
            yield from chunk
            return
        if chunk:
            runs.append(_dump_run(chunk, temp_dir))
            chunk = []
        iters = [_load_run(handle) for handle in runs]
        yield from heapq.merge(*iters)
    finally:
        for handle in runs:
            handle.close()


def _dump_run(chunk, temp_dir):
    chunk.sort()
    handle = tempfile.TemporaryFile(mode="w+", encoding="utf-8", dir=temp_dir)
    for entry in chunk:
        handle.write(json.dumps(entry, ensure_ascii=False))
        handle.write("\n")
    handle.flush()
    return handle


def _load_run(handle):
    handle.seek(0)
    for line in handle:
        yield json.loads(line)


def _iter_lines(path):
    from .ioutil import open_text_input

    with open_text_input(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if line:
                yield line_no, line


def dedup_file(in_path, out_handle, mode, external=False, temp_dir=None, chunk_size=100_000):
    """Deduplicate a JSONL corpus file into *out_handle*; returns counters.

    Output bytes are identical between in-memory and external execution:
    url mode passes surviving input lines through verbatim, content mode
    re-serializes surviving pages canonically in both modes.
    """
    counters = Counter()
    if mode == "url":
        if external:
            _same_url_external(in_path, out_handle, counters, temp_dir, chunk_size)
        else:
            _same_url_in_memory(in_path, out_handle, counters)
    elif mode == "content":
        if external:
            _content_external(in_path, out_handle, counters, temp_dir, chunk_size)
        else:
            _content_in_memory(in_path, out_handle, counters)
    else:
        raise ValueError(f"unknown dedup mode: {mode!r}")
    return counters


def _page_key_fields(line, line_no, counters):
    try:
        obj = json.loads(line)
        uri = obj["URI"]
        warc_id = obj.get("WARC_ID", "")
    except (json.JSONDecodeError, TypeError, KeyError):
        counters["bad_lines"] += 1
        return None
    return uri, snapshot_timestamp(warc_id, counters)


def _same_url_in_memory(in_path, out_handle, counters):
    best = {}
    for line_no, line in _iter_lines(in_path):
        counters["pages_in"] += 1
        fields = _page_key_fields(line, line_no, counters)
        if fields is None:
            continue
        uri, ts = fields
        kept = best.get(uri)
        if kept is None or ts > kept[0]:
            # Dict update keeps the first-insertion position, so survivor
            # order stays stable by first occurrence of the URI.
            best[uri] = (ts, line)
    for ts, line in best.values():
        counters["pages_out"] += 1
        out_handle.write(line)
        out_handle.write("\n")


def _same_url_external(in_path, out_handle, counters, temp_dir, chunk_size):
    def entries():
        for seq, (line_no, line) in enumerate(_iter_lines(in_path)):
            counters["pages_in"] += 1
            fields = _page_key_fields(line, line_no, counters)
            if fields is None:
                continue
            uri, ts = fields
            yield [uri, ts, seq, line]

    def winners():
        group_uri = None
        winner = None
        first_seq = None
        for uri, ts, seq, line in external_sort(entries(), temp_dir, chunk_size):
            if uri != group_uri:
                if winner is not None:
                    yield [first_seq, winner[2]]
                group_uri = uri
                winner = (ts, seq, line)
                first_seq = seq
            else:
                first_seq = min(first_seq, seq)
                # Sorted ascending by (ts, seq): a strictly larger ts wins;
                # equal ts keeps the earlier seq already held.
                if ts > winner[0]:
                    winner = (ts, seq, line)
        if winner is not None:
            yield [first_seq, winner[2]]

    for _, line in external_sort(winners(), temp_dir, chunk_size):
        counters["pages_out"] += 1
        out_handle.write(line)
        out_handle.write("\n")


def _content_filter_page(line, line_no, counters, keep):
    """Re-serialize a page keeping the questions selected by *keep*."""
    try:
        record = parse_record(line, line_no)
    except RecordParseError:
        counters["bad_lines"] += 1
        return None
    counters["questions_in"] += len(record.questions)
    survivors = [q for i, q in enumerate(record.questions) if keep(i, q)]
    if not survivors:
        return None
    counters["questions_out"] += len(survivors)
    record.questions = survivors
    return serialize_record(record)


def _content_in_memory(in_path, out_handle, counters):
    seen = set()

    def keep(_, question):
        key = question_key(question)
        if key in seen:
            return False
        seen.add(key)
        return True

    for line_no, line in _iter_lines(in_path):
        counters["pages_in"] += 1
        out_line = _content_filter_page(line, line_no, counters, keep)
        if out_line is not None:
            counters["pages_out"] += 1
            out_handle.write(out_line)
            out_handle.write("\n")


def _content_external(in_path, out_handle, counters, temp_dir, chunk_size):
    def entries():
        for seq, (line_no, line) in enumerate(_iter_lines(in_path)):
            try:
                record = parse_record(line, line_no)
            except RecordParseError:
                continue
            for qi, question in enumerate(record.questions):
                yield [question_key(question), seq, qi]

    def winners():
        group_key = None
        for key, seq, qi in external_sort(entries(), temp_dir, chunk_size):
            if key != group_key:
                group_key = key
                yield [seq, qi]

    sorted_winners = external_sort(winners(), temp_dir, chunk_size)
    pending = next(sorted_winners, None)
    for seq, (line_no, line) in enumerate(_iter_lines(in_path)):
        counters["pages_in"] += 1
        kept = set()
        while pending is not None and pending[0] == seq:
            kept.add(pending[1])
            pending = next(sorted_winners, None)
        out_line = _content_filter_page(line, line_no, counters, lambda i, _: i in kept)
        if out_line is not None:
            counters["pages_out"] += 1
            out_handle.write(out_line)
            out_handle.write("\n")
