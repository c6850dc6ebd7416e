"""Streaming reader behavior: fixtures with known record counts, error
recovery, truncation, offsets and memory boundedness."""
import gzip
import tracemalloc

import pytest

from conftest import build_warc, warc_record_bytes, write_warc
from crawlqa.warc import (
    TruncatedArchiveError,
    contains_question_marker,
    derive_warc_id,
    open_warc_stream,
)

HTML = b"<html><body><p>hello</p></body></html>"
MARKED = b'<html><body><div itemtype="https://schema.org/Question">q</div></body></html>'


class TestDeriveWarcId:
    def test_strips_warc_gz(self):
        name = "CC-MAIN-20201026031408-20201026061408-00221.warc.gz"
        assert derive_warc_id(name) == "CC-MAIN-20201026031408-20201026061408-00221"

    def test_strips_warc(self):
        assert derive_warc_id("fixture.warc") == "fixture"

    def test_idempotent_on_stems(self):
        assert derive_warc_id("already-a-stem") == "already-a-stem"

    def test_uses_basename(self):
        assert derive_warc_id("/data/archives/seg-01.warc.gz") == "seg-01"


class TestMarker:
    def test_present(self):
        assert contains_question_marker(b'<div itemtype="https://schema.org/Question">')

    def test_absent_for_other_types(self):
        assert not contains_question_marker(b'<div itemtype="https://schema.org/FAQPage">')

    def test_chunk_boundary_independent(self):
        marker = b"schema.org/Question"
        half = len(marker) // 2
        payload = b"x" * 100 + marker[:half]
        payload = payload + marker[half:] + b"y" * 100
        assert contains_question_marker(payload)

    def test_case_sensitive(self):
        assert not contains_question_marker(b"schema.org/question")


def _stream_all(path):
    stream = open_warc_stream(path)
    items = list(stream)
    return stream, items


class TestPlainArchives:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.warc"
        path.write_bytes(b"")
        stream, items = _stream_all(path)
        assert items == []
        assert stream.skipped == 0
        assert stream.error is None

    def test_three_records_two_responses(self, tmp_path):
        records = [
            warc_record_bytes(HTML, uri="https://a.example/1"),
            warc_record_bytes(b"GET / HTTP/1.1\r\n\r\n", warc_type="request",
                              content_type="application/http; msgtype=request"),
            warc_record_bytes(MARKED, uri="https://a.example/2"),
        ]
        path = write_warc(tmp_path / "three.warc", records)
        stream, items = _stream_all(path)
        assert len(items) == 3
        types = [meta.record_type for meta, _ in items]
        assert types == ["response", "other", "response"]
        assert stream.skipped == 0

    def test_payload_losslessness(self, tmp_path):
        payloads = [HTML, MARKED, b"\x00\x01binary\xff", b""]
        records = [warc_record_bytes(p) for p in payloads]
        path = write_warc(tmp_path / "lossless.warc", records)
        _, items = _stream_all(path)
        assert b"".join(p for _, p in items) == b"".join(payloads)

    def test_offsets_strictly_increasing_and_exact(self, tmp_path):
        records = [warc_record_bytes(HTML, uri=f"https://a.example/{i}") for i in range(5)]
        path = write_warc(tmp_path / "offsets.warc", records)
        _, items = _stream_all(path)
        offsets = [meta.record_offset for meta, _ in items]
        assert offsets == sorted(set(offsets))
        # Plain archives report raw file offsets.
        expected = [sum(len(r) for r in records[:i]) for i in range(5)]
        assert offsets == expected

    def test_http_envelope_peeled(self, tmp_path):
        records = [warc_record_bytes(HTML, http_envelope=True)]
        path = write_warc(tmp_path / "http.warc", records)
        _, items = _stream_all(path)
        meta, payload = items[0]
        assert payload == HTML
        assert "text/html" in meta.content_type
        assert meta.record_type == "response"

    def test_metadata_fields(self, tmp_path):
        records = [warc_record_bytes(HTML, uri="https://a.example/x",
                                     date="2021-03-05T18:33:24Z")]
        path = write_warc(tmp_path / "CC-MAIN-20210305183324-20210305213324-00585.warc", records)
        _, items = _stream_all(path)
        meta, _ = items[0]
        assert meta.target_uri == "https://a.example/x"
        assert meta.warc_date == "2021-03-05T18:33:24Z"
        assert meta.warc_id == "CC-MAIN-20210305183324-20210305213324-00585"

    def test_non_html_response_is_other(self, tmp_path):
        records = [warc_record_bytes(b"%PDF-1.4 junk", content_type="application/pdf")]
        path = write_warc(tmp_path / "pdf.warc", records)
        _, items = _stream_all(path)
        assert items[0][0].record_type == "other"

    def test_html_sniffed_when_mime_wrong(self, tmp_path):
        records = [warc_record_bytes(b"  \n<html></html>", content_type="application/octet-stream")]
        path = write_warc(tmp_path / "sniff.warc", records)
        _, items = _stream_all(path)
        assert items[0][0].record_type == "response"

    def test_truncated_payload_sets_error(self, tmp_path):
        record = warc_record_bytes(HTML)
        path = tmp_path / "trunc.warc"
        path.write_bytes(record[: len(record) - len(HTML) // 2 - 4])
        stream, items = _stream_all(path)
        assert items == []
        assert isinstance(stream.error, TruncatedArchiveError)

    def test_garbage_between_records_skipped(self, tmp_path):
        good = warc_record_bytes(HTML)
        bad = b"WARC/1.0\r\nNo-Content-Length: oops\r\n\r\n"
        path = tmp_path / "garbage.warc"
        path.write_bytes(good + bad + good)
        stream, items = _stream_all(path)
        assert len(items) == 2
        assert stream.skipped == 1


class TestGzipArchives:
    def test_member_per_record(self, tmp_path):
        records = [
            warc_record_bytes(HTML, uri="https://a.example/1"),
            warc_record_bytes(b"req", warc_type="request", content_type="text/plain"),
            warc_record_bytes(MARKED, uri="https://a.example/2"),
        ]
        path = write_warc(tmp_path / "m.warc.gz", records, gzip_members=True)
        stream, items = _stream_all(path)
        assert len(items) == 3
        assert [m.record_type for m, _ in items] == ["response", "other", "response"]
        assert stream.skipped == 0

    def test_whole_file_gzip(self, tmp_path):
        records = [warc_record_bytes(HTML, uri=f"https://a.example/{i}") for i in range(4)]
        path = tmp_path / "whole.warc.gz"
        path.write_bytes(gzip.compress(b"".join(records)))
        _, items = _stream_all(path)
        assert len(items) == 4

    def test_corrupted_member_recovered(self, tmp_path):
        records = [
            warc_record_bytes(HTML, uri="https://a.example/1"),
            warc_record_bytes(HTML, uri="https://a.example/2"),
            warc_record_bytes(HTML, uri="https://a.example/3"),
        ]
        members = [gzip.compress(r) for r in records]
        middle = bytearray(members[1])
        for i in range(20, min(40, len(middle))):  # stomp deflate data
            middle[i] = 0xFF
        path = tmp_path / "corrupt.warc.gz"
        path.write_bytes(members[0] + bytes(middle) + members[2])
        stream, items = _stream_all(path)
        assert [m.target_uri for m, _ in items] == ["https://a.example/1", "https://a.example/3"]
        assert stream.skipped == 1
        assert stream.error is None

    def test_truncated_last_member(self, tmp_path):
        records = [warc_record_bytes(HTML, uri="https://a.example/1"),
                   warc_record_bytes(HTML, uri="https://a.example/2")]
        members = [gzip.compress(r) for r in records]
        path = tmp_path / "tg.warc.gz"
        path.write_bytes(members[0] + members[1][: len(members[1]) // 2])
        stream, items = _stream_all(path)
        assert len(items) == 1
        assert isinstance(stream.error, TruncatedArchiveError)

    def test_offsets_strictly_increasing(self, tmp_path):
        records = [warc_record_bytes(HTML, uri=f"https://a.example/{i}") for i in range(10)]
        path = write_warc(tmp_path / "off.warc.gz", records, gzip_members=True)
        _, items = _stream_all(path)
        offsets = [m.record_offset for m, _ in items]
        assert offsets == sorted(set(offsets))


def test_fuzz_never_raises(tmp_path):
    """Random garbage, half-real headers and chopped records must never
    raise or hang; the stream just skips or flags truncation."""
    import random
    rng = random.Random(0xF022)
    real = warc_record_bytes(HTML)
    for i in range(60):
        roll = rng.random()
        if roll < 0.3:
            blob = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 3000)))
        elif roll < 0.6:
            cut = rng.randrange(1, len(real))
            blob = real[:cut] + bytes(rng.randrange(256) for _ in range(rng.randrange(0, 200))) + real
        else:
            blob = (b"WARC/1.0\r\n" + bytes(rng.randrange(32, 127) for _ in range(rng.randrange(0, 400)))
                    + b"\r\n\r\n" + real)
        if rng.random() < 0.3:
            import gzip as gz
            blob = gz.compress(blob)[: rng.randrange(10, 80)] + blob
        path = tmp_path / f"fuzz{i}.warc"
        path.write_bytes(blob)
        stream = open_warc_stream(path)
        for meta, payload in stream:
            assert isinstance(payload, bytes)


def test_streaming_memory_bounded(tmp_path):
    """Traced allocations stay near one chunk while streaming an archive two
    orders of magnitude larger."""
    payload = b"<html>" + b"x" * 4000 + b"</html>"
    record = warc_record_bytes(payload)
    path = tmp_path / "big.warc"
    with open(path, "wb") as handle:
        for _ in range(16_000):  # ~66 MB
            handle.write(record)
    size = path.stat().st_size
    assert size > 60e6
    tracemalloc.start()
    count = 0
    for meta, body in open_warc_stream(path):
        count += 1
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    assert count == 16_000
    assert peak < 16e6, f"peak traced allocation {peak/1e6:.1f} MB"
