"""Duplicate removal against brute-force oracles, both execution modes."""
import io
import json
import random
from collections import Counter

import pytest

from conftest import random_record
from crawlqa.dedup import (
    MISSING_TIMESTAMP,
    content_dedup,
    dedup_file,
    external_sort,
    question_key,
    same_url_dedup,
    snapshot_timestamp,
)
from crawlqa.records import QuestionRecord, parse_record, serialize_record


def make_page(rng, uri, snapshot, question_texts):
    record = random_record(rng, uri=uri,
                           warc_id=f"CC-MAIN-{snapshot}-{snapshot}-00001")
    record.questions = [
        QuestionRecord(name_markup=text, answers=[]) for text in question_texts
    ]
    return record


class TestSnapshotTimestamp:
    def test_extracts_digits(self):
        assert snapshot_timestamp("CC-MAIN-20201026031408-20201026061408-00221") == "20201026031408"

    def test_missing_counts(self):
        counters = Counter()
        assert snapshot_timestamp("no-timestamp-here", counters) == MISSING_TIMESTAMP
        assert counters["missing_snapshot_timestamp"] == 1


class TestDedupKey:
    def test_url_key_from_record(self, rng):
        from crawlqa.dedup import DedupKey, page_key
        record = make_page(rng, "https://a.example/x", "20201026031408", ["q"])
        key = page_key(record)
        assert key == DedupKey("url", "https://a.example/x", "20201026031408")

    def test_invariants_enforced(self):
        from crawlqa.dedup import DedupKey
        with pytest.raises(ValueError):
            DedupKey("url", "https://a.example/x", "not-digits")
        with pytest.raises(ValueError):
            DedupKey("url", "", "20201026031408")
        with pytest.raises(ValueError):
            DedupKey("fuzzy", "x")
        DedupKey("content", "what is this")  # content keys need no timestamp


class TestSameUrlDedup:
    def test_latest_snapshot_wins(self, rng):
        older = make_page(rng, "https://a.example/x", "20201026031408", ["q1"])
        newer = make_page(rng, "https://a.example/x", "20210308174330", ["q2"])
        survivors = list(same_url_dedup([older, newer]))
        assert len(survivors) == 1
        assert survivors[0].warc_id.startswith("CC-MAIN-20210308")

    def test_identity_on_distinct_uris(self, rng):
        records = [make_page(rng, f"https://a.example/{i}", "20201026031408", ["q"])
                   for i in range(10)]
        assert list(same_url_dedup(records)) == records

    def test_tie_keeps_first(self, rng):
        first = make_page(rng, "https://a.example/x", "20201026031408", ["first"])
        second = make_page(rng, "https://a.example/x", "20201026031408", ["second"])
        survivors = list(same_url_dedup([first, second]))
        assert survivors[0].questions[0].name_markup == "first"

    def test_uri_byte_exact_no_normalization(self, rng):
        a = make_page(rng, "https://a.example/X", "20201026031408", ["q"])
        b = make_page(rng, "https://a.example/x", "20201026031408", ["q"])
        c = make_page(rng, "https://a.example/x/", "20201026031408", ["q"])
        assert len(list(same_url_dedup([a, b, c]))) == 3

    def test_oracle_three_snapshots(self, rng):
        snapshots = ("20201026031408", "20210305183324", "20210308174330")
        records = []
        for snapshot in snapshots:
            for i in range(100):
                records.append(make_page(rng, f"https://shared.example/{i}", snapshot, ["q"]))
        for i in range(50):
            records.append(make_page(rng, f"https://unique.example/{i}", "20210512100748", ["q"]))
        rng.shuffle(records)
        # Brute-force oracle: map uri -> record with max timestamp.
        oracle = {}
        for record in records:
            ts = snapshot_timestamp(record.warc_id)
            if record.uri not in oracle or ts > oracle[record.uri][0]:
                oracle[record.uri] = (ts, record)
        survivors = list(same_url_dedup(records))
        assert len(survivors) == 150
        assert {r.uri for r in survivors} == set(oracle)
        for record in survivors:
            assert record is oracle[record.uri][1]

    def test_survivor_uris_pairwise_distinct(self, rng):
        records = [make_page(rng, f"https://a.example/{i % 7}", "20201026031408", ["q"])
                   for i in range(40)]
        survivors = list(same_url_dedup(records))
        uris = [r.uri for r in survivors]
        assert len(uris) == len(set(uris))


class TestContentDedup:
    def test_identical_question_dropped(self, rng):
        a = make_page(rng, "https://a.example/1", "20201026031408", ["same question"])
        b = make_page(rng, "https://b.example/2", "20210305183324", ["same question"])
        survivors = list(content_dedup([a, b]))
        assert [r.uri for r in survivors] == ["https://a.example/1"]

    def test_markup_insensitive(self, rng):
        a = make_page(rng, "https://a.example/1", "20201026031408", ["<b>x</b>"])
        b = make_page(rng, "https://b.example/2", "20201026031408", ["x"])
        assert len(list(content_dedup([a, b]))) == 1

    def test_distinct_questions_survive(self, rng):
        records = [make_page(rng, f"https://a.example/{i}", "20201026031408", [f"question {i}"])
                   for i in range(20)]
        assert len(list(content_dedup(records))) == 20

    def test_partial_page_keeps_remaining_questions(self, rng):
        a = make_page(rng, "https://a.example/1", "20201026031408", ["shared", "unique a"])
        b = make_page(rng, "https://b.example/2", "20201026031408", ["shared", "unique b"])
        survivors = list(content_dedup([a, b]))
        assert [len(r.questions) for r in survivors] == [2, 1]
        assert survivors[1].questions[0].name_markup == "unique b"

    def test_case_and_whitespace_folded(self):
        q1 = QuestionRecord(name_markup="What  IS\tthis?")
        q2 = QuestionRecord(name_markup="what is this?")
        assert question_key(q1) == question_key(q2)


class TestExternalSort:
    def test_matches_sorted_small(self, rng):
        entries = [[rng.randint(0, 100), rng.randint(0, 100)] for _ in range(500)]
        assert list(external_sort(iter(entries), chunk_size=64)) == sorted(entries)

    def test_single_chunk_path(self):
        entries = [[3], [1], [2]]
        assert list(external_sort(iter(entries), chunk_size=100)) == [[1], [2], [3]]

    def test_unicode_keys(self):
        entries = [["zèbre"], ["âne"], ["zebra"]]
        assert list(external_sort(iter(entries), chunk_size=1)) == sorted(entries)


def corpus_lines(records):
    return "".join(serialize_record(r) + "\n" for r in records)


def run_dedup_file(tmp_path, lines, mode, external, chunk_size=16):
    in_path = tmp_path / f"in-{mode}-{external}.jsonl"
    in_path.write_text(lines, encoding="utf-8")
    out = io.StringIO()
    counters = dedup_file(str(in_path), out, mode, external=external,
                          temp_dir=str(tmp_path), chunk_size=chunk_size)
    return out.getvalue(), counters


class TestFileModesAgree:
    @pytest.mark.parametrize("mode", ["url", "content"])
    def test_in_memory_equals_external(self, tmp_path, rng, mode):
        records = []
        for i in range(300):
            uri = f"https://site{rng.randint(0, 40)}.example.com/{rng.randint(0, 60)}"
            snapshot = rng.choice(("20201026031408", "20210305183324", "20210308174330"))
            texts = [f"question {rng.randint(0, 120)}" for _ in range(rng.randint(1, 3))]
            records.append(make_page(rng, uri, snapshot, texts))
        lines = corpus_lines(records)
        memory_out, memory_counters = run_dedup_file(tmp_path, lines, mode, external=False)
        external_out, external_counters = run_dedup_file(tmp_path, lines, mode, external=True)
        assert memory_out == external_out
        assert memory_counters == external_counters

    def test_url_mode_passes_lines_verbatim(self, tmp_path, rng):
        records = [make_page(rng, f"https://a.example/{i}", "20201026031408", ["q%d" % i])
                   for i in range(5)]
        lines = corpus_lines(records)
        out, _ = run_dedup_file(tmp_path, lines, "url", external=False)
        assert out == lines

    def test_content_mode_emits_valid_records(self, tmp_path, rng):
        records = [make_page(rng, f"https://a.example/{i}", "20201026031408", ["dup", f"q{i}"])
                   for i in range(4)]
        out, counters = run_dedup_file(tmp_path, corpus_lines(records), "content", external=True)
        parsed = [parse_record(line) for line in out.splitlines()]
        assert counters["questions_out"] == sum(len(r.questions) for r in parsed)
        keys = [question_key(q) for r in parsed for q in r.questions]
        assert len(keys) == len(set(keys))
