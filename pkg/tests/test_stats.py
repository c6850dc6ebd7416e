"""Aggregate correctness on planted corpora, merge laws, domain labeling."""
import random

import pytest

from conftest import random_record
from crawlqa.records import AnswerRecord, QuestionRecord, WebpageRecord
from crawlqa.stats import (
    StatsAggregate,
    StatsConfig,
    accumulate,
    merge,
    registrable_label,
    render_report_json,
    render_report_table,
    report,
)


def page(uri, questions, language_attr="-"):
    return WebpageRecord(
        uri=uri, uuid="a5e97da2-f688-42af-8626-73a38fa8d06f",
        warc_id="CC-MAIN-20201026031408-20201026061408-00221",
        language_attr=language_attr, questions=questions)


def question(name=None, text=None, answers=()):
    return QuestionRecord(name_markup=name, text_markup=text, answers=list(answers))


def answer(text="an answer"):
    return AnswerRecord(text_markup=text, status="acceptedAnswer")


class TestRegistrableLabel:
    def test_subdomain_collapses_to_site(self):
        assert registrable_label("quant.stackexchange.com") == "stackexchange"

    def test_plain_domain(self):
        assert registrable_label("www.geograph.ie") == "geograph"

    def test_multi_label_suffix(self):
        assert registrable_label("news.bbc.co.uk") == "bbc"
        assert registrable_label("shop.example.com.au") == "example"

    def test_unknown_tld_default_rule(self):
        assert registrable_label("foo.bar.unknowntld") == "bar"

    def test_single_label_and_ip(self):
        assert registrable_label("localhost") == "localhost"
        assert registrable_label("192.168.0.1") == "192.168.0.1"

    def test_case_and_trailing_dot(self):
        assert registrable_label("WWW.Geograph.IE.") == "geograph"


class TestAccumulate:
    def test_question_word_classification(self):
        agg = StatsAggregate()
        accumulate(agg, page("https://a.example/1", [
            question(name="What languages do you speak?"),
        ]))
        assert agg.question_words["what"] == 1

    def test_question_word_uses_text_before_name(self):
        agg = StatsAggregate()
        accumulate(agg, page("https://a.example/1", [
            question(name="Silver care", text="<p>How do I clean it?</p>"),
        ]))
        assert agg.question_words == {"how": 1}

    def test_word_counts(self):
        agg = StatsAggregate()
        accumulate(agg, page("https://a.example/1", [
            question(name="How blue is the number 7?",
                     answers=[answer("<p>Quite blue indeed.</p>")]),
        ]))
        assert agg.sum_question_words == 6
        assert agg.sum_answer_words == 3
        assert agg.question_words == {"how": 1}

    def test_domain_counting(self):
        agg = StatsAggregate()
        accumulate(agg, page("https://quant.stackexchange.com/questions/39510/x",
                             [question(name="q?")]))
        assert agg.domains == {"stackexchange": 1}

    def test_markup_counts_beyond_trivial_set(self):
        agg = StatsAggregate()
        accumulate(agg, page("https://a.example/1", [
            question(name="plain name", answers=[answer("text<br>more")]),  # br only
            question(name="fancy <b>name</b>"),
        ]))
        assert agg.n_markup_questions == 1
        assert agg.markup_tags == {"br": 1, "b": 1}

    def test_qsumm_and_no_answer(self):
        agg = StatsAggregate()
        accumulate(agg, page("https://a.example/1", [
            question(name="n", text="t", answers=[answer()]),
            question(name="n only"),
        ]))
        assert agg.n_qsumm_questions == 1
        assert agg.n_no_answer_questions == 1

    def test_lang_tags(self):
        agg = StatsAggregate()
        accumulate(agg, page("https://a.example/1", [question(name="q")], language_attr="en-US"))
        accumulate(agg, page("https://a.example/2", [question(name="q2")]))
        assert agg.n_lang_tagged_pages == 1


class TestMerge:
    def test_merge_empty_identity(self):
        empty_a, empty_b = StatsAggregate(), StatsAggregate()
        merged = merge(empty_a, empty_b)
        assert merged.n_pages == 0
        rng = random.Random(7)
        agg = StatsAggregate()
        for _ in range(20):
            accumulate(agg, random_record(rng))
        again = merge(agg, StatsAggregate())
        assert again == agg

    def test_split_equivalence(self, rng):
        records = [random_record(rng) for _ in range(200)]
        single = StatsAggregate()
        for record in records:
            accumulate(single, record)
        for split_seed in range(5):
            split_rng = random.Random(split_seed)
            parts = [StatsAggregate() for _ in range(4)]
            for record in records:
                accumulate(parts[split_rng.randrange(4)], record)
            combined = parts[0]
            for part in parts[1:]:
                combined = merge(combined, part)
            assert combined == single

    def test_config_mismatch_refused(self):
        a = StatsAggregate(config=StatsConfig(trivial_markup_tags=frozenset({"br"})))
        b = StatsAggregate(config=StatsConfig(trivial_markup_tags=frozenset()))
        with pytest.raises(ValueError):
            merge(a, b)


class TestReport:
    def _planted(self):
        agg = StatsAggregate()
        words = ["what"] * 36 + ["how"] * 30 + ["when"] * 12 + ["which"] * 10 + \
                ["where"] * 6 + ["why"] * 3 + ["who"] * 2 + ["whose"] * 1
        for i, word in enumerate(words):
            agg = accumulate(agg, page(f"https://s{i % 9}.example.com/{i}", [
                question(name=f"{word.capitalize()} is item {i}?")]))
        return agg

    def test_planted_percentages(self):
        # 36 what / 30 how / 34 spread over the other six words.
        dims, dist = report(self._planted(), top_k=8)
        assert dims.n_questions == 100
        assert dist.question_words["what"] == 36
        assert dist.question_word_pct["what"] == pytest.approx(36.0)
        assert dist.question_word_pct["how"] == pytest.approx(30.0)

    def test_top_k_truncation_and_order(self):
        dims, dist = report(self._planted(), top_k=3)
        assert list(dist.question_words) == ["what", "how", "when"]
        assert sum(dist.question_word_pct.values()) <= 100.0 + 1e-9

    def test_percentages_sum_to_100_at_full_k(self):
        dims, dist = report(self._planted(), top_k=8)
        assert sum(dist.question_word_pct.values()) == pytest.approx(100.0)

    def test_all_answered_no_answer_zero(self):
        agg = StatsAggregate()
        accumulate(agg, page("https://a.example/1", [question(name="q", answers=[answer()])]))
        dims, _ = report(agg)
        assert dims.no_answer_fraction == 0.0
        assert dims.avg_answers_excl_empty == 1.0

    def test_single_page_no_lang(self):
        agg = StatsAggregate()
        accumulate(agg, page("https://a.example/1", [question(name="q")]))
        dims, _ = report(agg)
        assert dims.lang_tag_fraction == 0.0

    def test_empty_aggregate_absent_means(self):
        dims, dist = report(StatsAggregate())
        assert dims.mean_q_words is None
        assert dims.mean_a_words is None
        assert dims.avg_answers_excl_empty is None

    def test_question_word_total_bounded(self, rng):
        agg = StatsAggregate()
        for _ in range(100):
            accumulate(agg, random_record(rng))
        assert sum(agg.question_words.values()) <= agg.n_questions

    def test_dimension_invariants_randomized(self, rng):
        from crawlqa.stats import QUESTION_WORDS
        agg = StatsAggregate()
        for _ in range(200):
            accumulate(agg, random_record(rng))
        assert set(agg.question_words) <= set(QUESTION_WORDS)
        dims, _ = report(agg)
        for fraction in (dims.markup_fraction, dims.q_summ_fraction,
                         dims.no_answer_fraction, dims.lang_tag_fraction):
            assert 0.0 <= fraction <= 1.0
        if dims.avg_answers_excl_empty is not None:
            assert dims.avg_answers_excl_empty >= 1.0

    def test_renderers_do_not_crash(self):
        dims, dist = report(self._planted())
        json_text = render_report_json(dims, dist)
        table_text = render_report_table(dims, dist)
        assert "question_words" in json_text
        assert "question words" in table_text
