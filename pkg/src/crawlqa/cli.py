"""Command-line pipeline: composable subcommands over JSONL streams.

Every subcommand prints a machine-readable summary (counts in/out, skips,
rejects) as one JSON object on standard error, keeping standard output a
pure data channel.  Exit codes: 0 success, 1 usage error, 2 I/O error,
3 data error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import multiprocessing
import os
import shutil
import sys
import tempfile
import uuid as uuid_module
from collections import Counter
from dataclasses import dataclass

from . import bloom as bloom_module
from . import dedup as dedup_module
from . import stats as stats_module
from .exports import write_denoising, write_retrieval, write_seq2seq
from .extract import CleanPolicy, extract_webpage, load_allowlist
from .ioutil import open_text_input, open_text_output
from .langid import DEFAULT_THRESHOLD, annotate, get_identifier
from .metrics import corpus_scores, score_pair
from .records import RecordParseError, parse_record, serialize_record
from .warc import WarcRecordMeta, contains_question_marker, open_warc_stream

__all__ = ["main"]


class DataError(Exception):
    """Input is readable but unusable (exit code 3)."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


@dataclass(frozen=True)
class PipelineConfig:
    """Cross-command knobs; invalid values are usage errors (exit 1)."""

    workers: int = 1
    allowlist_path: str | None = None
    language_model_path: str | None = None
    lang_threshold: float = DEFAULT_THRESHOLD
    fp_target: float = bloom_module.DEFAULT_FP_TARGET
    top_k: int = 5
    external_sort: bool = False
    temp_dir: str | None = None

    @classmethod
    def from_args(cls, args):
        mapping = {
            "workers": "workers",
            "allowlist_path": "allowlist",
            "language_model_path": "language_model",
            "lang_threshold": "lang_threshold",
            "fp_target": "fp",
            "top_k": "top_k",
            "external_sort": "external",
            "temp_dir": "temp_dir",
        }
        values = {}
        for field_name, dest in mapping.items():
            if hasattr(args, dest):
                values[field_name] = getattr(args, dest)
        return cls(**values)

    def validate(self):
        if self.workers < 1:
            _usage_error("--workers must be >= 1")
        if not 0.0 <= self.lang_threshold <= 1.0:
            _usage_error("--lang-threshold must be in [0, 1]")
        if not 0.0 < self.fp_target < 1.0:
            _usage_error("--fp must be in (0, 1)")
        if self.top_k < 1:
            _usage_error("--top-k must be >= 1")
        return self


def _emit_summary(command, counters, ensure=()):
    for key in ensure:
        counters.setdefault(key, 0)
    payload = {"command": command}
    payload.update(sorted(counters.items()))
    sys.stderr.write(json.dumps(payload, ensure_ascii=False) + "\n")


def _usage_error(message):
    sys.stderr.write(f"error: {message}\n")
    raise SystemExit(1)


# ---------------------------------------------------------------- extract

_WORKER = {}


def _derived_uuid(seed, warc_id, record_offset):
    digest = hashlib.blake2b(
        f"{warc_id}\x00{record_offset}".encode(),
        digest_size=16,
        key=seed.to_bytes(8, "little", signed=False),
    ).digest()
    return str(uuid_module.UUID(bytes=digest, version=4))


def _init_extract_worker(policy, identifier, uuid_seed, numeric_as_strings):
    _WORKER["policy"] = policy
    _WORKER["identifier"] = identifier
    _WORKER["uuid_seed"] = uuid_seed
    _WORKER["numeric_as_strings"] = numeric_as_strings


def _process_page(task):
    meta_fields, payload = task
    meta = WarcRecordMeta(*meta_fields)
    counters = Counter()
    seed = _WORKER["uuid_seed"]
    if seed is not None:
        factory = lambda: _derived_uuid(seed, meta.warc_id, meta.record_offset)
    else:
        factory = None
    record = extract_webpage(payload, meta, _WORKER["policy"], counters, factory)
    if record is None:
        return None, dict(counters), None
    record = annotate(record, _WORKER["identifier"])
    counters["questions_out"] += len(record.questions)
    counters["answers_out"] += sum(len(q.answers) for q in record.questions)
    line = serialize_record(record, numeric_as_strings=_WORKER["numeric_as_strings"])
    return line, dict(counters), (meta.warc_id, meta.record_offset)


def _extract_tasks(paths, counters, streams):
    for path in paths:
        stream = open_warc_stream(path)
        streams.append(stream)
        for meta, payload in stream:
            counters["records_in"] += 1
            if meta.record_type != "response":
                counters["non_response"] += 1
                continue
            counters["responses"] += 1
            if not contains_question_marker(payload):
                counters["no_marker"] += 1
                continue
            counters["marker_candidates"] += 1
            meta_fields = (meta.target_uri, meta.warc_date, meta.record_type,
                           meta.content_type, meta.record_offset, meta.warc_id)
            yield meta_fields, payload


def cmd_extract(args):
    config = PipelineConfig.from_args(args).validate()
    policy = CleanPolicy()
    if config.allowlist_path:
        policy = CleanPolicy(textual_tags=load_allowlist(config.allowlist_path))
    identifier = get_identifier(config.language_model_path,
                                threshold=config.lang_threshold)
    counters = Counter()
    streams = []
    tasks = _extract_tasks(args.warcs, counters, streams)
    numeric = not args.numeric_values

    _init_extract_worker(policy, identifier, args.uuid_seed, numeric)
    if config.workers == 1:
        results = map(_process_page, tasks)
        pool = None
    else:
        pool = multiprocessing.Pool(
            config.workers,
            initializer=_init_extract_worker,
            initargs=(policy, identifier, args.uuid_seed, numeric),
        )
        results = pool.imap(_process_page, tasks, chunksize=16)

    out = open_text_output(args.out)
    buffered = []
    try:
        for line, worker_counters, sort_key in results:
            for key, value in worker_counters.items():
                counters[key] += value
            if line is None:
                continue
            counters["pages_out"] += 1
            if args.sorted:
                buffered.append((sort_key, line))
            else:
                out.write(line)
                out.write("\n")
        if args.sorted:
            buffered.sort(key=lambda item: item[0])
            for _, line in buffered:
                out.write(line)
                out.write("\n")
    finally:
        if pool is not None:
            pool.close()
            pool.join()
        out.close()
    for stream in streams:
        counters["warc_skips"] += stream.skipped
        counters["bytes_in"] += stream.bytes_read
        if stream.error is not None:
            counters["truncated_archives"] += 1
    _emit_summary("extract", counters,
                  ensure=("records_in", "responses", "pages_out", "questions_out", "warc_skips"))
    return 0


# ---------------------------------------------------------------- dedup

def cmd_dedup(args):
    in_path = args.input
    spool = None
    try:
        if in_path == "-" and args.external and args.mode == "content":
            # Content dedup in external mode re-reads its input.
            spool = tempfile.NamedTemporaryFile(
                mode="wb", suffix=".jsonl", dir=args.temp_dir, delete=False)
            shutil.copyfileobj(sys.stdin.buffer, spool)
            spool.close()
            in_path = spool.name
        out = open_text_output(args.out)
        try:
            counters = dedup_module.dedup_file(
                in_path, out, args.mode,
                external=args.external,
                temp_dir=args.temp_dir,
                chunk_size=args.sort_chunk,
            )
        finally:
            out.close()
    finally:
        if spool is not None:
            os.unlink(spool.name)
    _emit_summary("dedup", counters, ensure=("pages_in", "pages_out"))
    return 0


# ---------------------------------------------------------------- stats

def _read_corpus(path, counters):
    with open_text_input(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield parse_record(line, line_no)
            except RecordParseError:
                counters["bad_lines"] += 1


def cmd_stats(args):
    config = PipelineConfig.from_args(args).validate()
    counters = Counter()
    agg = stats_module.StatsAggregate()
    for record in _read_corpus(args.input, counters):
        stats_module.accumulate(agg, record)
    counters["pages_in"] = agg.n_pages
    counters["questions_in"] = agg.n_questions
    _emit_summary("stats", counters, ensure=("pages_in", "questions_in"))
    if agg.n_pages == 0:
        raise DataError("no records")
    dims, dist = stats_module.report(agg, top_k=config.top_k)
    out = open_text_output(args.out)
    try:
        if args.format == "table":
            out.write(stats_module.render_report_table(dims, dist))
        else:
            out.write(stats_module.render_report_json(dims, dist))
            out.write("\n")
    finally:
        out.close()
    return 0


# ---------------------------------------------------------------- overlap

def _iter_questions(path, input_format, counters):
    with open_text_input(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if input_format == "plain":
                yield line
            elif input_format == "questions":
                try:
                    obj = json.loads(line)
                    yield obj["question"]
                except (json.JSONDecodeError, TypeError, KeyError):
                    counters["bad_lines"] += 1
            else:
                try:
                    record = parse_record(line, line_no)
                except RecordParseError:
                    counters["bad_lines"] += 1
                    continue
                for question in record.questions:
                    name = question.name_markup or ""
                    text = question.text_markup or ""
                    yield (name + " " + text).strip()


def cmd_overlap_build(args):
    config = PipelineConfig.from_args(args).validate()
    if args.capacity < 1:
        _usage_error("--capacity must be >= 1")
    counters = Counter()
    bloom = bloom_module.NGramBloomFilter.sized_for(
        args.capacity, config.fp_target, seed=args.seed)
    for path in args.inputs:
        for question in _iter_questions(path, args.input_format, counters):
            counters["questions_in"] += 1
            counters["grams_in"] += bloom.add_question(question)
    bloom.save(args.out)
    counters["filter_bits"] = bloom.m
    counters["filter_hashes"] = bloom.k
    counters["inserted"] = bloom.item_count
    _emit_summary("overlap-build", counters, ensure=("questions_in", "grams_in"))
    return 0


def cmd_overlap_audit(args):
    counters = Counter()
    bloom = bloom_module.NGramBloomFilter.load(args.filter)
    questions = _iter_questions(args.test, args.input_format, counters)
    try:
        result = bloom_module.overlap(questions, bloom)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    counters["test_questions"] = result.n_test
    counters["test_grams"] = result.n_grams
    _emit_summary("overlap-audit", counters)
    question_pct, gram_pct = result.as_percentages()
    out = open_text_output(args.out)
    try:
        out.write(json.dumps({
            "question_overlap_pct": round(question_pct, 2),
            "gram_overlap_pct": round(gram_pct, 2),
            "n_test_questions": result.n_test,
            "n_test_grams": result.n_grams,
        }, ensure_ascii=False))
        out.write("\n")
    finally:
        out.close()
    return 0


# ---------------------------------------------------------------- export

def cmd_export(args):
    counters = Counter()
    records = _read_corpus(args.input, counters)
    out = open_text_output(args.out)
    try:
        if args.format == "seq2seq":
            counters["examples_out"] = write_seq2seq(
                records, out, style=args.style, accepted_only=args.accepted_only)
        elif args.format == "denoise":
            counters["examples_out"] = write_denoising(records, out)
        else:
            counters["examples_out"] = write_retrieval(records, out)
    finally:
        out.close()
    _emit_summary("export", counters, ensure=("examples_out",))
    return 0


# ---------------------------------------------------------------- eval

def _read_eval_column(path, keys, counters):
    values = []
    with open_text_input(path) as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                values.append(line)
                continue
            if isinstance(obj, dict):
                for key in keys:
                    if key in obj:
                        values.append(obj[key])
                        break
                else:
                    counters["bad_lines"] += 1
            else:
                values.append(obj)
    return values


def cmd_eval(args):
    counters = Counter()
    predictions = _read_eval_column(args.pred, ("prediction", "pred"), counters)
    references = _read_eval_column(args.ref, ("references", "reference", "answers"), counters)
    if len(predictions) != len(references):
        raise DataError(
            f"prediction/reference counts differ: {len(predictions)} != {len(references)}")
    if not predictions:
        raise DataError("no pairs to score")
    pairs = []
    for prediction, refs in zip(predictions, references):
        if isinstance(refs, str):
            refs = [refs]
        if not isinstance(prediction, str) or not refs:
            raise DataError("bad prediction/reference line")
        pairs.append(score_pair(prediction, [str(r) for r in refs]))
    counters["pairs"] = len(pairs)
    _emit_summary("eval", counters)
    scores = corpus_scores(pairs)
    print(f"{scores[args.metric]:.2f}")
    return 0


# ---------------------------------------------------------------- parser

# Config-file spellings that map onto flag destinations.
_CONFIG_ALIASES = {
    "language_model_path": "language_model",
    "allowlist_path": "allowlist",
    "external_sort": "external",
    "fp_target": "fp",
}


def _load_config(path):
    values = {}
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataError(f"bad config line: {raw.rstrip()}")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            key = _CONFIG_ALIASES.get(key, key)
            value = value.strip()
            try:
                values[key] = json.loads(value)
            except json.JSONDecodeError:
                values[key] = value
    return values


def build_parser():
    parser = _ArgumentParser(
        prog="crawlqa",
        description="Mine, deduplicate, profile, audit and export schema.org "
                    "question-answer corpora from web archives.",
    )
    parser.add_argument("--config", help="key=value defaults file")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers = []

    p = sub.add_parser("extract", help="mine WARC archives into corpus JSONL")
    p.add_argument("warcs", nargs="+", metavar="WARC")
    p.add_argument("--out", default="-")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--sorted", action="store_true",
                   help="sort output by (warc id, record offset) for reproducible bytes")
    p.add_argument("--allowlist", help="textual-tag allowlist file, one tag per line")
    p.add_argument("--language-model", help="external fasttext model path")
    p.add_argument("--lang-threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--uuid-seed", type=int, default=None,
                   help="derive page UUIDs deterministically from this seed")
    p.add_argument("--numeric-values", action="store_true",
                   help="serialize counts as JSON numbers instead of digit strings")
    p.set_defaults(func=cmd_extract)
    subparsers.append(p)

    p = sub.add_parser("dedup", help="drop same-URL or same-content duplicates")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--mode", choices=("url", "content"), required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--external", action="store_true",
                   help="external merge sort instead of in-memory hashing")
    p.add_argument("--temp-dir", default=None)
    p.add_argument("--sort-chunk", type=int, default=100_000)
    p.set_defaults(func=cmd_dedup)
    subparsers.append(p)

    p = sub.add_parser("stats", help="corpus dimensions and distributions")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--out", default="-")
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_stats)
    subparsers.append(p)

    p = sub.add_parser("overlap-build", help="build an 8-gram bloom filter from training questions")
    p.add_argument("inputs", nargs="+", metavar="FILE")
    p.add_argument("--out", required=True)
    p.add_argument("--capacity", type=int, required=True,
                   help="expected number of inserted grams")
    p.add_argument("--fp", type=float, default=bloom_module.DEFAULT_FP_TARGET)
    p.add_argument("--seed", type=int, default=bloom_module.DEFAULT_SEED)
    p.add_argument("--input-format", choices=("corpus", "questions", "plain"),
                   default="corpus")
    p.set_defaults(func=cmd_overlap_build)
    subparsers.append(p)

    p = sub.add_parser("overlap-audit", help="report test-set overlap against a built filter")
    p.add_argument("--filter", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--input-format", choices=("corpus", "questions", "plain"),
                   default="corpus")
    p.set_defaults(func=cmd_overlap_audit)
    subparsers.append(p)

    p = sub.add_parser("export", help="convert a corpus into training formats")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--format", choices=("seq2seq", "denoise", "retrieval"), required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--style", choices=("tsv", "jsonl"), default="tsv",
                   help="seq2seq output style")
    p.add_argument("--accepted-only", action="store_true")
    p.set_defaults(func=cmd_export)
    subparsers.append(p)

    p = sub.add_parser("eval", help="score a prediction file against references")
    p.add_argument("--metric", choices=("em", "ar", "rouge-l"), required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--ref", required=True)
    p.set_defaults(func=cmd_eval)
    subparsers.append(p)

    return parser, subparsers


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    # Apply config-file values as defaults before the real parse.
    config_path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
        elif arg.startswith("--config="):
            config_path = arg.split("=", 1)[1]
    try:
        if config_path:
            config = _load_config(config_path)
            for subparser in subparsers:
                known = {action.dest for action in subparser._actions}
                subparser.set_defaults(**{k: v for k, v in config.items() if k in known})
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return 1
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except BrokenPipeError:
        return 0
    except DataError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
