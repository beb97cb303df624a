"""Command-line front end: ``cspr test | summary | simulate | power``.

Every flag can also be set through an environment variable named
``CSPR_<FLAG>`` with dashes turned into underscores (``CSPR_MAX_M=50``).
Command-line flags take precedence over the environment.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Iterable, TextIO

import numpy as np

from cspr.experiments import ConfigError, ExperimentSpec, generate, run_power
from cspr.sequence_io import FastaFormatError, IngestionPolicy, Sequence, SequenceContentError, gc_content, read_fasta, write_fasta
from cspr.testkit import TestConfig, TestReport, holm_bonferroni, run_test

log = logging.getLogger("cspr")

ENV_PREFIX = "CSPR_"
TSV_COLUMNS = ("id", "n", "gc", "skipped", "m_used", "capped", "eta", "p_value", "status", "reject_raw", "reject_holm")


def _env(name: str, default=None, kind=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    if kind is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return kind(raw)


def _fmt(v, column: str = "") -> str:
    if v is None:
        return "NA"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g") if column == "p_value" else repr(v)
    return str(v)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _write_table(rows: list[dict], columns: Iterable[str], fmt: str, out: TextIO, extra: dict | None = None, key: str = "rows"):
    columns = tuple(columns)
    if fmt == "json":
        doc = {key: rows}
        if extra:
            doc.update(extra)
        json.dump(doc, out, indent=2, default=_json_default)
        out.write("\n")
        return
    out.write("\t".join(columns) + "\n")
    for row in rows:
        out.write("\t".join(_fmt(row.get(c), c) for c in columns) + "\n")
    if extra and "summary" in extra:
        out.write("# " + " ".join(f"{k}={_fmt(v)}" for k, v in extra["summary"].items()) + "\n")


# test ------------------------------------------------------------------------------


def _report_row(rep: TestReport, reject_holm: bool) -> dict:
    return {
        "id": rep.id,
        "n": rep.n,
        "gc": rep.gc,
        "skipped": rep.skipped_positions,
        "m_used": rep.m_used,
        "capped": rep.truncated_at_cap,
        "eta": rep.eta,
        "p_value": rep.p_value,
        "status": rep.status,
        "reject_raw": rep.reject,
        "reject_holm": reject_holm,
    }


def _error_row(ident: str, message: str, seq: Sequence | None = None) -> dict:
    row = dict.fromkeys(TSV_COLUMNS)
    row.update(id=ident, status=f"error: {message}", reject_raw=False, reject_holm=False)
    if seq is not None:
        row.update(n=len(seq), gc=gc_content(seq), skipped=seq.skipped_positions)
    return row


def cmd_test(args) -> int:
    config = TestConfig(alpha=args.alpha, max_m=args.max_m, threshold_frac=args.threshold_frac)
    policy = IngestionPolicy(ambiguity=args.ambiguity, default_topology="linear" if args.linear else "circular")
    if args.linear:
        log.warning("--linear: the test statistic always wraps the sequence end to its start")
    slots: list[dict | TestReport] = []
    failed_files = 0
    pool = ProcessPoolExecutor(max_workers=args.workers) if args.workers > 1 else None
    try:
        for path in args.inputs:
            try:
                records = read_fasta(path, policy)
            except (OSError, FastaFormatError, SequenceContentError, UnicodeDecodeError) as exc:
                slots.append(_error_row(str(path), str(exc)))
                failed_files += 1
                continue
            if not records:
                slots.append(_error_row(str(path), "no records"))
                failed_files += 1
                continue
            testable = [s for s in records if len(s) >= config.min_length]
            job = partial(run_test, config=config)
            results = iter(pool.map(job, testable) if pool else map(job, testable))
            for s in records:
                if len(s) >= config.min_length:
                    slots.append(next(results))
                else:
                    slots.append(_error_row(s.id, f"too short for testing ({len(s)} < {config.min_length})", s))
    finally:
        if pool:
            pool.shutdown()

    reports = [x for x in slots if isinstance(x, TestReport)]
    flags = iter(holm_bonferroni([r.p_value for r in reports], config.alpha))
    rows = [_report_row(x, next(flags)) if isinstance(x, TestReport) else x for x in slots]
    ok = [r for r in rows if r["status"] == "ok"]
    summary = {
        "tested": len(reports),
        "accepted": sum(not r["reject_holm"] for r in ok),
        "rejected": sum(r["reject_holm"] for r in ok),
        "singular": sum(r["status"] == "singular-covariance" for r in rows),
        "errors": len(rows) - len(reports),
        "alpha": config.alpha,
        "correction": "holm-bonferroni",
    }
    with _open_out(args.out) as out:
        _write_table(rows, TSV_COLUMNS, args.format, out, {"summary": summary}, key="reports")
    return 1 if failed_files == len(args.inputs) else 0


# summary ---------------------------------------------------------------------------

SUMMARY_COLUMNS = ("property", "first_quartile", "median", "third_quartile", "mean", "std_dev")


def summary_rows(sequences: list[Sequence]) -> list[dict]:
    """Quartiles, mean and population standard deviation of length and GC content."""
    if not sequences:
        raise ValueError("no records to summarise")
    rows = []
    for name, values in (
        ("length", np.array([len(s) for s in sequences], dtype=float)),
        ("gc_content", np.array([gc_content(s) for s in sequences])),
    ):
        q1, med, q3 = np.quantile(values, [0.25, 0.5, 0.75])
        rows.append(
            {
                "property": name,
                "first_quartile": float(q1),
                "median": float(med),
                "third_quartile": float(q3),
                "mean": float(values.mean()),
                "std_dev": float(values.std()),
            }
        )
    return rows


def cmd_summary(args) -> int:
    policy = IngestionPolicy(ambiguity=args.ambiguity)
    sequences = []
    for path in args.inputs:
        sequences.extend(read_fasta(path, policy))
    rows = summary_rows(sequences)
    with _open_out(args.out) as out:
        _write_table(rows, SUMMARY_COLUMNS, args.format, out, {"records": len(sequences)})
    return 0


# simulate / power ------------------------------------------------------------------


def _load_spec(args) -> ExperimentSpec:
    spec = ExperimentSpec.from_file(args.spec)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    for name in ("alpha", "max_m", "threshold_frac"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return dataclasses.replace(spec, **overrides) if overrides else spec


def cmd_simulate(args) -> int:
    spec = _load_spec(args)
    if args.out in (None, "-"):
        write_fasta(generate(spec), sys.stdout)
    else:
        with open(args.out, "w", newline="\n") as fh:
            for s in generate(spec):
                write_fasta([s], fh)
    return 0


POWER_COLUMNS = ("effect", "n", "replicates", "alpha", "rejections", "singular", "rate", "std_error")


def cmd_power(args) -> int:
    spec = _load_spec(args)
    rows = [dataclasses.asdict(r) for r in run_power(spec, workers=args.workers)]
    with _open_out(args.out) as out:
        _write_table(rows, POWER_COLUMNS, args.format, out)
    return 0


class _open_out:
    def __init__(self, path: str | None):
        self.path = path

    def __enter__(self) -> TextIO:
        if self.path in (None, "-"):
            self.fh = None
            return sys.stdout
        self.fh = open(self.path, "w", newline="\n")
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not None:
            self.fh.close()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("tsv", "json"), default=_env("format", "tsv"))
    common.add_argument("--out", default=_env("out"), help="output path (default stdout)")
    common.add_argument("--workers", type=int, default=_env("workers", 1, int))
    common.add_argument("--ambiguity", choices=("skip", "error"), default=_env("ambiguity", "skip"))

    testing = argparse.ArgumentParser(add_help=False)
    testing.add_argument("--max-m", type=int, default=_env("max_m", None, int))
    testing.add_argument("--threshold-frac", type=float, default=_env("threshold_frac", None, float))

    parser = argparse.ArgumentParser(prog="cspr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", parents=[common, testing], help="test FASTA records for dinucleotide parity")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--alpha", type=float, default=_env("alpha", 0.01, float))
    p.add_argument("--linear", action="store_true", default=_env("linear", False, bool))
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("summary", parents=[common], help="length and GC-content summary statistics")
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("simulate", parents=[common], help="write simulated sequences as FASTA")
    p.add_argument("spec")
    p.add_argument("--seed", type=int, default=_env("seed", None, int))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("power", parents=[common, testing], help="rejection rates over an effect-size grid")
    p.add_argument("spec")
    p.add_argument("--seed", type=int, default=_env("seed", None, int))
    p.add_argument("--alpha", type=float, default=_env("alpha", None, float))
    p.set_defaults(func=cmd_power)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.command == "test":
        if args.max_m is None:
            args.max_m = TestConfig.max_m
        if args.threshold_frac is None:
            args.threshold_frac = TestConfig.threshold_frac
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error (key %s): %s", exc.key, exc)
        return 2
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
