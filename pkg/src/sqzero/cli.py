"""Command-line interface.

Subcommands: analyze, verify, commutator, counterexample, fuzz. Reports are
JSON documents on stdout with every certificate embedded as exact rational
matrix blocks; exit codes are a stable contract (0 yes / 1 no / 2 unknown /
3 commutator-not-nonnegative / 64 input error).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np
from gmpy2 import mpq

from . import counterexample as cx
from .exactmat import Matrix, rank
from .gen import GenConfig, InvalidConfigError, gen_commutator_pair, gen_witness
from .lattice import NegativeEntryError
from .matio import MatrixFileError, format_matrix, parse_matrix_file
from .nnrank import nonneg_rank_bounds
from .squarezero import (
    commutator_analysis,
    cube_zero_root,
    decide_square_zero_product,
    form_from_cube_zero,
    necessary_condition_check,
    verify_witness,
)

EXIT_YES = 0
EXIT_NO = 1
EXIT_UNKNOWN = 2
EXIT_NOT_NONNEGATIVE = 3
EXIT_INPUT_ERROR = 64


def _mat_doc(a: Matrix) -> dict:
    return {
        "rows": a.rows,
        "cols": a.cols,
        "entries": [[str(x) for x in a.row(i)] for i in range(a.rows)],
    }


def _cert_doc(cert: dict) -> dict:
    return {k: _mat_doc(v) if isinstance(v, Matrix) else v for k, v in cert.items()}


def _bounds_doc(b) -> dict:
    return {
        "lower": b.lower,
        "upper": b.upper,
        "exact": b.exact,
        "lower_certificate": _cert_doc(b.lower_certificate),
        "upper_certificate": _cert_doc(b.upper_certificate),
    }


def _partition_doc(p) -> dict:
    return {"n": p.n, "i1": list(p.i1), "i2": list(p.i2), "i3": list(p.i3)}


def _witness_doc(w) -> dict:
    return {"M": _mat_doc(w.m), "N": _mat_doc(w.n), "U": _mat_doc(w.u)}


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _emit(report: dict, started: float) -> None:
    report["timing_seconds"] = round(time.monotonic() - started, 6)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _input_error(report: dict, message: str, started: float) -> int:
    report["error"] = message
    _emit(report, started)
    print(f"error: {message}", file=sys.stderr)
    return EXIT_INPUT_ERROR


def cmd_analyze(args) -> int:
    started = time.monotonic()
    report = {"command": "analyze", "input": args.input}
    try:
        t = parse_matrix_file(args.input)
    except MatrixFileError as exc:
        return _input_error(report, str(exc), started)
    report["input_digest"] = _digest(args.input)
    if not t.is_square():
        return _input_error(report, f"matrix is {t.rows}x{t.cols}, not square", started)
    if not t.is_nonnegative():
        return _input_error(report, "matrix has a negative entry", started)

    cover_limit = None
    limits = [x for x in (args.max_cover_time, args.time_limit) if x is not None]
    if limits:
        cover_limit = min(limits)
    verdict = decide_square_zero_product(
        t, nmf_restarts=args.nmf_restarts, seed=args.seed, cover_time_limit=cover_limit
    )
    report["rank"] = rank(t)
    report["necessary_condition_holds"] = necessary_condition_check(t)
    vdoc = {"answer": verdict.answer}
    if verdict.obstruction is not None:
        vdoc["obstruction"] = verdict.obstruction
    if verdict.form is not None:
        vdoc["partition"] = _partition_doc(verdict.form.partition)
        vdoc["t13_block"] = _mat_doc(verdict.form.block)
    if verdict.bounds is not None:
        vdoc["nonneg_rank_bounds"] = _bounds_doc(verdict.bounds)
    if verdict.witness is not None:
        vdoc["witness"] = _witness_doc(verdict.witness)
    report["verdict"] = vdoc
    _emit(report, started)
    return {"yes": EXIT_YES, "no": EXIT_NO, "unknown": EXIT_UNKNOWN}[verdict.answer]


def cmd_verify(args) -> int:
    started = time.monotonic()
    report = {"command": "verify", "inputs": [args.t, args.m, args.n]}
    try:
        t = parse_matrix_file(args.t)
        m = parse_matrix_file(args.m)
        n = parse_matrix_file(args.n)
    except MatrixFileError as exc:
        return _input_error(report, str(exc), started)
    report["input_digests"] = [_digest(p) for p in (args.t, args.m, args.n)]
    if not (t.shape == m.shape == n.shape and t.is_square()):
        return _input_error(
            report, f"dimension mismatch: {t.shape}, {m.shape}, {n.shape}", started
        )
    from .squarezero import SquareZeroWitness

    result = verify_witness(SquareZeroWitness(m, n), t)
    report["identities"] = result.checks
    report["all_hold"] = result.all_hold
    _emit(report, started)
    return EXIT_YES if result.all_hold else EXIT_NO


def cmd_commutator(args) -> int:
    started = time.monotonic()
    report = {"command": "commutator", "inputs": [args.m, args.n]}
    try:
        m = parse_matrix_file(args.m)
        n = parse_matrix_file(args.n)
    except MatrixFileError as exc:
        return _input_error(report, str(exc), started)
    report["input_digests"] = [_digest(p) for p in (args.m, args.n)]
    try:
        analysis = commutator_analysis(m, n)
    except (ValueError, NegativeEntryError) as exc:
        return _input_error(report, str(exc), started)
    doc = {
        "commutator": _mat_doc(analysis.commutator),
        "is_nonnegative": analysis.is_nonnegative,
    }
    if analysis.is_nonnegative:
        doc.update(
            {
                "annihilation": analysis.annihilation,
                "partition": _partition_doc(analysis.partition),
                "t13_block": _mat_doc(analysis.t13_block),
                "rank_of_block": analysis.rank_of_block,
                "dim_l2": analysis.dim_l2,
                "necessary_condition_holds": analysis.necessary_condition_holds,
            }
        )
    report["analysis"] = doc
    _emit(report, started)
    return EXIT_YES if analysis.is_nonnegative else EXIT_NOT_NONNEGATIVE


def cmd_counterexample(args) -> int:
    started = time.monotonic()
    report = {"command": "counterexample", "seed": args.seed}
    ok = True

    t13 = cx.build_T13()
    bounds = nonneg_rank_bounds(t13)
    t = cx.build_counterexample_T()
    verdict = decide_square_zero_product(t)
    necessary = necessary_condition_check(t)
    claims = {
        "rank_t13_is_3": rank(t13) == 3,
        "nonneg_rank_t13_is_4": (bounds.lower, bounds.upper) == (4, 4),
        "necessary_condition_holds": necessary,
        "square_zero_product_verdict_no": verdict.answer == "no",
    }
    ok = all(claims.values())
    report["claims"] = claims
    report["t13_bounds"] = _bounds_doc(bounds)
    report["verdict"] = {
        "answer": verdict.answer,
        "obstruction": verdict.obstruction,
        "partition": _partition_doc(verdict.form.partition) if verdict.form else None,
    }

    if args.lemma_trials > 0:
        rng = np.random.Generator(
            np.random.Philox(key=np.array([args.seed, 1], dtype=np.uint64))
        )
        failures = 0
        for _ in range(args.lemma_trials):
            u = [mpq(int(x), 10) for x in rng.integers(0, 101, 4)]
            v = [mpq(int(x), 10) for x in rng.integers(0, 101, 4)]
            try:
                cx.lemma23_check(u, v)
            except AssertionError:
                failures += 1
        report["lemma_fuzz"] = {"trials": args.lemma_trials, "failures": failures}
        ok = ok and failures == 0
    else:
        report["lemma_fuzz"] = {"skipped": True}

    report["all_claims_reproduced"] = ok
    _emit(report, started)
    return EXIT_YES if ok else EXIT_NO


def _load_fuzz_config(path) -> tuple:
    raw = json.loads(Path(path).read_text())
    dims = tuple(raw.get("dims", [2, 2, 2]))
    cfg = GenConfig(
        seed=raw.get("seed", 0),
        dims=dims,
        inner_dim=raw.get("inner_dim", min(2, dims[1] if len(dims) == 3 else 0)),
        max_entry=raw.get("max_entry", 3),
        denominator=raw.get("denominator", 1),
        density=raw.get("density", 1.0),
    )
    return (
        cfg,
        int(raw.get("cases", 1000)),
        int(raw.get("commutator_cases", 50)),
        int(raw.get("max_rejects", 200)),
    )


def _dump_reproducer(out_dir: Path, tag: str, mats: dict) -> list:
    paths = []
    for name, mat in mats.items():
        p = out_dir / f"fuzz_reproducer_{tag}_{name}.mat"
        p.write_text(format_matrix(mat))
        paths.append(str(p))
    return paths


def cmd_fuzz(args) -> int:
    started = time.monotonic()
    report = {"command": "fuzz", "config": args.config, "prng": "philox4x64"}
    try:
        cfg, cases, comm_cases, max_rejects = _load_fuzz_config(args.config)
    except (OSError, json.JSONDecodeError, InvalidConfigError, TypeError, IndexError) as exc:
        return _input_error(report, f"invalid config: {exc}", started)
    report["input_digest"] = _digest(args.config)
    report["generator"] = {
        "seed": cfg.seed,
        "dims": list(cfg.dims),
        "inner_dim": cfg.inner_dim,
        "max_entry": cfg.max_entry,
        "denominator": cfg.denominator,
        "density": cfg.density,
    }
    out_dir = Path(args.out_dir)
    violations = []

    for i in range(cases):
        t, w = gen_witness(cfg, stream=i)
        if args.self_test_mutate and i == 0 and t.rows > 0:
            mutated = w.m + Matrix.elementary(t.rows, 0, 0, 1)
            from .squarezero import SquareZeroWitness

            w = SquareZeroWitness(mutated, w.n)
        check = verify_witness(w, t)
        if not check.all_hold:
            violations.append(
                {
                    "campaign": "roundtrip",
                    "case": i,
                    "violated": check.violated(),
                    "reproducer": _dump_reproducer(
                        out_dir, f"roundtrip_{i}", {"T": t, "M": w.m, "N": w.n}
                    ),
                }
            )
            continue
        u = cube_zero_root(w)
        form, u12, _ = form_from_cube_zero(u)
        if len(form.partition.i2) < u12.cols:
            violations.append({"campaign": "roundtrip", "case": i, "violated": ["middle-budget"]})

    accepted = 0
    attempted = 0
    for i in range(comm_cases):
        attempted += 1
        draw = gen_commutator_pair(cfg, max_rejects=max_rejects, stream=i)
        if not draw.accepted:
            continue
        accepted += 1
        analysis = commutator_analysis(draw.m, draw.n)
        conclusions_hold = (
            analysis.is_nonnegative
            and all(analysis.annihilation.values())
            and analysis.necessary_condition_holds
        )
        if not conclusions_hold:
            violations.append(
                {
                    "campaign": "commutator",
                    "case": i,
                    "reproducer": _dump_reproducer(
                        out_dir, f"commutator_{i}", {"M": draw.m, "N": draw.n}
                    ),
                }
            )

    report["roundtrip_cases"] = cases
    report["commutator_cases_attempted"] = attempted
    report["commutator_cases_accepted"] = accepted
    report["violations"] = violations
    _emit(report, started)
    return EXIT_YES if not violations else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqzero",
        description="Exact decision procedures for products and commutators of "
        "nonnegative square-zero matrices.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("analyze", help="decide whether T is a product of square-zero factors")
    p.add_argument("input", help="matrix file for T")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nmf-restarts", type=int, default=8)
    p.add_argument("--max-cover-time", type=float, default=None, metavar="SECONDS")
    p.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="check all witness identities for (T, M, N)")
    p.add_argument("t")
    p.add_argument("m")
    p.add_argument("n")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("commutator", help="analyze MN - NM for square-zero M, N")
    p.add_argument("m")
    p.add_argument("n")
    p.set_defaults(func=cmd_commutator)

    p = sub.add_parser("counterexample", help="reproduce the built-in 11x11 separation")
    p.add_argument("--lemma-trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("fuzz", help="run generator-driven property campaigns")
    p.add_argument("config", help="JSON generator config")
    p.add_argument("--self-test-mutate", action="store_true", help="inject a known-bad witness")
    p.add_argument("--out-dir", default=".", help="directory for reproducer files")
    p.set_defaults(func=cmd_fuzz)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
