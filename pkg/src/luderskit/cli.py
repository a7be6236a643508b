"""Command-line driver.

Subcommands: ``verify-prop1``, ``verify-prop2``, ``lemma``, ``sweep``,
``analyze``. Exit status is 0 when every check passes, 1 when a
verification fails and 2 on usage or validation errors (in which case no
report is written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from typing import List, Optional, Sequence

import numpy as np

from .ensembles import Regime
from .exceptions import LudersError, NotHermitian
from .harness import builtin_lemma_fixtures, run_lemma, run_prop1, run_prop2
from .linalg import DEFAULT_TOL, Tolerances, hermitian_violation
from .lueders import deviation
from .quantum import make_family
from .serialization import load_fixture, operator_to_json
from .signaling import DEFAULT_LAMBDA_GRID, max_signaling_state, sweep_unsharpness
from .theorem import DEFAULT_N_MAX, check_prop1, check_prop2

SCHEMA_VERSION = 1
SWEEP_MAX_ERROR = 1e-12
MAX_TRIALS = 10 ** 6
MAX_DIM = 64

TOL_FLAGS = {
    "hermitian": "hermitian_tol",
    "psd": "psd_tol",
    "cluster": "cluster_tol",
    "reconstruct": "reconstruct_tol",
    "zero": "zero_tol",
    "theorem": "theorem_tol",
    "radius": "radius_tol",
}

COMMAND_DEFAULTS = {
    "verify-prop1": {"dim": "2-8", "outcomes": "2-4", "regime": "commuting,generic,projective"},
    "verify-prop2": {"dim": "2-8", "outcomes": "2", "regime": "commuting,generic"},
}
COMMON_DEFAULTS = {
    "trials": 1000,
    "seed": 0,
    "threads": min(os.cpu_count() or 1, 8),
    "format": "json",
    "no_timestamp": False,
    "n_max": DEFAULT_N_MAX,
    "lambda_grid": None,
    "random": 8,
}


class UsageError(Exception):
    pass


# -- argument parsing ---------------------------------------------------------

def _int_list(text: str, name: str, lo: int, hi: int) -> List[int]:
    """Parse ``"4"``, ``"2-8"`` or ``"2,3,5"``."""
    text = str(text).strip()
    try:
        if "-" in text and "," not in text:
            a, b = (int(p) for p in text.split("-", 1))
            values = list(range(a, b + 1))
        else:
            values = [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"--{name} expects an integer, a range lo-hi or a comma list, got {text!r}") from None
    if not values:
        raise UsageError(f"--{name} range {text!r} is empty")
    for v in values:
        if not lo <= v <= hi:
            raise UsageError(f"--{name} values must be in {lo}..{hi}, got {v}")
    return values


def _regimes(text: str):
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if part.startswith("unsharp"):
            _, _, lam = part.partition(":")
            try:
                lam = float(lam)
            except ValueError:
                raise UsageError("unsharp regime needs a value, e.g. unsharp:0.6") from None
            if not 0.0 <= lam <= 1.0:
                raise UsageError(f"unsharpness must lie in [0, 1], got {lam}")
            out.append((Regime.UNSHARP_QUBIT, lam))
            continue
        try:
            out.append((Regime(part), None))
        except ValueError:
            raise UsageError(
                f"unknown regime {part!r}; choose from generic, commuting, projective, unsharp:<lambda>"
            ) from None
    return out


def _lambda_grid(text) -> List[float]:
    if text is None:
        return list(DEFAULT_LAMBDA_GRID)
    if isinstance(text, (list, tuple)):
        values = [float(v) for v in text]
    else:
        text = str(text).strip()
        try:
            if ":" in text:
                a, b, s = (float(p) for p in text.split(":"))
                if s <= 0:
                    raise UsageError("lambda grid step must be > 0")
                n = int(math.floor((b - a) / s + 1e-9))
                values = [round(a + k * s, 12) for k in range(n + 1)]
            else:
                values = [float(p) for p in text.split(",")]
        except ValueError:
            raise UsageError(f"cannot parse lambda grid {text!r}") from None
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise UsageError(f"OutOfRange: unsharpness must lie in [0, 1], got {v}")
    if not values:
        raise UsageError("lambda grid is empty")
    return values


def _add_common(p: argparse.ArgumentParser, batch: bool):
    if batch:
        p.add_argument("--dim", help="dimension: N, lo-hi or comma list")
        p.add_argument("--outcomes", help="outcome count: N, lo-hi or comma list")
        p.add_argument("--trials", type=int, help="number of trials (default 1000)")
        p.add_argument("--seed", type=int, help="master seed (default 0)")
        p.add_argument("--regime", help="comma list of generic, commuting, projective, unsharp:<lambda>")
        p.add_argument("--threads", type=int, help="worker threads (default: available cores, max 8)")
    p.add_argument("--config", help="JSON config file; command-line flags take precedence")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default=None)
    p.add_argument("--no-timestamp", action="store_true", default=None,
                   help="omit the timestamp so reports are byte-reproducible")
    for flag, field in TOL_FLAGS.items():
        p.add_argument(f"--tol-{flag}", type=float, dest=f"tol_{flag}",
                       help=f"{field} (default {getattr(DEFAULT_TOL, field):g})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="luderskit",
        description="Verify the generalized Lüders theorem on seeded random instances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-prop1", help="discrete-spectrum form over arbitrary effect families")
    _add_common(p, batch=True)
    p.add_argument("--fixture", help="check one (family, effect) fixture instead of random trials")

    p = sub.add_parser("verify-prop2", help="binary-family form {E, I - E}")
    _add_common(p, batch=True)
    p.add_argument("--n-max", type=int, dest="n_max", help=f"spectral-radius sequence length (default {DEFAULT_N_MAX})")
    p.add_argument("--fixture", help="check one binary-family fixture instead of random trials")

    p = sub.add_parser("lemma", help="derivation lemma on built-in and user fixtures")
    _add_common(p, batch=False)
    p.add_argument("--seed", type=int, help="seed for the random built-in fixtures (default 0)")
    p.add_argument("--random", type=int, help="number of random built-in fixtures (default 8)")
    p.add_argument("--n-max", type=int, dest="n_max", help=f"highest power checked (default {DEFAULT_N_MAX})")
    p.add_argument("--fixture", action="append", help="extra {x, a} fixture file (repeatable)")

    p = sub.add_parser("sweep", help="unsharp qubit family across lambda")
    _add_common(p, batch=False)
    p.add_argument("--lambda-grid", dest="lambda_grid",
                   help="comma list or start:stop:step (default 0:1:0.05)")

    p = sub.add_parser("analyze", help="deep dive on a single (family, effect) fixture")
    _add_common(p, batch=False)
    p.add_argument("fixture", help="fixture JSON file")
    return parser


def _merge_config(command: str, args: argparse.Namespace) -> dict:
    values = {k: v for k, v in vars(args).items() if v is not None}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        tol_cfg = cfg.pop("tol", {})
        if not isinstance(tol_cfg, dict):
            raise UsageError("config 'tol' must be an object")
        known = set(vars(args)) - {"command", "config"}
        unknown = set(cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        bad_tol = set(tol_cfg) - set(TOL_FLAGS)
        if bad_tol:
            raise UsageError(f"unknown tolerance keys: {sorted(bad_tol)}; use {sorted(TOL_FLAGS)}")
        for k, v in tol_cfg.items():
            cfg[f"tol_{k}"] = v
        for k, v in cfg.items():
            values.setdefault(k, v)
    defaults = {**COMMON_DEFAULTS, **COMMAND_DEFAULTS.get(command, {})}
    if command == "sweep":
        defaults["format"] = "csv"
    for k, v in defaults.items():
        values.setdefault(k, v)
    return values


def _tolerances(values: dict) -> Tolerances:
    changes = {}
    for flag, field in TOL_FLAGS.items():
        v = values.get(f"tol_{flag}")
        if v is not None:
            changes[field] = float(v)
    try:
        return DEFAULT_TOL.replace(**changes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_int(values, key, lo, hi, msg=None):
    v = values[key]
    if not isinstance(v, int) or isinstance(v, bool) or not lo <= v <= hi:
        raise UsageError(msg or f"{key} must be an integer in {lo}..{hi}, got {v!r}")
    return v


# -- output -------------------------------------------------------------------

def _envelope(command: str, config: dict, values: dict, body: dict) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "command": command, "config": config}
    if not values.get("no_timestamp"):
        out["timestamp"] = datetime.now(timezone.utc).isoformat()
    out.update(body)
    return out


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _emit(text: str, values: dict):
    out = values.get("out")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _log(msg: str):
    print(msg, file=sys.stderr)


# -- commands -----------------------------------------------------------------

def _batch_setup(values: dict):
    trials = _check_int(values, "trials", 1, MAX_TRIALS, "trials must be ≥ 1 (and at most 10^6)")
    seed = _check_int(values, "seed", 0, 2 ** 64 - 1, "seed must be a 64-bit unsigned integer")
    threads = _check_int(values, "threads", 1, 256, "threads must be in 1..256")
    dims = _int_list(values["dim"], "dim", 1, MAX_DIM)
    outcomes = _int_list(values["outcomes"], "outcomes", 1, 64)
    regimes = _regimes(values["regime"])
    return trials, seed, threads, dims, outcomes, regimes


def _fixture_family(path, tol):
    fx = load_fixture(path)
    if "family" not in fx:
        raise UsageError(f"{path} is a lemma fixture; expected 'family' and 'effect'")
    F = make_family(fx["family"], tol)
    B = fx["effect"]
    violation = hermitian_violation(B)
    if violation > tol.hermitian_tol:
        raise NotHermitian(violation, tol.hermitian_tol)
    return fx, F, B


def _verify(command: str, values: dict) -> int:
    tol = _tolerances(values)
    prop2 = command == "verify-prop2"
    n_max = _check_int(values, "n_max", 2, 4096) if prop2 else None

    if values.get("fixture"):
        fx, F, B = _fixture_family(values["fixture"], tol)
        if prop2:
            if len(F) != 2:
                raise UsageError("verify-prop2 fixtures need a binary family [E, I - E]")
            report = check_prop2(F.effects[0], B, tol, n_max)
            ok = report.verdict_consistent and report.implication_holds
        else:
            report = check_prop1(F, B, tol)
            ok = report.verdict_consistent and report.crosscheck_agree
        config = {"fixture": fx["name"], "tolerances": tol.to_dict()}
        entry = {"trial": 0, "ok": ok, **report.to_dict()}
        entries = [entry]
        summary = {"trials": 1, "passed": int(ok), "failed": int(not ok)}
        csv_rows = [(0, "", F.dim, len(F), "fixture",
                     report.max_commutator_norm if not prop2 else report.commutator_norm,
                     report.deviation_norm, report.verdict, ok)]
        failures = [] if ok else ["fixture " + fx["name"]]
    else:
        trials, seed, threads, dims, outcomes, regimes = _batch_setup(values)
        if prop2:
            batch = run_prop2(seed, trials, dims, regimes, tol, threads, n_max)
        else:
            batch = run_prop1(seed, trials, dims, outcomes, regimes, tol, threads)
        config = {
            "seed": seed, "trials": trials, "dims": dims,
            "outcomes": [2] if prop2 else outcomes,
            "regimes": [r.value if lam is None else f"{r.value}:{lam:g}" for r, lam in regimes],
            "tolerances": tol.to_dict(),
        }
        if prop2:
            config["n_max"] = n_max
        entries = [r.to_dict() for r in batch.results]
        n_fail = len(batch.failures)
        summary = {
            "trials": trials,
            "passed": trials - n_fail,
            "failed": n_fail,
            "inconclusive": sum(r.report.verdict == "inconclusive" for r in batch.results),
            "rejected_draws": batch.rejected,
        }
        csv_rows = [
            (r.trial, seed, r.config.dim, r.config.n_outcomes, r.config.regime_label,
             r.report.commutator_norm if prop2 else r.report.max_commutator_norm,
             r.report.deviation_norm, r.report.verdict, r.ok)
            for r in batch.results
        ]
        failures = [f"trial {r.trial} (seed {seed}, {r.config.regime_label}, dim {r.config.dim}): "
                    f"{r.report.verdict}" for r in batch.failures]

    if values["format"] == "csv":
        text = _csv_text(["trial", "seed", "dim", "n_outcomes", "regime", "commutator_norm",
                          "deviation_norm", "verdict", "ok"], csv_rows)
    else:
        text = _json_text(_envelope(command, config, values, {"summary": summary, "reports": entries}))
    _emit(text, values)
    _log(f"{command}: {summary['passed']}/{summary['trials']} consistent")
    for f in failures:
        _log(f"  FAILED {f}")
    return 0 if not failures else 1


def _lemma(values: dict) -> int:
    tol = _tolerances(values)
    seed = _check_int(values, "seed", 0, 2 ** 64 - 1)
    n_random = _check_int(values, "random", 0, 10000)
    n_max = _check_int(values, "n_max", 2, 4096)
    fixtures = builtin_lemma_fixtures(seed, n_random)
    for path in values.get("fixture") or []:
        fx = load_fixture(path)
        if "x" not in fx:
            raise UsageError(f"{path} is not a lemma fixture; expected 'x' and 'a'")
        fixtures.append((fx["name"], fx["x"], fx["a"]))
    reports = run_lemma(fixtures, n_max, tol)
    failed = [r.name for r in reports if not r.passed]
    config = {"seed": seed, "random": n_random, "n_max": n_max, "tolerances": tol.to_dict()}
    if values["format"] == "csv":
        rows = [(r.name, r.d2a_norm, r.da_norm, max(r.residuals), r.radius_seq[-1], r.passed)
                for r in reports]
        text = _csv_text(["name", "d2a_norm", "da_norm", "max_identity_residual", "radius_tail",
                          "passed"], rows)
    else:
        text = _json_text(_envelope("lemma", config, values, {
            "summary": {"fixtures": len(reports), "failed": failed},
            "reports": [r.to_dict() for r in reports],
        }))
    _emit(text, values)
    _log(f"lemma: {len(reports) - len(failed)}/{len(reports)} fixtures pass")
    for name in failed:
        _log(f"  FAILED {name}")
    return 1 if failed else 0


def _sweep(values: dict) -> int:
    tol = _tolerances(values)
    grid = _lambda_grid(values.get("lambda_grid"))
    rows = sweep_unsharpness(grid, tol)
    max_err = max(r.abs_error for r in rows)
    measured = [r.measured for r in rows]
    order = np.argsort([r.lam for r in rows], kind="stable")
    sorted_measured = [measured[i] for i in order]
    monotone = all(b >= a - tol.zero_tol for a, b in zip(sorted_measured, sorted_measured[1:]))
    if values["format"] == "csv":
        text = _csv_text(["lambda", "measured", "predicted", "abs_error"],
                         [(r.lam, r.measured, r.predicted, r.abs_error) for r in rows])
    else:
        text = _json_text(_envelope("sweep", {"lambda_grid": grid, "tolerances": tol.to_dict()}, values, {
            "summary": {"rows": len(rows), "max_abs_error": max_err, "monotone": monotone},
            "rows": [{"lambda": r.lam, "measured": r.measured, "predicted": r.predicted,
                      "abs_error": r.abs_error} for r in rows],
        }))
    _emit(text, values)
    ok = max_err <= SWEEP_MAX_ERROR and monotone
    _log(f"sweep: {len(rows)} rows, max abs error {max_err:.3e}, monotone={monotone}")
    return 0 if ok else 1


def _analyze(values: dict) -> int:
    tol = _tolerances(values)
    fx, F, B = _fixture_family(values["fixture"], tol)
    dev = deviation(F, B, tol)
    p1 = check_prop1(F, B, tol)
    body = {
        "family": {"n_outcomes": len(F), "dim": F.dim},
        "deviation": {**dev.to_dict(), "deviation_op": operator_to_json(dev.deviation_op)},
        "prop1": p1.to_dict(include_operators=True),
    }
    ok = p1.verdict_consistent and p1.crosscheck_agree
    if len(F) == 2:
        p2 = check_prop2(F.effects[0], B, tol)
        body["prop2"] = p2.to_dict(include_operators=True)
        ok = ok and p2.verdict_consistent and p2.implication_holds
    sig = max_signaling_state(F, B, tol, config={"fixture": fx["name"]})
    body["signaling"] = sig.to_dict(include_operators=True)
    if values["format"] == "csv":
        text = _csv_text(["fixture", "dim", "n_outcomes", "deviation_norm", "max_commutator_norm",
                          "preserved", "all_commute", "witness_value", "verdict"],
                         [(fx["name"], F.dim, len(F), dev.deviation_norm, dev.max_commutator_norm,
                           dev.preserved, p1.all_commute, sig.witness_value, p1.verdict)])
    else:
        text = _json_text(_envelope("analyze", {"fixture": fx["name"], "tolerances": tol.to_dict()},
                                    values, body))
    _emit(text, values)
    _log(f"analyze: deviation_norm={dev.deviation_norm:.6g} preserved={dev.preserved} "
         f"all_commute={p1.all_commute} verdict={p1.verdict}")
    return 0 if ok else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        values = _merge_config(args.command, args)
        if args.command in ("verify-prop1", "verify-prop2"):
            return _verify(args.command, values)
        if args.command == "lemma":
            return _lemma(values)
        if args.command == "sweep":
            return _sweep(values)
        return _analyze(values)
    except (UsageError, LudersError) as exc:
        _log(f"error: {type(exc).__name__}: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
