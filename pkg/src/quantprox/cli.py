"""Batch command-line interface.

Subcommands: compute (one proxy solve), exact (enumeration / upper bound),
sweep (grid of (d, eps) points), simulate (random-codebook Monte Carlo),
verify (self-check suite on an instance).  Outputs are deterministic CSV or
JSON rows with 12 significant digits.

Exit codes: 0 success, 1 parse/validation error, 2 infeasible,
3 verification failure, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import codebook as cb
from . import codes, exact, proxies
from .errors import (
    InfeasibleError,
    InstanceFormatError,
    NotConvergedError,
    QuantproxError,
    SearchTooLargeError,
)
from .infotheory import LN2
from .model import InstanceSpec, ball_table, check_feasibility

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY = 3
EXIT_NOT_CONVERGED = 4

SWEEP_COLUMNS = [
    "d",
    "eps",
    "R",
    "H_or_bound",
    "sandwich_lower_ok",
    "sandwich_upper_ok",
    "residual",
    "iterations",
]


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def _json_value(v):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return float(f"{v:.12g}") if math.isfinite(v) else repr(v)
    return str(v)


def _emit(rows, columns, args):
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])
        text = buf.getvalue()
    else:
        clean = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        text = json.dumps(clean, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_grid(spec):
    """A float or 'start:stop:step' (inclusive of stop when it lands on grid)."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise InstanceFormatError(f"bad grid spec {spec!r}; expected start:stop:step")
        start, stop, step = (float(s) for s in parts)
        if step <= 0 or stop < start:
            raise InstanceFormatError(f"bad grid spec {spec!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + k * step for k in range(count)]
    return [float(spec)]


def _load_instance(path):
    try:
        return InstanceSpec.load(path)
    except FileNotFoundError:
        raise InstanceFormatError(f"instance file not found: {path}")


def _in_units(info_value, units):
    return info_value.in_units(units)


def _solve(instance, mode, d, eps, args):
    if mode == "guaranteed":
        return proxies.solve_r_guaranteed(instance, d, args.tol, args.max_iter)
    if mode == "cond-excess":
        return proxies.solve_r_cond_excess(instance, d, eps, args.tol, args.max_iter)
    if mode == "excess":
        return proxies.solve_r_excess(
            instance, d, eps, args.tol, args.max_iter,
            cross_check=getattr(args, "cross_check", False),
        )
    if mode == "expected":
        return proxies.solve_r_expected(instance, d, args.tol, args.max_iter)
    raise InstanceFormatError(f"unknown mode {mode!r}")


def _cmd_compute(args):
    instance = _load_instance(args.instance)
    code = EXIT_OK
    try:
        sol = _solve(instance, args.mode, args.d, args.eps, args)
    except NotConvergedError as exc:
        sol = exc.solution
        code = EXIT_NOT_CONVERGED
    row = {
        "mode": args.mode,
        "d": args.d,
        "eps": args.eps if args.mode not in ("guaranteed", "expected") else None,
        "value": _in_units(sol.value, args.units),
        "units": args.units,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "gap": sol.gap,
        "converged": sol.converged,
        "lambda_star": sol.lambda_star,
        "threshold_rule_value": (
            None if sol.threshold_rule_value is None
            else sol.threshold_rule_value / (LN2 if args.units == "bits" else 1.0)
        ),
        "oracle_value": (
            None if sol.oracle_value is None
            else sol.oracle_value / (LN2 if args.units == "bits" else 1.0)
        ),
        "oracle_mismatch": sol.oracle_mismatch,
    }
    columns = list(row.keys())
    _emit([row], columns, args)
    return code


def _cmd_exact(args):
    instance = _load_instance(args.instance)
    if args.mode == "guaranteed":
        sol = exact.exact_h_guaranteed(instance, args.d)
    elif args.mode == "cond-excess":
        sol = exact.exact_h_cond_excess(instance, args.d, args.eps)
    elif args.mode == "excess":
        sol = exact.upper_h_excess(instance, args.d, args.eps)
    else:
        raise InstanceFormatError(f"exact does not support mode {args.mode!r}")
    row = {
        "mode": args.mode,
        "d": args.d,
        "eps": args.eps if args.mode != "guaranteed" else None,
        "value": _in_units(sol.value, args.units),
        "units": args.units,
        "exact": sol.exact,
        "search_size": sol.search_size,
    }
    _emit([row], list(row.keys()), args)
    return EXIT_OK


def _h_for_sweep(instance, mode, d, eps):
    if mode == "guaranteed":
        return exact.exact_h_guaranteed(instance, d), "guaranteed", True
    if mode == "cond-excess":
        return exact.exact_h_cond_excess(instance, d, eps), "excess_family", True
    if mode == "excess":
        return exact.upper_h_excess(instance, d, eps), "excess_family", False
    return None, None, None


def _cmd_sweep(args):
    instance = _load_instance(args.instance)
    rows = []
    worst = EXIT_OK
    for d in _parse_grid(args.d):
        for eps in _parse_grid(args.eps):
            row = {c: None for c in SWEEP_COLUMNS}
            row["d"], row["eps"] = d, eps
            try:
                sol = _solve(instance, args.mode, d, eps, args)
            except InfeasibleError:
                worst = max(worst, EXIT_INFEASIBLE)
                rows.append(row)
                continue
            except NotConvergedError as exc:
                sol = exc.solution
                worst = max(worst, EXIT_NOT_CONVERGED)
            row["R"] = _in_units(sol.value, args.units)
            row["residual"] = sol.residual
            row["iterations"] = sol.iterations
            if args.mode != "expected":
                try:
                    hsol, sandwich_mode, h_exact = _h_for_sweep(instance, args.mode, d, eps)
                    row["H_or_bound"] = _in_units(hsol.value, args.units)
                    verdict = exact.sandwich_check(
                        hsol.value, sol.value, sandwich_mode, h_is_exact=h_exact
                    )
                    row["sandwich_lower_ok"] = verdict.lower_ok
                    row["sandwich_upper_ok"] = verdict.upper_ok
                except SearchTooLargeError:
                    pass
            rows.append(row)
    _emit(rows, SWEEP_COLUMNS, args)
    return worst


def _cmd_simulate(args):
    instance = _load_instance(args.instance)
    ball = ball_table(instance, args.d)
    if args.py == "uniform":
        py = np.full(instance.n, 1.0 / instance.n)
    else:
        if args.eps > 0:
            py = proxies.solve_r_excess(instance, args.d, args.eps, args.tol, args.max_iter).py.py
        else:
            py = proxies.solve_r_guaranteed(instance, args.d, args.tol, args.max_iter).py.py
    profile = proxies.alpha_threshold(py, ball, instance.px, args.eps)
    report = cb.simulate(
        instance, args.d, py, profile,
        trials=args.trials, codebook_len=args.codebook_len, seed=args.seed,
    )
    row = report.to_dict()
    row["py"] = json.dumps([json.loads(_fmt(v)) for v in py])
    row["alpha"] = json.dumps([json.loads(_fmt(v)) for v in profile.alpha])
    columns = list(row.keys())
    _emit([row], columns, args)
    return EXIT_OK


def _verify_rows(instance, seed, tol):
    """Deterministic self-check suite; yields (check, status, detail) rows."""
    rows = []

    def record(name, ok, detail=""):
        rows.append({"check": name, "status": "pass" if ok else "FAIL", "detail": detail})
        return ok

    dvals = np.unique(instance.dist)
    d_grid = sorted({float(v) for v in np.quantile(dvals, [0.0, 0.35, 0.7])})
    eps_grid = [0.05, 0.1, 0.25]

    # ball monotonicity in d
    tables = [ball_table(instance, d) for d in d_grid]
    mono = all(
        bool(np.all(tables[i].incidence <= tables[i + 1].incidence))
        for i in range(len(tables) - 1)
    )
    record("ball_monotone_in_d", mono, f"d grid {d_grid}")

    prev_r = np.inf
    for d in d_grid:
        verdict = check_feasibility(ball_table(instance, d), instance.px, "guaranteed")
        if not verdict.feasible:
            record(f"guaranteed_d={d:.6g}", True, "skipped (infeasible)")
            continue
        sol = proxies.solve_r_guaranteed(instance, d, tol)
        r = sol.value.bits
        record(f"guaranteed_residual_d={d:.6g}", sol.residual <= 10 * tol, f"residual {sol.residual:.3e}")
        record(f"guaranteed_monotone_d={d:.6g}", r <= prev_r + 1e-9, f"R {r:.6g} bits")
        slack = proxies.check_markov_relation(instance, d, sol.py)
        record(f"markov_slack_d={d:.6g}", slack >= -1e-9, f"min slack {slack:.3e}")
        prev_r = r
        try:
            h = exact.exact_h_guaranteed(instance, d)
            verdict2 = exact.sandwich_check(h.value, sol.value, "guaranteed")
            record(
                f"sandwich_guaranteed_d={d:.6g}",
                verdict2.passed,
                f"R {r:.6g} H {h.value.bits:.6g} upper slack {verdict2.upper_slack_bits:.6g}",
            )
        except SearchTooLargeError:
            record(f"sandwich_guaranteed_d={d:.6g}", True, "skipped (search too large)")

        sol0 = proxies.solve_r_cond_excess(instance, d, 0.0, tol)
        record(
            f"cond_eps0_matches_d={d:.6g}",
            abs(sol0.value.bits - r) <= 1e-6,
            f"diff {abs(sol0.value.bits - r):.3e} bits",
        )
        prev_c = r + 1e-12
        for eps in eps_grid:
            solc = proxies.solve_r_cond_excess(instance, d, eps, tol)
            rc = solc.value.bits
            record(
                f"cond_le_guaranteed_d={d:.6g}_eps={eps:g}",
                rc <= r + 1e-9 and rc <= prev_c + 1e-9,
                f"Rc {rc:.6g} bits",
            )
            prev_c = rc
            sole = proxies.solve_r_excess(instance, d, eps, tol)
            re_ = sole.value.bits
            record(
                f"excess_le_cond_d={d:.6g}_eps={eps:g}",
                re_ <= rc + 1e-9,
                f"Re {re_:.6g} bits",
            )
            if instance.n <= 4:
                oracle = proxies.oracle_grid_min(instance, d, eps, "cond_excess", 0.01) / LN2
                record(
                    f"cond_oracle_d={d:.6g}_eps={eps:g}",
                    rc <= oracle + 1e-9 and abs(rc - oracle) <= 0.02,
                    f"oracle {oracle:.6g} bits",
                )
                if instance.m <= 8:
                    oracle_e = proxies.oracle_grid_min(instance, d, eps, "excess", 0.01) / LN2
                    record(
                        f"excess_oracle_one_sided_d={d:.6g}_eps={eps:g}",
                        re_ <= oracle_e + 1e-9,
                        f"oracle {oracle_e:.6g} bits",
                    )
            try:
                hc = exact.exact_h_cond_excess(instance, d, eps)
                verdict3 = exact.sandwich_check(hc.value, solc.value, "excess_family")
                record(
                    f"sandwich_cond_d={d:.6g}_eps={eps:g}",
                    verdict3.passed,
                    f"Hc {hc.value.bits:.6g} bits",
                )
            except SearchTooLargeError:
                pass
            hu = exact.upper_h_excess(instance, d, eps)
            verdict4 = exact.sandwich_check(hu.value, sole.value, "excess_family", h_is_exact=False)
            record(
                f"sandwich_excess_upper_d={d:.6g}_eps={eps:g}",
                verdict4.upper_ok,
                f"H_upper {hu.value.bits:.6g} bits",
            )

    dmin, dmax = instance.dmin_expected, instance.dmax_expected
    if dmax > dmin + 1e-9:
        dmid = 0.5 * (dmin + dmax)
        sol = proxies.solve_r_expected(instance, dmid)
        record(
            "expected_residual",
            sol.residual <= 1e-4,
            f"residual {sol.residual:.3e} at d={dmid:.6g}",
        )
        slack = proxies.check_markov_relation(instance, dmid, sol.py)
        record("expected_markov_slack", slack >= -1e-9, f"min slack {slack:.3e}")

    ok = codes.lossless_sandwich_check(instance.px).passed
    record("lossless_sandwich_px", ok)
    rng = np.random.default_rng(seed)
    fails = 0
    for _ in range(200):
        m = int(rng.integers(2, 65))
        p = rng.dirichlet(np.ones(m))
        if not codes.lossless_sandwich_check(p).passed:
            fails += 1
    record("lossless_sandwich_random", fails == 0, f"{fails} failures over 200 draws")

    d0 = d_grid[0]
    verdict = check_feasibility(ball_table(instance, d0), instance.px, "guaranteed")
    if verdict.feasible:
        sol = proxies.solve_r_guaranteed(instance, d0, tol)
        report = cb.simulate(
            instance, d0, sol.py, proxies.alpha_threshold(sol.py, ball_table(instance, d0), instance.px, 0.0),
            trials=2000, codebook_len=64, seed=seed,
        )
        record(
            "simulate_length_bound",
            report.mean_floor_log_w <= report.bound_waiting_bits + 3 * report.se_floor_log_w,
            f"mean {report.mean_floor_log_w:.6g} bound {report.bound_waiting_bits:.6g}",
        )
        record(
            "simulate_excess_zero",
            report.empirical_excess_rate == 0.0,
            f"rate {report.empirical_excess_rate:.3g}",
        )
    return rows


def _cmd_verify(args):
    instance = _load_instance(args.instance)
    rows = _verify_rows(instance, args.seed, args.tol)
    failed = any(r["status"] == "FAIL" for r in rows)
    _emit(rows, ["check", "status", "detail"], args)
    return EXIT_VERIFY if failed else EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="quantprox",
        description="Minimum-entropy quantization proxies on finite alphabets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, modes, default_mode):
        p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--mode", choices=modes, default=default_mode)
        p.add_argument("--tol", type=float, default=proxies.DEFAULT_TOL)
        p.add_argument("--max-iter", type=int, default=proxies.DEFAULT_MAX_ITER, dest="max_iter")
        p.add_argument("--units", choices=["bits", "nats"], default="bits")
        p.add_argument("--output", default=None, help="write to file instead of stdout")
        p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("compute", help="solve one proxy value")
    add_common(p, modes=["guaranteed", "cond-excess", "excess", "expected"], default_mode="guaranteed")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--cross-check", action="store_true", dest="cross_check",
                   help="attach grid-oracle and threshold-rule diagnostics (excess mode)")
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("exact", help="exhaustive quantizer entropy (or upper bound)")
    add_common(p, modes=["guaranteed", "cond-excess", "excess"], default_mode="guaranteed")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("sweep", help="grid of (d, eps) points")
    add_common(p, modes=["guaranteed", "cond-excess", "excess", "expected"], default_mode="guaranteed")
    p.add_argument("--d", required=True, help="value or start:stop:step")
    p.add_argument("--eps", default="0", help="value or start:stop:step")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("simulate", help="random-codebook Monte Carlo")
    add_common(p, modes=["guaranteed", "excess"], default_mode="guaranteed")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--codebook-len", type=int, default=64, dest="codebook_len")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--py", choices=["optimal", "uniform"], default="optimal")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="run the self-check suite on an instance")
    add_common(p, modes=["guaranteed"], default_mode="guaranteed")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_verify)

    args = parser.parse_args(argv)
    if hasattr(args, "seed") and args.seed is None:
        args.seed = int(os.environ.get("QUANTPROX_SEED", "0"))

    try:
        return args.func(args)
    except InstanceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for line in getattr(exc, "details", ()):
            print(f"  {line}", file=sys.stderr)
        return EXIT_PARSE
    except SearchTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NotConvergedError as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except QuantproxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
