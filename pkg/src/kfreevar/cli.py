"""Batch front end: identity suites, constants, variance scans, Perron demos.

Every command emits rows with a status column (PASS / FAIL / INFO) as CSV or
JSON.  Exit code 0 means no FAIL rows, 1 means at least one, 2 is a usage
error.  Float formatting is fixed at 12 significant digits so identical
configurations produce byte-identical CSV.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import arith, constants, density, perron, sieve, variance

PASS, FAIL, INFO = "PASS", "FAIL", "INFO"


@dataclass
class RunConfig:
    """Parsed invocation: one command plus its numeric knobs."""

    command: str
    k: int = 2
    x: int = 10**4
    q: Optional[int] = None
    q_max: Optional[int] = None
    q_list: Optional[List[int]] = None
    precision: int = constants.DEFAULT_DPS
    P: int = constants.DEFAULT_PRIME_CUTOFF
    D: int = 200
    eps: float = 0.0
    T: float = 200.0
    Q: float = 100.5
    L: float = 256.0
    delta: Optional[float] = None
    out: Optional[str] = None
    fmt: str = "csv"
    threads: int = 1
    seed: int = 0
    checks: int = 5


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _parse_count(text: str) -> int:
    """Integer argument accepting scientific notation: '1e6' -> 1000000."""
    try:
        return int(text)
    except ValueError:
        f = float(text)
        n = int(round(f))
        if abs(f - n) > 1e-6 * max(1.0, abs(f)):
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
        return n


def _parse_q_list(text: str) -> List[int]:
    return [_parse_count(tok) for tok in text.split(",") if tok.strip()]


def emit(rows: List[Dict], header: Sequence[str], cfg: RunConfig) -> int:
    """Write rows as CSV or JSON and return the exit code (1 iff any FAIL)."""
    if cfg.fmt == "json":
        payload = json.dumps(rows, default=_fmt, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(row.get(col)) for col in header])
        payload = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return 1 if any(r.get("status") == FAIL for r in rows) else 0


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_identities(cfg: RunConfig) -> int:
    k = cfg.k
    q_max = cfg.q_max or 200
    rows: List[Dict] = []

    bad = [q for q in range(1, q_max + 1) if not density.check_sum_eta_sq(q, k)[0]]
    rows.append({"suite": "mean-square", "k": k, "q_max": q_max,
                 "checked": q_max, "failures": len(bad),
                 "status": PASS if not bad else FAIL})

    bad = []
    for q in range(1, q_max + 1):
        total = sum((density.eta_fraction(q, a, k) for a in range(1, q + 1)),
                    Fraction(0))
        if total != 1:
            bad.append(q)
    rows.append({"suite": "partition", "k": k, "q_max": q_max,
                 "checked": q_max, "failures": len(bad),
                 "status": PASS if not bad else FAIL})

    bad = []
    checked = 0
    for q in range(1, q_max + 1):
        table = density.eta_table(q, k)
        for a in range(1, q + 1):
            checked += 1
            if table[a - 1] != density.eta(q, math.gcd(q, a), k):
                bad.append((q, a))
    rows.append({"suite": "gcd-collapse", "k": k, "q_max": q_max,
                 "checked": checked, "failures": len(bad),
                 "status": PASS if not bad else FAIL})

    # spot-check the closed form against the defining series
    rng = random.Random(cfg.seed)
    sample = sorted(rng.sample(range(2, max(3, min(q_max, 50) + 1)),
                               k=min(8, max(1, min(q_max, 50) - 1))))
    fails = 0
    checked = 0
    zk = constants.zeta_real(k, cfg.precision)
    for q in sample:
        partial = density.eta_series_partial(q, k, cfg.D * 50)
        bound = density.eta_series_tail_bound(q, k, cfg.D * 50)
        for a in range(1, q + 1):
            checked += 1
            closed = float(density.eta_fraction(q, a, k)) / zk.float
            if abs(partial[a - 1] - closed) > bound + 1e-12:
                fails += 1
    rows.append({"suite": "series-vs-closed-form", "k": k,
                 "q_max": max(sample), "checked": checked, "failures": fails,
                 "status": PASS if not fails else FAIL})

    for bad_row in rows:
        if bad_row["status"] == FAIL:
            bad_row["note"] = "exact identity violated"
    return emit(rows, ["suite", "k", "q_max", "checked", "failures", "status"], cfg)


def cmd_consts(cfg: RunConfig) -> int:
    k, dps, P = cfg.k, cfg.precision, cfg.P
    qs = cfg.q_list or [1, 4, 6, 12, 30, 100]
    rows: List[Dict] = []
    ck = constants.c_k(k, dps, P)
    rows.append({"name": "C_k", "k": k, "q": 1, "value": ck.float,
                 "err": ck.err, "residual": None,
                 "status": PASS if ck.float > 0 else FAIL})
    z2 = constants.zeta_real(2, dps)
    zk = constants.zeta_real(k, dps)
    z2k = constants.zeta_real(2 * k, dps)
    z4k = constants.zeta_real(4 * k, dps)
    for q in qs:
        f = constants.f_k_of_q(q, k, dps, P)
        gam = constants.gamma_const(q, k, dps, P)
        alt = (constants.CertifiedReal.exact(2 * k) * gam
               / (constants.CertifiedReal.exact(Fraction(1, k) - 1) * z2))
        resid = abs(f.float - alt.float)
        rows.append({"name": "f_k", "k": k, "q": q, "value": f.float,
                     "err": f.err, "residual": resid,
                     "status": PASS if resid <= 1e-9 else FAIL})
        beta_num = density.beta(k).evaluate(zk)
        alpha_num = density.alpha(q, k).evaluate(zk)
        r_beta = abs((zk * constants.fstar(0, q, k, P, dps) / z2k).float
                     - beta_num.float)
        r_alpha = abs((z2k * constants.fstar(1, q, k, P, dps) / z4k).float
                      - alpha_num.float)
        rows.append({"name": "fstar-identities", "k": k, "q": q, "value": None,
                     "err": None, "residual": max(r_beta, r_alpha),
                     "status": PASS if max(r_beta, r_alpha) <= 1e-6 else FAIL})
    return emit(rows, ["name", "k", "q", "value", "err", "residual", "status"], cfg)


def _report_rows(reports: List[variance.VarianceReport], eps: float) -> List[Dict]:
    rows = []
    for r in reports:
        if r.error is not None:
            rows.append({"x": r.x, "q": r.q, "k": r.k, "V": None, "main": None,
                         "budget": None, "ratio": None, "status": FAIL,
                         "note": r.error})
            continue
        ok = (r.v_num.float > 0 and r.main.float > 0
              and abs(r.v_num.float - r.main.float) <= 10 * r.budget)
        rows.append({"x": r.x, "q": r.q, "k": r.k, "V": r.v_num.float,
                     "main": r.main.float, "budget": r.budget, "ratio": r.ratio,
                     "status": PASS if ok else FAIL,
                     "wall_time": r.wall_time})
    return rows


def cmd_variance(cfg: RunConfig) -> int:
    qs = cfg.q_list or ([cfg.q] if cfg.q else [1])
    reports = variance.scan(cfg.x, qs, cfg.k, cfg.eps, cfg.precision, cfg.P,
                            threads=cfg.threads)
    return emit(_report_rows(reports, cfg.eps),
                ["x", "q", "k", "V", "main", "budget", "ratio", "status"], cfg)


cmd_scan = cmd_variance


def cmd_perron(cfg: RunConfig) -> int:
    res = perron.perron_integral(cfg.Q, cfg.T)
    w = perron.weighted_count(cfg.Q)
    dev = abs(res.value - w)
    bound = 10.0 * (1.0 + cfg.Q**2 / cfg.T**2)
    rows = [{"Q": cfg.Q, "T": cfg.T, "c": res.c, "weighted": w,
             "integral": res.value, "deviation": dev, "bound": bound,
             "imag": res.imag_part, "quad_err": res.quad_err,
             "status": PASS if dev <= bound else FAIL}]
    return emit(rows, ["Q", "T", "c", "weighted", "integral", "deviation",
                       "bound", "imag", "quad_err", "status"], cfg)


def cmd_diagnose_osc(cfg: RunConfig) -> int:
    delta = cfg.delta if cfg.delta is not None else 1.0 / (2 * cfg.k)
    rows = []
    for row in perron.osc_diagnostic(cfg.L, cfg.Q, cfg.k, delta):
        rows.append({"L": row.L, "integral_re": row.value_re,
                     "integral_im": row.value_im, "abs": row.abs_value,
                     "envelope": row.envelope, "ratio": row.ratio,
                     "status": INFO})
    return emit(rows, ["L", "integral_re", "integral_im", "abs", "envelope",
                       "ratio", "status"], cfg)


def cmd_sieve_count(cfg: RunConfig) -> int:
    rows = []
    n = sieve.count_kfree(cfg.x, cfg.k)
    oracle = sieve.count_kfree_legendre(cfg.x, cfg.k)
    rows.append({"x": cfg.x, "k": cfg.k, "count": n, "oracle": oracle,
                 "status": PASS if n == oracle else FAIL})
    rng = random.Random(cfg.seed)
    for _ in range(cfg.checks):
        xs = rng.randint(1, cfg.x)
        ns = sieve.count_kfree(xs, cfg.k)
        os_ = sieve.count_kfree_legendre(xs, cfg.k)
        rows.append({"x": xs, "k": cfg.k, "count": ns, "oracle": os_,
                     "status": PASS if ns == os_ else FAIL})
    if cfg.q:
        cc = sieve.class_counts(cfg.x, cfg.q, cfg.k)
        rows.append({"x": cfg.x, "k": cfg.k, "count": cc.total, "oracle": n,
                     "status": PASS if cc.total == n else FAIL})
    return emit(rows, ["x", "k", "count", "oracle", "status"], cfg)


_COMMANDS = {
    "identities": cmd_identities,
    "consts": cmd_consts,
    "variance": cmd_variance,
    "scan": cmd_scan,
    "perron": cmd_perron,
    "diagnose-osc": cmd_diagnose_osc,
    "sieve-count": cmd_sieve_count,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kfreevar",
        description="Exact and certified-numeric checks for the variance of "
                    "k-free numbers in arithmetic progressions.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--k", type=int, default=2)
        p.add_argument("--x", type=_parse_count, default=10**4)
        p.add_argument("--q", type=_parse_count, default=None)
        p.add_argument("--q-max", type=_parse_count, default=None)
        p.add_argument("--q-list", type=_parse_q_list, default=None,
                       help="comma-separated moduli, scientific notation ok")
        p.add_argument("--precision", type=int, default=constants.DEFAULT_DPS)
        p.add_argument("--P", type=_parse_count, default=constants.DEFAULT_PRIME_CUTOFF)
        p.add_argument("--D", type=_parse_count, default=200)
        p.add_argument("--eps", type=float, default=0.0)
        p.add_argument("--T", type=float, default=200.0)
        p.add_argument("--Q", type=float, default=100.5)
        p.add_argument("--L", type=float, default=256.0)
        p.add_argument("--Delta", dest="delta", type=float, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--checks", type=int, default=5)
    return ap


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    try:
        return _COMMANDS[cfg.command](cfg)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv: Optional[Sequence[str]] = None) -> None:
    ap = build_parser()
    ns = ap.parse_args(argv)
    cfg = RunConfig(**vars(ns))
    sys.exit(run(cfg))


if __name__ == "__main__":
    main()
