"""Command-line front end.

::

    svapprox verify thm2 --kernel bernoulli:1 --n 1 --p inf --out report.json
    svapprox approx --kernel bernoulli:2 --n 3 --norm l1
    svapprox favard --r 1 2 --n 1 2 3 4 --csv favard.csv

Exit status is 0 when every verdict passes, 1 when a verification fails
(the report is still written) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

from . import __version__
from .kernels import KernelSpecError, bernoulli_kernel, convolve_with_sign, favard_constant, parse_kernel_spec
from .set_functions import conjugate, parse_p
from .theorems import (
    GridConfig,
    resolving_grid_size,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
    verify_theorem4,
    verify_theorem5,
)
from .trig_approx import best_approx

__all__ = ["RunConfig", "build_parser", "run", "favard_table", "main"]

_THEOREMS = ("thm1", "thm2", "thm3", "thm4", "thm5")
_NORMS = {"l1": 1.0, "l2": 2.0, "linf": math.inf}


@dataclass
class RunConfig:
    """Resolved configuration of one invocation; echoed into every report."""

    command: str
    theorem: str | None = None
    kernel: str = "bernoulli:1"
    n: int = 1
    p: str = "inf"
    q: str | None = None
    nx: int | None = None
    nxi: int | None = None
    m: int = 2
    samples: int = 100
    sweep: int = 200
    seed: int = 0
    out: str | None = None
    csv: str | None = None
    norm: str = "l1"
    r_values: list = field(default_factory=lambda: [1, 2])
    n_values: list = field(default_factory=lambda: [1, 2, 3, 4])
    eq_tol: float = 2e-3


def _resolved(cfg: RunConfig) -> dict:
    # output destinations are not part of the experiment and would break byte-identity
    return {k: v for k, v in asdict(cfg).items() if k not in ("out", "csv")}


def _p_arg(s: str) -> str:
    try:
        v = parse_p(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return "inf" if v == math.inf else str(int(v))


def _pos_int(lo: int):
    def conv(s: str) -> int:
        try:
            v = int(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="svapprox", description="Approximation experiments on set-valued convolution classes.")
    ap.add_argument("--version", action="version", version=f"svapprox {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a theorem experiment")
    v.add_argument("theorem", choices=_THEOREMS)
    v.add_argument("--kernel", default="bernoulli:1", help="kernel spec, e.g. bernoulli:1 or poisson:0.5")
    v.add_argument("--n", type=_pos_int(1), default=1)
    v.add_argument("--p", type=_p_arg, default="inf")
    v.add_argument("--q", type=_p_arg, default=None, help="defaults to the conjugate of p (thm3: to p)")
    v.add_argument("--samples", type=_pos_int(0), default=100)
    v.add_argument("--sweep", type=_pos_int(1), default=200)
    v.add_argument("--seed", type=_pos_int(0), default=0)
    v.add_argument("--nx", type=_pos_int(4), default=None)
    v.add_argument("--nxi", type=_pos_int(4), default=None)
    v.add_argument("--m", type=int, choices=(1, 2), default=2)
    v.add_argument("--eq-tol", type=float, default=2e-3)
    v.add_argument("--out", default=None, help="JSON report path (default: stdout)")

    a = sub.add_parser("approx", help="best trigonometric approximation of a kernel")
    a.add_argument("--kernel", default="bernoulli:1")
    a.add_argument("--n", type=_pos_int(1), default=1)
    a.add_argument("--norm", choices=sorted(_NORMS), default="l1")
    a.add_argument("--out", default=None)

    f = sub.add_parser("favard", help="table of E(D_r)_{L1} against K_r / n^r")
    f.add_argument("--r", type=_pos_int(1), nargs="+", default=[1, 2], dest="r_values")
    f.add_argument("--n", type=_pos_int(1), nargs="+", default=[1, 2, 3, 4], dest="n_values")
    f.add_argument("--csv", default=None, help="CSV path (default: stdout)")
    f.add_argument("--out", default=None, help="optional JSON copy of the table")
    return ap


def _grid(cfg: RunConfig, default: GridConfig) -> GridConfig:
    return GridConfig(N_x=cfg.nx or default.N_x, m=cfg.m, n_xi=cfg.nxi or default.n_xi)


def _emit(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _verify(cfg: RunConfig) -> tuple[dict, bool]:
    K = parse_kernel_spec(cfg.kernel)
    p = parse_p(cfg.p)
    thm = cfg.theorem
    if thm == "thm1":
        g = _grid(cfg, GridConfig())
        rep = verify_theorem1(K, cfg.n, p, cfg.samples, cfg.seed, g)
    elif thm == "thm2":
        g = _grid(cfg, GridConfig(N_x=resolving_grid_size(K), n_xi=16))
        rep = verify_theorem2(K, cfg.n, p, cfg.sweep, cfg.seed, g, eq_tol=cfg.eq_tol)
    elif thm == "thm3":
        q = parse_p(cfg.q) if cfg.q is not None else p
        g = _grid(cfg, GridConfig(N_x=512, n_xi=16))
        rep = verify_theorem3(K, cfg.n, p, q, cfg.samples, cfg.sweep, cfg.seed, g)
    elif thm == "thm4":
        q = parse_p(cfg.q) if cfg.q is not None else conjugate(p)
        g = _grid(cfg, GridConfig(N_x=8192, n_xi=8))
        rep = verify_theorem4(K, cfg.n, q, cfg.seed, g, eq_tol=cfg.eq_tol)
    else:
        g = _grid(cfg, GridConfig())
        rep = verify_theorem5(K, cfg.n, p, cfg.samples, cfg.seed, g)
    out = rep.to_json()
    out["config"] = {**out["config"], "run": _resolved(cfg)}
    return out, rep.verdict in ("pass",)


def _approx(cfg: RunConfig) -> tuple[dict, bool]:
    K = parse_kernel_spec(cfg.kernel)
    res = best_approx(K, cfg.n, _NORMS[cfg.norm])
    out = {
        "schema": "svapprox.approx/1",
        "version": __version__,
        "kernel": K.spec_string(),
        "n": cfg.n,
        "norm": cfg.norm,
        "result": res.to_json(),
        "config": _resolved(cfg),
    }
    return out, res.certified


def favard_table(r_values, n_values) -> list[dict]:
    """Rows of ``E(D_r)_{L1}`` and ``||D_r * phi_n||_inf`` against ``K_r / n^r``."""
    if not r_values or not n_values:
        raise ValueError("ranges must be nonempty")
    rows = []
    for r in r_values:
        K = bernoulli_kernel(int(r))
        for n in n_values:
            res = best_approx(K, int(n), 1.0)
            sup = convolve_with_sign(K, int(n)).sup
            ref = favard_constant(int(r)) / n ** r
            err = max(abs(res.error - ref), abs(sup - ref))
            rows.append({
                "kernel": K.spec_string(),
                "n": int(n),
                "q": "1",
                "E_computed": res.error,
                "sign_convolution_sup": sup,
                "reference": ref,
                "abs_error": err,
                "verdict": "pass" if (res.certified and err <= 2e-3) else "fail",
            })
    return rows


def _rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def run(cfg: RunConfig) -> int:
    """Execute one resolved configuration; returns the exit status."""
    if cfg.command == "verify":
        payload, ok = _verify(cfg)
        _emit(payload, cfg.out)
        return 0 if ok else 1
    if cfg.command == "approx":
        payload, ok = _approx(cfg)
        _emit(payload, cfg.out)
        return 0 if ok else 1
    if cfg.command == "favard":
        rows = favard_table(cfg.r_values, cfg.n_values)
        text = _rows_csv(rows)
        if cfg.csv is None:
            sys.stdout.write(text)
        else:
            with open(cfg.csv, "w", encoding="utf-8") as fh:
                fh.write(text)
        if cfg.out:
            _emit({"schema": "svapprox.favard/1", "version": __version__, "rows": rows, "config": _resolved(cfg)}, cfg.out)
        return 0 if all(r["verdict"] == "pass" for r in rows) else 1
    raise ValueError(f"unknown command {cfg.command!r}")


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    d = vars(ns)
    cfg = RunConfig(**{k: v for k, v in d.items() if k in RunConfig.__dataclass_fields__})
    if cfg.kernel:
        try:
            parse_kernel_spec(cfg.kernel)
        except KernelSpecError as exc:
            ap.print_usage(sys.stderr)
            print(f"svapprox: error: {exc}", file=sys.stderr)
            return 2
    try:
        return run(cfg)
    except ValueError as exc:
        print(f"svapprox: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
