"""Command-line front end.

Subcommands: solve-q, c-shape, hke, map, green, green-integrate, oracle,
check.  Flags may come from a `key = value` config file (# comments); any
flag given on the command line overrides the file.  All output is CSV with
a header row, 17 significant digits, and `inf` spelled literally, so
identical invocations are byte-identical.  Exit codes: 0 success, 1
numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import sys
from typing import Optional, Sequence

import numpy as np

from .geometry import HalfSpacePoint, ModelParams, standard_weight
from .green import GreenDivergenceError, green_by_time_integration, green_estimate
from .heatkernel import Regime, detect_regime, dominance_map, hke_closed, killed_hke
from .inequalities import check, lemma_ids
from .killing import ShapeViolationError, compute_C, scan_shape, solve_q
from .oracle import OracleParams, compare_oracle_vs_estimate, oracle_p
from .quadrature import NonConvergenceError, QuadratureSpec
from .util import fmt, parse_config_file, write_csv

_COMMON = {
    "alpha": (float, 1.0),
    "beta": (str, "0,0,0,0"),
    "kappa": (float, 0.0),
    "dim": (int, 1),
    "seed": (int, 0),
    "budget": (int, 1000),
    "tol": (float, 1e-9),
    "out": (str, None),
    "config": (str, None),
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    for name, (typ, _default) in _COMMON.items():
        sub.add_argument(f"--{name}", type=typ, default=None)


def _resolve(args: argparse.Namespace, extra_defaults: dict) -> dict:
    """defaults < config file < explicit flags."""
    merged = {k: d for k, (_t, d) in _COMMON.items()}
    merged.update(extra_defaults)
    if args.config:
        file_vals = parse_config_file(args.config)
        for key, raw in file_vals.items():
            key = key.replace("-", "_")
            if key not in merged:
                raise ValueError(f"unknown config key: {key}")
            cur = merged[key]
            if key in _COMMON:
                typ = _COMMON[key][0]
            else:
                typ = type(cur) if cur is not None else str
            merged[key] = typ(raw) if typ is not bool else raw.lower() in ("1", "true")
    for key in merged:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


def _params(cfg: dict) -> ModelParams:
    beta = tuple(float(v) for v in str(cfg["beta"]).split(","))
    return ModelParams(int(cfg["dim"]), float(cfg["alpha"]), beta, float(cfg["kappa"]))


def _spec(cfg: dict) -> QuadratureSpec:
    tol = float(cfg["tol"])
    return QuadratureSpec(rel_tol=tol, abs_tol=tol * 1e-3)


def _point(text: str, dim: int) -> HalfSpacePoint:
    coords = tuple(float(v) for v in text.split(","))
    if len(coords) != dim:
        raise ValueError(f"expected {dim} coordinates, got {len(coords)}")
    return HalfSpacePoint.from_coords(coords)


def _emit(cfg: dict, header, rows) -> None:
    buf = io.StringIO()
    write_csv(header, rows, buf)
    text = buf.getvalue()
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _q_for(cfg: dict, params: ModelParams, spec: QuadratureSpec) -> float:
    if cfg.get("q") is not None:
        return float(cfg["q"])
    return solve_q(params, standard_weight(params), spec)


def cmd_solve_q(cfg: dict) -> int:
    params = _params(cfg)
    spec = _spec(cfg)
    q = solve_q(params, standard_weight(params), spec)
    residual = (
        abs(compute_C(params, q, standard_weight(params), spec) - params.kappa)
        if q > max(params.alpha - 1.0, 0.0)
        else 0.0
    )
    header = ["alpha", "beta1", "beta2", "beta3", "beta4", "kappa", "q", "residual"]
    _emit(cfg, header, [[params.alpha, *params.beta, params.kappa, q, residual]])
    return 0


def cmd_c_shape(cfg: dict) -> int:
    params = _params(cfg)
    spec = _spec(cfg)
    table = scan_shape(
        params, standard_weight(params), int(cfg["grid_size"]), spec, strict=False
    )
    rows = [[q, v] for q, v in zip(table.qs, table.values)]
    _emit(cfg, ["q", "c_value"], rows)
    sys.stderr.write(
        f"zeros={fmt(table.zeros[0])},{fmt(table.zeros[1])} "
        f"minimizer={fmt(table.minimizer)} min_value={fmt(table.min_value)} "
        f"passed={table.passed}\n"
    )
    return 0 if table.passed else 1


def cmd_hke(cfg: dict) -> int:
    params = _params(cfg)
    spec = _spec(cfg)
    x = _point(cfg["x"], params.dim)
    y = _point(cfg["y"], params.dim)
    q = _q_for(cfg, params, spec)
    bd = hke_closed(params, float(cfg["t"]), x, y, q=q)
    header = [
        "regime",
        "stable",
        "one_jump",
        "two_jump",
        "survival_x",
        "survival_y",
        "free_value",
        "killed_value",
    ]
    _emit(
        cfg,
        header,
        [[
            bd.regime.value,
            bd.stable,
            bd.one_jump,
            bd.two_jump,
            bd.survival_x,
            bd.survival_y,
            bd.free_value,
            bd.killed_value,
        ]],
    )
    return 0


def cmd_map(cfg: dict) -> int:
    params = _params(cfg)
    if detect_regime(params) is Regime.ONE_JUMP:
        sys.stderr.write("dominance map requires beta2 >= alpha + beta1\n")
        return 2
    x = _point(cfg["x"], params.dim)
    n = int(cfg["grid_n"])
    extent = float(cfg["extent"])
    tangential = np.linspace(-extent, extent, n)
    heights = np.linspace(extent / n, extent, n)
    ys = []
    for h in heights:
        for tg in tangential:
            coords = (tg,) + (0.0,) * (params.dim - 2) + (float(h),)
            ys.append(HalfSpacePoint.from_coords(coords if params.dim > 1 else (float(h),)))
    cells = dominance_map(params, float(cfg["t"]), x, ys)
    header = [f"y{i+1}" for i in range(params.dim)] + [
        "tag",
        "one_jump",
        "two_jump",
        "both_zero",
        "valid",
    ]
    rows = [
        list(c.y.coords()) + [c.tag, c.one_jump, c.two_jump, int(c.both_zero), int(c.valid)]
        for c in cells
    ]
    _emit(cfg, header, rows)
    return 0


def _green_common(cfg: dict, integrate: bool) -> int:
    params = _params(cfg)
    spec = _spec(cfg)
    x = _point(cfg["x"], params.dim)
    y = _point(cfg["y"], params.dim)
    q = _q_for(cfg, params, spec)
    if integrate:
        gb = green_by_time_integration(params, q, x, y)
    else:
        gb = green_estimate(params, q, x, y)
    header = ["q", "value", "q_hat", "case_tag", "h_factor", "small_time", "large_time"]
    _emit(
        cfg,
        header,
        [[
            q,
            gb.value,
            gb.q_hat,
            gb.case_tag,
            gb.H_factor if gb.H_factor is not None else "",
            gb.small_time if gb.small_time is not None else "",
            gb.large_time if gb.large_time is not None else "",
        ]],
    )
    return 0


def cmd_green(cfg: dict) -> int:
    return _green_common(cfg, integrate=False)


def cmd_green_integrate(cfg: dict) -> int:
    return _green_common(cfg, integrate=True)


def cmd_oracle(cfg: dict) -> int:
    op = OracleParams(float(cfg["gamma"]), int(cfg["dim"]), float(cfg["alpha"]))
    spec = QuadratureSpec(rel_tol=max(float(cfg["tol"]), 1e-8), abs_tol=1e-300)
    n = int(cfg["grid_n"])
    ts = [float(v) for v in str(cfg["t_list"]).split(",")]
    heights = np.geomspace(float(cfg["x_lo"]), float(cfg["x_hi"]), n)
    report, q_fit, r2 = compare_oracle_vs_estimate(
        op, spec, ts=ts, xs=heights, ys=heights
    )
    g = op.gamma
    params = ModelParams(op.dim, op.alpha, (g + 0.5, g + 0.5, 0.0, 0.0))
    rows = []
    pad = (0.0,) * (op.dim - 1)
    for t in ts:
        for xh in heights:
            for yh in heights:
                xpt = HalfSpacePoint(op.dim, pad, float(xh))
                ytang = (1.0,) + (0.0,) * (op.dim - 2) if op.dim >= 2 else ()
                ypt = HalfSpacePoint(op.dim, ytang, float(yh))
                num = oracle_p(op, float(t), xpt, ypt, spec)
                den = killed_hke(params, float(t), xpt, ypt, q=q_fit)
                rows.append([t, xh, yh, num, den, num / den])
    _emit(cfg, ["t", "x", "y", "oracle", "estimate", "ratio"], rows)
    sys.stderr.write(
        f"q_fit={fmt(q_fit)} r2={fmt(r2)} "
        f"ratio=[{fmt(report.min_ratio)},{fmt(report.max_ratio)}]\n"
    )
    return 0


def cmd_check(cfg: dict) -> int:
    selector = str(cfg["lemma"])
    if selector == "all":
        ids = lemma_ids()
    elif selector in lemma_ids():
        ids = [selector]
    else:
        sys.stderr.write(f"unknown lemma id: {selector}\n")
        return 2
    spec = QuadratureSpec(rel_tol=max(float(cfg["tol"]), 1e-8), abs_tol=1e-12)
    rows = []
    all_pass = True
    for lid in ids:
        rep = check(lid, sampler_seed=int(cfg["seed"]), budget=int(cfg["budget"]), spec=spec)
        rows.append(
            [
                lid,
                rep.samples,
                rep.excluded,
                rep.min_ratio,
                rep.max_ratio,
                rep.ceiling if rep.ceiling is not None else "",
                int(rep.passed),
            ]
        )
        all_pass = all_pass and rep.passed
    _emit(
        cfg,
        ["lemma_id", "samples", "excluded", "min_ratio", "max_ratio", "ceiling", "pass"],
        rows,
    )
    return 0 if all_pass else 1


_SUBCOMMANDS = {
    "solve-q": (cmd_solve_q, {}),
    "c-shape": (cmd_c_shape, {"grid_size": 64}),
    "hke": (cmd_hke, {"t": 1.0, "x": "1", "y": "2", "q": None}),
    "map": (cmd_map, {"t": 0.001, "x": "1", "grid_n": 16, "extent": 2.0}),
    "green": (cmd_green, {"x": "1", "y": "2", "q": None}),
    "green-integrate": (cmd_green_integrate, {"x": "1", "y": "2", "q": None}),
    "oracle": (
        cmd_oracle,
        {"gamma": 0.5, "t_list": "0.25,1.0,4.0", "grid_n": 8, "x_lo": 0.05, "x_hi": 20.0},
    ),
    "check": (cmd_check, {"lemma": "all"}),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dkl",
        description="boundary-degenerate jump-kernel heat-kernel and Green estimates",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, (_fn, extra) in _SUBCOMMANDS.items():
        sub = subs.add_parser(name)
        _add_common(sub)
        for key, default in extra.items():
            flag = "--" + key.replace("_", "-")
            typ = type(default) if default is not None else str
            sub.add_argument(flag, type=typ, default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fn, extra = _SUBCOMMANDS[args.command]
    try:
        cfg = _resolve(args, dict(extra))
        return fn(cfg)
    except (NonConvergenceError, GreenDivergenceError, ShapeViolationError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 1
    except (ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
