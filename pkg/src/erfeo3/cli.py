"""Command-line front end: config ingestion, sweeps, and CSV/JSON emission.

Subcommands
-----------
equilibrium     one self-consistent solve; prints the spin state and free energy
sweep-t         temperature sweep of all observables (mean-field or dicke)
phase-diagram   order-parameter map over (T, B) plus boundary file
boundary        phase-boundary polyline by bisection (--variant for ablations)
resonances      spin-resonance branches vs field (--method, --axis)
depths          dimensionless coupling depths of the T = 0 ordering criterion
validate-symmetry  check the sublattice-equivalence relations of the couplings

Every subcommand accepts --config (TOML), repeatable --override key=value,
--out, --format {csv,json}, and --plot to render a PNG next to the output.
Numbers are serialized with 9 significant digits; identical inputs produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .dicke import derive_dicke_params, reduce_for_ltpt
from .errors import ErFeO3Error
from .meanfield import order_parameter, rotation_angle_deg, solve_equilibrium
from .model import (ModelConfig, apply_overrides, build_coupling_vectors, build_j_matrix,
                    default_config, load_config, validate_gamma12_symmetry)
from .resonances import dicke_resonances, mf_resonances
from .srpt import coupling_depths
from .sweeps import SWEEP_COLUMNS, phase_boundary, phase_diagram, temperature_sweep

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_CONVERGENCE = 2


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def _write_rows(rows: list[dict], columns, out: str | None, fmt: str):
    if fmt == "json":
        payload = [{k: (float(_fmt(v)) if isinstance(v, float) else v) for k, v in r.items()}
                   for r in rows]
        text = json.dumps(payload, indent=1)
        if out:
            Path(out).write_text(text + "\n")
        else:
            sys.stdout.write(text + "\n")
        return
    def emit(fh):
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])
    if out:
        with open(out, "w", newline="") as fh:
            emit(fh)
    else:
        emit(sys.stdout)


def _load(args) -> ModelConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if args.override:
        cfg = apply_overrides(cfg, dict(kv.split("=", 1) for kv in args.override))
    return cfg


def _grid(lo, hi, step):
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_equilibrium(args) -> int:
    cfg = _load(args)
    res = solve_equilibrium(cfg)
    st = res.state
    row = {
        "T_K": cfg.env.T,
        "sx_A": st.sigma_A[0], "sy_A": st.sigma_A[1], "sz_A": st.sigma_A[2],
        "sx_B": st.sigma_B[0], "sy_B": st.sigma_B[1], "sz_B": st.sigma_B[2],
        "Sx_A": st.S_A[0], "Sy_A": st.S_A[1], "Sz_A": st.S_A[2],
        "Sx_B": st.S_B[0], "Sy_B": st.S_B[1], "Sz_B": st.S_B[2],
        "phi_deg": rotation_angle_deg(st),
        "order_param": order_parameter(st),
        "free_energy_meV": res.free_energy,
        "iterations": res.iterations,
        "branch": res.branch_tag,
        "status": "ok" if res.converged else "not-converged",
    }
    for key, value in row.items():
        print(f"{key} = {_fmt(value)}")
    if args.out:
        _write_rows([row], list(row), args.out, args.format)
    return EXIT_OK if res.converged else EXIT_NO_CONVERGENCE


def _cmd_sweep_t(args) -> int:
    cfg = _load(args)
    rows = temperature_sweep(cfg, _grid(args.tmin, args.tmax, args.tstep), args.method)
    _write_rows(rows, SWEEP_COLUMNS, args.out, args.format)
    if args.plot and args.out:
        from .plots import plot_temperature_sweep
        plot_temperature_sweep(rows, str(Path(args.out).with_suffix(".png")))
    return EXIT_OK


def _cmd_phase_diagram(args) -> int:
    cfg = _load(args)
    grid = phase_diagram(cfg, axis=args.axis,
                         T_grid=_grid(args.tmin, args.tmax, args.tstep),
                         B_grid=_grid(args.bmin, args.bmax, args.bstep),
                         method=args.method)
    rows = []
    for i, T in enumerate(grid.T_values):
        for j, B in enumerate(grid.B_values):
            rows.append({
                "T_K": float(T), "B_T": float(B),
                "order_param": float(grid.order[i, j]),
                "status": "ok" if grid.status[i, j] else "not-converged",
            })
    _write_rows(rows, ("T_K", "B_T", "order_param", "status"), args.out, args.format)
    if args.out:
        bset = [{"T_K": float(t), "B_T": float(b)} for t, b in grid.boundary]
        bpath = str(Path(args.out).with_name(Path(args.out).stem + "_boundary" + Path(args.out).suffix))
        _write_rows(bset, ("T_K", "B_T"), bpath, args.format)
        if args.plot:
            from .plots import plot_phase_diagram
            plot_phase_diagram(grid, str(Path(args.out).with_suffix(".png")))
    return EXIT_OK


def _cmd_boundary(args) -> int:
    cfg = _load(args)
    kw = {}
    if args.bmin is not None and args.bmax is not None:
        kw["B_grid"] = _grid(args.bmin, args.bmax, args.bstep)
    pts = phase_boundary(cfg, axis=args.axis, variant=args.variant, method=args.method, **kw)
    rows = [{"T_K": float(t), "B_T": float(b), "variant": args.variant, "method": args.method}
            for t, b in pts]
    _write_rows(rows, ("T_K", "B_T", "variant", "method"), args.out, args.format)
    if args.plot and args.out:
        from .plots import plot_boundary
        plot_boundary({args.variant: pts}, str(Path(args.out).with_suffix(".png")))
    return EXIT_OK


def _cmd_resonances(args) -> int:
    cfg = _load(args)
    B_values = _grid(args.bmin, args.bmax, args.bstep)
    T = args.temperature

    def one(B):
        try:
            if args.method == "mean-field":
                vec = [0.0, 0.0, 0.0]
                vec["abc".index(args.axis)] = float(B)
                return mf_resonances(cfg, T, tuple(vec))
            return dicke_resonances(cfg, T, args.axis, float(B))
        except ErFeO3Error as exc:
            return exc

    workers = args.threads or os.cpu_count() or 1
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(one, B_values))

    rows = []
    for B, rs in zip(B_values, results):
        if isinstance(rs, ErFeO3Error):
            row = {"B_T": float(B), "status": f"invalid: {rs}"}
            for k in range(4):
                row[f"nu{k+1}_THz"] = float("nan")
                row[f"label{k+1}"] = ""
            rows.append(row)
            continue
        row = {"B_T": float(B), "status": "ok" if rs.valid else rs.note}
        freqs = list(rs.frequencies)[:4]
        labels = list(rs.labels)[:4]
        while len(freqs) < 4:
            freqs.append(float("nan"))
            labels.append("")
        for k in range(4):
            row[f"nu{k+1}_THz"] = float(freqs[k])
            row[f"label{k+1}"] = labels[k]
        rows.append(row)
    columns = ("B_T", "nu1_THz", "nu2_THz", "nu3_THz", "nu4_THz",
               "label1", "label2", "label3", "label4", "status")
    _write_rows(rows, columns, args.out, args.format)
    if args.plot and args.out:
        from .plots import plot_resonances
        table = [[r[f"nu{k+1}_THz"] for k in range(4)] for r in rows]
        plot_resonances(B_values, table, str(Path(args.out).with_suffix(".png")), args.axis)
    return EXIT_OK


def _cmd_depths(args) -> int:
    cfg = _load(args)
    red = reduce_for_ltpt(derive_dicke_params(cfg), cfg.env.B_ext[0],
                          B_ext=cfg.env.B_ext)
    d = coupling_depths(red)
    row = {
        "D_lambda_z": d.D_lambda_z,
        "D_lambda_x": d.D_lambda_x,
        "D_J_Er": d.D_J_Er,
        "total": d.total,
        "superradiant": str(d.superradiant).lower(),
    }
    _write_rows([row], list(row), args.out, args.format)
    return EXIT_OK


def _cmd_validate_symmetry(args) -> int:
    cfg = _load(args)
    report = validate_gamma12_symmetry(build_j_matrix(cfg.xc), build_coupling_vectors(cfg.xc))
    rows = [{"satisfied": str(report.satisfied).lower(),
             "violated_relations": ";".join(report.violated_relations)}]
    _write_rows(rows, ("satisfied", "violated_relations"), args.out, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="TOML config file; defaults to the fitted parameter set")
    p.add_argument("--override", action="append", metavar="KEY=VALUE",
                   help="dotted-key override, e.g. environment.T=10 (repeatable)")
    p.add_argument("--out", help="output file; stdout when omitted")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for sweep points (default: all cores)")
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG figure next to --out")


def _add_t_grid(p, tmin, tmax, tstep):
    p.add_argument("--tmin", type=float, default=tmin)
    p.add_argument("--tmax", type=float, default=tmax)
    p.add_argument("--tstep", type=float, default=tstep)


def _add_b_grid(p, bmin, bmax, bstep):
    p.add_argument("--bmin", type=float, default=bmin)
    p.add_argument("--bmax", type=float, default=bmax)
    p.add_argument("--bstep", type=float, default=bstep)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="erfeo3", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibrium", help="single self-consistent solve")
    _add_common(p)
    p.set_defaults(func=_cmd_equilibrium)

    p = sub.add_parser("sweep-t", help="temperature sweep")
    _add_common(p)
    _add_t_grid(p, 0.1, 8.0, 0.1)
    p.add_argument("--method", choices=("mean-field", "dicke"), default="mean-field")
    p.set_defaults(func=_cmd_sweep_t)

    p = sub.add_parser("phase-diagram", help="order parameter over (T, B)")
    _add_common(p)
    _add_t_grid(p, 0.1, 6.0, 0.05)
    _add_b_grid(p, -2.0, 2.0, 0.05)
    p.add_argument("--axis", choices=("a", "b", "c"), default="a")
    p.add_argument("--method", choices=("mean-field", "dicke"), default="mean-field")
    p.set_defaults(func=_cmd_phase_diagram)

    p = sub.add_parser("boundary", help="phase boundary polyline")
    _add_common(p)
    p.add_argument("--axis", choices=("a", "b", "c"), default="a")
    p.add_argument("--variant", choices=("full", "no-er-fe", "no-er-er"), default="full")
    p.add_argument("--method", choices=("mean-field", "dicke"), default="mean-field")
    _add_b_grid(p, None, None, 0.25)
    p.set_defaults(func=_cmd_boundary)

    p = sub.add_parser("resonances", help="resonance branches vs field")
    _add_common(p)
    p.add_argument("--axis", choices=("a", "b", "c"), default="c")
    p.add_argument("--method", choices=("mean-field", "dicke"), default="mean-field")
    p.add_argument("--temperature", type=float, default=20.0,
                   help="temperature (K) of the resonance calculation (default 20)")
    _add_b_grid(p, 0.0, 10.0, 0.1)
    p.set_defaults(func=_cmd_resonances)

    p = sub.add_parser("depths", help="coupling depths of the ordering criterion")
    _add_common(p)
    p.set_defaults(func=_cmd_depths)

    p = sub.add_parser("validate-symmetry", help="check coupling symmetry relations")
    _add_common(p)
    p.set_defaults(func=_cmd_validate_symmetry)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ErFeO3Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
