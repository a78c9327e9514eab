"""Temperature sweeps, phase diagrams, and phase-boundary tracing.

All drivers work for both solution methods: ``mean-field`` (full
self-consistent solve of the four sublattice spins) and ``dicke`` (the
reduced qAFM + Er model solved semiclassically, valid for B along the a
axis).  Sweeps warm-start each point from its predecessor in addition to
the canonical seeds, and record per-point convergence in a status column
instead of aborting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dicke import derive_dicke_params, reduce_for_ltpt
from .errors import DomainError
from .magnon import magnon_basis
from .meanfield import T_MIN, solve_points
from .model import ModelConfig
from .srpt import fe_spins_from_magnons, semiclassical_equilibrium

ORDER_THRESHOLD = 1e-4   # |sigma_z(A) - sigma_z(B)| above this counts as ordered

_AXIS_INDEX = {"a": 0, "b": 1, "c": 2}

SWEEP_COLUMNS = (
    "T_K", "sx_A", "sy_A", "sz_A", "sx_B", "sy_B", "sz_B",
    "Sx_A", "Sy_A", "Sz_A", "Sx_B", "Sy_B", "Sz_B",
    "phi_deg", "alpha_r", "alpha_i", "order_param", "free_energy_meV", "status",
)


def _axis_field(axis: str, B: float) -> tuple[float, float, float]:
    v = [0.0, 0.0, 0.0]
    v[_AXIS_INDEX[axis]] = float(B)
    return tuple(v)


def _phi_deg(S_y: float, S_z: float) -> float:
    return math.degrees(math.atan2(S_y, S_z))


def _restored_sz(S: float, s_x: float, s_y: float, s_z: float) -> float:
    """Fe z component with the spin length restored; bosonization leaves
    |S| != S, so the rotation angle of the reduced model is computed on the
    sphere instead of from the raw z value."""
    rem = S * S - s_x * s_x - s_y * s_y
    return math.copysign(math.sqrt(max(rem, 0.0)), s_z)


# ---------------------------------------------------------------------------
# Temperature sweep
# ---------------------------------------------------------------------------

def temperature_sweep(cfg: ModelConfig, T_grid, method: str = "mean-field") -> list[dict]:
    """Equilibrium observables on an ascending temperature grid at the
    configuration's field.  Rows follow SWEEP_COLUMNS."""
    T_grid = np.asarray(T_grid, dtype=float)
    if np.any(np.diff(T_grid) < 0):
        raise ValueError("temperature grid must be ascending")
    B = np.asarray(cfg.env.B_ext, dtype=float)
    rows: list[dict] = []

    if method == "mean-field":
        warm = None
        for T in T_grid:
            out = solve_points(cfg, np.array([T]), B[None, :], warm=warm)
            st = out["states"][0]
            warm = out["states"]
            s_y = 0.5 * (st[2, 1] - st[3, 1])
            s_z = 0.5 * (st[3, 2] - st[2, 2])
            rows.append({
                "T_K": float(T),
                "sx_A": st[0, 0], "sy_A": st[0, 1], "sz_A": st[0, 2],
                "sx_B": st[1, 0], "sy_B": st[1, 1], "sz_B": st[1, 2],
                "Sx_A": st[2, 0], "Sy_A": st[2, 1], "Sz_A": st[2, 2],
                "Sx_B": st[3, 0], "Sy_B": st[3, 1], "Sz_B": st[3, 2],
                "phi_deg": _phi_deg(s_y, s_z),
                "alpha_r": float("nan"), "alpha_i": float("nan"),
                "order_param": float(out["order_param"][0]),
                "free_energy_meV": float(out["free_energy"][0]),
                "status": "ok" if out["converged"][0] else "not-converged",
            })
        return rows

    if method != "dicke":
        raise ValueError("method must be 'mean-field' or 'dicke'")
    if B[1] != 0.0 or B[2] != 0.0:
        raise DomainError("the dicke method requires the field along the a axis")
    basis = magnon_basis(cfg.fe)
    red = reduce_for_ltpt(derive_dicke_params(cfg), B[0])
    S = cfg.fe.S
    for T in T_grid:
        s = semiclassical_equilibrium(red, max(float(T), T_MIN))
        s_x, s_y, s_z = fe_spins_from_magnons(s.alpha_r, s.alpha_i, cfg, basis)
        sz_sphere = _restored_sz(S, s_x, s_y, s_z)
        rows.append({
            "T_K": float(T),
            "sx_A": s.sigma_x, "sy_A": 0.0, "sz_A": s.sigma_z,
            "sx_B": s.sigma_x, "sy_B": 0.0, "sz_B": -s.sigma_z,
            "Sx_A": s_x, "Sy_A": s_y, "Sz_A": -s_z,
            "Sx_B": s_x, "Sy_B": -s_y, "Sz_B": s_z,
            "phi_deg": _phi_deg(s_y, sz_sphere),
            "alpha_r": s.alpha_r, "alpha_i": s.alpha_i,
            "order_param": 2.0 * abs(s.sigma_z),
            "free_energy_meV": s.action,
            "status": "ok" if s.converged else "not-converged",
        })
    return rows


# ---------------------------------------------------------------------------
# Phase diagram
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseGrid:
    axis: str
    T_values: np.ndarray
    B_values: np.ndarray
    order: np.ndarray              # (len(T), len(B))
    status: np.ndarray             # bool converged mask
    boundary: np.ndarray           # (n, 2) of (T, B) threshold crossings


def _boundary_points(T_values, B_values, order) -> np.ndarray:
    """Threshold crossings between adjacent cells, linearly interpolated,
    along both grid directions."""
    pts = []
    thr = ORDER_THRESHOLD
    nT, nB = order.shape
    for i in range(nT):
        for j in range(nB - 1):
            a, b = order[i, j], order[i, j + 1]
            if (a > thr) != (b > thr):
                frac = (thr - a) / (b - a)
                pts.append((T_values[i], B_values[j] + frac * (B_values[j + 1] - B_values[j])))
    for j in range(nB):
        for i in range(nT - 1):
            a, b = order[i, j], order[i + 1, j]
            if (a > thr) != (b > thr):
                frac = (thr - a) / (b - a)
                pts.append((T_values[i] + frac * (T_values[i + 1] - T_values[i]), B_values[j]))
    return np.asarray(sorted(set(pts)), dtype=float).reshape(-1, 2)


def phase_diagram(
    cfg: ModelConfig,
    axis: str = "a",
    T_grid=None,
    B_grid=None,
    method: str = "mean-field",
) -> PhaseGrid:
    """Order-parameter map over (T, B) plus the extracted boundary polyline.

    Mean-field rows are solved as one batch per temperature, warm-started
    from the previous row.
    """
    T_grid = np.arange(0.1, 6.0 + 1e-9, 0.05) if T_grid is None else np.asarray(T_grid, float)
    B_grid = np.arange(-2.0, 2.0 + 1e-9, 0.05) if B_grid is None else np.asarray(B_grid, float)
    nT, nB = len(T_grid), len(B_grid)
    order = np.zeros((nT, nB))
    status = np.zeros((nT, nB), dtype=bool)

    if method == "mean-field":
        B = np.zeros((nB, 3))
        B[:, _AXIS_INDEX[axis]] = B_grid
        warm = None
        for i, T in enumerate(T_grid):
            out = solve_points(cfg, np.full(nB, T), B, warm=warm)
            warm = out["states"]
            order[i] = out["order_param"]
            status[i] = out["converged"]
    elif method == "dicke":
        if axis != "a":
            raise DomainError("the dicke method is restricted to the a axis")
        dicke = derive_dicke_params(cfg)
        for j, Bx in enumerate(B_grid):
            red = reduce_for_ltpt(dicke, float(Bx))
            for i, T in enumerate(T_grid):
                s = semiclassical_equilibrium(red, max(float(T), T_MIN))
                order[i, j] = 2.0 * abs(s.sigma_z)
                status[i, j] = s.converged
    else:
        raise ValueError("method must be 'mean-field' or 'dicke'")

    return PhaseGrid(
        axis=axis,
        T_values=T_grid,
        B_values=B_grid,
        order=order,
        status=status,
        boundary=_boundary_points(T_grid, B_grid, order),
    )


# ---------------------------------------------------------------------------
# Boundary tracing by bisection
# ---------------------------------------------------------------------------

VARIANTS = ("full", "no-er-fe", "no-er-er")


def apply_variant(cfg: ModelConfig, variant: str) -> ModelConfig:
    """Ablations: 'no-er-fe' removes the Er-Fe couplings (J = D_x = D_y = 0,
    hence all Er-magnon couplings), 'no-er-er' removes the direct Er-Er
    exchange."""
    if variant == "full":
        return cfg
    if variant == "no-er-fe":
        return replace(cfg, xc=replace(cfg.xc, J=0.0, D_x=0.0, D_y=0.0))
    if variant == "no-er-er":
        return replace(cfg, er=replace(cfg.er, J_Er=0.0))
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def _ordered_mask_mf(cfg, T_arr, B_arr, warm=None):
    out = solve_points(cfg, T_arr, B_arr, warm=warm)
    return out["order_param"] > ORDER_THRESHOLD, out["states"]


def _ordered_mask_dicke(cfg, T_arr, Bx_arr):
    dicke = derive_dicke_params(cfg)
    mask = np.zeros(len(T_arr), dtype=bool)
    for k, (T, Bx) in enumerate(zip(T_arr, Bx_arr)):
        red = reduce_for_ltpt(dicke, float(Bx))
        s = semiclassical_equilibrium(red, max(float(T), T_MIN))
        mask[k] = 2.0 * abs(s.sigma_z) > ORDER_THRESHOLD
    return mask


def _ordered_many(cfg, T_arr, B_arr, axis, method) -> np.ndarray:
    """Ordered/not per (T, B-scalar) pair; B_arr is the field along axis."""
    if method == "mean-field":
        Bv = np.zeros((len(T_arr), 3))
        Bv[:, _AXIS_INDEX[axis]] = B_arr
        return _ordered_mask_mf(cfg, np.asarray(T_arr, float), Bv)[0]
    if axis != "a":
        raise DomainError("the dicke method is restricted to the a axis")
    return _ordered_mask_dicke(cfg, np.asarray(T_arr, float), np.asarray(B_arr, float))


def _bisect_many(cfg, fixed, lo, hi, axis, method, tol, vary: str) -> np.ndarray:
    """Vectorized bisection of the ordering threshold.

    vary='T': fixed holds the fields, (lo, hi) bracket Tc per point.
    vary='B': fixed holds the temperatures, (lo, hi) bracket the signed Bc.
    Brackets must already satisfy ordered(lo) and not ordered(hi).
    """
    lo = lo.copy()
    hi = hi.copy()
    while np.max(np.abs(hi - lo)) > tol:
        mid = 0.5 * (lo + hi)
        if vary == "T":
            m = _ordered_many(cfg, mid, fixed, axis, method)
        else:
            m = _ordered_many(cfg, fixed, mid, axis, method)
        lo = np.where(m, mid, lo)
        hi = np.where(m, hi, mid)
    return 0.5 * (lo + hi)


def critical_temperature(
    cfg: ModelConfig,
    B: float = 0.0,
    axis: str = "a",
    method: str = "mean-field",
    variant: str = "full",
    T_lo: float = 0.05,
    T_hi: float = 8.0,
    tol: float = 0.02,
) -> float | None:
    """Ordering temperature at fixed field by bisection on the order
    parameter threshold; None when the low-temperature end is not ordered."""
    cfg = apply_variant(cfg, variant)
    if not _ordered_many(cfg, np.array([T_lo]), np.array([B]), axis, method)[0]:
        return None
    if _ordered_many(cfg, np.array([T_hi]), np.array([B]), axis, method)[0]:
        return T_hi
    tc = _bisect_many(cfg, np.array([B]), np.array([T_lo]), np.array([T_hi]),
                      axis, method, tol, vary="T")
    return float(tc[0])


def critical_field(
    cfg: ModelConfig,
    T: float,
    axis: str = "a",
    direction: float = 1.0,
    method: str = "mean-field",
    variant: str = "full",
    B_max: float = 6.0,
    tol: float = 0.05,
) -> float | None:
    """Critical field at fixed temperature along +-axis by bisection."""
    cfg = apply_variant(cfg, variant)
    if not _ordered_many(cfg, np.array([T]), np.array([0.0]), axis, method)[0]:
        return None
    if _ordered_many(cfg, np.array([T]), np.array([direction * B_max]), axis, method)[0]:
        return direction * B_max
    bc = _bisect_many(cfg, np.array([T]), np.array([0.0]), np.array([direction * B_max]),
                      axis, method, tol, vary="B")
    return float(bc[0])


def phase_boundary(
    cfg: ModelConfig,
    axis: str = "a",
    variant: str = "full",
    method: str = "mean-field",
    B_grid=None,
    T_grid=None,
    T_tol: float = 0.02,
    B_tol: float = 0.05,
    B_max: float = 6.0,
) -> np.ndarray:
    """Boundary polyline as (T, B) pairs: Tc(B) by bisection in T over a
    field grid, plus Bc(T) by bisection in B over a temperature grid for
    the near-vertical flanks.  All bisections of a grid run as one batch.
    Sorted by field."""
    cfg = apply_variant(cfg, variant)
    B_grid = np.arange(-4.0, 4.0 + 1e-9, 0.25) if B_grid is None else np.asarray(B_grid, float)
    T_grid = np.arange(0.25, 4.0 + 1e-9, 0.25) if T_grid is None else np.asarray(T_grid, float)
    T_lo, T_hi = 0.05, 8.0
    pts: list[tuple[float, float]] = []

    lo_ok = _ordered_many(cfg, np.full(len(B_grid), T_lo), B_grid, axis, method)
    hi_ok = _ordered_many(cfg, np.full(len(B_grid), T_hi), B_grid, axis, method)
    sel = lo_ok & ~hi_ok
    if np.any(sel):
        tc = _bisect_many(cfg, B_grid[sel], np.full(sel.sum(), T_lo),
                          np.full(sel.sum(), T_hi), axis, method, T_tol, vary="T")
        pts.extend((float(t), float(b)) for t, b in zip(tc, B_grid[sel]))

    for direction in (+1.0, -1.0):
        zero_ok = _ordered_many(cfg, T_grid, np.zeros(len(T_grid)), axis, method)
        far_ok = _ordered_many(cfg, T_grid, np.full(len(T_grid), direction * B_max), axis, method)
        sel = zero_ok & ~far_ok
        if np.any(sel):
            bc = _bisect_many(cfg, T_grid[sel], np.zeros(sel.sum()),
                              np.full(sel.sum(), direction * B_max), axis, method, B_tol, vary="B")
            pts.extend((float(t), float(b)) for t, b in zip(T_grid[sel], bc))

    pts.sort(key=lambda p: (p[1], p[0]))
    return np.asarray(pts, dtype=float).reshape(-1, 2)
