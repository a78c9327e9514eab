"""Figure rendering for the CLI report path.

Each plotting helper takes the rows/grids produced by the sweep drivers
and writes a PNG next to the delimited output.  Rendering is optional and
uses the Agg backend so it works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sweeps import PhaseGrid

_DPI = 150


def plot_temperature_sweep(rows: list[dict], path: str) -> None:
    T = [r["T_K"] for r in rows]
    fig, axes = plt.subplots(3, 1, figsize=(6, 8), sharex=True)
    axes[0].plot(T, [r["sx_A"] for r in rows], label=r"$\bar\sigma_x$")
    axes[0].plot(T, [r["sz_A"] for r in rows], label=r"$\bar\sigma_z^A$")
    axes[0].plot(T, [r["order_param"] for r in rows], "--", label="order param")
    axes[0].set_ylabel("Er components")
    axes[1].plot(T, [r["Sx_A"] for r in rows], label=r"$\bar S_x$")
    axes[1].plot(T, [r["Sy_A"] for r in rows], label=r"$\bar S_y^A$")
    axes[1].plot(T, [r["Sz_B"] for r in rows], label=r"$\bar S_z^B$")
    axes[1].set_ylabel("Fe components")
    axes[2].plot(T, [r["phi_deg"] for r in rows], label=r"$\varphi$ (deg)")
    axes[2].set_ylabel("rotation angle (deg)")
    axes[2].set_xlabel("T (K)")
    for ax in axes:
        ax.legend(loc="best", fontsize=8)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_phase_diagram(grid: PhaseGrid, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    mesh = ax.pcolormesh(grid.B_values, grid.T_values, grid.order,
                         shading="auto", cmap="Reds")
    fig.colorbar(mesh, ax=ax, label=r"$|\bar\sigma_z^A-\bar\sigma_z^B|$")
    if len(grid.boundary):
        ax.plot(grid.boundary[:, 1], grid.boundary[:, 0], "k.", ms=2)
    ax.set_xlabel(f"B along {grid.axis} (T)")
    ax.set_ylabel("T (K)")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_boundary(polylines: dict[str, np.ndarray], path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    styles = {"full": "-", "no-er-fe": "-.", "no-er-er": "--"}
    for name, pts in polylines.items():
        if len(pts):
            ax.plot(pts[:, 1], pts[:, 0], styles.get(name, "-"), label=name)
    ax.set_xlabel("B along a (T)")
    ax.set_ylabel("T (K)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_resonances(B_values, freq_table, path: str, axis: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    f = np.asarray(freq_table, dtype=float)
    for j in range(f.shape[1]):
        ax.plot(B_values, f[:, j], ".", ms=2.5)
    ax.set_xlabel(f"B along {axis} (T)")
    ax.set_ylabel("frequency (THz)")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
