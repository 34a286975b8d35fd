"""Static figures written next to the CSV/JSON artifacts."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402
from matplotlib.tri import Triangulation  # noqa: E402

FIGSIZE = (6.0, 4.5)


def _save(fig, path):
    # fixed metadata keeps repeated renders identical
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)


def plot_rate(report, path):
    """log-log error against eps, with the fitted line and eps^((p-1)/p) guides."""
    eps = np.array([r.eps for r in report.rows])
    err = report.errors
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.loglog(eps, err, "ko", ms=7, label=r"$\|Q_\varepsilon-Q_0\|_{L^2(\Omega_\varepsilon)}$")
    if report.fitted_slope is not None:
        ax.loglog(eps, np.exp(report.fitted_intercept) * eps**report.fitted_slope, "k--",
                  label=f"fit, slope {report.fitted_slope:.3f}")
        anchor = err[-1]
        for p, rate in report.theoretical_rates().items():
            ax.loglog(eps, anchor * (eps / eps[-1]) ** rate, ":", lw=1,
                      label=f"$\\varepsilon^{{{rate:.3g}}}$ (p={p})")
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_ylabel(r"$L^2$ error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8, loc="upper left")
    _save(fig, path)


def plot_mesh(mesh, path, max_columns: int = 256):
    """Mesh of the first ``max_columns`` columns (the full slab is too dense to read)."""
    ncol = min(mesh.nx, max_columns)
    stride = mesh.nx + 1
    i = np.arange(mesh.n_nodes) % stride
    keep = np.all(i[mesh.triangles] <= ncol, axis=1)
    tri = mesh.triangles[keep]
    p = mesh.nodes
    segs = p[np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.add_collection(LineCollection(segs, colors="k", linewidths=0.3))
    b = mesh.bottom_edges[:ncol]
    ax.add_collection(LineCollection(p[b], colors="tab:red", linewidths=1.0))
    ax.set_xlim(0.0, p[ncol, 0])
    ax.set_ylim(0.0, mesh.domain.R)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    _save(fig, path)


def plot_solution(solution, path):
    mesh = solution.mesh
    tri = Triangulation(mesh.nodes[:, 0], mesh.nodes[:, 1], mesh.triangles)
    fig, axes = plt.subplots(1, 2, figsize=(11.0, 4.0), sharey=True)
    for ax, values, name in zip(axes, (solution.nodal_q1, solution.nodal_q2), ("q1", "q2")):
        im = ax.tripcolor(tri, values, shading="gouraud", cmap="viridis")
        fig.colorbar(im, ax=ax)
        ax.set_title(name)
        ax.set_xlabel("x")
    axes[0].set_ylabel("y")
    _save(fig, path)


def plot_limit(solution, path, n: int = 201):
    y = np.linspace(0.0, solution.R, n)
    q = solution.components(y)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(y, q[:, 0], label="q1")
    ax.plot(y, q[:, 1], label="q2")
    ax.set_xlabel("y")
    ax.set_ylabel(r"$Q_0(y)$")
    ax.legend()
    ax.grid(True, alpha=0.3)
    _save(fig, path)
