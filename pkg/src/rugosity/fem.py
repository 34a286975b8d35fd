"""P1 finite elements for the Robin problem on the rugose slab.

Both Q-tensor components solve the same scalar problem

    -Laplace(q) + c q = 0                       in Omega_eps
    dq/dnu + (w/2) q = (w/2) g                  on the bottom wall and the top,

so one matrix is assembled and two right-hand sides are solved by
Jacobi-preconditioned conjugate gradients.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded

from .errors import (IndefiniteSystem, NotConverged, SingularElement, ValidationError)
from .geometry import MappedMesh, SlabDomain, build_mesh
from .homogenize import g_functions
from .tensors import TOP_ANCHORING, QTensor2

BoundaryData = Callable[[np.ndarray], tuple]


def constant_data(Q: QTensor2) -> BoundaryData:
    return lambda x: (np.full(np.shape(x), Q.q1), np.full(np.shape(x), Q.q2))


def rugose_wall_data(domain: SlabDomain) -> BoundaryData:
    """Q0_eps(x/eps) = nu_eps (x) nu_eps - I/2 written as (g1, g2)."""

    def data(x):
        g1, g2, _ = g_functions(domain.profile, np.asarray(x) / domain.eps)
        return g1, g2

    return data


@dataclass(frozen=True)
class RobinProblem:
    """Bulk coefficient, anchoring strengths and boundary targets.

    ``w_bottom`` defaults to ``w0``; the homogenised problem uses w_ef there.
    """

    c: float
    w0: float
    bottom_data: BoundaryData
    top_data: QTensor2 = TOP_ANCHORING
    w_bottom: Optional[float] = None

    def __post_init__(self):
        if not self.c > 0:
            raise ValidationError("c must be positive")
        if self.w0 < 0 or (self.w_bottom is not None and self.w_bottom < 0):
            raise ValidationError("anchoring strengths must be nonnegative")

    @property
    def bottom_weight(self) -> float:
        return self.w0 if self.w_bottom is None else self.w_bottom

    @classmethod
    def rugose(cls, domain: SlabDomain, c: float, w0: float) -> "RobinProblem":
        return cls(c, w0, rugose_wall_data(domain))

    @classmethod
    def homogenised(cls, c: float, w0: float, w_ef: float, Q_ef: QTensor2,
                    Q_R: QTensor2 = TOP_ANCHORING) -> "RobinProblem":
        return cls(c, w0, constant_data(Q_ef), Q_R, w_ef)


@dataclass(frozen=True, eq=False)
class SparseSymmetricSystem:
    """Compressed-sparse-row matrix with both triangles stored."""

    matrix: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def row_offsets(self) -> np.ndarray:
        return self.matrix.indptr

    @property
    def col_indices(self) -> np.ndarray:
        return self.matrix.indices

    @property
    def values(self) -> np.ndarray:
        return self.matrix.data

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def asymmetry(self) -> float:
        """max |A - A^T| relative to max |A|."""
        diff = abs(self.matrix - self.matrix.T)
        top = diff.max() if diff.nnz else 0.0
        return float(top / abs(self.matrix).max())


def element_matrices(p: np.ndarray):
    """P1 stiffness and mass matrices for triangles ``p`` of shape (T, 3, 2)."""
    x, y = p[..., 0], p[..., 1]
    det = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    if np.any(det <= 0):
        raise SingularElement(f"{int(np.sum(det <= 0))} element(s) with non-positive Jacobian")
    area = 0.5 * det
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1) / det[:, None]
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1) / det[:, None]
    K = area[:, None, None] * (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :])
    M = area[:, None, None] / 12.0 * (np.ones((3, 3)) + np.eye(3))[None]
    return K, M


def assemble(mesh: MappedMesh, problem: RobinProblem):
    """Matrix of a(u, v) = int grad u.grad v + c u v + (w/2) int_boundary u v, and two RHS."""
    dof = mesh.dof_of_node
    n = mesh.n_dofs
    K, M = element_matrices(mesh.nodes[mesh.triangles])
    tri = dof[mesh.triangles]
    rows = [np.repeat(tri, 3, axis=1).ravel()]
    cols = [np.tile(tri, (1, 3)).ravel()]
    vals = [(K + problem.c * M).ravel()]
    rhs = np.zeros((2, n))

    # rugose wall: Gauss points carry the arclength factor
    wb = 0.5 * problem.bottom_weight
    xq, lam, wq = mesh.bottom_quadrature()
    shape = np.stack([lam, 1.0 - lam], axis=1)  # (E, 2, 4)
    Mb = wb * np.einsum("eaq,ebq,eq->eab", shape, shape, wq)
    edges = dof[mesh.bottom_edges]
    rows.append(np.repeat(edges, 2, axis=1).ravel())
    cols.append(np.tile(edges, (1, 2)).ravel())
    vals.append(Mb.ravel())
    g = problem.bottom_data(xq)
    for comp in range(2):
        local = wb * np.einsum("eaq,eq->ea", shape, wq * np.asarray(g[comp]))
        np.add.at(rhs[comp], edges.ravel(), local.ravel())

    # flat top wall
    wt = 0.5 * problem.w0
    L = mesh.top_weights
    Mt = wt * L[:, None, None] / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])[None]
    edges = dof[mesh.top_edges]
    rows.append(np.repeat(edges, 2, axis=1).ravel())
    cols.append(np.tile(edges, (1, 2)).ravel())
    vals.append(Mt.ravel())
    for comp, target in enumerate(problem.top_data.as_array()):
        local = np.repeat((wt * target * L / 2.0)[:, None], 2, axis=1)
        np.add.at(rhs[comp], edges.ravel(), local.ravel())

    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()
    A.sum_duplicates()
    A.sort_indices()
    return SparseSymmetricSystem(A), rhs


class Preconditioner(str, enum.Enum):
    JACOBI = "Jacobi"
    NONE = "None"


@dataclass(frozen=True)
class CGStats:
    iterations: int
    residual: float


def solve_cg(system: SparseSymmetricSystem, rhs: np.ndarray, tol: float = 1e-10,
             max_iter: Optional[int] = None,
             preconditioner: Preconditioner = Preconditioner.JACOBI,
             x0: Optional[np.ndarray] = None):
    """Preconditioned conjugate gradients; stops at ||b - Ax|| <= tol ||b||.

    Raises IndefiniteSystem on non-positive curvature and NotConverged when
    ``max_iter`` (default 20 sqrt(n)) is exhausted.
    """
    if not tol > 0:
        raise ValidationError("tol must be positive")
    n = system.n
    b = np.asarray(rhs, dtype=float)
    if max_iter is None:
        max_iter = max(20, int(20 * np.sqrt(n)))
    if Preconditioner(preconditioner) is Preconditioner.JACOBI:
        diag = system.diagonal()
        if np.any(diag <= 0):
            raise IndefiniteSystem("non-positive diagonal entry")
        inv_diag = 1.0 / diag
    else:
        inv_diag = np.ones(n)

    bnorm = float(np.linalg.norm(b))
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    if bnorm == 0.0:
        return np.zeros(n), CGStats(0, 0.0)
    r = b - system.matvec(x)
    z = inv_diag * r
    p = z.copy()
    rz = float(r @ z)
    res = float(np.linalg.norm(r)) / bnorm
    it = 0
    while res > tol:
        if it >= max_iter:
            raise NotConverged(it, res)
        Ap = system.matvec(p)
        curv = float(p @ Ap)
        if curv <= 0:
            raise IndefiniteSystem(f"non-positive curvature {curv:.3e} at iteration {it}")
        alpha = rz / curv
        x += alpha * p
        r -= alpha * Ap
        it += 1
        res = float(np.linalg.norm(r)) / bnorm
        z = inv_diag * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    # report the true residual, not the recursively updated one
    true_res = float(np.linalg.norm(b - system.matvec(x))) / bnorm
    if true_res > tol:
        # recursive residual drifted; polish with a restart
        return solve_cg(system, b, tol, max_iter, preconditioner, x0=x)
    return x, CGStats(it, true_res)


@dataclass(frozen=True, eq=False)
class FemSolution:
    mesh: MappedMesh
    nodal_q1: np.ndarray
    nodal_q2: np.ndarray
    cg_iterations: int
    final_residual: float
    timings: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = ["node_id,x,y,q1,q2"]
        for i, ((x, y), a, b) in enumerate(zip(self.mesh.nodes, self.nodal_q1, self.nodal_q2)):
            lines.append(f"{i},{x:.17g},{y:.17g},{a:.17g},{b:.17g}")
        return "\n".join(lines) + "\n"

    def stats(self) -> dict:
        return {
            "iterations": self.cg_iterations,
            "residual": self.final_residual,
            "n_nodes": self.mesh.n_nodes,
            "n_dofs": self.mesh.n_dofs,
            "h_max": self.mesh.h_max,
            **self.timings,
        }


def solve_on_mesh(mesh: MappedMesh, problem: RobinProblem, tol: float = 1e-10,
                  preconditioner: Preconditioner = Preconditioner.JACOBI) -> FemSolution:
    t0 = time.perf_counter()
    system, rhs = assemble(mesh, problem)
    t1 = time.perf_counter()
    dof = mesh.dof_of_node
    comps, iters, resid = [], 0, 0.0
    for b in rhs:
        x, stats = solve_cg(system, b, tol, preconditioner=preconditioner)
        comps.append(x[dof])
        iters += stats.iterations
        resid = max(resid, stats.residual)
    t2 = time.perf_counter()
    return FemSolution(mesh, comps[0], comps[1], iters, resid,
                       {"assembly_seconds": t1 - t0, "solve_seconds": t2 - t1})


def solve_rugose(domain: SlabDomain, problem: RobinProblem, nx_per_period: int = 16,
                 ny: int = 16, grading: float = 1.5, tol: float = 1e-10) -> FemSolution:
    mesh = build_mesh(domain, nx_per_period, ny, grading)
    return solve_on_mesh(mesh, problem, tol)


def discrete_energy(system: SparseSymmetricSystem, rhs: np.ndarray, x: np.ndarray) -> float:
    """a(x, x) - 2 b.x, minimised by the Galerkin solution."""
    return float(x @ system.matvec(x) - 2.0 * rhs @ x)


def l2_norm(mesh: MappedMesh, q1, q2) -> float:
    """||Q||_{L2} with |Q|^2 = 2 (q1^2 + q2^2), exact for P1 fields."""
    total = 0.0
    area = mesh.signed_areas()
    for q in (np.asarray(q1, dtype=float), np.asarray(q2, dtype=float)):
        u = q[mesh.triangles]
        total += float(np.sum(area / 12.0 * (np.sum(u * u, axis=1) + np.sum(u, axis=1) ** 2)))
    return float(np.sqrt(2.0 * total))


def h1_seminorm(mesh: MappedMesh, q1, q2) -> float:
    """|Q|_{H1} with the same factor 2 as the L2 norm."""
    K, _ = element_matrices(mesh.nodes[mesh.triangles])
    total = 0.0
    for q in (np.asarray(q1, dtype=float), np.asarray(q2, dtype=float)):
        u = q[mesh.triangles]
        total += float(np.einsum("ti,tij,tj->", u, K, u))
    return float(np.sqrt(2.0 * total))


def solve_limit_discrete(levels: np.ndarray, c: float, w0: float, w_ef: float,
                         Q_ef: QTensor2, Q_R: QTensor2 = TOP_ANCHORING) -> np.ndarray:
    """P1 solution of the x-independent limit problem on the grid ``levels``.

    On a flat structured mesh the 2D Galerkin solution of the homogenised
    problem is x-independent and coincides with this 1D solution.  Returns
    shape (len(levels), 2).
    """
    y = np.asarray(levels, dtype=float)
    h = np.diff(y)
    n = len(y)
    main = np.zeros(n)
    off = np.zeros(n - 1)
    main[:-1] += 1.0 / h + c * h / 3.0
    main[1:] += 1.0 / h + c * h / 3.0
    off += -1.0 / h + c * h / 6.0
    main[0] += 0.5 * w_ef
    main[-1] += 0.5 * w0
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = main
    ab[2, :-1] = off
    out = np.zeros((n, 2))
    for comp, (bottom, top) in enumerate(zip(Q_ef.as_array(), Q_R.as_array())):
        b = np.zeros(n)
        b[0] = 0.5 * w_ef * bottom
        b[-1] = 0.5 * w0 * top
        out[:, comp] = solve_banded((1, 1), ab, b)
    return out
