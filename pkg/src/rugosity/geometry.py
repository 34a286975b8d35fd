"""Rugose slab domains, the vertical-rescaling maps and boundary-fitted meshes.

Omega_0 = [0, 2pi) x (0, R) is the flat slab and
Omega_eps = {eps*phi(x/eps) < y < R} the rugose one.  Meshes of Omega_eps are
built by pushing a structured, x-periodic grid on Omega_0 through the map
(x, y) -> (x, y (R - phi_eps(x)) / R + phi_eps(x)).
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidDomain, InvalidResolution, MeshDegenerate, OutOfDomain
from .profile import PeriodicProfile, ScaledProfile

TWO_PI = 2.0 * np.pi
GAUSS4 = np.polynomial.legendre.leggauss(4)


def eps_from_k(k: int) -> float:
    return 1.0 / (2 * int(k))


def periods_of(eps: float) -> int:
    """The integer 1/eps (number of profile periods in [0, 2pi)), or raise."""
    inv = 1.0 / eps
    n = int(round(inv))
    if n < 2 or n % 2 or abs(inv - n) > 1e-9 * n:
        raise InvalidDomain(f"eps must equal 1/(2k) for an integer k >= 1, got {eps!r}")
    return n


@dataclass(frozen=True)
class SlabDomain:
    R: float
    eps: float
    profile: PeriodicProfile

    def __post_init__(self):
        if not self.R > 0:
            raise InvalidDomain(f"R must be positive, got {self.R}")
        periods_of(self.eps)
        sup = self.profile.sup_norm()
        if sup > 0 and not self.eps < self.R / (2.0 * sup):
            raise InvalidDomain(
                f"eps = {self.eps} violates eps < R / (2 |phi|_inf) = {self.R / (2 * sup):.6g}"
            )

    @property
    def scaled(self) -> ScaledProfile:
        return ScaledProfile(self.profile, self.eps)

    def wall(self, x):
        """Height of the rugose wall, eps*phi(x/eps)."""
        return self.scaled(x)

    def area(self) -> float:
        """|Omega_eps| = 2 pi R - eps * 2 pi a0 (integer number of periods)."""
        return TWO_PI * (self.R - self.eps * self.profile.a0)

    def lipschitz_bound(self) -> float:
        """An eps-independent Lipschitz constant for the map and its inverse.

        Entry-wise bounds of both Jacobians with eps*|phi| < R/2 give
        1 + |phi'| + 1 for the map and 1 + 4|phi'| + 2 for the inverse.
        """
        return 3.0 + 4.0 * self.profile.deriv_sup_norm()


def phi_eps_map(domain: SlabDomain, x, y):
    """Omega_0 -> Omega_eps, fixing y = R and sending y = 0 to the wall."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y < -1e-12) or np.any(y > domain.R + 1e-12):
        raise OutOfDomain("y must lie in [0, R]")
    h = domain.wall(x)
    return x, y * (domain.R - h) / domain.R + h


def phi_eps_inverse(domain: SlabDomain, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    h = domain.wall(x)
    if np.any(y < h - 1e-12) or np.any(y > domain.R + 1e-12):
        raise OutOfDomain("point lies outside the rugose slab")
    return x, domain.R * (y - h) / (domain.R - h)


def boundary_normal(domain: SlabDomain, x) -> np.ndarray:
    """Outward unit normal of the rugose wall, (phi'(x/eps), -1) / gamma_eps."""
    d = domain.profile.derivative(np.asarray(x, dtype=float) / domain.eps, 1)
    g = np.sqrt(1.0 + d * d)
    return np.stack([d / g, -1.0 / g], axis=-1)


def graded_levels(R: float, ny: int, grading: float) -> np.ndarray:
    """ny + 1 levels in [0, R]; layer thickness grows geometrically by a total factor ``grading``."""
    if ny < 1:
        raise InvalidResolution("ny must be >= 1")
    if grading == 1.0 or ny == 1:
        return np.linspace(0.0, R, ny + 1)
    r = grading ** (1.0 / (ny - 1))
    widths = r ** np.arange(ny)
    levels = np.concatenate([[0.0], np.cumsum(widths)])
    levels = R * levels / levels[-1]
    levels[-1] = R
    return levels


@dataclass(frozen=True, eq=False)
class MappedMesh:
    """P1 triangulation of Omega_eps.

    Nodes are laid out column-fastest, ``index = j * (nx + 1) + i`` with
    ``i = 0..nx`` along x and ``j = 0..ny`` upwards; column ``nx`` duplicates
    column 0 at x = 2 pi and is identified with it through ``periodic_pairs``.
    """

    domain: SlabDomain
    nx: int
    ny: int
    levels: np.ndarray
    nodes: np.ndarray
    triangles: np.ndarray
    bottom_edges: np.ndarray
    bottom_weights: np.ndarray
    top_edges: np.ndarray
    top_weights: np.ndarray
    periodic_pairs: np.ndarray
    h_max: float

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def dof_of_node(self) -> np.ndarray:
        """Map node -> degree of freedom, merging the x = 2pi column into x = 0."""
        dof = np.arange(self.n_nodes)
        dof[self.periodic_pairs[:, 1]] = self.periodic_pairs[:, 0]
        # renumber to 0..n_dof-1
        _, compact = np.unique(dof, return_inverse=True)
        return compact

    @property
    def n_dofs(self) -> int:
        return self.n_nodes - len(self.periodic_pairs)

    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def area(self) -> float:
        return float(np.sum(self.signed_areas()))

    def bottom_quadrature(self):
        """4-point Gauss data on every bottom edge.

        Returns (x, lam, w): quadrature abscissae (E, 4), the barycentric
        coordinate of the edge's first node at each point, and weights that
        include the arclength factor gamma_eps(x/eps), so that sum(w) is the
        exact length of the rugose wall.
        """
        xa = self.nodes[self.bottom_edges[:, 0], 0]
        xb = self.nodes[self.bottom_edges[:, 1], 0]
        xg, wg = GAUSS4
        half = 0.5 * (xb - xa)
        x = 0.5 * (xa + xb)[:, None] + half[:, None] * xg[None, :]
        lam = 0.5 * (1.0 - xg)[None, :].repeat(len(xa), axis=0)
        d = self.domain.profile.derivative(x / self.domain.eps, 1)
        w = half[:, None] * wg[None, :] * np.sqrt(1.0 + d * d)
        return x, lam, w

    def to_text(self) -> str:
        """Plain-text export with node, element, boundary and periodic sections."""
        out = io.StringIO()
        out.write("# rugosity mapped mesh\n")
        out.write(f"# R={self.domain.R!r} eps={self.domain.eps!r} nx={self.nx} ny={self.ny}\n")
        out.write(f"nodes {self.n_nodes}\n")
        for i, (x, y) in enumerate(self.nodes):
            out.write(f"{i} {x:.17g} {y:.17g}\n")
        out.write(f"triangles {len(self.triangles)}\n")
        for i, (a, b, c) in enumerate(self.triangles):
            out.write(f"{i} {a} {b} {c}\n")
        n_b = len(self.bottom_edges) + len(self.top_edges)
        out.write(f"boundary {n_b}\n")
        k = 0
        for tag, edges, weights in (
            ("bottom", self.bottom_edges, self.bottom_weights),
            ("top", self.top_edges, self.top_weights),
        ):
            for (a, b), w in zip(edges, weights):
                out.write(f"{k} {a} {b} {tag} {w:.17g}\n")
                k += 1
        out.write(f"periodic {len(self.periodic_pairs)}\n")
        for a, b in self.periodic_pairs:
            out.write(f"{a} {b}\n")
        return out.getvalue()


def build_mesh(domain: SlabDomain, nx_per_period: int = 16, ny: int = 16,
               grading: float = 1.5) -> MappedMesh:
    if nx_per_period < 8 or int(nx_per_period) != nx_per_period:
        raise InvalidResolution("nx_per_period must be an integer >= 8")
    if ny < 8 or int(ny) != ny:
        raise InvalidResolution("ny must be an integer >= 8")
    if not grading >= 1.0:
        raise InvalidResolution("grading must be >= 1")
    nxf = Fraction(int(nx_per_period)) * periods_of(domain.eps)
    if nxf.denominator != 1 or nxf < 8:
        raise InvalidResolution("nx_per_period / eps must be an integer >= 8")
    nx, ny = int(nxf), int(ny)

    levels = graded_levels(domain.R, ny, grading)
    xs = TWO_PI * np.arange(nx + 1) / nx
    X0, Y0 = np.meshgrid(xs, levels)  # shape (ny+1, nx+1)
    X, Y = phi_eps_map(domain, X0, Y0)
    # exact wall and top heights, no rounding from the map
    Y[0] = domain.wall(xs)
    Y[-1] = domain.R
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    idx = np.arange((ny + 1) * (nx + 1)).reshape(ny + 1, nx + 1)
    a = idx[:-1, :-1].ravel()
    b = idx[:-1, 1:].ravel()
    c = idx[1:, 1:].ravel()
    d = idx[1:, :-1].ravel()
    ac = np.linalg.norm(nodes[c] - nodes[a], axis=1)
    bd = np.linalg.norm(nodes[d] - nodes[b], axis=1)
    use_ac = ac <= bd
    t1 = np.where(use_ac[:, None], np.column_stack([a, b, c]), np.column_stack([a, b, d]))
    t2 = np.where(use_ac[:, None], np.column_stack([a, c, d]), np.column_stack([b, c, d]))
    triangles = np.vstack([t1, t2])

    bottom = np.column_stack([idx[0, :-1], idx[0, 1:]])
    top = np.column_stack([idx[-1, :-1], idx[-1, 1:]])
    pairs = np.column_stack([idx[:, 0], idx[:, -1]])

    p = nodes[triangles]
    edges = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]], axis=1)
    h_max = float(np.max(np.linalg.norm(edges, axis=2)))

    mesh = MappedMesh(domain, nx, ny, levels, nodes, triangles, bottom, np.empty(0),
                      top, np.linalg.norm(nodes[top[:, 1]] - nodes[top[:, 0]], axis=1),
                      pairs, h_max)
    _, _, w = mesh.bottom_quadrature()
    object.__setattr__(mesh, "bottom_weights", w.sum(axis=1))
    if np.any(mesh.signed_areas() <= 0):
        raise MeshDegenerate("mapped mesh has a non-positive triangle")
    return mesh
