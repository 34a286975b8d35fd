"""Homogenised surface energies as period-cell averages.

For a periodic graph boundary the Young measure generated by the
pseudo-gradient is the pushforward of the normalised uniform measure on the
period cell, so every homogenised coefficient is a cell average of some
function of the pseudo-gradient ``v`` weighted by the surface element ``|v|``.

Samplers produce the pseudo-gradient at quadrature nodes.  Frames are flat:
in 2D ``nu = (0, -1)`` and ``tau = (1, 0)``; in 3D ``nu = (0, 0, -1)``,
``tau1 = (1, 0, 0)`` and ``tau2 = (0, 1, 0)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateEigensolve, ValidationError
from .profile import PeriodicProfile, validate
from .quadrature import DEFAULT_RULE, QuadratureRule, checked_average
from .tensors import QTensor2, QTensor3

NORMAL_2D = np.array([0.0, -1.0])
TANGENT_2D = np.array([1.0, 0.0])
NORMAL_3D = np.array([0.0, 0.0, -1.0])
TANGENTS_3D = (np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))


@dataclass(frozen=True)
class PseudoGradientSample:
    v: np.ndarray
    weight: float


class Combine(str, enum.Enum):
    SUM = "Sum"
    PRODUCT = "Product"


class GraphSampler1D:
    """Pseudo-gradient of a 1D periodic graph, embedded in R^2 or R^3.

    With ``orientation=+1`` the wall is displaced along the outward normal and
    ``v = nu - phi' tau``.  The slab model raises the wall *into* the domain
    (opposite to the outward normal), which is ``orientation=-1`` and gives
    ``v = (phi', -1) = gamma_eps * nu_eps``.
    """

    def __init__(self, profile: PeriodicProfile, dim: int = 2, orientation: int = 1):
        if dim not in (2, 3):
            raise ValidationError("dim must be 2 or 3")
        if orientation not in (1, -1):
            raise ValidationError("orientation must be +1 or -1")
        self.profile = profile
        self.dim = dim
        self.orientation = orientation

    def vectors(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        dphi = self.orientation * self.profile.derivative(t, 1)
        if self.dim == 2:
            nu, tau = NORMAL_2D, TANGENT_2D
        else:
            nu, tau = NORMAL_3D, TANGENTS_3D[0]
        return nu[None, :] - dphi[:, None] * tau[None, :]

    def points(self, rule: QuadratureRule):
        t, w = rule.nodes()
        return self.vectors(t), w


class GraphSampler2D:
    """Pseudo-gradient of a doubly periodic graph psi(t1, t2) in R^3.

    psi is the sum or the product of two 1D profiles.
    """

    dim = 3

    def __init__(self, profile_u: PeriodicProfile, profile_v: PeriodicProfile,
                 combine: Combine = Combine.SUM, orientation: int = 1):
        self.profile_u = profile_u
        self.profile_v = profile_v
        self.combine = Combine(combine)
        self.orientation = orientation

    def psi(self, t1, t2):
        u, v = self.profile_u(t1), self.profile_v(t2)
        return u + v if self.combine is Combine.SUM else u * v

    def gradient(self, t1, t2):
        du = self.profile_u.derivative(t1, 1)
        dv = self.profile_v.derivative(t2, 1)
        if self.combine is Combine.SUM:
            return du + 0.0 * dv, dv + 0.0 * du
        return du * self.profile_v(t2), self.profile_u(t1) * dv

    def vectors(self, t1, t2) -> np.ndarray:
        t1 = np.atleast_1d(np.asarray(t1, dtype=float))
        t2 = np.atleast_1d(np.asarray(t2, dtype=float))
        d1, d2 = self.gradient(t1, t2)
        d1, d2 = self.orientation * d1, self.orientation * d2
        return (NORMAL_3D[None, :] - d1[:, None] * TANGENTS_3D[0][None, :]
                - d2[:, None] * TANGENTS_3D[1][None, :])

    def points(self, rule: QuadratureRule):
        t, w = rule.nodes()
        # the factors are 1D: evaluate them on the nodes and broadcast
        u, du = self.profile_u(t), self.profile_u.derivative(t, 1)
        v, dv = self.profile_v(t), self.profile_v.derivative(t, 1)
        if self.combine is Combine.SUM:
            d1, d2 = np.broadcast_to(du[:, None], (len(t), len(t))), np.broadcast_to(dv, (len(t), len(t)))
        else:
            d1, d2 = np.outer(du, v), np.outer(u, dv)
        V = np.empty((len(t) * len(t), 3))
        V[:, 0] = -self.orientation * d1.ravel()
        V[:, 1] = -self.orientation * d2.ravel()
        V[:, 2] = NORMAL_3D[2]
        return V, np.outer(w, w).ravel()

    def validate(self, n_samples: int = 256):
        """Nonnegativity of the combined profile (dense tensor sampling)."""
        t = np.linspace(0.0, 2 * np.pi, n_samples, endpoint=False)
        T1, T2 = np.meshgrid(t, t, indexing="ij")
        return float(np.min(self.psi(T1, T2)))


def slab_sampler(profile: PeriodicProfile) -> GraphSampler1D:
    """Sampler whose normals v/|v| are the outward normals of the slab's bottom wall."""
    return GraphSampler1D(profile, dim=2, orientation=-1)


def pseudo_gradient_1d(profile: PeriodicProfile, t: float) -> PseudoGradientSample:
    v = GraphSampler1D(profile, 2).vectors(t)[0]
    return PseudoGradientSample(v, float(np.linalg.norm(v)))


def pseudo_gradient_2d(profile_u: PeriodicProfile, profile_v: PeriodicProfile,
                       combine: Combine, t1: float, t2: float) -> PseudoGradientSample:
    v = GraphSampler2D(profile_u, profile_v, combine).vectors(t1, t2)[0]
    return PseudoGradientSample(v, float(np.linalg.norm(v)))


def _cell_average(sampler, integrand, rule, tol=1e-10):
    def evaluate(r):
        V, w = sampler.points(r)
        size = np.linalg.norm(V, axis=1)
        return integrand(V / size[:, None], size), w

    return checked_average(evaluate, rule, tol)


_UPPER = np.triu_indices(3)


def _moments(sampler, rule):
    """Cell averages of |v| and of the six entries of (v (x) v) / |v| = (n (x) n)|v|."""

    def integrand(n, size):
        out = np.empty((len(size), 7))
        out[:, 0] = size
        for k, (i, j) in enumerate(zip(*_UPPER)):
            out[:, k + 1] = n[:, i] * n[:, j] * size
        return out

    avg = np.asarray(_cell_average(sampler, integrand, rule).value)
    M = np.zeros((3, 3))
    M[_UPPER] = avg[1:]
    M = M + np.triu(M, 1).T
    return float(avg[0]), M


def homogenize_energy(sampler, w: Callable, u, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Cell average of ``w(n, u) * |v|`` with ``n = v / |v|``.

    ``w`` is called with the stacked unit normals (shape ``(M, N)``) and the
    state ``u`` and must return ``M`` values.
    """
    avg = _cell_average(sampler, lambda n, size: np.asarray(w(n, u), dtype=float) * size, rule)
    return float(avg.value)


def homogenize_polynomial(sampler, coeff_maps: Sequence[Callable],
                          rule: QuadratureRule = DEFAULT_RULE) -> list:
    """Average each coefficient map ``a_i(n)`` (returning shape ``(M, d, ..., d)``)."""
    out = []
    for a in coeff_maps:
        def integrand(n, size, a=a):
            vals = np.asarray(a(n), dtype=float)
            return vals * size.reshape((-1,) + (1,) * (vals.ndim - 1))

        out.append(np.asarray(_cell_average(sampler, integrand, rule).value))
    return out


def polynomial_energy(coefficients: Sequence[np.ndarray], u) -> float:
    """sum_i A_i[u, ..., u]; the i-th entry is an i-linear array."""
    u = np.asarray(u, dtype=float).ravel()
    total = 0.0
    for A in coefficients:
        A = np.asarray(A, dtype=float)
        for _ in range(A.ndim):
            A = A @ u
        total += float(A)
    return total


# slab (two-dimensional) coefficients


@dataclass(frozen=True)
class SlabEffective:
    gamma: float
    G1: float
    G2: float
    w_ef: float
    Q_ef: QTensor2
    w0_input: float
    quadrature_change: float = 0.0

    def remainder(self) -> float:
        """Q-independent part R of the homogenised Landau-de Gennes density.

        The cell average of (w0/2)|Q - Q0|^2 |v| equals (w_ef/2)|Q - Q_ef|^2 + R;
        since |Q0|^2 = 1/2 pointwise, R = w0*gamma/4 - (w_ef/2)|Q_ef|^2.
        """
        return self.w0_input * self.gamma / 4.0 - 0.5 * self.w_ef * self.Q_ef.norm() ** 2

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "G1": self.G1,
            "G2": self.G2,
            "w_ef": self.w_ef,
            "Q_ef": self.Q_ef.to_dict(),
            "w0": self.w0_input,
            "remainder": self.remainder(),
            "quadrature_relative_change": self.quadrature_change,
        }


def g_functions(profile: PeriodicProfile, t):
    """g1, g2 and gamma_eps at cell coordinate t."""
    d = profile.derivative(t, 1)
    d2 = d * d
    return (d2 - 1.0) / (2.0 * (1.0 + d2)), -d / (1.0 + d2), np.sqrt(1.0 + d2)


def slab_effective(profile: PeriodicProfile, w0: float,
                   rule: QuadratureRule = DEFAULT_RULE, tol: float = 1e-10) -> SlabEffective:
    """gamma, G1, G2, w_ef = gamma*w0 and Q_ef = [[G1, G2], [G2, -G1]] / gamma."""
    if w0 == 0:
        raise ValidationError("w0 must be nonzero")
    validate(profile)

    def evaluate(r):
        t, w = r.nodes()
        g1, g2, gam = g_functions(profile, t)
        return np.stack([gam, g1 * gam, g2 * gam], axis=1), w

    if profile.is_flat:
        # phi' == 0: every integrand is constant
        gamma, G1, G2, change = 1.0, -0.5, 0.0, 0.0
    else:
        avg = checked_average(evaluate, rule, tol)
        gamma, G1, G2 = (float(x) for x in avg.value)
        change = avg.relative_change
    Q_ef = QTensor2(G1 / gamma, G2 / gamma)
    return SlabEffective(gamma, G1, G2, gamma * w0, Q_ef, float(w0), change)


# Oseen-Frank


class Regime(str, enum.Enum):
    DEGENERATE_PLANAR = "DegeneratePlanar"
    SIMPLE_AXIS = "SimpleAxis"
    NO_ANCHORING = "NoAnchoring"
    FULLY_BIAXIAL = "FullyBiaxial"


@dataclass(frozen=True)
class EffectiveAnchoringOF:
    A_ef: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, matching ascending eigenvalues
    regime: Regime
    w0_input: float

    @property
    def traceless(self) -> np.ndarray:
        return self.A_ef - np.trace(self.A_ef) / 3.0 * np.eye(3)

    def energy(self, n) -> float:
        """Homogenised Rapini-Papoular density (1/2) A_ef n . n."""
        n = np.asarray(n, dtype=float)
        return 0.5 * float(n @ self.A_ef @ n)

    def to_dict(self) -> dict:
        return {
            "A_ef": self.A_ef.tolist(),
            "A_ef_traceless": self.traceless.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.T.tolist(),
            "regime": self.regime.value,
            "w0": self.w0_input,
        }


def classify_regime(eigenvalues, scale: float, tie_tol: float = 1e-9) -> Regime:
    """Anchoring regime from ascending eigenvalues; ties within tie_tol*max(1, |scale|)."""
    l1, l2, l3 = eigenvalues
    tol = tie_tol * max(1.0, abs(scale))
    low_tie = abs(l2 - l1) <= tol
    high_tie = abs(l3 - l2) <= tol
    if low_tie and high_tie:
        return Regime.NO_ANCHORING
    if low_tie:
        return Regime.DEGENERATE_PLANAR
    if high_tie:
        return Regime.SIMPLE_AXIS
    return Regime.FULLY_BIAXIAL


def oseen_frank_effective(sampler, w0: float, rule: QuadratureRule = DEFAULT_RULE,
                          tie_tol: float = 1e-9) -> EffectiveAnchoringOF:
    """A_ef = w0 * <v (x) v / |v|> for the Rapini-Papoular energy (w0/2)(n . nu)^2."""
    if w0 == 0:
        raise ValidationError("w0 must be nonzero")
    if sampler.dim != 3:
        raise ValidationError("Oseen-Frank homogenisation needs a 3D sampler")
    _, M = _moments(sampler, rule)
    A = w0 * M
    try:
        lam, vecs = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise DegenerateEigensolve(str(exc)) from exc
    if not np.all(np.isfinite(lam)):
        raise DegenerateEigensolve("non-finite eigenvalues")
    return EffectiveAnchoringOF(A, lam, vecs, classify_regime(lam, np.trace(A), tie_tol), float(w0))


# Landau-de Gennes (three-dimensional)


@dataclass(frozen=True)
class LdGEffective3D:
    w_ef: float
    Q_ef: QTensor3
    s0_input: float
    w0_input: float

    def jensen_violations(self, tol: float = 1e-10) -> list:
        """Names of the violated bounds lambda_max <= 2 s0/3, lambda_min >= -s0/3, |Q| <= s0 sqrt(2/3)."""
        s0 = self.s0_input
        lam = self.Q_ef.eigenvalues()
        bad = []
        if s0 > 0:
            if lam[-1] > 2 * s0 / 3 + tol:
                bad.append("lambda_max")
            if lam[0] < -s0 / 3 - tol:
                bad.append("lambda_min")
        if self.Q_ef.norm() > abs(s0) * np.sqrt(2.0 / 3.0) + tol:
            bad.append("norm")
        if self.w_ef < self.w0_input - tol * max(1.0, abs(self.w0_input)):
            bad.append("w_ef")
        return bad

    def remainder(self) -> float:
        """Q-independent part of the homogenised density: w_ef s0^2/3 - (w_ef/2)|Q_ef|^2."""
        return self.w_ef * self.s0_input**2 / 3.0 - 0.5 * self.w_ef * self.Q_ef.norm() ** 2

    def to_dict(self) -> dict:
        return {
            "w_ef": self.w_ef,
            "Q_ef": self.Q_ef.as_matrix().tolist(),
            "Q_ef_eigenvalues": self.Q_ef.eigenvalues().tolist(),
            "s0": self.s0_input,
            "w0": self.w0_input,
            "remainder": self.remainder(),
        }


def ldg_effective(sampler, w0: float, s0: float,
                  rule: QuadratureRule = DEFAULT_RULE) -> LdGEffective3D:
    """w_ef = w0 <|v|>, Q_ef = s0 <(n (x) n - I/3)|v|> / <|v|>."""
    if not w0 > 0:
        raise ValidationError("w0 must be positive")
    if sampler.dim != 3:
        raise ValidationError("Landau-de Gennes homogenisation needs a 3D sampler")
    mean_size, M = _moments(sampler, rule)
    M = M - mean_size * np.eye(3) / 3.0
    return LdGEffective3D(w0 * mean_size, QTensor3.from_matrix(s0 * M / mean_size), float(s0), float(w0))


# densities used in checks and the CLI


def rapini_papoular(w0: float):
    """(w0/2)(n . nu)^2 as a vectorised density w(normals, director)."""
    return lambda normals, n: 0.5 * w0 * (normals @ np.asarray(n, dtype=float)) ** 2


def ldg_density(w0: float, s0: float = 1.0):
    """(w0/2)|Q - s0 (nu (x) nu - I/d)|^2 with d the embedding dimension."""

    def w(normals, Q):
        Q = np.asarray(Q, dtype=float)
        d = normals.shape[1]
        P = s0 * (normals[:, :, None] * normals[:, None, :] - np.eye(d) / d)
        diff = Q[None, :, :] - P
        return 0.5 * w0 * np.einsum("mij,mij->m", diff, diff)

    return w
