"""Closed-form solution of the homogenised slab problem.

The limit problem has x-independent data, so Q_0(y) = c1 e^{y sqrt(c)} +
c2 e^{-y sqrt(c)} with tensor coefficients fixed by the two Robin conditions

    c1 (w_ef/2 - sqrt c)          + c2 (w_ef/2 + sqrt c)          = (w_ef/2) Q_ef
    c1 e^{R sqrt c}(w0/2 + sqrt c) + c2 e^{-R sqrt c}(w0/2 - sqrt c) = (w0/2) Q_R
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NearSingularSystem, ValidationError
from .tensors import TOP_ANCHORING, QTensor2


@dataclass(frozen=True)
class LimitSolution:
    c1: QTensor2
    c2: QTensor2
    c: float
    w_ef: float
    w0: float
    R: float
    Q_ef: QTensor2
    Q_R: QTensor2

    def components(self, y, derivative: int = 0) -> np.ndarray:
        """(q1, q2) of the ``derivative``-th y-derivative, shape (..., 2)."""
        y = np.asarray(y, dtype=float)
        k = np.sqrt(self.c)
        up = k**derivative * np.exp(k * y)
        down = (-k) ** derivative * np.exp(-k * y)
        return (up[..., None] * self.c1.as_array() + down[..., None] * self.c2.as_array())

    def to_dict(self) -> dict:
        return {
            "c1": self.c1.to_dict(),
            "c2": self.c2.to_dict(),
            "c": self.c,
            "w_ef": self.w_ef,
            "w0": self.w0,
            "R": self.R,
            "Q_ef": self.Q_ef.to_dict(),
            "Q_R": self.Q_R.to_dict(),
        }


def _coefficient_matrix(c, w_ef, w0, R):
    k = np.sqrt(c)
    return np.array(
        [
            [0.5 * w_ef - k, 0.5 * w_ef + k],
            [np.exp(R * k) * (0.5 * w0 + k), np.exp(-R * k) * (0.5 * w0 - k)],
        ]
    )


def solve_limit(c: float, w_ef: float, w0: float, R: float, Q_ef: QTensor2,
                Q_R: QTensor2 = TOP_ANCHORING) -> LimitSolution:
    if not c > 0:
        raise ValidationError("c must be positive")
    if not R > 0:
        raise ValidationError("R must be positive")
    (a, b), (d, e) = _coefficient_matrix(c, w_ef, w0, R)
    det = a * e - b * d
    scale = max(abs(a * e), abs(b * d))
    if abs(det) < 1e-12 * scale or scale == 0:
        raise NearSingularSystem(f"limit system determinant {det:.3e} (scale {scale:.3e})")
    f = 0.5 * w_ef * Q_ef.as_array()
    g = 0.5 * w0 * Q_R.as_array()
    # Cramer, componentwise
    c1 = (f * e - b * g) / det
    c2 = (a * g - d * f) / det
    return LimitSolution(QTensor2(*c1), QTensor2(*c2), float(c), float(w_ef), float(w0),
                         float(R), Q_ef, Q_R)


def eval_limit(sol: LimitSolution, y: float) -> QTensor2:
    if y < -1e-12 or y > sol.R + 1e-12:
        raise ValidationError("y must lie in [0, R]")
    return QTensor2(*sol.components(y))


@dataclass(frozen=True)
class Residuals:
    pde: float
    bottom_robin: float
    top_robin: float

    def max(self) -> float:
        return max(self.pde, self.bottom_robin, self.top_robin)

    def to_dict(self) -> dict:
        return {"pde": self.pde, "bottom_robin": self.bottom_robin, "top_robin": self.top_robin}


def residual_check(sol: LimitSolution, n_samples: int = 33, relative: bool = True) -> Residuals:
    """PDE and boundary residuals from analytic derivatives.

    With ``relative`` each residual is divided by the size of the terms it
    balances, so the result is a relative error.
    """
    if n_samples < 3:
        raise ValidationError("n_samples must be >= 3")
    y = np.linspace(0.0, sol.R, n_samples)
    q = sol.components(y)
    q2 = sol.components(y, 2)
    pde = np.abs(-q2 + sol.c * q)
    pde_scale = np.abs(q2) + sol.c * np.abs(q)

    # d/dnu = -d/dy at y = 0 and +d/dy at y = R
    q0, dq0 = sol.components(0.0), sol.components(0.0, 1)
    bottom_terms = (-dq0, 0.5 * sol.w_ef * q0, -0.5 * sol.w_ef * sol.Q_ef.as_array())
    qR, dqR = sol.components(sol.R), sol.components(sol.R, 1)
    top_terms = (dqR, 0.5 * sol.w0 * qR, -0.5 * sol.w0 * sol.Q_R.as_array())

    def reduce(terms):
        res = np.abs(sum(terms))
        if not relative:
            return float(np.max(res))
        scale = np.max(sum(np.abs(t) for t in terms))
        return float(np.max(res) / scale) if scale > 0 else float(np.max(res))

    pde_res = float(np.max(pde))
    if relative:
        s = float(np.max(pde_scale))
        pde_res = pde_res / s if s > 0 else pde_res
    return Residuals(pde_res, reduce(bottom_terms), reduce(top_terms))
