"""Normalised period-cell quadrature with a panel-doubling convergence check."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import QuadratureNotConverged, ValidationError

TWO_PI = 2.0 * np.pi


class RuleKind(str, enum.Enum):
    GAUSS_LEGENDRE = "GaussLegendreComposite"
    TRAPEZOID = "Trapezoid"


@dataclass(frozen=True)
class QuadratureRule:
    kind: RuleKind = RuleKind.GAUSS_LEGENDRE
    panels: int = 64
    points_per_panel: int = 8

    def __post_init__(self):
        object.__setattr__(self, "kind", RuleKind(self.kind))
        if self.panels < 1:
            raise ValidationError("panels must be >= 1")
        if not 1 <= self.points_per_panel <= 16:
            raise ValidationError("points_per_panel must lie in 1..16")

    def refined(self) -> "QuadratureRule":
        return replace(self, panels=2 * self.panels)

    def nodes(self, period: float = TWO_PI):
        """Nodes on [0, period) and weights summing to 1."""
        if self.kind is RuleKind.TRAPEZOID:
            n = self.panels * self.points_per_panel
            t = np.arange(n) * (period / n)
            return t, np.full(n, 1.0 / n)
        x, w = np.polynomial.legendre.leggauss(self.points_per_panel)
        h = period / self.panels
        left = np.arange(self.panels)[:, None] * h
        t = (left + 0.5 * h * (x[None, :] + 1.0)).ravel()
        weights = np.tile(0.5 * w / self.panels, self.panels)
        return t, weights

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "panels": self.panels,
            "points_per_panel": self.points_per_panel,
        }

    @classmethod
    def from_dict(cls, data) -> "QuadratureRule":
        if data is None:
            return cls()
        try:
            return cls(
                RuleKind(data.get("kind", RuleKind.GAUSS_LEGENDRE.value)),
                int(data.get("panels", 64)),
                int(data.get("points_per_panel", 8)),
            )
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed quadrature rule: {exc}") from exc


DEFAULT_RULE = QuadratureRule()


@dataclass(frozen=True)
class Averaged:
    """A cell average together with its refinement diagnostic."""

    value: np.ndarray
    coarse: np.ndarray
    relative_change: float


def checked_average(evaluate, rule: QuadratureRule, tol: float = 1e-10,
                    max_doublings: int = 4) -> Averaged:
    """Average ``evaluate(rule) -> (values, weights)`` with panel doubling.

    ``values`` has the sample axis first.  Panels are doubled until two
    successive rules agree to ``tol``, at most ``max_doublings`` times.  The
    change is measured relative to the weighted mean of |values|, so that
    averages which vanish by symmetry do not trip the check.
    """
    coarse = _weighted_mean(*evaluate(rule))
    for _ in range(max_doublings):
        rule = rule.refined()
        values, weights = evaluate(rule)
        fine = _weighted_mean(values, weights)
        scale = np.max(_weighted_mean(np.abs(values), weights), initial=0.0)
        change = float(np.max(np.abs(fine - coarse), initial=0.0))
        rel = change / scale if scale > 0 else change
        if rel <= tol:
            return Averaged(fine, coarse, rel)
        coarse = fine
    raise QuadratureNotConverged(coarse, fine, tol)


def _weighted_mean(values, weights):
    values = np.asarray(values, dtype=float)
    return np.tensordot(weights, values, axes=(0, 0))
