"""Periodic boundary profiles.

A profile is the 2*pi-periodic oscillation ``phi`` of the bottom wall, stored
as a finite Fourier series so that it is smooth, exactly periodic and
serialisable.  ``ScaledProfile`` gives the rugose wall ``eps * phi(x / eps)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import optimize

from .errors import NegativeProfile, ValidationError

TWO_PI = 2.0 * np.pi
NEGATIVITY_TOL = 1e-12


@dataclass(frozen=True)
class PeriodicProfile:
    """phi(t) = a0 + sum_k a_k cos(k t) + b_k sin(k t), k = 1..K."""

    a0: float = 0.0
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "cos_coeffs", tuple(float(c) for c in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(c) for c in self.sin_coeffs))
        coeffs = (self.a0,) + self.cos_coeffs + self.sin_coeffs
        if not all(np.isfinite(coeffs)):
            raise ValidationError("profile coefficients must be finite")

    @property
    def n_modes(self) -> int:
        return max(len(self.cos_coeffs), len(self.sin_coeffs))

    @property
    def is_flat(self) -> bool:
        return not any(self.cos_coeffs) and not any(self.sin_coeffs)

    @property
    def is_even(self) -> bool:
        return not any(self.sin_coeffs)

    def _padded(self):
        K = self.n_modes
        a = np.zeros(K)
        b = np.zeros(K)
        a[: len(self.cos_coeffs)] = self.cos_coeffs
        b[: len(self.sin_coeffs)] = self.sin_coeffs
        return a, b

    def __call__(self, t):
        return self.derivative(t, 0)

    def derivative(self, t, order: int = 0):
        """Evaluate the ``order``-th derivative (0, 1 or 2), vectorised over ``t``."""
        if order not in (0, 1, 2):
            raise ValidationError(f"derivative order must be 0, 1 or 2, got {order}")
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        # reduce first: k*t loses digits for large |t|
        t = np.mod(t, TWO_PI)
        out = np.full(t.shape, self.a0 if order == 0 else 0.0)
        a, b = self._padded()
        for k in range(1, self.n_modes + 1):
            ak, bk = a[k - 1], b[k - 1]
            if ak == 0.0 and bk == 0.0:
                continue
            kt = np.mod(k * t, TWO_PI)
            c, s = np.cos(kt), np.sin(kt)
            if order == 0:
                out = out + ak * c + bk * s
            elif order == 1:
                out = out + k * (-ak * s + bk * c)
            else:
                out = out - k * k * (ak * c + bk * s)
        return float(out) if scalar else out

    def sup_norm(self, n_samples: int = 4096) -> float:
        """max |phi| by dense sampling."""
        t = np.linspace(0.0, TWO_PI, n_samples, endpoint=False)
        return float(np.max(np.abs(self(t))))

    def deriv_sup_norm(self, n_samples: int = 4096) -> float:
        t = np.linspace(0.0, TWO_PI, n_samples, endpoint=False)
        return float(np.max(np.abs(self.derivative(t, 1))))

    def negated(self) -> "PeriodicProfile":
        return PeriodicProfile(
            -self.a0, tuple(-c for c in self.cos_coeffs), tuple(-s for s in self.sin_coeffs)
        )

    def shifted(self, delta: float) -> "PeriodicProfile":
        return PeriodicProfile(self.a0 + delta, self.cos_coeffs, self.sin_coeffs)

    # serialisation

    def to_dict(self) -> dict:
        return {"a0": self.a0, "cos": list(self.cos_coeffs), "sin": list(self.sin_coeffs)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "PeriodicProfile":
        if not isinstance(data, Mapping):
            raise ValidationError("profile must be a JSON object")
        if "name" in data:
            name = data["name"]
            if name == "flat":
                return flat()
            if name == "cos-bump":
                if "amplitude" not in data:
                    raise ValidationError("cos-bump profile needs an 'amplitude'")
                return cos_bump(data["amplitude"])
            raise ValidationError(f"unknown named profile {name!r}")
        unknown = set(data) - {"a0", "cos", "sin"}
        if unknown:
            raise ValidationError(f"unknown profile keys: {sorted(unknown)}")
        try:
            return cls(
                float(data.get("a0", 0.0)),
                tuple(float(c) for c in data.get("cos", ())),
                tuple(float(s) for s in data.get("sin", ())),
            )
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed profile: {exc}") from exc


def flat() -> PeriodicProfile:
    return PeriodicProfile()


def cos_bump(amplitude: float) -> PeriodicProfile:
    """amplitude * (1 + cos t): nonnegative, touches zero at t = pi."""
    return PeriodicProfile(amplitude, (amplitude,))


def eval_deriv(profile: PeriodicProfile, t, order: int):
    if order not in (1, 2):
        raise ValidationError(f"order must be 1 or 2, got {order}")
    return profile.derivative(t, order)


@dataclass(frozen=True)
class ValidationReport:
    min_value: float
    argmin: float
    valid: bool


def validate(profile: PeriodicProfile, n_samples: int = 1024) -> ValidationReport:
    """Check phi >= 0 by dense sampling plus golden-section refinement.

    Raises NegativeProfile when the minimum is below -1e-12.
    """
    if n_samples < 64:
        raise ValidationError("n_samples must be >= 64")
    # at least a few samples per oscillation of the highest mode
    n = max(n_samples, 16 * profile.n_modes)
    t = np.linspace(0.0, TWO_PI, n, endpoint=False)
    values = profile(t)
    i = int(np.argmin(values))
    t_min, v_min = float(t[i]), float(values[i])
    if not profile.is_flat:
        dt = TWO_PI / n
        a, b = t_min - dt, t_min + dt
        if profile(a) > v_min and profile(b) > v_min:
            res = optimize.minimize_scalar(
                profile, bracket=(a, t_min, b), method="golden", tol=1e-12
            )
            if res.fun < v_min:
                t_min, v_min = float(res.x), float(res.fun)
    t_min = float(np.mod(t_min, TWO_PI))
    if v_min < -NEGATIVITY_TOL:
        raise NegativeProfile(v_min, t_min)
    return ValidationReport(v_min, t_min, True)


def random_profile(rng: np.random.Generator, max_modes: int = 8, scale: float = 1.0,
                   margin: float = 0.0) -> PeriodicProfile:
    """Random trig polynomial shifted so that its minimum is ``margin`` (approximately).

    Coefficients of mode k are drawn with standard deviation scale / k.
    """
    K = int(rng.integers(1, max_modes + 1))
    k = np.arange(1, K + 1)
    a = rng.normal(size=K) * scale / k
    b = rng.normal(size=K) * scale / k
    shape = PeriodicProfile(0.0, tuple(a), tuple(b))
    t = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
    lowest = float(np.min(shape(t)))
    # dense sampling can miss the true minimum by O(dt^2 * phi''), add slack
    slack = (TWO_PI / 4096) ** 2 * float(np.sum(k * k * (np.abs(a) + np.abs(b))))
    return shape.shifted(margin - lowest + slack)


@dataclass(frozen=True)
class ScaledProfile:
    """phi_eps(x) = eps * phi(x / eps)."""

    base: PeriodicProfile
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValidationError(f"eps must be positive, got {self.eps}")

    def __call__(self, x):
        return self.eps * self.base(np.asarray(x, dtype=float) / self.eps)

    def derivative(self, x, order: int = 1):
        """d^order/dx^order of eps*phi(x/eps) = eps^(1-order) phi^(order)(x/eps)."""
        return self.eps ** (1 - order) * self.base.derivative(
            np.asarray(x, dtype=float) / self.eps, order
        )


def scaled_eval(sp: ScaledProfile, x):
    return sp(x)


def profile_from_spec(data) -> PeriodicProfile:
    """Accept a PeriodicProfile, a JSON-style dict or a (a0, cos, sin) triple."""
    if isinstance(data, PeriodicProfile):
        return data
    if isinstance(data, Mapping):
        return PeriodicProfile.from_dict(data)
    if isinstance(data, Sequence) and len(data) == 3:
        return PeriodicProfile(*data)
    raise ValidationError(f"cannot build a profile from {data!r}")
