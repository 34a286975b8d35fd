"""Traceless symmetric order-parameter tensors in two and three dimensions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class QTensor2:
    """Q = [[q1, q2], [q2, -q1]]."""

    q1: float = 0.0
    q2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q1", float(self.q1))
        object.__setattr__(self, "q2", float(self.q2))

    @classmethod
    def from_matrix(cls, m) -> "QTensor2":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValidationError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(0.5 * (m[0, 0] - m[1, 1]), 0.5 * (m[0, 1] + m[1, 0]))

    @classmethod
    def uniaxial(cls, direction) -> "QTensor2":
        """n (x) n - I/2 for a unit vector n."""
        n = np.asarray(direction, dtype=float)
        n = n / np.linalg.norm(n)
        return cls.from_matrix(np.outer(n, n) - 0.5 * np.eye(2))

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.q1, self.q2], [self.q2, -self.q1]])

    def as_array(self) -> np.ndarray:
        return np.array([self.q1, self.q2])

    def norm(self) -> float:
        """Frobenius norm, sqrt(2 (q1^2 + q2^2))."""
        return float(np.sqrt(2.0 * (self.q1**2 + self.q2**2)))

    def __add__(self, other: "QTensor2") -> "QTensor2":
        return QTensor2(self.q1 + other.q1, self.q2 + other.q2)

    def __sub__(self, other: "QTensor2") -> "QTensor2":
        return QTensor2(self.q1 - other.q1, self.q2 - other.q2)

    def __mul__(self, s: float) -> "QTensor2":
        return QTensor2(s * self.q1, s * self.q2)

    __rmul__ = __mul__

    def to_dict(self) -> dict:
        return {"q1": self.q1, "q2": self.q2}

    @classmethod
    def from_dict(cls, data) -> "QTensor2":
        if isinstance(data, dict):
            return cls(float(data["q1"]), float(data["q2"]))
        return cls.from_matrix(data)


# Q_R for the top wall y = R, outward normal (0, 1)
TOP_ANCHORING = QTensor2(-0.5, 0.0)


@dataclass(frozen=True)
class QTensor3:
    """Symmetric traceless 3x3 tensor stored by (q11, q12, q13, q22, q23)."""

    q11: float = 0.0
    q12: float = 0.0
    q13: float = 0.0
    q22: float = 0.0
    q23: float = 0.0

    @classmethod
    def from_matrix(cls, m) -> "QTensor3":
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValidationError(f"expected a 3x3 matrix, got shape {m.shape}")
        m = 0.5 * (m + m.T)
        m = m - np.trace(m) / 3.0 * np.eye(3)
        return cls(m[0, 0], m[0, 1], m[0, 2], m[1, 1], m[1, 2])

    def as_matrix(self) -> np.ndarray:
        q33 = -self.q11 - self.q22
        return np.array(
            [
                [self.q11, self.q12, self.q13],
                [self.q12, self.q22, self.q23],
                [self.q13, self.q23, q33],
            ]
        )

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_matrix()))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.as_matrix())

    def trace(self) -> float:
        return float(np.trace(self.as_matrix()))

    def to_dict(self) -> dict:
        return {"matrix": self.as_matrix().tolist()}
