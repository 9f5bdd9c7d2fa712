"""Finite probability primitives: PMFs, joint PMFs, function tables, entropies."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

SUM_TOL = 1e-12
# Cells at or below this mass are treated as outside the support.
SUPPORT_TOL = 1e-12

# Marker for a function-table entry on a zero-probability cell.
DONT_CARE = None


class ValidationError(ValueError):
    """An input violates a documented invariant."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function on a finite, ordered alphabet."""

    masses: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        masses = _frozen(self.masses)
        if masses.ndim != 1 or masses.size == 0:
            raise ValidationError("a Pmf needs a non-empty 1-d mass vector")
        if not np.all(np.isfinite(masses)) or np.any(masses < 0):
            raise ValidationError("every mass must be >= 0")
        if abs(masses.sum() - 1.0) > SUM_TOL:
            raise ValidationError(f"masses sum to 1 (got {masses.sum():.15g})")
        if self.labels is not None:
            if len(self.labels) != masses.size:
                raise ValidationError("labels and masses differ in length")
            object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "masses", masses)

    def __len__(self) -> int:
        return self.masses.size

    @classmethod
    def uniform(cls, n: int) -> "Pmf":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def normalized(cls, weights, labels=None) -> "Pmf":
        """Build a Pmf from nonnegative weights with positive total."""
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum(), labels)

    def label_of(self, k: int) -> Hashable:
        return k if self.labels is None else self.labels[k]


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Joint PMF of (X1, X2) as an N1 x N2 matrix; rows index X1."""

    matrix: np.ndarray
    row_labels: tuple | None = None
    col_labels: tuple | None = None

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ValidationError("a JointPmf needs a 2-d matrix with N1, N2 >= 1")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise ValidationError("all entries must be >= 0")
        if abs(m.sum() - 1.0) > SUM_TOL:
            raise ValidationError(f"entries sum to 1 (got {m.sum():.15g})")
        for name, labels, n in (("row", self.row_labels, m.shape[0]),
                                ("column", self.col_labels, m.shape[1])):
            if labels is not None and len(labels) != n:
                raise ValidationError(f"{name} labels do not match the matrix shape")
        if self.row_labels is not None:
            object.__setattr__(self, "row_labels", tuple(self.row_labels))
        if self.col_labels is not None:
            object.__setattr__(self, "col_labels", tuple(self.col_labels))
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def is_square(self) -> bool:
        return self.matrix.shape[0] == self.matrix.shape[1]

    def support(self) -> np.ndarray:
        return self.matrix > SUPPORT_TOL

    @classmethod
    def normalized(cls, weights, row_labels=None, col_labels=None) -> "JointPmf":
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum(), row_labels, col_labels)


@dataclass(frozen=True)
class FunctionTable:
    """Outcome labels f(x1, x2); ``DONT_CARE`` (None) marks undefined cells."""

    outcomes: tuple = field()

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.outcomes)
        if not rows or len({len(r) for r in rows}) != 1 or not rows[0]:
            raise ValidationError("function table must be a non-empty rectangle")
        object.__setattr__(self, "outcomes", rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.outcomes), len(self.outcomes[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.outcomes[i][j]

    @classmethod
    def from_callable(cls, n1: int, n2: int, fn) -> "FunctionTable":
        return cls(tuple(tuple(fn(i, j) for j in range(n2)) for i in range(n1)))


def check_pairing(P: JointPmf, F: FunctionTable) -> None:
    """Raise if F cannot be evaluated on the support of P."""
    if P.shape != F.shape:
        raise ValidationError(f"function table shape {F.shape} != joint PMF shape {P.shape}")
    for i, j in zip(*np.nonzero(P.matrix > 0)):
        if F[i, j] is DONT_CARE:
            raise ValidationError(
                f"DontCare at cell ({i}, {j}) which has positive probability {P.matrix[i, j]:.6g}"
            )


def _entropy_bits(masses: np.ndarray) -> float:
    p = masses[masses > 0]
    # + 0.0 turns a signed zero into 0.0
    return float(-(p * np.log2(p)).sum()) + 0.0 if p.size else 0.0


def entropy(p: Pmf | Sequence[float] | np.ndarray) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    masses = p.masses if isinstance(p, Pmf) else Pmf(np.asarray(p, dtype=float)).masses
    return max(_entropy_bits(masses), 0.0)


def binary_entropy(d: float) -> float:
    if d < -SUM_TOL or d > 1 + SUM_TOL:
        raise ValueError(f"binary entropy is defined on [0, 1], got {d}")
    d = min(max(d, 0.0), 1.0)
    return _entropy_bits(np.array([d, 1.0 - d]))


def marginals(P: JointPmf) -> tuple[Pmf, Pmf]:
    m = P.matrix
    return (Pmf.normalized(m.sum(axis=1), P.row_labels),
            Pmf.normalized(m.sum(axis=0), P.col_labels))


def joint_entropy(P: JointPmf) -> float:
    return _entropy_bits(P.matrix.ravel())


def conditional_entropy(P: JointPmf, given: int = 1) -> float:
    """H(X2 | X1) when ``given == 1``, H(X1 | X2) when ``given == 2``."""
    if given not in (1, 2):
        raise ValueError("given must be 1 or 2")
    m = P.matrix if given == 1 else P.matrix.T
    total = 0.0
    for row in m:
        mass = row.sum()
        if mass > 0:
            total += mass * _entropy_bits(row / mass)
    return total


def tv_distance(p1: Pmf | np.ndarray, p2: Pmf | np.ndarray) -> float:
    a = p1.masses if isinstance(p1, Pmf) else np.asarray(p1, dtype=float)
    b = p2.masses if isinstance(p2, Pmf) else np.asarray(p2, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return 0.5 * float(np.abs(a - b).sum())


def pushforward(P: JointPmf, F: FunctionTable) -> Pmf:
    """Distribution of f(X1, X2).

    Outcome labels are ordered by first appearance in a row-major scan of the
    table; labels that only sit on zero-probability cells keep mass 0.
    """
    check_pairing(P, F)
    masses: dict = {}
    n1, n2 = P.shape
    for i in range(n1):
        for j in range(n2):
            v = F[i, j]
            if v is DONT_CARE:
                continue
            masses[v] = masses.get(v, 0.0) + P.matrix[i, j]
    labels = tuple(masses)
    return Pmf.normalized(np.array([masses[v] for v in labels]), labels)
