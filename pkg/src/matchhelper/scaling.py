"""Sinkhorn-Knopp scaling of a square joint PMF to a doubly stochastic matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .prob import JointPmf, ValidationError


class NonSquareError(ValidationError):
    pass


class ZeroLineError(ValidationError):
    pass


@dataclass(frozen=True, eq=False)
class ScalingResult:
    """W = diag(d1) @ P @ diag(d2) together with convergence bookkeeping.

    ``residuals`` holds the residual after every iteration, so ``residual`` is
    ``residuals[-1]``.
    """

    d1: np.ndarray
    d2: np.ndarray
    w: np.ndarray
    iterations: int
    residual: float
    converged: bool
    residuals: tuple[float, ...] = ()


def _residual(w: np.ndarray) -> float:
    return float(max(np.abs(w.sum(axis=1) - 1).max(), np.abs(w.sum(axis=0) - 1).max()))


def sinkhorn_scale(P: JointPmf | np.ndarray, tol: float = 1e-10,
                   max_iter: int = 10_000) -> ScalingResult:
    """Alternate row and column normalization until every line sums to 1 +- tol.

    Non-convergence is reported through ``converged`` rather than raised;
    matrices with zeros need not have a doubly stochastic scaling.
    """
    m = P.matrix if isinstance(P, JointPmf) else np.asarray(P, dtype=float)
    n1, n2 = m.shape
    if n1 != n2:
        raise NonSquareError(f"Sinkhorn scaling needs a square matrix, got {n1}x{n2}")
    if np.any(m.sum(axis=1) <= 0) or np.any(m.sum(axis=0) <= 0):
        raise ZeroLineError("a row or column of the matrix is entirely zero")

    d1 = np.ones(n1)
    d2 = np.ones(n2)
    residuals = []
    w = m
    for it in range(1, max_iter + 1):
        d1 = 1.0 / (m @ d2)
        d2 = 1.0 / (m.T @ d1)
        w = d1[:, None] * m * d2[None, :]
        residuals.append(_residual(w))
        if residuals[-1] <= tol:
            break
    residual = residuals[-1]
    return ScalingResult(d1=d1, d2=d2, w=w, iterations=it, residual=residual,
                         converged=residual <= tol, residuals=tuple(residuals))
