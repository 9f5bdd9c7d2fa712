"""Matching decompositions of square joint PMFs.

Two extraction policies are provided. ``birkhoff_decompose`` is the classical
greedy min-weight extraction on a doubly stochastic matrix. The saturating
policy removes the *entire* mass sitting on each perfect matching it finds and
lumps whatever is left, once no perfect matching remains, into a single
non-matched component. ``lemma1_decompose`` chooses between them.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np

from .prob import SUPPORT_TOL, JointPmf, ValidationError, entropy
from .scaling import NonSquareError, sinkhorn_scale


class NotDoublyStochasticError(ValidationError):
    pass


class NoPerfectMatchingError(RuntimeError):
    pass


class NonMatchingComponentError(ValueError):
    """An operation that needs perfect-matching components got another kind."""


@dataclass(frozen=True)
class Matching:
    """``map[i]`` is the column matched to row ``i`` (or -1 if unmatched)."""

    map: tuple[int, ...]
    perfect: bool

    @property
    def cardinality(self) -> int:
        return sum(1 for j in self.map if j >= 0)

    def cells(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.map) if j >= 0]

    def as_matrix(self) -> np.ndarray:
        n = len(self.map)
        b = np.zeros((n, n))
        for i, j in self.cells():
            b[i, j] = 1.0
        return b


@dataclass(frozen=True, eq=False)
class MixtureComponent:
    weight: float
    pmf: JointPmf
    matching: Matching | None = None


@dataclass(frozen=True, eq=False)
class MixtureDecomposition:
    components: tuple[MixtureComponent, ...]
    helper_name: str = "K_M"

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        w = self.weights
        if np.any(w <= 0):
            raise ValidationError("mixture weights must be positive")
        if abs(w.sum() - 1) > 1e-10:
            raise ValidationError(f"mixture weights sum to {w.sum():.15g}, not 1")

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @property
    def all_perfect(self) -> bool:
        return all(c.matching is not None for c in self.components)

    def helper_entropy(self) -> float:
        return entropy(self.weights)

    def __len__(self) -> int:
        return len(self.components)


def max_bipartite_matching(support: np.ndarray) -> Matching:
    """Maximum-cardinality matching on the bipartite graph of a boolean mask.

    Rows are processed in ascending order. Each row is matched through a
    shortest augmenting path found by breadth-first search that scans columns
    in ascending order, so a free column adjacent to the row is always
    preferred over re-routing earlier rows.
    """
    mask = np.asarray(support, dtype=bool)
    n_rows, n_cols = mask.shape
    adj = [np.flatnonzero(mask[i]).tolist() for i in range(n_rows)]
    row_to_col = [-1] * n_rows
    col_to_row = [-1] * n_cols

    for root in range(n_rows):
        # BFS over alternating paths; parent maps column -> row reaching it
        parent = {}
        queue = deque([root])
        end_col = -1
        while queue and end_col < 0:
            r = queue.popleft()
            for c in adj[r]:
                if c in parent:
                    continue
                parent[c] = r
                if col_to_row[c] < 0:
                    end_col = c
                    break
                queue.append(col_to_row[c])
        c = end_col
        while c >= 0:
            r = parent[c]
            prev = row_to_col[r]
            row_to_col[r] = c
            col_to_row[c] = r
            c = prev

    card = sum(1 for c in row_to_col if c >= 0)
    return Matching(tuple(row_to_col), perfect=(card == n_rows == n_cols))


def birkhoff_decompose(W: np.ndarray, tol: float = 1e-10) -> list[tuple[float, Matching]]:
    """Greedy Birkhoff-von Neumann decomposition of a doubly stochastic matrix.

    Returns ``(weight, matching)`` pairs whose permutation matrices, weighted,
    sum to ``W`` up to a residual of total mass at most ``N * tol``.
    """
    W = np.asarray(W, dtype=float)
    n1, n2 = W.shape
    if n1 != n2:
        raise NonSquareError(f"need a square matrix, got {n1}x{n2}")
    n = n1
    if np.any(W < -tol) or np.abs(W.sum(axis=1) - 1).max() > tol \
            or np.abs(W.sum(axis=0) - 1).max() > tol:
        raise NotDoublyStochasticError("matrix is not doubly stochastic within tolerance")

    residual = np.where(W > SUPPORT_TOL, W, 0.0)
    cap = (n - 1) ** 2 + 1
    out: list[tuple[float, Matching]] = []
    while residual.sum() > n * tol:
        m = max_bipartite_matching(residual > SUPPORT_TOL)
        if not m.perfect:
            raise NoPerfectMatchingError(
                f"residual of mass {residual.sum():.3g} has no perfect matching")
        rows = np.arange(n)
        cols = np.array(m.map)
        q = residual[rows, cols].min()
        residual[rows, cols] -= q
        residual[residual <= SUPPORT_TOL] = 0.0
        out.append((float(q), m))
        if len(out) == cap + 1:
            warnings.warn(f"Birkhoff extraction exceeded the (N-1)^2+1 = {cap} component bound",
                          RuntimeWarning, stacklevel=2)
    return out


def _component(mass_matrix: np.ndarray, matching: Matching | None, P: JointPmf) -> MixtureComponent:
    total = mass_matrix.sum()
    pmf = JointPmf(mass_matrix / total, P.row_labels, P.col_labels)
    return MixtureComponent(weight=float(total), pmf=pmf, matching=matching)


def saturating_matching_decompose(P: JointPmf) -> MixtureDecomposition:
    if not P.is_square:
        raise NonSquareError(f"need a square joint PMF, got {P.shape}")
    residual = np.where(P.matrix > SUPPORT_TOL, P.matrix, 0.0)
    comps = []
    while residual.sum() > SUPPORT_TOL:
        m = max_bipartite_matching(residual > SUPPORT_TOL)
        if not m.perfect:
            comps.append(_component(residual.copy(), None, P))
            break
        extracted = np.zeros_like(residual)
        for i, j in m.cells():
            extracted[i, j] = residual[i, j]
            residual[i, j] = 0.0
        comps.append(_component(extracted, m, P))
    comps = [c for c in comps if c.weight >= 1e-12]
    # absorb rounding so the weights form a PMF
    scale = sum(c.weight for c in comps)
    comps = [MixtureComponent(c.weight / scale, c.pmf, c.matching) for c in comps]
    return MixtureDecomposition(tuple(comps))


def lemma1_decompose(P: JointPmf, tol: float = 1e-10, max_iter: int = 10_000) -> MixtureDecomposition:
    """Mixture of generalized permutation matrices via Sinkhorn + Birkhoff.

    Falls back to the saturating extraction when ``P`` has a zero entry or the
    scaling does not converge.
    """
    if not P.is_square:
        raise NonSquareError(f"need a square joint PMF, got {P.shape}")
    scaled = sinkhorn_scale(P, tol=tol, max_iter=max_iter)
    if not scaled.converged or np.any(P.matrix <= 0):
        return saturating_matching_decompose(P)

    n = P.shape[0]
    # W is only doubly stochastic to ``tol``; loosen the extraction threshold to match
    parts = birkhoff_decompose(scaled.w, tol=max(10 * tol, 1e-9))
    inv1 = 1.0 / scaled.d1
    inv2 = 1.0 / scaled.d2
    comps = []
    for q, m in parts:
        gen = np.zeros((n, n))
        for i, j in m.cells():
            gen[i, j] = inv1[i] * inv2[j]
        mass = gen.sum()
        comps.append((q * mass, gen / mass, m))
    total = sum(c[0] for c in comps)
    return MixtureDecomposition(tuple(
        MixtureComponent(w / total, JointPmf(g, P.row_labels, P.col_labels), m)
        for w, g, m in comps if w / total >= 1e-12
    ))


def reconstruct(d: MixtureDecomposition) -> JointPmf:
    c0 = d.components[0].pmf
    m = sum(c.weight * c.pmf.matrix for c in d.components)
    return JointPmf.normalized(m, c0.row_labels, c0.col_labels)
