"""Maximal couplings of two PMFs on a common alphabet."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomposition import MixtureDecomposition, NonMatchingComponentError
from .prob import JointPmf, Pmf, tv_distance

_EDGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MaximalCoupling:
    """X1' = X2' ~ t with probability 1 - delta, else X1' ~ v and X2' ~ w independently.

    ``t`` is None when delta == 1; ``v`` and ``w`` are None when delta == 0.
    """

    delta: float
    t: Pmf | None
    v: Pmf | None
    w: Pmf | None
    p1: Pmf
    p2: Pmf


def build_maximal_coupling(p1: Pmf, p2: Pmf) -> MaximalCoupling:
    a, b = p1.masses, p2.masses
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    delta = tv_distance(p1, p2)
    t = v = w = None
    if delta < 1 - _EDGE_TOL:
        t = Pmf.normalized(np.minimum(a, b))
    else:
        delta = 1.0
    if delta > _EDGE_TOL:
        v = Pmf.normalized(np.clip(a - b, 0, None))
        w = Pmf.normalized(np.clip(b - a, 0, None))
    else:
        delta = 0.0
    return MaximalCoupling(delta, t, v, w, p1, p2)


def coupling_joint(c: MaximalCoupling) -> JointPmf:
    """Joint PMF of (X1', X2'): diagonal mass 1 - delta, the rest v (x) w."""
    n = len(c.p1)
    m = np.zeros((n, n))
    if c.t is not None:
        m += (1 - c.delta) * np.diag(c.t.masses)
    if c.v is not None:
        m += c.delta * np.outer(c.v.masses, c.w.masses)
    return JointPmf(m)


def sample_coupling(c: MaximalCoupling, rng: np.random.Generator) -> tuple[int, int]:
    if c.v is None or (c.t is not None and rng.random() < 1 - c.delta):
        k = int(rng.choice(len(c.t), p=c.t.masses))
        return k, k
    return int(rng.choice(len(c.v), p=c.v.masses)), int(rng.choice(len(c.w), p=c.w.masses))


def _require_matchings(d: MixtureDecomposition) -> None:
    for k, comp in enumerate(d.components):
        if comp.matching is None:
            raise NonMatchingComponentError(f"component {k} is not a perfect matching")


def per_matching_deltas(P: JointPmf, d: MixtureDecomposition) -> list[float]:
    """P(pi_l(X1) != X2) under the full joint, for each matching pi_l."""
    _require_matchings(d)
    out = []
    for comp in d.components:
        rows = np.arange(P.shape[0])
        out.append(float(max(0.0, 1.0 - P.matrix[rows, list(comp.matching.map)].sum())))
    return out


def matched_marginals(P: JointPmf, matching) -> tuple[Pmf, Pmf]:
    """Distributions of pi(X1) and X2 under the full joint."""
    p1 = P.matrix.sum(axis=1)
    pushed = np.zeros(P.shape[1])
    for i, j in enumerate(matching.map):
        pushed[j] += p1[i]
    return Pmf.normalized(pushed), Pmf.normalized(P.matrix.sum(axis=0))


def per_matching_couplings(P: JointPmf, d: MixtureDecomposition) -> list[MaximalCoupling]:
    """One maximal coupling per matching, between pi_l(X1) and X2."""
    _require_matchings(d)
    return [build_maximal_coupling(*matched_marginals(P, c.matching)) for c in d.components]
