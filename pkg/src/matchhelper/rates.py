"""Achievable-rate expressions for helper-aided function computation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chargraph import (build_char_graph, coloring_decoder,
                        conditional_rate_given_matchings, min_entropy_coloring)
from .coupling import MaximalCoupling, per_matching_couplings, per_matching_deltas
from .decomposition import MixtureDecomposition
from .prob import (SUPPORT_TOL, FunctionTable, JointPmf, Pmf, binary_entropy,
                   check_pairing, entropy, joint_entropy, pushforward)


@dataclass(frozen=True)
class RateReport:
    """Rates in bits per source symbol. ``sum_rate`` = helper + both sources."""

    helper_rate: float
    source_rates: tuple[float, float]
    sum_rate: float
    baselines: dict = field(default_factory=dict)
    scheme: str = ""
    notes: tuple[str, ...] = ()
    decodable: bool = True


def _report(helper: float, r1: float, r2: float, scheme: str, baselines=None,
            notes=(), decodable: bool = True) -> RateReport:
    return RateReport(helper_rate=helper, source_rates=(r1, r2), sum_rate=helper + r1 + r2,
                      baselines=dict(baselines or {}), scheme=scheme, notes=tuple(notes),
                      decodable=decodable)


def theorem1_rates(d: MixtureDecomposition, F: FunctionTable) -> RateReport:
    """Helper sends the matching index; only source one transmits."""
    return _report(d.helper_entropy(), conditional_rate_given_matchings(d, F), 0.0,
                   "matching")


def component_coloring_rates(comp_pmf: JointPmf, F: FunctionTable) -> tuple[float, float, bool]:
    """Min-entropy coloring bits of both sources' characteristic graphs on one
    component, and whether that coloring pair determines f on its support."""
    col1, bits1 = min_entropy_coloring(build_char_graph(comp_pmf, F, 1))
    col2, bits2 = min_entropy_coloring(build_char_graph(comp_pmf, F, 2))
    return bits1, bits2, coloring_decoder(comp_pmf, F, col1, col2) is not None


def helper_scheme_rates(d: MixtureDecomposition, P: JointPmf, F: FunctionTable) -> RateReport:
    """Matched components are served by source one alone; in each non-matched
    component both sources send a coloring of their conditional graph."""
    check_pairing(P, F)
    r1 = r2 = 0.0
    notes = []
    for k, comp in enumerate(d.components):
        if comp.matching is not None:
            r1 += comp.weight * entropy(pushforward(comp.pmf, F))
        else:
            c1, c2, ok = component_coloring_rates(comp.pmf, F)
            r1 += comp.weight * c1
            r2 += comp.weight * c2
            if not ok:
                notes.append(f"component {k}: the two colorings do not determine f; "
                             "the rate is not achieved by separate coloring")
    return _report(d.helper_entropy(), r1, r2, "helper", baselines(P, F), notes,
                   decodable=not notes)


def theorem2_sum_rate(weights, couplings: list[MaximalCoupling]) -> float:
    q = weights.masses if isinstance(weights, Pmf) else np.asarray(weights, dtype=float)
    if len(q) != len(couplings):
        raise ValueError(f"{len(q)} weights but {len(couplings)} couplings")
    total = entropy(q)
    for ql, c in zip(q, couplings):
        term = binary_entropy(c.delta)
        if c.t is not None:
            term += (1 - c.delta) * entropy(c.t)
        if c.v is not None:
            term += c.delta * (entropy(c.v) + entropy(c.w))
        total += ql * term
    return total


def theorem2_rates(d: MixtureDecomposition, P: JointPmf) -> RateReport:
    """Maximally-coupled sum rate, reported entirely on the sum.

    Each matching gets a maximal coupling between pi_l(X1) and X2 under the
    full joint; the coupling's own delta (a total-variation distance) enters
    the formula. The mismatch probabilities P(pi_l(X1) != X2) are returned in
    ``notes`` for comparison, as they can exceed those distances.
    """
    couplings = per_matching_couplings(P, d)
    total = theorem2_sum_rate(d.weights, couplings)
    helper = d.helper_entropy()
    deltas = per_matching_deltas(P, d)
    notes = (
        "coupling deltas (TV of pi_l(X1) vs X2): "
        + ", ".join(f"{c.delta:.6f}" for c in couplings),
        "mismatch probabilities P(pi_l(X1) != X2): " + ", ".join(f"{x:.6f}" for x in deltas),
    )
    return RateReport(helper_rate=helper, source_rates=(total - helper, 0.0), sum_rate=total,
                      baselines={}, scheme="maximal-coupling", notes=notes)


def conditional_coloring_rate(P: JointPmf, F: FunctionTable, given: int = 1) -> float:
    """Expected min-entropy coloring of the other source's graph restricted to
    the conditional support, a single-letter stand-in for the conditional
    graph entropy H_G(X_other | X_given)."""
    other = 2 if given == 1 else 1
    g = build_char_graph(P, F, other)
    m = P.matrix if given == 1 else P.matrix.T
    total = 0.0
    for row in m:
        mass = row.sum()
        if mass <= SUPPORT_TOL:
            continue
        live = np.flatnonzero(row > SUPPORT_TOL)
        sub = g.induced(live).with_pmf(Pmf.normalized(row[live]))
        total += mass * min_entropy_coloring(sub)[1]
    return total


def baselines(P: JointPmf, F: FunctionTable) -> dict[str, float]:
    check_pairing(P, F)
    c1 = min_entropy_coloring(build_char_graph(P, F, 1))[1]
    c2 = min_entropy_coloring(build_char_graph(P, F, 2))[1]
    return {
        "functionEntropy": entropy(pushforward(P, F)),
        "trivialUpper": c1 + c2,
        "fullyDistributed": float(c1 + conditional_coloring_rate(P, F, given=1)),
        "slepianWolf": joint_entropy(P),
    }
