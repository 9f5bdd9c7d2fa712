"""Characteristic graphs, colorings and graph entropies."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .decomposition import MixtureDecomposition, NonMatchingComponentError
from .prob import (DONT_CARE, SUPPORT_TOL, FunctionTable, JointPmf, Pmf,
                   _entropy_bits, check_pairing, entropy, marginals, pushforward)

MAX_POWER_VERTICES = 4096
MAX_COLORING_VERTICES = 12
_TIE_TOL = 1e-12


class CapExceededError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CharGraph:
    """Vertex PMF plus a symmetric boolean adjacency matrix without self-loops."""

    vertex_pmf: Pmf
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=bool)
        n = len(self.vertex_pmf)
        if a.shape != (n, n):
            raise ValueError("adjacency does not match the vertex count")
        if np.any(np.diag(a)):
            raise ValueError("self-loops are not allowed")
        a = a | a.T
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @classmethod
    def from_edges(cls, vertex_pmf: Pmf, edges) -> "CharGraph":
        n = len(vertex_pmf)
        a = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            a[u, v] = a[v, u] = True
        return cls(vertex_pmf, a)

    @property
    def n(self) -> int:
        return len(self.vertex_pmf)

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return frozenset(zip(iu.tolist(), ju.tolist()))

    def with_pmf(self, pmf: Pmf) -> "CharGraph":
        return CharGraph(pmf, self.adjacency)

    def induced(self, vertices) -> "CharGraph":
        """Subgraph on ``vertices``, with their masses renormalized."""
        idx = np.asarray(vertices, dtype=int)
        labels = None
        if self.vertex_pmf.labels is not None:
            labels = tuple(self.vertex_pmf.labels[i] for i in idx)
        pmf = Pmf.normalized(self.vertex_pmf.masses[idx], labels)
        return CharGraph(pmf, self.adjacency[np.ix_(idx, idx)])


def build_char_graph(P: JointPmf, F: FunctionTable, source: int = 1) -> CharGraph:
    """Connect two symbols of ``source`` when some jointly probable symbol of
    the other source gives them different function outcomes."""
    check_pairing(P, F)
    if source not in (1, 2):
        raise ValueError("source must be 1 or 2")
    m = P.matrix if source == 1 else P.matrix.T

    def f(a, b):
        return F[a, b] if source == 1 else F[b, a]

    n, n_other = m.shape
    adj = np.zeros((n, n), dtype=bool)
    for y in range(n_other):
        live = np.flatnonzero(m[:, y] > SUPPORT_TOL)
        for a, b in itertools.combinations(live.tolist(), 2):
            fa, fb = f(a, y), f(b, y)
            if fa is not DONT_CARE and fb is not DONT_CARE and fa != fb:
                adj[a, b] = adj[b, a] = True
    pmf = marginals(P)[source - 1]
    return CharGraph(pmf, adj)


def power_graph(G: CharGraph, n: int) -> CharGraph:
    """OR (co-normal) power: tuples adjacent iff adjacent in some coordinate."""
    if n < 1:
        raise ValueError("power must be >= 1")
    size = G.n ** n
    if size > MAX_POWER_VERTICES:
        raise CapExceededError(f"|V|^n = {size} exceeds {MAX_POWER_VERTICES}")
    tuples = np.array(list(itertools.product(range(G.n), repeat=n)), dtype=int).reshape(size, n)
    masses = np.prod(G.vertex_pmf.masses[tuples], axis=1)
    adj = np.zeros((size, size), dtype=bool)
    for k in range(n):
        col = tuples[:, k]
        adj |= G.adjacency[np.ix_(col, col)]
    labels = None
    if G.vertex_pmf.labels is not None:
        labels = tuple(tuple(G.vertex_pmf.labels[i] for i in t) for t in tuples)
    return CharGraph(Pmf.normalized(masses, labels), adj)


def is_valid_coloring(G: CharGraph, coloring) -> bool:
    """``coloring`` maps every vertex index to a color id (sequence or dict)."""
    colors = [coloring[v] for v in range(G.n)]
    return not any(colors[u] == colors[v] for u, v in G.edges)


def color_pmf(G: CharGraph, coloring) -> np.ndarray:
    totals: dict = {}
    for v in range(G.n):
        totals[coloring[v]] = totals.get(coloring[v], 0.0) + G.vertex_pmf.masses[v]
    return np.array(list(totals.values()))


def min_entropy_coloring(G: CharGraph) -> tuple[tuple[int, ...], float]:
    """Exhaustive minimum-entropy coloring.

    Partitions of the vertex set are enumerated as restricted growth strings
    in lexicographic order; the first partition attaining the minimum wins.
    Branches are cut when even pouring all unassigned mass into the heaviest
    class could not beat the incumbent.
    """
    n = G.n
    if n > MAX_COLORING_VERTICES:
        raise CapExceededError(f"{n} vertices exceeds the exhaustive-coloring cap of "
                               f"{MAX_COLORING_VERTICES}")
    p = G.vertex_pmf.masses
    adj = G.adjacency
    suffix = np.concatenate([np.cumsum(p[::-1])[::-1], [0.0]])

    best_bits = np.inf
    best: list[int] | None = None
    assign = [0] * n
    class_mass: list[float] = []
    class_members: list[list[int]] = []

    def bound(rest: float) -> float:
        if not class_mass:
            return 0.0
        masses = np.array(class_mass)
        masses[int(np.argmax(masses))] += rest
        return _entropy_bits(masses)

    def recurse(v: int):
        nonlocal best_bits, best
        if v == n:
            bits = _entropy_bits(np.array(class_mass))
            if bits < best_bits - _TIE_TOL:
                best_bits, best = bits, assign.copy()
            return
        if bound(suffix[v]) >= best_bits - _TIE_TOL:
            return
        for k in range(len(class_mass) + 1):
            if k < len(class_mass):
                if any(adj[v, u] for u in class_members[k]):
                    continue
                class_mass[k] += p[v]
                class_members[k].append(v)
                assign[v] = k
                recurse(v + 1)
                class_members[k].pop()
                class_mass[k] -= p[v]
            else:
                class_mass.append(p[v])
                class_members.append([v])
                assign[v] = k
                recurse(v + 1)
                class_members.pop()
                class_mass.pop()

    recurse(0)
    return tuple(best), max(float(best_bits), 0.0)


def chromatic_entropy_rate(G: CharGraph, n: int = 1) -> float:
    """Single-letter (n=1) or n-block min-entropy coloring rate, bits/symbol."""
    Gn = power_graph(G, n)
    if Gn.n > MAX_COLORING_VERTICES:
        raise CapExceededError(f"power graph has {Gn.n} vertices; coloring cap is "
                               f"{MAX_COLORING_VERTICES}")
    return min_entropy_coloring(Gn)[1] / n


def chromatic_number(G: CharGraph) -> int:
    """Exact chromatic number by trying k = 1, 2, ... colors (small graphs only)."""
    n = G.n
    order = sorted(range(n), key=lambda v: -int(G.adjacency[v].sum()))
    for k in range(1, n + 1):
        colors = [-1] * n

        def place(i: int) -> bool:
            if i == n:
                return True
            v = order[i]
            used = {colors[u] for u in np.flatnonzero(G.adjacency[v])}
            for c in range(k):
                if c not in used:
                    colors[v] = c
                    if place(i + 1):
                        return True
            colors[v] = -1
            return False

        if place(0):
            return k
    return n


def maximal_independent_sets(G: CharGraph) -> np.ndarray:
    """0/1 membership matrix (sets x vertices), rows in a canonical order."""
    g = nx.Graph()
    g.add_nodes_from(range(G.n))
    g.add_edges_from(G.edges)
    sets = sorted(sorted(c) for c in nx.find_cliques(nx.complement(g)))
    member = np.zeros((len(sets), G.n))
    for s, verts in enumerate(sets):
        member[s, verts] = 1.0
    return member


def _mutual_info(px: np.ndarray, cond: np.ndarray, q: np.ndarray) -> float:
    # cond[s, x] = p(s | x); q[s] = sum_x p(x) p(s | x)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(cond > 0, cond / q[:, None], 1.0)
        return float((px[None, :] * cond * np.log2(ratio)).sum())


def _alternate(px, member, cond, tol, max_iter):
    prev = np.inf
    for _ in range(max_iter):
        q = cond @ px
        cur = _mutual_info(px, cond, q)
        if abs(prev - cur) < tol:
            break
        prev = cur
        cond = member * q[:, None]
        cond = cond / cond.sum(axis=0, keepdims=True)
    return cur


def korner_entropy(G: CharGraph, tol: float = 1e-9, max_iter: int = 100_000,
                   restarts: int = 5, seed: int = 0) -> float:
    """Graph entropy min I(X; S) over independent sets S containing X.

    Blahut-Arimoto style alternating minimization between p(s|x) and the set
    marginal q(s). Runs from the uniform start, ``restarts`` random starts and
    a start seeded by the optimal single-letter coloring; returns the smallest
    value reached.
    """
    n = G.n
    if n > MAX_COLORING_VERTICES:
        raise CapExceededError(f"{n} vertices exceeds the cap of {MAX_COLORING_VERTICES}")
    keep = G.vertex_pmf.masses > 0
    if not np.all(keep):
        G = G.induced(np.flatnonzero(keep))
        n = G.n
    px = G.vertex_pmf.masses
    member = maximal_independent_sets(G)
    if member.shape[0] == 1:
        return 0.0

    starts = [member / member.sum(axis=0, keepdims=True)]
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        r = member * rng.random(member.shape)
        starts.append(r / r.sum(axis=0, keepdims=True))

    coloring, _ = min_entropy_coloring(G)
    seeded = np.zeros_like(member)
    class_set: dict[int, int] = {}
    for v, c in enumerate(coloring):
        if c not in class_set:
            cls = [u for u in range(n) if coloring[u] == c]
            class_set[c] = next(s for s in range(member.shape[0]) if member[s, cls].all())
        seeded[class_set[c], v] = 1.0
    starts.append(seeded)

    return max(0.0, min(_alternate(px, member, s, tol, max_iter) for s in starts))


def coloring_decoder(P: JointPmf, F: FunctionTable, colors1, colors2) -> dict | None:
    """Map (color1, color2) -> outcome over the support of P, or None when two
    supported cells share a color pair but not an outcome. ``colors2`` may be
    None when source two stays silent."""
    table: dict = {}
    for i, j in zip(*np.nonzero(P.matrix > SUPPORT_TOL)):
        key = (colors1[i], None if colors2 is None else colors2[j])
        val = F[i, j]
        if table.setdefault(key, val) != val:
            return None
    return table


def conditional_rate_given_matchings(d: MixtureDecomposition, F: FunctionTable) -> float:
    """Source-one rate when the user knows which perfect matching is active:
    sum over components of weight * H(f | component)."""
    total = 0.0
    for k, comp in enumerate(d.components):
        if comp.matching is None:
            raise NonMatchingComponentError(f"component {k} is not a perfect matching")
        total += comp.weight * entropy(pushforward(comp.pmf, F))
    return total
