"""Monte-Carlo run of the helper-aided coding protocol.

Every link is coded symbol by symbol (or in short blocks) with Huffman codes
that are conditioned on the component index, which the helper broadcasts.
The user decodes from the actual bitstreams.
"""

from __future__ import annotations

import heapq
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chargraph import CharGraph, build_char_graph, coloring_decoder, min_entropy_coloring
from .decomposition import MixtureDecomposition, reconstruct
from .prob import (DONT_CARE, SUPPORT_TOL, FunctionTable, JointPmf, Pmf,
                   check_pairing, entropy)

LINKS = ("helper", "source1", "source2")
SCHEMES = ("helper", "fullyDistributed")
_BATCH = 4096


class UndecodableError(RuntimeError):
    """A coloring does not determine the function outcome on the support."""


class EmptyAlphabetError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    num_samples: int
    seed: int = 0
    scheme: str = "helper"
    block_length: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if not 1 <= self.block_length <= 3:
            raise ValueError("block_length must be 1, 2 or 3")


@dataclass(frozen=True)
class SimResult:
    num_samples: int
    errors: int
    empirical_bits: dict = field(default_factory=dict)
    theoretical_bits: dict = field(default_factory=dict)


def huffman_codebook(p) -> dict[int, str]:
    """Optimal binary prefix code for the positive-mass symbols of ``p``.

    Ties between equal weights go to the subtree created first (leaves by
    symbol index, then merged nodes in creation order); the lighter subtree
    takes the ``0`` branch.
    """
    masses = p.masses if isinstance(p, Pmf) else np.asarray(p, dtype=float)
    symbols = [k for k, m in enumerate(masses) if m > 0]
    if not symbols:
        raise EmptyAlphabetError("no symbol has positive mass")
    if len(symbols) == 1:
        return {symbols[0]: ""}
    heap = [(float(masses[k]), k, (k,)) for k in symbols]
    heapq.heapify(heap)
    counter = itertools.count(len(masses))
    codes = {k: "" for k in symbols}
    while len(heap) > 1:
        w0, _, left = heapq.heappop(heap)
        w1, _, right = heapq.heappop(heap)
        for k in left:
            codes[k] = "0" + codes[k]
        for k in right:
            codes[k] = "1" + codes[k]
        heapq.heappush(heap, (w0 + w1, next(counter), left + right))
    return codes


def expected_length(p, codes: dict[int, str]) -> float:
    masses = p.masses if isinstance(p, Pmf) else np.asarray(p, dtype=float)
    return float(sum(masses[k] * len(c) for k, c in codes.items()))


def sample_mixture(d: MixtureDecomposition, rng: np.random.Generator) -> tuple[int, int, int]:
    """Draw (component index, x1, x2)."""
    k = int(rng.choice(len(d), p=d.weights))
    m = d.components[k].pmf.matrix
    cell = int(rng.choice(m.size, p=m.ravel()))
    return k, cell // m.shape[1], cell % m.shape[1]


def _inverse_cdf(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, int(np.flatnonzero(probs > 0)[-1]))


def _sample_batch(d: MixtureDecomposition, size: int, seed_seq: np.random.SeedSequence):
    rng = np.random.Generator(np.random.Philox(seed_seq))
    comp = _inverse_cdf(d.weights, rng.random(size))
    u = rng.random(size)
    n2 = d.components[0].pmf.shape[1]
    cells = np.zeros(size, dtype=int)
    for k, c in enumerate(d.components):
        sel = comp == k
        if sel.any():
            cells[sel] = _inverse_cdf(c.pmf.matrix.ravel(), u[sel])
    return comp, cells // n2, cells % n2


def sample_mixture_many(d: MixtureDecomposition, num_samples: int, seed: int,
                        workers: int = 1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized sampling in fixed-size batches, each with its own Philox stream.

    The output depends only on ``seed``, never on ``workers``.
    """
    sizes = [_BATCH] * (num_samples // _BATCH)
    if num_samples % _BATCH:
        sizes.append(num_samples % _BATCH)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, seqs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _sample_batch(d, *job), jobs))
    else:
        parts = [_sample_batch(d, *job) for job in jobs]
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(3))


class _LinkCoder:
    """Huffman coding of symbols whose PMF depends on a context both ends know.

    ``pmfs[ctx]`` is the symbol PMF in context ``ctx`` (None: the link is
    silent in that context). Blocks of ``n`` samples are coded jointly with
    the product PMF of their contexts.
    """

    def __init__(self, pmfs: list[np.ndarray | None], block: int):
        self.pmfs = pmfs
        self.block = block
        self._books: dict[tuple, tuple[dict, dict]] = {}

    def _book(self, ctxs: tuple) -> tuple[dict, dict]:
        if ctxs not in self._books:
            live = [c for c in ctxs if self.pmfs[c] is not None]
            if not live:
                enc = {(): ""}
            else:
                symbols = list(itertools.product(*(range(len(self.pmfs[c])) for c in live)))
                probs = np.array([np.prod([self.pmfs[c][s] for c, s in zip(live, sym)])
                                  for sym in symbols])
                codes = huffman_codebook(probs)
                enc = {symbols[k]: code for k, code in codes.items()}
            self._books[ctxs] = (enc, {v: k for k, v in enc.items()})
        return self._books[ctxs]

    def _blocks(self, n: int):
        for start in range(0, n, self.block):
            yield start, min(start + self.block, n)

    def encode(self, ctx: np.ndarray, sym: np.ndarray) -> str:
        out = []
        for a, b in self._blocks(len(ctx)):
            ctxs = tuple(int(c) for c in ctx[a:b])
            enc, _ = self._book(ctxs)
            key = tuple(int(s) for c, s in zip(ctxs, sym[a:b]) if self.pmfs[c] is not None)
            out.append(enc[key])
        return "".join(out)

    def decode(self, ctx: np.ndarray, bits: str) -> list[int | None]:
        out: list[int | None] = []
        pos = 0
        for a, b in self._blocks(len(ctx)):
            ctxs = tuple(int(c) for c in ctx[a:b])
            _, dec = self._book(ctxs)
            end = pos
            while bits[pos:end] not in dec:
                end += 1
                if end > len(bits):
                    raise UndecodableError("bitstream ended inside a codeword")
            it = iter(dec[bits[pos:end]])
            pos = end
            out.extend(next(it) if self.pmfs[c] is not None else None for c in ctxs)
        return out


def _outcome_graph(comp_pmf: JointPmf, F: FunctionTable, matching) -> CharGraph:
    """Graph on X1 for a perfect-matching component: symbols clash iff their
    matched outcomes differ."""
    n = comp_pmf.shape[0]
    vals = [F[i, j] for i, j in enumerate(matching.map)]
    adj = np.array([[vals[u] != vals[v] and u != v for v in range(n)] for u in range(n)])
    return CharGraph(Pmf.normalized(comp_pmf.matrix.sum(axis=1)), adj)


def _color_pmf(coloring, masses: np.ndarray) -> np.ndarray:
    out = np.zeros(max(coloring) + 1)
    for v, c in enumerate(coloring):
        out[c] += masses[v]
    return out


@dataclass
class _Plan:
    contexts: list[JointPmf]
    context_pmf: np.ndarray
    helper_sends: bool
    color1: list[tuple[int, ...]]
    color2: list[tuple[int, ...] | None]
    table: dict


def _plan(d: MixtureDecomposition, F: FunctionTable, scheme: str) -> _Plan:
    if scheme == "fullyDistributed":
        P = reconstruct(d)
        contexts = [P]
        c1 = [min_entropy_coloring(build_char_graph(P, F, 1))[0]]
        c2 = [min_entropy_coloring(build_char_graph(P, F, 2))[0]]
        context_pmf = np.array([1.0])
        helper_sends = False
    else:
        contexts, c1, c2 = [], [], []
        for comp in d.components:
            contexts.append(comp.pmf)
            if comp.matching is not None:
                c1.append(min_entropy_coloring(_outcome_graph(comp.pmf, F, comp.matching))[0])
                c2.append(None)
            else:
                c1.append(min_entropy_coloring(build_char_graph(comp.pmf, F, 1))[0])
                c2.append(min_entropy_coloring(build_char_graph(comp.pmf, F, 2))[0])
        context_pmf = d.weights
        helper_sends = True

    table: dict = {}
    for l, pmf in enumerate(contexts):
        check_pairing(pmf, F)
        sub = coloring_decoder(pmf, F, c1[l], c2[l])
        if sub is None:
            raise UndecodableError(f"context {l}: the colorings do not determine the outcome")
        table.update({(l, *k): v for k, v in sub.items()})
    return _Plan(contexts, context_pmf, helper_sends, c1, c2, table)


def is_decodable(d: MixtureDecomposition, F: FunctionTable, scheme: str = "helper") -> bool:
    """Whether the protocol's colorings let the user recover f on the support."""
    try:
        _plan(d, F, scheme)
    except UndecodableError:
        return False
    return True


def _theoretical(plan: _Plan) -> dict[str, float]:
    bits = {"helper": entropy(plan.context_pmf) if plan.helper_sends else 0.0,
            "source1": 0.0, "source2": 0.0}
    for q, pmf, c1, c2 in zip(plan.context_pmf, plan.contexts, plan.color1, plan.color2):
        bits["source1"] += float(q) * entropy(_color_pmf(c1, pmf.matrix.sum(axis=1)))
        if c2 is not None:
            bits["source2"] += float(q) * entropy(_color_pmf(c2, pmf.matrix.sum(axis=0)))
    return bits


def run_protocol(d: MixtureDecomposition, F: FunctionTable, cfg: SimConfig) -> SimResult:
    plan = _plan(d, F, cfg.scheme)
    comp, x1, x2 = sample_mixture_many(d, cfg.num_samples, cfg.seed, cfg.workers)
    if cfg.scheme == "fullyDistributed":
        ctx = np.zeros_like(comp)
    else:
        ctx = comp

    n_ctx = len(plan.contexts)
    helper = _LinkCoder([plan.context_pmf if plan.helper_sends else None], cfg.block_length)
    src1 = _LinkCoder([_color_pmf(plan.color1[l], plan.contexts[l].matrix.sum(axis=1))
                       for l in range(n_ctx)], cfg.block_length)
    src2 = _LinkCoder([None if plan.color2[l] is None else
                       _color_pmf(plan.color2[l], plan.contexts[l].matrix.sum(axis=0))
                       for l in range(n_ctx)], cfg.block_length)

    col1 = np.array([plan.color1[l][i] for l, i in zip(ctx, x1)])
    col2 = np.array([-1 if plan.color2[l] is None else plan.color2[l][j]
                     for l, j in zip(ctx, x2)])
    zeros = np.zeros_like(ctx)

    streams = {
        "helper": helper.encode(zeros, ctx),
        "source1": src1.encode(ctx, col1),
        "source2": src2.encode(ctx, col2),
    }

    # user side: recover the context first, then both colorings
    if plan.helper_sends:
        got_ctx = np.array(helper.decode(zeros, streams["helper"]))
    else:
        got_ctx = zeros
    got1 = src1.decode(got_ctx, streams["source1"])
    got2 = src2.decode(got_ctx, streams["source2"])

    errors = 0
    for l, a, b, i, j in zip(got_ctx, got1, got2, x1, x2):
        decoded = plan.table.get((int(l), a, b), DONT_CARE)
        errors += decoded != F[int(i), int(j)]

    n = cfg.num_samples
    empirical = {k: len(v) / n for k, v in streams.items()}
    return SimResult(num_samples=n, errors=int(errors), empirical_bits=empirical,
                     theoretical_bits=_theoretical(plan))
