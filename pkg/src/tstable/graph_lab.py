"""Random graphs, maximum t-stable sets and the peeling colouring.

Graphs are held as one Python ``int`` bitset per vertex, which keeps the
branch-and-bound search in pure bit arithmetic.

Randomness comes from numpy's Philox counter-based generator. A graph seed
is expanded through ``SeedSequence``; per-trial seeds in an experiment are
drawn from ``SeedSequence([master_seed, trial_index])`` so that every trial
owns an independent stream whatever order the trials run in.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .formulas import StabilityWindow, alpha_formula, alpha_hat, stability_window
from .moments import Params

__all__ = [
    "PRNG_STREAM",
    "Graph",
    "TrialRecord",
    "PeelResult",
    "ExperimentSummary",
    "sample_gnp",
    "trial_seed",
    "exact_alpha_t",
    "brute_alpha_t",
    "greedy_alpha_t",
    "is_t_stable",
    "peel_colouring",
    "run_trial",
    "run_concentration_experiment",
    "summarize",
]

PRNG_STREAM = "philox4x64/seedseq-v1"
PEEL_RESTARTS = 50


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0 .. n-1``."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.adj) != self.n:
            raise DomainError(f"adjacency has {len(self.adj)} rows for n={self.n}")
        for v, row in enumerate(self.adj):
            if row >> v & 1:
                raise DomainError(f"self-loop at vertex {v}")
            if row >> self.n:
                raise DomainError(f"vertex {v} has a neighbour outside 0..{self.n - 1}")
            for u in _bits(row):
                if not self.adj[u] >> v & 1:
                    raise DomainError(f"adjacency not symmetric at ({v}, {u})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise DomainError(f"self-loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls.from_edges(n, ((v, (v + 1) % n) for v in range(n)))

    @property
    def all_vertices(self) -> int:
        return (1 << self.n) - 1

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in _bits(self.adj[u] >> (u + 1) << (u + 1))]

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def with_edge(self, u: int, v: int) -> Graph:
        adj = list(self.adj)
        adj[u] |= 1 << v
        adj[v] |= 1 << u
        return Graph(self.n, tuple(adj))


def _as_mask(vertices: int | Iterable[int]) -> int:
    if isinstance(vertices, int):
        return vertices
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def is_t_stable(g: Graph, vertices: int | Iterable[int], t: int) -> bool:
    """Whether the induced subgraph on ``vertices`` has maximum degree <= t."""
    mask = _as_mask(vertices)
    return all((g.adj[v] & mask).bit_count() <= t for v in _bits(mask))


def trial_seed(master_seed: int, index: int) -> int:
    """64-bit seed of trial ``index`` derived from ``master_seed``."""
    ss = np.random.SeedSequence([master_seed & (2**64 - 1), index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed & (2**64 - 1))))


def sample_gnp(n: int, p: float, seed: int) -> Graph:
    """G(n, p): pairs ``u < v`` in lexicographic order, one uniform draw each."""
    if n < 0 or not 0 <= p <= 1:
        raise DomainError(f"need n >= 0 and 0 <= p <= 1, got n={n}, p={p}")
    draws = _rng(seed).random(n * (n - 1) // 2) < p
    adj = [0] * n
    pos = 0
    for u in range(n):
        for v in range(u + 1, n):
            if draws[pos]:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
            pos += 1
    return Graph(n, tuple(adj))


class _Timeout(Exception):
    pass


def _clique_cover_bound(adj: Sequence[int], cand: int, cap: int) -> int:
    """Greedy cover of ``cand`` by cliques, each worth at most ``cap`` vertices.

    A t-stable set meets any clique in at most ``t + 1`` vertices.
    """
    total = 0
    rest = cand
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        clique = low
        size = 1
        pool = rest & adj[v]
        while pool:
            low = pool & -pool
            clique |= low
            size += 1
            pool &= adj[low.bit_length() - 1]
        rest &= ~clique
        total += min(size, cap)
    return total


def exact_alpha_t(g: Graph, t: int, budget_ms: float | None = None,
                  within: int | None = None) -> int | None:
    """Maximum order of a t-stable set, or ``None`` if the budget runs out.

    Branch and bound: each node keeps the chosen set ``S`` and the candidates
    that can still join it. A candidate is dropped once it has more than ``t``
    neighbours in ``S`` or touches a member of ``S`` that already has ``t``
    neighbours there. The search branches on the candidate with most
    neighbours among the candidates, including it first. A node is cut when
    ``|S| + |candidates|`` cannot beat the incumbent, and again when the
    clique-cover bound (each clique contributes at most ``t + 1``) cannot.
    """
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    adj = g.adj
    universe = g.all_vertices if within is None else within
    if universe == 0:
        return 0
    deadline = None if budget_ms is None else time.perf_counter() + budget_ms / 1000.0
    cap = t + 1
    best = len(greedy_alpha_t(g, t, within=universe))
    deg = [0] * g.n
    nodes = 0

    def search(chosen: int, size: int, cand: int, sat: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if deadline is not None and nodes & 255 == 0 and time.perf_counter() > deadline:
            raise _Timeout
        if size > best:
            best = size
        if not cand or size + cand.bit_count() <= best:
            return
        if size + _clique_cover_bound(adj, cand, cap) <= best:
            return
        v, top = -1, -1
        for w in _bits(cand):
            d = (adj[w] & cand).bit_count()
            if d > top:
                v, top = w, d
        vbit = 1 << v
        rest = cand & ~vbit

        # include v
        nbrs_in = adj[v] & chosen
        new_chosen = chosen | vbit
        new_sat = sat
        for u in _bits(nbrs_in):
            deg[u] += 1
            if deg[u] == t:
                new_sat |= 1 << u
        deg[v] = nbrs_in.bit_count()
        if deg[v] == t:
            new_sat |= vbit
        blocked = 0
        for u in _bits(new_sat & ~sat):
            blocked |= adj[u]
        new_cand = rest & ~blocked
        for w in _bits(new_cand & adj[v]):
            if (adj[w] & new_chosen).bit_count() > t:
                new_cand &= ~(1 << w)
        search(new_chosen, size + 1, new_cand, new_sat)
        for u in _bits(nbrs_in):
            deg[u] -= 1
        deg[v] = 0

        # exclude v
        search(chosen, size, rest, sat)

    try:
        search(0, 0, universe, 0)
    except _Timeout:
        return None
    return best


def brute_alpha_t(g: Graph, t: int) -> int:
    """Exhaustive maximum over all vertex subsets; only for small graphs."""
    if g.n > 20:
        raise DomainError(f"brute force alpha_t refuses n={g.n} > 20")
    best = 0
    for mask in range(1 << g.n):
        size = mask.bit_count()
        if size > best and is_t_stable(g, mask, t):
            best = size
    return best


def greedy_alpha_t(g: Graph, t: int, seed: int | None = None,
                   within: int | None = None) -> list[int]:
    """A maximal t-stable set built one vertex at a time.

    At each step the admissible vertex with fewest neighbours in the current
    set is added. Ties go to the smallest index, where "index" is the vertex
    label if ``seed`` is None and the position in a seeded random
    permutation otherwise. Vertices are returned in insertion order.
    """
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    adj = g.adj
    pool = g.all_vertices if within is None else within
    if seed is None:
        rank = list(range(g.n))
    else:
        rank = [0] * g.n
        for pos, v in enumerate(_rng(seed).permutation(g.n)):
            rank[int(v)] = pos
    chosen = 0
    sat = 0
    deg = [0] * g.n
    order: list[int] = []
    cand = pool
    while cand:
        v = min(_bits(cand), key=lambda w: ((adj[w] & chosen).bit_count(), rank[w]))
        vbit = 1 << v
        nbrs_in = adj[v] & chosen
        for u in _bits(nbrs_in):
            deg[u] += 1
            if deg[u] == t:
                sat |= 1 << u
        deg[v] = nbrs_in.bit_count()
        if deg[v] == t:
            sat |= vbit
        chosen |= vbit
        order.append(v)
        blocked = 0
        for u in _bits(sat):
            blocked |= adj[u]
        cand &= ~vbit & ~blocked
        for w in _bits(cand & adj[v]):
            if (adj[w] & chosen).bit_count() > t:
                cand &= ~(1 << w)
    return order


@dataclass(frozen=True)
class PeelResult:
    classes: tuple[tuple[int, ...], ...]
    rounds: int
    misses: int
    stop_size: int

    @property
    def num_colours(self) -> int:
        return len(self.classes)


def peel_colouring(g: Graph, params: Params, epsilon: float, seed: int = 0,
                   restarts: int = PEEL_RESTARTS) -> PeelResult:
    """Colour by repeatedly removing t-stable sets of the predicted size.

    While at least ``floor(n / ln^3 n)`` vertices remain, a t-stable set of
    size ``alpha_hat(|V'|)`` is sought with up to ``restarts`` randomised
    greedy runs. If none reaches the target, the largest set found is used
    and the round counts as a miss. The vertices left over get one colour
    each. Where ``alpha_hat`` is undefined (tiny ``|V'|``) or below 1, the
    target is 1.
    """
    if g.n < 3:
        raise DomainError(f"peel_colouring needs n >= 3, got {g.n}")
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    t = params.t
    stop = max(1, math.floor(g.n / math.log(g.n) ** 3))
    remaining = g.all_vertices
    classes: list[tuple[int, ...]] = []
    misses = 0
    rounds = 0
    while remaining.bit_count() >= stop and remaining:
        size = remaining.bit_count()
        try:
            target = alpha_hat(params, size, epsilon)
        except DomainError:
            target = 1
        target = min(max(target, 1), size)
        found: list[int] = []
        for attempt in range(restarts):
            cand = greedy_alpha_t(g, t, seed=trial_seed(seed, rounds * restarts + attempt),
                                  within=remaining)
            if len(cand) > len(found):
                found = cand
            if len(found) >= target:
                break
        if len(found) < target:
            misses += 1
        chosen = found[:target]
        classes.append(tuple(sorted(chosen)))
        remaining &= ~_as_mask(chosen)
        rounds += 1
    classes.extend((v,) for v in _bits(remaining))
    return PeelResult(tuple(classes), rounds, misses, stop)


@dataclass(frozen=True)
class TrialRecord:
    index: int
    seed: int
    n: int
    t: int
    p: float
    alpha_exact: int | None
    alpha_heuristic: int
    window: StabilityWindow
    chi_greedy: int | None
    elapsed_ms: float = field(compare=False)

    @property
    def alpha(self) -> int:
        """Exact value when available, heuristic otherwise."""
        return self.alpha_exact if self.alpha_exact is not None else self.alpha_heuristic

    @property
    def in_window(self) -> bool:
        return self.window.lo <= self.alpha <= self.window.hi


def run_trial(params: Params, n: int, epsilon: float, master_seed: int, index: int,
              budget_ms: float | None, colour: bool = False) -> TrialRecord:
    start = time.perf_counter()
    seed = trial_seed(master_seed, index)
    g = sample_gnp(n, params.p, seed)
    heuristic = len(greedy_alpha_t(g, params.t))
    exact = exact_alpha_t(g, params.t, budget_ms)
    chi = peel_colouring(g, params, epsilon, seed=seed).num_colours if colour else None
    return TrialRecord(
        index=index,
        seed=seed,
        n=n,
        t=params.t,
        p=params.p,
        alpha_exact=exact,
        alpha_heuristic=heuristic,
        window=stability_window(params, n, epsilon),
        chi_greedy=chi,
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
    )


def _run_trial_args(args: tuple) -> TrialRecord:
    return run_trial(*args)


def run_concentration_experiment(params: Params, n: int, trials: int, epsilon: float,
                                 master_seed: int, budget_ms: float | None = None,
                                 jobs: int = 1, colour: bool = False) -> list[TrialRecord]:
    """Sample ``trials`` graphs and record alpha_t against the predicted window.

    Records come back ordered by trial index regardless of ``jobs``.
    """
    if trials < 1:
        raise DomainError(f"need at least one trial, got {trials}")
    stability_window(params, n, epsilon)  # fail fast on a bad (n, epsilon)
    work = [(params, n, epsilon, master_seed, i, budget_ms, colour) for i in range(trials)]
    if jobs <= 1:
        records = [_run_trial_args(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_trial_args, work))
    return sorted(records, key=lambda r: r.index)


@dataclass(frozen=True)
class ExperimentSummary:
    counts: dict[int, int]
    in_window_fraction: float
    timeouts: int
    mode: int
    support: tuple[int, int]
    alpha_formula: float

    @property
    def width(self) -> int:
        return self.support[1] - self.support[0] + 1


def summarize(records: Sequence[TrialRecord]) -> ExperimentSummary:
    if not records:
        raise DomainError("cannot summarise an empty experiment")
    counts: dict[int, int] = {}
    for r in records:
        counts[r.alpha] = counts.get(r.alpha, 0) + 1
    mode = max(sorted(counts), key=lambda a: counts[a])
    first = records[0]
    return ExperimentSummary(
        counts=dict(sorted(counts.items())),
        in_window_fraction=sum(r.in_window for r in records) / len(records),
        timeouts=sum(r.alpha_exact is None for r in records),
        mode=mode,
        support=(min(counts), max(counts)),
        alpha_formula=alpha_formula(Params(first.t, first.p), first.n),
    )
