"""Optimal delay, and the index-coding converse that certifies it.

The achievable side is the closed form of the delivery scheme.  The converse
side is built separately: a side-information graph per demand, acyclic node
selections ordered by cache population, the averaged appearance counts Q_i,
and the minimisation over how much data sits in exactly i caches.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, Union

from .combinatorics import (
    Number,
    all_subsets,
    binomial,
    falling_factorial,
    falling_factorial_or_zero,
    lower_convex_envelope,
)
from .delivery import closed_form_delay
from .model import InvalidInstance, Profile, SubfileId, as_profile, sort_permutation


def _check_t(t: Number, num_caches: int) -> Fraction:
    t = Fraction(t)
    if t < 0 or t > num_caches:
        raise ValueError(f"t must lie in [0, {num_caches}], got {t}")
    return t


def delay_envelope(profile, antennas: int = 1):
    profile = as_profile(profile)
    return lower_convex_envelope(
        (i, closed_form_delay(profile, antennas, i)) for i in range(profile.num_caches + 1)
    )


def optimal_delay(profile, antennas: int, t: Number) -> Fraction:
    """Optimal worst-case delay of a profile at memory point t = Λγ.

    Integer t uses the closed form directly; other t interpolate along the
    lower convex envelope of the integer points.
    """
    profile = as_profile(profile)
    lam = profile.num_caches
    t = _check_t(t, lam)
    if t.denominator == 1:
        return closed_form_delay(profile, antennas, int(t))
    return delay_envelope(profile, antennas)(t)


def uniform_delay(num_users: int, num_caches: int, antennas: int, t: Number) -> Fraction:
    """K(1-γ) / (N0(Λγ+1)) with γ = t/Λ."""
    if num_users % num_caches:
        raise InvalidInstance(f"uniform profile needs Λ | K, got K={num_users}, Λ={num_caches}")
    t = _check_t(t, num_caches)
    gamma = t / num_caches
    return num_users * (1 - gamma) / (antennas * (t + 1))


@dataclass(frozen=True)
class DofSummary:
    sum_dof: Optional[Fraction]
    single_vs_multi_ratio: Optional[Fraction]
    naive_gap: Fraction


def dof_and_ratios(profile, antennas: int, t: Number) -> DofSummary:
    """Sum-DoF K(1-γ)/T, the one-vs-N0 antenna delay ratio, and the gap of
    the per-cache-group multi-antenna baseline, N0(1+t)/(N0+t).

    The first two are None when the delay is zero (t = Λ).
    """
    profile = as_profile(profile)
    t = _check_t(t, profile.num_caches)
    delay = optimal_delay(profile, antennas, t)
    gamma = t / profile.num_caches
    if delay == 0:
        dof = ratio = None
    else:
        dof = profile.num_users * (1 - gamma) / delay
        ratio = optimal_delay(profile, 1, t) / delay
    return DofSummary(dof, ratio, Fraction(antennas * (1 + t), antennas + t))


# --- side-information graph ------------------------------------------------

@dataclass(frozen=True)
class GraphNode:
    """A requested subfile, its requester and the requester's cache."""

    file: int
    storage: tuple[int, ...]
    user: int
    cache: int

    @property
    def subfile(self) -> SubfileId:
        return SubfileId(self.file, self.storage)


class SideInfoGraph:
    """Index-coding digraph: A -> B iff B's cache stores A's subfile."""

    def __init__(self, nodes: Sequence[GraphNode], num_caches: int):
        self.nodes = tuple(nodes)
        self.num_caches = num_caches
        by_cache: dict[int, list[int]] = {}
        for idx, v in enumerate(self.nodes):
            by_cache.setdefault(v.cache, []).append(idx)
        self.out_edges: list[tuple[int, ...]] = [
            tuple(b for lam in v.storage for b in by_cache.get(lam, ()))
            for v in self.nodes
        ]

    def __len__(self):
        return len(self.nodes)

    def has_edge(self, a: int, b: int) -> bool:
        return self.nodes[b].cache in self.nodes[a].storage

    def edge_count(self) -> int:
        return sum(len(e) for e in self.out_edges)

    def block_sizes(self) -> tuple[int, ...]:
        users: dict[int, set[int]] = {lam: set() for lam in range(1, self.num_caches + 1)}
        for v in self.nodes:
            users[v.cache].add(v.user)
        return tuple(len(users[lam]) for lam in range(1, self.num_caches + 1))


def build_side_info_graph(
    blocks: Sequence[Sequence[int]],
    users: Optional[Sequence[Sequence[int]]] = None,
) -> SideInfoGraph:
    """Graph for the reordered demand d(U) = (d_1, ..., d_Λ).

    ``blocks[λ-1]`` lists the files requested by the users of cache λ.  User
    ids come from ``users`` (same shape) or are numbered consecutively.
    """
    lam_count = len(blocks)
    if users is None:
        users, k = [], 0
        for b in blocks:
            users.append(tuple(range(k + 1, k + len(b) + 1)))
            k += len(b)
    files = [f for b in blocks for f in b]
    if len(set(files)) != len(files):
        raise InvalidInstance("the side-information graph is defined for distinct demands")
    nodes = []
    for lam, (b, us) in enumerate(zip(blocks, users), 1):
        if len(b) != len(us):
            raise InvalidInstance(f"cache {lam}: {len(b)} files for {len(us)} users")
        others = [x for x in range(1, lam_count + 1) if x != lam]
        for f, u in zip(b, us):
            for T in all_subsets(others):
                nodes.append(GraphNode(f, T, u, lam))
    return SideInfoGraph(nodes, lam_count)


def is_acyclic(graph: SideInfoGraph, selection) -> bool:
    """Kahn-style source removal on the subgraph induced by ``selection``."""
    chosen = set(selection)
    indeg = {v: 0 for v in chosen}
    for a in chosen:
        for b in graph.out_edges[a]:
            if b in chosen:
                indeg[b] += 1
    queue = deque(v for v, d in indeg.items() if d == 0)
    removed = 0
    while queue:
        a = queue.popleft()
        removed += 1
        for b in graph.out_edges[a]:
            if b in chosen:
                indeg[b] -= 1
                if indeg[b] == 0:
                    queue.append(b)
    return removed == len(chosen)


@dataclass(frozen=True)
class AcyclicSelection:
    nodes: frozenset
    sigma: tuple[int, ...]

    def __len__(self):
        return len(self.nodes)


def selection_rule(sigma: Sequence[int]) -> Callable[[int, tuple[int, ...]], bool]:
    """Predicate (cache, storage) -> selected, for cache ranking ``sigma``."""
    rank = {lam: r for r, lam in enumerate(sigma, 1)}
    if sorted(rank) != list(range(1, len(sigma) + 1)):
        raise ValueError(f"not a permutation of 1..{len(sigma)}: {tuple(sigma)}")

    def keep(cache: int, storage: tuple[int, ...]) -> bool:
        r = rank[cache]
        return all(rank[x] > r for x in storage)

    return keep


def ranked_selection(graph: SideInfoGraph, sigma: Optional[Sequence[int]] = None) -> AcyclicSelection:
    """Nodes of the cache ranked r whose storage avoids the caches ranked 1..r.

    Defaults to ``sigma`` = caches by descending population.
    """
    if sigma is None:
        sigma = sort_permutation(graph.block_sizes())
    sigma = tuple(sigma)
    if len(sigma) != graph.num_caches:
        raise ValueError(f"permutation has length {len(sigma)}, graph has {graph.num_caches} caches")
    keep = selection_rule(sigma)
    chosen = frozenset(i for i, v in enumerate(graph.nodes) if keep(v.cache, v.storage))
    return AcyclicSelection(chosen, sigma)


def selection_degree_counts(profile_sizes: Sequence[int], sigma: Sequence[int]) -> list[int]:
    """Selected nodes stored at exactly i caches: Σ_{r=1}^{Λ-i} |U_σ(r)| C(Λ-r, i)."""
    lam = len(profile_sizes)
    return [
        sum(profile_sizes[sigma[r - 1] - 1] * binomial(lam - r, i) for r in range(1, lam - i + 1))
        for i in range(lam + 1)
    ]


SizeMap = Union[Mapping[SubfileId, Fraction], Callable[[SubfileId], Fraction]]


def cutset_bound(
    graph: SideInfoGraph,
    selection: AcyclicSelection | Sequence[int],
    sizes: SizeMap,
    antennas: int = 1,
) -> Fraction:
    """(1/N0) · total size of an acyclic node set; a lower bound on T."""
    nodes = selection.nodes if isinstance(selection, AcyclicSelection) else frozenset(selection)
    if not is_acyclic(graph, nodes):
        raise ValueError("cut-set bound needs an acyclic selection")
    size_of = sizes if callable(sizes) else sizes.__getitem__
    total = sum((Fraction(size_of(graph.nodes[i].subfile)) for i in nodes), Fraction(0))
    return total / antennas


# --- averaged converse -------------------------------------------------------

def q_coefficient(i: int, profile, num_files: Optional[int] = None) -> int:
    """Appearances of one fixed subfile stored at i caches across all the
    selections of the demand class of ``profile``.
    """
    profile = as_profile(profile)
    lam, k = profile.num_caches, profile.num_users
    n = k if num_files is None else num_files
    if not 0 <= i <= lam:
        raise ValueError(f"i must lie in [0, {lam}], got {i}")
    total = 0
    for r in range(1, lam + 1):
        lr = profile[r - 1]
        total += (
            falling_factorial_or_zero(lam - i - 1, r - 1)
            * math.factorial(lam - r)
            * lr
            * falling_factorial_or_zero(k - 1, lr - 1)
            * math.factorial(k - lr)
            * (lam - i)
        )
    return binomial(n - 1, k - 1) * total


def demand_class_size(profile, num_files: Optional[int] = None) -> int:
    profile = as_profile(profile)
    n = profile.num_users if num_files is None else num_files
    return falling_factorial(n, profile.num_users) * math.factorial(profile.num_caches)


def normalized_coefficients(profile, num_files: Optional[int] = None) -> list[Fraction]:
    """c_i obtained from the averaged counts: N · Q_i / (Λ! P(N, K))."""
    profile = as_profile(profile)
    n = profile.num_users if num_files is None else num_files
    size = demand_class_size(profile, n)
    return [Fraction(n * q_coefficient(i, profile, n), size) for i in range(profile.num_caches + 1)]


def c_coefficients(profile) -> list[Fraction]:
    """c_i = Σ_{r=1}^{Λ-i} L_r C(Λ-r, i) / C(Λ, i)."""
    profile = as_profile(profile)
    lam = profile.num_caches
    return [
        Fraction(sum(profile[r - 1] * binomial(lam - r, i) for r in range(1, lam - i + 1)),
                 binomial(lam, i))
        for i in range(lam + 1)
    ]


def converse_bound(profile, antennas: int, t: Number, num_files: Optional[int] = None) -> Fraction:
    """Lower bound on the worst-case delay at memory point t.

    Coefficients come from the appearance counts; the bound is the minimum of
    Σ x'_i c_i / N0 over distributions x' with mean at most t, which for a
    non-increasing convex sequence is its lower envelope at t.
    """
    profile = as_profile(profile)
    lam = profile.num_caches
    t = _check_t(t, lam)
    coeffs = [c / antennas for c in normalized_coefficients(profile, num_files)]
    if any(a < b for a, b in zip(coeffs, coeffs[1:])):
        raise ArithmeticError(f"coefficients are not non-increasing: {coeffs}")
    env = lower_convex_envelope(enumerate(coeffs))
    return env(t)


@dataclass(frozen=True)
class SizeDistribution:
    """x[i] = total normalized data stored at exactly i caches."""

    x: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(Fraction(v) for v in self.x))

    def total(self) -> Fraction:
        return sum(self.x, Fraction(0))

    def storage(self) -> Fraction:
        return sum((i * v for i, v in enumerate(self.x)), Fraction(0))


def bound_for_distribution(
    xdist: SizeDistribution,
    profile,
    antennas: int,
    num_files: int,
    t: Number,
) -> Fraction:
    """(1/N0) Σ_i c_i x_i / N for a distribution meeting the file-size and
    cache-size constraints (Σ x_i = N, Σ i x_i <= tN with t = ΛM/N).
    """
    profile = as_profile(profile)
    lam = profile.num_caches
    t = _check_t(t, lam)
    if len(xdist.x) != lam + 1:
        raise InvalidInstance(f"distribution needs {lam + 1} entries, got {len(xdist.x)}")
    if any(v < 0 for v in xdist.x):
        raise InvalidInstance("distribution entries must be non-negative")
    if xdist.total() != num_files:
        raise InvalidInstance(f"distribution sums to {xdist.total()}, expected N={num_files}")
    if xdist.storage() > t * num_files:
        raise InvalidInstance(
            f"distribution stores {xdist.storage()} > budget Λ·M = {t * num_files}"
        )
    c = c_coefficients(profile)
    return sum((ci * xi for ci, xi in zip(c, xdist.x)), Fraction(0)) / (num_files * antennas)
