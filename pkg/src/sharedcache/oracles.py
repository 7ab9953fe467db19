"""Brute-force checks of the counting formulas on small instances.

These enumerate what the closed forms summarise, so they are deliberately
slow.  Every enumeration is guarded by an explicit cap.
"""

from __future__ import annotations

from collections import Counter
from itertools import permutations
from typing import Iterator, Optional, Sequence

from .bounds import SideInfoGraph, demand_class_size, selection_rule
from .combinatorics import all_subsets, binomial
from .model import Profile, SubfileId, as_profile

DEFAULT_ENUM_CAP = 10**7
DEFAULT_NODE_CAP = 22


class EnumerationTooLarge(RuntimeError):
    pass


def enumerate_ranked_demand_class(
    profile, num_files: Optional[int] = None, cap: int = DEFAULT_ENUM_CAP
) -> Iterator[tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]]:
    """Every reordered worst-case demand d(U) of the class, with its ranking.

    For each demand with distinct entries, cut it into consecutive blocks
    d'_1, ..., d'_Λ of sizes L_1, ..., L_Λ, then for each permutation π place
    block d'_r at cache π(r), i.e. emit (d'_{π^-1(1)}, ..., d'_{π^-1(Λ)}).
    Since L is non-increasing, π itself ranks the caches by descending
    population; tied caches stay in cut order.  It is yielded alongside.
    """
    profile = as_profile(profile)
    n = profile.num_users if num_files is None else num_files
    size = demand_class_size(profile, n)
    if size > cap:
        raise EnumerationTooLarge(f"demand class has {size} elements, cap is {cap}")
    lam = profile.num_caches
    cuts = [0]
    for c in profile:
        cuts.append(cuts[-1] + c)
    perms = list(permutations(range(1, lam + 1)))
    for d in permutations(range(1, n + 1), profile.num_users):
        base = [d[cuts[r]:cuts[r + 1]] for r in range(lam)]
        for pi in perms:
            placed = [()] * lam
            for r, cache in enumerate(pi):
                placed[cache - 1] = base[r]
            yield tuple(placed), pi


def enumerate_demand_class(
    profile, num_files: Optional[int] = None, cap: int = DEFAULT_ENUM_CAP
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """The P(N, K)·Λ! reordered demands d(U), as tuples of per-cache blocks."""
    for blocks, _ in enumerate_ranked_demand_class(profile, num_files, cap):
        yield blocks


def appearance_counts(profile, num_files: Optional[int] = None, cap: int = DEFAULT_ENUM_CAP) -> Counter:
    """How often each subfile (file, storage) lands in the population-ordered
    acyclic selection, summed over the whole demand class.
    """
    profile = as_profile(profile)
    lam = profile.num_caches
    counts: Counter = Counter()
    subsets = {
        c: all_subsets(x for x in range(1, lam + 1) if x != c) for c in range(1, lam + 1)
    }
    for blocks, ranking in enumerate_ranked_demand_class(profile, num_files, cap):
        keep = selection_rule(ranking)
        for cache, files in enumerate(blocks, 1):
            for T in subsets[cache]:
                if keep(cache, T):
                    for f in files:
                        counts[(f, T)] += 1
    return counts


def qi_by_enumeration(
    i: int,
    profile,
    subfile: SubfileId,
    num_files: Optional[int] = None,
    cap: int = DEFAULT_ENUM_CAP,
    counts: Optional[Counter] = None,
) -> int:
    """Enumerated count for one subfile stored at i caches."""
    if len(subfile.storage) != i:
        raise ValueError(f"{subfile} is not stored at exactly {i} caches")
    if counts is None:
        counts = appearance_counts(profile, num_files, cap)
    return counts.get((subfile.file, subfile.storage), 0)


def qi_table(profile, num_files: Optional[int] = None, cap: int = DEFAULT_ENUM_CAP) -> dict[int, set[int]]:
    """For each degree i, the set of distinct enumerated counts over all subfiles."""
    profile = as_profile(profile)
    lam = profile.num_caches
    n = profile.num_users if num_files is None else num_files
    counts = appearance_counts(profile, n, cap)
    table: dict[int, set[int]] = {}
    for T in all_subsets(range(1, lam + 1)):
        for f in range(1, n + 1):
            table.setdefault(len(T), set()).add(counts.get((f, T), 0))
    return table


def max_acyclic_exhaustive(graph: SideInfoGraph, cap_nodes: int = DEFAULT_NODE_CAP) -> int:
    """Size of a largest node set inducing an acyclic subgraph.

    Branch and bound over include/exclude decisions.  Nodes that nothing in
    the graph knows (no in-edges) or that know nothing (no out-edges) can
    never close a cycle, so they are always taken.
    """
    n = len(graph)
    if n > cap_nodes:
        raise EnumerationTooLarge(f"graph has {n} nodes, cap is {cap_nodes}")
    out = [set(e) for e in graph.out_edges]
    indeg = [0] * n
    for a in range(n):
        for b in out[a]:
            indeg[b] += 1
    free = [v for v in range(n) if not out[v] or indeg[v] == 0]
    rest = [v for v in range(n) if out[v] and indeg[v] > 0]

    def closes_cycle(chosen: set, v: int) -> bool:
        # is v reachable from itself through chosen ∪ {v}?
        stack, seen = [b for b in out[v] if b in chosen], set()
        while stack:
            a = stack.pop()
            if a in seen:
                continue
            seen.add(a)
            for b in out[a]:
                if b == v:
                    return True
                if b in chosen and b not in seen:
                    stack.append(b)
        return False

    best = 0

    def search(idx: int, chosen: set):
        nonlocal best
        if len(chosen) + (len(rest) - idx) <= best:
            return
        if idx == len(rest):
            best = len(chosen)
            return
        v = rest[idx]
        if not closes_cycle(chosen, v):
            chosen.add(v)
            search(idx + 1, chosen)
            chosen.remove(v)
        search(idx + 1, chosen)

    search(0, set())
    return best + len(free)


def transmission_count_identity(profile, t: int) -> bool:
    """Round-by-round transmission total equals Σ_{r=1}^{Λ-t} L_r C(Λ-r, t)."""
    profile = as_profile(profile)
    lam = profile.num_caches
    lhs = 0
    for j in range(1, profile[0] + 1):
        active = sum(1 for c in profile if c >= j)
        lhs += binomial(lam, t + 1) - binomial(lam - active, t + 1)
    rhs = sum(profile[r - 1] * binomial(lam - r, t) for r in range(1, lam - t + 1))
    return lhs == rhs


def qi_sweep_instances(max_class: int = 10**5, max_files: int = 6, max_caches: int = 3):
    """Every (profile, N) with N <= max_files, Λ <= max_caches and a demand
    class no larger than ``max_class``.  Profiles may contain empty caches.
    """
    out = []
    for n in range(1, max_files + 1):
        for k in range(1, n + 1):
            for lam in range(1, min(k, max_caches) + 1):
                for counts in _partitions(k, lam):
                    p = Profile(counts)
                    if demand_class_size(p, n) <= max_class:
                        out.append((p, n))
    return out


def _partitions(total: int, parts: int, cap: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    """Non-increasing tuples of ``parts`` non-negative ints summing to ``total``."""
    cap = total if cap is None else cap
    if parts == 1:
        if total <= cap:
            yield (total,)
        return
    for first in range(min(total, cap), -1, -1):
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def profiles(total: int, parts: int) -> list[tuple[int, ...]]:
    return list(_partitions(total, parts))
