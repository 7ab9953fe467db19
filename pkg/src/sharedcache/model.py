"""Core value types: system parameters, profiles, associations, subfile ids."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .combinatorics import binomial


class InvalidInstance(ValueError):
    """Raised when parameters, profiles or associations break a model invariant."""


@dataclass(frozen=True)
class SystemParams:
    num_files: int
    num_users: int
    num_caches: int
    antennas: int = 1
    t: int = 0

    def __post_init__(self):
        if self.num_files < 1 or self.num_users < 1 or self.num_caches < 1:
            raise InvalidInstance("N, K and the number of caches must be positive")
        if self.antennas < 1:
            raise InvalidInstance(f"antennas must be >= 1, got {self.antennas}")
        if self.num_files < self.num_users:
            raise InvalidInstance(f"need N >= K, got N={self.num_files}, K={self.num_users}")
        if self.num_caches > self.num_users:
            raise InvalidInstance(
                f"need at most K caches, got {self.num_caches} caches for K={self.num_users}"
            )
        if not 0 <= self.t <= self.num_caches:
            raise InvalidInstance(f"t must lie in [0, {self.num_caches}], got {self.t}")

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.t, self.num_caches)

    @property
    def memory(self) -> Fraction:
        """Cache size M in units of files."""
        return self.num_files * self.gamma

    def with_t(self, t: int) -> "SystemParams":
        return SystemParams(self.num_files, self.num_users, self.num_caches, self.antennas, t)


@dataclass(frozen=True)
class Profile:
    """Per-cache user counts, sorted non-increasing."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if not counts:
            raise InvalidInstance("profile must have at least one cache")
        if any(c < 0 for c in counts):
            raise InvalidInstance(f"profile entries must be non-negative: {counts}")
        if any(a < b for a, b in zip(counts, counts[1:])):
            raise InvalidInstance(f"profile must be sorted non-increasing: {counts}")
        if sum(counts) == 0:
            raise InvalidInstance("profile must serve at least one user")

    @classmethod
    def of(cls, counts: Iterable[int]) -> "Profile":
        """Build a profile from counts in any order."""
        return cls(tuple(sorted(counts, reverse=True)))

    @property
    def num_users(self) -> int:
        return sum(self.counts)

    @property
    def num_caches(self) -> int:
        return len(self.counts)

    def __len__(self):
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __getitem__(self, r):
        return self.counts[r]

    def is_uniform(self) -> bool:
        return len(set(self.counts)) == 1

    def supports_antennas(self, antennas: int) -> bool:
        """Every non-empty cache serves at least ``antennas`` users."""
        return all(c == 0 or c >= antennas for c in self.counts)

    def check_antennas(self, antennas: int) -> None:
        if not self.supports_antennas(antennas):
            raise InvalidInstance(
                f"profile {self.counts} has a non-empty cache with fewer than "
                f"{antennas} users; the scheme needs every non-zero count >= N0"
            )


def as_profile(p) -> Profile:
    return p if isinstance(p, Profile) else Profile.of(p)


@dataclass(frozen=True)
class Association:
    """Ordered user lists per cache; caches are numbered 1..Λ by position."""

    caches: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        caches = tuple(tuple(int(u) for u in users) for users in self.caches)
        object.__setattr__(self, "caches", caches)
        if not caches:
            raise InvalidInstance("association needs at least one cache")
        flat = [u for users in caches for u in users]
        if len(flat) != len(set(flat)):
            raise InvalidInstance("a user is associated to more than one cache")
        if sorted(flat) != list(range(1, len(flat) + 1)):
            raise InvalidInstance("association must partition users 1..K")

    @property
    def num_users(self) -> int:
        return sum(len(u) for u in self.caches)

    @property
    def num_caches(self) -> int:
        return len(self.caches)

    def cache_of(self) -> dict[int, int]:
        """Map user -> 1-based cache index."""
        return {u: lam for lam, users in enumerate(self.caches, 1) for u in users}

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(u) for u in self.caches)

    def to_json(self) -> dict:
        return {"caches": [list(u) for u in self.caches]}

    @classmethod
    def from_json(cls, obj: dict) -> "Association":
        try:
            return cls(tuple(tuple(u) for u in obj["caches"]))
        except (KeyError, TypeError) as exc:
            raise InvalidInstance(f"malformed association JSON: {exc}") from exc


def profile_of(assoc: Association) -> Profile:
    return Profile.of(assoc.sizes())


def sort_permutation(sizes: Sequence[int] | Association) -> tuple[int, ...]:
    """1-based cache order by descending size; ties go to the lower index."""
    if isinstance(sizes, Association):
        sizes = sizes.sizes()
    return tuple(sorted(range(1, len(sizes) + 1), key=lambda lam: (-sizes[lam - 1], lam)))


def association_from_profile(profile, seed: Optional[int] = None) -> Association:
    """A canonical association for ``profile``; shuffled if a seed is given.

    Without a seed, cache r holds the next ``L_r`` consecutive user ids, in
    profile order.
    """
    profile = as_profile(profile)
    users = list(range(1, profile.num_users + 1))
    sizes = list(profile.counts)
    if seed is not None:
        rng = random.Random(seed)
        rng.shuffle(users)
        rng.shuffle(sizes)
    caches, pos = [], 0
    for s in sizes:
        caches.append(tuple(users[pos:pos + s]))
        pos += s
    return Association(tuple(caches))


def validate_demand(demand: Sequence[int], num_users: int, num_files: int) -> tuple[int, ...]:
    demand = tuple(int(d) for d in demand)
    if len(demand) != num_users:
        raise InvalidInstance(f"demand has {len(demand)} entries for {num_users} users")
    bad = [d for d in demand if not 1 <= d <= num_files]
    if bad:
        raise InvalidInstance(f"demand entries outside [1, {num_files}]: {bad}")
    return demand


def is_worst_case(demand: Sequence[int]) -> bool:
    return len(set(demand)) == len(demand)


def worst_case_demand(params: SystemParams, seed: int) -> tuple[int, ...]:
    """K distinct file indices drawn deterministically from ``seed``."""
    if params.num_files < params.num_users:
        raise InvalidInstance("worst-case demand needs N >= K")
    rng = random.Random(seed)
    return tuple(rng.sample(range(1, params.num_files + 1), params.num_users))


def demand_blocks(assoc: Association, demand: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Reorder a per-user demand into per-cache blocks d_1, ..., d_Λ."""
    return tuple(tuple(demand[u - 1] for u in users) for users in assoc.caches)


def random_profile(
    rng: random.Random,
    num_users: int,
    num_caches: int,
    min_nonzero: int = 1,
    allow_empty: bool = True,
) -> Profile:
    """Random profile of ``num_users`` over ``num_caches`` caches.

    Every non-zero count is at least ``min_nonzero``.  Raises if no such
    profile exists.
    """
    if num_users < min_nonzero or (not allow_empty and num_users < num_caches * min_nonzero):
        raise InvalidInstance("no profile satisfies the constraints")
    max_active = min(num_caches, num_users // min_nonzero)
    lo = 1 if allow_empty else num_caches
    active = rng.randint(lo, max_active)
    counts = [min_nonzero] * active
    for _ in range(num_users - min_nonzero * active):
        counts[rng.randrange(active)] += 1
    counts += [0] * (num_caches - active)
    return Profile.of(counts)


@dataclass(frozen=True, order=True)
class SubfileId:
    """File ``file``, stored at caches ``storage``, mini-file ``mini`` (1-based).

    ``mini`` is None for the un-split subfiles used by the converse.
    """

    file: int
    storage: tuple[int, ...]
    mini: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "storage", tuple(sorted(self.storage)))

    def to_json(self) -> dict:
        out = {"file": self.file, "T": list(self.storage)}
        if self.mini is not None:
            out["l"] = self.mini
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SubfileId":
        return cls(int(obj["file"]), tuple(obj["T"]), obj.get("l"))

    def __str__(self):
        label = "".join(map(str, self.storage)) or "∅"
        if self.mini is None:
            return f"W^{self.file}_{label}"
        return f"W^{self.file}_{label},{self.mini}"


@dataclass(frozen=True)
class CacheContents:
    cache: int
    stored: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for sid in self.stored:
            if self.cache not in sid.storage:
                raise InvalidInstance(f"{sid} stored in cache {self.cache} outside its set")

    def __contains__(self, sid: SubfileId) -> bool:
        return sid in self.stored

    def __len__(self):
        return len(self.stored)


def expected_cache_size(params: SystemParams) -> int:
    """Mini-files per cache under the placement: C(Λ-1, t-1)·N·N0."""
    if params.t == 0:
        return 0
    return binomial(params.num_caches - 1, params.t - 1) * params.num_files * params.antennas
