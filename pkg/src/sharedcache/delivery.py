"""Round-based delivery for shared caches and N0 transmit antennas.

Each round serves one N0-tuple of users per still-active cache.  Within a
round every (t+1)-subset Q of caches yields one transmission: the sum over
active caches λ in Q of a zero-forced group carrying, to each user of the
tuple, a mini-file of its request stored exactly at Q minus λ.  With one
antenna a group is a single (user, subfile) pair and the transmission is the
XOR of the group payloads.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .combinatorics import binomial, colex_subsets, format_rational
from .model import (
    Association,
    InvalidInstance,
    Profile,
    SubfileId,
    SystemParams,
    as_profile,
    validate_demand,
)


@dataclass(frozen=True)
class PrecodedGroup:
    cache: int
    users: tuple[int, ...]
    payload: tuple[SubfileId, ...]

    def to_json(self) -> dict:
        return {
            "cache": self.cache,
            "users": list(self.users),
            "subfiles": [s.to_json() for s in self.payload],
        }


@dataclass(frozen=True)
class Transmission:
    round: int
    q_set: tuple[int, ...]
    groups: tuple[PrecodedGroup, ...]
    duration: Fraction

    def users(self) -> list[int]:
        return [u for g in self.groups for u in g.users]

    def payloads(self) -> list[SubfileId]:
        return [s for g in self.groups for s in g.payload]

    def to_json(self) -> dict:
        return {
            "round": self.round,
            "Q": list(self.q_set),
            "groups": [g.to_json() for g in self.groups],
            "duration": format_rational(self.duration),
        }


@dataclass
class Transcript:
    transmissions: list[Transmission]
    total_delay: Fraction
    delivered: Counter = field(default_factory=Counter)

    def __len__(self):
        return len(self.transmissions)

    def per_round_counts(self) -> Counter:
        return Counter(x.round for x in self.transmissions)

    def without(self, index: int) -> "Transcript":
        """Copy with transmission ``index`` dropped (for fault injection)."""
        kept = self.transmissions[:index] + self.transmissions[index + 1:]
        delivered = Counter()
        for x in kept:
            for g in x.groups:
                for u, s in zip(g.users, g.payload):
                    delivered[(u, s.storage, s.mini)] += 1
        return Transcript(kept, sum((x.duration for x in kept), Fraction(0)), delivered)

    def to_json(self) -> list[dict]:
        return [x.to_json() for x in self.transmissions]


def concat_schedule(assoc: Association, antennas: int) -> list[list[tuple[int, ...]]]:
    """Split the N0-fold concatenation of each cache's users into N0-tuples.

    Cache λ yields exactly |U_λ| tuples.  Empty caches yield none.
    """
    out = []
    for lam, users in enumerate(assoc.caches, 1):
        if users and len(users) < antennas:
            raise InvalidInstance(
                f"cache {lam} serves {len(users)} users, fewer than N0={antennas}"
            )
        s = list(users) * antennas
        out.append([tuple(s[i:i + antennas]) for i in range(0, len(s), antennas)])
    return out


def round_users(schedule: Sequence[Sequence[tuple[int, ...]]], j: int) -> set[int]:
    """Users served in round ``j`` (1-based)."""
    return {u for tuples in schedule if len(tuples) >= j for u in tuples[j - 1]}


def transmission_duration(params: SystemParams) -> Fraction:
    return Fraction(1, binomial(params.num_caches, params.t) * params.antennas)


def deliver(assoc: Association, demand: Sequence[int], params: SystemParams) -> Transcript:
    if assoc.num_users != params.num_users or assoc.num_caches != params.num_caches:
        raise InvalidInstance(
            f"association has {assoc.num_users} users / {assoc.num_caches} caches, "
            f"params say {params.num_users} / {params.num_caches}"
        )
    demand = validate_demand(demand, params.num_users, params.num_files)
    n0, t, lam_count = params.antennas, params.t, params.num_caches
    schedule = concat_schedule(assoc, n0)
    rounds = max(len(s) for s in schedule)
    duration = transmission_duration(params)

    q_sets = [(Q, [(lam, tuple(x for x in Q if x != lam)) for lam in Q])
              for Q in colex_subsets(lam_count, t + 1)]
    next_mini: dict[tuple[int, tuple[int, ...]], int] = {}
    delivered: Counter = Counter()
    transmissions: list[Transmission] = []

    for j in range(1, rounds + 1):
        tuples = [s[j - 1] if len(s) >= j else None for s in schedule]
        for Q, parts in q_sets:
            groups = []
            for lam, T in parts:
                users = tuples[lam - 1]
                if users is None:
                    continue
                payload = []
                for u in users:
                    l = next_mini.get((u, T), 0) + 1
                    if l > n0:
                        raise RuntimeError(f"mini-file overflow for user {u}, T={T}")
                    next_mini[(u, T)] = l
                    delivered[(u, T, l)] += 1
                    payload.append(SubfileId(demand[u - 1], T, l))
                groups.append(PrecodedGroup(lam, users, tuple(payload)))
            if groups:
                transmissions.append(Transmission(j, Q, tuple(groups), duration))

    return Transcript(transmissions, duration * len(transmissions), delivered)


def closed_form_delay(profile: Profile | Sequence[int], antennas: int, t: int) -> Fraction:
    """(1/N0) · Σ_{r=1}^{Λ-t} L_r C(Λ-r, t) / C(Λ, t) for integer t."""
    profile = as_profile(profile)
    lam = profile.num_caches
    if not 0 <= t <= lam:
        raise ValueError(f"t must lie in [0, {lam}], got {t}")
    num = sum(profile[r - 1] * binomial(lam - r, t) for r in range(1, lam - t + 1))
    return Fraction(num, binomial(lam, t) * antennas)


def round_transmission_counts(profile: Profile | Sequence[int], t: int) -> list[int]:
    """C(Λ, t+1) - C(a_j, t+1) for each round j, a_j = number of idle caches."""
    profile = as_profile(profile)
    lam = profile.num_caches
    out = []
    for j in range(1, profile[0] + 1):
        idle = sum(1 for c in profile if c < j)
        out.append(binomial(lam, t + 1) - binomial(idle, t + 1))
    return out


def closed_form_delay_check(transcript: Transcript, profile, params: SystemParams) -> bool:
    return transcript.total_delay == closed_form_delay(profile, params.antennas, params.t)


def missing_deliveries(transcript: Transcript, assoc: Association, params: SystemParams) -> list:
    """(user, T, l) triples that should have been delivered exactly once but were not."""
    bad = []
    subsets = colex_subsets(params.num_caches, params.t)
    for lam, users in enumerate(assoc.caches, 1):
        for u in users:
            for T in subsets:
                if lam in T:
                    continue
                for l in range(1, params.antennas + 1):
                    if transcript.delivered.get((u, T, l), 0) != 1:
                        bad.append((u, T, l))
    home = assoc.cache_of()
    extra = {k for k in transcript.delivered if home.get(k[0]) in k[1]}
    return bad + sorted(extra)
