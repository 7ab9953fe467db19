"""Receiver-side verification of a delivery transcript.

Two decoders:

* :func:`decode_symbolic` models the high-SNR MISO channel at the level of
  labels.  A receiver gets its own group's payload free of intra-group
  interference (zero forcing) and sees every payload of every other group
  as interference, which it can remove only if it holds that mini-file in
  its cache.
* :func:`decode_xor` runs the single-antenna channel on real bytes.  The wire
  value of a transmission is the XOR of its payload blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .combinatorics import colex_subsets
from .delivery import Transcript, Transmission
from .model import Association, CacheContents, InvalidInstance, SubfileId, SystemParams
from .placement import Library, materialize, subfile_ids


@dataclass
class UserStatus:
    missing: list[SubfileId] = field(default_factory=list)
    uncancellable: list[SubfileId] = field(default_factory=list)

    @property
    def recovered(self) -> bool:
        return not self.missing and not self.uncancellable

    def to_json(self) -> dict:
        return {
            "recovered": self.recovered,
            "missing": [s.to_json() for s in self.missing],
            "uncancellable": [s.to_json() for s in self.uncancellable],
        }


@dataclass
class DecodeReport:
    per_user: dict[int, UserStatus]

    @property
    def all_recovered(self) -> bool:
        return all(s.recovered for s in self.per_user.values())

    def failed_users(self) -> set[int]:
        return {u for u, s in self.per_user.items() if not s.recovered}

    def recovered_count(self) -> int:
        return sum(1 for s in self.per_user.values() if s.recovered)

    def summary(self) -> str:
        n = len(self.per_user)
        return f"{self.recovered_count()}/{n} users recovered"

    def to_json(self) -> dict:
        return {str(u): s.to_json() for u, s in sorted(self.per_user.items())}


def needed_minifiles(user: int, cache: int, demand: Sequence[int], params: SystemParams):
    """Mini-files of the user's request that its own cache does not hold."""
    return [
        SubfileId(demand[user - 1], T, l)
        for T in colex_subsets(params.num_caches, params.t)
        if cache not in T
        for l in range(1, params.antennas + 1)
    ]


def _cache_sets(caches: Sequence[CacheContents]) -> dict[int, frozenset]:
    return {c.cache: c.stored for c in caches}


def _receptions(x: Transmission):
    """Yield (user, wanted, interference) for every receiver of ``x``."""
    for gi, g in enumerate(x.groups):
        others = [s for gj, h in enumerate(x.groups) if gj != gi for s in h.payload]
        for u, wanted in zip(g.users, g.payload):
            yield u, wanted, others


def decode_symbolic(
    transcript: Transcript,
    caches: Sequence[CacheContents],
    assoc: Association,
    demand: Sequence[int],
    params: SystemParams,
) -> DecodeReport:
    stored = _cache_sets(caches)
    home = assoc.cache_of()
    got: dict[int, set[SubfileId]] = {u: set() for u in home}
    bad: dict[int, list[SubfileId]] = {u: [] for u in home}

    for x in transcript.transmissions:
        for u, wanted, interference in _receptions(x):
            cache = stored.get(home[u], frozenset())
            blocked = [s for s in interference if s not in cache]
            if blocked:
                bad[u].extend(blocked)
            else:
                got[u].add(wanted)

    report = {}
    for u, lam in home.items():
        need = needed_minifiles(u, lam, demand, params)
        report[u] = UserStatus(
            missing=[s for s in need if s not in got[u]],
            uncancellable=sorted(set(bad[u])),
        )
    return DecodeReport(report)


def _xor(blocks) -> bytes:
    blocks = list(blocks)
    acc = bytearray(len(blocks[0]))
    for b in blocks:
        for i, byte in enumerate(b):
            acc[i] ^= byte
    return bytes(acc)


def encode_xor(transcript: Transcript, blocks: Mapping[SubfileId, bytes]) -> list[bytes]:
    """Wire bytes of every transmission: XOR of all its payload blocks."""
    return [_xor(blocks[s] for s in x.payloads()) for x in transcript.transmissions]


def decode_xor(
    transcript: Transcript,
    caches: Sequence[CacheContents],
    library: Library,
    assoc: Association,
    demand: Sequence[int],
    params: SystemParams,
    wire: Sequence[bytes] | None = None,
) -> DecodeReport:
    """Byte-exact decoding for the single-antenna channel.

    The sender side materializes the library to compute wire bytes (unless
    ``wire`` is supplied).  Each receiver then only uses the bytes of its
    own cache plus the wire values.
    """
    if params.antennas != 1:
        raise InvalidInstance("XOR decoding applies to the single-antenna channel only")
    blocks = materialize(library, params)
    if wire is None:
        wire = encode_xor(transcript, blocks)
    if len(wire) != len(transcript.transmissions):
        raise InvalidInstance("wire values do not match the transcript")

    home = assoc.cache_of()
    cache_blocks = {c.cache: {s: blocks[s] for s in c.stored} for c in caches}
    recovered: dict[int, dict[SubfileId, bytes]] = {u: {} for u in home}
    bad: dict[int, list[SubfileId]] = {u: [] for u in home}

    for x, value in zip(transcript.transmissions, wire):
        for u, wanted, interference in _receptions(x):
            local = cache_blocks.get(home[u], {})
            blocked = [s for s in interference if s not in local]
            if blocked:
                bad[u].extend(blocked)
                continue
            recovered[u][wanted] = _xor([value] + [local[s] for s in interference])

    report = {}
    for u, lam in home.items():
        n = demand[u - 1]
        local = cache_blocks.get(lam, {})
        have = {**{s: b for s, b in local.items() if s.file == n}, **recovered[u]}
        missing = [s for s in subfile_ids(n, params) if s not in have]
        if not missing:
            # a wrong byte anywhere is reported against the offending piece
            missing = [s for s in subfile_ids(n, params) if have[s] != blocks[s]]
        report[u] = UserStatus(missing=missing, uncancellable=sorted(set(bad[u])))
    return DecodeReport(report)
