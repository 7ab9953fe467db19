"""Uncoded placement over Λ caches and byte-level payload materialization."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .combinatorics import binomial, colex_subsets
from .model import CacheContents, InvalidInstance, SubfileId, SystemParams


@dataclass(frozen=True)
class Library:
    files: tuple[bytes, ...]

    def __post_init__(self):
        files = tuple(bytes(f) for f in self.files)
        object.__setattr__(self, "files", files)
        if not files:
            raise InvalidInstance("library is empty")
        if len({len(f) for f in files}) != 1:
            raise InvalidInstance("all library files must have the same length")

    @property
    def file_size(self) -> int:
        return len(self.files[0])

    def __len__(self):
        return len(self.files)

    def file(self, n: int) -> bytes:
        return self.files[n - 1]


def pieces_per_file(params: SystemParams) -> int:
    return binomial(params.num_caches, params.t) * params.antennas


def random_library(params: SystemParams, seed: int, block_size: int = 4) -> Library:
    """Seeded library whose file size is ``block_size`` bytes per mini-file."""
    rng = random.Random(seed)
    size = pieces_per_file(params) * block_size
    return Library(tuple(rng.randbytes(size) for _ in range(params.num_files)))


def subfile_ids(n: int, params: SystemParams) -> list[SubfileId]:
    """Canonical order of a file's pieces: storage sets in colex order, then mini index."""
    return [
        SubfileId(n, T, l)
        for T in colex_subsets(params.num_caches, params.t)
        for l in range(1, params.antennas + 1)
    ]


def place(params: SystemParams) -> list[CacheContents]:
    """Cache λ stores every mini-file whose storage set contains λ.

    Depends only on (N, Λ, t, N0); the association and demands are never
    consulted.
    """
    subsets = colex_subsets(params.num_caches, params.t)
    out = []
    for lam in range(1, params.num_caches + 1):
        stored = frozenset(
            SubfileId(n, T, l)
            for n in range(1, params.num_files + 1)
            for T in subsets
            if lam in T
            for l in range(1, params.antennas + 1)
        )
        out.append(CacheContents(lam, stored))
    return out


def materialize(library: Library, params: SystemParams) -> dict[SubfileId, bytes]:
    if len(library) != params.num_files:
        raise InvalidInstance(f"library has {len(library)} files, expected {params.num_files}")
    pieces = pieces_per_file(params)
    size = library.file_size
    if pieces == 0 or size % pieces or size < pieces:
        raise InvalidInstance(
            f"file size {size} is not a positive multiple of C(Λ,t)·N0 = {pieces}"
        )
    block = size // pieces
    out: dict[SubfileId, bytes] = {}
    for n in range(1, params.num_files + 1):
        data = library.file(n)
        for i, sid in enumerate(subfile_ids(n, params)):
            out[sid] = data[i * block:(i + 1) * block]
    return out


def reassemble(n: int, blocks: Mapping[SubfileId, bytes], params: SystemParams) -> bytes:
    """Concatenate file ``n``'s blocks in canonical order (KeyError if one is absent)."""
    return b"".join(blocks[sid] for sid in subfile_ids(n, params))


def cache_bytes(cache: CacheContents, blocks: Mapping[SubfileId, bytes]) -> dict[SubfileId, bytes]:
    return {sid: blocks[sid] for sid in cache.stored}


def stored_bytes(caches: Sequence[CacheContents], blocks: Mapping[SubfileId, bytes]) -> list[int]:
    return [sum(len(blocks[sid]) for sid in c.stored) for c in caches]
