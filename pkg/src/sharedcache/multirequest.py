"""Multiple file requests on a shared link, via the shared-cache engine.

Λ users each own one cache and together request K files.  Request slot k
(1..K) plays the role of a shared-cache "user", and the owner λ of slot k
plays the role of its cache.  The requests of one owner are then served in
time-sharing, one per round.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .bounds import optimal_delay
from .combinatorics import Number
from .decode import DecodeReport, UserStatus, decode_symbolic
from .delivery import Transcript, deliver
from .model import Association, InvalidInstance, SystemParams
from .placement import place


def _single_antenna(antennas: int) -> None:
    if antennas != 1:
        raise InvalidInstance(
            "multiple file requests are only defined for the single-antenna shared link"
        )


def mfr_delay(profile, t: Number, antennas: int = 1) -> Fraction:
    """Optimal delay when user r requests L_r files."""
    _single_antenna(antennas)
    return optimal_delay(profile, 1, t)


def mfr_deliver(requests: Association, demand: Sequence[int], params: SystemParams) -> Transcript:
    """``requests.caches[λ-1]`` lists the request slots of user λ; ``demand[k-1]``
    is the file behind slot k.  Group "users" in the transcript are slots.
    """
    _single_antenna(params.antennas)
    return deliver(requests, demand, params)


def mfr_decode(
    transcript: Transcript, requests: Association, demand: Sequence[int], params: SystemParams
) -> DecodeReport:
    """Per-owner report: user λ succeeds iff every one of its requests does."""
    slots = decode_symbolic(transcript, place(params), requests, demand, params)
    per_owner = {}
    for lam, owned in enumerate(requests.caches, 1):
        status = UserStatus()
        for k in owned:
            status.missing.extend(slots.per_user[k].missing)
            status.uncancellable.extend(slots.per_user[k].uncancellable)
        per_owner[lam] = status
    return DecodeReport(per_owner)
