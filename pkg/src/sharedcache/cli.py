"""Command-line front end.

Exit codes: 0 success, 2 bad input, 3 decode failure, 4 delay mismatch,
5 oracle failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence

from . import __version__
from .bounds import (
    build_side_info_graph,
    c_coefficients,
    converse_bound,
    is_acyclic,
    ranked_selection,
    optimal_delay,
    q_coefficient,
)
from .combinatorics import format_rational, parse_rational
from .decode import decode_symbolic, decode_xor
from .delivery import closed_form_delay, deliver
from .model import (
    Association,
    InvalidInstance,
    Profile,
    SystemParams,
    association_from_profile,
    demand_blocks,
    profile_of,
    random_profile,
    sort_permutation,
    worst_case_demand,
)
from .multirequest import mfr_decode, mfr_delay, mfr_deliver
from .oracles import (
    EnumerationTooLarge,
    qi_sweep_instances,
    qi_table,
    transmission_count_identity,
)
from .placement import place, random_library

EXIT_OK, EXIT_INPUT, EXIT_DECODE, EXIT_MISMATCH, EXIT_ORACLE = 0, 2, 3, 4, 5


class InputError(Exception):
    pass


def parse_profile(text: str) -> Profile:
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise InputError("empty profile")
    try:
        return Profile.of(int(p) for p in parts)
    except ValueError as exc:
        raise InputError(f"bad profile {text!r}: {exc}") from exc


def fmt_value(q: Fraction) -> str:
    return f"{format_rational(q)} ({float(q):.6f})"


def _memory_point(args, num_caches: int) -> Fraction:
    if args.gamma is not None:
        t = parse_rational(args.gamma) * num_caches
    else:
        t = parse_rational(args.t)
    if t < 0 or t > num_caches:
        raise InputError(f"t={t} outside [0, {num_caches}]")
    return t


def _integer_t(t: Fraction) -> int:
    if t.denominator != 1:
        raise InputError(f"simulation needs an integer t = Λγ, got {t}")
    return int(t)


# --- commands ----------------------------------------------------------------

def cmd_delay(args) -> int:
    profile = parse_profile(args.profile)
    if args.users is not None and profile.num_users != args.users:
        raise InputError(f"profile sums to {profile.num_users}, expected K={args.users}")
    t = _memory_point(args, profile.num_caches)
    if not profile.supports_antennas(args.antennas):
        msg = f"non-zero profile entries below N0={args.antennas}: {profile.counts}"
        if args.simulate:
            raise InputError(msg)
        print(f"warning: {msg}; the formula is not achievable as stated", file=sys.stderr)
    print(fmt_value(optimal_delay(profile, args.antennas, t)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    stream = sys.stdin if args.profiles == "-" else open(args.profiles, encoding="utf-8")
    with stream:
        lines = stream.read().splitlines()
    profiles = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            p = parse_profile(line)
        except InputError as exc:
            raise InputError(f"line {lineno}: {exc}") from exc
        if p.num_caches != args.caches or p.num_users != args.users:
            raise InputError(
                f"line {lineno}: profile {line.strip()!r} is not {args.caches} caches "
                f"summing to K={args.users}"
            )
        profiles.append(p)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["profile", "t", "gamma_num", "gamma_den", "delay_num", "delay_den"])
    for p in profiles:
        label = ",".join(map(str, p.counts))
        for t in range(args.caches + 1):
            gamma = Fraction(t, args.caches)
            delay = optimal_delay(p, args.antennas, t)
            out.writerow([label, t, gamma.numerator, gamma.denominator,
                          delay.numerator, delay.denominator])
    return EXIT_OK


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _instance(args):
    """Association, demand and params for simulate / mfr-simulate."""
    if args.assoc:
        assoc = Association.from_json(_load_json(args.assoc))
    elif args.profile:
        assoc = association_from_profile(parse_profile(args.profile), args.seed)
    else:
        raise InputError("give --assoc FILE or --profile")
    k = assoc.num_users
    t = _integer_t(_memory_point(args, assoc.num_caches))
    params = SystemParams(args.files or k, k, assoc.num_caches, args.antennas, t)
    if args.demand_file:
        demand = tuple(_load_json(args.demand_file)["demand"])
    elif args.demand == "worst":
        demand = worst_case_demand(params, args.seed)
    else:
        rng = random.Random(args.seed)
        demand = tuple(rng.randint(1, params.num_files) for _ in range(k))
    return assoc, demand, params


def _write_json(path: Optional[str], obj) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=1)
            fh.write("\n")


def cmd_simulate(args) -> int:
    assoc, demand, params = _instance(args)
    profile = profile_of(assoc)
    transcript = deliver(assoc, demand, params)
    expected = closed_form_delay(profile, params.antennas, params.t)
    caches = place(params)
    report = decode_symbolic(transcript, caches, assoc, demand, params)
    ok_decode = report.all_recovered
    lines = [
        f"profile: {','.join(map(str, profile.counts))}  K={params.num_users} N={params.num_files} "
        f"caches={params.num_caches} t={params.t} N0={params.antennas}",
        f"transmissions: {len(transcript)}",
        f"measured delay: {fmt_value(transcript.total_delay)}",
        f"closed-form delay: {fmt_value(expected)}",
        "MATCH" if transcript.total_delay == expected else "MISMATCH",
        f"symbolic decode: {report.summary()}",
    ]
    if params.antennas == 1:
        library = random_library(params, args.seed)
        xr = decode_xor(transcript, caches, library, assoc, demand, params)
        ok_decode = ok_decode and xr.all_recovered
        lines.append(f"byte decode: {xr.summary()}")
    print("\n".join(lines))
    _write_json(args.out, transcript.to_json())
    _write_json(args.report, report.to_json())
    if not ok_decode:
        return EXIT_DECODE
    if transcript.total_delay != expected:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_converse(args) -> int:
    profile = parse_profile(args.profile)
    if args.resolution < 1:
        raise InputError("--resolution must be >= 1")
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["t_num", "t_den", "bound_num", "bound_den"])
    for step in range(profile.num_caches * args.resolution + 1):
        t = Fraction(step, args.resolution)
        b = converse_bound(profile, args.antennas, t, args.files)
        out.writerow([t.numerator, t.denominator, b.numerator, b.denominator])
    return EXIT_OK


# --- verify suites -----------------------------------------------------------

def suite_qi(args) -> tuple[bool, str]:
    checked = 0
    for p, n in qi_sweep_instances(max_class=args.max_enum, max_files=args.max_files):
        for i, values in qi_table(p, n, cap=args.max_enum).items():
            checked += 1
            if values != {q_coefficient(i, p, n)}:
                return False, f"profile {p.counts}, N={n}, i={i}: enumerated {sorted(values)}"
    return True, f"{checked} (instance, i) pairs"


def suite_identity(args) -> tuple[bool, str]:
    rng = random.Random(args.seed)
    for _ in range(args.samples):
        lam = rng.randint(1, 8)
        k = rng.randint(lam, 40)
        p = random_profile(rng, k, lam)
        t = rng.randint(0, lam)
        if not transmission_count_identity(p, t):
            return False, f"profile {p.counts}, t={t}"
    return True, f"{args.samples} random (profile, t)"


def suite_acyclic(args) -> tuple[bool, str]:
    rng = random.Random(args.seed)
    graphs = 0
    for _ in range(args.samples):
        lam = rng.randint(1, 4)
        k = rng.randint(lam, 8)
        p = random_profile(rng, k, lam)
        assoc = association_from_profile(p, rng.randrange(1 << 30))
        demand = worst_case_demand(SystemParams(k, k, lam), rng.randrange(1 << 30))
        g = build_side_info_graph(demand_blocks(assoc, demand), assoc.caches)
        best = len(ranked_selection(g, sort_permutation(assoc)))
        for sigma in permutations(range(1, lam + 1)):
            sel = ranked_selection(g, sigma)
            graphs += 1
            if not is_acyclic(g, sel.nodes):
                return False, f"cycle for sizes {assoc.sizes()}, sigma={sigma}"
            if len(sel) > best:
                return False, f"sigma={sigma} beats population order for sizes {assoc.sizes()}"
    return True, f"{graphs} selections"


def suite_tightness(args) -> tuple[bool, str]:
    rng = random.Random(args.seed)
    for _ in range(args.samples):
        lam = rng.randint(1, 8)
        n0 = rng.randint(1, 3)
        k = rng.randint(max(lam, n0), 40)
        p = random_profile(rng, k, lam, min_nonzero=n0)
        c = c_coefficients(p)
        if any(a < b for a, b in zip(c, c[1:])):
            return False, f"c_i not monotone for {p.counts}"
        for t in range(lam + 1):
            if converse_bound(p, n0, t) != optimal_delay(p, n0, t):
                return False, f"profile {p.counts}, N0={n0}, t={t}"
    return True, f"{args.samples} random profiles, every integer t"


SUITES = {
    "qi": suite_qi,
    "identity": suite_identity,
    "acyclic": suite_acyclic,
    "tightness": suite_tightness,
}


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = False
    print(f"{'suite':<10} {'result':<6} detail")
    for name in names:
        try:
            ok, detail = SUITES[name](args)
        except EnumerationTooLarge as exc:
            ok, detail = False, str(exc)
        failed |= not ok
        print(f"{name:<10} {'PASS' if ok else 'FAIL':<6} {detail}")
    return EXIT_ORACLE if failed else EXIT_OK


def cmd_mfr_delay(args) -> int:
    profile = parse_profile(args.requests)
    t = _memory_point(args, profile.num_caches)
    print(fmt_value(mfr_delay(profile, t)))
    return EXIT_OK


def cmd_mfr_simulate(args) -> int:
    args.assoc, args.profile = args.requests_json, args.requests
    args.antennas = 1
    requests, demand, params = _instance(args)
    transcript = mfr_deliver(requests, demand, params)
    expected = mfr_delay(profile_of(requests), params.t)
    report = mfr_decode(transcript, requests, demand, params)
    print("\n".join([
        f"transmissions: {len(transcript)}",
        f"measured delay: {fmt_value(transcript.total_delay)}",
        f"closed-form delay: {fmt_value(expected)}",
        "MATCH" if transcript.total_delay == expected else "MISMATCH",
        f"decode: {report.summary()}",
    ]))
    _write_json(args.out, transcript.to_json())
    if not report.all_recovered:
        return EXIT_DECODE
    if transcript.total_delay != expected:
        return EXIT_MISMATCH
    return EXIT_OK


# --- parser -------------------------------------------------------------------

def _add_memory(p, required: bool = True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--t", help="cache redundancy t = Λγ (integer or p/q)")
    g.add_argument("--gamma", help="normalized cache size γ = M/N as p/q")


def _add_instance(p):
    p.add_argument("--files", type=int, help="library size N (default K)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--demand", choices=["worst", "random"], default="worst")
    p.add_argument("--demand-file", help='JSON {"demand": [...]} overriding --demand')
    p.add_argument("--out", help="write the transcript JSON here")
    _add_memory(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sharedcache", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("delay", help="optimal delay of a profile")
    p.add_argument("--profile", required=True, help="comma-separated user counts")
    p.add_argument("--antennas", type=int, default=1)
    p.add_argument("--users", type=int, help="check the profile sums to K")
    p.add_argument("--simulate", action="store_true",
                   help="require the profile to be runnable by the scheme")
    _add_memory(p)
    p.set_defaults(func=cmd_delay)

    p = sub.add_parser("sweep", help="delay of several profiles at every integer t, as CSV")
    p.add_argument("--users", "-K", type=int, required=True)
    p.add_argument("--caches", type=int, required=True)
    p.add_argument("--antennas", type=int, default=1)
    p.add_argument("--profiles", required=True, help="file with one profile per line, or -")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="run placement, delivery and decoding")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--assoc", help='association JSON {"caches": [[user, ...], ...]}')
    src.add_argument("--profile", help="profile; users are assigned from --seed")
    p.add_argument("--antennas", type=int, default=1)
    p.add_argument("--report", help="write the decode report JSON here")
    _add_instance(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("converse", help="converse bound on a grid of t, as CSV")
    p.add_argument("--profile", required=True)
    p.add_argument("--antennas", type=int, default=1)
    p.add_argument("--files", type=int, help="library size N (default K)")
    p.add_argument("--resolution", type=int, default=1, help="grid points per unit of t")
    p.set_defaults(func=cmd_converse)

    p = sub.add_parser("verify", help="run brute-force oracle suites")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--max-enum", type=int, default=10**5, help="largest demand class to enumerate")
    p.add_argument("--max-files", type=int, default=6)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mfr-delay", help="optimal delay with multiple file requests")
    p.add_argument("--requests", required=True, help="comma-separated request counts per user")
    _add_memory(p)
    p.set_defaults(func=cmd_mfr_delay)

    p = sub.add_parser("mfr-simulate", help="simulate multiple file requests")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--requests-json", help='JSON {"caches": [[slot, ...], ...]} per user')
    src.add_argument("--requests", help="request counts per user")
    _add_instance(p)
    p.set_defaults(func=cmd_mfr_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, InvalidInstance, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
