"""Command-line front end: every experiment as a subcommand.

Exit codes: 0 success, 2 usage error, 3 budget refusal.  Subcommands that
write CSV take a seed and produce byte-identical files for any worker count.
A flat key=value config file can pre-set any flag of a subcommand
(``--config run.cfg``); flags given on the command line win.  Config files
cannot supply positional arguments.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .channels import AdditiveChannel, FiniteChannel, mutual_information
from .distributions import (
    CyclicDistribution,
    IntegerDistribution,
    convolve_integer,
    entropy,
    entropy_diff_sum_minus_diff,
    exact_entropy_diff_uniform,
    negate,
    weighted_convolve,
)
from .errors import BudgetError
from .kernels import conditional_spread, optimal_coefficient, two_optimal_kernel
from .polar import ReliabilityProfile, construct, noise_digest
from .simulate import (
    bler_curve,
    martingale_sample,
    spread_scatter,
    write_bler_csv,
    write_martingale_csv,
    write_spread_csv,
)
from .sumsets import (
    IntSet,
    difference_set,
    find_target_diff,
    mstd_search,
    sidon_set,
    stein_iterate,
    sumset,
)

CACHE_ENV = "POLARSUM_CACHE"
DEFAULT_CACHE_DIR = ".polarsum-cache"

PRESET_SETS = {
    "conway": (0, 2, 3, 4, 7, 11, 12, 14),
    "marica": (1, 2, 3, 5, 8, 9, 13, 15, 16),
}

SIM_PRESETS = {
    "figure2": dict(
        q=3, noise="0.7,0.3,0", n=1024, c="1,2",
        rates="0.1,0.125,0.15,0.175,0.2,0.225,0.25,0.275,0.3,0.325,0.35,"
              "0.375,0.4,0.425,0.45,0.475,0.5,0.525,0.55,0.575,0.6",
        construct_trials=100_000, decode_trials=10_000,
    ),
    "figure3": dict(
        q=5, noise="0.5,0.5,0,0,0", n=1024, c="2",
        rates="0.1,0.2,0.3,0.4,0.45",
        construct_trials=100_000, decode_trials=10_000,
    ),
    "noiseless": dict(
        q=3, noise="1,0,0", n=64, c="1",
        rates="0.25,0.5,0.75,1.0",
        construct_trials=1_000, decode_trials=1_000,
    ),
}


# ---------------------------------------------------------------------------
# argument parsing helpers

def _parse_int_list(text: str, what: str):
    out = []
    for pos, tok in enumerate(text.split(","), 1):
        tok = tok.strip()
        try:
            out.append(int(tok))
        except ValueError:
            raise ValueError(f"bad {what} {tok!r} at position {pos}")
    return out


def _parse_float_list(text: str, what: str):
    out = []
    for pos, tok in enumerate(text.split(","), 1):
        tok = tok.strip()
        try:
            out.append(float(tok))
        except ValueError:
            raise ValueError(f"bad {what} {tok!r} at position {pos}")
    return out


def _parse_probs(text: str):
    """Probability tokens: 'a/b' stays an exact Fraction, decimals are floats;
    an all-exact vector enables exact-rational comparisons downstream."""
    out = []
    for pos, tok in enumerate(text.split(","), 1):
        tok = tok.strip()
        try:
            if "/" in tok:
                out.append(Fraction(tok))
            elif "." in tok or "e" in tok.lower():
                out.append(float(tok))
            else:
                out.append(Fraction(int(tok)))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"bad probability {tok!r} at position {pos}")
    return out


def _parse_group(text: str):
    if text == "z":
        return None
    if text.startswith("z") and text[1:].isdigit():
        m = int(text[1:])
        if m < 1:
            raise ValueError(f"bad group {text!r}")
        return m
    raise ValueError(f"bad group {text!r}: expected 'z' or 'zN'")


def _emit(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as f:
            f.write(text)
        print(f"wrote {out_path}")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_entropy_diff(args) -> int:
    raw = args.input
    if raw in PRESET_SETS:
        if args.group != "z":
            raise ValueError(f"preset {raw!r} is a set of integers; drop --group")
        elements, modulus = PRESET_SETS[raw], None
        is_set = True
    else:
        modulus = _parse_group(args.group)
        tokens = raw.split(",")
        is_set = not any("." in t or "/" in t for t in tokens)
        if is_set:
            elements = tuple(_parse_int_list(raw, "element"))
        else:
            probs = _parse_probs(raw)

    if is_set:
        if modulus is None:
            p = IntegerDistribution.uniform_on(elements)
        else:
            p = CyclicDistribution.uniform_on(elements, modulus)
    else:
        if modulus is None:
            p = IntegerDistribution(tuple(range(len(probs))), tuple(probs))
        else:
            if len(probs) != modulus:
                raise ValueError(f"need {modulus} probabilities for group z{modulus}")
            p = CyclicDistribution(modulus, tuple(probs))

    if isinstance(p, CyclicDistribution):
        sum_dist = weighted_convolve(p, p, 1)
        diff_dist = weighted_convolve(p, negate(p), 1)
    else:
        sum_dist = convolve_integer(p, p, +1)
        diff_dist = convolve_integer(p, p, -1)
    print(f"H(X+Y) = {entropy(sum_dist)!r}")
    print(f"H(X-Y) = {entropy(diff_dist)!r}")
    print(f"difference = {entropy_diff_sum_minus_diff(p)!r}")
    if args.exact:
        if not is_set:
            raise ValueError("--exact needs a set input (uniform distribution)")
        ratio = exact_entropy_diff_uniform(elements, modulus)
        print(f"exact difference = {ratio}")
    return 0


def _cmd_mstd_search(args) -> int:
    if (args.modulus is None) == (args.width is None):
        raise ValueError("give exactly one of --mod or --width")
    found = mstd_search(
        modulus=args.modulus,
        width=args.width,
        max_size=args.max_size,
        canonical=args.canonical,
    )
    lines = [
        "# polarsum csv v1 mstd\n",
        f"# modulus={args.modulus} width={args.width} "
        f"max_size={args.max_size} canonical={args.canonical}\n",
        "m,size,elements,sum_size,diff_size\n",
    ]
    count = 0
    for s in found:
        row = (
            f"{s.modulus or 0},{len(s)},{';'.join(str(e) for e in s.elements)},"
            f"{len(sumset(s, s))},{len(difference_set(s, s))}\n"
        )
        lines.append(row)
        count += 1
        if args.limit is not None and count >= args.limit:
            break
    _emit("".join(lines), args.out)
    return 0


def _cmd_stein(args) -> int:
    if args.set in PRESET_SETS:
        base = IntSet(PRESET_SETS[args.set])
    else:
        base = IntSet.of(_parse_int_list(args.set, "element"))
    trace = stein_iterate(base, args.levels)
    current = base
    print(
        f"level 0: size={len(current)} "
        f"sum={len(sumset(current, current))} diff={len(difference_set(current, current))}"
    )
    for j, (level_set, m) in enumerate(trace.levels, 1):
        print(
            f"level {j}: multiplier={m} size={len(level_set)} "
            f"sum={len(sumset(level_set, level_set))} "
            f"diff={len(difference_set(level_set, level_set))}"
        )
    return 0


def _cmd_sidon(args) -> int:
    s = sidon_set(args.n)
    print("elements: " + ",".join(str(e) for e in s.elements))
    print(f"|A-A| = {len(difference_set(s, s))}")
    return 0


def _cmd_target_diff(args) -> int:
    dist = find_target_diff(args.m, args.tol)
    achieved = entropy_diff_sum_minus_diff(dist)
    print(f"target = {args.m!r}")
    print(f"achieved = {achieved!r}")
    print(f"error = {abs(achieved - args.m)!r}")
    print(f"support size = {len(dist.support)}")
    return 0


def _cmd_kernel_opt(args) -> int:
    probs = _parse_probs(args.noise)
    if len(probs) != args.q:
        raise ValueError(f"need {args.q} probabilities for q={args.q}")
    mu = CyclicDistribution(args.q, tuple(probs))
    ties = sorted(optimal_coefficient(mu))  # validates primality before any output
    print("lambda,spread,cond_entropy")
    for lam in range(1, args.q):
        report = conditional_spread(mu, lam)
        print(f"{lam},{report.spread!r},{report.cond_entropy!r}")
    print("optimal: {" + ",".join(str(t) for t in ties) + "}")
    return 0


def _load_or_build_profile(channel, n, c, trials, seed, workers, cache_dir):
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"profile_q{channel.q}_n{n}_c{c}_t{trials}_s{seed}.txt")
    digest = noise_digest(channel)
    if os.path.exists(path):
        try:
            profile = ReliabilityProfile.load(path)
        except (ValueError, OSError) as e:
            print(f"warning: unreadable cache {path} ({e}); rebuilding", file=sys.stderr)
        else:
            if profile.digest == digest and (profile.q, profile.n, profile.c, profile.trials, profile.seed) == (channel.q, n, c, trials, seed):
                return profile
            print(f"warning: cache {path} does not match requested channel; rebuilding", file=sys.stderr)
    profile = construct(channel, n, c, trials, seed, workers=workers)
    profile.save(path)
    return profile


def _cmd_polar_sim(args) -> int:
    if args.preset is not None:
        preset = SIM_PRESETS[args.preset]
        for key, value in preset.items():
            if getattr(args, key) is None:
                setattr(args, key, value)
    missing = [k for k in ("q", "noise", "n", "c") if getattr(args, k) is None]
    if missing:
        raise ValueError("missing " + ", ".join("--" + k.replace("_", "-") for k in missing))
    for key, fallback in (("rates", "0.1,0.2,0.3,0.4,0.5"),
                          ("construct_trials", 10_000), ("decode_trials", 1_000)):
        if getattr(args, key) is None:
            setattr(args, key, fallback)

    q = int(args.q)
    n = int(args.n)
    probs = _parse_probs(str(args.noise))
    if len(probs) != q:
        raise ValueError(f"need {q} probabilities for q={q}")
    noise = CyclicDistribution(q, tuple(probs))
    channel = AdditiveChannel(q, noise)
    if str(args.c) == "auto":
        cs = [two_optimal_kernel(noise).c]
        print(f"auto kernel coefficient: c={cs[0]}")
    else:
        cs = _parse_int_list(str(args.c), "kernel coefficient")
    rates = _parse_float_list(str(args.rates), "rate")
    construct_trials = int(args.construct_trials)
    decode_trials = int(args.decode_trials)
    cache_dir = args.cache_dir or os.environ.get(CACHE_ENV) or DEFAULT_CACHE_DIR

    out_template = args.out
    if out_template is not None and len(cs) > 1 and "{c}" not in out_template:
        raise ValueError("--out needs a {c} placeholder when several coefficients run")
    for c in cs:
        profile = _load_or_build_profile(
            channel, n, c, construct_trials, args.seed, args.workers, cache_dir
        )
        points = bler_curve(
            channel, n, c, rates, construct_trials, decode_trials,
            args.seed, workers=args.workers, profile=profile,
        )
        if out_template is None:
            out_path = f"bler_q{q}_n{n}_c{c}.csv"
        else:
            out_path = out_template.replace("{c}", str(c))
        params = [
            ("q", q), ("n", n), ("c", c), ("noise", str(args.noise)),
            ("construct_trials", construct_trials), ("decode_trials", decode_trials),
            ("seed", args.seed),
        ]
        write_bler_csv(points, out_path, params)
        print(f"c={c}: wrote {out_path}")
    return 0


def _parse_family(text: str):
    """'bec:0.3' (closed form) or 'bsc:0.1' (explicit channel)."""
    name, _, param = text.partition(":")
    if name == "bec":
        eps = float(param) if param else 0.5
        return eps, f"bec:{eps!r}", 1 - eps
    if name == "bsc":
        p = float(param) if param else 0.1
        channel = FiniteChannel.binary_symmetric(p)
        return channel, f"bsc:{p!r}", mutual_information(channel)
    raise ValueError(f"unknown family {text!r}: expected bec:EPS or bsc:P")


def _cmd_martingale(args) -> int:
    channel, label, initial = _parse_family(args.family)
    paths = martingale_sample(channel, args.depth, args.paths, args.seed)
    params = [
        ("family", label), ("depth", args.depth), ("paths", args.paths),
        ("seed", args.seed), ("initial_I", repr(initial)),
    ]
    write_martingale_csv(paths, args.out, params)
    print(f"wrote {args.out}")
    return 0


def _cmd_spread_plot(args) -> int:
    rows = spread_scatter(args.family, args.points, args.seed)
    params = [("family", args.family), ("points", args.points), ("seed", args.seed)]
    write_spread_csv(rows, args.out, params)
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser assembly

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarsum",
        description="Sumset entropy gaps and q-ary polar code experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy-diff", help="H(X+Y), H(X-Y) and their gap for a set or distribution")
    p.add_argument("input", help="preset (conway, marica), comma-separated set, or probability vector")
    p.add_argument("--group", default="z", help="ambient group: z (default) or zN")
    p.add_argument("--exact", action="store_true", help="also print the exact log-ratio (sets only)")
    p.set_defaults(func=_cmd_entropy_diff)

    p = sub.add_parser("mstd-search", help="enumerate sets with |A+A| > |A-A|")
    p.add_argument("--mod", dest="modulus", type=int, help="search subsets of Z/MOD")
    p.add_argument("--width", type=int, help="search subsets of Z with diameter <= WIDTH")
    p.add_argument("--max-size", type=int, help="largest |A| to consider")
    p.add_argument("--canonical", action="store_true", help="one representative per affine class")
    p.add_argument("--limit", type=int, help="stop after this many results")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=_cmd_mstd_search)

    p = sub.add_parser("stein", help="iterate A -> A + m*A, squaring all cardinalities")
    p.add_argument("--set", default="conway", help="preset name or comma-separated integers")
    p.add_argument("--levels", type=int, default=1)
    p.set_defaults(func=_cmd_stein)

    p = sub.add_parser("sidon", help="greedy Sidon set with all differences distinct")
    p.add_argument("n", type=int, help="number of elements")
    p.set_defaults(func=_cmd_sidon)

    p = sub.add_parser("target-diff", help="construct a distribution hitting a target entropy gap")
    p.add_argument("--m", type=float, required=True, help="target H(X+Y) - H(X-Y), in nats")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=_cmd_target_diff)

    p = sub.add_parser("kernel-opt", help="spread table and optimal kernel coefficient")
    p.add_argument("--q", type=int, required=True, help="prime field size")
    p.add_argument("--noise", required=True, help="q probabilities (fractions stay exact)")
    p.set_defaults(func=_cmd_kernel_opt)

    p = sub.add_parser("polar-sim", help="block-error-rate curves for q-ary polar codes")
    p.add_argument("--preset", choices=sorted(SIM_PRESETS), help="named parameter bundle")
    p.add_argument("--q", type=int)
    p.add_argument("--noise", help="q probabilities")
    p.add_argument("--n", type=int, help="block length (power of 2)")
    p.add_argument("--c", help="kernel coefficient(s), comma-separated, or 'auto'")
    p.add_argument("--rates", help="comma-separated code rates")
    p.add_argument("--construct-trials", type=int, dest="construct_trials")
    p.add_argument("--decode-trials", type=int, dest="decode_trials")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache-dir", help=f"reliability cache directory (default ${CACHE_ENV} or {DEFAULT_CACHE_DIR})")
    p.add_argument("--out", help="output CSV path; use a {c} placeholder with several coefficients")
    p.set_defaults(func=_cmd_polar_sim)

    p = sub.add_parser("martingale", help="sample mutual-information trajectories")
    p.add_argument("--family", default="bec:0.5", help="bec:EPS (any depth) or bsc:P (depth <= 4)")
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="martingale.csv")
    p.set_defaults(func=_cmd_martingale)

    p = sub.add_parser("spread-plot", help="scatter of I(W) against I(W+) - I(W)")
    p.add_argument("--family", choices=("bec", "bsc", "random"), default="bec")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="spread.csv")
    p.set_defaults(func=_cmd_spread_plot)

    return parser


# ---------------------------------------------------------------------------
# config file plumbing

def _extract_config(argv):
    rest = []
    path = None
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--config":
            if i + 1 >= len(argv):
                raise ValueError("--config needs a file path")
            path = argv[i + 1]
            i += 2
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
            i += 1
        else:
            rest.append(tok)
            i += 1
    return rest, path


def _config_tokens(path):
    tokens = []
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            if value.lower() in ("true", "yes", "on"):
                tokens.append(flag)
            elif value.lower() in ("false", "no", "off"):
                continue
            else:
                tokens.extend([flag, value])
    return tokens


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        argv, config_path = _extract_config(argv)
        if config_path is not None:
            if not argv:
                raise ValueError("--config needs a subcommand")
            # config tokens go first so explicit flags override them
            argv = [argv[0]] + _config_tokens(config_path) + argv[1:]
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if not e.code else int(e.code)
    try:
        return args.func(args)
    except BudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
