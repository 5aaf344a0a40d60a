"""Polarization experiments: martingale trajectories, spread scatter, BLER.

Three Monte-Carlo harnesses on top of the channel transforms and the polar
codec, plus the CSV writers for their outputs.  Every experiment takes a seed
and derives all randomness from (seed, chunk index), so output files are
byte-identical regardless of worker count or scheduling.  CSV headers record
the seed and parameters (never timestamps) for the same reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import AdditiveChannel, FiniteChannel, mutual_information, one_step_transform
from .errors import BudgetError
from .polar import DEFAULT_CHUNK, ReliabilityProfile, _encode_batch, _sc_batch, construct, select_frozen

__all__ = [
    "MartingalePath",
    "BlerPoint",
    "martingale_sample",
    "spread_scatter",
    "bler_curve",
    "write_martingale_csv",
    "write_spread_csv",
    "write_bler_csv",
]

EXPLICIT_DEPTH_BUDGET = 4
ALPHABET_BUDGET = 10 ** 6
MERGE_DIGITS = 12


@dataclass(frozen=True)
class MartingalePath:
    """One random walk down the transform tree: signs[t] is the branch taken
    at step t+1 and values[t] the resulting mutual information."""

    signs: tuple
    values: tuple

    def __post_init__(self):
        if len(self.signs) != len(self.values):
            raise ValueError("one sign per value")
        if any(s not in ("-", "+") for s in self.signs):
            raise ValueError("signs must be '-' or '+'")
        if any(not -1e-9 <= v <= 1 + 1e-9 for v in self.values):
            raise ValueError("mutual informations must lie in [0, 1]")


@dataclass(frozen=True)
class BlerPoint:
    """Block-error count at one rate."""

    rate: float
    trials: int
    block_errors: int

    def __post_init__(self):
        if not 0 <= self.block_errors <= self.trials:
            raise ValueError("block_errors must lie in [0, trials]")

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials

    @property
    def log10_bler(self) -> float:
        return math.log10(self.bler) if self.block_errors else float("-inf")


# ---------------------------------------------------------------------------
# martingale trajectories

def _merge_outputs(w: FiniteChannel) -> FiniteChannel:
    """Collapse output symbols with proportional likelihood columns.

    Proportional columns induce the same posterior, so merging them changes
    no mutual information while keeping the alphabet growth of repeated
    transforms in check.  Columns are grouped by their normalized vector
    rounded to 12 significant digits.
    """
    t = w.transitions
    t = t[:, t.sum(axis=0) > 0]
    groups = {}
    for j in range(t.shape[1]):
        col = t[:, j]
        key = tuple(np.format_float_scientific(v, precision=MERGE_DIGITS) for v in col / col.sum())
        groups.setdefault(key, []).append(j)
    merged = np.empty((t.shape[0], len(groups)))
    for k, cols in enumerate(groups.values()):
        merged[:, k] = t[:, cols].sum(axis=1)
    return FiniteChannel(merged)


def _erasure_step(eps: float, sign: str) -> float:
    return 2 * eps - eps * eps if sign == "-" else eps * eps


def _explicit_path(channel, depth, c, signs):
    w = _merge_outputs(channel)
    values = []
    for sign in signs:
        # the transform materializes both children; the plus child is larger
        grown = w.output_size ** 2 * w.input_size
        if grown > ALPHABET_BUDGET:
            raise BudgetError(
                f"transform would need {grown} output symbols "
                f"(budget {ALPHABET_BUDGET}); merging could not contain growth"
            )
        minus, plus = one_step_transform(w, c)
        w = _merge_outputs(minus if sign == "-" else plus)
        values.append(mutual_information(w))
    return values


def martingale_sample(channel, depth: int, paths: int, seed: int, c: int = 1):
    """Sample `paths` uniform-sign trajectories of the information martingale.

    `channel` is either a float — an erasure probability, tracked in closed
    form (children of BEC(e) are BEC(2e−e²) and BEC(e²)) for any depth — or a
    FiniteChannel, transformed explicitly with output merging, for depth up
    to EXPLICIT_DEPTH_BUDGET.
    """
    if depth < 1 or paths < 1:
        raise ValueError("need depth >= 1 and paths >= 1")
    explicit = isinstance(channel, FiniteChannel)
    if explicit and depth > EXPLICIT_DEPTH_BUDGET:
        raise BudgetError(
            f"explicit-channel martingale depth budget is {EXPLICIT_DEPTH_BUDGET}, got {depth}"
        )
    if not explicit:
        eps = float(channel)
        if not 0 <= eps <= 1:
            raise ValueError(f"erasure probability must lie in [0, 1], got {eps}")
    rng = np.random.default_rng([seed, 2])
    draws = rng.integers(0, 2, size=(paths, depth))
    out = []
    for p in range(paths):
        signs = tuple("-+"[b] for b in draws[p])
        if explicit:
            values = _explicit_path(channel, depth, c, signs)
        else:
            values = []
            e = eps
            for sign in signs:
                e = _erasure_step(e, sign)
                values.append(1 - e)
        out.append(MartingalePath(signs, tuple(values)))
    return out


# ---------------------------------------------------------------------------
# spread scatter

def _bec_sweep(points, rng):
    for eps in np.linspace(0, 1, points):
        yield FiniteChannel.erasure(float(eps))


def _bsc_sweep(points, rng):
    for p in np.linspace(0, 0.5, points):
        yield FiniteChannel.binary_symmetric(float(p))


def _random_channels(points, rng):
    for _ in range(points):
        ny = int(rng.integers(2, 9))
        yield FiniteChannel(rng.dirichlet(np.ones(ny), size=2))


_SAMPLERS = {"bec": _bec_sweep, "bsc": _bsc_sweep, "random": _random_channels}


def spread_scatter(sampler: str, points: int, seed: int = 0, c: int = 1):
    """(I(W), I(W+) − I(W)) pairs for a family of binary-input channels.

    Samplers: "bec" and "bsc" sweep their parameter on a uniform grid (the
    envelope curves); "random" draws transition rows from a flat Dirichlet
    with output alphabet size 2..8.
    """
    if points < 1:
        raise ValueError("need points >= 1")
    if sampler not in _SAMPLERS:
        raise ValueError(f"unknown sampler {sampler!r}; choose from {sorted(_SAMPLERS)}")
    rng = np.random.default_rng([seed, 3])
    rows = []
    for w in _SAMPLERS[sampler](points, rng):
        _, plus = one_step_transform(w, c)
        base = mutual_information(w)
        rows.append((base, mutual_information(plus) - base))
    return rows


# ---------------------------------------------------------------------------
# block-error curves

def _bler_chunk(channel, codes, batch, seed_material):
    """Block-error counts of every code on one shared batch of trials.

    All codes see the same noise and the same information symbols, so a code
    whose information set contains another's decodes a pathwise-harder
    problem; this makes the error counts monotone in rate for a fixed seed.
    """
    q = channel.q
    n = codes[0].n
    rng = np.random.default_rng(seed_material)
    z = rng.choice(q, size=(batch, n), p=channel.noise_floats())
    symbols = rng.integers(0, q, size=(batch, n))
    counts = []
    for code in codes:
        u = symbols.copy()
        u[:, list(code.frozen)] = np.array(code.frozen_values, dtype=np.int64)
        y = (_encode_batch(u, code.c, q) + z) % q
        state = _sc_batch(y, channel, code=code)
        counts.append(int((state.decisions != u).any(axis=1).sum()))
    return counts


def bler_curve(channel: AdditiveChannel, n: int, c: int, rates, construct_trials: int,
               decode_trials: int, seed: int, workers: int = 1,
               profile: ReliabilityProfile = None, chunk_size: int = DEFAULT_CHUNK):
    """Monte-Carlo block-error-rate points for polar codes at several rates.

    Constructs (or reuses) one reliability profile, then freezes per rate and
    decodes `decode_trials` random transmissions.  Rate r uses dimension
    k = round(r·n); rate 0 is allowed and trivially error-free.
    """
    rates = [float(r) for r in rates]
    if not rates:
        raise ValueError("need at least one rate")
    if any(not 0 <= r <= 1 for r in rates):
        raise ValueError("rates must lie in [0, 1]")
    if decode_trials < 1:
        raise ValueError("need at least one decode trial")
    if profile is None:
        profile = construct(channel, n, c, construct_trials, seed, workers=workers)
    if (profile.q, profile.n, profile.c) != (channel.q, n, c):
        raise ValueError("profile does not match the requested code parameters")
    codes = [select_frozen(profile, round(r * n)) for r in rates]
    chunks = []
    start = 0
    index = 0
    while start < decode_trials:
        batch = min(chunk_size, decode_trials - start)
        chunks.append((index, batch))
        start += batch
        index += 1
    totals = [0] * len(rates)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(
                lambda job: _bler_chunk(channel, codes, job[1], [seed, 1, job[0]]),
                chunks,
            )
            for partial in results:
                totals = [a + b for a, b in zip(totals, partial)]
    else:
        for index, batch in chunks:
            partial = _bler_chunk(channel, codes, batch, [seed, 1, index])
            totals = [a + b for a, b in zip(totals, partial)]
    return [BlerPoint(r, decode_trials, e) for r, e in zip(rates, totals)]


# ---------------------------------------------------------------------------
# CSV output

ARTIFACT_VERSION = "polarsum csv v1"


def _write_csv(path, kind, params, columns, rows):
    with open(path, "w") as f:
        f.write(f"# {ARTIFACT_VERSION} {kind}\n")
        f.write("# " + " ".join(f"{k}={v}" for k, v in params) + "\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(str(v) for v in row) + "\n")


def write_martingale_csv(paths, out_path, params):
    rows = []
    for pid, path in enumerate(paths):
        for step, (sign, value) in enumerate(zip(path.signs, path.values), start=1):
            rows.append((pid, step, sign, repr(value)))
    _write_csv(out_path, "martingale", params, ("path_id", "step", "sign", "I"), rows)


def write_spread_csv(rows, out_path, params):
    formatted = [(repr(i), repr(s)) for i, s in rows]
    _write_csv(out_path, "spread", params, ("I", "spread"), formatted)


def write_bler_csv(points, out_path, params):
    rows = [
        (repr(p.rate), p.trials, p.block_errors, repr(p.bler), repr(p.log10_bler))
        for p in points
    ]
    _write_csv(out_path, "bler", params, ("rate", "trials", "errors", "bler", "log10_bler"), rows)
