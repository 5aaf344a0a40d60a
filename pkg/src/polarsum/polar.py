"""q-ary polar codes with a tunable 2x2 kernel over a prime field.

The coefficient c names the combination U1 + c*U2 whose i.i.d.-noise entropy
the kernel selector maximizes.  To make that the entropy seen by successive
cancellation, the encoder applies the Kronecker power of the INVERSE kernel
[[1, 0], [-c, 1]]: splitting a block into halves u0, u1, the codeword is
(E(u0) - c*E(u1), E(u1)) with E encoding a half.  Then y = x + z gives
y*K^{kron m} = u + z*K^{kron m} with K = [[1, 0], [c, 1]], i.e. the noise the
decoder fights is the +c transform of the channel noise: the first synthetic
channel's noise is exactly Z1 + c*Z2, and the second branch is noiseless
precisely when (a, b) -> a + c*b is injective on the noise support (the
support condition exported by the kernel module).  Writing the butterfly with
+c instead would silently flip the effective coefficient to q - c and invert
the kernel-selection story.

Inputs and outputs are in natural order (no bit-reversal): position r of the
first output half pairs with position r of the second half as one kernel
instance, so successive cancellation consumes the likelihood rows
(r, r + n/2), decoding all of u0 through the minus channels before any of u1
through the plus channels.

Decoding is vectorized across a batch of received words: the recursion tree
and all array shapes are identical for every batch member, decisions are
per-row argmaxes, so Monte-Carlo construction and block-error simulation run
as a handful of numpy passes per tree level.  Reliability is operational:
construct() counts, per index, genie-corrected decision errors over random
transmissions, and select_frozen freezes the worst indices.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .channels import AdditiveChannel

__all__ = [
    "PolarCode",
    "ReliabilityProfile",
    "encode",
    "sc_decode",
    "construct",
    "select_frozen",
    "noise_digest",
]

PROFILE_FORMAT = "polarsum reliability profile v1"
LIKELIHOOD_FLOOR = 1e-300
DEFAULT_CHUNK = 1024


def _require_block_length(n: int) -> int:
    if n < 2 or n & (n - 1):
        raise ValueError(f"block length must be a power of 2 >= 2, got {n}")
    return n


@dataclass(frozen=True)
class PolarCode:
    """Code parameters: field size q, length n = 2^m, kernel coefficient c,
    sorted frozen index tuple, and the values pinned at frozen positions."""

    q: int
    n: int
    c: int
    frozen: tuple
    frozen_values: tuple = None

    def __post_init__(self):
        _require_block_length(self.n)
        if not 1 <= self.c < self.q:
            raise ValueError(f"kernel coefficient must be in [1, {self.q}), got {self.c}")
        frozen = tuple(int(i) for i in self.frozen)
        if list(frozen) != sorted(set(frozen)):
            raise ValueError("frozen indices must be sorted and unique")
        if frozen and not (0 <= frozen[0] and frozen[-1] < self.n):
            raise ValueError(f"frozen indices must lie in [0, {self.n})")
        object.__setattr__(self, "frozen", frozen)
        values = self.frozen_values
        if values is None:
            values = (0,) * len(frozen)
        values = tuple(int(v) % self.q for v in values)
        if len(values) != len(frozen):
            raise ValueError("frozen_values must match frozen indices")
        object.__setattr__(self, "frozen_values", values)

    @property
    def dimension(self) -> int:
        return self.n - len(self.frozen)

    @property
    def information(self) -> tuple:
        frozen = set(self.frozen)
        return tuple(i for i in range(self.n) if i not in frozen)


def noise_digest(channel: AdditiveChannel) -> str:
    text = f"{channel.q}|" + ",".join(repr(float(p)) for p in channel.noise.probs)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ReliabilityProfile:
    """Genie-aided error counts per input index for one (channel, n, c, seed).

    counts[i] is how many of `trials` random transmissions decided index i
    wrongly when all earlier decisions were corrected to the truth.
    """

    q: int
    n: int
    c: int
    digest: str
    trials: int
    seed: int
    counts: tuple

    def __post_init__(self):
        if len(self.counts) != self.n:
            raise ValueError("need one count per index")
        if any(not 0 <= int(k) <= self.trials for k in self.counts):
            raise ValueError("counts must lie in [0, trials]")
        object.__setattr__(self, "counts", tuple(int(k) for k in self.counts))

    @property
    def error_rates(self) -> np.ndarray:
        return np.array(self.counts) / self.trials

    def save(self, path):
        with open(path, "w") as f:
            f.write(f"# {PROFILE_FORMAT}\n")
            f.write(f"{self.q},{self.n},{self.c},{self.digest},{self.trials},{self.seed}\n")
            for i, k in enumerate(self.counts):
                f.write(f"{i},{k}\n")

    @classmethod
    def load(cls, path) -> "ReliabilityProfile":
        with open(path) as f:
            lines = [ln.strip() for ln in f if ln.strip() and not ln.startswith("#")]
        head = lines[0].split(",")
        if len(head) != 6:
            raise ValueError(f"malformed profile header: {lines[0]!r}")
        q, n, c, digest, trials, seed = head
        body = lines[1:]
        if len(body) != int(n):
            raise ValueError(f"profile body has {len(body)} rows, expected {n}")
        counts = [0] * int(n)
        for ln in body:
            idx, k = ln.split(",")
            counts[int(idx)] = int(k)
        return cls(int(q), int(n), int(c), digest, int(trials), int(seed), tuple(counts))


# ---------------------------------------------------------------------------
# encoding

def _encode_batch(u: np.ndarray, c: int, q: int) -> np.ndarray:
    """Apply the generator [[1, 0], [-c, 1]]^{kron log2 n} to each row of u,
    natural order; see the module docstring for why the butterfly subtracts."""
    x = u.copy()
    n = x.shape[-1]
    size = n
    while size >= 2:
        h = size // 2
        view = x.reshape(-1, n // size, size)
        view[:, :, :h] = (view[:, :, :h] - c * view[:, :, h:]) % q
        size = h
    return x


def _decode_transform_batch(x: np.ndarray, c: int, q: int) -> np.ndarray:
    """Inverse of _encode_batch: the Kronecker power of [[1, 0], [c, 1]]."""
    u = x.copy()
    n = u.shape[-1]
    size = 2
    while size <= n:
        h = size // 2
        view = u.reshape(-1, n // size, size)
        view[:, :, :h] = (view[:, :, :h] + c * view[:, :, h:]) % q
        size *= 2
    return u


def encode(code: PolarCode, u) -> np.ndarray:
    """Codeword for the full input vector u (frozen positions included)."""
    u = np.asarray(u, dtype=np.int64) % code.q
    if u.shape != (code.n,):
        raise ValueError(f"need an input vector of length {code.n}")
    return _encode_batch(u[None, :], code.c, code.q)[0]


def encode_inverse(code: PolarCode, x) -> np.ndarray:
    """Recover the input vector from a codeword; exact for every x since the
    generator is invertible (its kernel is lower-unitriangular)."""
    x = np.asarray(x, dtype=np.int64) % code.q
    if x.shape != (code.n,):
        raise ValueError(f"need a codeword of length {code.n}")
    return _decode_transform_batch(x[None, :], code.c, code.q)[0]


# ---------------------------------------------------------------------------
# successive cancellation

class _Decisions:
    """Per-leaf decision policy shared by decoding and construction.

    Walks positions 0..n-1 in step with the recursion.  With `truth` set the
    pass is genie-aided: every non-frozen decision is recorded against the
    truth and then corrected.  `record` captures each leaf posterior.
    """

    def __init__(self, batch, n, frozen_mask=None, frozen_values=None,
                 truth=None, record=None):
        self.batch = batch
        self.position = 0
        self.frozen_mask = frozen_mask
        self.frozen_values = frozen_values
        self.truth = truth
        self.record = record
        self.decisions = np.zeros((batch, n), dtype=np.int64)
        self.errors = None if truth is None else np.zeros((batch, n), dtype=bool)

    def decide(self, posterior: np.ndarray) -> np.ndarray:
        i = self.position
        self.position += 1
        if self.record is not None:
            self.record[i] = posterior.copy()
        if self.frozen_mask is not None and self.frozen_mask[i]:
            out = np.full(self.batch, self.frozen_values[i], dtype=np.int64)
        else:
            out = posterior.argmax(axis=1)  # argmax takes the smallest symbol on ties
            if self.truth is not None:
                true = self.truth[:, i]
                self.errors[:, i] = out != true
                out = true
        self.decisions[:, i] = out
        return out


def _normalize(arr: np.ndarray) -> None:
    np.maximum(arr, LIKELIHOOD_FLOOR, out=arr)
    arr /= arr.sum(axis=-1, keepdims=True)


def _sc_pass(lik: np.ndarray, c: int, q: int, state: _Decisions) -> np.ndarray:
    """Decode one subtree; lik has shape (batch, width, q).  Returns the
    re-encoded codeword of this subtree's decisions, needed by plus steps."""
    width = lik.shape[1]
    if width == 1:
        dec = state.decide(lik[:, 0, :])
        return dec[:, None]
    h = width // 2
    first, second = lik[:, :h, :], lik[:, h:, :]
    minus = np.zeros_like(first)
    for j in range(q):
        perm = (np.arange(q) - c * j) % q
        minus += first[:, :, perm] * second[:, :, j, None]
    _normalize(minus)
    cw0 = _sc_pass(minus, c, q, state)
    idx = (cw0[:, :, None] - c * np.arange(q)[None, None, :]) % q
    plus = np.take_along_axis(first, idx, axis=2) * second
    _normalize(plus)
    cw1 = _sc_pass(plus, c, q, state)
    return np.concatenate(((cw0 - c * cw1) % q, cw1), axis=1)


def _channel_likelihoods(y: np.ndarray, noise: np.ndarray, q: int) -> np.ndarray:
    """lik[b, i, x] = P(y[b, i] | x) = noise[(y - x) mod q]."""
    shifts = (y[:, :, None] - np.arange(q)[None, None, :]) % q
    return noise[shifts].astype(float)


def _sc_batch(y, channel, code=None, truth=None, record=None, c=None):
    q = channel.q
    if code is not None:
        c = code.c
        n = code.n
        frozen_mask = np.zeros(n, dtype=bool)
        frozen_mask[list(code.frozen)] = True
        frozen_values = np.zeros(n, dtype=np.int64)
        frozen_values[list(code.frozen)] = code.frozen_values
    else:
        n = y.shape[1]
        frozen_mask = frozen_values = None
    lik = _channel_likelihoods(y, channel.noise_floats(), q)
    _normalize(lik)
    state = _Decisions(y.shape[0], n, frozen_mask, frozen_values, truth, record)
    _sc_pass(lik, c, q, state)
    return state


def sc_decode(code: PolarCode, y, channel: AdditiveChannel, genie=None):
    """Successive-cancellation decoding of one received word.

    Returns (u_hat, first_error).  Frozen positions are set to the code's
    frozen values; information positions take the posterior argmax, smallest
    symbol on ties.  With genie = true input vector, every information
    decision is corrected to the truth after being recorded, u_hat equals the
    truth, and first_error is the first index decided wrongly (None if the
    whole pass was clean).
    """
    if channel.q != code.q:
        raise ValueError(f"channel field size {channel.q} != code field size {code.q}")
    y = np.asarray(y, dtype=np.int64) % code.q
    if y.shape != (code.n,):
        raise ValueError(f"need a received vector of length {code.n}")
    truth = None
    if genie is not None:
        truth = np.asarray(genie, dtype=np.int64)[None, :] % code.q
        if truth.shape != (1, code.n):
            raise ValueError(f"genie vector must have length {code.n}")
    state = _sc_batch(y[None, :], channel, code=code, truth=truth)
    u_hat = state.decisions[0]
    first_error = None
    if truth is not None:
        where = np.nonzero(state.errors[0])[0]
        if where.size:
            first_error = int(where[0])
    return u_hat, first_error


def sc_posteriors(code: PolarCode, y, channel: AdditiveChannel, genie=None) -> np.ndarray:
    """The per-leaf posteriors the successive-cancellation pass decided from.

    Returns an (n, q) array whose row i is the decoder's distribution for
    input i given y and the already-fixed prefix — the decoder's own earlier
    decisions, or the true prefix when `genie` supplies the transmitted input
    vector.  Frozen positions report their posterior too (the decision there
    ignores it).
    """
    if channel.q != code.q:
        raise ValueError(f"channel field size {channel.q} != code field size {code.q}")
    y = np.asarray(y, dtype=np.int64) % code.q
    if y.shape != (code.n,):
        raise ValueError(f"need a received vector of length {code.n}")
    truth = None
    if genie is not None:
        truth = np.asarray(genie, dtype=np.int64)[None, :] % code.q
        if truth.shape != (1, code.n):
            raise ValueError(f"genie vector must have length {code.n}")
    record = np.empty((code.n, 1, code.q))
    _sc_batch(y[None, :], channel, code=code, truth=truth, record=record)
    return record[:, 0, :]


# ---------------------------------------------------------------------------
# Monte-Carlo construction

def _construct_chunk(channel, n, c, batch, seed_material):
    q = channel.q
    rng = np.random.default_rng(seed_material)
    u = rng.integers(0, q, size=(batch, n))
    z = rng.choice(q, size=(batch, n), p=channel.noise_floats())
    y = (_encode_batch(u, c, q) + z) % q
    state = _sc_batch(y, channel, truth=u, c=c)
    return state.errors.sum(axis=0)


def construct(channel: AdditiveChannel, n: int, c: int, trials: int, seed: int,
              workers: int = 1, chunk_size: int = DEFAULT_CHUNK) -> ReliabilityProfile:
    """Estimate per-index reliabilities by genie-aided Monte Carlo.

    Each chunk of trials derives its randomness from (seed, chunk index), so
    the profile is bit-identical for any worker count or chunk scheduling.
    """
    _require_block_length(n)
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    q = channel.q
    if not 1 <= c < q:
        raise ValueError(f"kernel coefficient must be in [1, {q}), got {c}")
    chunks = []
    start = 0
    index = 0
    while start < trials:
        batch = min(chunk_size, trials - start)
        chunks.append((index, batch))
        start += batch
        index += 1
    counts = np.zeros(n, dtype=np.int64)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(
                lambda job: _construct_chunk(channel, n, c, job[1], [seed, 0, job[0]]),
                chunks,
            )
            for partial in results:
                counts += partial
    else:
        for index, batch in chunks:
            counts += _construct_chunk(channel, n, c, batch, [seed, 0, index])
    return ReliabilityProfile(q, n, c, noise_digest(channel), trials, seed, tuple(int(k) for k in counts))


def select_frozen(profile: ReliabilityProfile, k: int) -> PolarCode:
    """Freeze the n-k indices with the most genie errors; on equal counts the
    smaller index freezes first, so information sets are nested in k."""
    if not 0 <= k <= profile.n:
        raise ValueError(f"dimension must be in [0, {profile.n}], got {k}")
    order = sorted(range(profile.n), key=lambda i: (-profile.counts[i], i))
    frozen = tuple(sorted(order[: profile.n - k]))
    return PolarCode(profile.q, profile.n, profile.c, frozen)
