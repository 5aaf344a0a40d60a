"""Choosing the 2x2 polarization kernel coefficient over a prime field.

For a symbol distribution mu on F_q the kernel [[1, 0], [c, 1]] maps an i.i.d.
pair (U1, U2) to (U1 + c*U2, U2); the first synthesized channel's quality is
governed by H(U1 + lambda*U2).  The best coefficient maximizes that entropy,
and since H(U1 + lambda*U2, U2) = 2*H(mu) regardless of lambda, whatever the
sum gains over H(mu) the conditional H(U2 | U1 + lambda*U2) loses: the spread
is balanced.  The maximizer is found by exhaustive search over the q-1
nonzero coefficients; no closed form is known beyond F_3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .distributions import CyclicDistribution, entropy, weighted_convolve

__all__ = [
    "Kernel",
    "SpreadReport",
    "optimal_coefficient",
    "conditional_spread",
    "support_condition",
    "two_optimal_kernel",
]

FLOAT_TIE_TOL = 1e-12


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Kernel:
    """Lower-triangular kernel [[1, 0], [c, 1]] over F_q, q prime, c != 0."""

    q: int
    c: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"field size must be prime, got {self.q}")
        if not 1 <= self.c < self.q:
            raise ValueError(f"coefficient must be in [1, {self.q}), got {self.c}")

    def matrix(self):
        return ((1, 0), (self.c % self.q, 1))


@dataclass(frozen=True)
class SpreadReport:
    """Entropy bookkeeping for one coefficient, all in base q.

    spread = H(U1 + coefficient*U2) - H(mu) and cond_entropy =
    H(U2 | U1 + coefficient*U2); the two always sum to H(mu) (within float
    rounding), since the pair (U1 + c*U2, U2) carries exactly 2*H(mu).
    """

    coefficient: int
    spread: float
    cond_entropy: float


def _require_prime_field(mu: CyclicDistribution) -> int:
    q = mu.modulus
    if not is_prime(q):
        raise ValueError(f"distribution must live on a prime field, got modulus {q}")
    return q


def _prob_multiset(dist: CyclicDistribution) -> tuple:
    return tuple(sorted(p for p in dist.probs if p != 0))


def _mp_entropy(probs, dps: int):
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for p in probs:
            if p == 0:
                continue
            x = mpmath.mpf(p.numerator) / p.denominator
            total -= x * mpmath.log(x)
        return total


def optimal_coefficient(mu: CyclicDistribution) -> set:
    """The set of lambda in F_q \\ {0} maximizing H(U1 + lambda*U2), U1, U2 iid ~ mu.

    Rational inputs are compared exactly: coefficients whose convolution
    probability multisets coincide tie by symmetry, and distinct multisets are
    separated with mpmath on a rising precision ladder.  Float inputs use an
    absolute tolerance of 1e-12 on the entropy.
    """
    q = _require_prime_field(mu)
    if q == 2:
        return {1}
    convs = {lam: weighted_convolve(mu, mu, lam) for lam in range(1, q)}
    if mu.exact:
        groups: dict = {}
        for lam, conv in convs.items():
            key = tuple(Fraction(p) for p in _prob_multiset(conv))
            groups.setdefault(key, []).append(lam)
        if len(groups) == 1:
            return set(range(1, q))
        for dps in (60, 120, 240):
            values = {key: _mp_entropy(key, dps) for key in groups}
            best = max(values.values())
            margin = mpmath.mpf(10) ** (-(dps // 2))
            winners = [key for key, v in values.items() if best - v <= margin]
            if len(winners) == 1 or dps == 240:
                return {lam for key in winners for lam in groups[key]}
    values = {lam: entropy(conv) for lam, conv in convs.items()}
    best = max(values.values())
    return {lam for lam, v in values.items() if best - v <= FLOAT_TIE_TOL}


def conditional_spread(mu: CyclicDistribution, coefficient: int) -> SpreadReport:
    """Spread and conditional entropy for one coefficient, computed from the
    joint law of (U1 + coefficient*U2, U2), in base q."""
    q = _require_prime_field(mu)
    lam = coefficient % q
    if lam == 0:
        raise ValueError(f"coefficient must be nonzero mod {q}, got {coefficient}")
    conv = weighted_convolve(mu, mu, lam)
    log_q = math.log(q)
    h_mu = entropy(mu, q)
    h_conv = entropy(conv, q)
    joint_terms = []
    for u2, p2 in enumerate(mu.probs):
        if p2 == 0:
            continue
        for s in range(q):
            p1 = mu.probs[(s - lam * u2) % q]
            if p1 == 0:
                continue
            mass = float(p1) * float(p2)
            joint_terms.append(-mass * math.log(mass))
    h_joint = math.fsum(joint_terms) / log_q
    return SpreadReport(lam, h_conv - h_mu, h_joint - h_conv)


def support_condition(s, gamma: int, q: int | None = None) -> bool:
    """True when |S + gamma*S| = |S|^2 over F_q, i.e. the map
    (a, b) -> a + gamma*b is injective on S x S.

    When that holds, U2 is a deterministic function of U1 + gamma*U2 for any
    distribution supported on S, so the conditional entropy vanishes.
    """
    if q is None:
        q = getattr(s, "modulus", None)
        if q is None:
            raise ValueError("give q explicitly or pass a set with a modulus")
    if not is_prime(q):
        raise ValueError(f"field size must be prime, got {q}")
    gamma %= q
    if gamma == 0:
        raise ValueError("gamma must be nonzero")
    elems = [e % q for e in s]
    if len(set(elems)) != len(elems):
        raise ValueError("support has repeated elements mod q")
    image = {(a + gamma * b) % q for a in elems for b in elems}
    return len(image) == len(elems) ** 2


def two_optimal_kernel(mu: CyclicDistribution) -> Kernel:
    """The kernel using the smallest optimal coefficient for mu."""
    return Kernel(_require_prime_field(mu), min(optimal_coefficient(mu)))
