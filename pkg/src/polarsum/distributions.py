"""Distributions on Z/mZ and Z, their convolutions, and entropy utilities.

Probabilities are either floats (validated to sum to 1 within 1e-9) or exact
``fractions.Fraction`` values (validated to sum to exactly 1).  All operations
preserve exactness when every input is exact.  Entropies are computed with
compensated summation and use the natural log unless a base is given.

The headline quantity is H(X+Y) - H(X-Y) for i.i.d. X, Y.  For X uniform on a
finite set the difference is a rational multiple of the log of a ratio of two
integers, which :func:`exact_entropy_diff_uniform` computes in lowest terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "CyclicDistribution",
    "IntegerDistribution",
    "ExactLogRatio",
    "entropy",
    "weighted_convolve",
    "convolve_integer",
    "negate",
    "dft",
    "entropy_diff_sum_minus_diff",
    "exact_entropy_diff_uniform",
]

FLOAT_MASS_TOL = 1e-9


def _is_exact(value) -> bool:
    return isinstance(value, (Fraction, int)) and not isinstance(value, bool)


def _validate_probs(probs, where: str) -> bool:
    """Check non-negativity and total mass; return True if all entries exact."""
    if not probs:
        raise ValueError(f"{where}: empty probability vector")
    exact = all(_is_exact(p) for p in probs)
    for i, p in enumerate(probs):
        if p < 0:
            raise ValueError(f"{where}: negative mass {p} at position {i}")
    if exact:
        if sum(probs) != 1:
            raise ValueError(f"{where}: exact masses sum to {sum(probs)}, not 1")
    else:
        total = math.fsum(float(p) for p in probs)
        if abs(total - 1.0) > FLOAT_MASS_TOL:
            raise ValueError(f"{where}: masses sum to {total}, not 1 within {FLOAT_MASS_TOL}")
    return exact


@dataclass(frozen=True)
class CyclicDistribution:
    """A probability distribution on Z/mZ.

    Parameters
    ----------
    modulus : int
        The group order m >= 1.
    probs : tuple
        Mass at 0, 1, ..., m-1.  Floats or Fractions (not mixed for exactness;
        the distribution is exact only if every entry is a Fraction or int).
    """

    modulus: int
    probs: tuple

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be >= 1, got {self.modulus}")
        object.__setattr__(self, "probs", tuple(self.probs))
        if len(self.probs) != self.modulus:
            raise ValueError(
                f"need {self.modulus} masses for Z/{self.modulus}Z, got {len(self.probs)}"
            )
        exact = _validate_probs(self.probs, f"CyclicDistribution mod {self.modulus}")
        object.__setattr__(self, "_exact", exact)

    @property
    def exact(self) -> bool:
        return self._exact

    @classmethod
    def uniform(cls, modulus: int, exact: bool = True) -> "CyclicDistribution":
        p = Fraction(1, modulus) if exact else 1.0 / modulus
        return cls(modulus, (p,) * modulus)

    @classmethod
    def uniform_on(cls, elements, modulus: int, exact: bool = True) -> "CyclicDistribution":
        """Uniform distribution on a subset of Z/mZ."""
        elems = sorted({e % modulus for e in elements})
        if not elems:
            raise ValueError("uniform_on: empty support")
        mass = Fraction(1, len(elems)) if exact else 1.0 / len(elems)
        probs = [Fraction(0) if exact else 0.0] * modulus
        for e in elems:
            probs[e] = mass
        return cls(modulus, tuple(probs))


@dataclass(frozen=True)
class IntegerDistribution:
    """A finitely supported probability distribution on Z.

    support is strictly increasing; probs[i] is the mass at support[i].
    """

    support: tuple
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(s) for s in self.support))
        object.__setattr__(self, "probs", tuple(self.probs))
        if len(self.support) != len(self.probs):
            raise ValueError("support and probs length mismatch")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise ValueError("support must be strictly increasing")
        exact = _validate_probs(self.probs, "IntegerDistribution")
        object.__setattr__(self, "_exact", exact)

    @property
    def exact(self) -> bool:
        return self._exact

    @classmethod
    def uniform_on(cls, elements, exact: bool = True) -> "IntegerDistribution":
        elems = sorted(set(int(e) for e in elements))
        if not elems:
            raise ValueError("uniform_on: empty support")
        mass = Fraction(1, len(elems)) if exact else 1.0 / len(elems)
        return cls(tuple(elems), (mass,) * len(elems))

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.probs))


@dataclass(frozen=True)
class ExactLogRatio:
    """The exact value scale * log(numerator / denominator), base-free.

    numerator and denominator are positive integers stored in lowest terms;
    scale is a positive rational.  Rendering to a float fixes the base.
    """

    scale: Fraction
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.numerator <= 0 or self.denominator <= 0:
            raise ValueError("numerator and denominator must be positive")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        g = math.gcd(self.numerator, self.denominator)
        object.__setattr__(self, "numerator", self.numerator // g)
        object.__setattr__(self, "denominator", self.denominator // g)
        object.__setattr__(self, "scale", Fraction(self.scale))

    @property
    def is_zero(self) -> bool:
        return self.numerator == 1 and self.denominator == 1

    def to_float(self, base="natural") -> float:
        # math.log accepts arbitrarily large ints, so no float overflow here
        value = float(self.scale) * (math.log(self.numerator) - math.log(self.denominator))
        return value / _log_of_base(base)

    def scaled(self, factor) -> "ExactLogRatio":
        return ExactLogRatio(self.scale * Fraction(factor), self.numerator, self.denominator)

    def same_value(self, other: "ExactLogRatio") -> bool:
        """Exact equality of the represented real numbers."""
        a1, b1 = self.scale.numerator, self.scale.denominator
        a2, b2 = other.scale.numerator, other.scale.denominator
        lhs = Fraction(self.numerator, self.denominator) ** (a1 * b2)
        rhs = Fraction(other.numerator, other.denominator) ** (a2 * b1)
        return lhs == rhs

    def __str__(self) -> str:
        return f"{self.scale} * log({self.numerator}/{self.denominator})"


def _log_of_base(base) -> float:
    if base == "natural":
        return 1.0
    b = float(base)
    if not b > 1.0:
        raise ValueError(f"log base must be > 1 or 'natural', got {base!r}")
    return math.log(b)


def entropy(dist, base="natural") -> float:
    """Shannon entropy -sum p log p, with 0 log 0 = 0.

    Parameters
    ----------
    dist : CyclicDistribution or IntegerDistribution
    base : real > 1, or "natural" for nats.
    """
    scale = _log_of_base(base)
    terms = []
    for p in dist.probs:
        x = float(p)
        if x > 0.0:
            terms.append(-x * math.log(x))
    return math.fsum(terms) / scale


def weighted_convolve(p: CyclicDistribution, q: CyclicDistribution, lam: int) -> CyclicDistribution:
    """Distribution of X + lam*Y on Z/mZ for independent X ~ p, Y ~ q."""
    if p.modulus != q.modulus:
        raise ValueError(f"modulus mismatch: {p.modulus} vs {q.modulus}")
    m = p.modulus
    lam %= m
    exact = p.exact and q.exact
    zero = Fraction(0) if exact else 0.0
    out = [zero] * m
    for i, pi in enumerate(p.probs):
        if pi == 0:
            continue
        for j, qj in enumerate(q.probs):
            if qj == 0:
                continue
            out[(i + lam * j) % m] += pi * qj
    return CyclicDistribution(m, tuple(out))


def negate(p: CyclicDistribution) -> CyclicDistribution:
    """Distribution of -X on Z/mZ (index map k -> (m - k) mod m)."""
    m = p.modulus
    return CyclicDistribution(m, tuple(p.probs[(m - k) % m] for k in range(m)))


def convolve_integer(p: IntegerDistribution, q: IntegerDistribution, sign: int) -> IntegerDistribution:
    """Distribution of X + Y (sign=+1) or X - Y (sign=-1) on Z.

    The output support is the sumset/difference set of the input supports,
    restricted to points of positive mass.
    """
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    acc: dict = {}
    for a, pa in zip(p.support, p.probs):
        if pa == 0:
            continue
        for b, qb in zip(q.support, q.probs):
            if qb == 0:
                continue
            key = a + sign * b
            if key in acc:
                acc[key] += pa * qb
            else:
                acc[key] = pa * qb
    support = tuple(sorted(acc))
    return IntegerDistribution(support, tuple(acc[s] for s in support))


def dft(p: CyclicDistribution) -> np.ndarray:
    """Characteristic-function vector p_hat[j] = sum_k p[k] e^{-i 2 pi jk / m}."""
    return np.fft.fft(np.array([float(x) for x in p.probs]))


def entropy_diff_sum_minus_diff(p, base="natural") -> float:
    """H(X+Y) - H(X-Y) for i.i.d. X, Y ~ p, on Z/mZ or Z."""
    if isinstance(p, CyclicDistribution):
        plus = weighted_convolve(p, p, 1)
        minus = weighted_convolve(p, p, p.modulus - 1)
    elif isinstance(p, IntegerDistribution):
        plus = convolve_integer(p, p, +1)
        minus = convolve_integer(p, p, -1)
    else:
        raise TypeError(f"unsupported distribution type {type(p).__name__}")
    return entropy(plus, base) - entropy(minus, base)


def _pair_counts(elements, combine) -> dict:
    counts: dict = {}
    for a in elements:
        for b in elements:
            key = combine(a, b)
            counts[key] = counts.get(key, 0) + 1
    return counts


def exact_entropy_diff_uniform(elements, modulus=None) -> ExactLogRatio:
    """Exact H(X+Y) - H(X-Y) for X, Y i.i.d. uniform on a finite set A.

    With |A| = N and c_s, d_t the pair counts of sums and differences,

        H(X+Y) - H(X-Y) = (1/N^2) * log( prod_t d_t^{d_t} / prod_s c_s^{c_s} ),

    returned as an ExactLogRatio in lowest terms.  ``elements`` may be an
    IntSet-like object (with .elements and .modulus attributes) or any iterable
    of ints; ``modulus`` selects Z/mZ, None selects Z.
    """
    if hasattr(elements, "elements"):
        if modulus is None:
            modulus = getattr(elements, "modulus", None)
        elements = elements.elements
    elems = sorted(set(int(e) for e in elements))
    if not elems:
        raise ValueError("empty set")
    n = len(elems)
    if modulus is None:
        sums = _pair_counts(elems, lambda a, b: a + b)
        diffs = _pair_counts(elems, lambda a, b: a - b)
    else:
        m = int(modulus)
        if any(not 0 <= e < m for e in elems):
            raise ValueError(f"elements must lie in [0, {m}) for Z/{m}Z")
        sums = _pair_counts(elems, lambda a, b: (a + b) % m)
        diffs = _pair_counts(elems, lambda a, b: (a - b) % m)
    num = 1
    for d in diffs.values():
        num *= d**d
    den = 1
    for c in sums.values():
        den *= c**c
    return ExactLogRatio(Fraction(1, n * n), num, den)
