"""Discrete memoryless channels and the one-step polarization transform.

A FiniteChannel is a row-stochastic matrix W(y|x).  one_step_transform builds
the two synthesized channels of the kernel [[1, 0], [c, 1]] explicitly:

    W-(y1 y2 | u1)    = (1/q) sum_u2 W(y1 | u1 + c u2) W(y2 | u2)
    W+(y1 y2 u1 | u2) = (1/q)        W(y1 | u1 + c u2) W(y2 | u2)

with output alphabets Y^2 and Y^2 x F_q.  Mutual information is computed for
a uniform input and normalized to base |X| so that I(W) lies in [0, 1]; the
transform conserves it: I(W-) + I(W+) = 2 I(W).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import CyclicDistribution

__all__ = [
    "FiniteChannel",
    "AdditiveChannel",
    "one_step_transform",
    "mutual_information",
]

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class FiniteChannel:
    """Channel W(y|x) as a (|X|, |Y|) row-stochastic matrix."""

    transitions: np.ndarray

    def __post_init__(self):
        t = np.array(self.transitions, dtype=float)
        if t.ndim != 2 or t.size == 0:
            raise ValueError("transitions must be a nonempty 2-D matrix")
        if (t < 0).any():
            raise ValueError("transition probabilities must be nonnegative")
        rows = t.sum(axis=1)
        bad = np.nonzero(np.abs(rows - 1.0) > ROW_SUM_TOL)[0]
        if bad.size:
            raise ValueError(
                f"row {bad[0]} sums to {rows[bad[0]]}, not 1 within {ROW_SUM_TOL}"
            )
        t.setflags(write=False)
        object.__setattr__(self, "transitions", t)

    @property
    def input_size(self) -> int:
        return self.transitions.shape[0]

    @property
    def output_size(self) -> int:
        return self.transitions.shape[1]

    @classmethod
    def erasure(cls, eps: float) -> "FiniteChannel":
        """Binary erasure channel; outputs are (0, 1, erasure)."""
        if not 0.0 <= eps <= 1.0:
            raise ValueError(f"erasure probability must be in [0, 1], got {eps}")
        return cls(np.array([[1 - eps, 0.0, eps], [0.0, 1 - eps, eps]]))

    @classmethod
    def binary_symmetric(cls, p: float) -> "FiniteChannel":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"crossover probability must be in [0, 1], got {p}")
        return cls(np.array([[1 - p, p], [p, 1 - p]]))


@dataclass(frozen=True)
class AdditiveChannel:
    """Y = X + Z on F_q with noise Z ~ a fixed distribution on Z/qZ."""

    q: int
    noise: CyclicDistribution

    def __post_init__(self):
        if self.noise.modulus != self.q:
            raise ValueError(
                f"noise lives on Z/{self.noise.modulus}Z, channel needs Z/{self.q}Z"
            )

    def noise_floats(self) -> np.ndarray:
        return np.array([float(p) for p in self.noise.probs])

    def to_finite(self) -> FiniteChannel:
        z = self.noise_floats()
        q = self.q
        w = np.empty((q, q))
        for x in range(q):
            w[x] = np.roll(z, x)  # W(y|x) = noise((y - x) mod q)
        return FiniteChannel(w)


def one_step_transform(w: FiniteChannel, c: int = 1) -> tuple:
    """The pair (W-, W+) for kernel coefficient c, as explicit matrices.

    The input alphabet is treated as Z/qZ with q = w.input_size, and the two
    channel uses carry (u1 - c*u2, u2), matching the polar encoder: for an
    additive channel the minus branch then behaves like noise Z1 + c*Z2, and
    the plus branch is noiseless exactly when (a, b) -> a + c*b is injective
    on the noise support.  W- has output index y1*|Y| + y2; W+ has output
    index (y1*|Y| + y2)*q + u1.
    """
    q = w.input_size
    c %= q
    if c == 0:
        raise ValueError("kernel coefficient must be nonzero")
    t = w.transitions
    ny = w.output_size
    minus = np.zeros((q, ny * ny))
    plus = np.zeros((q, ny * ny * q))
    for u1 in range(q):
        for u2 in range(q):
            block = np.outer(t[(u1 - c * u2) % q], t[u2]).ravel() / q
            minus[u1] += block
            base = np.arange(ny * ny) * q + u1
            plus[u2, base] += block
    return FiniteChannel(minus), FiniteChannel(plus)


def mutual_information(w: FiniteChannel) -> float:
    """I(X;Y) for X uniform, in base |X| so the result lies in [0, 1]."""
    t = w.transitions
    q = w.input_size
    if q < 2:
        raise ValueError("input alphabet must have at least 2 symbols")
    py = t.mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(t > 0, t * np.log(t / py[None, :]), 0.0)
    return float(terms.sum() / (q * np.log(q)))
