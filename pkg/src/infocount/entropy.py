"""Information and entropy measures.

All measures take a ``base`` keyword (default 2, so results are in bits)
and return an :class:`EntropyValue` that remembers its base. Terms with
zero probability contribute nothing (``0 log 0 = 0``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import BaseMismatch, DomainError, NotADensity
from .probability import (
    Axis,
    JointDistribution,
    _as_distribution,
    _as_kernel,
    _check_dims,
    joint_from_input_and_kernel,
)

DENSITY_TOL = 1e-6

Kind = Literal["discrete", "differential"]


def _log(x, base: float):
    if base == 2:
        return np.log2(x)
    if base == 10:
        return np.log10(x)
    if base == math.e:
        return np.log(x)
    return np.log(x) / math.log(base)


def _check_base(base: float) -> float:
    base = float(base)
    if not base > 0 or base == 1:
        raise DomainError(f"logarithm base must be positive and != 1, got {base}")
    return base


@dataclass(frozen=True)
class EntropyValue:
    value: float
    base: float = 2.0
    kind: Kind = "discrete"

    def __float__(self) -> float:
        return float(self.value)

    def _other(self, other) -> float:
        if isinstance(other, EntropyValue):
            if other.base != self.base:
                raise BaseMismatch(f"cannot combine base {self.base} with base {other.base}")
            return other.value
        return float(other)

    def _kind(self, other) -> Kind:
        if isinstance(other, EntropyValue) and other.kind == "differential":
            return "differential"
        return self.kind

    def __add__(self, other):
        return EntropyValue(self.value + self._other(other), self.base, self._kind(other))

    def __sub__(self, other):
        return EntropyValue(self.value - self._other(other), self.base, self._kind(other))

    __radd__ = __add__

    def __rsub__(self, other):
        return EntropyValue(self._other(other) - self.value, self.base, self._kind(other))

    def __lt__(self, other):
        return self.value < self._other(other)

    def __le__(self, other):
        return self.value <= self._other(other)

    def __gt__(self, other):
        return self.value > self._other(other)

    def __ge__(self, other):
        return self.value >= self._other(other)

    def to(self, base: float) -> "EntropyValue":
        base = _check_base(base)
        return EntropyValue(self.value * math.log(self.base) / math.log(base), base, self.kind)


def _plogp_sum(p: np.ndarray, base: float) -> float:
    p = np.asarray(p, dtype=np.float64).ravel()
    nz = p[p > 0]
    return float(-(nz * _log(nz, base)).sum())


def information(p: float, base: float = 2) -> float:
    """Self-information log(1/p) of an outcome with probability ``p``."""
    base = _check_base(base)
    if not 0 < p <= 1:
        raise DomainError(f"information is defined for 0 < p <= 1, got {p}")
    return float(-_log(p, base)) + 0.0


def entropy(d, base: float = 2) -> EntropyValue:
    base = _check_base(base)
    d = _as_distribution(d)
    return EntropyValue(max(_plogp_sum(d.probs, base), 0.0), base)


def joint_entropy(j: JointDistribution, base: float = 2) -> EntropyValue:
    base = _check_base(base)
    return EntropyValue(max(_plogp_sum(j.probs, base), 0.0), base)


def conditional_entropy(j: JointDistribution, given: Axis = "y", base: float = 2) -> EntropyValue:
    """H(X|Y) for ``given="y"`` (the default) or H(Y|X) for ``given="x"``.

    Evaluated directly as -sum P(x,y) log P(x|y); cells with P(x,y) = 0 are
    skipped, which also skips every row conditioned on a null event.
    """
    base = _check_base(base)
    if given not in ("x", "y"):
        raise ValueError(f"given must be 'x' or 'y', not {given!r}")
    p = j.probs if given == "x" else j.probs.T
    marg = p.sum(axis=1, keepdims=True)
    mask = p > 0
    cond = np.divide(p, marg, out=np.ones_like(p), where=mask)
    h = float(-(p[mask] * _log(cond[mask], base)).sum())
    return EntropyValue(max(h, 0.0), base)


def mutual_information(input, kernel, base: float = 2) -> EntropyValue:
    """H(X) - H(X|Y) for input law ``input`` sent through ``kernel``."""
    d, k = _as_distribution(input), _as_kernel(kernel)
    _check_dims(d, k)
    j = joint_from_input_and_kernel(d, k)
    mi = entropy(j.marginal_x(), base) - conditional_entropy(j, "y", base)
    return EntropyValue(max(mi.value, 0.0), mi.base)


def _midpoints(support: tuple[float, float], steps: int) -> tuple[np.ndarray, float]:
    a, b = map(float, support)
    if not (math.isfinite(a) and math.isfinite(b) and b > a):
        raise DomainError(f"support must be a finite interval, got {support}")
    if steps < 1:
        raise DomainError("quadrature needs at least one step")
    h = (b - a) / steps
    return a + h * (np.arange(steps) + 0.5), h


def _eval_density(density: Callable, x: np.ndarray) -> np.ndarray:
    try:
        fx = np.asarray(density(x), dtype=np.float64)
    except (TypeError, ValueError):
        fx = None
    if fx is None or fx.shape != x.shape:
        fx = np.array([density(float(v)) for v in x], dtype=np.float64)
    return fx


def differential_entropy_numeric(
    density: Callable, support: tuple[float, float], steps: int = 100_000, base: float = 2
) -> EntropyValue:
    """Relative entropy -∫ f log f over a finite support by the composite midpoint rule.

    The density should be vectorised over numpy arrays; scalar-only
    callables are evaluated point by point. Mass outside ``support`` is
    not seen, so heavy-tailed densities must be truncated generously.
    """
    base = _check_base(base)
    x, h = _midpoints(support, steps)
    fx = _eval_density(density, x)
    if np.any(fx < 0) or not np.all(np.isfinite(fx)):
        raise NotADensity("density must be finite and nonnegative on the support")
    mass = fx.sum() * h
    if abs(mass - 1.0) > DENSITY_TOL:
        raise NotADensity(f"density integrates to {mass!r} on {support}")
    pos = fx > 0
    h_val = float(-(fx[pos] * _log(fx[pos], base)).sum() * h)
    return EntropyValue(h_val, base, "differential")


def gaussian_entropy(sigma: float, base: float = 2) -> EntropyValue:
    """Closed form log sqrt(2 pi e sigma^2) for a normal law (mean irrelevant)."""
    base = _check_base(base)
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    val = 0.5 * float(_log(2 * math.pi * math.e, base)) + float(_log(sigma, base))
    return EntropyValue(val, base, "differential")
