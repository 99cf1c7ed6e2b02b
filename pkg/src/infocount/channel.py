"""Discrete memoryless channels and their capacity.

Two independent routes to the capacity max_X I(X; Y):

* :func:`capacity_iterative` -- alternating maximisation with
  multiplicative input updates ``p_i <- p_i 2^(D_i)``, where ``D_i`` is the
  divergence of row i from the current output law. Every input law gives
  the bracket ``sum_i p_i D_i <= C <= max_i D_i``; iteration stops once it
  is narrower than ``tol``.
* :func:`capacity_grid_oracle` -- brute-force search of the input simplex
  on a lattice of spacing ``1/resolution`` (at most three inputs).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DomainError, NotConverged, TooManyInputs
from .probability import Alphabet, ConditionalKernel, Distribution

CLAMP = 1e-15
DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 100_000
FLOOR = 1e-250
MAX_RELAX = 2.0**40


@dataclass(frozen=True, eq=False)
class DiscreteChannel:
    transit: ConditionalKernel

    def __post_init__(self):
        if not isinstance(self.transit, ConditionalKernel):
            object.__setattr__(self, "transit", ConditionalKernel(np.asarray(self.transit)))
        if not self.transit.defined.all():
            raise DimensionMismatch("every transit row must be a distribution")

    @classmethod
    def from_rows(cls, rows, alphabet_in=None, alphabet_out=None) -> "DiscreteChannel":
        return cls(ConditionalKernel(np.asarray(rows, dtype=np.float64), alphabet_in, alphabet_out))

    @classmethod
    def binary_symmetric(cls, e: float) -> "DiscreteChannel":
        return cls.from_rows([[1 - e, e], [e, 1 - e]], ["0", "1"], ["0", "1"])

    @property
    def alphabet_in(self) -> Alphabet:
        return self.transit.alphabet_in

    @property
    def alphabet_out(self) -> Alphabet:
        return self.transit.alphabet_out

    @property
    def rows(self) -> np.ndarray:
        return self.transit.rows

    @property
    def n_in(self) -> int:
        return self.transit.shape[0]

    @property
    def n_out(self) -> int:
        return self.transit.shape[1]

    def to_json(self) -> dict:
        return self.transit.to_json()

    @classmethod
    def from_json(cls, obj: dict) -> "DiscreteChannel":
        return cls.from_rows(obj["rows"], obj.get("alphabet_in"), obj.get("alphabet_out"))


@dataclass(frozen=True, eq=False)
class CapacityResult:
    capacity: float
    optimal_input: Distribution
    iterations: int
    residual: float
    method: str = "iterative"
    base: float = 2.0

    def to_json(self) -> dict:
        return {
            "capacity": self.capacity,
            "base": self.base,
            "optimal_input": self.optimal_input.to_json(),
            "iterations": self.iterations,
            "residual": self.residual,
            "method": self.method,
        }


def _bits_to(x: float, base: float) -> float:
    return x if base == 2 else x / math.log2(base)


def _row_divergences(W: np.ndarray, q: np.ndarray) -> np.ndarray:
    """D(W_i || q) in bits for every row; requires q > 0 wherever W > 0."""
    mask = W > 0
    ratio = np.divide(W, q, out=np.ones_like(W), where=mask)
    return np.where(mask, W * np.log2(ratio), 0.0).sum(axis=1)


def _mi_bits(P: np.ndarray, W: np.ndarray, row_h: np.ndarray) -> np.ndarray:
    """I = H(Y) - H(Y|X) in bits for a batch of inputs ``P`` (one per row)."""
    Q = P @ W
    safe = np.where(Q > 0, Q, 1.0)
    hy = -(Q * np.log2(safe)).sum(axis=1)
    return hy - P @ row_h


def _clean(p: np.ndarray) -> np.ndarray:
    p = np.where(p < CLAMP, 0.0, p)
    return p / p.sum()


def errorless_capacity(alphabet, base: float = 2) -> CapacityResult:
    """log n, achieved by the uniform input."""
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet.default(alphabet) if isinstance(alphabet, int) else Alphabet(tuple(alphabet))
    n = alphabet.n
    return CapacityResult(
        _bits_to(math.log2(n), base), Distribution.uniform(n, alphabet), 0, 0.0, "errorless", base
    )


def capacity_iterative(
    ch: DiscreteChannel,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    base: float = 2,
) -> CapacityResult:
    """Capacity with a certified bracket. ``tol`` is measured in the output base.

    Raises :class:`NotConverged` (carrying the best-so-far result) when the
    bracket is still wider than ``tol`` after ``max_iter`` steps.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    tol_bits = tol * math.log2(base)
    W = ch.rows[:, ch.rows.sum(axis=0) > 0]  # outputs that never occur carry no information

    def bracket(p):
        D = _row_divergences(W, p @ W)
        return D, float(p @ D), float(D.max())

    def step(p, D, upper, lam):
        # floor keeps every output reachable so all D stay finite
        p = np.maximum(p * np.exp2(lam * (D - upper)), FLOOR)
        return p / p.sum()

    p = np.full(ch.n_in, 1.0 / ch.n_in)
    D, lower, upper = bracket(p)
    lam = 1.0
    it = 1
    while upper - lower >= tol_bits and it < max_iter:
        # over-relaxed step, kept only if it raises the lower bound; the plain
        # step (lam = 1) never decreases it
        while True:
            cand = step(p, D, upper, lam)
            cD, clow, cup = bracket(cand)
            if lam == 1.0 or clow > lower:
                break
            lam = max(1.0, lam / 4)
        p, D, lower, upper = cand, cD, clow, cup
        lam = min(lam * 2, MAX_RELAX)
        it += 1
    result = CapacityResult(
        _bits_to(max(lower, 0.0), base),
        Distribution(_clean(p), ch.alphabet_in),
        it,
        _bits_to(max(upper - lower, 0.0), base),
        "iterative",
        base,
    )
    if upper - lower >= tol_bits:
        raise NotConverged(result)
    return result


def _lattice_2(lo: int, hi: int, step: int, R: int) -> np.ndarray:
    k = np.unique(np.clip(np.append(np.arange(lo, hi + 1, step), hi), 0, R))
    return np.stack([k, R - k], axis=1)


def _lattice_3(lo1, hi1, lo2, hi2, step, R) -> np.ndarray:
    a = np.unique(np.append(np.arange(lo1, hi1 + 1, step), hi1))
    b = np.unique(np.append(np.arange(lo2, hi2 + 1, step), hi2))
    k1, k2 = np.meshgrid(a, b, indexing="ij")
    k1, k2 = k1.ravel(), k2.ravel()
    keep = k1 + k2 <= R
    k1, k2 = k1[keep], k2[keep]
    return np.stack([k1, k2, R - k1 - k2], axis=1)


def capacity_grid_oracle(
    ch: DiscreteChannel, resolution: int = 10_000, base: float = 2, coarse: int = 200
) -> CapacityResult:
    """Maximise I(X; Y) over inputs whose entries are multiples of 1/resolution.

    Concavity of I in the input law justifies a coarse-to-fine search: the
    whole simplex is scanned at spacing about 1/coarse, then a window of
    +-5 cells around the best point is rescanned ten times finer, down to
    the target lattice. Ties go to the lexicographically smallest point.
    ``residual`` is the certified gap max_i D(W_i || q) - I at the returned
    point.
    """
    n = ch.n_in
    if n > 3:
        raise TooManyInputs(f"grid oracle handles at most 3 inputs, got {n}")
    if resolution < 10:
        raise DomainError("resolution must be >= 10")
    R = int(resolution)
    W = ch.rows
    mask = W > 0
    row_h = -np.where(mask, W * np.log2(np.where(mask, W, 1.0)), 0.0).sum(axis=1)

    if n == 1:
        best = np.array([R])
        evaluated = 1
    else:
        step = max(1, math.ceil(R / coarse))
        evaluated = 0
        best = None
        while True:
            if best is None:
                pts = _lattice_2(0, R, step, R) if n == 2 else _lattice_3(0, R, 0, R, step, R)
            else:
                w = 5 * prev_step
                if n == 2:
                    pts = _lattice_2(max(0, best[0] - w), min(R, best[0] + w), step, R)
                else:
                    pts = _lattice_3(
                        max(0, best[0] - w), min(R, best[0] + w),
                        max(0, best[1] - w), min(R, best[1] + w), step, R,
                    )
            vals = _mi_bits(pts / R, W, row_h)
            evaluated += len(pts)
            best = pts[int(np.argmax(vals))]
            if step == 1:
                break
            prev_step, step = step, max(1, step // 10)

    p = best / R
    mi = float(_mi_bits(p[None, :], W, row_h)[0])
    used = W[:, W.sum(axis=0) > 0]
    gap = float(_row_divergences(used, p @ used).max()) - mi
    return CapacityResult(
        _bits_to(max(mi, 0.0), base),
        Distribution(p, ch.alphabet_in),
        evaluated,
        _bits_to(max(gap, 0.0), base),
        "grid",
        base,
    )
