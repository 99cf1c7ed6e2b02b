"""Finite probability objects: alphabets, distributions, joints and kernels.

Every object validates on construction (entries nonnegative, sums within
``NORM_TOL`` of one) and then renormalises exactly, so identities between
derived quantities hold to machine precision downstream. Arrays are stored
read-only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import DimensionMismatch, NegativeProbability, NotNormalized

NORM_TOL = 1e-9

Axis = Literal["x", "y"]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.flags.writeable = False
    return arr


def _check_probs(arr: np.ndarray, what: str) -> None:
    if arr.size == 0:
        raise DimensionMismatch(f"{what} is empty")
    if not np.all(np.isfinite(arr)):
        raise NotNormalized(f"{what} contains non-finite entries")
    if np.any(arr < 0):
        raise NegativeProbability(f"{what} has a negative entry: {arr.min()!r}")
    total = arr.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise NotNormalized(f"{what} sums to {float(total)!r}, not 1")


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        syms = tuple(str(s) for s in self.symbols)
        if not syms:
            raise DimensionMismatch("alphabet must contain at least one symbol")
        if len(set(syms)) != len(syms):
            raise ValueError(f"alphabet symbols are not distinct: {syms}")
        object.__setattr__(self, "symbols", syms)

    @classmethod
    def default(cls, n: int) -> "Alphabet":
        return cls(tuple(str(i) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)


def _coerce_alphabet(alphabet, n: int) -> Alphabet:
    if alphabet is None:
        return Alphabet.default(n)
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(tuple(alphabet))
    if alphabet.n != n:
        raise DimensionMismatch(f"alphabet has {alphabet.n} symbols, data has {n}")
    return alphabet


@dataclass(frozen=True, eq=False)
class Distribution:
    probs: np.ndarray
    alphabet: Alphabet = None  # type: ignore[assignment]

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 1:
            raise DimensionMismatch("a distribution is a 1-d vector")
        _check_probs(arr, "distribution")
        object.__setattr__(self, "probs", _frozen(arr / arr.sum()))
        object.__setattr__(self, "alphabet", _coerce_alphabet(self.alphabet, arr.size))

    @classmethod
    def uniform(cls, n: int, alphabet=None) -> "Distribution":
        return cls(np.full(n, 1.0 / n), alphabet)

    @property
    def n(self) -> int:
        return self.probs.size

    def __len__(self) -> int:
        return self.probs.size

    def __repr__(self) -> str:
        return f"Distribution({self.probs.tolist()}, {list(self.alphabet.symbols)})"

    def to_json(self) -> dict:
        return {"alphabet": list(self.alphabet.symbols), "probs": self.probs.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Distribution":
        probs = obj["probs"]
        return cls(np.asarray(probs, dtype=np.float64), obj.get("alphabet"))


@dataclass(frozen=True, eq=False)
class ConditionalKernel:
    """Row-stochastic matrix; row i is the law of the output given input i.

    Rows produced by conditioning on a zero-probability event are marked
    in ``defined`` and hold NaN.
    """

    rows: np.ndarray
    alphabet_in: Alphabet = None  # type: ignore[assignment]
    alphabet_out: Alphabet = None  # type: ignore[assignment]
    defined: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        arr = np.array(self.rows, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise DimensionMismatch("a kernel is a nonempty 2-d matrix")
        if self.defined is None:
            mask = np.ones(arr.shape[0], dtype=bool)
        else:
            mask = np.array(self.defined, dtype=bool)
            if mask.shape != (arr.shape[0],):
                raise DimensionMismatch("defined mask must have one entry per row")
        for i in np.flatnonzero(mask):
            _check_probs(arr[i], f"kernel row {i}")
            arr[i] /= arr[i].sum()
        arr[~mask] = np.nan
        mask.flags.writeable = False
        object.__setattr__(self, "rows", _frozen(arr))
        object.__setattr__(self, "defined", mask)
        object.__setattr__(
            self, "alphabet_in", _coerce_alphabet(self.alphabet_in, arr.shape[0])
        )
        object.__setattr__(
            self, "alphabet_out", _coerce_alphabet(self.alphabet_out, arr.shape[1])
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows.shape  # type: ignore[return-value]

    def __repr__(self) -> str:
        return f"ConditionalKernel({self.rows.tolist()})"

    def to_json(self) -> dict:
        return {
            "alphabet_in": list(self.alphabet_in.symbols),
            "alphabet_out": list(self.alphabet_out.symbols),
            "rows": [r.tolist() if d else None for r, d in zip(self.rows, self.defined)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ConditionalKernel":
        return cls(
            np.asarray(obj["rows"], dtype=np.float64),
            obj.get("alphabet_in"),
            obj.get("alphabet_out"),
        )


@dataclass(frozen=True, eq=False)
class JointDistribution:
    probs: np.ndarray
    alphabet_x: Alphabet = None  # type: ignore[assignment]
    alphabet_y: Alphabet = None  # type: ignore[assignment]

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionMismatch("a joint distribution is a 2-d matrix")
        _check_probs(arr, "joint distribution")
        object.__setattr__(self, "probs", _frozen(arr / arr.sum()))
        object.__setattr__(self, "alphabet_x", _coerce_alphabet(self.alphabet_x, arr.shape[0]))
        object.__setattr__(self, "alphabet_y", _coerce_alphabet(self.alphabet_y, arr.shape[1]))

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape  # type: ignore[return-value]

    def marginal_x(self) -> Distribution:
        return Distribution(self.probs.sum(axis=1), self.alphabet_x)

    def marginal_y(self) -> Distribution:
        return Distribution(self.probs.sum(axis=0), self.alphabet_y)

    def transpose(self) -> "JointDistribution":
        return JointDistribution(self.probs.T, self.alphabet_y, self.alphabet_x)

    def __repr__(self) -> str:
        return f"JointDistribution({self.probs.tolist()})"

    def to_json(self) -> dict:
        return {
            "alphabet_x": list(self.alphabet_x.symbols),
            "alphabet_y": list(self.alphabet_y.symbols),
            "probs": self.probs.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "JointDistribution":
        return cls(
            np.asarray(obj["probs"], dtype=np.float64),
            obj.get("alphabet_x"),
            obj.get("alphabet_y"),
        )


def validate_distribution(probs: Sequence[float], alphabet=None) -> Distribution:
    """Build a :class:`Distribution`, raising if ``probs`` is not a probability vector."""
    return Distribution(np.asarray(probs, dtype=np.float64), alphabet)


def _as_distribution(d) -> Distribution:
    return d if isinstance(d, Distribution) else validate_distribution(d)


def _as_kernel(k) -> ConditionalKernel:
    return k if isinstance(k, ConditionalKernel) else ConditionalKernel(np.asarray(k))


def _check_dims(d: Distribution, k: ConditionalKernel) -> None:
    if k.shape[0] != d.n:
        raise DimensionMismatch(
            f"kernel has {k.shape[0]} rows but the input distribution has {d.n} entries"
        )


def joint_from_input_and_kernel(input, kernel) -> JointDistribution:
    """P(x, y) = P(x) P(y | x)."""
    d, k = _as_distribution(input), _as_kernel(kernel)
    _check_dims(d, k)
    if np.any(d.probs[~k.defined] > 0):
        raise DimensionMismatch("input puts mass on an undefined kernel row")
    rows = np.where(k.defined[:, None], k.rows, 0.0)
    return JointDistribution(d.probs[:, None] * rows, d.alphabet, k.alphabet_out)


def output_distribution(input, kernel) -> Distribution:
    """Law of the output: p_Y[j] = sum_i input[i] * kernel[i, j]."""
    return joint_from_input_and_kernel(input, kernel).marginal_y()


def conditional_from_joint(joint: JointDistribution, given: Axis = "x") -> ConditionalKernel:
    """Condition a joint law on one of its variables.

    ``given="x"`` returns P(y | x) with rows indexed by x; ``given="y"``
    returns P(x | y) with rows indexed by y.
    """
    if given == "y":
        joint = joint.transpose()
    elif given != "x":
        raise ValueError(f"given must be 'x' or 'y', not {given!r}")
    p = joint.probs
    marg = p.sum(axis=1)
    defined = marg > 0
    rows = np.full(p.shape, np.nan)
    rows[defined] = p[defined] / marg[defined, None]
    return ConditionalKernel(rows, joint.alphabet_x, joint.alphabet_y, defined)
