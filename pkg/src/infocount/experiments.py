"""Monte Carlo and exact-limit experiments on discrete memoryless channels.

Randomness comes from numpy's counter-based Philox generator. Every trial
gets its own substream keyed by ``(seed, point index, trial index)``, so a
report depends only on the configuration and the seed, never on how many
threads ran the trials or in which order they finished.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .channel import DiscreteChannel
from .combinatorics import binomial_central_limit_table
from .entropy import mutual_information
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    DomainError,
    EmptySet,
    IncompatibleDistributions,
)
from .probability import Distribution, _as_distribution, output_distribution

DEFAULT_BUDGET = 1e9
DEFAULT_COMPAT_TOL = 1e-12
# codebooks up to this many symbols per point are decoded literally
EXHAUSTIVE_LIMIT = 5e7


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``key`` under ``seed``."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < 2**64:
        raise DomainError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def _draw(rng: np.random.Generator, cum: np.ndarray, shape) -> np.ndarray:
    """Categorical draws by inverse CDF; ``cum`` holds the cumulative sums."""
    u = rng.random(shape)
    return np.searchsorted(cum[:-1], u, side="right")


def _transmit(rng: np.random.Generator, cum_rows: np.ndarray, x: np.ndarray) -> np.ndarray:
    u = rng.random(x.shape)
    return (u[..., None] >= cum_rows[x][..., :-1]).sum(axis=-1)


def _run(fn: Callable[[int], object], n: int, threads: int) -> list:
    if threads <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))  # map preserves trial order


def _std_error(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    columns: list[str]
    rows: list[dict]
    seed: int | None = None
    wall_time: float = field(default=0.0, compare=False)

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "kind": self.kind,
            "seed": self.seed,
            "config": self.config,
            "columns": self.columns,
            "rows": self.rows,
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    def dumps(self, include_timing: bool = False) -> str:
        """Canonical JSON; timing is left out by default so reruns compare byte-equal."""
        return json.dumps(self.to_json(include_timing), indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(row[c]) for c in self.columns])
        return buf.getvalue()

    def to_text(self) -> str:
        cells = [self.columns] + [[_fmt(r[c]) for c in self.columns] for r in self.rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(self.columns))]
        lines = ["  ".join(s.rjust(w) for s, w in zip(row, widths)) for row in cells]
        head = f"# {self.kind}" + (f"  seed={self.seed}" if self.seed is not None else "")
        return "\n".join([head] + lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------- compatibility


def is_compatible(ch: DiscreteChannel, d1, d2, tol: float = DEFAULT_COMPAT_TOL) -> bool:
    """True when the two inputs induce output laws differing by more than ``tol`` somewhere."""
    d1, d2 = _as_distribution(d1), _as_distribution(d2)
    if d1.n != ch.n_in or d2.n != ch.n_in:
        raise DimensionMismatch("distributions must match the channel input alphabet")
    if tol < 0:
        raise DomainError("tol must be nonnegative")
    q1 = output_distribution(d1, ch.transit).probs
    q2 = output_distribution(d2, ch.transit).probs
    return bool(np.max(np.abs(q1 - q2)) > tol)


@dataclass(frozen=True, eq=False)
class AdmissibleSet:
    """Finite set of input laws whose output laws are pairwise distinct."""

    distributions: tuple[Distribution, ...]

    @classmethod
    def build(cls, ch: DiscreteChannel, dists: Iterable, tol: float = DEFAULT_COMPAT_TOL):
        ds = tuple(_as_distribution(d) for d in dists)
        if not ds:
            raise EmptySet("an admissible set needs at least one distribution")
        for i in range(len(ds)):
            for j in range(i + 1, len(ds)):
                if not is_compatible(ch, ds[i], ds[j], tol):
                    raise IncompatibleDistributions(
                        f"distributions {i} and {j} induce the same output law"
                    )
        return cls(ds)

    def __len__(self) -> int:
        return len(self.distributions)


# ---------------------------------------------------------------- random coding


@dataclass(frozen=True, eq=False)
class RandomCodingConfig:
    channel: DiscreteChannel
    input: Distribution
    block_lengths: tuple[int, ...]
    rates: tuple[float, ...]
    trials: int
    seed: int
    budget: float = DEFAULT_BUDGET
    method: str = "auto"  # "auto", "exhaustive" or "conditional"

    def __post_init__(self):
        object.__setattr__(self, "input", _as_distribution(self.input))
        bl = (self.block_lengths,) if isinstance(self.block_lengths, int) else self.block_lengths
        rs = (self.rates,) if isinstance(self.rates, (int, float)) else self.rates
        object.__setattr__(self, "block_lengths", tuple(int(t) for t in bl))
        object.__setattr__(self, "rates", tuple(float(r) for r in rs))
        object.__setattr__(self, "seed", _check_seed(self.seed))
        if self.input.n != self.channel.n_in:
            raise DimensionMismatch("input law must match the channel input alphabet")
        if not self.block_lengths or any(t < 1 for t in self.block_lengths):
            raise DomainError("block lengths must be >= 1")
        if not self.rates or any(not r > 0 for r in self.rates):
            raise DomainError("rates must be positive")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.method not in ("auto", "exhaustive", "conditional"):
            raise DomainError(f"unknown method {self.method!r}")
        for T, R in self.points():
            if T * R > 1000:
                raise DomainError(f"T*R = {T * R} is beyond any simulable codebook")
            if codebook_size(T, R) < 2:
                raise DomainError(f"codebook at T={T}, R={R} has fewer than 2 messages")

    def points(self) -> list[tuple[int, float]]:
        return [(T, R) for R in self.rates for T in self.block_lengths]

    def echo(self) -> dict:
        return {
            "channel": self.channel.to_json(),
            "input": self.input.to_json(),
            "block_lengths": list(self.block_lengths),
            "rates": list(self.rates),
            "trials": self.trials,
            "method": self.method,
            "budget": self.budget,
        }


def codebook_size(T: int, R: float) -> int:
    """M = ceil(2^(T R))."""
    return math.ceil(2.0 ** (T * R))


class _ScoreModel:
    """Log-likelihood bookkeeping shared by both decoding routes.

    (input, output) pairs with equal log transition probability share a
    class, and a codeword's score is ``counts @ values`` over classes. Equal
    class counts therefore give bit-identical scores regardless of symbol
    order. Pairs with zero probability map to class -1 (score -inf).
    """

    def __init__(self, ch: DiscreteChannel, input: Distribution):
        W = ch.rows
        pos = W > 0
        self.values, inverse = np.unique(np.log2(W[pos]), return_inverse=True)
        self.cls = np.full(W.shape, -1, dtype=np.int64)
        self.cls[pos] = inverse.ravel()
        self.nc = len(self.values)
        self.input = input.probs
        self.cum_in = np.cumsum(input.probs)
        self.cum_rows = np.cumsum(W, axis=1)
        self.n_out = W.shape[1]
        self._cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}

    def scores(self, codewords: np.ndarray, y: np.ndarray) -> np.ndarray:
        c = self.cls[codewords, y]
        counts = np.stack([(c == k).sum(axis=-1) for k in range(self.nc)], axis=-1)
        s = counts.astype(np.float64) @ self.values
        return np.where((c < 0).any(axis=-1), -np.inf, s)

    def competitor_law(self, out_counts: tuple[int, ...]):
        """Score law of one codeword drawn independently of the received word.

        Depends on the received word only through its output counts. Returns
        sorted distinct scores and their probabilities; mass on impossible
        codewords is dropped, since those never compete.
        """
        hit = self._cache.get(out_counts)
        if hit is not None:
            return hit
        states: dict[tuple[int, ...], float] = {(0,) * self.nc: 1.0}
        for y, k in enumerate(out_counts):
            step: dict[int, float] = {}
            for x, px in enumerate(self.input):
                c = int(self.cls[x, y])
                if px > 0 and c >= 0:
                    step[c] = step.get(c, 0.0) + px
            for _ in range(k):
                nxt: dict[tuple[int, ...], float] = {}
                for st, p in states.items():
                    for c, pc in step.items():
                        key = st[:c] + (st[c] + 1,) + st[c + 1 :]
                        nxt[key] = nxt.get(key, 0.0) + p * pc
                states = nxt
        keys = np.array(list(states), dtype=np.float64).reshape(len(states), self.nc)
        probs = np.fromiter(states.values(), dtype=np.float64, count=len(states))
        scores = keys @ self.values
        order = np.argsort(scores, kind="stable")
        law = (scores[order], probs[order])
        self._cache[out_counts] = law
        return law


def _tie_tol(s: float) -> float:
    return 1e-9 * max(1.0, abs(s))


def ml_decode(scores: np.ndarray) -> int:
    """Lowest index whose score is within tie tolerance of the maximum."""
    best = float(np.max(scores))
    return int(np.flatnonzero(scores >= best - _tie_tol(best))[0])


def _exhaustive_trial(model: _ScoreModel, T: int, M: int, rng: np.random.Generator) -> bool:
    book = _draw(rng, model.cum_in, (M, T))
    sent = int(rng.integers(M))
    y = _transmit(rng, model.cum_rows, book[sent])
    return ml_decode(model.scores(book, y)) != sent


def _log_ok_averaged(M: int, p_beat: float, p_tie: float) -> float:
    """log P(correct) averaged over a uniformly chosen sent index m.

    Competitors below m must score strictly lower (a = 1 - p_beat - p_tie
    each), those above must not score higher (b = 1 - p_beat each), so
    P(ok) = (1/M) sum_m a^m b^(M-1-m) = b^(M-1) (1 - r^M) / (M (1 - r)), r = a/b.
    """
    b = 1.0 - p_beat
    if b <= 0:
        return -math.inf
    log_b = math.log1p(-p_beat)
    if p_tie <= 0:
        return (M - 1) * log_b
    q = p_tie / b  # 1 - r
    if q >= 1:
        return (M - 1) * log_b - math.log(M)
    log_r = math.log1p(-q)
    return (M - 1) * log_b + math.log(-math.expm1(M * log_r)) - math.log(M * q)


def _conditional_trial(model: _ScoreModel, T: int, M: int, rng: np.random.Generator) -> bool:
    x = _draw(rng, model.cum_in, T)
    y = _transmit(rng, model.cum_rows, x)
    u = rng.random()
    s1 = float(model.scores(x, y))
    scores, probs = model.competitor_law(tuple(np.bincount(y, minlength=model.n_out).tolist()))
    tol = _tie_tol(s1)
    hi = np.searchsorted(scores, s1 + tol, side="right")
    lo = np.searchsorted(scores, s1 - tol, side="left")
    # tail sums taken smallest-first keep tiny probabilities accurate
    p_beat = float(probs[hi:][::-1].sum())
    p_tie = float(probs[lo:hi].sum())
    p_err = -math.expm1(_log_ok_averaged(M, p_beat, min(p_tie, 1.0 - p_beat)))
    return u < p_err


def _conditional_cost(model: _ScoreModel, T: int, trials: int) -> float:
    distinct_y = min(trials, math.comb(T + model.n_out - 1, model.n_out - 1))
    states = math.comb(T + model.nc - 1, max(model.nc - 1, 0))
    return trials * T * (model.n_out + 2) + distinct_y * T * states * max(model.nc, 1)


def plan_random_coding(cfg: RandomCodingConfig, model: _ScoreModel | None = None) -> list[dict]:
    """Decoding route and symbol-operation estimate for every point."""
    model = model or _ScoreModel(cfg.channel, cfg.input)
    plan = []
    for T, R in cfg.points():
        M = codebook_size(T, R)
        exhaustive_cost = float(M) * T * cfg.trials
        method = cfg.method
        if method == "auto":
            method = "exhaustive" if exhaustive_cost <= EXHAUSTIVE_LIMIT else "conditional"
        cost = exhaustive_cost if method == "exhaustive" else _conditional_cost(model, T, cfg.trials)
        plan.append({"T": T, "R": R, "M": M, "method": method, "cost": cost})
    return plan


def random_coding_sweep(cfg: RandomCodingConfig, threads: int = 1) -> ExperimentReport:
    """Block error rate of random codes under maximum-likelihood decoding.

    Each trial draws a fresh codebook of M = ceil(2^(T R)) codewords i.i.d.
    from ``cfg.input``, sends a uniformly chosen message and decodes by
    maximum likelihood, ties going to the lowest index. The reported rate
    is thus the average error probability of the random code.

    Small codebooks are simulated literally. Large ones use the exact
    conditional law of the decision instead. Given the received word and
    the sent codeword's score, each other codeword independently scores
    above it (or ties) with a probability taken from the exact score law
    of a random codeword; averaging over the sent index is done in closed
    form. The trial's error is drawn from the resulting error probability,
    which has the same distribution as literal decoding.

    The whole sweep is costed before anything runs; :class:`BudgetExceeded`
    is raised when the estimate passes ``cfg.budget``.
    """
    t0 = time.perf_counter()
    model = _ScoreModel(cfg.channel, cfg.input)
    plan = plan_random_coding(cfg, model)
    total = sum(p["cost"] for p in plan)
    if total > cfg.budget:
        raise BudgetExceeded(total, cfg.budget)

    rows = []
    for idx, pt in enumerate(plan):
        T, M = pt["T"], pt["M"]
        trial = _exhaustive_trial if pt["method"] == "exhaustive" else _conditional_trial

        def one(i, T=T, M=M, trial=trial, idx=idx):
            return trial(model, T, M, substream(cfg.seed, idx, i))

        errors = sum(_run(one, cfg.trials, threads))
        rate = errors / cfg.trials
        rows.append(
            {
                "T": T,
                "R": pt["R"],
                "M": M,
                "method": pt["method"],
                "trials": cfg.trials,
                "errors": errors,
                "error_rate": rate,
                "std_error": _std_error(rate, cfg.trials),
            }
        )
    return ExperimentReport(
        "random_coding",
        cfg.echo(),
        ["T", "R", "M", "method", "trials", "errors", "error_rate", "std_error"],
        rows,
        cfg.seed,
        time.perf_counter() - t0,
    )


# ---------------------------------------------------------------- classification


def classify_by_type(
    ch: DiscreteChannel,
    d1,
    d2,
    T: int | Sequence[int],
    trials: int,
    seed: int,
    threads: int = 1,
    budget: float = DEFAULT_BUDGET,
) -> ExperimentReport:
    """Tell two input classes apart from the output letter counts alone.

    Each trial picks a class with probability 1/2, sends a length-T word
    drawn i.i.d. from that class's law, and guesses the class whose
    expected output law is nearest (max-norm) to the empirical output
    frequencies. Ties go to the first class.
    """
    t0 = time.perf_counter()
    d1, d2 = _as_distribution(d1), _as_distribution(d2)
    seed = _check_seed(seed)
    if not is_compatible(ch, d1, d2, 0.0):
        raise IncompatibleDistributions("the two inputs induce the same output law")
    Ts = [int(T)] if isinstance(T, (int, np.integer)) else [int(t) for t in T]
    if not Ts or any(t < 1 for t in Ts) or trials < 1:
        raise DomainError("need T >= 1 and trials >= 1")
    cost = float(sum(Ts)) * trials * (ch.n_out + 2)
    if cost > budget:
        raise BudgetExceeded(cost, budget)

    cums = [np.cumsum(d1.probs), np.cumsum(d2.probs)]
    expected = np.stack(
        [output_distribution(d1, ch.transit).probs, output_distribution(d2, ch.transit).probs]
    )
    cum_rows = np.cumsum(ch.rows, axis=1)

    rows = []
    for idx, t in enumerate(Ts):

        def one(i, t=t, idx=idx):
            rng = substream(seed, idx, i)
            label = int(rng.random() >= 0.5)
            x = _draw(rng, cums[label], t)
            y = _transmit(rng, cum_rows, x)
            freq = np.bincount(y, minlength=ch.n_out) / t
            dist = np.abs(expected - freq).max(axis=1)
            return int(np.argmin(dist)) == label

        correct = sum(_run(one, trials, threads))
        acc = correct / trials
        rows.append(
            {"T": t, "trials": trials, "correct": correct, "accuracy": acc,
             "std_error": _std_error(acc, trials)}
        )
    config = {
        "channel": ch.to_json(),
        "d1": d1.to_json(),
        "d2": d2.to_json(),
        "block_lengths": Ts,
        "trials": trials,
        "budget": budget,
    }
    return ExperimentReport(
        "classify", config, ["T", "trials", "correct", "accuracy", "std_error"], rows, seed,
        time.perf_counter() - t0,
    )


# ---------------------------------------------------------------- no-gain limit


def no_gain_limit(
    ch: DiscreteChannel, f, T_values: Iterable[int], tol: float = DEFAULT_COMPAT_TOL
) -> ExperimentReport:
    """Rate obtained by pooling the typical classes of an admissible set.

    With I(X) = H(X) - H(X|Y(X)) for each X in the set,
    g(T) = log2(sum_X 2^(T I(X))) / T. The column ``excess`` is
    g(T) - max_X I(X), evaluated as log2(1 + sum_rest 2^(T (I - I_max))) / T
    so that it stays accurate (and positive) long after g(T) itself has
    rounded to max I; it always lies in (0, log2 |F| / T].
    """
    t0 = time.perf_counter()
    fs = f if isinstance(f, AdmissibleSet) else AdmissibleSet.build(ch, f, tol)
    if len(fs) == 0:
        raise EmptySet("admissible set is empty")
    info = np.array([mutual_information(d, ch.transit).value for d in fs.distributions])
    top = int(np.argmax(info))
    i_max = float(info[top])
    rest = np.delete(info, top) - i_max
    rows = []
    for T in T_values:
        T = int(T)
        if T < 1:
            raise DomainError("T must be >= 1")
        tail = float(np.exp2(T * rest).sum())
        excess = math.log1p(tail) / math.log(2) / T
        bound = math.log2(len(fs)) / T
        rows.append(
            {
                "T": T,
                "g": i_max + excess,
                "max_I": i_max,
                "excess": excess,
                "bound": bound,
                "within_bound": bool(excess <= bound),
            }
        )
    config = {
        "channel": ch.to_json(),
        "admissible_set": [d.to_json() for d in fs.distributions],
        "mutual_information": info.tolist(),
        "T_values": [r["T"] for r in rows],
    }
    return ExperimentReport(
        "no_gain", config, ["T", "g", "max_I", "excess", "bound", "within_bound"], rows, None,
        time.perf_counter() - t0,
    )


def binomial_limit_report(T_values: Iterable[int]) -> ExperimentReport:
    t0 = time.perf_counter()
    table = binomial_central_limit_table(T_values)
    rows = [r._asdict() for r in table]
    return ExperimentReport(
        "binomial_limit",
        {"T_values": [r["T"] for r in rows]},
        ["T", "central", "total", "difference"],
        rows,
        None,
        time.perf_counter() - t0,
    )
