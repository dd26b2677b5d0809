"""Random walk on the center of the discrete dual of SU_q(n).

A left-invariant state is a probability measure on dominant weights
(the "Levy measure").  Restricted to the center it gives a Markov
kernel on weights,

    p(s, t) = sum_nu lambda_nu N^t_{nu,s} d_t / (d_nu d_s),

whose rows sum to one because of the quantum-dimension sum rule.
Kernels are truncated to a ball of weights; mass leaving the ball is
collected in a single absorbing cemetery state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .qarith import DomainError, QParam, Scalar
from .weights import (
    DominantWeight,
    classical_dim,
    lr_coeffs,
    qdim,
    trivial,
    weights_in_ball,
)

log = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy PCG64, SeedSequence([seed, path_index])"


class _Cemetery:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "CEMETERY"

    def encode(self) -> str:
        return "cemetery"

    __str__ = encode


CEMETERY = _Cemetery()


@dataclass(frozen=True)
class LevyMeasure:
    """Probability weights on dominant weights of a fixed rank."""

    entries: Mapping[DominantWeight, Scalar]
    q: QParam

    def __post_init__(self):
        if not self.entries:
            raise DomainError("empty Levy measure")
        ranks = {w.rank for w in self.entries}
        if len(ranks) != 1:
            raise DomainError("Levy measure mixes ranks")
        ent = {w: self.q.scalar(m) for w, m in self.entries.items()}
        if any(m < 0 for m in ent.values()):
            raise DomainError("negative mass in Levy measure")
        total = sum(ent.values(), self.q.scalar(0))
        if not self.q.close(total, self.q.scalar(1)):
            raise DomainError(f"Levy measure has total mass {total}, not 1")
        ent = {w: m for w, m in ent.items() if m != 0}
        object.__setattr__(self, "entries", dict(sorted(ent.items())))

    @classmethod
    def delta(cls, w: DominantWeight, q: QParam) -> "LevyMeasure":
        return cls({w: 1}, q)

    @property
    def rank(self) -> int:
        return next(iter(self.entries)).rank

    @property
    def nontrivial(self) -> bool:
        """Some mass sits off the trivial weight."""
        return any(not w.is_trivial for w in self.entries)

    def encode(self) -> str:
        return ";".join(f"{w}:{m}" for w, m in self.entries.items())


def transition_row(s: DominantWeight, levy: LevyMeasure, q: QParam) -> dict[DominantWeight, Scalar]:
    """The row ``t -> p(s, t)`` of the central kernel."""
    if s.rank != levy.rank:
        raise DomainError(f"rank mismatch: SU({s.rank}) vs SU({levy.rank})")
    d_s = qdim(s, q)
    row: dict[DominantWeight, Scalar] = {}
    for nu, lam in levy.entries.items():
        scale = lam / (qdim(nu, q) * d_s)
        for t, mult in lr_coeffs(nu, s).items():
            row[t] = row.get(t, q.scalar(0)) + scale * mult * qdim(t, q)
    return dict(sorted(row.items()))


@dataclass
class TransitionKernel:
    """Central kernel restricted to a ball, with a cemetery column."""

    states: list[DominantWeight]
    rows: list[dict[DominantWeight, Scalar]]
    cemetery: list[Scalar]
    q: QParam
    levy: LevyMeasure
    ball: int
    policy: str = "cemetery"
    index: dict[DominantWeight, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.states)}

    def row(self, s: DominantWeight) -> dict:
        i = self.index[s]
        out = dict(self.rows[i])
        if self.cemetery[i]:
            out[CEMETERY] = self.cemetery[i]
        return out

    def is_interior(self, s: DominantWeight) -> bool:
        return self.cemetery[self.index[s]] == 0

    def prob(self, s, t) -> Scalar:
        if s is CEMETERY:
            return self.q.scalar(1 if t is CEMETERY else 0)
        i = self.index[s]
        if t is CEMETERY:
            return self.cemetery[i]
        return self.rows[i].get(t, self.q.scalar(0))

    def sampling_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-state padded (targets, cumulative probabilities) as float arrays.

        Cumulative sums are accumulated exactly and rounded once; the
        cemetery has index ``len(states)`` and is absorbing.
        """
        S = len(self.states)
        full = [self.row(s) for s in self.states] + [{CEMETERY: self.q.scalar(1)}]
        width = max(len(r) for r in full)
        targets = np.full((S + 1, width), S, dtype=np.int64)
        cum = np.full((S + 1, width), 2.0)
        for i, r in enumerate(full):
            acc = self.q.scalar(0)
            for j, (t, p) in enumerate(r.items()):
                acc += p
                targets[i, j] = S if t is CEMETERY else self.index[t]
                cum[i, j] = float(acc)
            cum[i, len(r) - 1] = 1.0
        return targets, cum


def build_kernel(ball: int, levy: LevyMeasure, q: QParam) -> TransitionKernel:
    """Kernel on all weights with ``|lam| <= ball``; exits go to the cemetery."""
    if ball < 1:
        raise DomainError("ball must be >= 1")
    states = weights_in_ball(levy.rank, ball)
    inside = set(states)
    rows, cem = [], []
    for s in states:
        full = transition_row(s, levy, q)
        rows.append({t: p for t, p in full.items() if t in inside and p != 0})
        cem.append(sum((p for t, p in full.items() if t not in inside), q.scalar(0)))
    log.debug("built kernel on %d states, ball %d", len(states), ball)
    return TransitionKernel(states, rows, cem, q, levy, ball)


def step_distribution(kernel: TransitionKernel, dist: Mapping) -> dict:
    q = kernel.q
    out: dict = {}
    for s, mass in dist.items():
        if mass == 0:
            continue
        if s is CEMETERY:
            out[CEMETERY] = out.get(CEMETERY, q.scalar(0)) + mass
            continue
        for t, p in kernel.row(s).items():
            out[t] = out.get(t, q.scalar(0)) + mass * p
    return out


def distribution_after(kernel: TransitionKernel, n: int) -> dict:
    """Law of the walk after *n* steps from the trivial weight (cemetery included)."""
    if n < 0:
        raise DomainError("n must be >= 0")
    dist: dict = {trivial(kernel.levy.rank): kernel.q.scalar(1)}
    for _ in range(n):
        dist = step_distribution(kernel, dist)
    return dist


@dataclass(frozen=True)
class PathSample:
    seed: int
    path_index: int
    states: tuple


def _uniform_streams(seed: int, count: int, length: int) -> np.ndarray:
    u = np.empty((count, length))
    for i in range(count):
        u[i] = np.random.default_rng([seed, i]).random(length)
    return u


def sample_index_paths(kernel: TransitionKernel, count: int, length: int, seed: int) -> np.ndarray:
    """Sample paths as an integer array of state indices, shape (count, length).

    Column k holds s_{k+1}; the walk starts at the trivial weight, which is
    not recorded.  Index ``len(kernel.states)`` is the cemetery.  Path i
    uses its own stream seeded by ``(seed, i)``, so the output does not
    depend on how paths are batched.
    """
    if count < 1 or length < 1:
        raise DomainError("count and length must be >= 1")
    targets, cum = kernel.sampling_tables()
    u = _uniform_streams(seed, count, length)
    cur = np.full(count, kernel.index[trivial(kernel.levy.rank)], dtype=np.int64)
    out = np.empty((count, length), dtype=np.int64)
    for k in range(length):
        choice = (u[:, k, None] >= cum[cur]).sum(axis=1)
        cur = targets[cur, choice]
        out[:, k] = cur
    return out


def sample_paths(kernel: TransitionKernel, count: int, length: int, seed: int) -> list[PathSample]:
    idx = sample_index_paths(kernel, count, length, seed)
    lookup = list(kernel.states) + [CEMETERY]
    return [PathSample(seed, i, tuple(lookup[j] for j in row)) for i, row in enumerate(idx)]


@dataclass(frozen=True)
class EigenCheck:
    eigenvalue: Scalar
    residual: Scalar
    interior: int


def dim_ratio(s: DominantWeight, q: QParam) -> Scalar:
    return q.scalar(classical_dim(s)) / qdim(s, q)


def dim_ratio_eigencheck(levy: LevyMeasure, q: QParam, ball: int) -> EigenCheck:
    """Check that ``h(s) = dim(s) / d_s`` is an eigenfunction of the kernel.

    The eigenvalue is ``sum_nu lambda_nu dim(nu) / d_nu``; the residual is
    the largest ``|(P h)(s) - lambda h(s)|`` over rows that do not leak
    into the cemetery.
    """
    kernel = build_kernel(ball, levy, q)
    lam = sum((m * dim_ratio(nu, q) for nu, m in levy.entries.items()), q.scalar(0))
    residual = q.scalar(0)
    interior = 0
    for s, row, cem in zip(kernel.states, kernel.rows, kernel.cemetery):
        if cem != 0:
            continue
        interior += 1
        ph = sum((p * dim_ratio(t, q) for t, p in row.items()), q.scalar(0))
        residual = max(residual, abs(ph - lam * dim_ratio(s, q)))
    return EigenCheck(lam, residual, interior)


@dataclass
class MartingaleTrace:
    values: np.ndarray  # (paths, length)
    oscillation: np.ndarray  # per-path tail oscillation
    window: int
    threshold: float

    @property
    def converged_fraction(self) -> float:
        return float(np.mean(self.oscillation <= self.threshold))


def martingale_trace(
    paths: Sequence[PathSample] | np.ndarray,
    h: Callable,
    window: int = 50,
    threshold: float = 1e-3,
    kernel: TransitionKernel | None = None,
) -> MartingaleTrace:
    """Evaluate *h* along each path and measure tail oscillation.

    *paths* is either a list of ``PathSample`` or an index array from
    ``sample_index_paths`` (then *kernel* is needed to decode indices).
    ``h(CEMETERY)`` must be defined by the caller when paths can die.
    """
    if isinstance(paths, np.ndarray):
        if kernel is None:
            raise DomainError("index paths need the kernel")
        lookup = list(kernel.states) + [CEMETERY]
        table = np.zeros(len(lookup))
        for i in np.unique(paths):
            table[i] = float(h(lookup[i]))
        values = table[paths]
    else:
        cache: dict = {}

        def hv(w):
            if w not in cache:
                cache[w] = float(h(w))
            return cache[w]

        values = np.array([[hv(w) for w in p.states] for p in paths])
    tail = values[:, -window:]
    osc = tail.max(axis=1) - tail.min(axis=1)
    return MartingaleTrace(values, osc, window, threshold)
