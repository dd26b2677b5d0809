"""Hecke algebra representations on tensor chains ``(C^n)^{(x) m}``.

Three two-site operators are provided:

* ``pi``:       q sum_i e_ii(x)e_ii + (q - q^-1) sum_{i<j} e_ii(x)e_jj + sum_{i!=j} e_ij(x)e_ji
* ``pi_plus``:  same diagonal on i > j, flip with sign +
* ``pi_minus``: same diagonal on i > j, flip with sign -

``g_k`` acts on sites (k, k+1).  Matrices are dense numpy arrays, with
``mpq`` entries (dtype object) in exact mode and floats otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qarith import DomainError, QParam, Scalar

VARIANTS = ("pi", "pi_plus", "pi_minus")
MAX_SITES = 5
MAX_DIM = 4


@dataclass
class ChainOperator:
    n: int
    m: int
    matrix: np.ndarray
    variant: str | None = None

    def __post_init__(self):
        size = self.n ** self.m
        if self.matrix.shape != (size, size):
            raise DomainError(f"matrix shape {self.matrix.shape} does not match n={self.n}, m={self.m}")

    def __matmul__(self, other: "ChainOperator") -> "ChainOperator":
        return ChainOperator(self.n, self.m, self.matrix.dot(other.matrix), self.variant)

    def is_scalar(self) -> bool:
        M = self.matrix
        d = M[0, 0]
        off = M - np.diag(np.diag(M))
        return bool(np.all(off == 0)) and all(x == d for x in np.diag(M))

    def diagonal(self) -> list:
        return list(np.diag(self.matrix))


def _zeros(size: int, q: QParam) -> np.ndarray:
    if q.is_exact:
        return np.full((size, size), q.scalar(0), dtype=object)
    return np.zeros((size, size))


def identity(n: int, m: int, q: QParam) -> np.ndarray:
    M = _zeros(n ** m, q)
    for i in range(n ** m):
        M[i, i] = q.scalar(1)
    return M


def g1_matrix(n: int, q: QParam, variant: str = "pi") -> ChainOperator:
    """The two-site generator.  Basis index of e_a (x) e_b is ``a * n + b``."""
    if n < 2:
        raise DomainError("n must be >= 2")
    if variant not in VARIANTS:
        raise DomainError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    v = q.value
    c = v - 1 / v
    sign = -1 if variant == "pi_minus" else 1
    M = _zeros(n * n, q)
    for a in range(n):
        M[a * n + a, a * n + a] = v
        for b in range(n):
            if a == b:
                continue
            diag_here = a < b if variant == "pi" else a > b
            if diag_here:
                M[a * n + b, a * n + b] = c
            # e_ab (x) e_ba sends e_b (x) e_a to e_a (x) e_b
            M[a * n + b, b * n + a] = q.scalar(sign)
    return ChainOperator(n, 2, M, variant)


def flip(n: int, q: QParam) -> ChainOperator:
    M = _zeros(n * n, q)
    for a in range(n):
        for b in range(n):
            M[a * n + b, b * n + a] = q.scalar(1)
    return ChainOperator(n, 2, M, None)


def _kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.kron(A, B)


def embed_gk(g1: ChainOperator, k: int, m: int, q: QParam | None = None) -> ChainOperator:
    """Place a two-site operator on sites (k, k+1) of an m-site chain (1-based k)."""
    if not 1 <= k <= m - 1:
        raise DomainError(f"k={k} out of range for m={m}")
    n = g1.n
    exact = g1.matrix.dtype == object
    one = g1.matrix[0, 0] * 0 + 1

    def eye(size):
        if exact:
            E = np.full((size, size), one * 0, dtype=object)
            for i in range(size):
                E[i, i] = one
            return E
        return np.eye(size)

    M = _kron(_kron(eye(n ** (k - 1)), g1.matrix), eye(n ** (m - k - 1)))
    return ChainOperator(n, m, M, g1.variant)


def _max_abs(M: np.ndarray) -> Scalar:
    if M.size == 0:
        return 0
    return max(abs(x) for x in M.ravel())


@dataclass
class HeckeReport:
    variant: str
    n: int
    m: int
    q: str
    residuals: dict = field(default_factory=dict)

    @property
    def max_residual(self):
        return max(self.residuals.values()) if self.residuals else 0

    def passed(self, tol: float = 0.0) -> bool:
        return all(r <= tol for r in self.residuals.values())


def check_hecke(n: int, m: int, q: QParam, variant: str = "pi") -> HeckeReport:
    """Check quadratic, braid and far-commutation relations on an m-site chain."""
    if m < 2:
        raise DomainError("m must be >= 2")
    if n ** m > MAX_DIM ** MAX_SITES:
        raise DomainError("chain too large for dense matrices")
    g1 = g1_matrix(n, q, variant)
    gens = [embed_gk(g1, k, m).matrix for k in range(1, m)]
    I = identity(n, m, q)
    c = q.value - 1 / q.value
    quad = max(_max_abs(g.dot(g) - (c * g + I)) for g in gens)
    report = HeckeReport(variant, n, m, str(q.value), {"quadratic": quad})
    if m >= 3:
        report.residuals["braid"] = max(
            _max_abs(a.dot(b).dot(a) - b.dot(a).dot(b)) for a, b in zip(gens, gens[1:])
        )
    far = [(i, j) for i in range(len(gens)) for j in range(i + 2, len(gens))]
    if far:
        report.residuals["commute"] = max(
            _max_abs(gens[i].dot(gens[j]) - gens[j].dot(gens[i])) for i, j in far
        )
    return report


@dataclass(frozen=True)
class InvariantDensity:
    weights: tuple

    @property
    def n(self) -> int:
        return len(self.weights)


def invariant_density(n: int, q: QParam) -> InvariantDensity:
    """Diagonal of the invariant density: ``c q^{2(n-i)}``, ``c = (1-q^2)/(1-q^{2n})``."""
    if n < 2:
        raise DomainError("n must be >= 2")
    v = q.value
    c = (1 - v ** 2) / (1 - v ** (2 * n))
    return InvariantDensity(tuple(c * v ** (2 * (n - i)) for i in range(1, n + 1)))


def cond_expect_last(x: ChainOperator, density: InvariantDensity) -> ChainOperator:
    """Contract the last site of *x* against the diagonal density."""
    n = x.n
    if density.n != n:
        raise DomainError("density rank does not match site dimension")
    if x.m < 2:
        raise DomainError("need at least two sites")
    size = n ** (x.m - 1)
    M = x.matrix.reshape(size, n, size, n)
    exact = M.dtype == object
    out = np.full((size, size), M[0, 0, 0, 0] * 0, dtype=object) if exact else np.zeros((size, size))
    for k, w in enumerate(density.weights):
        out = out + w * M[:, k, :, k]
    return ChainOperator(n, x.m - 1, out, x.variant)


def e_scalar_closed_form(n: int, q: QParam) -> Scalar:
    """Closed value ``c q^{2n-1}`` of the scalar E(pi_pm(g_1))."""
    v = q.value
    c = (1 - v ** 2) / (1 - v ** (2 * n))
    return c * v ** (2 * n - 1)


def dichotomy(n: int, q: QParam) -> dict:
    """E(g_1) for each variant: the scalar value, or the diagonal when not scalar."""
    dens = invariant_density(n, q)
    out = {}
    for variant in VARIANTS:
        E = cond_expect_last(g1_matrix(n, q, variant), dens)
        out[variant] = {"scalar": E.is_scalar(), "diagonal": E.diagonal()}
    return out
