"""The SU_q(2) double-coset Markov operator on C(I_{q^2}).

The double-coset algebra of SU_q(2) is identified with continuous
functions on ``I_{q^2} = {0} u {q^{2k} : k >= 0}``.  For the state
attached to the spin-1/2 representation the Markov operator acts as

    (A h)(t) = ([2]_q)^-1 * ( q^-1 ((1 - q^2 t) h(q^2 t) + q^2 t h(t))
                              + q (t h(t) + (1 - t) h(q^-2 t)) ),

which is a nearest-neighbour walk on the index k of t = q^{2k}, drifting
towards larger k (t -> 0).  The grid keeps k = 0..K; a step from k = K
to K + 1 lands in the point 0 itself, which is absorbing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .qarith import DomainError, QParam, Scalar, q_int

POLE_MARGIN = 1e-6


@dataclass(frozen=True)
class Grid:
    q: QParam
    K: int

    def __post_init__(self):
        if self.K < 1:
            raise DomainError("K must be >= 1")

    @property
    def points(self) -> list[Scalar]:
        v2 = self.q.value ** 2
        out = [self.q.scalar(1)]
        for _ in range(self.K):
            out.append(out[-1] * v2)
        return out

    def steps(self) -> list[tuple[Scalar, Scalar, Scalar]]:
        """Per grid index k: probabilities of moving to k-1, staying, moving to k+1."""
        q = self.q
        v = q.value
        two = q_int(2, q)
        out = []
        for t in self.points:
            down = v * (1 - t) / two
            stay = 2 * v * t / two
            up = (1 - v * v * t) / (v * two)
            out.append((down, stay, up))
        return out


@dataclass
class GridFunction:
    """Values ``h(t_k)`` for k = 0..K and ``h(0)``."""

    values: list
    at_zero: Scalar

    def __len__(self):
        return len(self.values)

    @classmethod
    def constant(cls, grid: Grid, c=1) -> "GridFunction":
        c = grid.q.scalar(c)
        return cls([c] * (grid.K + 1), c)


@dataclass
class GridMeasure:
    """Masses on ``t_k`` (k = 0..K) and on the point 0."""

    masses: list
    at_zero: Scalar

    @property
    def total(self) -> Scalar:
        return sum(self.masses, self.at_zero * 0) + self.at_zero

    @classmethod
    def point(cls, grid: Grid, k: int | None) -> "GridMeasure":
        """Dirac mass at t_k, or at 0 when *k* is None."""
        zero, one = grid.q.scalar(0), grid.q.scalar(1)
        masses = [zero] * (grid.K + 1)
        if k is None:
            return cls(masses, one)
        masses[k] = one
        return cls(masses, zero)


def _check(h_len: int, grid: Grid) -> None:
    if h_len != grid.K + 1:
        raise DomainError(f"expected {grid.K + 1} grid values, got {h_len}")


def apply_A_half(h: GridFunction, grid: Grid) -> GridFunction:
    """Apply the spin-1/2 Markov operator to *h*."""
    _check(len(h.values), grid)
    vals = h.values
    K = grid.K
    out = []
    for k, (down, stay, up) in enumerate(grid.steps()):
        nxt = vals[k + 1] if k < K else h.at_zero
        acc = stay * vals[k] + up * nxt
        if k > 0:
            acc += down * vals[k - 1]
        out.append(acc)
    return GridFunction(out, h.at_zero)


def push_step(nu: GridMeasure, grid: Grid, steps=None) -> GridMeasure:
    """One step of the dual action ``nu -> nu A`` on measures."""
    _check(len(nu.masses), grid)
    steps = steps or grid.steps()
    K = grid.K
    zero = grid.q.scalar(0)
    out = [zero] * (K + 1)
    at_zero = nu.at_zero
    for k, m in enumerate(nu.masses):
        if m == 0:
            continue
        down, stay, up = steps[k]
        out[k] += m * stay
        if k > 0:
            out[k - 1] += m * down
        if k < K:
            out[k + 1] += m * up
        else:
            at_zero += m * up
    return GridMeasure(out, at_zero)


def iterate_measure(nu: GridMeasure, grid: Grid, n: int) -> Iterator[GridMeasure]:
    """Yield ``nu A^j`` for j = 0..n."""
    steps = grid.steps()
    yield nu
    for _ in range(n):
        nu = push_step(nu, grid, steps)
        yield nu


def push_measure(nu: GridMeasure, grid: Grid, n: int) -> GridMeasure:
    if n < 0:
        raise DomainError("n must be >= 0")
    for nu in iterate_measure(nu, grid, n):
        pass
    return nu


def step_probability(grid: Grid, i: int, j: int, n: int) -> Scalar:
    """Probability of being at t_j after n steps from t_i."""
    return push_measure(GridMeasure.point(grid, i), grid, n).masses[j]


@dataclass
class EigenCertificate:
    q: QParam
    K: int
    f: GridFunction
    eigenvalue: Scalar
    residual: Scalar
    min_f: Scalar
    min_ratio: Scalar  # min over k of a_k / q^k

    @property
    def a(self) -> list:
        return self.f.values

    @property
    def certified(self) -> bool:
        zero = self.q.scalar(0)
        return self.min_f > zero and self.min_ratio >= 1 and self.eigenvalue < 1 and (
            self.residual == zero if self.q.is_exact else self.residual <= self.q.tol
        )


def eigen_sequence(q: QParam, K: int, residual: bool = True) -> EigenCertificate:
    """Build the positive eigenvector ``f(q^{2k}) = a_k``, ``f(0) = 0``.

    ``a_0 = 1`` and ``2(1 - q^{2k+1}) a_k = q^-1 (1 - q^{2k+2}) a_{k+1}
    + q (1 - q^{2k}) a_{k-1}``, solved forwards.  The residual of
    ``A f = (2/[2]_q) f`` is taken over k = 0..K-1; at k = K the operator
    reads f(0) instead of a_{K+1}.
    """
    if K < 1:
        raise DomainError("K must be >= 1")
    v = q.value
    one = q.scalar(1)
    a = [one]
    prev = q.scalar(0)
    pw = one  # q^(2k)
    for k in range(K):
        cur = a[-1]
        rhs = 2 * (1 - pw * v) * cur - v * (1 - pw) * prev
        nxt = v * rhs / (1 - pw * v * v)
        a.append(nxt)
        prev = cur
        pw *= v * v
    f = GridFunction(a, q.scalar(0))
    lam = 2 / q_int(2, q)
    res = q.scalar(0)
    if residual:
        grid = Grid(q, K)
        Af = apply_A_half(f, grid)
        res = max(abs(Af.values[k] - lam * a[k]) for k in range(K))
    ratios = []
    qk = one
    for ak in a:
        ratios.append(ak / qk)
        qk *= v
    return EigenCertificate(q, K, f, lam, res, min(a), min(ratios))


def positivity_rewrite_check(cert: EigenCertificate) -> bool:
    """Verify ``q^-1 (1 - q^{2k+2})(a_{k+1} - q a_k) = (1 - q^{2k})(a_k - q a_{k-1})
    + q^{2k} (1 - q)^2 a_k`` for k < K and ``a_{k+1} - q a_k >= 0``."""
    q = cert.q
    v = q.value
    a = cert.a
    zero = q.scalar(0)
    pw = q.scalar(1)
    sq = (1 - v) ** 2
    diff_prev = a[0]  # a_0 - q a_{-1}
    for k in range(cert.K):
        diff = a[k + 1] - v * a[k]
        # both sides multiplied by q
        lhs = (1 - pw * v * v) * diff
        rhs = v * ((1 - pw) * diff_prev + pw * sq * a[k])
        if not q.close(lhs, rhs) or diff < zero:
            return False
        diff_prev = diff
        pw *= v * v
    return True


def gen_fun(z: Scalar, q: QParam, terms: int) -> Scalar:
    """``g(z) = prod_{j < terms} ((1 - q^{2j+2} z) / (1 - q^{2j+1} z))^2``."""
    if terms < 1:
        raise DomainError("terms must be >= 1")
    v = q.value
    z = q.scalar(z)
    out = q.scalar(1)
    p = v  # q^(2j+1)
    for _ in range(terms):
        den = 1 - p * z
        if abs(float(den)) < POLE_MARGIN:
            raise DomainError(f"z={z} is within {POLE_MARGIN} of a pole")
        out *= ((1 - p * v * z) / den) ** 2
        p *= v * v
    return out


def gen_fun_series(q: QParam, order: int, terms: int) -> list:
    """Taylor coefficients 0..order of the truncated product ``gen_fun``."""
    v = q.value
    zero, one = q.scalar(0), q.scalar(1)
    coeffs = [one] + [zero] * order
    p = v
    for _ in range(terms):
        # multiply by (1 - q^{2j+2} z)^2 and divide by (1 - q^{2j+1} z)^2
        for _ in range(2):
            b = p * v
            coeffs = [c - (b * coeffs[i - 1] if i else zero) for i, c in enumerate(coeffs)]
            out = []
            for i, c in enumerate(coeffs):
                out.append(c + (p * out[i - 1] if i else zero))
            coeffs = out
        p *= v * v
    return coeffs


def chebyshev_p(two_s: int, q: QParam) -> list:
    """Coefficients (lowest degree first) of the polynomial p_{2s}.

    ``p_{2s}(omega_{1/2}) = omega_s`` in the convolution algebra; with
    j = 2s the fusion rule gives
    ``p_{j+1} = ([j+1][2] x p_j - [j] p_{j-1}) / [j+2]``.
    """
    if two_s < 0:
        raise DomainError("two_s must be >= 0")
    zero, one = q.scalar(0), q.scalar(1)
    polys = [[one], [zero, one]]
    if two_s < 2:
        return polys[two_s]
    two = q_int(2, q)
    for j in range(1, two_s):
        pj, pm = polys[-1], polys[-2]
        c = q_int(j + 1, q) * two
        nxt = [zero] + [c * a for a in pj]
        dj = q_int(j, q)
        for i, a in enumerate(pm):
            nxt[i] -= dj * a
        d = q_int(j + 2, q)
        polys.append([a / d for a in nxt])
    return polys[-1]


def poly_eval(coeffs: Sequence, x):
    acc = coeffs[-1] * 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _twice_spin_key(key) -> int:
    if isinstance(key, int):
        return key
    if getattr(key, "rank", None) == 2:
        return key.size
    raise DomainError(f"{key!r} is not an SU(2) spin")


def levy_eigenvalue(levy: Mapping, q: QParam) -> Scalar:
    """``sum_s lambda_s (2s+1) / [2s+1]_q``.

    *levy* maps twice-spins (or SU(2) weights) to masses, or is a
    ``LevyMeasure`` of rank 2.
    """
    entries = getattr(levy, "entries", levy)
    total = q.scalar(0)
    mass = q.scalar(0)
    for key, m in entries.items():
        j = _twice_spin_key(key)
        m = q.scalar(m)
        mass += m
        total += m * (j + 1) / q_int(j + 1, q)
    if not q.close(mass, q.scalar(1)):
        raise DomainError(f"masses sum to {mass}, not 1")
    return total


def apply_A_levy(h: GridFunction, grid: Grid, levy: Mapping) -> GridFunction:
    """Apply ``A_omega`` for ``omega = sum lambda_s omega_s`` as
    ``sum_s lambda_s p_{2s}(A_{1/2})``."""
    q = grid.q
    entries = getattr(levy, "entries", levy)
    spins = {_twice_spin_key(k): q.scalar(m) for k, m in entries.items()}
    top = max(spins)
    powers = [h]
    for _ in range(top):
        powers.append(apply_A_half(powers[-1], grid))
    zero = q.scalar(0)
    out = [zero] * (grid.K + 1)
    out0 = zero
    for j, m in spins.items():
        for deg, c in enumerate(chebyshev_p(j, q)):
            if c == 0:
                continue
            w = m * c
            out = [o + w * x for o, x in zip(out, powers[deg].values)]
            out0 += w * powers[deg].at_zero
    return GridFunction(out, out0)


def transience_bound(cert: EigenCertificate, i1: int, i2: int, n: int, eigenvalue=None) -> Scalar:
    """Upper bound ``f(t1) f(t2)^-1 lambda^n`` on the n-step probability t1 -> t2."""
    if not (0 <= i1 <= cert.K and 0 <= i2 <= cert.K):
        raise DomainError("grid index out of range")
    lam = cert.eigenvalue if eigenvalue is None else eigenvalue
    return cert.a[i1] / cert.a[i2] * lam ** n


def asymptotic_ratios(cert: EigenCertificate, C) -> list[tuple[int, float]]:
    """``a_k / (k q^k C)`` for k = 1..K (float)."""
    v = float(cert.q.value)
    c = float(C)
    out = []
    for k in range(1, cert.K + 1):
        out.append((k, float(cert.a[k]) / (k * math.pow(v, k) * c)))
    return out
