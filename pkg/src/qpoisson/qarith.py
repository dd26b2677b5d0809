"""q-integers, quantum dimensions and truncated q-Pochhammer products.

Two evaluation modes are supported.  In exact mode the deformation
parameter is a rational number and every derived scalar is a
``gmpy2.mpq``; in float mode everything is a Python float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence, Union

from gmpy2 import mpq

Scalar = Union[mpq, float]

DEFAULT_TOL = 1e-10


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


def _to_mpq(value) -> mpq:
    if isinstance(value, float):
        raise DomainError("exact mode needs a rational q, got a float")
    if isinstance(value, str):
        value = Fraction(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


@dataclass(frozen=True)
class QParam:
    """The deformation parameter ``0 < q < 1`` together with its mode.

    >>> QParam.parse("1/2").value
    mpq(1,2)
    >>> QParam.parse("0.5").mode
    'float'
    """

    value: Scalar
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if isinstance(self.value, float):
            v = self.value
        else:
            v = _to_mpq(self.value)
            object.__setattr__(self, "value", v)
        if not 0 < v < 1:
            raise DomainError(f"q must lie in (0, 1), got {v}")

    @classmethod
    def exact(cls, num, den=1) -> "QParam":
        return cls(mpq(num, den))

    @classmethod
    def parse(cls, text: str, mode: str | None = None, tol: float = DEFAULT_TOL) -> "QParam":
        """Parse ``"p/r"`` (exact) or a decimal (float).

        An explicit *mode* overrides the inference from the text.
        """
        text = str(text).strip()
        if mode is None:
            mode = "exact" if "/" in text else "float"
        if mode == "exact":
            try:
                return cls(_to_mpq(Fraction(text)), tol)
            except (ValueError, ZeroDivisionError) as exc:
                raise DomainError(f"cannot parse q={text!r}") from exc
        if mode == "float":
            try:
                return cls(float(Fraction(text)), tol)
            except (ValueError, ZeroDivisionError) as exc:
                raise DomainError(f"cannot parse q={text!r}") from exc
        raise DomainError(f"unknown mode {mode!r}")

    @property
    def is_exact(self) -> bool:
        return not isinstance(self.value, float)

    @property
    def mode(self) -> str:
        return "exact" if self.is_exact else "float"

    def scalar(self, x) -> Scalar:
        """Coerce *x* into this parameter's scalar type."""
        if self.is_exact:
            return _to_mpq(x)
        return float(x)

    def pow(self, k: int) -> Scalar:
        return self.value ** k

    def close(self, a, b, tol: float | None = None) -> bool:
        if self.is_exact:
            return a == b
        tol = self.tol if tol is None else tol
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b))

    def __str__(self) -> str:
        return str(self.value)


def q_int(n: int, q: QParam) -> Scalar:
    """The q-integer ``[n]_q = (q^n - q^-n) / (q - q^-1)``.

    Evaluated as the symmetric sum ``q^(n-1) + q^(n-3) + ... + q^(1-n)``,
    which agrees with the quotient exactly and stays accurate near q = 1.
    """
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"q_int needs a positive integer, got {n!r}")
    v = q.value
    return sum((v ** (n - 1 - 2 * j) for j in range(n)), q.scalar(0))


def _padded(lam, n: int) -> list[int]:
    rows = list(lam)
    if len(rows) > n:
        raise DomainError(f"{rows} has more than {n} rows")
    return rows + [0] * (n - len(rows))


def _check_reduced(rows: Sequence[int], n: int) -> None:
    if any(a < b for a, b in zip(rows, rows[1:])) or (rows and rows[-1] < 0):
        raise DomainError(f"{list(rows)} is not a partition")
    if len([r for r in rows if r]) >= n:
        raise DomainError(f"{list(rows)} is not reduced for SU({n})")


def qdim_sun(lam, n: int, q: QParam) -> Scalar:
    """Quantum dimension of the SU_q(n) irreducible with highest weight *lam*.

    *lam* is a reduced partition (any iterable of rows, including a
    ``DominantWeight``).  Uses the q-analogue of the Weyl dimension formula
    ``prod_{i<j} [lam_i - lam_j + j - i]_q / [j - i]_q``.
    """
    rows = list(lam)
    _check_reduced(rows, n)
    lv = _padded(rows, n)
    num = q.scalar(1)
    den = q.scalar(1)
    for i in range(n):
        for j in range(i + 1, n):
            num *= q_int(lv[i] - lv[j] + j - i, q)
            den *= q_int(j - i, q)
    return num / den


def q_pochhammer_trunc(a: Scalar, step: Scalar, terms: int) -> Scalar:
    """``prod_{k=0}^{terms-1} (1 - a * step^k)``."""
    if terms < 1:
        raise DomainError("terms must be >= 1")
    if not (abs(a) < 1 and abs(step) < 1):
        raise DomainError("q-Pochhammer needs |a| < 1 and |step| < 1")
    out = a * 0 + 1
    power = step * 0 + 1
    for _ in range(terms):
        out *= 1 - a * power
        power *= step
    return out


class Truncated(NamedTuple):
    """A truncated infinite product and the number of factors used."""

    value: Scalar
    terms: int

    def __float__(self) -> float:
        return float(self.value)


def asym_const(q: QParam, terms: int) -> Truncated:
    """``(q; q^2)_inf^2 / (q^2; q^2)_inf^2`` truncated to *terms* factors.

    This is the constant C(q) in ``a_k ~ k q^k C(q)`` for the positive
    eigenvector of the SU_q(2) double-coset walk.
    """
    if terms < 1:
        raise DomainError("terms must be >= 1")
    v = q.value
    v2 = v * v
    num = q_pochhammer_trunc(v, v2, terms)
    den = q_pochhammer_trunc(v2, v2, terms)
    return Truncated((num / den) ** 2, terms)


def classical_limit_q(eps: float = 1e-6) -> QParam:
    """A float-mode q just below 1, for classical-limit checks."""
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    return QParam(1.0 - eps, tol=max(DEFAULT_TOL, 10 * eps))
