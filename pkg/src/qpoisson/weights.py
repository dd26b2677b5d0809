"""The fusion ring of SU(n): dominant weights, Littlewood-Richardson
products, weight multiplicities and zero-weight dimensions.

Irreducibles of SU(n) are stored as reduced partitions (fewer than n
nonzero rows).  For SU(2) the single row is twice the spin.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from .qarith import DomainError, QParam, Scalar, qdim_sun

DEFAULT_BALL = 4


@dataclass(frozen=True, order=True)
class DominantWeight:
    """A reduced partition labelling an irreducible of SU(rank)."""

    rank: int
    rows: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 2:
            raise DomainError(f"rank must be >= 2, got {self.rank}")
        rows = tuple(int(r) for r in self.rows)
        while rows and rows[-1] == 0:
            rows = rows[:-1]
        if any(a < b for a, b in zip(rows, rows[1:])) or (rows and rows[-1] < 0):
            raise DomainError(f"{rows} is not a partition")
        if len(rows) >= self.rank:
            raise DomainError(f"{rows} is not reduced for SU({self.rank})")
        object.__setattr__(self, "rows", rows)

    def __iter__(self) -> Iterator[int]:
        return iter(self.rows)

    @property
    def size(self) -> int:
        return sum(self.rows)

    @property
    def is_trivial(self) -> bool:
        return not self.rows

    def padded(self) -> tuple[int, ...]:
        return self.rows + (0,) * (self.rank - len(self.rows))

    def encode(self) -> str:
        return ",".join(map(str, self.rows)) if self.rows else "0"

    def __str__(self) -> str:
        return self.encode()


def parse_weight(text: str, n: int) -> DominantWeight:
    """Parse the comma-joined encoding (``"2,1"``; ``"0"`` or ``""`` is trivial)."""
    text = text.strip()
    if text in ("", "0"):
        return trivial(n)
    try:
        rows = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise DomainError(f"bad weight {text!r}") from exc
    return reduce(rows, n)


def trivial(n: int) -> DominantWeight:
    return DominantWeight(n, ())


def fundamental(n: int) -> DominantWeight:
    return DominantWeight(n, (1,))


def spin(twice_spin: int) -> DominantWeight:
    """SU(2) irreducible of spin ``twice_spin / 2``."""
    if twice_spin < 0:
        raise DomainError("twice_spin must be non-negative")
    return DominantWeight(2, (twice_spin,))


def twice_spin(w: DominantWeight) -> int:
    if w.rank != 2:
        raise DomainError("twice_spin is only defined for SU(2)")
    return w.size


def reduce(partition: Sequence[int], n: int) -> DominantWeight:
    """Strip full columns of height *n* from a partition with at most n rows."""
    rows = [int(r) for r in partition]
    if any(a < b for a, b in zip(rows, rows[1:])) or any(r < 0 for r in rows):
        raise DomainError(f"{rows} is not a non-increasing non-negative sequence")
    while rows and rows[-1] == 0:
        rows.pop()
    if len(rows) > n:
        raise DomainError(f"{rows} has more than {n} rows")
    if len(rows) == n:
        m = rows[-1]
        rows = [r - m for r in rows]
    return DominantWeight(n, tuple(rows))


def conjugate(lam: DominantWeight) -> DominantWeight:
    """The dual representation: ``bar(lam)_i = lam_1 - lam_{n+1-i}``."""
    v = lam.padded()
    return reduce([v[0] - v[lam.rank - 1 - i] for i in range(lam.rank)], lam.rank)


def classical_dim(lam: DominantWeight) -> int:
    """Weyl dimension formula (integer arithmetic)."""
    v = lam.padded()
    n = lam.rank
    num = den = 1
    for i in range(n):
        for j in range(i + 1, n):
            num *= v[i] - v[j] + j - i
            den *= j - i
    return num // den


def qdim(lam: DominantWeight, q: QParam) -> Scalar:
    return qdim_sun(lam, lam.rank, q)


@dataclass(frozen=True)
class FusionResult(Mapping):
    """Decomposition of a tensor product: weight -> multiplicity (absent = 0)."""

    entries: dict = field(default_factory=dict)

    def __getitem__(self, key: DominantWeight) -> int:
        return self.entries.get(key, 0)

    def __iter__(self):
        return iter(sorted(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key) -> bool:
        return key in self.entries

    def dim_sum(self) -> int:
        return sum(m * classical_dim(nu) for nu, m in self.entries.items())

    def qdim_sum(self, q: QParam) -> Scalar:
        return sum((m * qdim(nu, q) for nu, m in self.entries.items()), q.scalar(0))


def _row_fillings(mu, counts, r, lam_r, prev_start, prev_entries, max_len):
    """Yield (entries, new_counts) for row r of an LR tableau.

    Entries are weakly increasing letters 0..len(mu)-1; the reading word
    (right to left, top to bottom) must stay a lattice word and columns
    must strictly increase.
    """
    L = len(mu)

    def rec(j, cur):
        if j == L:
            entries = [letter for letter, c in enumerate(cur) for _ in range(c)]
            if len(entries) > max_len:
                return
            for pos, e in enumerate(entries):
                col = lam_r + pos
                if prev_entries is not None and col >= prev_start:
                    above = col - prev_start
                    if above < len(prev_entries) and e <= prev_entries[above]:
                        return
            new = tuple(a + b for a, b in zip(counts, cur))
            yield entries, new
            return
        hi = mu[j] - counts[j]
        if j > 0:
            # the j's of this row are read before its (j-1)'s
            hi = min(hi, counts[j - 1] - counts[j])
        # letter j first appears in row j at the earliest
        if j > r:
            hi = 0
        for c in range(hi + 1):
            yield from rec(j + 1, cur + [c])

    yield from rec(0, [])


def _lr_gl(lam: tuple[int, ...], mu: tuple[int, ...], n: int) -> dict[tuple[int, ...], int]:
    """GL(n) Littlewood-Richardson coefficients c^nu_{lam,mu} with len(nu) <= n."""
    lam = tuple(lam) + (0,) * (n - len(lam))
    out: dict[tuple[int, ...], int] = {}
    if not mu:
        return {tuple(lam): 1}
    total = sum(mu)

    def rec(r, nu, counts, prev_entries):
        placed = sum(counts)
        if placed == total:
            full = tuple(nu) + lam[len(nu):]
            if all(a >= b for a, b in zip(full, full[1:])):
                out[full] = out.get(full, 0) + 1
            return
        if r == n:
            return
        max_len = total - placed
        if r > 0:
            max_len = min(max_len, nu[r - 1] - lam[r])
        if max_len < 0:
            return
        prev_start = lam[r - 1] if r > 0 else 0
        for entries, new_counts in _row_fillings(
            mu, counts, r, lam[r], prev_start,
            prev_entries if r > 0 else None, max_len,
        ):
            rec(r + 1, nu + [lam[r] + len(entries)], new_counts, entries)

    rec(0, [], tuple(0 for _ in mu), None)
    return out


@lru_cache(maxsize=None)
def _lr_cached(lam: DominantWeight, mu: DominantWeight) -> FusionResult:
    n = lam.rank
    table: dict[DominantWeight, int] = {}
    for nu, c in _lr_gl(lam.rows, mu.rows, n).items():
        w = reduce(nu, n)
        table[w] = table.get(w, 0) + c
    return FusionResult(table)


def lr_coeffs(lam: DominantWeight, mu: DominantWeight) -> FusionResult:
    """Decompose ``V_lam (x) V_mu`` by counting Littlewood-Richardson tableaux."""
    if lam.rank != mu.rank:
        raise DomainError(f"rank mismatch: SU({lam.rank}) vs SU({mu.rank})")
    # enumerating with the smaller partition as content is cheaper
    if (mu.size, mu.rows) > (lam.size, lam.rows):
        lam, mu = mu, lam
    return _lr_cached(lam, mu)


@lru_cache(maxsize=None)
def _kostka(shape: tuple[int, ...], content: tuple[int, ...]) -> int:
    if not content:
        return 1 if not shape else 0
    c = content[-1]
    rest = content[:-1]
    if sum(shape) != sum(content):
        return 0
    # remove a horizontal strip of size c holding the largest letter
    shape_l = list(shape)
    lows = [shape_l[i + 1] if i + 1 < len(shape_l) else 0 for i in range(len(shape_l))]
    total = 0

    def rec(i, left, inner):
        nonlocal total
        if i == len(shape_l):
            if left == 0:
                total += _kostka(tuple(x for x in inner if x), rest)
            return
        top = min(shape_l[i] - lows[i], left)
        for k in range(top + 1):
            rec(i + 1, left - k, inner + [shape_l[i] - k])

    rec(0, c, [])
    return total


def weight_multiplicity(lam: DominantWeight, target: Sequence[int]) -> int:
    """Dimension of the *target* weight space of ``V_lam``.

    *target* is a length-n content vector; SU(n) weights differing by a
    multiple of ``(1, ..., 1)`` are identified, so the vector is shifted
    to total ``|lam|`` first.  The answer is the number of semistandard
    tableaux of shape lam with that content.
    """
    n = lam.rank
    t = [int(x) for x in target]
    if len(t) != n:
        raise DomainError(f"target must have {n} components")
    diff = lam.size - sum(t)
    if diff % n:
        return 0
    t = [x + diff // n for x in t]
    if min(t) < 0:
        return 0
    content = tuple(sorted((x for x in t if x), reverse=True))
    return _kostka(lam.rows, content)


def zero_weight_dim(lam: DominantWeight) -> int:
    """m_0(lam): dimension of the zero weight space."""
    n = lam.rank
    if lam.size % n:
        return 0
    return weight_multiplicity(lam, [lam.size // n] * n)


def mult_in_self_tensor(U: DominantWeight, V: DominantWeight) -> int:
    """Multiplicity of U in ``U (x) V``."""
    return lr_coeffs(U, V)[U]


def equality_criterion(U: DominantWeight, V: DominantWeight) -> bool:
    """True when ``U + wV`` is dominant for every permutation w of V's entries.

    This is sufficient for ``N^U_{U,V} = m_0(V)``.
    """
    if U.rank != V.rank:
        raise DomainError("rank mismatch")
    u = U.padded()
    for perm in set(itertools.permutations(V.padded())):
        s = [a + b for a, b in zip(u, perm)]
        if any(a < b for a, b in zip(s, s[1:])):
            return False
    return True


def partitions_upto(size: int, max_parts: int) -> Iterator[tuple[int, ...]]:
    def rec(left, cap, parts):
        yield tuple(parts)
        if len(parts) == max_parts:
            return
        for k in range(min(left, cap), 0, -1):
            yield from rec(left - k, k, parts + [k])

    yield from rec(size, size, [])


def weights_in_ball(n: int, radius: int) -> list[DominantWeight]:
    """All reduced weights of SU(n) with ``|lam| <= radius``, sorted by size."""
    out = [DominantWeight(n, p) for p in partitions_upto(radius, n - 1)]
    return sorted(out, key=lambda w: (w.size, tuple(-r for r in w.rows)))


def fusion_table(weights: Iterable[DominantWeight]) -> list[tuple[DominantWeight, DominantWeight, DominantWeight, int]]:
    """Rows (lambda, mu, nu, mult) for every ordered pair of *weights*."""
    ws = list(weights)
    rows = []
    for lam in ws:
        for mu in ws:
            for nu, m in lr_coeffs(lam, mu).items():
                rows.append((lam, mu, nu, m))
    return rows


def check_sum_rules(lam: DominantWeight, mu: DominantWeight, q: QParam) -> bool:
    fr = lr_coeffs(lam, mu)
    if fr.dim_sum() != classical_dim(lam) * classical_dim(mu):
        return False
    return q.close(fr.qdim_sum(q), qdim(lam, q) * qdim(mu, q))
