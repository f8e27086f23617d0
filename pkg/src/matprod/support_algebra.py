"""Support patterns of nonnegative matrices and their canonical column partitions.

The support of a matrix is ``I(A) = {(i,j) : A(i,j) != 0}``; the column
support of column j is ``I(A U_j)``.  For nonnegative factors supports
compose like boolean matrices:

    I(A B U_j) = union over i in I(B U_j) of I(A U_i)

so support dynamics of long products can be tracked with bitmask algebra
alone.  All public indices are 0-based.

``H(A)`` counts distinct column supports; ``H*(A)`` additionally drops the
null support when some column is null.  Grouping columns by support and
ordering the groups by their row-indicator vectors, lexicographically
descending (the empty support, all-zero indicator, sorts last), yields the
canonical partition ``(I_h, J_h)``: unique, with ``I_h`` never contained in a
later ``I_l`` (h < l), and stable under left multiplication in the sense that
``H(AB) = H(B)`` iff the column classes ``J_h`` agree.

The block permutation sends positions ``c_{h-1}..c_h - 1`` (cumulative class
sizes) increasingly onto ``J_h``; conjugating by it groups each class into a
consecutive column block, preserving H.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core_linalg import Mat, identity

__all__ = [
    "SupportPattern",
    "ColumnPartition",
    "PermSpec",
    "FLOAT_SUPPORT_RTOL",
    "column_support",
    "pattern_of",
    "bool_mul",
    "partition",
    "satisfies_E",
    "sigma_permutation",
    "conjugate",
    "kappa_estimate",
    "KappaEstimate",
]

# float-backend entries count as nonzero when they exceed this relative
# threshold times the column L1 norm (absolute cancellation noise floor)
FLOAT_SUPPORT_RTOL = 1e-13


def _col_mask(col: Sequence, backend: str, d: int) -> int:
    if backend == "exact":
        mask = 0
        for i, x in enumerate(col):
            if x != 0:
                mask |= 1 << i
        return mask
    norm = sum(abs(x) for x in col)
    thr = d * FLOAT_SUPPORT_RTOL * norm
    mask = 0
    for i, x in enumerate(col):
        if abs(x) > thr:
            mask |= 1 << i
    return mask


@dataclass(frozen=True)
class SupportPattern:
    """Boolean support of a d x d matrix, stored as one row-bitmask per column."""

    d: int
    cols: tuple[int, ...]  # cols[j] has bit i set iff (i, j) in the support

    @staticmethod
    def from_mat(m: Mat) -> "SupportPattern":
        d = m.d
        return SupportPattern(d, tuple(_col_mask(m.column(j), m.backend, d) for j in range(d)))

    @staticmethod
    def from_sets(d: int, col_sets: Iterable[Iterable[int]]) -> "SupportPattern":
        cols = []
        for s in col_sets:
            mask = 0
            for i in s:
                mask |= 1 << i
            cols.append(mask)
        if len(cols) != d:
            raise ValueError("need one column set per column")
        return SupportPattern(d, tuple(cols))

    def column_set(self, j: int) -> frozenset[int]:
        return frozenset(i for i in range(self.d) if self.cols[j] >> i & 1)

    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((i, j) for j in range(self.d) for i in range(self.d) if self.cols[j] >> i & 1)

    def mul(self, other: "SupportPattern") -> "SupportPattern":
        """Support of the product: self's pattern composed with other's (self @ other)."""
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        out = []
        for j in range(other.d):
            m = other.cols[j]
            acc = 0
            while m:
                i = (m & -m).bit_length() - 1
                acc |= self.cols[i]
                m &= m - 1
            out.append(acc)
        return SupportPattern(self.d, tuple(out))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.cols)

    def H(self) -> int:
        return len(set(self.cols))

    def H_star(self) -> int:
        distinct = set(self.cols)
        return len(distinct) - 1 if 0 in distinct and len(distinct) > 1 else (0 if distinct == {0} else len(distinct))


def column_support(m: Mat, j: int) -> frozenset[int]:
    """Row indices where column j is nonzero (0-based)."""
    return SupportPattern.from_mat(m).column_set(j)


def pattern_of(m: Mat) -> SupportPattern:
    return SupportPattern.from_mat(m)


def bool_mul(p: SupportPattern, q: SupportPattern) -> SupportPattern:
    return p.mul(q)


# ---------------------------------------------------------------------------
# canonical partition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColumnPartition:
    """Canonical column-support partition of a matrix.

    ``I_h[h]`` is the common row support of class h, ``J_h[h]`` its columns,
    classes ordered by indicator-lex descending row supports (null support
    last).  ``c[h]`` are the cumulative class sizes, ``c[0] = 0``.
    ``H``/``H_star`` count classes with/without the null class.
    """

    d: int
    I_h: tuple[frozenset[int], ...]
    J_h: tuple[frozenset[int], ...]
    c: tuple[int, ...]

    @property
    def H(self) -> int:
        return len(self.I_h)

    @property
    def H_star(self) -> int:
        if self.H and not self.I_h[-1]:
            return self.H - 1
        return self.H

    def class_of_column(self, j: int) -> int:
        for h, cols in enumerate(self.J_h):
            if j in cols:
                return h
        raise KeyError(j)


def _indicator_key(mask: int, d: int) -> int:
    # lexicographic on (row 0, row 1, ...) == integer with row 0 as MSB
    key = 0
    for i in range(d):
        key = (key << 1) | (mask >> i & 1)
    return key


def partition(m: Mat | SupportPattern) -> ColumnPartition:
    p = m if isinstance(m, SupportPattern) else SupportPattern.from_mat(m)
    d = p.d
    groups: dict[int, list[int]] = {}
    for j in range(d):
        groups.setdefault(p.cols[j], []).append(j)
    order = sorted(groups, key=lambda mask: -_indicator_key(mask, d))
    I_h = []
    J_h = []
    c = [0]
    for mask in order:
        I_h.append(frozenset(i for i in range(d) if mask >> i & 1))
        J_h.append(frozenset(groups[mask]))
        c.append(c[-1] + len(groups[mask]))
    return ColumnPartition(d, tuple(I_h), tuple(J_h), tuple(c))


def satisfies_E(m: Mat | SupportPattern) -> bool:
    """True iff all column supports are pairwise nested (one contains the other)."""
    p = m if isinstance(m, SupportPattern) else SupportPattern.from_mat(m)
    distinct = sorted(set(p.cols))
    for a_i in range(len(distinct)):
        for b_i in range(a_i + 1, len(distinct)):
            a, b = distinct[a_i], distinct[b_i]
            if (a & b) != a and (a & b) != b:
                return False
    return True


# ---------------------------------------------------------------------------
# block permutation and conjugation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PermSpec:
    """A permutation sigma of 0..d-1; the matrix S acts by S U_j = U_{sigma(j)}."""

    sigma: tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.sigma)

    def matrix(self, backend: str = "exact") -> Mat:
        d = self.d
        m = [[0] * d for _ in range(d)]
        for j, i in enumerate(self.sigma):
            m[i][j] = 1
        return Mat.build(m, backend)

    def inverse(self) -> "PermSpec":
        inv = [0] * self.d
        for j, i in enumerate(self.sigma):
            inv[i] = j
        return PermSpec(tuple(inv))


def sigma_permutation(part: ColumnPartition) -> PermSpec:
    """Block permutation: positions c_{h-1}..c_h-1 map increasingly onto J_h."""
    sigma = []
    for cols in part.J_h:
        sigma.extend(sorted(cols))
    return PermSpec(tuple(sigma))


def conjugate(m: Mat, s: PermSpec) -> Mat:
    """S^{-1} M S, computed by index relabeling: entry (i,j) of the result is
    M(sigma(i), sigma(j)).  Preserves H and the partition up to relabeling."""
    if m.d != s.d:
        raise ValueError("dimension mismatch")
    sig = s.sigma
    return Mat(
        tuple(tuple(m.rows[sig[i]][sig[j]] for j in range(m.d)) for i in range(m.d)),
        m.backend,
    )


# ---------------------------------------------------------------------------
# window estimate of kappa
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KappaEstimate:
    """Windowed estimate of kappa = max_m limsup_n H(P_{m,n}).

    ``value`` is the max over starts m of the tail value of H(P_{m,n}) on the
    last quarter of the window; ``stabilized`` is False when any H series
    still changes there (the value is then only a lower bound).
    """

    value: int
    stabilized: bool
    per_start: tuple[tuple[int, int, bool], ...]  # (m, tail value, tail constant)


def kappa_estimate(seq, n_max: int, m_max: int | None = None) -> KappaEstimate:
    """Estimate kappa from factors ``seq(1) .. seq(n_max)`` (1-based callable or list).

    Errors: a horizon too small to stabilize is reported via the flag, with
    ``value`` a lower bound, not an exception.
    """
    factor = _as_factor(seq)
    if m_max is None:
        m_max = n_max // 2
    pats = [pattern_of(factor(n)) for n in range(1, n_max + 1)]
    per_start = []
    best = 0
    all_stable = True
    for m in range(0, m_max + 1):
        if m >= n_max:
            break
        series = []
        p = pats[m]
        series.append(p.H())
        for n in range(m + 2, n_max + 1):
            p = p.mul(pats[n - 1])
            series.append(p.H())
        tail_len = max(1, len(series) // 4)
        tail = series[-tail_len:]
        value = max(tail)
        stable = all(x == tail[0] for x in tail)
        per_start.append((m, value, stable))
        all_stable = all_stable and stable
        best = max(best, value)
    return KappaEstimate(best, all_stable, tuple(per_start))


def _as_factor(seq):
    """Normalize a factor source to a 1-based callable n -> Mat."""
    if callable(seq):
        return seq
    factors = list(seq)
    def factor(n: int) -> Mat:
        return factors[n - 1]
    return factor


def periodic(word: Sequence[Mat]):
    """1-based periodic factor source cycling through ``word``."""
    word = list(word)
    def factor(n: int) -> Mat:
        return word[(n - 1) % len(word)]
    return factor


def constant(m: Mat):
    def factor(n: int) -> Mat:
        return m
    return factor


def identity_pattern(d: int) -> SupportPattern:
    return SupportPattern.from_mat(identity(d))
