"""Small dense matrices with exact-rational and float backends.

Everything downstream works with square d x d matrices (d <= 32) under the
entrywise L1 norm ``||M|| = sum_ij |M(i,j)|``.  Two backends share one type:

* ``exact``  -- entries are ``fractions.Fraction`` (ints are coerced); all
  arithmetic is exact.
* ``float``  -- entries are ``float`` (or ``complex``, used only by the random
  ensembles in :mod:`matprod.experiments`).

Long products are handled by :class:`ScaledProduct`, which renormalizes to
unit L1 norm after every multiply and accumulates the log of the total scale,
so products of thousands of factors neither overflow nor underflow.  A product
that hits exact zero is recorded with the sentinel ``log_scale = -inf`` rather
than raising.

The singular-value routine is a one-sided Jacobi iteration on the columns
(equivalently the symmetric eigenproblem of M^T M) with a fixed sweep
ordering, so results are bit-reproducible across runs; complex input is
handled by a phase pre-rotation that makes each 2x2 Gram off-diagonal real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[int, float, complex, Fraction]

__all__ = [
    "Mat",
    "ScaledProduct",
    "SingularSpectrum",
    "identity",
    "zero",
    "norm_l1",
    "vec_norm_l1",
    "scaled_multiply",
    "scaled_identity",
    "normalize_columns",
    "svd_small",
    "rank1_gap",
    "rank1_approx",
]

MAX_DIM = 32


def _coerce_exact(x: Scalar) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12) if x != int(x) else Fraction(int(x))
    raise TypeError(f"cannot coerce {x!r} to an exact rational")


@dataclass(frozen=True)
class Mat:
    """Immutable square matrix. ``rows[i][j]`` is the entry in row i, column j (0-based)."""

    rows: tuple
    backend: str  # "exact" | "float"

    # -- constructors ------------------------------------------------------

    @staticmethod
    def exact(rows: Iterable[Iterable[Scalar]]) -> "Mat":
        out = tuple(tuple(_coerce_exact(x) for x in row) for row in rows)
        _check_square(out)
        return Mat(out, "exact")

    @staticmethod
    def from_floats(rows: Iterable[Iterable[Scalar]]) -> "Mat":
        out = tuple(
            tuple(complex(x) if isinstance(x, complex) else float(x) for x in row)
            for row in rows
        )
        _check_square(out)
        return Mat(out, "float")

    @staticmethod
    def build(rows: Iterable[Iterable[Scalar]], backend: str = "exact") -> "Mat":
        return Mat.exact(rows) if backend == "exact" else Mat.from_floats(rows)

    # -- basic structure ---------------------------------------------------

    @property
    def d(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> Scalar:
        return self.rows[i][j]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.rows)

    def transpose(self) -> "Mat":
        d = self.d
        return Mat(tuple(tuple(self.rows[i][j] for i in range(d)) for j in range(d)), self.backend)

    def to_float(self) -> "Mat":
        if self.backend == "float":
            return self
        return Mat(tuple(tuple(float(x) for x in row) for row in self.rows), "float")

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def is_nonnegative(self) -> bool:
        return all(not isinstance(x, complex) and x >= 0 for row in self.rows for x in row)

    def is_positive(self) -> bool:
        return all(not isinstance(x, complex) and x > 0 for row in self.rows for x in row)

    # -- arithmetic --------------------------------------------------------

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        d = self.d
        ocols = [other.column(j) for j in range(d)]
        rows = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in ocols)
            for row in self.rows
        )
        backend = "exact" if self.backend == other.backend == "exact" else "float"
        if backend == "float" and self.backend == "exact":
            return Mat(rows, "float")
        return Mat(rows, backend)

    def matvec(self, v: Sequence[Scalar]) -> tuple:
        if len(v) != self.d:
            raise ValueError("dimension mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.rows)

    def scale(self, s: Scalar) -> "Mat":
        return Mat(tuple(tuple(x * s for x in row) for row in self.rows), self.backend)

    def add(self, other: "Mat") -> "Mat":
        return Mat(
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)),
            self.backend if self.backend == other.backend else "float",
        )

    def sub(self, other: "Mat") -> "Mat":
        return Mat(
            tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)),
            self.backend if self.backend == other.backend else "float",
        )


def _check_square(rows: tuple) -> None:
    d = len(rows)
    if d == 0 or d > MAX_DIM:
        raise ValueError(f"dimension must be in 1..{MAX_DIM}, got {d}")
    if any(len(r) != d for r in rows):
        raise ValueError("matrix must be square")


def identity(d: int, backend: str = "exact") -> Mat:
    one: Scalar = Fraction(1) if backend == "exact" else 1.0
    zero_: Scalar = Fraction(0) if backend == "exact" else 0.0
    return Mat(tuple(tuple(one if i == j else zero_ for j in range(d)) for i in range(d)), backend)


def zero(d: int, backend: str = "exact") -> Mat:
    z: Scalar = Fraction(0) if backend == "exact" else 0.0
    return Mat(tuple(tuple(z for _ in range(d)) for _ in range(d)), backend)


def norm_l1(m: Mat) -> Scalar:
    """Entrywise L1 norm, sum of |entries|.  Exact on the exact backend."""
    return sum(abs(x) for row in m.rows for x in row)


def vec_norm_l1(v: Sequence[Scalar]) -> Scalar:
    return sum(abs(x) for x in v)


# ---------------------------------------------------------------------------
# scaled products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledProduct:
    """A matrix product kept at unit L1 norm with its scale factored out.

    ``mat`` has L1 norm exactly 1 (exactly on the exact backend, within 1e-14
    on the float backend), or is the zero matrix if the product annihilated.
    ``log_scale`` is the accumulated natural log of the total scale
    (``-inf`` once annihilated).  On the exact backend ``scale`` additionally
    records the total scale as an exact Fraction, so
    ``scale * mat.entry(i, j)`` reconstructs the true product entry exactly.
    """

    mat: Mat
    log_scale: float
    scale: Fraction | None = None

    @property
    def annihilated(self) -> bool:
        return self.log_scale == float("-inf")

    def true_entry(self, i: int, j: int) -> Scalar:
        """Exact product entry on the exact backend; float-scaled otherwise."""
        if self.annihilated:
            return Fraction(0) if self.mat.backend == "exact" else 0.0
        if self.scale is not None:
            return self.scale * self.mat.entry(i, j)
        return math.exp(self.log_scale) * self.mat.entry(i, j)


def scaled_identity(d: int, backend: str = "exact") -> ScaledProduct:
    m = identity(d, backend)
    n = norm_l1(m)
    mat = m.scale((Fraction(1) if backend == "exact" else 1.0) / n)
    return ScaledProduct(
        mat,
        math.log(float(n)),
        Fraction(n) if backend == "exact" else None,
    )


def _log_of_positive(x: Scalar) -> float:
    """log of a positive number that may be a Fraction too large/small for float."""
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


def scaled_multiply(p: ScaledProduct, a: Mat) -> ScaledProduct:
    """Right-multiply a running product by the next factor and renormalize.

    Annihilation (exact zero product) is recorded via the ``log_scale = -inf``
    sentinel, not an exception, so long scans can report where a product died.
    """
    if p.annihilated:
        return p
    raw = p.mat @ a
    n = norm_l1(raw)
    if n == 0:
        return ScaledProduct(zero(raw.d, raw.backend), float("-inf"), None)
    if raw.backend == "exact":
        mat = raw.scale(Fraction(1, 1) / n)
        return ScaledProduct(mat, p.log_scale + _log_of_positive(n), (p.scale or Fraction(1)) * n)
    mat = raw.scale(1.0 / n)
    return ScaledProduct(mat, p.log_scale + math.log(n), None)


def scaled_product_of(factors: Iterable[Mat], backend: str | None = None) -> ScaledProduct:
    """Fold a whole factor list (renormalizing after every multiply)."""
    it = iter(factors)
    try:
        first = next(it)
    except StopIteration:
        raise ValueError("empty factor list")
    p = scaled_identity(first.d, backend or first.backend)
    p = scaled_multiply(p, first)
    for a in it:
        p = scaled_multiply(p, a)
    return p


def normalize_columns(m: Mat) -> tuple[Mat, tuple]:
    """Divide each nonnull column by its L1 norm; return (matrix, scales).

    Null columns are left null and get scale 0.
    """
    d = m.d
    scales = []
    cols = []
    for j in range(d):
        col = m.column(j)
        n = vec_norm_l1(col)
        scales.append(n)
        if n == 0:
            cols.append(col)
        else:
            cols.append(tuple(x / n for x in col))
    rows = tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))
    return Mat(rows, m.backend), tuple(scales)


# ---------------------------------------------------------------------------
# singular values: one-sided Jacobi
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularSpectrum:
    """Singular values (descending) with the orthonormal factors that realize them."""

    values: tuple[float, ...]
    left: tuple | None = None   # columns u_k (only where sigma_k > 0)
    right: tuple | None = None  # columns v_k


_JACOBI_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 60


def svd_small(m: Mat) -> SingularSpectrum:
    """Singular values of a small matrix by one-sided Jacobi with fixed sweep order.

    Works on the float image of the input; complex entries are supported via a
    phase rotation that makes each 2x2 column Gram real before the plane
    rotation.  Deterministic: sweep order is lexicographic (p < q), stopping
    when every off-diagonal Gram entry is negligible.
    """
    mf = m.to_float()
    d = mf.d
    # columns of the working matrix; V accumulates the right rotations
    g = [list(mf.column(j)) for j in range(d)]
    v = [[1.0 if i == j else 0.0 for i in range(d)] for j in range(d)]

    def cdot(x: list, y: list) -> complex:
        # conj(x) . y, valid for real and complex columns
        return sum((xi.conjugate() if isinstance(xi, complex) else xi) * yi for xi, yi in zip(x, y))

    for _ in range(_JACOBI_MAX_SWEEPS):
        off = 0.0
        # columns whose norm has collapsed to roundoff are finished: rotating
        # them against live columns only launders noise into real mass
        scale2 = max(abs(cdot(col, col)) for col in g)
        floor2 = scale2 * (d * 2.3e-16) ** 2
        for p in range(d - 1):
            for q in range(p + 1, d):
                app = abs(cdot(g[p], g[p]))
                aqq = abs(cdot(g[q], g[q]))
                if app <= floor2 or aqq <= floor2:
                    continue
                apq = cdot(g[p], g[q])
                h = abs(apq)
                if h <= _JACOBI_TOL * math.sqrt(app * aqq) or h == 0.0:
                    continue
                off = max(off, h / math.sqrt(app * aqq) if app * aqq > 0 else h)
                # phase-rotate column q so the Gram off-diagonal becomes real >= 0
                # (for real columns the phase is the sign of apq)
                if isinstance(apq, complex):
                    phase = apq / h
                    g[q] = [x * phase.conjugate() for x in g[q]]
                    v[q] = [x * phase.conjugate() for x in v[q]]
                elif apq < 0:
                    g[q] = [-x for x in g[q]]
                    v[q] = [-x for x in v[q]]
                # real Jacobi rotation zeroing the (p,q) Gram entry
                theta = (aqq - app) / (2.0 * h)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                gp, gq = g[p], g[q]
                g[p] = [c * a - s * b for a, b in zip(gp, gq)]
                g[q] = [s * a + c * b for a, b in zip(gp, gq)]
                vp, vq = v[p], v[q]
                v[p] = [c * a - s * b for a, b in zip(vp, vq)]
                v[q] = [s * a + c * b for a, b in zip(vp, vq)]
        if off <= _JACOBI_TOL:
            break

    norms = [math.sqrt(abs(cdot(col, col))) for col in g]
    order = sorted(range(d), key=lambda j: -norms[j])
    values = tuple(norms[j] for j in order)
    left = tuple(
        tuple(x / norms[j] for x in g[j]) if norms[j] > 0 else tuple(0.0 for _ in range(d))
        for j in order
    )
    right = tuple(tuple(v[j]) for j in order)
    return SingularSpectrum(values, left, right)


def rank1_gap(m: Mat) -> float:
    """delta_2 / delta_1, the scale-free distance from rank one.  Zero matrix is an error."""
    if m.is_zero():
        raise ValueError("undefined gap: zero matrix has no leading singular value")
    s = svd_small(m)
    return s.values[1] / s.values[0] if m.d > 1 else 0.0


def rank1_approx(m: Mat) -> Mat:
    """Best unit-spectral-norm rank-1 approximation u1 v1* of M / ||M||_2.

    Satisfies ``||M/||M||_2 - R||_2 <= delta_2/delta_1 + 1e-9`` (checked by tests).
    """
    if m.is_zero():
        raise ValueError("undefined gap: zero matrix has no leading singular value")
    s = svd_small(m)
    u1, v1 = s.left[0], s.right[0]
    d = m.d
    rows = tuple(
        tuple(
            u1[i] * (v1[j].conjugate() if isinstance(v1[j], complex) else v1[j])
            for j in range(d)
        )
        for i in range(d)
    )
    return Mat(rows, "float")
