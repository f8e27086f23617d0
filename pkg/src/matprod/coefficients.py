"""Contraction coefficients for products of nonnegative matrices.

For a nonnegative matrix A (entrywise L1 column norms):

* ``Lambda(A) = max ||A U_j|| / A(i,j)`` over nonzero entries — how far a
  column norm can exceed one of its own entries.  ``Lambda(0) := 1``.
* ``lambda_coef(A) = max ||A U_{j'}|| / A(i,j)`` over triples with
  ``A(i,j) != 0 = A(i,j')`` — the norm of a column *missing* from a row,
  relative to an entry present in that row.  Empty triple set (in particular
  a positive or zero matrix) gives 0.

These compose submultiplicatively:

    Lambda(AB) <= Lambda(A) + lambda(A) * Lambda(B)
    lambda(AB) <= lambda(A) * lambda(B)

so a factor-wise certificate for a product of n matrices with uniform bounds
Lambda_k <= L, lambda_k <= l is ``Lambda <= (1 + l + ... + l^{n-1}) L``
(``<= L/(1-l)`` for any n when l < 1) and ``lambda <= l^n``.

``birkhoff_tau`` is the Birkhoff contraction ratio of a positive matrix:
``max (1 - sqrt(r)) / (1 + sqrt(r))`` over cross ratios
``r = A(i,j)A(k,l) / (A(i,l)A(k,j))``; it multiplies along products and obeys
``tau(A) <= 1 - 1/Lambda(A)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core_linalg import Mat, vec_norm_l1

__all__ = [
    "CoeffBounds",
    "Lambda",
    "lambda_coef",
    "birkhoff_tau",
    "product_bounds",
    "coefficients_of",
]


@dataclass(frozen=True)
class CoeffBounds:
    """Certified coefficient bounds (Lambda >= 1 unless annihilated, lambda >= 0,
    tau in [0,1] only for positive matrices)."""

    Lambda: object
    lambda_: object
    tau: float | None = None


def _require_nonnegative(m: Mat, who: str) -> None:
    if not m.is_nonnegative():
        raise ValueError(f"{who} requires a nonnegative matrix")


def Lambda(m: Mat):
    """max over nonzero entries of column norm / entry; 1 for the zero matrix."""
    _require_nonnegative(m, "Lambda")
    best = None
    for j in range(m.d):
        col = m.column(j)
        norm = vec_norm_l1(col)
        if norm == 0:
            continue
        smallest = min(x for x in col if x != 0)
        val = norm / smallest
        if best is None or val > best:
            best = val
    if best is None:
        return Fraction(1) if m.backend == "exact" else 1.0
    return best


def lambda_coef(m: Mat):
    """max over (i, j, j') with M(i,j) != 0 = M(i,j') of ||col j'|| / M(i,j); 0 if none."""
    _require_nonnegative(m, "lambda_coef")
    d = m.d
    norms = [vec_norm_l1(m.column(j)) for j in range(d)]
    best = None
    for j in range(d):
        for jp in range(d):
            if jp == j:
                continue
            # rows where col j is nonzero and col j' is zero
            denom = None
            for i in range(d):
                if m.rows[i][j] != 0 and m.rows[i][jp] == 0:
                    if denom is None or m.rows[i][j] < denom:
                        denom = m.rows[i][j]
            if denom is not None:
                val = norms[jp] / denom
                if best is None or val > best:
                    best = val
    if best is None:
        return Fraction(0) if m.backend == "exact" else 0.0
    return best


def birkhoff_tau(m: Mat) -> float:
    """Birkhoff contraction ratio of a positive matrix (error otherwise)."""
    if not m.is_positive():
        raise ValueError("birkhoff_tau requires a positive matrix")
    d = m.d
    r_min = None
    for i in range(d):
        for k in range(d):
            if k == i:
                continue
            for j in range(d):
                for l in range(d):
                    if l == j:
                        continue
                    r = (m.rows[i][j] * m.rows[k][l]) / (m.rows[i][l] * m.rows[k][j])
                    if r_min is None or r < r_min:
                        r_min = r
    if r_min is None:  # d == 1
        return 0.0
    s = math.sqrt(float(r_min))
    return (1.0 - s) / (1.0 + s)


def product_bounds(per_factor: Sequence[tuple], infinite: bool = False) -> CoeffBounds:
    """Certificate for a product from per-factor (Lambda_k, lambda_k) pairs.

    Uses the uniform form with L = max Lambda_k, l = max lambda_k:
    ``Lambda <= (1 + l + ... + l^{n-1}) L`` and ``lambda <= prod lambda_k``.
    With ``infinite=True`` returns the horizon-free cap ``L / (1 - l)``
    (requires l < 1).
    """
    if not per_factor:
        raise ValueError("need at least one factor")
    L = max(p[0] for p in per_factor)
    l = max(p[1] for p in per_factor)
    if infinite:
        if l >= 1:
            raise ValueError("horizon-free cap requires lambda < 1")
        return CoeffBounds(L / (1 - l), l)
    n = len(per_factor)
    geo = sum(l**k for k in range(n)) if l != 1 else n
    lam = 1
    for p in per_factor:
        lam = lam * p[1]
    return CoeffBounds(L * geo if l != 1 else L * n, lam)


def coefficients_of(m: Mat) -> CoeffBounds:
    """Measured coefficients of one matrix (tau only when positive)."""
    tau = birkhoff_tau(m) if m.is_positive() else None
    return CoeffBounds(Lambda(m), lambda_coef(m), tau)
