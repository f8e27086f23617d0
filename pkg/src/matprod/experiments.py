"""Reproducible worked examples and Monte-Carlo divergence demonstrations.

Three deterministic chains with closed forms:

* the bistochastic 2x2 chain whose normalized products provably diverge
  (successive symmetric matrices with s-parameter jumping by at least the
  running determinant);
* the 3x3 unipotent chain with doubling blocks whose (2,1)/(3,1) entry
  ratio oscillates between 1/2 and 2 forever;
* lower-triangular 2x2 products with exact r_n, s_n and, for eventually
  constant inputs, the exact limit direction.

Plus seeded Monte-Carlo trials: uniform-positive ensembles contract to a
rank-1 attractor (second-to-first singular-value gap shrinking to zero),
while complex-Gaussian ensembles keep wandering (successive normalized
products stay apart) — the two regimes the theory separates.
"""

from __future__ import annotations

import cmath
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .core_linalg import Mat, ScaledProduct, scaled_identity, scaled_multiply, svd_small, vec_norm_l1
from .limit_engine import iterate_direction

__all__ = [
    "TrialRecord",
    "TriangularResult",
    "Divergence3x3Result",
    "bistochastic_chain",
    "bistochastic_step",
    "divergence_3x3",
    "div3x3_letter",
    "triangular_2x2",
    "random_divergence_trial",
    "successive_direction_distances",
]


# ---------------------------------------------------------------------------
# bistochastic chain
# ---------------------------------------------------------------------------


def bistochastic_chain(n: int) -> tuple[Fraction, Fraction, Mat]:
    """(s_n, det P_n, P_n) with s_n = sum_{k<=n} (1 - 1/k^2) det P_{k-1},
    P_0 = I, P_n = [[1-s_n, s_n], [s_n, 1-s_n]]; everything exact."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = Fraction(0)
    det = Fraction(1)  # det P_0
    for k in range(1, n + 1):
        s += (1 - Fraction(1, k * k)) * det
        det = 1 - 2 * s  # det of the symmetric bistochastic P_k
    p = Mat.exact(((1 - s, s), (s, 1 - s)))
    return s, det, p


def bistochastic_step(n: int) -> Fraction:
    """|s_{n+1} - s_n| = (1 - 1/(n+1)^2) |det P_n|, exact."""
    s_n, det_n, _ = bistochastic_chain(n)
    return (1 - Fraction(1, (n + 1) * (n + 1))) * abs(det_n)


# ---------------------------------------------------------------------------
# 3x3 block-doubling chain
# ---------------------------------------------------------------------------

_GEN_A = Mat.exact(((1, 0, 0), (1, 1, 0), (0, 0, 1)))  # adds row 1 to row 2
_GEN_B = Mat.exact(((1, 0, 0), (0, 1, 0), (1, 0, 1)))  # adds row 1 to row 3


def div3x3_letter(n: int) -> int:
    """Letter (0 for A, 1 for B) at 1-based position n: block j has length 2^j
    and spans positions 2^j .. 2^(j+1)-1; A on even blocks, B on odd."""
    if n < 1:
        raise ValueError("positions are 1-based")
    return (n.bit_length() - 1) % 2


@dataclass(frozen=True)
class Divergence3x3Result:
    k: int
    n_first: int
    P_first: Mat
    ratio_first: Fraction
    n_second: int
    P_second: Mat
    ratio_second: Fraction


def _unipotent_power(gen: Mat, m: int) -> Mat:
    """gen^m for the two elementary generators: the off-diagonal entry scales
    linearly (verified by direct multiplication in the tests)."""
    rows = [list(r) for r in gen.rows]
    for i in range(3):
        for j in range(3):
            if i != j and rows[i][j]:
                rows[i][j] = rows[i][j] * m
    return Mat.exact(tuple(tuple(r) for r in rows))


def divergence_3x3(k: int) -> Divergence3x3Result:
    """Exact products at the two block-boundary checkpoints n = 2^(2k) - 1 and
    n = 2^(2k+1) - 1, with the (2,1)/(3,1) entry ratios."""
    if k < 1:
        raise ValueError("k must be >= 1")

    def product_through_block(last_block: int) -> Mat:
        acc = Mat.exact(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
        for j in range(last_block + 1):
            gen = _GEN_A if j % 2 == 0 else _GEN_B
            acc = acc @ _unipotent_power(gen, 1 << j)
        return acc

    p1 = product_through_block(2 * k - 1)
    p2 = product_through_block(2 * k)
    r1 = Fraction(p1.rows[1][0], p1.rows[2][0])
    r2 = Fraction(p2.rows[1][0], p2.rows[2][0])
    return Divergence3x3Result(k, (1 << 2 * k) - 1, p1, r1, (1 << (2 * k + 1)) - 1, p2, r2)


# ---------------------------------------------------------------------------
# lower-triangular 2x2 products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TriangularResult:
    n: int
    r_n: Fraction
    s_n: Fraction
    direction: tuple
    limit: tuple | None  # exact limit direction when decidable, else None


def _as_seq(x, n: int) -> list[Fraction]:
    if callable(x):
        vals = [Fraction(x(k)) for k in range(1, n + 1)]
    else:
        vals = [Fraction(v) for v in x]
        if len(vals) < n:
            raise ValueError(f"need {n} terms, got {len(vals)}")
        vals = vals[:n]
    return vals


def triangular_2x2(a_seq, c_seq, d_seq, V, n: int) -> TriangularResult:
    """P_n = (a_1...a_n) [[1, 0], [s_n, r_n]] with r_n = prod d/a and
    s_n = sum_k c_k (prod_{i<k} d_i) / prod_{i<=k} a_i, all exact; the
    direction is P_n V normalized.

    For inputs whose last quarter is constant the exact limit direction is
    included: s diverges (limit (0,1)) when the tail has d >= a with c > 0;
    otherwise the geometric tail sums exactly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a = _as_seq(a_seq, n)
    c = _as_seq(c_seq, n)
    d = _as_seq(d_seq, n)
    if any(x <= 0 for x in a) or any(x < 0 for x in c) or any(x < 0 for x in d):
        raise ValueError("need a_k > 0, c_k >= 0, d_k >= 0")
    v1, v2 = Fraction(V[0]), Fraction(V[1])

    r = Fraction(1)
    s = Fraction(0)
    for k in range(n):
        s += r * c[k] / a[k]
        r *= d[k] / a[k]

    w1, w2 = v1, s * v1 + r * v2
    norm = abs(w1) + abs(w2)
    if norm == 0:
        raise ValueError("P_n V = 0: V must be nonzero with nonnegative entries")
    direction = (w1 / norm, w2 / norm)

    limit = None
    tail_from = max(0, n - max(1, n // 4))
    tail = (a[tail_from], c[tail_from], d[tail_from])
    if all((a[k], c[k], d[k]) == tail for k in range(tail_from, n)):
        ta, tc, td = tail
        if v1 == 0:
            limit = (Fraction(0), Fraction(1))
        elif td >= ta and tc > 0:
            limit = (Fraction(0), Fraction(1))  # s_n increases without bound
        elif td > ta and tc == 0:
            limit = (Fraction(0), Fraction(1)) if v2 != 0 else direction
        elif td == ta and tc == 0:
            limit = direction  # r and s frozen: already exact
        else:
            # td < ta: geometric tail, r_n -> 0
            r_tail = Fraction(1)
            s_inf = Fraction(0)
            for k in range(tail_from):
                s_inf += r_tail * c[k] / a[k]
                r_tail *= d[k] / a[k]
            s_inf += r_tail * (tc / ta) / (1 - td / ta)
            limit = (1 / (1 + s_inf), s_inf / (1 + s_inf))
    return TriangularResult(n, r, s, direction, limit)


def triangular_factor(a_seq, c_seq, d_seq) -> Callable[[int], Mat]:
    """The factor sequence itself, for engine cross-checks."""

    def factor(k: int) -> Mat:
        ak = Fraction(a_seq(k)) if callable(a_seq) else Fraction(a_seq[k - 1])
        ck = Fraction(c_seq(k)) if callable(c_seq) else Fraction(c_seq[k - 1])
        dk = Fraction(d_seq(k)) if callable(d_seq) else Fraction(d_seq[k - 1])
        return Mat.exact(((ak, Fraction(0)), (ck, dk)))

    return factor


# ---------------------------------------------------------------------------
# Monte-Carlo trials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    n: int
    ensemble: str
    d: int
    rank1_gap: float
    max_successive_last50: float
    successive_tail: tuple[float, ...] = field(repr=False, default=())
    reseeds: int = 0


def _draw(ensemble: str, rng: random.Random, d: int) -> Mat:
    if ensemble == "uniform-positive":
        rows = tuple(tuple(rng.uniform(0.0, 1.0) for _ in range(d)) for _ in range(d))
    elif ensemble == "gaussian-complex":
        rows = tuple(
            tuple(complex(rng.gauss(0.0, 1.0), rng.gauss(0.0, 1.0)) / 2**0.5 for _ in range(d))
            for _ in range(d)
        )
    else:
        raise ValueError("ensemble must be 'uniform-positive' or 'gaussian-complex'")
    return Mat(rows, "float")


def successive_direction_distances(seq, horizon: int) -> list[float]:
    """Entrywise L1 distances between successive normalized products P'_n."""
    factor = seq if callable(seq) else (lambda k: seq[k - 1])
    prod = None
    prev = None
    out = []
    for k in range(1, horizon + 1):
        m = factor(k)
        prod = m if prod is None else prod @ m
        norm = sum(abs(x) for row in prod.rows for x in row)
        if norm == 0:
            raise ZeroDivisionError(f"product annihilated at step {k}")
        cur = tuple(tuple(x / norm for x in row) for row in prod.rows)
        prod = Mat(cur, "float")  # renormalize to keep floats bounded
        if prev is not None:
            out.append(sum(abs(a - b) for ra, rb in zip(cur, prev) for a, b in zip(ra, rb)))
        prev = cur
    return out


def random_divergence_trial(ensemble: str, n: int, seed: int, d: int = 3) -> TrialRecord:
    """One seeded trial; annihilation (measure zero) aborts and reseeds."""
    if d > 8:
        raise ValueError("d must be <= 8")
    reseeds = 0
    cur_seed = seed
    while True:
        rng = random.Random(cur_seed)
        mats = [_draw(ensemble, rng, d) for _ in range(n)]
        try:
            dists = successive_direction_distances(mats, n)
        except ZeroDivisionError:
            reseeds += 1
            cur_seed = seed + 1_000_000 * reseeds
            continue
        break
    prod = mats[0]
    for m in mats[1:]:
        norm = sum(abs(x) for row in prod.rows for x in row)
        prod = Mat(tuple(tuple(x / norm for x in row) for row in prod.rows), "float") @ m
    spec = svd_small(prod)
    gap = spec.values[1] / spec.values[0] if spec.values[0] > 0 else float("inf")
    tail = tuple(dists[-50:])
    return TrialRecord(
        seed=seed,
        n=n,
        ensemble=ensemble,
        d=d,
        rank1_gap=gap,
        max_successive_last50=max(tail) if tail else 0.0,
        successive_tail=tail,
        reseeds=reseeds,
    )
