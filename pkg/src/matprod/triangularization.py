"""Stable support patterns and block-lower-triangular segment forms.

For a sequence (A_n) of nonnegative d x d matrices write
``P_{m,n} = A_{m+1} ... A_n``.  The quantity ``H(P_{m,n})`` (distinct column
supports) is non-decreasing in m for fixed n, and its limsup over n
stabilizes at a value ``kappa`` from some first start ``r`` on.  Scanning n
past r, the support of ``P_{r,n}`` takes some value infinitely often while
``H = kappa``; the first such time is ``r_0``, and chaining the same
condition gives cut points ``r_0 < r_1 < ...`` with:

* ``S``: the block permutation of the partition of ``P_{r, r_0}``;
* ``T_k = S^{-1} P_{r_{k-1}, r_k} S`` block lower triangular with respect to
  the cumulative class sizes (cuts) of that partition, with every block
  having H = 1 (all its columns share one support);
* after a refinement that merges consecutive segments, every in-window
  interval product ``T_k ... T_{k'}`` has one fixed support with
  ``H = kappa``.

The refinement here picks the most frequent idempotent interval support
``e`` with ``H(e) = kappa`` and chains cut points whose consecutive interval
supports equal e; idempotence makes every pairwise interval equal e, which
is checked, not assumed.

On a finite window everything is an estimate: results carry a
``stabilized`` flag rather than pretending the horizon is infinite.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core_linalg import Mat
from .support_algebra import (
    ColumnPartition,
    PermSpec,
    SupportPattern,
    _as_factor,
    conjugate,
    kappa_estimate,
    partition,
    pattern_of,
    satisfies_E,
    sigma_permutation,
)

__all__ = [
    "StablePattern",
    "TriangularForm",
    "find_stable_pattern",
    "triangular_form",
    "verify_diag_blocks_nonnull",
]


@dataclass(frozen=True)
class StablePattern:
    r: int
    r0: int
    pattern: SupportPattern
    kappa: int
    stabilized: bool


@dataclass(frozen=True)
class TriangularForm:
    """Block-triangularized segment decomposition of a matrix product window.

    ``Tk[k] = S^{-1} P_{rk[k], rk[k+1]} S`` for the refined cut points ``rk``
    (so ``rk[0]`` is the first cut r_0 after the stable start ``r``), each
    block lower triangular w.r.t. ``cuts`` with H = 1 blocks, H(T_k) = kappa,
    and all in-window interval products sharing the support of ``Tk[0]``.
    """

    r: int
    r0: int
    rk: tuple[int, ...]
    S: PermSpec
    cuts: tuple[int, ...]
    Tk: tuple[Mat, ...]
    kappa: int
    base_partition: ColumnPartition
    stabilized: bool


class TriangularizationError(ValueError):
    """Structured failure: the window did not produce/verify the advertised form."""


def find_stable_pattern(
    seq,
    horizon: int,
    m_max: int | None = None,
    recurrence_threshold: int | None = None,
) -> StablePattern:
    """Locate (r, r_0, recurring support, kappa) on a finite window.

    ``Infinitely recurring'' is approximated by at least
    ``recurrence_threshold`` occurrences (default ceil(window/4)) of the same
    support among times with H = kappa; ``stabilized`` is False when the
    kappa estimate itself had not settled.
    """
    factor = _as_factor(seq)
    est = kappa_estimate(factor, horizon, m_max)
    kappa = est.value
    r = min(m for (m, v, _s) in est.per_start if v == kappa)

    pats = _interval_patterns_from(factor, r, horizon)
    window = horizon - r
    thr = recurrence_threshold if recurrence_threshold is not None else max(2, -(-window // 4))
    counts: dict[tuple[int, ...], list[int]] = {}
    for n in range(r + 1, horizon + 1):
        p = pats[n]
        if p.H() == kappa:
            counts.setdefault(p.cols, []).append(n)
    recurring = [ns for ns in counts.values() if len(ns) >= thr]
    if not recurring:
        # fall back to the most frequent support; flag unstabilized
        if not counts:
            raise TriangularizationError(
                f"no time in ({r}, {horizon}] attains H = kappa = {kappa}"
            )
        ns = max(counts.values(), key=len)
        return StablePattern(r, ns[0], SupportPattern(pats[ns[0]].d, pats[ns[0]].cols), kappa, False)
    r0 = min(min(ns) for ns in recurring)
    return StablePattern(r, r0, pats[r0], kappa, est.stabilized)


def _interval_patterns_from(factor, start: int, horizon: int) -> dict[int, SupportPattern]:
    """pattern(P_{start, n}) for n = start+1 .. horizon."""
    out: dict[int, SupportPattern] = {}
    p = pattern_of(factor(start + 1))
    out[start + 1] = p
    for n in range(start + 2, horizon + 1):
        p = p.mul(pattern_of(factor(n)))
        out[n] = p
    return out


def triangular_form(seq, horizon: int, k_count: int = 3, m_max: int | None = None) -> TriangularForm:
    """Compute the block-triangular segment form on a window, then verify it.

    Verification failures raise :class:`TriangularizationError`; a window too
    short to find ``k_count`` refined segments returns fewer with
    ``stabilized = False``.
    """
    factor = _as_factor(seq)
    stable = find_stable_pattern(seq, horizon, m_max)
    r, r0, kappa = stable.r, stable.r0, stable.kappa
    target_cols = stable.pattern.cols

    # raw cut candidates: times n with H(P_{prev,n}) = kappa and P_{r,n} matching
    pats_from_r = _interval_patterns_from(factor, r, horizon)
    cuts_raw = [r0]
    cur: SupportPattern | None = None  # pattern(P_{last cut, n})
    for n in range(r0 + 1, horizon + 1):
        pn = pattern_of(factor(n))
        cur = pn if cur is None else cur.mul(pn)
        if cur.H() == kappa and pats_from_r[n].cols == target_cols:
            cuts_raw.append(n)
            cur = None

    if len(cuts_raw) < 2:
        raise TriangularizationError(
            f"window {horizon} produced no segment after r0 = {r0}; extend the horizon"
        )

    base_part = partition(stable.pattern)
    S = sigma_permutation(base_part)
    cuts = base_part.c

    refined = _refine_cuts(factor, cuts_raw, kappa, k_count)
    stabilized = stable.stabilized and len(refined) >= k_count + 1

    Tk = tuple(
        conjugate(_product(factor, refined[i], refined[i + 1]), S)
        for i in range(len(refined) - 1)
    )
    _verify_form(Tk, cuts, kappa)
    return TriangularForm(
        r, r0, tuple(refined), S, cuts, Tk, kappa, base_part, stabilized
    )


def _product(factor, m: int, n: int) -> Mat:
    """P_{m,n} = A_{m+1} ... A_n, exact when the factors are exact."""
    first = factor(m + 1)
    acc = first
    for t in range(m + 2, n + 1):
        acc = acc @ factor(t)
    return acc


def _refine_cuts(factor, cuts_raw: list[int], kappa: int, k_count: int) -> list[int]:
    """Merge consecutive raw segments so all interval supports coincide.

    Colors the intervals (a,b) -> support(P_{cuts[a], cuts[b]}), then chains
    cut points whose consecutive colors equal the most frequent idempotent
    color with H = kappa.  Consecutive e-intervals plus e.e = e give every
    pairwise interval color e.
    """
    K = len(cuts_raw)
    seg_pats = [
        pattern_of(_product(factor, cuts_raw[i], cuts_raw[i + 1])) for i in range(K - 1)
    ]
    # V[a][b] = color of interval (a, b), 0 <= a < b <= K-1
    V: list[dict[int, SupportPattern]] = [dict() for _ in range(K)]
    for a in range(K - 1):
        p = seg_pats[a]
        V[a][a + 1] = p
        for b in range(a + 2, K):
            p = p.mul(seg_pats[b - 1])
            V[a][b] = p

    freq: dict[tuple[int, ...], int] = {}
    by_cols: dict[tuple[int, ...], SupportPattern] = {}
    for a in range(K):
        for p in V[a].values():
            freq[p.cols] = freq.get(p.cols, 0) + 1
            by_cols[p.cols] = p
    candidates = sorted(freq, key=lambda cols: -freq[cols])
    best: list[int] = []
    for cols in candidates:
        e = by_cols[cols]
        if e.mul(e).cols != cols or e.H() != kappa:
            continue
        # greedy chain: earliest start, then always the nearest e-continuation
        for start in range(K - 1):
            chain = [start]
            cur = start
            while len(chain) < k_count + 1:
                nxt = None
                for b in range(cur + 1, K):
                    if V[cur][b].cols == cols:
                        nxt = b
                        break
                if nxt is None:
                    break
                chain.append(nxt)
                cur = nxt
            if len(chain) > len(best):
                best = chain
            if len(best) >= k_count + 1:
                return [cuts_raw[i] for i in best]
    if len(best) >= 2:
        return [cuts_raw[i] for i in best]
    # no idempotent chain found: fall back to the raw cuts
    return cuts_raw[: k_count + 1]


def _verify_form(Tk: tuple[Mat, ...], cuts: tuple[int, ...], kappa: int) -> None:
    """Machine-check the advertised structure of every T_k."""
    blocks = len(cuts) - 1
    joint: SupportPattern | None = None
    for idx, t in enumerate(Tk):
        p = pattern_of(t)
        if p.H() != kappa:
            raise TriangularizationError(f"T_{idx} has H = {p.H()}, expected kappa = {kappa}")
        # strictly-upper blocks must vanish
        for hb in range(blocks):
            for lb in range(hb + 1, blocks):
                for i in range(cuts[hb], cuts[hb + 1]):
                    for j in range(cuts[lb], cuts[lb + 1]):
                        if t.rows[i][j] != 0:
                            raise TriangularizationError(
                                f"T_{idx} not block lower triangular at {(i, j)}"
                            )
        # every block has H = 1 (all columns of the block share one support)
        for hb in range(blocks):
            for lb in range(blocks):
                sup = None
                for j in range(cuts[lb], cuts[lb + 1]):
                    s = frozenset(
                        i for i in range(cuts[hb], cuts[hb + 1]) if p.cols[j] >> i & 1
                    )
                    if sup is None:
                        sup = s
                    elif s != sup:
                        raise TriangularizationError(
                            f"T_{idx} block ({hb},{lb}) has columns with different supports"
                        )
        joint = p if joint is None else joint
    # all interval products share the support of T_0
    K = len(Tk)
    for a in range(K):
        p = pattern_of(Tk[a])
        for b in range(a, K):
            if b > a:
                p = p.mul(pattern_of(Tk[b]))
            if p.cols != joint.cols:
                raise TriangularizationError(
                    f"interval product T_{a}..T_{b} changes support; refinement failed"
                )


def verify_diag_blocks_nonnull(form: TriangularForm, seq, horizon: int) -> bool:
    """Under nested column supports of every window factor, diagonal blocks
    B_k^{h,h} for h <= kappa-1 must be nonnull; checks exactly that.

    Errors: a window factor without nested column supports violates the
    precondition (raises ValueError).
    """
    factor = _as_factor(seq)
    for n in range(1, horizon + 1):
        if not satisfies_E(factor(n)):
            raise ValueError(f"precondition violated: factor {n} lacks nested column supports")
    cuts = form.cuts
    for idx, t in enumerate(form.Tk):
        for h in range(min(form.kappa - 1, len(cuts) - 1)):
            block_nonnull = any(
                t.rows[i][j] != 0
                for i in range(cuts[h], cuts[h + 1])
                for j in range(cuts[h], cuts[h + 1])
            )
            if not block_nonnull:
                return False
    return True
