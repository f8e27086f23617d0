"""Direction limits of right-products under segment-wise contraction.

Given factors (A_n) and a segmentation ``0 = s_0 < s_1 < ...``, the working
condition is:

* every segment product ``P_{s_{k-1}, s_k}`` has nested column supports;
* ``sup over k, n in [s_k, s_{k+1})`` of ``Lambda(P_{s_{k-1}, n})`` is finite;
* the same sup for ``lambda`` is < 1.

Under it the column classes of ``P_{t_0, n}`` stabilize (kappa* classes with
nested row supports I_1 containing I_2 ...), unit columns converge classwise
to vectors V_h, cross-class column-norm ratios decay geometrically with the
segment index, and every nonnegative direction P_n V / ||P_n V|| tracks the
V_h of the first class its support hits, with a certified error.

All certificates here are *measured on the window*: eps_n is a sup of
realized in-class discrepancies plus a cross-class mass term (a convexity
argument makes that a true upper bound for every V — unit columns are
nonnegative, so P_n V normalized is a convex combination of unit columns),
and the ratio envelope uses the measured condition bounds.  Nothing is
asserted from the existential constants of the underlying theory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coefficients import Lambda as coef_Lambda
from .coefficients import birkhoff_tau, lambda_coef
from .core_linalg import (
    Mat,
    ScaledProduct,
    scaled_identity,
    scaled_multiply,
    svd_small,
    vec_norm_l1,
)
from .support_algebra import (
    _as_factor,
    kappa_estimate,
    partition,
    pattern_of,
    satisfies_E,
)

__all__ = [
    "ConditionCError",
    "ConditionCReport",
    "LimitReport",
    "check_condition_C",
    "iterate_direction",
    "estimate_limits",
    "h_of_V",
    "ratio_decay",
    "rank1_factorization",
    "positive_chain_limit",
    "divergence_criteria",
]


class ConditionCError(ValueError):
    """The segment-contraction condition failed (details in ``report``)."""

    def __init__(self, message: str, report: "ConditionCReport"):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------------------
# condition (C)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SegmentCheck:
    k: int
    start: int
    end: int
    nested_supports: bool
    sup_Lambda: object | None  # sup over n in [s_k, s_{k+1}) of Lambda(P_{s_{k-1}, n})
    sup_lambda: object | None


@dataclass(frozen=True)
class ConditionCReport:
    segmentation: tuple[int, ...]
    horizon: int
    segments: tuple[SegmentCheck, ...]
    Lambda_bound: float
    lambda_bound: float
    all_nested: bool
    holds: bool


def _normalize_segmentation(segmentation: Sequence[int], horizon: int) -> tuple[int, ...]:
    s = list(segmentation)
    if not s or s[0] != 0:
        s = [0] + s
    if any(b <= a for a, b in zip(s, s[1:])):
        raise ValueError("segmentation must be strictly increasing")
    s = [x for x in s if x <= horizon]
    if len(s) < 2:
        raise ValueError("segmentation needs at least one full segment within the horizon")
    return tuple(s)


def check_condition_C(seq, segmentation: Sequence[int], horizon: int) -> ConditionCReport:
    """Verify the three segment conditions on the window; never raises on failure."""
    factor = _as_factor(seq)
    s = _normalize_segmentation(segmentation, horizon)
    K = len(s) - 1
    checks = []
    sup_L_global = 0.0
    sup_l_global = 0.0
    all_nested = True
    for k in range(1, K + 1):
        seg_prod = _product(factor, s[k - 1], s[k])
        nested = satisfies_E(seg_prod)
        all_nested = all_nested and nested
        supL = None
        supl = None
        if k < K:
            # running product P_{s_{k-1}, n} for n in [s_k, s_{k+1})
            acc = seg_prod
            supL = coef_Lambda(acc)
            supl = lambda_coef(acc)
            for n in range(s[k] + 1, s[k + 1]):
                acc = acc @ factor(n)
                supL = max(supL, coef_Lambda(acc))
                supl = max(supl, lambda_coef(acc))
        elif K == 1:
            supL = coef_Lambda(seg_prod)
            supl = lambda_coef(seg_prod)
        if supL is not None:
            sup_L_global = max(sup_L_global, float(supL))
            sup_l_global = max(sup_l_global, float(supl))
        checks.append(SegmentCheck(k, s[k - 1], s[k], nested, supL, supl))
    holds = all_nested and math.isfinite(sup_L_global) and sup_l_global < 1.0
    return ConditionCReport(s, horizon, tuple(checks), sup_L_global, sup_l_global, all_nested, holds)


def _product(factor, m: int, n: int) -> Mat:
    acc = factor(m + 1)
    for t in range(m + 2, n + 1):
        acc = acc @ factor(t)
    return acc


def _scaled_product(factor, m: int, n: int) -> Mat:
    """Renormalized P_{m,n} for support queries; long float windows would
    otherwise underflow to exact zeros and report an empty pattern."""
    first = factor(m + 1)
    acc = scaled_identity(first.d, first.backend)
    for t in range(m + 1, n + 1):
        acc = scaled_multiply(acc, factor(t))
    return acc.mat


# ---------------------------------------------------------------------------
# direction iteration
# ---------------------------------------------------------------------------


def iterate_direction(seq, V: Sequence, n: int):
    """Unit-L1 direction of P_n V via a renormalized product chain.

    Raises ValueError("annihilated at step m") at the first m with P_m V = 0.
    """
    factor = _as_factor(seq)
    first = factor(1)
    p = scaled_identity(first.d, first.backend)
    v = tuple(V)
    for m in range(1, n + 1):
        p = scaled_multiply(p, factor(m))
        w = p.mat.matvec(v)
        if all(x == 0 for x in w):
            raise ValueError(f"annihilated at step {m}")
    w = p.mat.matvec(v)
    norm = vec_norm_l1(w)
    return tuple(x / norm for x in w)


# ---------------------------------------------------------------------------
# the limit report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SampleRecord:
    """Per-time snapshot: column norms (common positive scale factored out),
    unit columns (None where null), the nonnull class partition, and the
    per-class row supports.

    Column membership of classes fluctuates forever (it is set by the most
    recent factors), while class count and row supports stabilize; structural
    comparisons use ``row_supports``."""

    col_norms: tuple[float, ...]
    unit_cols: tuple
    classes: tuple[tuple[int, ...], ...]  # sorted column tuples, one per nonnull class
    row_supports: tuple[frozenset, ...]  # per nonnull class, decreasing


@dataclass(frozen=True)
class LimitReport:
    kappa: int
    kappa_star: int
    r_seg: int
    r0_seg: int
    t0: int
    t1: int
    segmentation: tuple[int, ...]
    horizon: int
    I_h: tuple[frozenset[int], ...]
    V_h: tuple[tuple[float, ...], ...]
    burn_in: int
    eps_n: dict  # n -> certified nonincreasing certificate
    eps_raw: dict
    samples: dict  # n -> SampleRecord
    condition_c: ConditionCReport
    invariant_violations: tuple[str, ...]
    stabilized: bool

    def J_h_of_n(self, n: int) -> tuple[tuple[int, ...], ...]:
        return self.samples[n].classes


def _lemma2_cuts(pats_by_end: dict, factor_pattern, r: int, r0: int, kappa: int, K: int) -> list[int]:
    """Cut chain after r0: next cut = first n with H(P_{prev,n}) = kappa and
    P_{r,n} support equal to the r0 support."""
    target = pats_by_end[r0].cols
    cuts = [r0]
    cur = None
    for n in range(r0 + 1, K + 1):
        pn = factor_pattern(n)
        cur = pn if cur is None else cur.mul(pn)
        if cur.H() == kappa and pats_by_end[n].cols == target:
            cuts.append(n)
            cur = None
    return cuts


def estimate_limits(
    seq,
    segmentation: Sequence[int],
    horizon: int,
    require_condition_c: bool = True,
    sample_stride: int = 1,
) -> LimitReport:
    """Full pipeline: condition check, stable segment pattern, classes, limits,
    measured certificates.

    With ``require_condition_c=False`` the engine proceeds past a failing
    condition check and records type-invariant violations instead of raising
    (class limits are then empirical only).
    """
    factor = _as_factor(seq)
    s = _normalize_segmentation(segmentation, horizon)
    cc = check_condition_C(factor, s, horizon)
    if require_condition_c and not cc.holds:
        raise ConditionCError("condition (C) fails on this window", cc)

    # segment-level machinery
    K = len(s) - 1
    if K < 2:
        raise ValueError("need at least 2 segments within the horizon")
    seg_prods = [None] + [_product(factor, s[k - 1], s[k]) for k in range(1, K + 1)]

    def seg_factor(k: int) -> Mat:
        return seg_prods[k]

    est = kappa_estimate(seg_factor, K)
    kappa = est.value
    r_seg = min(m for (m, v, _st) in est.per_start if v == kappa)

    pats_by_end: dict = {}
    p = pattern_of(seg_prods[r_seg + 1])
    pats_by_end[r_seg + 1] = p
    for k in range(r_seg + 2, K + 1):
        p = p.mul(pattern_of(seg_prods[k]))
        pats_by_end[k] = p
    window = K - r_seg
    thr = max(2, -(-window // 4))
    counts: dict[tuple[int, ...], list[int]] = {}
    for k in range(r_seg + 1, K + 1):
        q = pats_by_end[k]
        if q.H() == kappa:
            counts.setdefault(q.cols, []).append(k)
    recurring = [ks for ks in counts.values() if len(ks) >= thr]
    if recurring:
        r0_seg = min(min(ks) for ks in recurring)
        stabilized = est.stabilized
    elif counts:
        r0_seg = max(counts.values(), key=len)[0]
        stabilized = False
    else:
        raise ValueError(f"no segment time attains H = kappa = {kappa}; extend the horizon")

    cuts = _lemma2_cuts(pats_by_end, lambda k: pattern_of(seg_prods[k]), r_seg, r0_seg, kappa, K)
    if len(cuts) < 2:
        raise ValueError("horizon too small: no second segment cut found")
    t0, t1 = s[cuts[0]], s[cuts[1]]

    kappa_star = pattern_of(_scaled_product(factor, t0, t1)).H_star()

    # sampled chain of P_{t0, n}
    first = factor(t0 + 1)
    p_run = scaled_identity(first.d, "float")
    samples: dict[int, SampleRecord] = {}
    part_last = None
    d = first.d
    for n in range(t0 + 1, horizon + 1):
        p_run = scaled_multiply(p_run, factor(n).to_float())
        if n <= t1 or ((n - t1) % sample_stride and n != horizon):
            continue
        part = partition(p_run.mat)
        part_last = part
        norms = [vec_norm_l1(p_run.mat.column(j)) for j in range(d)]
        units = tuple(
            tuple(x / norms[j] for x in p_run.mat.column(j)) if norms[j] > 0 else None
            for j in range(d)
        )
        classes = tuple(
            tuple(sorted(cols))
            for h, cols in enumerate(part.J_h)
            if part.I_h[h]  # nonnull classes only
        )
        row_supports = tuple(
            frozenset(part.I_h[h]) for h in range(len(part.J_h)) if part.I_h[h]
        )
        samples[n] = SampleRecord(tuple(norms), units, classes, row_supports)

    if not samples:
        raise ValueError("no sample times past t1; extend the horizon")
    sample_ns = sorted(samples)
    last = samples[sample_ns[-1]]

    # burn-in: first sample from which the structural data (class count and
    # row supports) is constant
    burn_in = sample_ns[-1]
    for i in range(len(sample_ns) - 1, -1, -1):
        if samples[sample_ns[i]].row_supports == last.row_supports:
            burn_in = sample_ns[i]
        else:
            break

    # class limit vectors from the last sample (mean of in-class unit columns);
    # row supports from the last sampled partition (threshold-consistent)
    V_h = []
    I_h = []
    for h, cols in enumerate(last.classes[: max(kappa_star, 1)]):
        acc = [0.0] * d
        for j in cols:
            u = last.unit_cols[j]
            for i in range(d):
                acc[i] += u[i]
        norm = sum(abs(x) for x in acc)
        V_h.append(tuple(x / norm for x in acc))
        I_h.append(frozenset(part_last.I_h[h]))

    # measured certificate: delta(n) + 2 d R(n), reverse running max
    eps_raw: dict[int, float] = {}
    for n in sample_ns:
        rec = samples[n]
        if rec.row_supports != last.row_supports:
            continue
        delta = 0.0
        for h, cols in enumerate(rec.classes[: len(V_h)]):
            for j in cols:
                u = rec.unit_cols[j]
                delta = max(delta, sum(abs(a - b) for a, b in zip(u, V_h[h])))
        R = 0.0
        for h in range(len(V_h)):
            low_max = 0.0
            for l in range(h + 1, len(rec.classes)):
                for j in rec.classes[l]:
                    low_max = max(low_max, rec.col_norms[j])
            if rec.classes[h]:
                hi_min = min(rec.col_norms[j] for j in rec.classes[h])
                if hi_min > 0:
                    R = max(R, low_max / hi_min)
        eps_raw[n] = delta + 2.0 * d * R
    eps_n: dict[int, float] = {}
    running = 0.0
    for n in sorted(eps_raw, reverse=True):
        running = max(running, eps_raw[n])
        eps_n[n] = running
    eps_n = dict(sorted(eps_n.items()))

    violations = []
    if kappa_star not in (kappa - 1, kappa):
        violations.append(f"kappa_star = {kappa_star} outside {{kappa-1, kappa}} = {{{kappa-1}, {kappa}}}")
    for h in range(1, len(I_h)):
        if not I_h[h] < I_h[h - 1]:
            violations.append(f"row supports not strictly nested at classes {h-1},{h}")
    for h, v in enumerate(V_h):
        sup = frozenset(i for i in range(d) if v[i] > d * 1e-13)
        if sup != I_h[h]:
            violations.append(f"support of V_{h+1} != I_{h+1}")
    if cc.holds and violations:
        # under a passing condition check these are real failures, surface them
        raise ValueError("limit-report invariants failed: " + "; ".join(violations))

    return LimitReport(
        kappa=kappa,
        kappa_star=kappa_star,
        r_seg=r_seg,
        r0_seg=r0_seg,
        t0=t0,
        t1=t1,
        segmentation=s,
        horizon=horizon,
        I_h=tuple(I_h),
        V_h=tuple(V_h),
        burn_in=burn_in,
        eps_n=eps_n,
        eps_raw=eps_raw,
        samples=samples,
        condition_c=cc,
        invariant_violations=tuple(violations),
        stabilized=stabilized,
    )


def h_of_V(report: LimitReport, V: Sequence, n: int) -> int:
    """Smallest class index (0-based) whose columns meet the support of V at time n,
    with the measured-certificate inequality asserted on the stored sample.

    Errors: V hitting only null columns (P_n V = 0) or an unsampled n raise
    ValueError.
    """
    if n not in report.samples:
        raise ValueError(f"time {n} was not sampled")
    rec = report.samples[n]
    norm = vec_norm_l1(V)
    if norm == 0:
        raise ValueError("V must be nonzero")
    v = [float(x) / float(norm) for x in V]
    if any(x < 0 for x in v):
        raise ValueError("V must be nonnegative")
    supp = {j for j, x in enumerate(v) if x != 0}
    h_hit = None
    for h, cols in enumerate(rec.classes):
        if supp & set(cols):
            h_hit = h
            break
    if h_hit is None:
        raise ValueError("P_n V = 0: the support of V meets only null columns")
    if h_hit < len(report.V_h) and n in report.eps_n:
        # reconstruct P_n V / ||P_n V|| from stored unit columns
        num = [0.0] * len(v)
        tot = 0.0
        for j in supp:
            w = v[j] * rec.col_norms[j]
            if w == 0:
                continue
            tot += w
            for i in range(len(v)):
                num[i] += w * rec.unit_cols[j][i]
        defect = sum(abs(num[i] / tot - report.V_h[h_hit][i]) for i in range(len(v)))
        min_hit = min(v[j] for j in supp & set(rec.classes[h_hit]))
        bound = report.eps_n[n] / min_hit
        if defect > bound + 1e-9:
            raise RuntimeError(
                f"certificate violated at n={n}: defect {defect} > eps_n/min = {bound}"
            )
    return h_hit


def ratio_decay(report: LimitReport, h: int, hp: int):
    """Worst cross-class column-norm ratio series with its geometric envelope.

    Returns a list of (n, ratio, envelope) for sampled n with both classes
    present; empty when the report has fewer than max(h, hp)+1 classes.  The
    envelope ``lambda^(k - r0) * Lambda / (1 - lambda)`` uses the measured
    condition bounds and the segment index k(n); it is None when the measured
    lambda bound is >= 1 (condition failed: no certified envelope).
    """
    if h >= hp:
        raise ValueError("need h < hp (faster class first)")
    cc = report.condition_c
    lam, Lam = cc.lambda_bound, cc.Lambda_bound
    seg = report.segmentation
    out = []
    for n, rec in sorted(report.samples.items()):
        if hp >= len(rec.classes) or h >= len(rec.classes):
            continue
        hi = min(rec.col_norms[j] for j in rec.classes[h])
        lo = max(rec.col_norms[j] for j in rec.classes[hp])
        if hi <= 0:
            continue
        ratio = lo / hi
        env = None
        if lam < 1.0:
            k = _segment_index(seg, n)
            env = (lam ** max(k - report.r0_seg, 0)) * Lam / (1.0 - lam)
        out.append((n, ratio, env))
    return out


def _segment_index(seg: tuple[int, ...], n: int) -> int:
    """k with n in [s_k, s_{k+1}); clamps to the last segment."""
    for k in range(len(seg) - 1):
        if seg[k] <= n < seg[k + 1]:
            return k
    return len(seg) - 1


# ---------------------------------------------------------------------------
# rank-one factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Rank1Factorization:
    C: tuple[float, ...]
    L_n: dict  # n -> tuple of column weights (zero off the leading class)
    defects: dict  # n -> || P_n/||P_n|| - C L_n^T ||_1
    decreasing: bool


def rank1_factorization(seq, horizon: int, sample_stride: int = 1) -> Rank1Factorization:
    """Leading-class rank-one factorization P_n/||P_n|| ~ C * L_n^T.

    C is the leading-class limit direction (unit L1); L_n(j) = ||P_n U_j|| / ||P_n||
    on the leading class, 0 elsewhere.  The defect series must decrease when the
    single-direction collapse holds; ``decreasing`` reports whether it did.
    """
    factor = _as_factor(seq)
    first = factor(1)
    d = first.d
    p = scaled_identity(d, "float")
    snaps = {}
    for n in range(1, horizon + 1):
        p = scaled_multiply(p, factor(n).to_float())
        if p.annihilated:
            raise ValueError(f"product annihilated at step {n}")
        if n % sample_stride == 0 or n == horizon:
            snaps[n] = p.mat
    # leading class and C from the last snapshot
    last = snaps[max(snaps)]
    part = partition(last)
    lead = sorted(part.J_h[0])
    acc = [0.0] * d
    for j in lead:
        col = last.column(j)
        nn = vec_norm_l1(col)
        for i in range(d):
            acc[i] += col[i] / nn
    cn = sum(acc)
    C = tuple(x / cn for x in acc)

    L_n = {}
    defects = {}
    for n, mat in snaps.items():
        total = sum(vec_norm_l1(mat.column(j)) for j in range(d))
        part_n = partition(mat)
        lead_n = set(part_n.J_h[0])
        L = tuple(
            (vec_norm_l1(mat.column(j)) / total) if j in lead_n else 0.0 for j in range(d)
        )
        defect = 0.0
        for i in range(d):
            for j in range(d):
                defect += abs(mat.rows[i][j] / total - C[i] * L[j])
        L_n[n] = L
        defects[n] = defect
    ns = sorted(defects)
    tail = ns[len(ns) // 2 :]
    decreasing = all(defects[b] <= defects[a] + 1e-12 for a, b in zip(tail, tail[1:]))
    return Rank1Factorization(C, L_n, defects, decreasing)


# ---------------------------------------------------------------------------
# positive chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PositiveChainResult:
    direction: tuple[float, ...]
    tau_product: float  # prod of per-factor Birkhoff ratios
    tau_Lambda_product: float  # prod (1 - 1/Lambda(A_k)), an upper bound for the above
    sum_inv_Lambda: float
    oscillation: float  # max tail distance of sampled directions from the final one


def positive_chain_limit(seq, horizon: int, V: Sequence | None = None) -> PositiveChainResult:
    """Direction limit for a chain of positive factors with its contraction
    certificates.  Errors if any window factor is not positive."""
    factor = _as_factor(seq)
    first = factor(1)
    d = first.d
    v = tuple(V) if V is not None else tuple(1.0 for _ in range(d))
    p = scaled_identity(d, "float")
    tau_prod = 1.0
    tauL_prod = 1.0
    inv_sum = 0.0
    dirs = {}
    for n in range(1, horizon + 1):
        a = factor(n)
        if not a.is_positive():
            raise ValueError(f"factor {n} is not positive")
        tau_prod *= birkhoff_tau(a)
        L = float(coef_Lambda(a))
        tauL_prod *= 1.0 - 1.0 / L if L > 1 else 0.0
        inv_sum += 1.0 / L
        p = scaled_multiply(p, a.to_float())
        if n >= horizon // 2:
            w = p.mat.matvec(v)
            nn = vec_norm_l1(w)
            dirs[n] = tuple(x / nn for x in w)
    final = dirs[horizon]
    osc = max(
        sum(abs(a - b) for a, b in zip(dir_n, final)) for dir_n in dirs.values()
    )
    return PositiveChainResult(final, tau_prod, tauL_prod, inv_sum, osc)


def hilbert_distance(x: Sequence[float], y: Sequence[float]) -> float:
    """Hilbert projective distance between positive vectors."""
    if any(a <= 0 for a in x) or any(b <= 0 for b in y):
        raise ValueError("hilbert_distance requires positive vectors")
    ratios = [a / b for a, b in zip(x, y)]
    return math.log(max(ratios) / min(ratios))


# ---------------------------------------------------------------------------
# divergence criteria
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DivergenceReport:
    factor_values: tuple  # distinct tail factor values (exact when possible)
    common_left_eigenvector: tuple | None
    has_common_left_eigenvector: bool | None  # None = undetermined
    oscillation_inf: float
    product_limit_points: tuple  # cluster representatives of P'_n on the tail
    diverged_hint: bool


def divergence_criteria(seq, horizon: int, cluster_tol: float = 1e-6) -> DivergenceReport:
    """Divergence evidence for P'_n = P_n / ||P_n||.

    A convergent P'_n forces every row of the limit to be a left eigenvector,
    with one eigenvalue per factor value, of every matrix the tail factors
    keep taking; so distinct tail factor values with *no* common left
    eigenvector are an obstruction to convergence.  The check is exact for
    rational factor values with rational eigenvalues; otherwise numeric
    (Durand-Kerner roots + smallest-singular-direction), and None when even
    that is inconclusive.  The oscillation statistic
    ``inf over tail pairs of ||P'_n - P'_m||`` is a direct nonconvergence
    witness when bounded away from zero.
    """
    factor = _as_factor(seq)
    first = factor(1)
    d = first.d
    p = scaled_identity(d, "float")
    tail_start = max(1, (3 * horizon) // 4)
    tail_mats = []
    tail_factors = []
    for n in range(1, horizon + 1):
        a = factor(n)
        p = scaled_multiply(p, a.to_float())
        if n >= tail_start:
            tail_mats.append(p.mat)
            tail_factors.append(a)
    # oscillation statistic over sampled tail pairs
    step = max(1, len(tail_mats) // 40)
    sampled = tail_mats[::step]
    osc = min(
        (
            sum(abs(x - y) for rx, ry in zip(m1.rows, m2.rows) for x, y in zip(rx, ry))
            for i, m1 in enumerate(sampled)
            for m2 in sampled[i + 1 :]
        ),
        default=0.0,
    )
    # distinct tail factor values
    values = []
    for a in tail_factors:
        if not any(_mat_close(a, b) for b in values):
            values.append(a)
    # cluster representatives of P'_n
    reps = []
    for m in sampled:
        if not any(
            sum(abs(x - y) for rx, ry in zip(m.rows, r.rows) for x, y in zip(rx, ry)) <= cluster_tol
            for r in reps
        ):
            reps.append(m)

    vec, known = _common_left_eigenvector(values)
    diverged = (known is False) or osc > cluster_tol
    return DivergenceReport(
        tuple(values), vec, known, osc, tuple(reps), diverged
    )


def _mat_close(a: Mat, b: Mat, tol: float = 0.0) -> bool:
    if a.backend == "exact" and b.backend == "exact":
        return a.rows == b.rows
    return all(
        abs(complex(x) - complex(y)) <= tol + 1e-12 for rx, ry in zip(a.rows, b.rows) for x, y in zip(rx, ry)
    )


def _common_left_eigenvector(values: Sequence[Mat]):
    """(vector, True) when a common left eigenvector is found, (None, False)
    when provably/numerically absent, (None, None) when undetermined."""
    if not values:
        return None, None
    a0 = values[0]
    if all(v.backend == "exact" for v in values):
        cands = _rational_left_eigenvectors(a0)
        for v in cands:
            if all(_is_left_eigenvector_exact(v, m) for m in values[1:]):
                return tuple(v), True
        # rational search is complete only if a0's spectrum is entirely rational
        if len(cands) == a0.d or _char_poly_splits_rationally(a0):
            if cands:
                return None, False
        # fall through to numeric
    vec, known = _numeric_common_left_eigenvector(values)
    return vec, known


def _char_poly_exact(m: Mat) -> list[Fraction]:
    """Coefficients of det(xI - M), highest degree first, by exact interpolation."""
    d = m.d
    xs = [Fraction(t) for t in range(d + 1)]
    ys = []
    for x in xs:
        rows = [[(x if i == j else Fraction(0)) - Fraction(m.rows[i][j]) for j in range(d)] for i in range(d)]
        ys.append(_det_fraction(rows))
    # Lagrange interpolation to monomial coefficients
    coeffs = [Fraction(0)] * (d + 1)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = _poly_mul(basis, [Fraction(1), -xj])
            denom *= xi - xj
        w = yi / denom
        for k, c in enumerate(basis):
            coeffs[k + (d + 1 - len(basis))] += w * c
    return coeffs


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _det_fraction(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    rows = [row[:] for row in rows]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        det *= rows[c][c]
        inv = 1 / rows[c][c]
        for r in range(c + 1, n):
            f = rows[r][c] * inv
            if f:
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return det


def _rational_roots(coeffs: list[Fraction]) -> list[Fraction]:
    """All rational roots of the polynomial (highest degree first)."""
    from math import gcd

    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]
    while ints and ints[-1] == 0:
        ints = ints[:-1]  # factor out x = 0 roots; remember them
    zero_root = len(ints) < len(coeffs)
    if not ints:
        return [Fraction(0)]
    lead, const = ints[0], ints[-1]

    def divisors(n: int) -> list[int]:
        n = abs(n)
        out = []
        i = 1
        while i * i <= n:
            if n % i == 0:
                out += [i, n // i]
            i += 1
        return sorted(set(out))

    roots = set()
    if zero_root:
        roots.add(Fraction(0))
    for p in divisors(const) or [0]:
        for q in divisors(lead):
            for sign in (1, -1):
                cand = Fraction(sign * p, q)
                val = Fraction(0)
                for c in coeffs:
                    val = val * cand + c
                if val == 0:
                    roots.add(cand)
    return sorted(roots)


def _char_poly_splits_rationally(m: Mat) -> bool:
    coeffs = _char_poly_exact(m)
    roots = _rational_roots(coeffs)
    # deflate and check degree consumed
    poly = coeffs[:]
    count = 0
    for r in roots:
        while True:
            val = Fraction(0)
            for c in poly:
                val = val * r + c
            if val != 0 or len(poly) <= 1:
                break
            # synthetic division
            out = [poly[0]]
            for c in poly[1:-1]:
                out.append(out[-1] * r + c)
            poly = out
            count += 1
    return count == m.d


def _rational_left_eigenvectors(m: Mat) -> list[tuple]:
    """One kernel basis vector per rational eigenvalue of M^T (dim-1 kernels
    give the eigenvector; higher-dim kernels contribute each basis vector)."""
    coeffs = _char_poly_exact(m)
    out = []
    for mu in _rational_roots(coeffs):
        rows = [
            [Fraction(m.rows[i][j]) - (mu if i == j else 0) for i in range(m.d)]
            for j in range(m.d)
        ]  # (M^T - mu I)
        for v in _kernel_fraction(rows):
            out.append(v)
    return out


def _kernel_fraction(rows: list[list[Fraction]]) -> list[tuple]:
    n = len(rows)
    a = [row[:] for row in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(n):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][fc]
        basis.append(tuple(v))
    return basis


def _is_left_eigenvector_exact(v: tuple, m: Mat) -> bool:
    w = [sum(Fraction(v[i]) * Fraction(m.rows[i][j]) for i in range(m.d)) for j in range(m.d)]
    # w must be proportional to v
    mu = None
    for wi, vi in zip(w, v):
        if vi != 0:
            mu = wi / vi
            break
    if mu is None:
        return False
    return all(wi == mu * vi for wi, vi in zip(w, v))


def _durand_kerner(coeffs: list[complex], iters: int = 200) -> list[complex]:
    """All roots of a monic-normalizable polynomial, deterministic starts."""
    lead = coeffs[0]
    cs = [c / lead for c in coeffs]
    n = len(cs) - 1
    if n == 0:
        return []
    roots = [(0.4 + 0.9j) ** k for k in range(n)]
    for _ in range(iters):
        moved = 0.0
        new = []
        for i, r in enumerate(roots):
            num = _poly_eval(cs, r)
            den = 1.0 + 0.0j
            for j, rj in enumerate(roots):
                if j != i:
                    den *= r - rj
            delta = num / den if den != 0 else 0.0
            new.append(r - delta)
            moved = max(moved, abs(delta))
        roots = new
        if moved < 1e-14:
            break
    return roots


def _poly_eval(coeffs, x):
    v = 0.0 + 0.0j if isinstance(x, complex) else 0.0
    for c in coeffs:
        v = v * x + c
    return v


def _numeric_common_left_eigenvector(values: Sequence[Mat]):
    a0 = values[0].to_float()
    d = a0.d
    # char poly coefficients numerically via exact path when possible, else interpolation on floats
    try:
        coeffs = [complex(float(c)) for c in _char_poly_exact(values[0])] if values[0].backend == "exact" else None
    except Exception:
        coeffs = None
    if coeffs is None:
        coeffs = _char_poly_float(a0)
    roots = _durand_kerner(coeffs)
    for mu in roots:
        shifted = Mat(
            tuple(
                tuple(complex(a0.rows[i][j]) - (mu if i == j else 0) for i in range(d))
                for j in range(d)
            ),
            "float",
        )  # (A0^T - mu I)
        spec = svd_small(shifted)
        if spec.values[-1] > 1e-8 * max(spec.values[0], 1.0):
            continue
        v = spec.right[-1]
        ok = True
        for m in values[1:]:
            mf = m.to_float()
            w = [sum(v[i] * complex(mf.rows[i][j]) for i in range(d)) for j in range(d)]
            # proportionality check
            k = max(range(d), key=lambda i: abs(v[i]))
            mu2 = w[k] / v[k]
            if any(abs(w[i] - mu2 * v[i]) > 1e-7 * max(1.0, abs(mu2)) for i in range(d)):
                ok = False
                break
        if ok:
            return tuple(v), True
    return None, False


def _char_poly_float(m: Mat) -> list[complex]:
    d = m.d
    xs = [complex(t) for t in range(d + 1)]
    ys = []
    for x in xs:
        rows = [
            [(x if i == j else 0.0) - complex(m.rows[i][j]) for j in range(d)]
            for i in range(d)
        ]
        ys.append(_det_complex(rows))
    coeffs = [0.0 + 0.0j] * (d + 1)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = [1.0 + 0.0j]
        denom = 1.0 + 0.0j
        for j, xj in enumerate(xs):
            if j == i:
                continue
            new = [0.0 + 0.0j] * (len(basis) + 1)
            for k, b in enumerate(basis):
                new[k] += b
                new[k + 1] += -xj * b
            basis = new
            denom *= xi - xj
        w = yi / denom
        off = (d + 1) - len(basis)
        for k, b in enumerate(basis):
            coeffs[k + off] += w * b
    return coeffs


def _det_complex(rows: list[list[complex]]) -> complex:
    n = len(rows)
    a = [row[:] for row in rows]
    det = 1.0 + 0.0j
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(a[r][c]))
        if abs(a[piv][c]) == 0:
            return 0.0 + 0.0j
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f != 0:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det
