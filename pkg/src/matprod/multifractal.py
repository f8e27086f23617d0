"""L^q spectrum of the represented measure on generation-n basic intervals.

Generation-n cells are the 3^n words w; the cell measure nu([w]) is exact
(integer / (20 * 2^(c-1)) with c the total contraction weight of w, letter
weights 1, 2, 4), and the cell length is beta^-c.  Because the three
contraction ratios differ, a single-scale quotient log(sum) / log(mean r)
systematically overestimates |tau| (it scores roughly -1.18 at q = 0 where
the box dimension of the full-interval support forces -1).  The spectrum
reported here is therefore the standard implicit (Moran-type) estimator:

    tau(q)  =  the unique t  with  sum_w nu(w)^q * |I_w|^(-t)  =  1,

which is exact at q = 1 (tau = 0), hits t = -1 at q = 0 whenever every cell
carries positive measure (sum of |I_w| telescopes to 1), and is concave in q.
The single-scale quotient is retained per estimate as ``tau_ratio_values``
for comparison.

Cells are grouped by (weight, integer value): generation 12 collapses from
531441 cells to ~16k groups, which makes the 41-point default q-grid cheap.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral

from .bernoulli import C20, ROW_ACTS, ROW_PICKS, beta_root

__all__ = [
    "SpectrumEstimate",
    "LegendrePoint",
    "partition_sum",
    "tau_scale_estimate",
    "legendre",
    "default_q_grid",
    "generation_cells",
]

_WEIGHTS = (1, 2, 4)
_LOG2 = math.log(2.0)
_LOG20 = math.log(20.0)
_CELL_CACHE: dict[int, tuple[tuple[int, int, int], ...]] = {}


def generation_cells(n: int) -> tuple[tuple[int, int, int], ...]:
    """Distinct (weight c, integer value v, multiplicity) triples over the 3^n
    generation-n cells; nu = v / (20 * 2^(c-1)), length = beta^-c.

    Zero-measure subtrees are pruned (a cell has measure zero exactly when
    its row chain vanishes, and then so do all its refinements).
    """
    if not (1 <= n <= 16):
        raise ValueError("generation must lie in 1..16")
    if n in _CELL_CACHE:
        return _CELL_CACHE[n]
    cnt: Counter = Counter()

    def rec(r, c, depth):
        if depth == n:
            v = sum(x * y for x, y in zip(r, C20))
            if v:
                cnt[(c, v)] += 1
            return
        for a in range(3):
            r2 = ROW_ACTS[a](r)
            if any(r2):
                rec(r2, c + _WEIGHTS[a], depth + 1)

    for a in range(3):
        rec(tuple(1 if j == ROW_PICKS[a] else 0 for j in range(7)), _WEIGHTS[a], 1)
    cells = tuple((c, v, m) for (c, v), m in sorted(cnt.items()))
    _CELL_CACHE[n] = cells
    return cells


def partition_sum(q, n: int):
    """Sum over generation-n basic intervals of nu(w)^q; zero-measure cells
    are excluded for q <= 0 (0^q is not defined there; for q > 0 they
    contribute 0 anyway).

    Integral q >= 0 gives an exact Fraction; other q a float.  (Exact
    negative powers would need a common denominator over tens of thousands
    of distinct integers — deliberately not offered.)
    """
    cells = generation_cells(n)
    if isinstance(q, Integral) or (isinstance(q, Fraction) and q.denominator == 1):
        qi = int(q)
        if qi >= 0:
            total = Fraction(0)
            for c, v, m in cells:
                total += m * Fraction(v**qi, (20 * 2 ** (c - 1)) ** qi)
            return total
    qf = float(q)
    total = 0.0
    for c, v, m in cells:
        log_nu = _int_log(v) - _LOG20 - (c - 1) * _LOG2
        total += m * math.exp(qf * log_nu)
    return total


def _int_log(v: int) -> float:
    s = max(v.bit_length() - 52, 0)
    return math.log(v >> s if s else v) + s * _LOG2


def default_q_grid() -> tuple[float, ...]:
    return tuple(-5.0 + 0.25 * i for i in range(41))


@dataclass(frozen=True)
class SpectrumEstimate:
    q_grid: tuple[float, ...]
    tau_values: tuple[float, ...]
    tau_ratio_values: tuple[float, ...]
    generation: int
    interval_count: int
    length_min: float
    length_max: float

    def __post_init__(self):
        for q, t in zip(self.q_grid, self.tau_values):
            if q == 1.0:
                assert t == 0.0, "tau(1) must vanish exactly"
        d2_tol = 1e-9
        for i in range(1, len(self.q_grid) - 1):
            h1 = self.q_grid[i] - self.q_grid[i - 1]
            h2 = self.q_grid[i + 1] - self.q_grid[i]
            lhs = (self.tau_values[i + 1] - self.tau_values[i]) / h2
            rhs = (self.tau_values[i] - self.tau_values[i - 1]) / h1
            assert lhs <= rhs + d2_tol, f"tau not concave near q={self.q_grid[i]}"


def _solve_tau(cells, q: float, log_beta: float) -> float:
    """Root t of sum_w nu(w)^q beta^(t c_w) = 1, by bisection on the
    monotone-increasing log-sum."""
    buckets: dict[int, float] = {}
    for c, v, m in cells:
        log_nu = _int_log(v) - _LOG20 - (c - 1) * _LOG2
        term = q * log_nu + math.log(m)
        if c in buckets:
            hi = max(buckets[c], term)
            buckets[c] = hi + math.log1p(math.exp(min(buckets[c], term) - hi))
        else:
            buckets[c] = term

    items = sorted(buckets.items())

    def log_f(t: float) -> float:
        best = max(lg + t * c * log_beta for c, lg in items)
        return best + math.log(sum(math.exp(lg + t * c * log_beta - best) for c, lg in items))

    lo, hi = -64.0, 64.0
    assert log_f(lo) < 0.0 < log_f(hi), "root bracket failed"
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if log_f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


def tau_scale_estimate(q_grid=None, n: int = 12) -> SpectrumEstimate:
    """Spectrum estimate at generation n; tau(1) is returned as exact 0."""
    if n < 2:
        raise ValueError("generation must be >= 2")
    qs = tuple(float(q) for q in (q_grid if q_grid is not None else default_q_grid()))
    cells = generation_cells(n)
    beta = beta_root()
    log_beta = math.log(beta)

    # single-scale quotient (comparison only): log S(q) / log(mean length)
    log_r_mean = 0.0
    for c, v, m in cells:
        nu = math.exp(_int_log(v) - _LOG20 - (c - 1) * _LOG2)
        log_r_mean += m * nu * (-c * log_beta)

    taus = []
    ratios = []
    for q in qs:
        if q == 1.0:
            taus.append(0.0)
        else:
            taus.append(_solve_tau(cells, q, log_beta))
        s = partition_sum(q, n)
        log_s = (
            _int_log(s.numerator) - _int_log(s.denominator)
            if isinstance(s, Fraction)
            else math.log(s)
        )
        ratios.append(log_s / log_r_mean)
    count = 3**n
    return SpectrumEstimate(
        q_grid=qs,
        tau_values=tuple(taus),
        tau_ratio_values=tuple(ratios),
        generation=n,
        interval_count=count,
        length_min=beta ** (-4 * n),
        length_max=beta ** (-n),
    )


@dataclass(frozen=True)
class LegendrePoint:
    alpha: float
    f: float
    q_at_min: float
    edge: bool


def default_alpha_grid(estimate: SpectrumEstimate, points: int = 81) -> tuple[float, ...]:
    """Alpha range from the discrete slopes of tau, widened by 10% of the spread."""
    qs, ts = estimate.q_grid, estimate.tau_values
    slopes = [
        (ts[i + 1] - ts[i]) / (qs[i + 1] - qs[i]) for i in range(len(qs) - 1)
    ]
    lo, hi = min(slopes), max(slopes)
    pad = 0.1 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    return tuple(lo + (hi - lo) * i / (points - 1) for i in range(points))


def legendre(estimate: SpectrumEstimate, alpha_grid=None) -> tuple[LegendrePoint, ...]:
    """Pointwise inf over the q-grid of alpha*q - tau(q); points whose inf sits
    on the grid boundary (unbounded direction) or exceed 1 + 1e-6 carry the
    edge flag."""
    alphas = (
        tuple(float(a) for a in alpha_grid)
        if alpha_grid is not None
        else default_alpha_grid(estimate)
    )
    qs, ts = estimate.q_grid, estimate.tau_values
    out = []
    center = (len(qs) - 1) / 2
    for a in alphas:
        vals = [a * q - t for q, t in zip(qs, ts)]
        f = min(vals)
        # ties broken toward the grid interior: a flat objective is not an
        # unbounded direction and must not be flagged as one
        ties = [i for i, v in enumerate(vals) if v <= f + 1e-15 * max(1.0, abs(f))]
        idx = min(ties, key=lambda i: abs(i - center))
        edge = idx == 0 or idx == len(vals) - 1 or f > 1.0 + 1e-6
        assert f <= min(vals[0], vals[-1]) + 1e-12  # inf never exceeds the endpoints
        out.append(LegendrePoint(a, f, qs[idx], edge))
    return tuple(out)
