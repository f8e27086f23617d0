"""End-to-end acceptance checks, one test per shipped guarantee.

Run with ``pytest tests/test_acceptance.py -v`` to get a single pass/fail
line per criterion.  The whole module stays within a few minutes; the
dominant cost is the exhaustive word-decomposition sweep in criterion 6.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest

from matprod.bernoulli import (
    ACTS,
    beta3_system,
    cone_flags,
    cylinder_measure,
    decompose_word,
    template,
    weak_gibbs_ratio,
)
from matprod.coefficients import Lambda, lambda_coef, product_bounds
from matprod.core_linalg import Mat
from matprod.experiments import (
    bistochastic_chain,
    divergence_3x3,
    random_divergence_trial,
    triangular_2x2,
)
from matprod.limit_engine import estimate_limits, h_of_V, ratio_decay
from matprod.multifractal import (
    SpectrumEstimate,
    default_q_grid,
    generation_cells,
    legendre,
    partition_sum,
    tau_scale_estimate,
)
from matprod.support_algebra import bool_mul, pattern_of, periodic, satisfies_E
from matprod.triangularization import (
    TriangularizationError,
    triangular_form,
    verify_diag_blocks_nonnull,
)
from matprod.systems import bernoulli_generator_word

from test_bernoulli import N0_OVERRIDES, TEMPLATE_TABLES, mstar_of
from test_triangularization import _nested_support_factory, assert_form_invariants


def _random_nonneg(rng: random.Random, d: int, density: float = 0.6) -> Mat:
    return Mat.exact(
        [
            [
                Fraction(rng.randrange(1, 10), rng.randrange(1, 6))
                if rng.random() < density
                else 0
                for _ in range(d)
            ]
            for _ in range(d)
        ]
    )


def test_criterion_01_support_oracle_equivalence():
    """Boolean support products agree with numeric-product supports,
    500 random exact pairs, d <= 6, zero tolerance."""
    rng = random.Random(101)
    for _ in range(500):
        d = rng.randrange(2, 7)
        a = _random_nonneg(rng, d)
        b = _random_nonneg(rng, d)
        assert pattern_of(a @ b) == bool_mul(pattern_of(a), pattern_of(b))


def test_criterion_02_coefficient_inequalities_and_certificates():
    """Lambda/lambda submultiplicative inequalities on 1000 exact pairs;
    per-word certificates dominate the direct coefficients on 500 words."""
    rng = random.Random(102)
    checked = 0
    while checked < 1000:
        d = rng.randrange(2, 6)
        a = _random_nonneg(rng, d)
        b = _random_nonneg(rng, d)
        ab = a @ b
        if ab.is_zero():
            continue
        assert Lambda(ab) <= Lambda(a) + lambda_coef(a) * Lambda(b)
        assert lambda_coef(ab) <= lambda_coef(a) * lambda_coef(b)
        checked += 1

    words = 0
    while words < 500:
        d = rng.randrange(2, 5)
        n = rng.randrange(1, 21)
        word = [_random_nonneg(rng, d, density=0.8) for _ in range(n)]
        prod = word[0]
        for w in word[1:]:
            prod = prod @ w
        if prod.is_zero():
            continue
        cert = product_bounds([(Lambda(w), lambda_coef(w)) for w in word])
        assert Lambda(prod) <= cert.Lambda
        assert lambda_coef(prod) <= cert.lambda_
        words += 1


def test_criterion_03_triangular_form_structure():
    """Fifty random nested-support sequences plus the built-in system all
    yield forms passing the four structural invariants; diagonal blocks stay
    nonnull whenever every factor has nested column supports."""
    rng = random.Random(103)
    done = attempts = 0
    while done < 50 and attempts < 300:
        attempts += 1
        d = rng.randrange(2, 6)
        draw = _nested_support_factory(rng, d)
        letters = [draw() for _ in range(rng.randrange(1, 4))]
        factor = periodic(letters)
        try:
            form = triangular_form(factor, 150)
        except TriangularizationError:
            continue
        if not form.stabilized:
            continue
        assert_form_invariants(form, factor)
        if all(satisfies_E(m) for m in letters):
            assert verify_diag_blocks_nonnull(form, factor, 150)
        done += 1
    assert done == 50

    system = beta3_system()
    floats = [m.to_float() for m in system.M]
    stream = bernoulli_generator_word(400)
    factor = lambda n: floats[stream[n - 1]]
    form = triangular_form(factor, 400)
    assert form.stabilized
    assert form.kappa == 2
    assert_form_invariants(form, factor)


def test_criterion_04_two_by_two_and_three_by_three_closed_forms():
    """Triangular 2x2 scenario limits and the 3x3 divergence ratios match
    their closed forms (exact where exact, 1e-6/1e-5 where asymptotic)."""
    ones = triangular_2x2(lambda k: 1, lambda k: 1, lambda k: 1, (1, 1), 1000)
    assert ones.limit is not None
    assert abs(ones.limit[0] - 0) <= Fraction(1, 10**6)
    assert abs(ones.limit[1] - 1) <= Fraction(1, 10**6)

    geo = triangular_2x2(lambda k: 2, lambda k: 1, lambda k: 1, (1, 1), 1000)
    assert geo.limit is not None
    assert abs(geo.limit[0] - Fraction(1, 2)) <= Fraction(1, 10**6)
    assert abs(geo.limit[1] - Fraction(1, 2)) <= Fraction(1, 10**6)

    for k in range(1, 13):
        res = divergence_3x3(k)
        assert res.ratio_first == Fraction(1, 2)
        expected = Fraction(4 ** (k + 1) - 1, 3) / (2 * Fraction(4**k - 1, 3))
        assert res.ratio_second == expected
    assert abs(float(divergence_3x3(10).ratio_second) - 2.0) <= 1e-5


def test_criterion_05_measure_exactness():
    """Row/column fixed-point identities, exact cylinder-sum normalization
    through generation 12, and the closed-form single-letter measures."""
    system = beta3_system()
    d = system.d
    msum = [
        [sum(system.M[i].rows[r][c] for i in range(3)) for c in range(d)]
        for r in range(d)
    ]
    mc = [sum(msum[r][c] * system.C[c] for c in range(d)) for r in range(d)]
    assert tuple(mc) == system.C
    rsum = [sum(system.R[i][j] for i in range(3)) for j in range(d)]
    assert sum(rsum[j] * system.C[j] for j in range(d)) == 1

    for n in range(1, 13):
        assert partition_sum(1, n) == 1
    for n in range(1, 6):
        total = sum(
            cylinder_measure("".join(w)) for w in itertools.product("012", repeat=n)
        )
        assert total == 1

    assert cylinder_measure("0") == Fraction(3, 5)
    assert cylinder_measure("1") == Fraction(13, 40)
    assert cylinder_measure("2") == Fraction(3, 40)
    for n in range(1, 13):
        assert cylinder_measure("0" * n) == Fraction(3, 5) * Fraction(1, 2 ** (n - 1))


def test_criterion_06_word_machinery_exhaustive():
    """Greedy decomposition verified for every word of length <= 14; template
    products match their affine entry tables through n = 6; cone membership
    is stable under all three generators."""
    count = 0
    for length in range(1, 15):
        for tup in itertools.product("012", repeat=length):
            decompose_word("".join(tup), verify=True)
            count += 1
    assert count == 7_174_452

    for i, table in TEMPLATE_TABLES.items():
        for n in range(0, 7):
            got = mstar_of(template(n, i))
            for r in range(7):
                for c in range(7):
                    a, b = table[r][c]
                    expected = N0_OVERRIDES.get((i, r, c), a * n + b) if n == 0 else a * n + b
                    assert got.rows[r][c] == expected, (i, n, r, c)

    # exhaustive over the 0/1 support lattice: the third cone maps into the
    # union of itself and the main cone under every generator
    for bits in itertools.product((0, 1), repeat=7):
        flags = cone_flags(bits)
        if not flags.in_Cdoubleprime:
            continue
        for act in ACTS:
            image = cone_flags(act(bits))
            assert image.in_C or image.in_Cdoubleprime

    rng = random.Random(106)
    main_bases = ({0, 2, 3}, {0, 2, 4}, {0, 3, 4})
    prime_supports = (
        {0, 2, 3, 4},
        {0, 1, 2, 3, 4},
        {0, 1, 2, 4, 5},
        {0, 1, 2, 4, 5, 6},
    )
    for _ in range(1000):
        base = main_bases[rng.randrange(3)]
        x = tuple(
            rng.randrange(1, 10) if j in base else rng.randrange(0, 10)
            for j in range(7)
        )
        assert cone_flags(x).in_C
        for act in ACTS:
            assert cone_flags(act(x)).in_C

        support = prime_supports[rng.randrange(4)]
        y = tuple(rng.randrange(1, 10) if j in support else 0 for j in range(7))
        assert cone_flags(y).in_Cprime
        for act in ACTS:
            assert cone_flags(act(y)).in_Cprime


def test_criterion_07_direction_convergence_with_certificates():
    """For 20 seeded aperiodic letter streams the normalized product columns
    are Cauchy on [400, 800] to 1e-6, the measured in-class certificate holds
    at every sampled time, and cross-class ratio series stay under their
    geometric envelopes."""
    system = beta3_system()
    floats = [m.to_float().rows for m in system.M]
    c_vec = [float(x) for x in system.C]
    d = system.d
    segmentation = list(range(0, 801, 25))

    for seed in range(20):
        rng = random.Random(700 + seed)
        stream = [rng.randrange(3) for _ in range(800)]

        prod = [[1.0 if i == j else 0.0 for j in range(d)] for i in range(d)]
        directions = []
        for n, letter in enumerate(stream, start=1):
            step = floats[letter]
            prod = [
                [sum(prod[i][k] * step[k][j] for k in range(d)) for j in range(d)]
                for i in range(d)
            ]
            top = max(max(row) for row in prod)
            prod = [[x / top for x in row] for row in prod]
            if 400 <= n <= 800:
                v = [sum(prod[i][k] * c_vec[k] for k in range(d)) for i in range(d)]
                s = sum(v)
                directions.append([x / s for x in v])
        spread = sum(
            max(v[j] for v in directions) - min(v[j] for v in directions)
            for j in range(d)
        )
        assert spread <= 1e-6  # bounds the pairwise l1 sup on the window

        mats = [Mat(tuple(tuple(row) for row in floats[a]), "float") for a in range(3)]
        factor = lambda n: mats[stream[n - 1]]
        report = estimate_limits(factor, segmentation, 800, sample_stride=4)
        assert report.kappa_star in (1, 2)
        assert report.invariant_violations == ()
        for n in report.samples:
            h_of_V(report, system.C, n)  # raises if the certificate fails
        classes = len(report.samples[max(report.samples)].classes)
        for h in range(len(report.V_h)):
            for hp in range(h + 1, classes):
                for _n, ratio, envelope in ratio_decay(report, h, hp):
                    assert envelope is not None
                    assert ratio <= envelope


def test_criterion_08_weak_gibbs_defect():
    """Normalized log-ratio of cylinder measure to the Birkhoff exponential
    stays within 0.05 at n=1000 for all 20 seeds and shrinks from n=250 for
    at least 18 of them."""
    improved = 0
    for seed in range(20):
        rng = random.Random(800 + seed)
        word = "".join(str(rng.randrange(3)) for _ in range(1100))
        defect_250 = abs(math.log(weak_gibbs_ratio(word, 250, 40)))
        defect_1000 = abs(math.log(weak_gibbs_ratio(word, 1000, 40)))
        assert defect_1000 <= 0.05
        if defect_1000 < defect_250:
            improved += 1
    assert improved >= 18


def test_criterion_09_divergence_counterexamples():
    """Bistochastic chain: exact early values and step lower bound on
    10 <= n <= 200; random ensembles: positive products collapse to rank one
    while complex-Gaussian directions keep moving in >= 95/100 trials."""
    assert bistochastic_chain(2)[0] == Fraction(3, 4)
    assert bistochastic_chain(3)[0] == Fraction(11, 36)

    s_values = {n: bistochastic_chain(n)[0] for n in range(10, 202)}
    for n in range(10, 201):
        assert abs(s_values[n + 1] - s_values[n]) >= Fraction(5, 100)

    for trial in range(100):
        rec = random_divergence_trial("uniform-positive", 100, 900 + trial)
        assert rec.rank1_gap <= 1e-6

    persisting = sum(
        random_divergence_trial("gaussian-complex", 200, 900 + trial).max_successive_last50
        >= 0.01
        for trial in range(100)
    )
    assert persisting >= 95


def test_criterion_10_spectrum_properties():
    """tau(1) = 0 exactly at every generation, concavity and the box-counting
    value at generation 12, and an exact synthetic Legendre conjugate."""
    for n in range(2, 13):
        est = tau_scale_estimate((0.0, 1.0, 2.0), n=n)
        assert est.tau_values[1] == 0.0

    est12 = tau_scale_estimate(n=12)
    qs = list(est12.q_grid)
    taus = list(est12.tau_values)
    for k in range(1, len(qs) - 1):
        second = (taus[k + 1] - taus[k]) / (qs[k + 1] - qs[k]) - (
            taus[k] - taus[k - 1]
        ) / (qs[k] - qs[k - 1])
        assert second <= 1e-9
    tau0 = taus[qs.index(0.0)]
    assert -1.05 <= tau0 <= -0.95

    grid = default_q_grid()
    parabola = tuple(0.5 * (q - q * q) for q in grid)
    synthetic = SpectrumEstimate(grid, parabola, parabola, 2, 9, 0.1, 0.5)
    for qstar in (-4.0, -2.0, 0.0, 2.0, 4.0):
        alpha = 0.5 - qstar
        (point,) = legendre(synthetic, alpha_grid=(alpha,))
        assert abs(point.f - (-(qstar**2) / 2)) <= 1e-9
