"""Tests for the worked-example chains and Monte-Carlo divergence demos."""

from fractions import Fraction

import pytest

from matprod.core_linalg import Mat
from matprod.experiments import (
    Divergence3x3Result,
    TrialRecord,
    TriangularResult,
    bistochastic_chain,
    bistochastic_step,
    div3x3_letter,
    divergence_3x3,
    random_divergence_trial,
    successive_direction_distances,
    triangular_2x2,
    triangular_factor,
)
from matprod.limit_engine import iterate_direction


# ---------------------------------------------------------------------------
# bistochastic chain
# ---------------------------------------------------------------------------


def test_bistochastic_exact_values():
    assert bistochastic_chain(1)[0] == 0
    assert bistochastic_chain(2)[0] == Fraction(3, 4)
    assert bistochastic_chain(3)[0] == Fraction(11, 36)
    assert bistochastic_chain(4)[0] == Fraction(193, 288)
    with pytest.raises(ValueError):
        bistochastic_chain(0)


def test_bistochastic_matrix_structure():
    for n in (1, 2, 3, 7, 15):
        s, det, p = bistochastic_chain(n)
        assert p.rows == ((1 - s, s), (s, 1 - s))
        # rows and columns sum to one; determinant matches the matrix
        assert all(sum(row) == 1 for row in p.rows)
        assert det == (1 - s) * (1 - s) - s * s == 1 - 2 * s


def test_bistochastic_determinant_recursion():
    # det P_k = det P_{k-1} * (2/k^2 - 1), so |det| converges to a positive
    # constant and the parameter steps cannot die out
    prev = Fraction(1)
    for k in range(1, 13):
        _, det, _ = bistochastic_chain(k)
        assert det == prev * (Fraction(2, k * k) - 1)
        prev = det


def test_bistochastic_steps_match_chain_differences():
    for n in range(1, 10):
        s_n, _, _ = bistochastic_chain(n)
        s_n1, _, _ = bistochastic_chain(n + 1)
        assert bistochastic_step(n) == abs(s_n1 - s_n)


def test_bistochastic_steps_stay_large():
    # the divergence certificate: parameter jumps never fall below 0.05
    for n in (10, 25, 50, 100, 200):
        assert bistochastic_step(n) >= Fraction(5, 100)
    assert abs(bistochastic_chain(20)[1]) > Fraction(2, 10)


# ---------------------------------------------------------------------------
# 3x3 block-doubling chain
# ---------------------------------------------------------------------------


def test_div3x3_letters_follow_doubling_blocks():
    assert [div3x3_letter(n) for n in range(1, 16)] == [
        0, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1
    ]
    with pytest.raises(ValueError):
        div3x3_letter(0)


def test_div3x3_matches_letterwise_product():
    gen_a = Mat.exact(((1, 0, 0), (1, 1, 0), (0, 0, 1)))
    gen_b = Mat.exact(((1, 0, 0), (0, 1, 0), (1, 0, 1)))

    def brute(n):
        acc = Mat.exact(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
        for m in range(1, n + 1):
            acc = acc @ (gen_a if div3x3_letter(m) == 0 else gen_b)
        return acc

    for k in (1, 2, 3):
        res = divergence_3x3(k)
        assert res.n_first == 4**k - 1
        assert res.n_second == 2 * 4**k - 1
        assert res.P_first.rows == brute(res.n_first).rows
        assert res.P_second.rows == brute(res.n_second).rows


def test_div3x3_ratio_oscillates_forever():
    for k in range(1, 8):
        res = divergence_3x3(k)
        assert res.ratio_first == Fraction(1, 2)
        assert res.ratio_second == Fraction(2 * (4 ** (k + 1) - 1), 4 ** (k + 1) - 4)
        assert res.ratio_second >= 2
    # the two checkpoint ratios approach 1/2 and 2: no single direction wins
    assert divergence_3x3(7).ratio_second == pytest.approx(2.0, abs=1e-3)
    with pytest.raises(ValueError):
        divergence_3x3(0)


# ---------------------------------------------------------------------------
# lower-triangular 2x2 products
# ---------------------------------------------------------------------------


def test_triangular_all_ones_diverging_sum():
    res = triangular_2x2(lambda k: 1, lambda k: 1, lambda k: 1, (1, 1), 10)
    assert res.r_n == 1
    assert res.s_n == 10
    assert res.direction == (Fraction(1, 12), Fraction(11, 12))
    assert res.limit == (0, 1)


def test_triangular_geometric_sum():
    res = triangular_2x2(lambda k: 2, lambda k: 1, lambda k: 1, (1, 1), 10)
    assert res.r_n == Fraction(1, 1024)
    assert res.s_n == Fraction(1023, 1024)
    assert res.direction == (Fraction(1, 2), Fraction(1, 2))
    assert res.limit == (Fraction(1, 2), Fraction(1, 2))


def test_triangular_matches_direct_matrix_product():
    a = [1, 2, 3, 2, 1, 2, 3, 2]
    c = [1, 0, 2, 1, 1, 0, 2, 1]
    d = [2, 2, 1, 3, 2, 2, 1, 3]
    n = 8
    res = triangular_2x2(a, c, d, (1, 1), n)
    prod = Mat.exact(((1, 0), (0, 1)))
    for k in range(n):
        prod = prod @ Mat.exact(((Fraction(a[k]), Fraction(0)), (Fraction(c[k]), Fraction(d[k]))))
    scale = prod.entry(0, 0)
    assert res.s_n == Fraction(prod.entry(1, 0)) / scale
    assert res.r_n == Fraction(prod.entry(1, 1)) / scale
    assert res.limit is None  # the last quarter of the inputs is not constant


def test_triangular_matches_direction_engine():
    res = triangular_2x2(lambda k: 2, lambda k: 1, lambda k: 1, (1, 1), 30)
    eng = iterate_direction(triangular_factor(lambda k: 2, lambda k: 1, lambda k: 1), (1, 1), 30)
    assert tuple(res.direction) == tuple(eng)


def test_triangular_geometric_tail_with_head():
    n = 200
    res = triangular_2x2([3] + [2] * (n - 1), [1] * n, [1] * n, (1, 1), n)
    assert res.limit == (Fraction(3, 5), Fraction(2, 5))
    assert abs(res.direction[0] - res.limit[0]) < Fraction(1, 10**20)


def test_triangular_zero_start_vector_cases():
    res = triangular_2x2(lambda k: 2, lambda k: 1, lambda k: 1, (0, 1), 5)
    assert res.limit == (0, 1)
    with pytest.raises(ValueError):
        triangular_2x2(lambda k: 2, lambda k: 1, lambda k: 1, (0, 0), 5)


def test_triangular_input_validation():
    with pytest.raises(ValueError):
        triangular_2x2(lambda k: 0, lambda k: 1, lambda k: 1, (1, 1), 3)
    with pytest.raises(ValueError):
        triangular_2x2(lambda k: 1, lambda k: -1, lambda k: 1, (1, 1), 3)
    with pytest.raises(ValueError):
        triangular_2x2([1, 1], [1, 1], [1, 1], (1, 1), 3)  # list too short
    with pytest.raises(ValueError):
        triangular_2x2(lambda k: 1, lambda k: 1, lambda k: 1, (1, 1), 0)


# ---------------------------------------------------------------------------
# Monte-Carlo trials
# ---------------------------------------------------------------------------


def test_trials_are_deterministic_per_seed():
    a = random_divergence_trial("uniform-positive", 120, 7)
    b = random_divergence_trial("uniform-positive", 120, 7)
    assert a == b
    c = random_divergence_trial("uniform-positive", 120, 8)
    assert a != c


def test_positive_ensemble_collapses_to_rank_one():
    for seed in (0, 1, 2):
        rec = random_divergence_trial("uniform-positive", 100, seed)
        assert rec.ensemble == "uniform-positive"
        assert rec.rank1_gap <= 1e-6
        assert rec.reseeds == 0


def test_complex_ensemble_keeps_wandering():
    for seed in (0, 1, 2):
        rec = random_divergence_trial("gaussian-complex", 200, seed)
        assert rec.max_successive_last50 >= 0.01
        assert len(rec.successive_tail) == 50
        assert rec.reseeds == 0


def test_trial_validation():
    with pytest.raises(ValueError):
        random_divergence_trial("uniform-positive", 50, 0, d=9)
    with pytest.raises(ValueError):
        random_divergence_trial("lognormal", 50, 0)


def test_successive_distances_basics():
    ident = Mat.exact(((1, 0), (0, 1)))
    dists = successive_direction_distances([ident] * 6, 6)
    assert dists == [0.0] * 5
    nil = Mat.exact(((0, 1), (0, 0)))
    with pytest.raises(ZeroDivisionError):
        successive_direction_distances([nil, nil], 2)
