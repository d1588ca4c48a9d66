from fractions import Fraction

import pytest

import loccache


def test_demand_sets_example():
    assert loccache.demand_sets(3, 2, 1) == [[1, 2, 3, 4, 5], [4, 5, 6, 7, 8], [1, 2, 7, 8, 9]]


def test_closed_forms():
    assert loccache.rstar_u(3, 2, 1, 3) == 1
    assert loccache.rstar_u(4, 1, 2, 2) == 2
    assert loccache.cutset_bound(4, 4, 2, 0) == 2
    assert loccache.rstar_multiaccess(3, 2, 1, 2, "3/2") == Fraction(3, 2)


def test_achievable_matches_closed_form():
    for M in (0, Fraction(3, 2), 3, 4, 5):
        assert loccache.achievable_load(3, 2, 1, M) == loccache.rstar_u(3, 2, 1, M)
    assert loccache.achievable_load(4, 1, 1, 2, L=2) == 0


def test_simulation_decodes():
    report = loccache.simulate(3, 2, 1, 3, [1, 6, 7], seed=5)
    assert report["ok"]
    assert all(report["decoded"])
    assert report["load"] == 1
    assert report["messages"] == 3


def test_lp_and_loose_bound():
    assert loccache.lp_optimum(3, 2, 1, 3) == 1
    assert loccache.lp_optimum(4, 1, 1, 2) == Fraction(4, 3)
    assert loccache.sum_all_bound(3, 2, 1, 3) == Fraction(54, 95)


def test_certificates():
    cert = loccache.certificate(3, 2, 1, "HIGH_M")
    assert cert["pass"]
    with pytest.raises(ValueError):
        loccache.certificate(3, 2, 1, "LARGE_B")


def test_gap_and_errors():
    g = loccache.gap_check(4, 4, 2)
    assert g["pass"] and g["ratio_at_zero"] == 2
    with pytest.raises(ValueError):
        loccache.rstar_u(1, 1, 1, 0)
    with pytest.raises(loccache.BudgetExceeded):
        loccache.lp_optimum(5, 4, 3, 1)


def test_verify_subset():
    report = loccache.verify(K_values=(2,), a_values=(1,), b_values=(1,), trials=3, only=(1, 5))
    assert report["pass"]
