"""Exact coded-caching workbench for location-based content.

Loads and bounds come back as fractions.Fraction; cache sizes may be given
as int, Fraction or a "p/q" string.
"""

import json
from fractions import Fraction

from . import _core
from ._core import BudgetExceeded, DecodeFailure, InvariantViolation

__all__ = [
    "BudgetExceeded",
    "DecodeFailure",
    "InvariantViolation",
    "achievable_load",
    "certificate",
    "cutset_bound",
    "demand_sets",
    "gap_check",
    "lp_optimum",
    "rstar_multiaccess",
    "rstar_u",
    "simulate",
    "sum_all_bound",
    "verify",
]


def _q(value):
    return str(Fraction(value))


def demand_sets(K, a, b):
    return _core.demand_sets(K, a, b)


def rstar_u(K, a, b, M):
    return Fraction(_core.rstar_u(K, a, b, _q(M)))


def cutset_bound(K, a, b, M):
    return Fraction(_core.cutset_bound(K, a, b, _q(M)))


def rstar_multiaccess(K, a, b, L, M):
    return Fraction(_core.rstar_multiaccess(K, a, b, L, _q(M)))


def achievable_load(K, a, b, M, L=1):
    return Fraction(_core.achievable_load(K, a, b, L, _q(M)))


def simulate(K, a, b, M, demand, L=1, seed=1):
    report = _core.simulate(K, a, b, L, _q(M), list(demand), seed)
    report["load"] = Fraction(report["load"])
    report["symbolic_load"] = Fraction(report["symbolic_load"])
    return report


def lp_optimum(K, a, b, M, family="full", memory="aggregate"):
    return Fraction(_core.lp_optimum(K, a, b, _q(M), family, memory))


def sum_all_bound(K, a, b, M):
    return Fraction(_core.sum_all_bound(K, a, b, _q(M)))


def certificate(K, a, b, regime):
    return json.loads(_core.certificate(K, a, b, regime))


def gap_check(K, a, b):
    result = _core.gap_check(K, a, b)
    result["ratio"] = Fraction(result["ratio"])
    result["ratio_at_zero"] = Fraction(result["ratio_at_zero"])
    return result


def verify(K_values=(2, 3, 4, 5), a_values=(0, 1, 2, 3, 4), b_values=(1, 2, 3), trials=100, only=()):
    return json.loads(_core.verify(list(K_values), list(a_values), list(b_values), trials, list(only)))
