import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xisb import theorems as T
from xisb.errors import DomainError
from xisb.specfun import bessel_k

finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(finite, finite, st.floats(1e-12, 1.0))
def test_verdict_rule(m, r, tol):
    e = T.ClaimEntry.make("c", "loc", {"v": m}, {"v": r}, tol)
    expected = T.VERIFIED if abs(m - r) <= tol * (1 + abs(r)) else T.DISCREPANCY
    assert e.verdict == expected


def test_informational_without_reference():
    e = T.ClaimEntry.make("c", "loc", {"v": 1.0}, {}, 1e-8)
    assert e.verdict == T.INFORMATIONAL


def test_entry_needs_measurement():
    with pytest.raises(ValueError):
        T.ClaimEntry.make("c", "loc", {}, {}, 1e-8)


def test_ledger_unique_ids():
    e = T.ClaimEntry.make("c", "loc", {"v": 1.0}, {}, 1e-8)
    with pytest.raises(ValueError):
        T.ClaimLedger((e, e))


@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=5))
def test_ledger_json_roundtrip(pairs):
    entries = tuple(T.ClaimEntry.make(f"c{i}", "loc", {"m": a}, {"m": b}, 1e-8, "n")
                    for i, (a, b) in enumerate(pairs))
    led = T.ClaimLedger(entries)
    back = T.ClaimLedger.from_json(led.to_json())
    assert back == led and back.to_json() == led.to_json()


def test_ledger_schema_and_text():
    led = T.build_ledger(["xi-at-zero", "mean"])
    raw = json.loads(led.to_json())["entries"]
    assert [e["claim_id"] for e in raw] == ["xi-at-zero", "mean"]
    assert set(raw[0]) == {"claim_id", "location", "measured", "reference", "tolerance", "verdict", "note"}
    assert "xi-at-zero" in led.to_text()
    assert led["mean"].verdict == T.VERIFIED


def test_empty_selection_gives_empty_ledger():
    assert len(T.build_ledger(None)) == 0
    assert len(T.build_ledger([])) == 0


def test_unknown_claim():
    with pytest.raises(KeyError):
        T.build_ledger(["no-such-claim"])


def test_registry_coverage():
    ids = T.claim_ids()
    assert len(ids) >= 14 and len(set(ids)) == len(ids)
    # one check per published statement
    for needed in ("xi-symmetry", "theta-reciprocity", "cdf-closed-form", "cdf-theta-prime", "v2-series-printed",
                   "vk-reciprocity-1", "vk-reciprocity-2", "vk-reciprocity-3", "normalization", "moments", "mean",
                   "variance", "size-bias", "dominance-2", "dominance-3", "bessel-transform", "bessel-theta-sum",
                   "divisor-bessel-identity", "lln"):
        assert needed in ids


def test_selection_order_is_registry_order():
    led = T.build_ledger(["mean", "xi-at-zero"])
    assert [e.claim_id for e in led.entries] == ["xi-at-zero", "mean"]


def test_functional_equations():
    entries = {e.claim_id: e for e in T.check_functional_equations(np.geomspace(0.3, 3, 5))}
    assert entries["vk-reciprocity-1"].measured["max_rel_gap"] < 1e-10
    assert entries["vk-reciprocity-2"].measured["max_rel_gap"] < 1e-8
    assert entries["vk-reciprocity-3"].measured["max_rel_gap"] < 1e-5
    with pytest.raises(DomainError):
        T.check_functional_equations([0.0, 1.0])


@pytest.mark.parametrize("s,a,b", [(1.0, 1.0, 1.0), (0.0, 1 / math.sqrt(2), 1 / math.sqrt(2)), (0.5, 0.8, 1.3),
                                   (2.0, 1.5, 0.7)])
def test_bessel_integral_constant(s, a, b):
    res = T.check_bessel_integral(s, a, b)
    # the quadrature reproduces K_s(2ab) itself
    assert abs(res["quadrature"] - res["K_s"]) < 1e-9 * res["K_s"]
    assert abs(res["ratio"] - 0.5) < 1e-9


def test_bessel_integral_domain():
    with pytest.raises(DomainError):
        T.check_bessel_integral(1.0, -1.0, 1.0)


def test_bessel_integral_gives_eq23_summand():
    # s = 1, alpha = sqrt(pi) n, beta = x: (alpha/beta) int ... = K1(2 x n sqrt(pi))
    x, n = 1.0, 1
    res = T.check_bessel_integral(1.0, math.sqrt(math.pi) * n, x)
    assert abs(res["quadrature"] - bessel_k(1, 2 * x * n * math.sqrt(math.pi))) < 1e-12


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_eq23_sides(x):
    res = T.check_eq23(x)
    assert abs(res["lhs"] - res["rhs"]) <= 1e-8 * (1 + abs(res["lhs"]))


def test_eq23_decay():
    # leading term 5 K1(10 sqrt(pi)) is about 3e-8
    res = T.check_eq23(5.0)
    assert res["lhs"] < 1e-7 and abs(res["lhs"] - res["rhs"]) < 1e-15
    assert res["lhs"] < 1e-5 * T.check_eq23(1.0)["lhs"]


def test_theorem13_decay():
    res = T.check_theorem13(5.0)
    assert res["lhs"] < 1e-7 and abs(res["ratio"] - 1) < 1e-6


def test_theorem13_ratio_constant():
    ratios = [T.check_theorem13(x)["ratio"] for x in (0.5, 1.0, 2.0)]
    assert np.ptp(ratios) < 1e-6
    assert abs(ratios[0] - 1) < 1e-6


def test_dominance_entry_reports_violation():
    e = T.check_dominance(2)
    assert e.verdict == T.DISCREPANCY
    assert e.measured["max_violation"] > 1e-3
    assert e.measured["survival_crosscheck_gap"] < 1e-10


def test_dominance_limits():
    # both survival functions go to 1 at 0 and to 0 at infinity
    e_lo = T.check_dominance(2, grid=[0.05, 0.08])
    e_hi = T.check_dominance(2, grid=[20.0, 30.0])
    assert abs(e_lo.measured["min_margin"]) < 1e-9
    assert abs(e_hi.measured["min_margin"]) < 1e-9


def test_dominance_domain():
    with pytest.raises(DomainError):
        T.check_dominance(1)


def test_run_lln():
    res = T.run_lln(1, 1000, 20, seed=1)
    assert 0 <= res["frac_within_0.01"] <= res["frac_within_0.05"] <= 1
    assert res == T.run_lln(1, 1000, 20, seed=1)
    with pytest.raises(DomainError):
        T.run_lln(1, 10, 20, seed=1)


def test_discrepancies_carry_best_fit():
    led = T.build_ledger(["moments", "variance", "normalization", "bessel-transform"])
    assert abs(led["moments"].measured["best_fit_factor_k1"] - 2) < 1e-8
    assert abs(led["bessel-transform"].measured["ratio_quadrature_to_claimed"] - 0.5) < 1e-9
    assert all(e.verdict == T.DISCREPANCY for e in led.entries)
