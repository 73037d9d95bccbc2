import dataclasses
import random

import pytest

from pmdsarray.gf import field_new
from pmdsarray.pmds import assemble, build_c2, build_c3
from pmdsarray.verify import (
    TooLarge,
    enumerate_patterns,
    block_vandermonde_negative,
    oracle_passed,
    oracle_suite,
    pattern_count,
    sample_patterns,
    verify_pmds,
)


def test_pattern_enumeration():
    pats = list(enumerate_patterns(2, 4, 2, 2))
    assert len(pats) == pattern_count(2, 4, 2, 2) == 216
    assert pats[0] == (0, 1, 2, 3, 4, 5)
    assert pats == list(enumerate_patterns(2, 4, 2, 2))
    # an extra erasure can coincide with another per-group choice
    assert len(set(pats)) < 216
    assert pattern_count(2, 4, 2, 3) == 144
    for p in sample_patterns(3, 5, 2, 2, 20, random.Random(0)):
        assert len(p) == 8
        assert all(sum(1 for x in p if x // 5 == g) >= 2 for g in range(3))


@pytest.mark.parametrize("method", ["expand", "slices"])
def test_c2_certified(c2_small, method):
    rep = verify_pmds(c2_small, method=method)
    assert rep.certified
    assert rep.part_i.total_patterns == 12 and rep.part_ii.total_patterns == 216


def test_c3_and_c4_certified(c3_small, c4_small):
    assert verify_pmds(c3_small).certified
    rep = verify_pmds(c4_small, method="expand")
    assert rep.certified and rep.part_ii.total_patterns == 144


def test_methods_agree_on_failures(c2_small):
    bad = assemble(dataclasses.replace(c2_small.spec, theta=(1, 5)), validate=False)
    a = verify_pmds(bad, method="expand")
    b = verify_pmds(bad, method="slices")
    assert a.part_ii.failures == b.part_ii.failures
    assert a.part_ii.failures and all(d > 0 for _, d in a.part_ii.failures)
    assert not a.certified


def test_budget_and_sampling():
    inst = build_c2(3, 6, 2, 2)
    with pytest.raises(TooLarge):
        verify_pmds(inst, budget=1000)
    rep = verify_pmds(inst, budget=1000, samples=200)
    assert rep.sampled and rep.part_ii.total_patterns == 200 and rep.certified


def test_parallel_matches_serial(c2_small):
    bad = assemble(dataclasses.replace(c2_small.spec, theta=(1, 5)), validate=False)
    serial = verify_pmds(bad)
    parallel = verify_pmds(bad, jobs=2)
    assert sorted(serial.part_ii.failures) == sorted(parallel.part_ii.failures)


def test_report_dict(c3_small):
    d = verify_pmds(c3_small).to_dict()
    assert d["certified"] and d["part_ii"]["failures"] == []


def test_oracle_suite():
    res = oracle_suite(seed=0, trials=100)
    assert oracle_passed(res)
    assert all(r.passed == 100 for per in res.values() for r in per.values())


def test_oracle_negative_control():
    rng = random.Random(5)
    for F in (field_new(13), field_new(11, 3)):
        assert all(block_vandermonde_negative(F, rng) for _ in range(20))


def test_c3_odd_certified():
    assert verify_pmds(build_c3(2, 5)).certified
