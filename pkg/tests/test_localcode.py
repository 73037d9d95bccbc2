import itertools
import random
from fractions import Fraction

import pytest

from pmdsarray.digits import DigitProfile, v_indices
from pmdsarray.gf import field_new, find_subgroup
from pmdsarray.localcode import (
    HelperMissing,
    LambdaTable,
    PoolTooSmall,
    RequirementViolated,
    bandwidth_ratio,
    build_A,
    build_A_variants,
    build_H,
    msr_bandwidth,
    phi,
    pool_requirement,
    repair_bandwidth_formula,
    repair_plan_local,
    select_lambdas,
)
from pmdsarray.matrix import PoleCollision, expand
from pmdsarray.verify import verify_local_mds

GF13 = field_new(13)
GEOMETRIES = [(4, 2, 2), (6, 2, 2), (6, 3, 2), (6, 2, 3)]


def local_code(n, nprime, r):
    need = max(phi(n, nprime, r), pool_requirement(n, nprime, r))
    F = next(field_new(q) for q in (13, 17, 19, 31, 37) if (q - 1) >= need)
    G = find_subgroup(F, need, 1)
    table = select_lambdas(n, nprime, r, G.elements(), F)
    mats = build_A(table, DigitProfile(r, nprime))
    return F, table, mats, build_H(mats, r, F)


def test_phi_examples():
    assert phi(4, 2, 2) == 4
    assert phi(8, 2, 2) == 8
    assert phi(5, 2, 2) == 6
    assert pool_requirement(5, 2, 2) == 6
    for n, nprime, r in itertools.product(range(2, 13), range(1, 5), range(2, 4)):
        if n > nprime:
            assert pool_requirement(n, nprime, r) >= phi(n, nprime, r)


def test_select_lambdas_example():
    t = select_lambdas(4, 2, 2, [1, 5, 12, 8], GF13)
    assert t.values == ((1, 5), (12, 8), (5, 1), (8, 12))
    with pytest.raises(PoolTooSmall):
        select_lambdas(5, 2, 2, [1, 2, 3, 4, 5], GF13)


def test_lambda_table_requirements():
    ok = LambdaTable(4, 2, 2, ((1, 5), (12, 8), (5, 1), (8, 12)), GF13)
    assert ok.violations() == []
    r1 = LambdaTable(4, 2, 2, ((1, 5), (5, 8), (5, 1), (8, 12)), GF13)
    assert any(v.startswith("R1") for v in r1.violations())
    r2 = LambdaTable(4, 2, 2, ((1, 5), (12, 8), (1, 3), (8, 12)), GF13)
    assert any(v.startswith("R2") for v in r2.violations())
    r3 = LambdaTable(4, 2, 2, ((1, 1), (12, 8), (5, 3), (8, 12)), GF13)
    with pytest.raises(RequirementViolated):
        r3.validate()


@pytest.mark.parametrize("n,nprime,r", GEOMETRIES + [(5, 2, 2), (7, 3, 2), (9, 2, 3)])
def test_select_lambdas_valid(n, nprime, r):
    _, table, _, _ = local_code(n, nprime, r)
    assert table.violations() == []


def test_build_A_examples():
    _, table, mats, H = local_code(4, 2, 2)
    lam = table.values
    assert mats.A[0] == (lam[0][0], lam[0][0], lam[0][1], lam[0][1])
    assert mats.A[1] == (lam[1][0], lam[1][1], lam[1][0], lam[1][1])
    p = DigitProfile(2, 2)
    for i in range(4):
        for t in range(2):
            assert all(mats.A[i][a] == lam[i][t] for a in v_indices(i % 2, t, p))
    assert H.blocks[0][2].values == (1, 1, 1, 1)
    assert H.blocks[1][3].values == mats.A[3]


def test_build_A_variants():
    F11 = field_new(11)
    t = LambdaTable(2, 1, 2, ((5, 1), (4, 9)), F11)
    mats = build_A_variants(build_A(t, DigitProfile(2, 1)), 3, 0, F11)
    assert mats.A_prime[0][0] == 6
    for i in range(2):
        for a in range(2):
            assert F11.mul(mats.A_prime[i][a], F11.sub(mats.A[i][a], 3)) == 1
            assert F11.mul(mats.A_dprime[i][a], mats.A[i][a]) == 1
    with pytest.raises(PoleCollision):
        build_A_variants(build_A(t, DigitProfile(2, 1)), 5, 0, F11)


@pytest.mark.parametrize("n,nprime,r", GEOMETRIES)
def test_local_mds_and_commuting(n, nprime, r):
    F, _, mats, H = local_code(n, nprime, r)
    assert verify_local_mds(H, n, r).certified
    for i, j in itertools.combinations(range(n), 2):
        assert all(x != y for x, y in zip(mats.A[i], mats.A[j]))


def test_local_mds_negative():
    F, _, mats, H = local_code(4, 2, 2)
    dup = H.thick_columns([0, 1, 2, 0])
    rep = verify_local_mds(dup, 4, 2)
    assert rep.failures and rep.failures[0][0] == (0, 3)
    assert rep.total_patterns == 6


def test_expanded_entry():
    F, _, mats, H = local_code(6, 2, 3)
    D = expand(H).tolist()
    ell = H.ell
    rng = random.Random(3)
    for _ in range(20):
        j, i, a = rng.randrange(3), rng.randrange(6), rng.randrange(ell)
        assert D[j * ell + a][i * ell + a] == F.pow(mats.A[i][a], j)


def random_codeword(F, H, rng):
    """Free choice on the first n-r nodes, parity solved per row index."""
    from pmdsarray.matrix import solve_rows
    r, n, ell = H.block_rows, H.block_cols, H.ell
    data = [[0] * ell for _ in range(n)]
    for a in range(ell):
        sl = H.scalar_slice(a)
        free = [rng.randrange(F.q) for _ in range(n - r)]
        rhs = [[F.neg(F.dot(row[:n - r], free))] for row in sl]
        par = solve_rows([row[n - r:] for row in sl], rhs, F, unique=True)
        for h in range(n):
            data[h][a] = free[h] if h < n - r else par[h - n + r][0]
    return data


@pytest.mark.parametrize("n,nprime,r", GEOMETRIES)
def test_repair_round_trip_and_accounting(n, nprime, r):
    F, _, _, H = local_code(n, nprime, r)
    rng = random.Random(n * 100 + nprime * 10 + r)
    ell = H.ell
    plans = [repair_plan_local(H, nprime, j) for j in range(n)]
    for j, plan in enumerate(plans):
        assert plan.bandwidth == repair_bandwidth_formula(n, nprime, r, j)
        assert plan.access == ell * (n - 1)
    for _ in range(50 if (n, nprime, r) == (4, 2, 2) else 10):
        cw = random_codeword(F, H, rng)
        for j, plan in enumerate(plans):
            helpers = {h: cw[h] for h in range(n) if h != j}
            assert plan.execute(helpers) == cw[j]


def test_repair_helper_counts():
    _, _, _, H = local_code(4, 2, 2)
    plan = repair_plan_local(H, 2, 0)
    assert plan.per_helper() == {1: (2, 4), 2: (4, 4), 3: (2, 4)}
    with pytest.raises(HelperMissing):
        plan.execute({1: [0] * 4, 2: [0] * 4})


def test_bandwidth_formulas():
    assert repair_bandwidth_formula(4, 2, 2, 0) == 8
    assert bandwidth_ratio(30, 3, 2) == 1 + Fraction(9, 29)
    assert bandwidth_ratio(30, 5, 2) == 1 + Fraction(5, 29)
    assert bandwidth_ratio(30, 6, 2) == 1 + Fraction(4, 29)
    assert bandwidth_ratio(30, 10, 2) == 1 + Fraction(2, 29)
    # at n' = n the formula reaches the cut-set bound
    assert bandwidth_ratio(6, 6, 2) == 1
    assert msr_bandwidth(4, 2, 4) == 6
    for j in range(30):
        assert repair_bandwidth_formula(30, 3, 2, j) / msr_bandwidth(30, 2, 8) == 1 + Fraction(9, 29)
