import numpy as np
import pytest

from varode.eigenproblem import (
    BoundarySpec,
    EigenResult,
    build_table,
    characteristic_dirichlet,
    characteristic_mixed,
    characteristic_symmetric,
    find_roots,
    shoot_exact,
    wkb_eigen,
)

# values as tabulated in the source tables (three decimals)
EXACT = {
    1: [13.486, 58.811, 136.140, 245.470, 386.802],
    2: [43.185, 77.736, 208.573, 286.144, 500.880],
    3: [5.122, 39.661, 106.249, 204.856, 335.473],
}
APPROX = {
    1: [13.767, 59.174, 136.557, 245.930, 387.296],
    2: [46.138, 74.721, 213.915, 281.010, 508.297],
    3: [4.721, 39.836, 106.063, 204.952, 335.352],
}
WKB_PERCENT = [19, 9, 6, 4, 3]
ERROR_PERCENT = [2, 0.6, 0.3, 0.2, 0.1]


def test_find_roots_linear():
    r = find_roots(lambda x: x - 2, (0, 5))
    assert len(r) == 1 and abs(r[0] - 2) < 1e-6


def test_find_roots_exact_grid_hit_and_empty():
    assert find_roots(lambda x: x - 2.5, (0, 5)) == [2.5]
    assert find_roots(lambda x: x * x + 1, (0, 5)) == []


def test_find_roots_misses_close_pair():
    # two roots 0.2 apart inside one scan cell give no sign change
    F = lambda x: (x - 3.1) * (x - 3.3)
    assert find_roots(F, (0, 5), scan_step=0.5) == []
    assert len(find_roots(F, (0, 5), scan_step=0.05)) == 2


def test_find_roots_vectorized_matches_scalar():
    F = lambda x: np.sin(x)
    a = find_roots(F, (1, 10), vectorized=True)
    b = find_roots(lambda x: float(np.sin(x)), (1, 10))
    assert a == b
    assert np.allclose(a, [np.pi, 2 * np.pi, 3 * np.pi], atol=1e-6)


def test_wkb_eigen():
    assert [wkb_eigen(n) for n in (1, 2, 5)] == [16, 64, 400]
    with pytest.raises(ValueError):
        wkb_eigen(0)


def test_characteristic_limits():
    assert abs(characteristic_symmetric(1e-12)) < 1e-10
    assert characteristic_mixed(1e-12) == pytest.approx(1.0, abs=1e-10)
    # the Dirichlet function starts at int (1-u^2)^(1/4) du > 0
    assert characteristic_dirichlet(1e-12) > 0.8
    with pytest.raises(ValueError):
        characteristic_dirichlet(-1.0)


@pytest.mark.parametrize(
    "F, table", [(characteristic_dirichlet, 1), (characteristic_symmetric, 2), (characteristic_mixed, 3)]
)
def test_sign_changes_bracket_tabulated_roots(F, table):
    for lam in APPROX[table]:
        assert F(lam - 0.5) * F(lam + 0.5) < 0


def test_boundary_spec():
    assert BoundarySpec("symmetric").initial == (1.0, 0.0)
    assert BoundarySpec("mixed").residual(np.array([0.3, -0.2])) == pytest.approx(-0.2)
    with pytest.raises(ValueError):
        BoundarySpec("periodic")


def test_eigen_result_errors():
    r = EigenResult(1, 10.0, 10.5, 16.0)
    assert r.rel_error == pytest.approx(0.05)
    assert r.wkb_rel_error == pytest.approx(0.6)
    assert EigenResult(1, 10.0, 9.0).wkb_rel_error is None


@pytest.mark.slow
@pytest.mark.parametrize("table", [1, 2, 3])
def test_table_reproduction(tables, table):
    rows, _ = tables(table)
    for r, ex, ap in zip(rows, EXACT[table], APPROX[table]):
        assert abs(r.lambda_exact - ex) / ex < 5e-4
        assert abs(r.lambda_approx - ap) / ap < 5e-3


@pytest.mark.slow
def test_table1_error_trends(tables):
    rows, _ = tables(1)
    errs = [r.rel_error for r in rows]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    for e, ref in zip(errs, ERROR_PERCENT):
        assert 0.5 * ref <= 100 * e <= 1.5 * ref
    for r, ref in zip(rows, WKB_PERCENT):
        assert abs(100 * r.wkb_rel_error - ref) <= 1.0


@pytest.mark.slow
def test_root_count_dirichlet():
    approx = find_roots(characteristic_dirichlet, (1, 450))
    exact = shoot_exact("dirichlet", (1, 450))
    assert len(approx) == len(exact) == 5


def test_shooting_is_deterministic():
    a = shoot_exact("mixed", (1, 50), scan_step=1.0)
    b = shoot_exact("mixed", (1, 50), scan_step=1.0)
    assert a == b
    assert abs(a[0] - 5.122) / 5.122 < 5e-4


def test_bisection_tolerance():
    r = find_roots(characteristic_dirichlet, (10, 20), tol=1e-9)
    assert len(r) == 1
    assert abs(characteristic_dirichlet(r[0])) < 1e-7


def test_unknown_table():
    with pytest.raises(ValueError):
        build_table(7)
