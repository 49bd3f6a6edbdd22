import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aletwistor import delliptic as D
from aletwistor.delliptic import CurvePoint, elliptic_curve, lattice_distance, periods, principality_residual
from aletwistor.errors import Divergence, PathThroughBranchPoint, RootCollision
from aletwistor.polycore import ComplexPoly, roots
from oracles import agm_K, brute_nearest_lattice_distance, lattice_invariants, lemniscate_half_period, quartic_invariants

P = ComplexPoly


def same_lattice(a, b, tol=1e-8):
    """Each basis lies in the other's lattice."""
    return max(lattice_distance(v, *b) for v in a) <= tol and max(lattice_distance(v, *a) for v in b) <= tol


def random_quartic(rng, sep=0.3):
    while True:
        rs = rng.normal(size=4) + 1j * rng.normal(size=4)
        if min(abs(a - b) for i, a in enumerate(rs) for b in rs[i + 1 :]) > sep:
            lead = complex(rng.normal() + 1j * rng.normal())
            return P.from_roots(rs, lead)


# -- periods -------------------------------------------------------------------


def test_lemniscate_periods():
    w1, w2 = periods(P((1, 0, 0, 0, -1)))
    ref = lemniscate_half_period()
    # square lattice generated by ref * (1 + i) and ref * (1 - i)
    assert abs(w1) == pytest.approx(abs(w2), rel=1e-12)
    assert abs(w1) == pytest.approx(ref * math.sqrt(2), abs=1e-8)
    assert lattice_distance(2 * ref, w1, w2) <= 1e-9
    assert lattice_distance(ref, w1, w2) > 0.5


@pytest.mark.parametrize("m", np.random.default_rng(2024).uniform(0.02, 0.98, 20).round(6))
def test_legendre_periods_against_agm(m):
    z = P((1, 0, -(1 + m), 0, m))
    assert same_lattice(periods(z), (4 * agm_K(m), 2j * agm_K(1 - m)))


def test_general_quartics_against_weierstrass_invariants():
    rng = np.random.default_rng(77)
    for _ in range(20):
        z = random_quartic(rng)
        g2, g3 = quartic_invariants(z.coeffs)
        h2, h3 = lattice_invariants(*periods(z))
        assert abs(g2 - h2) <= 1e-8 * max(1, abs(g2))
        assert abs(g3 - h3) <= 1e-8 * max(1, abs(g3))


def test_normalisation_and_scaling():
    z = random_quartic(np.random.default_rng(4))
    w1, w2 = periods(z)
    assert (w2 / w1).imag > 0
    lam = 1.7 - 0.6j
    s1, s2 = periods(z * (lam * lam))
    assert same_lattice((s1, s2), (w1 / lam, w2 / lam))


def test_root_collision():
    with pytest.raises(RootCollision):
        periods(P.from_roots([0, 1e-10, 1, 2j]))
    with pytest.raises(ValueError):
        periods(P((1, 0, 1)))


# -- lattice helpers --------------------------------------------------------------

basis_st = st.tuples(
    st.complex_numbers(min_magnitude=0.3, max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.floats(min_value=0.3, max_value=3),
    st.floats(min_value=0.2, max_value=math.pi - 0.2),
)


@settings(max_examples=60, deadline=None)
@given(basis_st, st.complex_numbers(max_magnitude=8, allow_nan=False, allow_infinity=False))
def test_nearest_lattice_point_against_brute_force(basis, v):
    w1, ratio, ang = basis
    w2 = w1 * ratio * complex(math.cos(ang), math.sin(ang))
    _, _, pt = D.nearest_lattice_point(v, w1, w2)
    assert abs(v - pt) == pytest.approx(brute_nearest_lattice_distance(v, w1, w2), abs=1e-12)
    assert 0.0 <= lattice_distance(v, w1, w2) <= 1.0 + 1e-12


@pytest.mark.parametrize(
    "w1, w2, radius",
    [
        (1, 1j, 1 / math.sqrt(2)),
        (2, 1 + math.sqrt(3) * 1j, 2 / math.sqrt(3)),
        (1, 3 + 1j, 1 / math.sqrt(2)),
    ],
)
def test_covering_radius(w1, w2, radius):
    assert D.covering_radius(w1, w2) == pytest.approx(radius)


# -- Abel map ---------------------------------------------------------------------


@pytest.fixture(scope="module")
def curve():
    return elliptic_curve(P((0.3 + 0.1j, -0.2j, 1.1, 0.4 - 0.2j, 0.9 + 0.3j)))


def test_abel_map_basepoint_is_zero(curve):
    assert D.abel_map(curve, curve.basepoint) == 0


def test_involution_and_fibre_sum(curve):
    rng = np.random.default_rng(1)
    for _ in range(10):
        P_ = curve.point(complex(rng.normal() + 1j * rng.normal()))
        a = D.abel_map(curve, P_, certify=True)
        b = D.abel_map(curve, P_.involution(), certify=True)
        # the base point is a branch point, so the constant is 0
        assert lattice_distance(a + b, *curve.periods) <= 1e-8


def test_two_routes_agree_modulo_lattice(curve):
    rng = np.random.default_rng(2)
    for _ in range(5):
        P_ = curve.point(complex(2 * rng.normal() + 2j * rng.normal()), sign=-1)
        v1, v2 = D.abel_map_routes(curve, P_, n_routes=2)
        assert lattice_distance(v1 - v2, *curve.periods) <= 1e-8


def test_points_at_infinity(curve):
    z = curve.z
    inf_p, inf_m = CurvePoint.infinity(1, z), CurvePoint.infinity(-1, z)
    a = D.abel_map(curve, inf_p, certify=True)
    b = D.abel_map(curve, inf_m, certify=True)
    assert lattice_distance(a + b, *curve.periods) <= 1e-8
    assert lattice_distance(a - b, *curve.periods) > 1e-3


def test_off_curve_point_is_rejected(curve):
    with pytest.raises(ValueError):
        D.abel_map(curve, CurvePoint(0.5, 17.0))


def test_path_through_branch_point():
    c = elliptic_curve(P.from_roots([-2, -1, 1, 2]))
    P_ = c.point(1.5)
    with pytest.raises(PathThroughBranchPoint):
        D.abel_map(c, P_)


def test_sheet_transport():
    z = P.from_roots([0, 1.5, -1.5 + 1j, 2j])
    w0 = np.sqrt(complex(z(0.4)))
    around_one = [0.4, 0.4j, -0.4, -0.4j]
    assert D.transport(z, around_one, w0) == pytest.approx(-w0, abs=1e-9)
    around_two = [-0.5 - 0.5j, 2.2 - 0.5j, 2.2 + 0.5j, -0.5 + 0.5j]
    assert D.transport(z, around_two, np.sqrt(complex(z(-0.5 - 0.5j)))) == pytest.approx(
        np.sqrt(complex(z(-0.5 - 0.5j))), abs=1e-9
    )


# -- principality -----------------------------------------------------------------


def test_trivial_divisor(curve):
    P_ = curve.point(0.2 + 0.7j)
    assert principality_residual(curve, [], []).lattice_distance == 0
    assert principality_residual(curve, [P_], [P_]).lattice_distance == 0


def test_divisor_of_u_minus_u0(curve):
    inf = [CurvePoint.infinity(1, curve.z), CurvePoint.infinity(-1, curve.z)]
    rng = np.random.default_rng(3)
    for _ in range(5):
        P_ = curve.point(complex(rng.normal() + 1j * rng.normal()))
        assert principality_residual(curve, [P_, P_.involution()], inf).lattice_distance <= 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_divisor_of_w_minus_quadratic(seed):
    rng = np.random.default_rng(seed)
    z = random_quartic(rng)
    c = elliptic_curve(z)
    q = P(tuple(rng.normal(size=3) + 1j * rng.normal(size=3)))
    zeros = [CurvePoint(complex(u), complex(q(u))) for u in roots(z - q * q).roots]
    inf = [CurvePoint.infinity(1, z), CurvePoint.infinity(-1, z)]
    assert principality_residual(c, zeros, inf * 2).lattice_distance <= 1e-8
    # product of two principal divisors is principal
    u0 = complex(rng.normal())
    extra = [c.point(u0), c.point(u0).involution()]
    assert principality_residual(c, zeros + extra, inf * 3).lattice_distance <= 1e-8


def test_random_divisors_are_not_principal():
    rng = np.random.default_rng(0)
    hits = 0
    trials = 40
    for _ in range(trials):
        c = elliptic_curve(P(tuple(rng.normal(size=5) + 1j * rng.normal(size=5))))
        pts = [c.point(complex(rng.normal() + 1j * rng.normal()), sign=int(rng.choice([-1, 1]))) for _ in range(8)]
        hits += principality_residual(c, pts[:4], pts[4:]).lattice_distance > 0.05
    assert hits >= 0.95 * trials


# -- the D4 divisor ---------------------------------------------------------------


def test_d4_candidates_for_u4_minus_1():
    (us, *_), = [D.d4_candidates(P((-1, 0, 0, 0, 1)), [1.0])]
    u2 = sorted(np.round((us**2).real, 12))
    s5 = math.sqrt(5)
    assert u2 == pytest.approx(sorted([(-1 - s5) / 2] * 2 + [(-1 + s5) / 2] * 2))


def test_d4_points_lie_on_loci():
    z = P((1, 0.2j, -0.5, 0.1, 2))
    a, s = (0.5, 1.2, -0.8, 2.0), (1, -1, 1, -1)
    zeros, poles = D.d4_divisor_points(z, a, s, (0, 1, 2, 3))
    for P_, Q_, aj, sj in zip(zeros, poles, a, s):
        assert P_.on_curve_residual(z) < 1e-10
        assert P_.w == pytest.approx(1j * sj * aj * P_.u)
        assert Q_ == P_.involution()


def test_symmetric_pairing_is_principal():
    z = P((1.3, 0, -0.7 + 0.2j, 0, 1))
    a = (0.6, -0.6, 1.4, -1.4)
    zeros, poles = D.d4_divisor_points(z, a, (1, 1, 1, 1), (2, 2, 1, 1))
    assert principality_residual(elliptic_curve(z), zeros, poles).lattice_distance <= 1e-8


def test_degenerate_selector():
    z = P((1.3, 0.1, -0.7 + 0.2j, 0, 1))
    zeros, _ = D.d4_divisor_points(z, (0.5, 0.7, 0.9, 1.1), (1, 1, 1, 1), (0, 1, 2, 3))
    assert principality_residual(elliptic_curve(z), zeros, zeros).lattice_distance == 0


@pytest.fixture(scope="module")
def example():
    return D.certified_d4_example()


def test_certified_example(example):
    c = elliptic_curve(example.z)
    zeros, poles = D.d4_divisor_points(example.z, example.a, example.signs, example.selector)
    assert principality_residual(c, zeros, poles).lattice_distance <= 1e-8
    ex = D.d4_exhaustive(c, example.a, example.signs)
    assert len(ex.residuals) == 256
    assert ex.best_selector == example.selector
    assert sorted(ex.residuals.values())[1] > 1e-3


def test_constraint_solve_leaves_solution_alone(example):
    res = D.constraint_solve(example.z, 0, example.a, example.signs, example.selector)
    assert res.iterations == 0 and res.z == example.z


@pytest.mark.parametrize("idx", [0, 2])
def test_constraint_solve_recovers_from_perturbation(example, idx):
    cs = list(example.z.coeffs)
    cs[idx] += 1e-4 * (1 + 1j)
    res = D.constraint_solve(P(tuple(cs)), idx, example.a, example.signs, example.selector)
    assert res.residual.lattice_distance <= 1e-8
    assert res.iterations <= 20


def test_constraint_solve_far_seed_diverges(example):
    cs = list(example.z.coeffs)
    cs[0] += 40
    with pytest.raises(Divergence):
        D.constraint_solve(P(tuple(cs)), 0, example.a, example.signs, example.selector, maxiter=8)
