import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aletwistor.aklines import (
    AkParams,
    TwistorLineAk,
    build_line,
    level_product,
    random_params,
    residual_ak,
    residual_dk,
    split_roots,
)
from aletwistor.errors import NonPositiveDiscriminant
from aletwistor.polycore import ComplexPoly

GOLD = (1 + math.sqrt(5)) / 2


@pytest.mark.parametrize(
    "a, c, level, alpha, beta",
    [
        (0.0, 1.0, 1.0, GOLD, 1 - GOLD),
        (0.0, 1.0, 0.0, 1.0, -1.0),
        (0.0, 1j, 0.0, -1j, 1j),
    ],
)
def test_split_roots_examples(a, c, level, alpha, beta):
    al, be = split_roots(AkParams(0, a, c, 1.0, (level,)))
    assert al[0] == pytest.approx(alpha, abs=1e-14)
    assert be[0] == pytest.approx(beta, abs=1e-14)


def test_split_roots_factorises():
    p = AkParams(2, 0.4, 0.3 - 0.8j, 1.0, (-1.0, 0.2, 1.5))
    al, be = split_roots(p)
    z = ComplexPoly((-p.c.conjugate(), p.a, p.c))
    for ai, x, y in zip(p.levels, al, be):
        lhs = z - ComplexPoly((0, ai))
        rhs = ComplexPoly.from_roots([x, y], p.c)
        assert lhs.max_diff(rhs) < 1e-14


def test_trivial_k0_line():
    line = build_line(AkParams(0, 0.0, 1.0, 1.0, (0.0,)))
    assert line.x == ComplexPoly((-1, 1))
    assert line.y == ComplexPoly((1, 1))
    assert line.z == ComplexPoly((-1, 0, 1))
    assert residual_ak(line, (0.0,)) == 0.0


def test_k1_example():
    line = build_line(AkParams(1, 0.0, 1.0, 1.0, (1.0, -1.0)))
    # alphas: + roots of u^2 - u - 1 and u^2 + u - 1
    assert sorted(a.real for a in line.alphas) == pytest.approx(sorted([GOLD, GOLD - 1]))
    assert residual_ak(line, (1.0, -1.0)) < 1e-15


@pytest.mark.parametrize("k", range(7))
def test_random_sweep(k):
    rng = np.random.default_rng(100 + k)
    worst = 0.0
    for _ in range(200):
        p = random_params(k, rng)
        line = build_line(p)
        assert line.x.degree == line.y.degree == k + 1 and line.z.degree == 2
        assert (line.x * line.y).degree == 2 * k + 2 == level_product(line.z, p.levels).degree
        worst = max(worst, residual_ak(line, p.levels))
    assert worst <= 1e-10


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=0, max_value=5),
    st.floats(min_value=0.1, max_value=10),
    st.floats(min_value=-math.pi, max_value=math.pi),
    st.integers(min_value=0, max_value=2**31),
)
def test_A_gauge(k, lam, phase, seed):
    p = random_params(k, np.random.default_rng(seed))
    line = build_line(p)
    q = AkParams(p.k, p.a, p.c, p.A * lam * complex(math.cos(phase), math.sin(phase)), p.levels)
    scaled = build_line(q)
    mu = q.A / p.A
    assert scaled.x.max_diff(line.x * mu) <= 1e-12 * max(1, line.x.max_coeff() * abs(mu))
    assert scaled.y.max_diff(line.y * (1 / mu)) <= 1e-12 * max(1, line.y.max_coeff() / abs(mu))
    assert residual_ak(scaled, p.levels) <= 1e-10


def test_perturbed_line_is_rejected():
    p = random_params(3, np.random.default_rng(7))
    line = build_line(p)
    bad = TwistorLineAk(line.z, line.x + 1, line.y, line.alphas, line.betas)
    assert residual_ak(bad, p.levels) > 1e-3


def test_swapping_one_pair_still_solves_but_changes_x():
    p = random_params(3, np.random.default_rng(8))
    line = build_line(p)
    al, be = list(line.alphas), list(line.betas)
    al[1], be[1] = be[1], al[1]
    x = ComplexPoly.from_roots(al, p.A)
    y = ComplexPoly.from_roots(be, p.c ** (p.k + 1) / p.A)
    swapped = TwistorLineAk(line.z, x, y, tuple(al), tuple(be))
    assert residual_ak(swapped, p.levels) <= 1e-10
    assert x.max_diff(line.x) > 1e-3


def test_AB_product():
    p = random_params(4, np.random.default_rng(9))
    line = build_line(p)
    assert line.x.leading * line.y.leading == pytest.approx(p.c ** (p.k + 1), rel=1e-14)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(k=1, a=0.0, c=1.0, A=1.0, levels=(0.0, 0.0)),
        dict(k=1, a=0.0, c=1.0, A=1.0, levels=(0.0,)),
        dict(k=0, a=0.0, c=1.0, A=0.0, levels=(0.0,)),
        dict(k=0, a=1j, c=1.0, A=1.0, levels=(0.0,)),
    ],
)
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        AkParams(**kwargs)


def test_zero_c_is_rejected():
    with pytest.raises(NonPositiveDiscriminant):
        split_roots(AkParams(0, 0.0, 0.0, 1.0, (0.0,)))


def test_residual_dk_rejects_non_solution():
    z = ComplexPoly((1, 0.3, -2, 0.5j, 1))
    zero = ComplexPoly(())
    assert residual_dk(zero, zero, z, (0.0, 0.0, 0.0, 0.0)) == pytest.approx(1.0)


def test_residual_dk_degenerate_identity():
    zero = ComplexPoly(())
    assert residual_dk(ComplexPoly((1, 2, 3)), zero, zero, (0.0, 0.0)) == 0.0


def test_residual_dk_accepts_constructed_identity():
    # one level, y = 0: the expression collapses to z (x^2 + 1), killed by x = i
    z = ComplexPoly((1, 0.3, -2, 0.5j, 1))
    assert residual_dk(ComplexPoly((1j,)), ComplexPoly(()), z, (0.7,)) < 1e-15
    assert residual_dk(ComplexPoly((1j + 1e-3,)), ComplexPoly(()), z, (0.7,)) > 1e-4
