import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_channel
from mixchan.channel import MixedUnitaryChannel, random_density_matrix, random_pure_states
from mixchan.functionals import (
    abs_shift,
    closed_form_profile,
    convex_trace,
    eigvals_desc,
    hinge,
    holevo_quantity,
    is_convex_on_grid,
    power,
    product_closed_form,
    von_neumann_entropy,
    xlogx,
)
from mixchan.majorization import marginal, star

H_QUBIT = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25))


def test_builtin_functions_convex():
    for f in (power(1.5), power(2), power(3), xlogx(), xlogx(math.e), abs_shift(0.4), hinge(0.3)):
        assert is_convex_on_grid(f)
    assert xlogx()(0.0) == 0.0
    with pytest.raises(ValueError):
        power(1.0)
    concave = type(power(2))("sqrt", np.sqrt)
    assert not is_convex_on_grid(concave)


def test_derivatives_match_finite_differences():
    t = np.linspace(0.05, 0.95, 19)
    h = 1e-6
    for f in (power(2), power(3.5), xlogx(), xlogx(math.e)):
        fd = (f(t + h) - f(t - h)) / (2 * h)
        np.testing.assert_allclose(f.derivative(t), fd, rtol=1e-7)


def test_eigvals_desc(rng):
    np.testing.assert_allclose(eigvals_desc(np.diag([0.25, 0.75])).eigenvalues, [0.75, 0.25])
    np.testing.assert_allclose(eigvals_desc(np.eye(4) / 4).eigenvalues, np.full(4, 0.25))
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    res = eigvals_desc(a + a.conj().T)
    assert res.residual <= 1e-10
    assert np.all(np.diff(res.eigenvalues) <= 0)
    assert eigvals_desc(np.diag([1.0, -1e-12])).eigenvalues[1] == 0.0
    with pytest.raises(ValueError):
        eigvals_desc(np.array([[0, 1], [0, 0]]))


def test_convex_trace_examples():
    assert convex_trace(np.eye(2) / 2, power(2)) == pytest.approx(0.5, abs=1e-15)
    assert convex_trace(np.diag([0.75, 0.25]), xlogx()) == pytest.approx(-0.811278, abs=1e-6)
    assert convex_trace(np.diag([0.75, 0.25]), xlogx()) == pytest.approx(-H_QUBIT, abs=1e-15)
    f = np.array([0.6, 0.8j])
    assert convex_trace(np.outer(f, f.conj()), power(2)) == pytest.approx(1.0, abs=1e-14)


@settings(deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_convex_trace_entropy_sign(n, seed):
    rho = random_density_matrix(n, np.random.default_rng(seed))
    lam = np.linalg.eigvalsh(rho)
    ref = -sum(x * math.log2(x) for x in lam if x > 1e-15)
    assert convex_trace(rho, xlogx()) == pytest.approx(-ref, abs=1e-12)
    assert von_neumann_entropy(rho) == pytest.approx(ref, abs=1e-12)


def test_closed_form_profile_examples(qubit):
    prof = closed_form_profile(qubit)
    assert prof.s_min == pytest.approx(0.811278, abs=1e-6)
    assert prof.capacity == pytest.approx(0.188722, abs=1e-6)
    assert prof.lp_norm(2) == pytest.approx(math.sqrt(10) / 4, abs=1e-15)
    assert not prof.advisory

    delta = closed_form_profile(MixedUnitaryChannel.from_cosets([4], [1, 0, 0, 0]), ps=(2, 3))
    assert delta.s_min == 0.0 and delta.capacity == pytest.approx(2.0, abs=1e-15)
    assert delta.lp == {2.0: 1.0, 3.0: 1.0}

    unif = closed_form_profile(MixedUnitaryChannel.uniform([3]), ps=(2, 3))
    assert unif.s_min == pytest.approx(math.log2(3), abs=1e-14)
    assert unif.capacity == pytest.approx(0.0, abs=1e-14)
    for p in (2.0, 3.0):
        assert unif.lp[p] == pytest.approx(3 ** ((1 - p) / p), abs=1e-14)

    flagged = closed_form_profile(MixedUnitaryChannel.identity([2]))
    assert flagged.advisory


def test_closed_form_nats(qubit):
    prof = closed_form_profile(qubit, base=math.e)
    assert prof.s_min == pytest.approx(-(0.75 * math.log(0.75) + 0.25 * math.log(0.25)))
    assert prof.capacity + prof.s_min == pytest.approx(math.log(2), abs=1e-15)


@settings(deadline=None)
@given(st.sampled_from([(2,), (3,), (2, 2), (5,), (2, 3)]), st.integers(0, 2**32 - 1))
def test_capacity_identity(orders, seed):
    rng = np.random.default_rng(seed)
    ch = random_channel(orders, rng, 0.5)
    prof = closed_form_profile(ch)
    assert abs(prof.capacity + prof.s_min - math.log2(ch.n)) <= 1e-12


def test_product_closed_form_examples(qubit, qutrit):
    prof = product_closed_form([qubit, qubit])
    assert prof.s_min == pytest.approx(1.622556, abs=1e-6)
    assert prof.capacity == pytest.approx(0.377444, abs=1e-6)
    assert prof.lp[2.0] == pytest.approx(0.625, abs=1e-15)
    single = product_closed_form([qubit])
    base = closed_form_profile(qubit)
    assert single.s_min == base.s_min and single.capacity == base.capacity and single.lp == base.lp
    delta = MixedUnitaryChannel.from_cosets([3], [1, 0, 0])
    with_delta = product_closed_form([qubit, delta])
    assert with_delta.s_min == pytest.approx(base.s_min, abs=1e-15)
    assert with_delta.capacity == pytest.approx(base.capacity + math.log2(3), abs=1e-14)
    assert product_closed_form([qubit, MixedUnitaryChannel.identity([2])]).advisory


@settings(deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_product_route_matches_star_route(seed):
    rng = np.random.default_rng(seed)
    chans = [MixedUnitaryChannel.from_cosets([p], rng.dirichlet(np.ones(p))) for p in (2, 3, 2)]
    prod = product_closed_form(chans, ps=(2, 3))
    combined = star(star(marginal(chans[0]), marginal(chans[1])), marginal(chans[2]))
    direct = closed_form_profile(MixedUnitaryChannel.from_cosets([12], combined), ps=(2, 3))
    assert abs(prod.s_min - direct.s_min) <= 1e-12
    assert abs(prod.capacity - direct.capacity) <= 1e-12
    for p in (2.0, 3.0):
        assert abs(prod.lp[p] - direct.lp[p]) <= 1e-12


@pytest.mark.parametrize("ps", [(3,), (2, 2), (4,), (2, 3)])
def test_basis_states_attain_marginal(ps, rng):
    n = int(np.prod(ps))
    ch = MixedUnitaryChannel.from_cosets(ps, rng.dirichlet(np.ones(n)))
    p = marginal(ch)
    for f in (power(2), power(3), xlogx(), abs_shift(0.2)):
        target = float(np.sum(f(p)))
        for k in range(n):
            e = np.zeros(n)
            e[k] = 1
            assert abs(convex_trace(ch.apply_to_pure(e), f) - target) <= 1e-12


def test_holevo_of_basis_ensemble_equals_capacity(qubit, qutrit):
    for ch in (qubit, qutrit):
        n = ch.n
        chi = holevo_quantity(ch, np.full(n, 1 / n), np.eye(n))
        assert abs(chi - closed_form_profile(ch).capacity) <= 1e-10


def test_holevo_bounded_by_capacity_for_random_ensembles(qutrit, rng):
    cap = closed_form_profile(qutrit).capacity
    for _ in range(20):
        states = random_pure_states(3, 4, rng)
        prior = rng.dirichlet(np.ones(4))
        assert holevo_quantity(qutrit, prior, states) <= cap + 1e-10
