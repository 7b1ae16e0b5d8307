import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_channel
from mixchan.channel import MixedUnitaryChannel, ProductChannel, random_pure_states
from mixchan.functionals import abs_shift, power, xlogx
from mixchan.group import CyclicOrders, WeylLabel
from mixchan.majorization import (
    channel_majorized_report,
    karamata_gap,
    majorization_condition,
    majorization_condition_bruteforce,
    majorizes,
    marginal,
    partial_sum_slack,
    sort_desc,
    star,
    weak_majorize_leq,
)

prob_vectors = st.lists(st.floats(0.0, 1.0), min_size=1, max_size=8).filter(lambda v: sum(v) > 1e-3).map(
    lambda v: np.array(v) / sum(v)
)


def test_sort_desc_examples():
    np.testing.assert_array_equal(sort_desc([0.25, 0.75]), [0.75, 0.25])
    np.testing.assert_array_equal(sort_desc([1 / 3, 1 / 3, 1 / 3]), [1 / 3, 1 / 3, 1 / 3])
    np.testing.assert_array_equal(sort_desc([0.1, 0.7, 0.2]), [0.7, 0.2, 0.1])
    np.testing.assert_array_equal(sort_desc([0.5, -1e-13, 0.5]), [0.5, 0.5, 0.0])
    with pytest.raises(ValueError):
        sort_desc([0.5, 0.4])
    with pytest.raises(ValueError):
        sort_desc([1.2, -0.2])


def test_weak_majorize_examples():
    assert weak_majorize_leq([0.5, 0.5], [1, 0])
    assert not weak_majorize_leq([1, 0], [0.5, 0.5])
    assert weak_majorize_leq([0.6, 0.4], [0.6, 0.4])
    assert weak_majorize_leq([0.5, 0.5], [1.0])


@given(prob_vectors)
def test_uniform_and_delta_are_extremes(q):
    n = len(q)
    assert weak_majorize_leq(np.full(n, 1 / n), q)
    assert weak_majorize_leq(q, np.eye(n)[0])


def test_star_examples():
    np.testing.assert_allclose(star([1, 0], [0.7, 0.3]), [0.7, 0.3, 0, 0])
    np.testing.assert_allclose(star([0.75, 0.25], [0.75, 0.25]), [0.5625, 0.1875, 0.1875, 0.0625])
    np.testing.assert_allclose(star(np.full(2, 0.5), np.full(3, 1 / 3)), np.full(6, 1 / 6))


@given(prob_vectors, prob_vectors, prob_vectors)
def test_star_commutative_associative(p, q, r):
    np.testing.assert_array_equal(star(p, q), star(q, p))
    np.testing.assert_allclose(star(star(p, q), r), star(p, star(q, r)), atol=1e-15)
    assert abs(star(p, q).sum() - 1) <= 1e-12
    assert len(star(p, q)) == len(p) * len(q)


def test_marginal_examples(qubit_example):
    np.testing.assert_allclose(marginal(qubit_example), [0.75, 0.25])
    np.testing.assert_array_equal(marginal(MixedUnitaryChannel.identity([3])), [1, 0, 0])
    np.testing.assert_allclose(marginal(MixedUnitaryChannel.uniform([2, 2])), np.full(4, 0.25))


@settings(deadline=None)
@given(st.sampled_from([(2,), (3,), (2, 2), (4,)]), st.integers(0, 2**32 - 1))
def test_marginal_sums_to_one(orders, seed):
    ch = random_channel(orders, np.random.default_rng(seed), 0.4)
    m = marginal(ch)
    assert abs(m.sum() - 1) <= 1e-12
    assert np.all(np.diff(m) <= 0)


def test_condition_examples(qubit_example):
    assert majorization_condition(MixedUnitaryChannel.from_cosets([2, 2], [0.1, 0.2, 0.3, 0.4]))
    res = majorization_condition(MixedUnitaryChannel.identity([2]))
    assert not res and res.clause == "uniformity"
    bad = MixedUnitaryChannel.from_labels(
        [2], {((0,), (0,)): 0.5, ((0,), (1,)): 0.25, ((1,), (0,)): 0.125, ((1,), (1,)): 0.125}
    )
    for check in (majorization_condition, majorization_condition_bruteforce):
        res = check(bad)
        assert not res.satisfied
        assert res.witness == (WeylLabel((0,), (0,)), WeylLabel((0,), (1,)))
    # the 3/8,3/8,1/8,1/8 table is coset-uniform
    assert majorization_condition(qubit_example)


def _table_family(orders, rng):
    n = CyclicOrders(orders).n
    kind = rng.integers(4)
    if kind == 0:
        return MixedUnitaryChannel.from_cosets(orders, rng.dirichlet(np.ones(n)))
    if kind == 1:
        base = np.repeat(rng.dirichlet(np.ones(n))[:, None] / n, n, axis=1)
        base[rng.integers(n), rng.integers(n)] += 10 ** rng.uniform(-14, -2)
        return MixedUnitaryChannel(orders, base / base.sum())
    if kind == 2:
        p = np.zeros(n)
        p[rng.integers(n)] = 1.0
        return MixedUnitaryChannel.from_cosets(orders, p)
    return random_channel(orders, rng, sparsity=rng.uniform(0, 0.8))


def test_reduction_agrees_with_literal_quantifiers(rng):
    for orders in [(2,), (3,), (2, 2), (4,)]:
        for _ in range(60):
            ch = _table_family(orders, rng)
            fast = majorization_condition(ch)
            slow = majorization_condition_bruteforce(ch)
            assert fast.satisfied == slow.satisfied
            if not slow.satisfied:
                x, y = slow.witness
                assert ch.weight(x) > ch.weight(y)


def test_karamata_examples():
    assert karamata_gap([0.5, 0.5], [1, 0], power(2)) == pytest.approx(0.5, abs=1e-15)
    for f in (power(2), xlogx(), abs_shift(0.4)):
        assert karamata_gap([0.6, 0.3, 0.1], [0.6, 0.3, 0.1], f) == 0.0


def mix_by_transpositions(q, rng, steps=6):
    p = np.array(q, dtype=float)
    for _ in range(steps):
        i, j = rng.choice(len(p), 2, replace=False)
        lam = rng.uniform()
        pi, pj = p[i], p[j]
        p[i], p[j] = lam * pi + (1 - lam) * pj, lam * pj + (1 - lam) * pi
    return p


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_karamata_property(length, seed):
    rng = np.random.default_rng(seed)
    q = rng.dirichlet(np.ones(length) * rng.uniform(0.2, 3))
    p = mix_by_transpositions(q, rng)
    assert majorizes(q, p, atol=1e-12)
    for f in (power(2), power(3), xlogx(), abs_shift(0.4), abs_shift(0.1)):
        assert karamata_gap(p, q, f) >= -1e-10


def test_partial_sum_slack_padding():
    slack = partial_sum_slack([0.75, 0.25], np.array([[0.5, 0.3, 0.2]]))
    np.testing.assert_allclose(slack, [[0.25, 0.2]])


def test_channel_report_examples(qubit, rng):
    p = marginal(qubit)
    states = random_pure_states(2, 10_000, rng)
    rep = channel_majorized_report(qubit, p, states)
    assert rep.satisfied and rep.worst_margin >= -1e-10
    basis = channel_majorized_report(qubit, p, np.eye(2))
    assert np.max(np.abs(basis.margins)) <= 1e-15
    prod = ProductChannel([qubit, qubit])
    rep = channel_majorized_report(prod, star(p, p), random_pure_states(4, 10_000, rng))
    assert rep.satisfied


def test_report_detects_violation(rng):
    # the identity channel keeps pure outputs, so no nontrivial P bounds it
    rep = channel_majorized_report(MixedUnitaryChannel.identity([2]), [0.75, 0.25], random_pure_states(2, 10, rng))
    assert not rep.satisfied
    assert rep.worst_margin == pytest.approx(-0.25)
    assert rep.witness["k"] == 1
    with pytest.raises(ValueError):
        channel_majorized_report(MixedUnitaryChannel.identity([2]), [1.0], np.ones((1, 3)))


def test_report_independent_of_batching(rng):
    ch = MixedUnitaryChannel.from_cosets([3], [0.6, 0.3, 0.1])
    states = random_pure_states(3, 500, rng)
    a = channel_majorized_report(ch, marginal(ch), states, batch=7)
    b = channel_majorized_report(ch, marginal(ch), states, batch=4096)
    assert a.worst_margin == b.worst_margin and a.witness == b.witness


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_composition_of_embedded_factors_is_majorized_by_star(seed):
    rng = np.random.default_rng(seed)
    phi = MixedUnitaryChannel.from_cosets([2], rng.dirichlet(np.ones(2)))
    psi = MixedUnitaryChannel.from_cosets([3], rng.dirichlet(np.ones(3)))
    prod = ProductChannel([phi, psi])
    states = random_pure_states(6, 300, rng)
    stage_phi, stage_psi = prod.embedded_factor(0), prod.embedded_factor(1)
    p, q = marginal(phi), marginal(psi)
    if channel_majorized_report(stage_phi, p, states).satisfied and channel_majorized_report(stage_psi, q, states).satisfied:
        assert channel_majorized_report(prod, star(p, q), states).satisfied
