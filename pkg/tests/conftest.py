import numpy as np
import pytest

from mixchan import CyclicOrders, MixedUnitaryChannel, weyl_operator


def direct_apply(channel, rho):
    """Reference sum pi W rho W^* over explicitly built Weyl matrices."""
    out = np.zeros_like(np.asarray(rho, dtype=complex))
    for label, w in channel.support():
        u = weyl_operator(channel.orders, label)
        out += w * u @ rho @ u.conj().T
    return out


def direct_adjoint(channel, x):
    out = np.zeros_like(np.asarray(x, dtype=complex))
    for label, w in channel.support():
        u = weyl_operator(channel.orders, label)
        out += w * u.conj().T @ x @ u
    return out


def random_channel(orders, rng, sparsity=0.0):
    orders = CyclicOrders(orders)
    w = rng.random((orders.n, orders.n))
    w[rng.random(w.shape) < sparsity] = 0.0
    w[0, 0] += 1e-3
    return MixedUnitaryChannel(orders, w / w.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def qubit():
    return MixedUnitaryChannel.from_cosets([2], [0.75, 0.25])


@pytest.fixture
def qutrit():
    return MixedUnitaryChannel.from_cosets([3], [0.5, 0.3, 0.2])


@pytest.fixture
def qubit_example():
    return MixedUnitaryChannel.from_labels(
        [2], {((0,), (0,)): 3 / 8, ((0,), (1,)): 3 / 8, ((1,), (0,)): 1 / 8, ((1,), (1,)): 1 / 8}
    )


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(RESULTS):
        passed, detail = RESULTS[name]
        terminalreporter.write_line(f"{name}: {'PASS' if passed else 'FAIL'}  {detail}")
