"""Mixed-unitary channels rho -> sum_{a,b} pi_{a,b} W(a,b) rho W(a,b)^* over a Weyl group.

Weights live in a dense (n, n) table indexed ``[lin(a), lin(b)]``.  Global
phases of group elements do not affect conjugation, so each projective label
(a, b) carries the total weight of its central fibre.

The action factorizes over cosets of the clock subgroup: for a fixed shift a,
``sum_b pi_{a,b} D_b X D_b^*`` is the entrywise product of X with a mask
``M_a[K, L] = sum_b pi_{a,b} phase_b(K) conj(phase_b(L))``, after which the
shift acts as a basis permutation.  Every ``*_stack`` helper accepts arrays of
shape (..., n, n).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .group import CyclicOrders, WeylLabel, check_dimension

WEIGHT_ATOL = 1e-12
HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
PSD_ATOL = 1e-10
NORM_ATOL = 1e-12


class InvalidStateError(ValueError):
    """A matrix or vector failed the density-matrix / pure-state invariants."""


def validate_density_matrix(rho, n: int | None = None) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
    if n is not None and rho.shape[0] != n:
        raise InvalidStateError(f"dimension mismatch: expected {n}, got {rho.shape[0]}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITIAN_ATOL:
        raise InvalidStateError(f"not Hermitian (max deviation {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_ATOL:
        raise InvalidStateError(f"trace {tr!r} differs from 1")
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -PSD_ATOL:
        raise InvalidStateError(f"negative eigenvalue {lam_min:.3g}")
    return rho


def validate_pure_state(f, n: int | None = None) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1:
        raise InvalidStateError(f"pure state must be a vector, got shape {f.shape}")
    if n is not None and f.shape[0] != n:
        raise InvalidStateError(f"dimension mismatch: expected {n}, got {f.shape[0]}")
    norm = np.linalg.norm(f)
    if abs(norm - 1.0) > NORM_ATOL:
        raise InvalidStateError(f"norm {norm!r} differs from 1")
    return f


def random_pure_states(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar-random unit vectors in C^n as rows, shape (count, n)."""
    z = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def _check_square(x: np.ndarray, n: int) -> None:
    if x.shape[-2:] != (n, n):
        raise ValueError(f"dimension mismatch: expected trailing shape {(n, n)}, got {x.shape}")


class MixedUnitaryChannel:
    """Mixed-unitary channel over the Weyl group of ``orders``.

    Parameters
    ----------
    orders : CyclicOrders or sequence of int
    weights : array_like, shape (n, n)
        ``weights[lin(a), lin(b)]`` is the probability of W(a, b).
    """

    def __init__(self, orders, weights, atol: float = WEIGHT_ATOL):
        self.orders = orders if isinstance(orders, CyclicOrders) else CyclicOrders(orders)
        n = self.orders.n
        w = np.array(weights, dtype=float)
        if w.shape != (n, n):
            raise ValueError(f"weight table must have shape {(n, n)}, got {w.shape}")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        total = w.sum()
        if abs(total - 1.0) > atol:
            raise ValueError(f"weights sum to {float(total)!r}, not 1")
        w.setflags(write=False)
        self.weights = w

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_labels(cls, orders, weights: Mapping, atol: float = WEIGHT_ATOL) -> "MixedUnitaryChannel":
        """From a mapping ``{(a, b): w}`` (or ``WeylLabel -> w``); unlisted labels get 0."""
        orders = orders if isinstance(orders, CyclicOrders) else CyclicOrders(orders)
        table = np.zeros((orders.n, orders.n))
        for label, w in weights.items():
            a, b = label
            a = (a,) if np.isscalar(a) else a
            b = (b,) if np.isscalar(b) else b
            table[orders.label_index(WeylLabel(tuple(a), tuple(b)))] += w
        return cls(orders, table, atol=atol)

    @classmethod
    def from_cosets(cls, orders, marginals, atol: float = WEIGHT_ATOL) -> "MixedUnitaryChannel":
        """Spread each coset probability uniformly over its n clock labels.

        ``marginals`` is either a length-n array indexed by lin(a) or a mapping
        ``{a: p}``.
        """
        orders = orders if isinstance(orders, CyclicOrders) else CyclicOrders(orders)
        n = orders.n
        if isinstance(marginals, Mapping):
            p = np.zeros(n)
            for a, value in marginals.items():
                a = (a,) if np.isscalar(a) else a
                p[orders.linear(a)] += value
        else:
            p = np.asarray(marginals, dtype=float)
            if p.shape != (n,):
                raise ValueError(f"expected {n} coset probabilities, got shape {p.shape}")
        return cls(orders, np.repeat(p[:, None] / n, n, axis=1), atol=atol)

    @classmethod
    def identity(cls, orders) -> "MixedUnitaryChannel":
        """All weight on W(0, 0)."""
        orders = orders if isinstance(orders, CyclicOrders) else CyclicOrders(orders)
        table = np.zeros((orders.n, orders.n))
        table[0, 0] = 1.0
        return cls(orders, table)

    @classmethod
    def uniform(cls, orders) -> "MixedUnitaryChannel":
        orders = orders if isinstance(orders, CyclicOrders) else CyclicOrders(orders)
        n = orders.n
        return cls(orders, np.full((n, n), 1.0 / n**2))

    # -- structure ----------------------------------------------------------

    @property
    def n(self) -> int:
        return self.orders.n

    def weight(self, label: WeylLabel) -> float:
        return float(self.weights[self.orders.label_index(label)])

    def coset_weights(self) -> np.ndarray:
        """Unsorted coset marginals p_[a] = sum_b pi_{a,b}, indexed by lin(a)."""
        return self.weights.sum(axis=1)

    def support(self) -> list[tuple[WeylLabel, float]]:
        ia, ib = np.nonzero(self.weights)
        return [(self.orders.label_at(i, j), float(self.weights[i, j])) for i, j in zip(ia, ib)]

    @cached_property
    def _active_cosets(self) -> np.ndarray:
        return np.nonzero(self.weights.sum(axis=1) > 0)[0]

    @cached_property
    def _masks(self) -> np.ndarray:
        phases = self.orders.clock_phases
        masks = np.einsum("bk,ab,bl->akl", phases, self.weights, phases.conj(), optimize=True)
        return masks[self._active_cosets]

    @cached_property
    def _inverse_perms(self) -> np.ndarray:
        perms = self.orders.shift_permutations[self._active_cosets]
        return np.argsort(perms, axis=1)

    # -- action ---------------------------------------------------------------

    def apply_stack(self, x: np.ndarray) -> np.ndarray:
        """Channel action on every trailing (n, n) block of ``x``."""
        x = np.asarray(x, dtype=complex)
        _check_square(x, self.n)
        out = np.zeros_like(x)
        for mask, inv in zip(self._masks, self._inverse_perms):
            y = mask * x
            out += y[..., inv[:, None], inv[None, :]]
        return out

    def adjoint_stack(self, x: np.ndarray) -> np.ndarray:
        """Adjoint action sum pi W^* x W on every trailing (n, n) block."""
        x = np.asarray(x, dtype=complex)
        _check_square(x, self.n)
        out = np.zeros_like(x)
        for mask, perm in zip(self._masks, self.orders.shift_permutations[self._active_cosets]):
            out += mask.conj() * x[..., perm[:, None], perm[None, :]]
        return out

    def apply(self, rho, check: bool = True) -> np.ndarray:
        """Phi(rho); ``rho`` is validated as a density matrix unless ``check=False``."""
        rho = validate_density_matrix(rho, self.n) if check else np.asarray(rho, dtype=complex)
        _check_square(rho, self.n)
        return self.apply_stack(rho)

    def apply_to_pure(self, f) -> np.ndarray:
        """Phi(|f><f|) accumulated from the rank-one terms of the vectors W(a, b) f."""
        f = validate_pure_state(f, self.n)
        ia, ib = np.nonzero(self.weights)
        # W(a,b) f = P_a (phase_b * f), scaled by sqrt(pi)
        scaled = np.sqrt(self.weights[ia, ib])[:, None] * self.orders.clock_phases[ib] * f[None, :]
        vecs = np.zeros_like(scaled)
        rows = np.arange(len(ia))[:, None]
        vecs[rows, self.orders.shift_permutations[ia]] = scaled
        return vecs.T @ vecs.conj()

    def apply_to_pure_batch(self, states: np.ndarray) -> np.ndarray:
        """Phi(|f><f|) for each row f of ``states``, shape (count, n, n)."""
        states = np.asarray(states, dtype=complex)
        if states.ndim != 2 or states.shape[1] != self.n:
            raise ValueError(f"states must have shape (count, {self.n}), got {states.shape}")
        return self.apply_stack(states[:, :, None] * states.conj()[:, None, :])

    def adjoint_apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.ndim != 2:
            raise ValueError(f"expected a matrix, got shape {x.shape}")
        _check_square(x, self.n)
        herm = np.max(np.abs(x - x.conj().T))
        if herm > 1e-10:
            raise ValueError(f"adjoint_apply expects a Hermitian matrix (deviation {herm:.3g})")
        return self.adjoint_stack(x)

    def __call__(self, rho) -> np.ndarray:
        return self.apply(rho)

    def __repr__(self) -> str:
        return f"MixedUnitaryChannel(orders={self.orders.orders}, support={int(np.count_nonzero(self.weights))})"


def conditional_expectation(orders, rho, check: bool = True) -> np.ndarray:
    """Group average (1/n^2) sum over all labels of W rho W^*."""
    return MixedUnitaryChannel.uniform(orders).apply(rho, check=check)


def is_codimension_n(orders, rho, atol: float = 1e-12) -> bool:
    """True if the group average of ``rho`` equals Tr(rho) I / n within ``atol``."""
    orders = orders if isinstance(orders, CyclicOrders) else CyclicOrders(orders)
    rho = np.asarray(rho, dtype=complex)
    avg = MixedUnitaryChannel.uniform(orders).apply_stack(rho)
    target = np.trace(rho) * np.eye(orders.n) / orders.n
    return bool(np.max(np.abs(avg - target)) <= atol)


@dataclass(frozen=True)
class ProductChannel:
    """Tensor product of mixed-unitary channels, first factor the slowest index."""

    factors: tuple

    def __init__(self, factors: Sequence[MixedUnitaryChannel]):
        factors = tuple(factors)
        if not factors:
            raise ValueError("need at least one factor")
        check_dimension(int(np.prod([c.n for c in factors])))
        object.__setattr__(self, "factors", factors)

    @property
    def dims(self) -> tuple:
        return tuple(c.n for c in self.factors)

    @property
    def n(self) -> int:
        return int(np.prod(self.dims))

    @property
    def orders(self) -> CyclicOrders:
        return CyclicOrders(sum((c.orders.orders for c in self.factors), ()))

    @cached_property
    def joint(self) -> MixedUnitaryChannel:
        """The same channel expressed over the concatenated Weyl group.

        kron(W(a1, b1), W(a2, b2)) = W((a1, a2), (b1, b2)) in row-major order,
        so the weight table is the outer product of the factor tables.
        """
        table = self.factors[0].weights
        for c in self.factors[1:]:
            n1, n2 = table.shape[0], c.n
            table = np.einsum("ij,kl->ikjl", table, c.weights).reshape(n1 * n2, n1 * n2)
        return MixedUnitaryChannel(self.orders, table / table.sum())

    def embedded_factor(self, j: int) -> MixedUnitaryChannel:
        """Id x ... x Phi_j x ... x Id over the joint group."""
        n = self.n
        table = np.zeros((n, n))
        dims = self.dims
        idx = np.arange(dims[j]) * int(np.prod(dims[j + 1:]))
        table[np.ix_(idx, idx)] = self.factors[j].weights
        return MixedUnitaryChannel(self.orders, table)

    def apply(self, rho, check: bool = True) -> np.ndarray:
        return self.joint.apply(rho, check=check)

    def apply_to_pure(self, f) -> np.ndarray:
        return self.joint.apply_to_pure(f)

    def apply_to_pure_batch(self, states) -> np.ndarray:
        return self.joint.apply_to_pure_batch(states)

    def adjoint_apply(self, x) -> np.ndarray:
        return self.joint.adjoint_apply(x)


def tensor(channels: Sequence[MixedUnitaryChannel]):
    """Tensor product; a single channel is returned unchanged."""
    channels = list(channels)
    if len(channels) == 1:
        return channels[0]
    return ProductChannel(channels)


def _apply_on_factor(channel: MixedUnitaryChannel, rho: np.ndarray, dims: Sequence[int], j: int) -> np.ndarray:
    left = int(np.prod(dims[:j]))
    right = int(np.prod(dims[j + 1:]))
    d = dims[j]
    t = rho.reshape(left, d, right, left, d, right)
    # bring the factor's row/column axes to the end and act blockwise
    t = np.moveaxis(t, (1, 4), (-2, -1))
    t = channel.apply_stack(t)
    t = np.moveaxis(t, (-2, -1), (1, 4))
    return t.reshape(rho.shape)


def compose_as_stages(product, rho, order: Sequence[int] | None = None, check: bool = True) -> np.ndarray:
    """Apply Id x .. x Phi_j x .. x Id one factor at a time (default order M, ..., 1)."""
    if isinstance(product, MixedUnitaryChannel):
        return product.apply(rho, check=check)
    dims = product.dims
    rho = validate_density_matrix(rho, product.n) if check else np.asarray(rho, dtype=complex)
    order = range(len(dims) - 1, -1, -1) if order is None else order
    out = rho
    for j in order:
        out = _apply_on_factor(product.factors[j], out, dims, j)
    return out
