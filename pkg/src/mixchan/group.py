"""Finite Abelian groups Z_{p_1} x ... x Z_{p_m} and their shift/clock (Weyl) representation.

Basis vectors ``e_K`` are labelled by multi-indices ``K = (k_1, ..., k_m)`` with
``0 <= k_j < p_j`` and linearized row-major (``k_1`` varies slowest), so the
representation of a concatenation of orders is the Kronecker product of the
representations of its parts.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence

import numpy as np

DEFAULT_DIM_LIMIT = 64
UNITARY_ATOL = 1e-12


class DimensionLimitError(ValueError):
    """Raised when a Hilbert-space dimension exceeds the configured cap."""


def dim_limit() -> int:
    """Current dimension cap; ``MIXCHAN_DIM_LIMIT`` overrides the default of 64."""
    raw = os.environ.get("MIXCHAN_DIM_LIMIT")
    if raw is None:
        return DEFAULT_DIM_LIMIT
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"MIXCHAN_DIM_LIMIT must be an integer, got {raw!r}") from exc
    if value < 2:
        raise ValueError(f"MIXCHAN_DIM_LIMIT must be >= 2, got {value}")
    return value


def check_dimension(n: int) -> None:
    limit = dim_limit()
    if n > limit:
        raise DimensionLimitError(f"dimension {n} exceeds limit {limit} (set MIXCHAN_DIM_LIMIT)")


MultiIndex = tuple  # tuple[int, ...], components reduced modulo the orders


class WeylLabel(NamedTuple):
    """Projective label of the group element (prod U_j^{a_j}) (prod T_j^{b_j})."""

    a: tuple
    b: tuple

    def __str__(self) -> str:
        return f"(a={list(self.a)}, b={list(self.b)})"


@dataclass(frozen=True)
class CyclicOrders:
    """The group S = Z_{p_1} x ... x Z_{p_m}; ``n`` is the Hilbert-space dimension."""

    orders: tuple

    def __init__(self, orders: Sequence[int]):
        orders = tuple(int(p) for p in orders)
        if not orders:
            raise ValueError("at least one cyclic factor is required")
        if any(p < 2 for p in orders):
            raise ValueError(f"every order must be >= 2, got {orders}")
        object.__setattr__(self, "orders", orders)
        check_dimension(self.n)

    @property
    def m(self) -> int:
        return len(self.orders)

    @property
    def n(self) -> int:
        return int(np.prod(self.orders))

    def __iter__(self):
        return iter(self.orders)

    def __add__(self, other: "CyclicOrders") -> "CyclicOrders":
        return CyclicOrders(self.orders + other.orders)

    @cached_property
    def index_table(self) -> np.ndarray:
        """All multi-indices in linear order, shape (n, m)."""
        table = np.array(list(itertools.product(*(range(p) for p in self.orders))), dtype=np.int64)
        table.setflags(write=False)
        return table

    def multi_indices(self) -> Iterator[MultiIndex]:
        return (tuple(int(k) for k in row) for row in self.index_table)

    def labels(self) -> Iterator[WeylLabel]:
        """All n^2 labels, shift part slowest."""
        for a in self.multi_indices():
            for b in self.multi_indices():
                yield WeylLabel(a, b)

    def reduce(self, index: Sequence[int]) -> MultiIndex:
        if len(index) != self.m:
            raise ValueError(f"multi-index {tuple(index)} has wrong length for orders {self.orders}")
        return tuple(int(k) % p for k, p in zip(index, self.orders))

    def validate(self, index: Sequence[int]) -> MultiIndex:
        index = tuple(int(k) for k in index)
        if len(index) != self.m or any(not 0 <= k < p for k, p in zip(index, self.orders)):
            raise ValueError(f"invalid multi-index {index} for orders {self.orders}")
        return index

    def add(self, first: Sequence[int], second: Sequence[int]) -> MultiIndex:
        return self.reduce([x + y for x, y in zip(first, second)])

    def linear(self, index: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(self.validate(index)), self.orders))

    def label_index(self, label: WeylLabel) -> tuple[int, int]:
        """Row/column of ``label`` in an (n, n) weight table indexed [a, b]."""
        return self.linear(label.a), self.linear(label.b)

    def label_at(self, ia: int, ib: int) -> WeylLabel:
        table = self.index_table
        return WeylLabel(tuple(int(k) for k in table[ia]), tuple(int(k) for k in table[ib]))

    @cached_property
    def shift_permutations(self) -> np.ndarray:
        """``perm[ia, K] = lin(K + a)``: the basis map of the shift part a, shape (n, n)."""
        table = self.index_table
        moved = (table[:, None, :] + table[None, :, :]) % np.array(self.orders)
        perm = np.ravel_multi_index(tuple(np.moveaxis(moved, -1, 0)), self.orders)
        perm.setflags(write=False)
        return perm

    @cached_property
    def clock_phases(self) -> np.ndarray:
        """``phases[ib, K] = exp(2 pi i sum_j b_j k_j / p_j)``, shape (n, n)."""
        table = self.index_table
        frac = (table[:, None, :] * table[None, :, :]) / np.array(self.orders, dtype=float)
        phases = np.exp(2j * np.pi * (frac.sum(axis=-1) % 1.0))
        phases.setflags(write=False)
        return phases


def _generator_axis(orders: CyclicOrders, j: int) -> int:
    if not 1 <= j <= orders.m:
        raise IndexError(f"generator index {j} out of range 1..{orders.m}")
    return j - 1


def shift_matrix(orders: CyclicOrders, j: int) -> np.ndarray:
    """U_j: the +1 cyclic shift of component ``j`` (1-based)."""
    axis = _generator_axis(orders, j)
    unit = np.zeros(orders.m, dtype=np.int64)
    unit[axis] = 1
    ia = orders.linear(unit)
    n = orders.n
    mat = np.zeros((n, n), dtype=complex)
    mat[orders.shift_permutations[ia], np.arange(n)] = 1.0
    return mat


def clock_matrix(orders: CyclicOrders, j: int) -> np.ndarray:
    """T_j = diag(exp(2 pi i k_j / p_j))."""
    axis = _generator_axis(orders, j)
    k = orders.index_table[:, axis]
    return np.diag(np.exp(2j * np.pi * k / orders.orders[axis]))


def generators(orders: CyclicOrders) -> list[np.ndarray]:
    """[U_1, ..., U_m, T_1, ..., T_m]."""
    return [shift_matrix(orders, j) for j in range(1, orders.m + 1)] + [
        clock_matrix(orders, j) for j in range(1, orders.m + 1)
    ]


def weyl_operator(orders: CyclicOrders, label: WeylLabel) -> np.ndarray:
    """W(a, b) = (prod_j U_j^{a_j}) (prod_j T_j^{b_j}), i.e. W e_K = phase_b(K) e_{K+a}."""
    ia, ib = orders.label_index(WeylLabel(tuple(label.a), tuple(label.b)))
    n = orders.n
    mat = np.zeros((n, n), dtype=complex)
    mat[orders.shift_permutations[ia], np.arange(n)] = orders.clock_phases[ib]
    return mat


def is_unitary(mat: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    return bool(np.max(np.abs(mat @ mat.conj().T - np.eye(mat.shape[0]))) <= atol)


def commutant_dimension(unitaries: Sequence[np.ndarray], rtol: float = 1e-10) -> int:
    """Dimension of {x : xU = Ux for every U in ``unitaries``}.

    Computed as the nullity of the stacked linear maps vec(x) -> vec(xU - Ux).
    """
    mats = [np.asarray(u, dtype=complex) for u in unitaries]
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].shape[0]
    for u in mats:
        if u.shape != (n, n):
            raise ValueError(f"dimension mismatch: expected {(n, n)}, got {u.shape}")
    eye = np.eye(n)
    # column-major vec: vec(xU) = (U^T kron I) vec(x), vec(Ux) = (I kron U) vec(x)
    stacked = np.vstack([np.kron(u.T, eye) - np.kron(eye, u) for u in mats])
    sv = np.linalg.svd(stacked, compute_uv=False)
    rank = int(np.sum(sv > rtol * max(1.0, sv[0])))
    return n * n - rank
