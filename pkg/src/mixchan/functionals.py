"""Spectral functionals Tr F(rho) and the closed-form output characteristics.

Logarithms default to base 2 (bits); pass ``base=np.e`` for nats.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .majorization import majorization_condition, marginal, star_all

ZERO_EIG = 1e-15
HERMITIAN_ATOL = 1e-10
CLAMP_ATOL = 1e-10


def _log(x, base: float):
    return np.log(x) / np.log(base)


@dataclass(frozen=True)
class ConvexFunction:
    """A convex F on [0, 1] with its derivative.

    ``smooth=False`` marks functions that must not be fed to gradient methods.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray] | None = None
    smooth: bool = True

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))

    def derivative(self, t):
        if self.deriv is None:
            raise ValueError(f"{self.name} has no derivative")
        return self.deriv(np.asarray(t, dtype=float))


def power(p: float) -> ConvexFunction:
    """t -> t**p for p > 1."""
    p = float(p)
    if p <= 1:
        raise ValueError(f"power requires p > 1, got {p}")
    return ConvexFunction(f"power:{p:g}", lambda t: np.power(t, p), lambda t: p * np.power(t, p - 1))


def xlogx(base: float = 2.0) -> ConvexFunction:
    """t -> t log t with 0 log 0 = 0; Tr F(rho) is minus the von Neumann entropy."""

    def func(t):
        t = np.asarray(t, dtype=float)
        safe = np.where(t > 0, t, 1.0)
        return np.where(t > 0, t * _log(safe, base), 0.0)

    def deriv(t):
        t = np.maximum(np.asarray(t, dtype=float), 1e-12)
        return (np.log(t) + 1.0) / np.log(base)

    return ConvexFunction("entropy" if base == 2.0 else f"xlogx:{base:g}", func, deriv)


def abs_shift(c: float) -> ConvexFunction:
    """t -> |t - c| (not differentiable at c)."""
    c = float(c)
    return ConvexFunction(f"abs_shift:{c:g}", lambda t: np.abs(t - c), lambda t: np.sign(t - c), smooth=False)


def hinge(c: float) -> ConvexFunction:
    """t -> max(t - c, 0), the extreme rays of convex functions on [0, 1] up to affine terms."""
    c = float(c)
    return ConvexFunction(f"hinge:{c:g}", lambda t: np.maximum(t - c, 0.0), lambda t: (t > c).astype(float), smooth=False)


def is_convex_on_grid(func: ConvexFunction, points: int = 100, atol: float = 1e-12) -> bool:
    """Midpoint test F((x+y)/2) <= (F(x)+F(y))/2 over all grid pairs in [0, 1]."""
    x = np.linspace(0.0, 1.0, points)
    fx = func(x)
    mid = func((x[:, None] + x[None, :]) / 2)
    return bool(np.all(mid <= (fx[:, None] + fx[None, :]) / 2 + atol))


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    residual: float


def eigvals_desc(h) -> SpectrumResult:
    """Eigenvalues of a Hermitian matrix in descending order, tiny negatives clamped to 0."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    dev = np.max(np.abs(h - h.conj().T))
    if dev > HERMITIAN_ATOL:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3g})")
    w, v = np.linalg.eigh(h)
    residual = float(np.max(np.abs((v * w) @ v.conj().T - h)))
    w = w[::-1]
    w = np.where((w < 0) & (w > -CLAMP_ATOL), 0.0, w)
    return SpectrumResult(w, residual)


def convex_trace(rho, func: ConvexFunction) -> float:
    """sum_j F(lambda_j) over the full spectrum of ``rho``."""
    lam = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    lam = np.where(lam < ZERO_EIG, 0.0, lam)
    return float(np.sum(func(lam)))


def von_neumann_entropy(rho, base: float = 2.0) -> float:
    return -convex_trace(rho, xlogx(base))


def shannon_entropy(p, base: float = 2.0) -> float:
    return -float(np.sum(xlogx(base)(np.asarray(p, dtype=float))))


def holevo_quantity(channel, prior, states, base: float = 2.0) -> float:
    """S(Phi(sum pi_i |f_i><f_i|)) - sum pi_i S(Phi(|f_i><f_i|)) for pure inputs ``states``."""
    prior = np.asarray(prior, dtype=float)
    states = np.atleast_2d(np.asarray(states, dtype=complex))
    if len(prior) != len(states):
        raise ValueError("prior and states must have the same length")
    outputs = channel.apply_to_pure_batch(states)
    average = np.tensordot(prior, outputs, axes=1)
    return von_neumann_entropy(average, base) - float(
        sum(w * von_neumann_entropy(out, base) for w, out in zip(prior, outputs))
    )


@dataclass
class ClosedFormProfile:
    """Closed-form characteristics computed from the descending coset marginal."""

    marginal: np.ndarray
    dimension: int
    s_min: float
    capacity: float
    lp: dict = field(default_factory=dict)
    condition_satisfied: bool = True
    base: float = 2.0

    @property
    def advisory(self) -> bool:
        """True when the majorization condition fails and the values are not guaranteed."""
        return not self.condition_satisfied

    def lp_norm(self, p: float) -> float:
        return float(self.lp[p]) if p in self.lp else lp_from_marginal(self.marginal, p)

    def convex_value(self, func: ConvexFunction) -> float:
        return float(np.sum(func(self.marginal)))

    def to_dict(self) -> dict:
        return {
            "marginal": self.marginal.tolist(),
            "dimension": self.dimension,
            "s_min": self.s_min,
            "capacity": self.capacity,
            "lp": {f"{p:g}": v for p, v in self.lp.items()},
            "condition_satisfied": self.condition_satisfied,
            "guaranteed": self.condition_satisfied,
            "log_base": "2" if self.base == 2.0 else "e" if self.base == np.e else f"{self.base:g}",
        }


def lp_from_marginal(p, order: float) -> float:
    return float(np.sum(np.asarray(p, dtype=float) ** order) ** (1.0 / order))


def profile_from_marginal(p, ps: Sequence[float] = (2.0,), base: float = 2.0, condition: bool = True) -> ClosedFormProfile:
    p = np.asarray(p, dtype=float)
    s_min = shannon_entropy(p, base)
    return ClosedFormProfile(
        marginal=p,
        dimension=len(p),
        s_min=s_min,
        capacity=float(_log(len(p), base)) - s_min,
        lp={float(q): lp_from_marginal(p, q) for q in ps},
        condition_satisfied=condition,
        base=base,
    )


def closed_form_profile(channel, ps: Sequence[float] = (2.0,), base: float = 2.0) -> ClosedFormProfile:
    """Minimal output entropy, capacity and maximal output l_p norms from the marginal.

    Guaranteed only when the majorization condition holds; otherwise the
    profile is returned with ``condition_satisfied=False``.
    """
    cond = majorization_condition(channel).satisfied
    return profile_from_marginal(marginal(channel), ps, base, cond)


def product_closed_form(channels: Sequence, ps: Sequence[float] = (2.0,), base: float = 2.0) -> ClosedFormProfile:
    """Closed form for a tensor product: entropies and capacities add, l_p norms multiply."""
    parts = [closed_form_profile(c, ps, base) for c in channels]
    n = int(np.prod([c.dimension for c in parts]))
    return ClosedFormProfile(
        marginal=star_all([c.marginal for c in parts]),
        dimension=n,
        s_min=float(sum(c.s_min for c in parts)),
        capacity=float(sum(c.capacity for c in parts)),
        lp={float(q): float(np.prod([c.lp[float(q)] for c in parts])) for q in ps},
        condition_satisfied=all(c.condition_satisfied for c in parts),
        base=base,
    )
