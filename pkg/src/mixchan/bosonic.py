"""One-mode Gaussian amplifier formulas.

Convention: the characteristic function of a Gaussian state is
exp(i m.x - x^T V x / 2), so the vacuum has V = I/2 and
F(x, y) = exp(-(x^2 + y^2) / 4).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNCERTAINTY_ATOL = 1e-12


def g(x, base: float = 2.0):
    """(x+1) log(x+1) - x log x with g(0) = 0; the entropy of a thermal state of mean photon number x."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("g is defined for x >= 0")
    safe = np.where(arr > 0, arr, 1.0)
    out = (arr + 1) * np.log1p(arr) - np.where(arr > 0, arr * np.log(safe), 0.0)
    out = out / np.log(base)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class AmplifierParams:
    k: float
    nc: float = 0.0
    n: float = 0.0

    def __post_init__(self):
        if not self.k > 1:
            raise ValueError(f"amplification k must be > 1, got {self.k}")
        if self.nc < 0 or self.n < 0:
            raise ValueError("noise N_c and energy N must be nonnegative")

    @property
    def added_noise(self) -> float:
        """Coefficient of the identity added to the covariance: (k - 1)/2 + N_c."""
        return (self.k - 1) / 2 + self.nc


def amplifier_capacity(params: AmplifierParams, base: float = 2.0) -> float:
    """g(kN + N_c) - g(N_c)."""
    return g(params.k * params.n + params.nc, base) - g(params.nc, base)


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __init__(self, mean, cov):
        mean = np.asarray(mean, dtype=float).reshape(2)
        cov = np.asarray(cov, dtype=float).reshape(2, 2)
        if not np.allclose(cov, cov.T, atol=1e-12, rtol=0):
            raise ValueError("covariance must be symmetric")
        if np.linalg.det(cov) < 0.25 - UNCERTAINTY_ATOL or cov[0, 0] <= 0:
            raise ValueError(f"covariance violates the uncertainty bound (det {np.linalg.det(cov):.6g} < 1/4)")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def vacuum(cls) -> "GaussianState":
        return cls(np.zeros(2), np.eye(2) / 2)

    @classmethod
    def coherent(cls, z: complex) -> "GaussianState":
        z = complex(z)
        return cls(np.sqrt(2) * np.array([z.real, z.imag]), np.eye(2) / 2)

    @classmethod
    def thermal(cls, nbar: float) -> "GaussianState":
        return cls(np.zeros(2), (nbar + 0.5) * np.eye(2))

    def characteristic(self, x, y) -> complex:
        v = np.array([x, y], dtype=float)
        return complex(np.exp(1j * self.mean @ v - 0.5 * v @ self.cov @ v))

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "cov": self.cov.tolist()}


def amplifier_transform(params: AmplifierParams, state: GaussianState) -> GaussianState:
    """mean -> sqrt(k) mean, cov -> k cov + ((k - 1)/2 + N_c) I."""
    return GaussianState(np.sqrt(params.k) * state.mean, params.k * state.cov + params.added_noise * np.eye(2))


def compose_amplifiers(first: AmplifierParams, second: AmplifierParams) -> AmplifierParams:
    """Single amplifier equal to ``first`` followed by ``second``.

    Gain multiplies; the added covariance k2((k1-1)/2 + N1) + (k2-1)/2 + N2
    equals (k1 k2 - 1)/2 + (k2 N1 + N2).
    """
    return AmplifierParams(first.k * second.k, second.k * first.nc + second.nc, first.n)


def gaussian_entropy(state: GaussianState, base: float = 2.0) -> float:
    """g(nu - 1/2) with symplectic eigenvalue nu = sqrt(det cov)."""
    nu = np.sqrt(max(np.linalg.det(state.cov), 0.25))
    return g(nu - 0.5, base)


def constellation_energy(prior, points) -> float:
    """Tr(rho_bar (Q^2 + P^2)/2) = 1/2 + sum_i pi_i |z_i|^2 for a coherent-state ensemble."""
    prior = np.asarray(prior, dtype=float)
    points = np.asarray(points, dtype=complex)
    if prior.shape != points.shape:
        raise ValueError(f"prior has {prior.size} entries, constellation has {points.size} points")
    return float(0.5 + np.sum(prior * np.abs(points) ** 2))


def energy_bound(n: float) -> float:
    return 0.5 + n
