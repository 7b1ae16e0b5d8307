"""Majorization of probability vectors and of channels by probability vectors."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

SUM_ATOL = 1e-9
ORDER_ATOL = 1e-12
MARGIN_ATOL = 1e-10


def sort_desc(values, atol: float = SUM_ATOL) -> np.ndarray:
    """Probability vector rearranged in descending order (ties keep input order)."""
    v = np.asarray(values, dtype=float).ravel()
    if np.any(v < -1e-12):
        raise ValueError(f"negative entry {v.min()!r}")
    v = np.where(v < 0, 0.0, v)
    if abs(v.sum() - 1.0) > atol:
        raise ValueError(f"entries sum to {v.sum()!r}, not 1")
    return v[np.argsort(-v, kind="stable")]


def _pad(p: np.ndarray, length: int) -> np.ndarray:
    return np.concatenate([p, np.zeros(length - len(p))])


def _padded_pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = -np.sort(-np.asarray(p, dtype=float).ravel())
    q = -np.sort(-np.asarray(q, dtype=float).ravel())
    length = max(len(p), len(q))
    return _pad(p, length), _pad(q, length)


def weak_majorize_leq(p, q, atol: float = ORDER_ATOL) -> bool:
    """True if every partial sum of p's descending rearrangement is <= that of q."""
    p, q = _padded_pair(p, q)
    return bool(np.all(np.cumsum(p) <= np.cumsum(q) + atol))


def majorizes(q, p, atol: float = ORDER_ATOL) -> bool:
    """True if p is majorized by q with equal totals (the Karamata hypothesis)."""
    p_, q_ = _padded_pair(p, q)
    return weak_majorize_leq(p_, q_, atol) and abs(p_.sum() - q_.sum()) <= atol


def star(p, q) -> np.ndarray:
    """All pairwise products of two distributions, descending."""
    prod = np.multiply.outer(np.asarray(p, dtype=float), np.asarray(q, dtype=float)).ravel()
    return prod[np.argsort(-prod, kind="stable")]


def star_all(vectors: Sequence) -> np.ndarray:
    out = np.asarray(vectors[0], dtype=float)
    for v in vectors[1:]:
        out = star(out, v)
    return -np.sort(-out)


def marginal(channel) -> np.ndarray:
    """Descending coset marginal P of a channel (product channels use their joint table)."""
    channel = getattr(channel, "joint", channel)
    return sort_desc(channel.coset_weights())


def karamata_gap(p, q, func: Callable[[np.ndarray], np.ndarray]) -> float:
    """sum F(q_j) - sum F(p_j) after zero-padding; >= 0 whenever q majorizes p."""
    p, q = _padded_pair(p, q)
    return float(np.sum(func(q)) - np.sum(func(p)))


@dataclass(frozen=True)
class ConditionResult:
    """Verdict of the coset majorization condition with a violating label pair.

    ``witness = (x, y)`` means the condition requires pi_x <= pi_y but
    pi_x > pi_y; ``clause`` is ``"uniformity"`` (same coset) or ``"ordering"``.
    """

    satisfied: bool
    clause: str | None = None
    witness: tuple | None = None
    excess: float = 0.0

    def __bool__(self) -> bool:
        return self.satisfied


def majorization_condition(channel, atol: float = ORDER_ATOL) -> ConditionResult:
    """Check p_[a] <= p_[a'] => pi_{a,b} <= pi_{a',b'} for all b, b'.

    Taking a = a' forces constant weights within each coset; cross-coset
    ordering is then implied, but is still checked to report tolerance edge
    cases.
    """
    channel = getattr(channel, "joint", channel)
    w = channel.weights
    orders = channel.orders
    for ia in range(w.shape[0]):
        row = w[ia]
        hi, lo = int(np.argmax(row)), int(np.argmin(row))
        if row[hi] - row[lo] > atol:
            return ConditionResult(
                False, "uniformity", (orders.label_at(ia, hi), orders.label_at(ia, lo)), float(row[hi] - row[lo])
            )
    p = w.sum(axis=1)
    rank = np.argsort(p, kind="stable")
    for lower, upper in zip(rank[:-1], rank[1:]):
        ib_hi = int(np.argmax(w[lower]))
        ib_lo = int(np.argmin(w[upper]))
        gap = w[lower, ib_hi] - w[upper, ib_lo]
        if gap > atol:
            return ConditionResult(
                False, "ordering", (orders.label_at(lower, ib_hi), orders.label_at(upper, ib_lo)), float(gap)
            )
    return ConditionResult(True)


def majorization_condition_bruteforce(channel, atol: float = ORDER_ATOL) -> ConditionResult:
    """Literal quantifier check over all coset pairs and all label pairs (O(n^4))."""
    channel = getattr(channel, "joint", channel)
    w = channel.weights
    orders = channel.orders
    n = w.shape[0]
    p = w.sum(axis=1)
    for ia, ib, ja, jb in itertools.product(range(n), repeat=4):
        if p[ia] <= p[ja] and w[ia, ib] > w[ja, jb] + atol:
            clause = "uniformity" if ia == ja else "ordering"
            return ConditionResult(
                False, clause, (orders.label_at(ia, ib), orders.label_at(ja, jb)), float(w[ia, ib] - w[ja, jb])
            )
    return ConditionResult(True)


@dataclass
class MajorizationReport:
    satisfied: bool
    worst_margin: float
    witness: dict | None = None
    margins: np.ndarray = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"satisfied": self.satisfied, "worst_margin": self.worst_margin, "witness": self.witness}


def partial_sum_slack(p, spectra: np.ndarray) -> np.ndarray:
    """Slack sum_{j<=k} p_j - sum_{j<=k} lambda_j for k = 1..|p|, one row per spectrum."""
    p = np.asarray(p, dtype=float)
    spectra = np.atleast_2d(spectra)
    length = max(len(p), spectra.shape[1])
    k = len(p)
    p = _pad(p, length)
    spectra = np.hstack([spectra, np.zeros((spectra.shape[0], length - spectra.shape[1]))])
    lam = -np.sort(-spectra, axis=1)
    return (np.cumsum(p) - np.cumsum(lam, axis=1))[:, :k]


def channel_majorized_report(channel, p, states, tol: float = MARGIN_ATOL, batch: int = 2048) -> MajorizationReport:
    """Sampled check of ``channel`` being majorized by ``p`` over the given pure inputs.

    By Ky Fan, the supremum over orthonormal k-families of sum <e_j, rho e_j>
    is the sum of the k largest eigenvalues, so each state reduces to a
    partial-sum comparison of its output spectrum against ``p``.
    """
    states = np.atleast_2d(np.asarray(states, dtype=complex))
    if states.shape[1] != channel.n:
        raise ValueError(f"states have dimension {states.shape[1]}, channel has {channel.n}")
    worst = np.empty(len(states))
    worst_k = np.empty(len(states), dtype=np.int64)
    for start in range(0, len(states), batch):
        chunk = states[start:start + batch]
        spectra = np.linalg.eigvalsh(channel.apply_to_pure_batch(chunk))
        slack = partial_sum_slack(p, spectra)
        worst[start:start + batch] = slack.min(axis=1)
        worst_k[start:start + batch] = slack.argmin(axis=1)
    i = int(np.argmin(worst))  # first index among ties, independent of batching
    margin = float(worst[i])
    return MajorizationReport(
        satisfied=margin >= -tol,
        worst_margin=margin,
        witness={"state_index": i, "k": int(worst_k[i]) + 1},
        margins=worst,
    )

