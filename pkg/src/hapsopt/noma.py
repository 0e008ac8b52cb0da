"""Downlink NOMA rates and QoS-constrained power splitting.

Within a cell users are indexed by decreasing composite coefficient A
(weakest first). User l cancels users 1..l-1 and sees users l+1..K as
noise, so its SINR is ``alpha_l / (sum_{k>l} alpha_k + A_l)``.

QoS thresholds inside this module are normalised (bit/s/Hz); convert
with ``omega_bps / bandwidth`` at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

QOS_RTOL = 1e-9


@dataclass
class PowerAllocation:
    fractions: np.ndarray
    regime: str  # "feasible" or "partial"
    cutoff: int = 0  # u (1-based) in the partial regime; users 1..u get no QoS
    rate: float = 0.0  # closed-form cell rate, bit/s/Hz
    cell: int = 0

    @property
    def qos_users(self) -> int:
        return len(self.fractions) - self.cutoff


@dataclass
class RateReport:
    user_rates: list[np.ndarray]  # bit/s, per cell in SIC order
    cell_rates: np.ndarray
    total: float
    qos_met: list[np.ndarray] = field(default_factory=list)


def _check_sorted(A: np.ndarray) -> None:
    if np.any(np.diff(A) > 0):
        raise ValueError("composite coefficients must be sorted in decreasing order")


def sinr(alpha, composite) -> np.ndarray:
    """Per-user SINR of one cell; inputs in SIC order."""
    a = np.asarray(alpha, dtype=float)
    A = np.asarray(composite, dtype=float)
    if a.shape != A.shape:
        raise ValueError("alpha and composite length mismatch")
    _check_sorted(A)
    tail = np.concatenate([np.cumsum(a[::-1])[::-1][1:], [0.0]])
    return a / (tail + A)


def rate(gamma, bandwidth: float = 1.0):
    return bandwidth * np.log2(1.0 + np.asarray(gamma, dtype=float))


def min_power_tails(A, omega: float) -> np.ndarray:
    """Tail sums S_l = sum_{k>=l} alpha_hat_k of the QoS-tight powers.

    ``alpha_hat_l = (2^omega - 1) (sum_{k>l} alpha_hat_k + A_l)``, so
    ``S_l = 2^omega S_{l+1} + (2^omega - 1) A_l``; S_1 <= 1 is the
    all-users-served condition. Returned array has length K+1 with
    S_{K+1} = 0 last.
    """
    A = np.asarray(A, dtype=float)
    c = 2.0**omega - 1.0
    S = np.zeros(len(A) + 1)
    for l in range(len(A) - 1, -1, -1):
        S[l] = 2.0**omega * S[l + 1] + c * A[l]
    return S


def min_powers(A, omega: float) -> np.ndarray:
    S = min_power_tails(A, omega)
    return S[:-1] - S[1:]


def is_feasible(A, omega: float) -> bool:
    return bool(min_power_tails(A, omega)[0] <= 1.0)


def _serve_all(A: np.ndarray, omega: float, budget: float = 1.0) -> tuple[np.ndarray, float]:
    # QoS-tight from the weakest user down; whatever is left goes to the strongest.
    c = 2.0**omega - 1.0
    K = len(A)
    alpha = np.zeros(K)
    tail = budget
    for l in range(K - 1):
        nxt = (tail - c * A[l]) / 2.0**omega
        alpha[l] = tail - nxt
        tail = nxt
    alpha[-1] = tail
    return alpha, (K - 1) * omega + math.log2(1.0 + tail / A[-1])


def allocate_feasible(A, omega: float) -> PowerAllocation:
    """Sum-rate-optimal split when every user can meet ``omega``.

    Users 1..K-1 get exactly their threshold rate and user K takes the rest.
    Relative to the minimum powers alpha_hat, the residual
    ``r = 1 - sum(alpha_hat)`` is spread geometrically: user l < K gains
    ``r (2^{-omega(l-1)} - 2^{-omega l})`` to hold its SINR against the
    stronger user's extra power, and user K gains ``r 2^{-omega(K-1)}``.
    """
    A = np.asarray(A, dtype=float)
    _check_sorted(A)
    if np.any(A <= 0):
        raise ValueError("composite coefficients must be positive")
    if not is_feasible(A, omega):
        raise ValueError("QoS infeasible for this cell; use allocate_partial")
    alpha, r = _serve_all(A, omega)
    return PowerAllocation(alpha, "feasible", 0, r)


def cutoff_user(A, omega: float) -> int:
    """Largest u (1-based) with S_u > 1, so that S_{u+1} <= 1 < S_u."""
    S = min_power_tails(A, omega)
    over = np.nonzero(S[:-1] > 1.0)[0]
    if len(over) == 0:
        return 0
    u = int(over[-1]) + 1
    assert S[u] <= 1.0 < S[u - 1]
    return u


def allocate_partial(A, omega: float, rule: str = "threshold") -> PowerAllocation:
    """Serve as many users as possible at ``omega``.

    Users u+1..K (the K-u strongest) are the largest set that can all meet
    the threshold. With ``rule="threshold"`` they get exactly their minimum
    powers, user u takes the leftover and users below u get nothing. The
    sum rate then never rises with ``omega``.

    ``rule="optimal"`` instead zeroes users 1..u and splits the budget over
    the served set as in :func:`allocate_feasible`. Its sum rate is higher
    but the served set shrinks as ``omega`` grows, so a stricter threshold
    can raise the rate. If not even user K alone can be served (u = K),
    both rules give user K the whole budget.
    """
    A = np.asarray(A, dtype=float)
    _check_sorted(A)
    if np.any(A <= 0):
        raise ValueError("composite coefficients must be positive")
    u = cutoff_user(A, omega)
    if u == 0:
        raise ValueError("all users are servable; use allocate_feasible")
    K = len(A)
    alpha = np.zeros(K)
    if rule == "threshold":
        S = min_power_tails(A, omega)
        alpha[u:] = S[u:-1] - S[u + 1:]
        left = 1.0 - S[u]
        alpha[u - 1] = left
        return PowerAllocation(alpha, "partial", u, (K - u) * omega + math.log2(1.0 + left / (S[u] + A[u - 1])))
    if rule != "optimal":
        raise ValueError(f"unknown partial rule {rule!r}")
    if u == K:
        alpha[-1] = 1.0
        return PowerAllocation(alpha, "partial", u, math.log2(1.0 + 1.0 / A[-1]))
    sub, r = _serve_all(A[u:], omega)
    alpha[u:] = sub
    return PowerAllocation(alpha, "partial", u, r)


def allocate(A, omega: float, partial_rule: str = "threshold") -> PowerAllocation:
    if is_feasible(A, omega):
        return allocate_feasible(A, omega)
    return allocate_partial(A, omega, partial_rule)


def equal_power(K: int) -> PowerAllocation:
    return PowerAllocation(np.full(K, 1.0 / K), "equal", 0, float("nan"))


def evaluate_network(cells, allocations, bandwidth: float, omega_bps: float | None = None) -> RateReport:
    """Recompute every user's rate from SINR.

    ``cells`` is a sequence of per-cell composite vectors (or UserLink
    lists) in SIC order.
    """
    if len(cells) != len(allocations):
        raise ValueError(f"{len(cells)} cells but {len(allocations)} allocations")
    user_rates, flags = [], []
    for links, alloc in zip(cells, allocations):
        A = np.array([getattr(x, "composite", x) for x in links], dtype=float)
        a = alloc.fractions if isinstance(alloc, PowerAllocation) else np.asarray(alloc, float)
        if len(a) != len(A):
            raise ValueError("allocation length does not match cell size")
        r = rate(sinr(a, A), bandwidth)
        user_rates.append(r)
        if omega_bps is not None:
            flags.append(r >= omega_bps * (1 - QOS_RTOL))
    cell_rates = np.array([float(np.sum(r)) for r in user_rates])
    return RateReport(user_rates, cell_rates, float(np.sum(cell_rates)), flags)
