"""Discrete verifier for the bootstrap Gronwall lemma.

Given a sampled trace of X, D, W >= 0 and constants C, alpha >= 0
satisfying the differential inequality d/dt X^2 + D^2 <= C W X^2
+ C X^alpha D^2, the lemma asserts: if the smallness condition

    2 C X(0)^alpha exp((C alpha / 2) int_0^T W dt) < 1

holds, then for every t in [0, T]

    X(t)^2 + 1/2 int_0^t D^2 <= X(0)^2 exp(C int_0^t W).

The verifier evaluates the condition by trapezoid quadrature of W and
checks the conclusion at every sample time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["GronwallTrace", "gronwall_verify"]


@dataclass(frozen=True)
class GronwallTrace:
    t: np.ndarray
    X: np.ndarray
    D: np.ndarray
    W: np.ndarray
    C: float
    alpha: float

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.size == 0:
            raise ValueError("empty trace")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        for name in ("X", "D", "W"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.shape != t.shape:
                raise ValueError(f"{name} must match the time grid")
            if not np.all(np.isfinite(a)) or np.any(a < 0):
                raise ValueError(f"{name} must be finite and nonnegative")
        if self.C < 0 or self.alpha < 0:
            raise ValueError("C and alpha must be nonnegative")


def _cumtrapz(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * np.diff(t) * (y[1:] + y[:-1]))
    return out


def gronwall_verify(trace: GronwallTrace) -> dict:
    """Returns the smallness condition, whether the integral bound holds
    at every sample, and the minimal margin RHS - LHS.  When the
    smallness condition fails the bound is not asserted (None)."""
    t = np.asarray(trace.t, dtype=float)
    X = np.asarray(trace.X, dtype=float)
    D = np.asarray(trace.D, dtype=float)
    W = np.asarray(trace.W, dtype=float)

    int_w = _cumtrapz(t, W)
    int_d2 = _cumtrapz(t, D**2)

    condition = 2.0 * trace.C * X[0] ** trace.alpha * np.exp(
        0.5 * trace.C * trace.alpha * int_w[-1]
    ) < 1.0

    lhs = X**2 + 0.5 * int_d2
    rhs = X[0] ** 2 * np.exp(trace.C * int_w)
    diff = rhs - lhs
    # at t0 the bound is the identity X(0)^2 <= X(0)^2; margin over t > t0
    margin = float(np.min(diff[1:])) if diff.size > 1 else float(diff[0])
    holds = bool(np.min(diff) >= -1e-10 * max(X[0] ** 2, 1e-300))

    return {
        "condition_7200": bool(condition),
        "bound_7300_holds": holds if condition else None,
        "margin": margin,
    }
