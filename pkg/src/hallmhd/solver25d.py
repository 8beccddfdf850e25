"""2.5D Hall-MHD: three-component fields over two space variables.

System (all products dealiased, tilde = two-variable operators):

    du/dt = P2[B~.grad~ B - u~.grad~ u] + mu lap~ u
    dB/dt = -u~.grad~ B - eps B~.grad~ j + eps j~.grad~ B
            + B~.grad~ u + nu lap~ B,       j = curl~ B

with the current j, vorticity omega = curl~ u and the combined field
E = eps omega + B cached on the state.  When mu = nu, E satisfies the
pure advection-diffusion equation dE/dt = E~.grad~ u - u~.grad~ E
+ mu lap~ E, which E_residual certifies on consecutive snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import SpectralField
from .grid import GridSpec
from .norms import hs_norm, inhomogeneous_hs_norm
from .operators import curl2, gradient, leray_project, to_physical, to_spectral
from .params import CFLError, PhysicalParams, StepControl, required_dt
from .sampling import random_field

__all__ = [
    "SimState25D",
    "make_state_25d",
    "make_initial_25d",
    "rhs_25d",
    "rewritten_B_rhs",
    "step_25d",
    "E_residual",
    "identity_suite",
]


@dataclass(frozen=True)
class SimState25D:
    """Evolved (u, B) plus the cached derived fields j, omega, E."""

    t: float
    u: SpectralField
    B: SpectralField
    j: SpectralField
    omega: SpectralField
    E: SpectralField
    eps: float

    @property
    def grid(self) -> GridSpec:
        return self.u.grid

    def cache_residual(self) -> float:
        """Max relative mismatch between the cached j, omega, E and values
        recomputed from (u, B)."""
        res = 0.0
        for cached, fresh in (
            (self.j, curl2(self.B)),
            (self.omega, curl2(self.u)),
            (self.E, self.eps * curl2(self.u) + self.B),
        ):
            scale = max(float(np.abs(fresh.c).max()), 1e-300)
            res = max(res, float(np.abs(cached.c - fresh.c).max()) / scale)
        return res


def make_state_25d(u: SpectralField, B: SpectralField, params: PhysicalParams,
                   t: float = 0.0) -> SimState25D:
    j = curl2(B)
    omega = curl2(u)
    return SimState25D(t=t, u=u, B=B, j=j, omega=omega,
                       E=params.eps * omega + B, eps=params.eps)


def _tilde_advect(g: GridSpec, ap: np.ndarray, bp: np.ndarray) -> np.ndarray:
    """(a~ . grad~) b as div~(b (x) a~), valid for div~ a~ = 0.
    ap, bp are physical (3, n, n) arrays; returns spectral coefficients."""
    k1, k2 = g.kvec
    out = np.empty((3,) + g.spectral_shape, dtype=np.complex128)
    for j in range(3):
        prod = to_spectral(g, np.stack([ap[0] * bp[j], ap[1] * bp[j]]))
        out[j] = 1j * (k1 * prod[0] + k2 * prod[1])
    return out


def _nonlinear_25d(state: SimState25D, params: PhysicalParams):
    g = state.grid
    mask = g.dealias_mask
    eps = params.eps
    up = to_physical(g, state.u.c)
    Bp = to_physical(g, state.B.c)
    jp = to_physical(g, state.j.c)
    umax = float(np.abs(up).max())
    bmax = float(np.abs(Bp).max())

    du = leray_project(SpectralField(g, (_tilde_advect(g, Bp, Bp) - _tilde_advect(g, up, up)) * mask))
    dB_c = (
        -_tilde_advect(g, up, Bp)
        - eps * _tilde_advect(g, Bp, jp)
        + eps * _tilde_advect(g, jp, Bp)
        + _tilde_advect(g, Bp, up)
    ) * mask
    dB = SpectralField(g, dB_c, is_divfree=True)
    for name, arr in (("u rhs", du.c), ("B rhs", dB.c)):
        if not np.all(np.isfinite(arr)):
            raise FloatingPointError(f"non-finite values in term {name!r}")
    return du, dB, umax, bmax


def rhs_25d(state: SimState25D, params: PhysicalParams) -> tuple[SpectralField, SpectralField]:
    """Full (du/dt, dB/dt) of the 2.5D system."""
    du, dB, _, _ = _nonlinear_25d(state, params)
    k2 = state.grid.k2
    return (
        du.with_coeffs(du.c - params.mu * k2 * state.u.c),
        dB.with_coeffs(dB.c - params.nu * k2 * state.B.c),
    )


def rewritten_B_rhs(state: SimState25D, params: PhysicalParams) -> SpectralField:
    """dB/dt evaluated from the curl-identity rewriting

        dB/dt = -u~.grad~ B + B~.grad~ u
                + eps (lap~ B x B + 2 j~.grad~ B - grad~(j.B)) + nu lap~ B,

    which must agree with rhs_25d to roundoff; it cross-validates the
    advective assembly against an independent algebraic route."""
    g = state.grid
    mask = g.dealias_mask
    eps = params.eps
    up = to_physical(g, state.u.c)
    Bp = to_physical(g, state.B.c)
    jp = to_physical(g, state.j.c)
    lapBp = to_physical(g, -g.k2 * state.B.c)

    lapBxB = to_spectral(g, np.cross(lapBp, Bp, axis=0))
    jdotB = to_spectral(g, np.sum(jp * Bp, axis=0))
    grad_jB = gradient(g, jdotB).c

    c = (
        -_tilde_advect(g, up, Bp)
        + _tilde_advect(g, Bp, up)
        + eps * (lapBxB + 2.0 * _tilde_advect(g, jp, Bp) - grad_jB)
    ) * mask
    c -= params.nu * g.k2 * state.B.c
    return SpectralField(g, c, is_divfree=True)


def step_25d(state: SimState25D, params: PhysicalParams, control: StepControl) -> SimState25D:
    """Integrating-factor Heun step for the 2.5D system."""
    g = state.grid
    dt = control.dt
    Eu = np.exp(-params.mu * g.k2 * dt)
    Eb = np.exp(-params.nu * g.k2 * dt)
    du1, dB1, umax, bmax = _nonlinear_25d(state, params)
    bound = required_dt(g, params, control, umax, bmax)
    if dt > bound:
        raise CFLError(dt, bound)
    u_star = SpectralField(g, Eu * (state.u.c + dt * du1.c), True)
    B_star = SpectralField(g, Eb * (state.B.c + dt * dB1.c), True)
    mid = make_state_25d(u_star, B_star, params, t=state.t + dt)
    du2, dB2, _, _ = _nonlinear_25d(mid, params)
    u1 = Eu * (state.u.c + 0.5 * dt * du1.c) + 0.5 * dt * du2.c
    B1 = Eb * (state.B.c + 0.5 * dt * dB1.c) + 0.5 * dt * dB2.c
    u_new = leray_project(SpectralField(g, u1))
    B_new = leray_project(SpectralField(g, B1))
    return make_state_25d(u_new, B_new, params, t=state.t + dt)


def E_residual(before: SimState25D, after: SimState25D, params: PhysicalParams,
               dt: float) -> float:
    """Normalized residual of the combined-field advection-diffusion law
    on two consecutive snapshots (centered time difference, midpoint
    spatial terms).  Needs mu = nu."""
    params.require_equal_viscosities("the combined-field law")
    g = before.grid

    def spatial(st: SimState25D) -> np.ndarray:
        Ep = to_physical(g, st.E.c)
        up = to_physical(g, st.u.c)
        adv = _tilde_advect(g, Ep, up) - _tilde_advect(g, up, Ep)
        return adv * g.dealias_mask - params.mu * g.k2 * st.E.c

    dE = (after.E.c - before.E.c) / dt
    res = dE - 0.5 * (spatial(before) + spatial(after))
    mid = 0.5 * (before.E + after.E)
    scale = hs_norm(mid, 0.0)
    if scale == 0.0:
        return 0.0
    return hs_norm_of_coeffs(g, res) / scale


def hs_norm_of_coeffs(g: GridSpec, c: np.ndarray) -> float:
    return hs_norm(SpectralField(g, c), 0.0)


def identity_suite(y: SpectralField, z: SpectralField,
                   a: SpectralField, b: SpectralField, c: SpectralField) -> dict:
    """Max relative residuals of the two-variable vector identities:

    * i1:  curl~(y x z) = z~.grad~ y - y~.grad~ z   (div~-free y, z)
    * ws6: (a x b).c = (c x a).b = (b x c).a        (pointwise)
    * double_curl: curl~(curl~ y) + lap~ y = 0      (div~-free y)

    i1 is skipped (flagged) when the divergence precondition fails.
    Fields should be band-limited to |k| <= n/4 - 1 so products are
    exactly representable on the grid.
    """
    g = y.grid
    out: dict[str, float | bool] = {}

    i1_ok = max(y.divergence_residual(), z.divergence_residual()) <= 1e-10
    out["i1_skipped"] = not i1_ok
    if i1_ok:
        yp = to_physical(g, y.c)
        zp = to_physical(g, z.c)
        lhs = curl2(SpectralField(g, to_spectral(g, np.cross(yp, zp, axis=0))))
        rhs = _tilde_advect(g, zp, yp) - _tilde_advect(g, yp, zp)
        scale = max(float(np.abs(rhs).max()), 1e-300)
        out["i1"] = float(np.abs(lhs.c - rhs).max()) / scale

    ap = to_physical(g, a.c)
    bp = to_physical(g, b.c)
    cp = to_physical(g, c.c)
    axb_c = np.sum(np.cross(ap, bp, axis=0) * cp, axis=0)
    cxa_b = np.sum(np.cross(cp, ap, axis=0) * bp, axis=0)
    bxc_a = np.sum(np.cross(bp, cp, axis=0) * ap, axis=0)
    scale = max(float(np.abs(axb_c).max()), 1e-300)
    out["ws6"] = max(
        float(np.abs(axb_c - cxa_b).max()),
        float(np.abs(axb_c - bxc_a).max()),
    ) / scale

    dc = curl2(curl2(y)).c - y.grid.k2 * y.c
    scale = max(float(np.abs(y.grid.k2 * y.c).max()), 1e-300)
    out["double_curl"] = float(np.abs(dc).max()) / scale
    return out


def make_initial_25d(grid: GridSpec, kind: str, amplitude: float,
                     seed: int | None = None, b_amplitude: float | None = None,
                     lo: float = 1.0, hi: float = 2.5) -> tuple[SpectralField, SpectralField]:
    """Initial (u0, B0) over a 2D lattice, tilde-divergence-free.

    kinds: 'random_band' (u0 normalized to L2 norm = amplitude, B0 to
    H^1 norm = b_amplitude or amplitude), 'single_mode_b3'
    (u0 = 0, B0 = (0, 0, amplitude sin x1)), 'zero'.
    """
    if kind == "zero":
        return SpectralField.zeros(grid), SpectralField.zeros(grid)
    if amplitude <= 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    if kind == "single_mode_b3":
        x1, _ = grid.coordinates()
        zero = np.zeros_like(x1)
        B = SpectralField.from_physical(grid, np.stack([zero, zero, amplitude * np.sin(x1)]),
                                        is_divfree=True)
        return SpectralField.zeros(grid), B
    if kind == "random_band":
        if seed is None:
            raise ValueError("random_band initial data needs a seed")
        u0 = random_field(grid, lo, hi, seed=seed, divfree=True)
        B0 = random_field(grid, lo, hi, seed=seed + 1, divfree=True)
        nu0 = hs_norm(u0, 0.0)
        nb0 = inhomogeneous_hs_norm(B0, 1.0)
        amp_b = amplitude if b_amplitude is None else b_amplitude
        return (
            u0 * (amplitude / nu0 if nu0 > 0 else 0.0),
            B0 * (amp_b / nb0 if nb0 > 0 else 0.0),
        )
    raise ValueError(f"unknown initial-data kind {kind!r}")
