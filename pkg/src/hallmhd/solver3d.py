"""3D incompressible Hall-MHD on the periodic box.

Two formulations share one integrating-factor Heun stepper:

* physical (u, B):
    du/dt = P[(curl B) x B - u.grad u] + mu lap u
    dB/dt = curl(u x B) - eps curl((curl B) x B) + nu lap B
* extended (u, B, v), valid for mu = nu, with v = u - eps curl B evolved
  as an independent unknown:
    du/dt = mu lap u + P[B.grad B - u.grad u]
    dB/dt = mu lap B + curl(v x B)
    dv/dt = mu lap v + P[B.grad B - u.grad u] - eps curl((curl v) x B)
            + curl(v x u) + 2 eps curl(v.grad B)

Quadratic terms are formed by collocation in physical space and
dealiased by the two-thirds rule; the pressure gradient is eliminated
by the Leray projector and is recoverable on demand from the Poisson
equation -lap pi = div(u.grad u - B.grad B).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as _sfft

from .fields import SpectralField
from .grid import GridSpec
from .norms import hs_norm
from .operators import (
    band_filter,
    curl3,
    dilate,
    leray_project,
    to_physical,
    to_spectral,
)
from .params import CFLError, PhysicalParams, StepControl, required_dt
from .sampling import random_field

__all__ = [
    "SimState3D",
    "rhs_physical",
    "rhs_extended",
    "hall_term",
    "step",
    "make_initial",
    "make_state",
    "scaling_covariance_check",
    "pressure_field",
    "redundancy_drift",
]

_SYM = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


@dataclass(frozen=True)
class SimState3D:
    """Time plus the evolved divergence-free, mean-free fields; v is only
    present in extended mode."""

    t: float
    u: SpectralField
    B: SpectralField
    v: SpectralField | None = None

    @property
    def grid(self) -> GridSpec:
        return self.u.grid

    @property
    def extended(self) -> bool:
        return self.v is not None


def make_state(u: SpectralField, B: SpectralField, params: PhysicalParams,
               extended: bool = False, t: float = 0.0) -> SimState3D:
    """Assemble a state; in extended mode v is initialized to u - eps curl B."""
    v = None
    if extended:
        params.require_equal_viscosities("the extended formulation")
        v = u - params.eps * curl3(B)
    return SimState3D(t=t, u=u, B=B, v=v)


def _check_finite(arrs: dict[str, np.ndarray]) -> None:
    for name, a in arrs.items():
        if not np.all(np.isfinite(a)):
            raise FloatingPointError(f"non-finite values in term {name!r}")


def _nonlinear_physical(state: SimState3D, params: PhysicalParams):
    """Dealiased nonlinear RHS of the physical formulation (no diffusion),
    plus the physical-space amplitude maxima used by the CFL guard."""
    g = state.grid
    ik = [1j * k for k in g.kvec]
    mask = g.dealias_mask

    up = to_physical(g, state.u.c)
    Bp = to_physical(g, state.B.c)
    J = curl3(state.B)
    Jp = to_physical(g, J.c)

    umax = float(np.abs(up).max())
    bmax = float(np.abs(Bp).max())

    # (curl B) x B, shared by the Lorentz force and the Hall term
    jxb = to_spectral(g, np.cross(Jp, Bp, axis=0))
    # u.grad u = div(u (x) u) for divergence-free u
    uu = to_spectral(g, np.stack([up[i] * up[j] for i, j in _SYM]))
    adv = np.empty_like(state.u.c)
    T = {ij: uu[m] for m, ij in enumerate(_SYM)}
    for i in range(3):
        adv[i] = sum(ik[j] * T[(min(i, j), max(i, j))] for j in range(3))
    du = leray_project(SpectralField(g, (jxb - adv) * mask))

    uxb = to_spectral(g, np.cross(up, Bp, axis=0))
    dB = curl3(SpectralField(g, (uxb - params.eps * jxb) * mask))

    _check_finite({"u rhs": du.c, "B rhs": dB.c})
    return du, dB, umax, bmax


def rhs_physical(state: SimState3D, params: PhysicalParams) -> tuple[SpectralField, SpectralField]:
    """Full time derivative (du/dt, dB/dt) of the physical formulation."""
    du, dB, _, _ = _nonlinear_physical(state, params)
    return (
        du.with_coeffs(du.c - params.mu * state.grid.k2 * state.u.c),
        dB.with_coeffs(dB.c - params.nu * state.grid.k2 * state.B.c),
    )


def hall_term(B: SpectralField, eps: float) -> SpectralField:
    """eps curl((curl B) x B), the Hall contribution to dB/dt (with sign
    as it appears on the left of the induction equation)."""
    g = B.grid
    Jp = to_physical(g, curl3(B).c)
    Bp = to_physical(g, B.c)
    jxb = to_spectral(g, np.cross(Jp, Bp, axis=0))
    return curl3(SpectralField(g, eps * jxb * g.dealias_mask))


def _nonlinear_extended(state: SimState3D, params: PhysicalParams):
    """Dealiased nonlinear RHS of the extended formulation."""
    g = state.grid
    ik = [1j * k for k in g.kvec]
    mask = g.dealias_mask
    eps = params.eps

    up = to_physical(g, state.u.c)
    Bp = to_physical(g, state.B.c)
    vp = to_physical(g, state.v.c)
    w = curl3(state.v)
    wp = to_physical(g, w.c)

    umax = float(np.abs(up).max())
    bmax = float(np.abs(Bp).max())

    # T = B (x) B - u (x) u drives both du/dt and dv/dt through P div T
    T6 = to_spectral(g, np.stack([Bp[i] * Bp[j] - up[i] * up[j] for i, j in _SYM]))
    T = {ij: T6[m] for m, ij in enumerate(_SYM)}
    force = np.empty_like(state.u.c)
    for i in range(3):
        force[i] = sum(ik[j] * T[(min(i, j), max(i, j))] for j in range(3))
    force = leray_project(SpectralField(g, force * mask))

    # P[i, j] = F(v_i B_j) serves curl(v x B) and v.grad B = div(B (x) v)
    P = to_spectral(g, np.stack([vp[i] * Bp[j] for i in range(3) for j in range(3)]))
    P = P.reshape((3, 3) + g.spectral_shape)
    vxB = np.stack([P[1, 2] - P[2, 1], P[2, 0] - P[0, 2], P[0, 1] - P[1, 0]])
    dB = curl3(SpectralField(g, vxB * mask))

    wxB = to_spectral(g, np.cross(wp, Bp, axis=0))
    vxu = to_spectral(g, np.cross(vp, up, axis=0))
    vgradB = np.stack([sum(ik[k] * P[k, j] for k in range(3)) for j in range(3)])

    dv_c = (-eps * wxB + vxu + 2.0 * eps * vgradB) * mask
    dv = curl3(SpectralField(g, dv_c))
    dv = dv.with_coeffs(dv.c + force.c, is_divfree=True)

    _check_finite({"u rhs": force.c, "B rhs": dB.c, "v rhs": dv.c})
    return force, dB, dv, umax, bmax


def rhs_extended(state: SimState3D, params: PhysicalParams):
    """Full time derivative (du/dt, dB/dt, dv/dt) of the extended system."""
    params.require_equal_viscosities("rhs_extended")
    if state.v is None:
        raise ValueError("extended RHS needs a state carrying v")
    du, dB, dv, _, _ = _nonlinear_extended(state, params)
    k2 = state.grid.k2
    return (
        du.with_coeffs(du.c - params.mu * k2 * state.u.c),
        dB.with_coeffs(dB.c - params.mu * k2 * state.B.c),
        dv.with_coeffs(dv.c - params.mu * k2 * state.v.c),
    )


def redundancy_drift(state: SimState3D, params: PhysicalParams) -> float:
    """||v - (u - eps curl B)||_L2 / ||v||_L2 in extended mode."""
    if state.v is None:
        return 0.0
    target = state.u - params.eps * curl3(state.B)
    num = hs_norm(state.v - target, 0.0)
    den = hs_norm(state.v, 0.0)
    return num / den if den > 0 else num


# time stepping ---------------------------------------------------------
#
# The stepper works on the compacted dealias band: evolved states carry
# coefficients only inside the two-thirds mask, so all inter-FFT algebra
# runs on ~n^3/7 modes instead of the full half-spectrum (the sandbox is
# memory-bandwidth bound).  Scatter/gather at the FFT boundary doubles as
# the dealiasing step.  The public rhs_* functions above stay the readable
# reference; step() is tested to reproduce them.



class _Stepper3D:
    """Compact-band workspace for one (grid, params, dt, formulation).
    Owns scratch buffers: not shareable across threads; one advancing
    agent per evolved state."""

    def __init__(self, grid: GridSpec, params: PhysicalParams, dt: float, extended: bool):
        self.grid = grid
        self.params = params
        self.dt = dt
        self.extended = extended
        if extended:
            params.require_equal_viscosities("extended stepping")

        mask_flat = grid.dealias_mask.reshape(-1)
        self.idx = np.nonzero(mask_flat)[0]
        m = self.idx.size
        spec = grid.spectral_shape
        self.k = [
            np.broadcast_to(grid.kvec[i], spec).reshape(-1)[self.idx].copy()
            for i in range(3)
        ]
        self.ik = [1j * k for k in self.k]
        k2 = self.k[0] ** 2 + self.k[1] ** 2 + self.k[2] ** 2
        self.k2 = k2
        inv = np.zeros_like(k2)
        np.divide(1.0, k2, out=inv, where=k2 > 0)
        self.inv_k2 = inv
        self.Eu = np.exp(-params.mu * k2 * dt)
        self.Eb = np.exp(-params.nu * k2 * dt)
        nprod = 21 if extended else 12
        self.F = np.empty((nprod, m), dtype=np.complex128)
        self.buf = np.empty(grid.physical_shape)
        self.buf2 = np.empty(grid.physical_shape)
        self.full1 = np.zeros(spec, dtype=np.complex128)
        self.full1_flat = self.full1.reshape(-1)
        self.m = m
        self.w_pair = np.broadcast_to(grid.pair_weight, spec).reshape(-1)[self.idx].copy()

    # compact <-> full layout
    def gather(self, c: np.ndarray) -> np.ndarray:
        return c.reshape(c.shape[0], -1)[:, self.idx]

    def scatter_field(self, comp: np.ndarray) -> SpectralField:
        c = np.zeros((3,) + self.grid.spectral_shape, dtype=np.complex128)
        c.reshape(3, -1)[:, self.idx] = comp
        return SpectralField(self.grid, c, is_divfree=True)

    def to_phys(self, comp: np.ndarray) -> list[np.ndarray]:
        """Compact (3, m) coefficients -> three physical arrays."""
        out = []
        for i in range(3):
            self.full1_flat[self.idx] = comp[i]
            out.append(_sfft.irfftn(self.full1, s=self.grid.physical_shape,
                                    axes=(-3, -2, -1), norm="forward"))
        return out

    def _fwd(self, row: int) -> None:
        """Transform self.buf (cache-hot product) into compact row of F."""
        self.F[row] = _sfft.rfftn(self.buf, axes=(-3, -2, -1),
                                  norm="forward").reshape(-1)[self.idx]

    def _fwd_product(self, row: int, a: np.ndarray, b: np.ndarray) -> None:
        np.multiply(a, b, out=self.buf)
        self._fwd(row)

    def _fwd_cross(self, row: int, a: list, b: list) -> None:
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            np.multiply(a[j], b[k], out=self.buf)
            np.multiply(a[k], b[j], out=self.buf2)
            self.buf -= self.buf2
            self._fwd(row + i)

    def _curl(self, c: np.ndarray) -> np.ndarray:
        ik = self.ik
        out = np.empty_like(c)
        out[0] = ik[1] * c[2] - ik[2] * c[1]
        out[1] = ik[2] * c[0] - ik[0] * c[2]
        out[2] = ik[0] * c[1] - ik[1] * c[0]
        return out

    def _project(self, c: np.ndarray) -> np.ndarray:
        kdot = (self.k[0] * c[0] + self.k[1] * c[1] + self.k[2] * c[2]) * self.inv_k2
        for i in range(3):
            c[i] -= self.k[i] * kdot
        return c

    def _zero_mean(self, c: np.ndarray) -> None:
        if self.idx[0] == 0:
            c[:, 0] = 0.0

    def sum_hs2(self, comp: np.ndarray, s: float) -> float:
        """Squared homogeneous H^s mode sum over compact components."""
        if s == 0:
            w = self.w_pair
        else:
            with np.errstate(divide="ignore"):
                w = self.w_pair * np.where(self.k2 > 0, self.k2, 1.0) ** s
        mag2 = (comp.real**2 + comp.imag**2).sum(axis=0)
        if self.idx[0] == 0:
            mag2 = mag2.copy()
            mag2[0] = 0.0
        return float(np.sum(w * mag2))

    def nonlinear(self, uc, Bc, vc=None, with_maxes: bool = True):
        """Compact nonlinear RHS; returns (Nu, NB[, Nv], umax, bmax)."""
        ik = self.ik
        F = self.F
        up = self.to_phys(uc)
        Bp = self.to_phys(Bc)
        umax = bmax = 0.0
        if with_maxes:
            umax = max(float(np.abs(p).max()) for p in up)
            bmax = max(float(np.abs(p).max()) for p in Bp)

        if not self.extended:
            Jp = self.to_phys(self._curl(Bc))
            for mpos, (i, j) in enumerate(_SYM):
                self._fwd_product(mpos, up[i], up[j])
            self._fwd_cross(6, up, Bp)
            self._fwd_cross(9, Jp, Bp)
            T = {ij: F[mpos] for mpos, ij in enumerate(_SYM)}
            adv = np.stack([
                sum(ik[j] * T[(min(i, j), max(i, j))] for j in range(3))
                for i in range(3)
            ])
            Nu = self._project(F[9:12] - adv)
            self._zero_mean(Nu)
            NB = self._curl(F[6:9] - self.params.eps * F[9:12])
            return Nu, NB, umax, bmax

        vp = self.to_phys(vc)
        wp = self.to_phys(self._curl(vc))
        for mpos, (i, j) in enumerate(_SYM):
            np.multiply(Bp[i], Bp[j], out=self.buf)
            np.multiply(up[i], up[j], out=self.buf2)
            self.buf -= self.buf2
            self._fwd(mpos)
        mpos = 6
        for i in range(3):
            for j in range(3):
                self._fwd_product(mpos, vp[i], Bp[j])
                mpos += 1
        self._fwd_cross(15, wp, Bp)
        self._fwd_cross(18, vp, up)
        T = {ij: F[mpos] for mpos, ij in enumerate(_SYM)}
        P = F[6:15].reshape(3, 3, self.m)
        force = np.stack([
            sum(ik[j] * T[(min(i, j), max(i, j))] for j in range(3))
            for i in range(3)
        ])
        force = self._project(force)
        self._zero_mean(force)
        vxB = np.stack([P[1, 2] - P[2, 1], P[2, 0] - P[0, 2], P[0, 1] - P[1, 0]])
        NB = self._curl(vxB)
        eps = self.params.eps
        vgradB = np.stack([
            ik[0] * P[0, j] + ik[1] * P[1, j] + ik[2] * P[2, j] for j in range(3)
        ])
        Nv = self._curl(-eps * F[15:18] + F[18:21] + (2.0 * eps) * vgradB)
        Nv += force
        return force, NB, Nv, umax, bmax

    def advance(self, fields: list[np.ndarray], control: StepControl):
        """One Heun step on compact coefficient arrays (in order u, B[, v])."""
        dt = self.dt
        out = self.nonlinear(*fields)
        umax, bmax = out[-2], out[-1]
        n1 = out[:-2]
        bound = required_dt(self.grid, self.params, control, umax, bmax)
        if dt > bound:
            raise CFLError(dt, bound)
        Es = [self.Eu, self.Eb] + ([self.Eu] if self.extended else [])
        stars = [E * (f + dt * n) for E, f, n in zip(Es, fields, n1)]
        out2 = self.nonlinear(*stars, with_maxes=False)
        n2 = out2[:-2]
        new = []
        for E, f, a, b in zip(Es, fields, n1, n2):
            y = E * (f + (0.5 * dt) * a)
            y += (0.5 * dt) * b
            new.append(y)
        # hygiene: evolved fields stay exactly solenoidal and mean-free
        for y in new:
            self._project(y)
            self._zero_mean(y)
        return new

    def check_finite(self, fields: list[np.ndarray]) -> bool:
        return all(np.all(np.isfinite(f)) for f in fields)


_STEPPER_CACHE: dict[tuple, _Stepper3D] = {}


def get_stepper(grid: GridSpec, params: PhysicalParams, dt: float, extended: bool) -> _Stepper3D:
    key = (id(grid), params.mu, params.nu, params.eps, dt, extended)
    st = _STEPPER_CACHE.get(key)
    if st is None:
        if len(_STEPPER_CACHE) > 8:
            _STEPPER_CACHE.clear()
        st = _Stepper3D(grid, params, dt, extended)
        _STEPPER_CACHE[key] = st
    return st


def step(state: SimState3D, params: PhysicalParams, control: StepControl) -> SimState3D:
    """One integrating-factor Heun step: the Laplacian is integrated
    exactly per mode, everything else explicitly in two stages; evolved
    fields are re-projected and stay mean-free.  Raises CFLError (with the
    admissible dt) when the explicit stability guards reject the step."""
    sp = get_stepper(state.grid, params, control.dt, state.extended)
    fields = [sp.gather(state.u.c), sp.gather(state.B.c)]
    if state.extended:
        fields.append(sp.gather(state.v.c))
    new = sp.advance(fields, control)
    u = sp.scatter_field(new[0])
    B = sp.scatter_field(new[1])
    v = sp.scatter_field(new[2]) if state.extended else None
    return SimState3D(state.t + control.dt, u, B, v)


class StepSession:
    """Long-run driver that keeps the evolved fields in compact (dealias
    band) layout between steps; state() materializes a SimState3D."""

    def __init__(self, state: SimState3D, params: PhysicalParams, control: StepControl):
        self.params = params
        self.control = control
        self.extended = state.extended
        self.sp = get_stepper(state.grid, params, control.dt, state.extended)
        self.fields = [self.sp.gather(state.u.c), self.sp.gather(state.B.c)]
        if state.extended:
            self.fields.append(self.sp.gather(state.v.c))
        self.t = state.t

    def advance(self) -> None:
        self.fields = self.sp.advance(self.fields, self.control)
        self.t += self.control.dt

    def state(self) -> SimState3D:
        u = self.sp.scatter_field(self.fields[0])
        B = self.sp.scatter_field(self.fields[1])
        v = self.sp.scatter_field(self.fields[2]) if self.extended else None
        return SimState3D(self.t, u, B, v)

    def hs2(self, which: str, s: float) -> float:
        """Squared H^s norm of one evolved field ('u', 'B', 'v', or the
        recomputed electron velocity 'v_of_uB')."""
        sp = self.sp
        if which == "u":
            return sp.sum_hs2(self.fields[0], s)
        if which == "B":
            return sp.sum_hs2(self.fields[1], s)
        if which == "v":
            return sp.sum_hs2(self.fields[2], s)
        if which == "v_of_uB":
            vc = self.fields[0] - self.params.eps * sp._curl(self.fields[1])
            return sp.sum_hs2(vc, s)
        raise ValueError(f"unknown field {which!r}")

    def finite(self) -> bool:
        return all(np.all(np.isfinite(f)) for f in self.fields)


# initial data -----------------------------------------------------------

def abc_field(grid: GridSpec, amplitude: float = 1.0) -> SpectralField:
    """The curl eigenfield (sin x3 + cos x2, sin x1 + cos x3, sin x2 + cos x1)
    scaled by `amplitude`; curl w = w, so every quadratic Hall-MHD term
    vanishes on it and it evolves by pure heat decay."""
    x1, x2, x3 = grid.coordinates()
    vals = amplitude * np.stack([
        np.sin(x3) + np.cos(x2),
        np.sin(x1) + np.cos(x3),
        np.sin(x2) + np.cos(x1),
    ])
    return SpectralField.from_physical(grid, vals, is_divfree=True)


def taylor_green(grid: GridSpec, amplitude: float = 1.0) -> SpectralField:
    x1, x2, x3 = grid.coordinates()
    vals = amplitude * np.stack([
        np.sin(x1) * np.cos(x2) * np.cos(x3),
        -np.cos(x1) * np.sin(x2) * np.cos(x3),
        np.zeros_like(x1),
    ])
    return SpectralField.from_physical(grid, vals, is_divfree=True)


def make_initial(grid: GridSpec, kind: str, amplitude: float, seed: int | None = None,
                 lo: float = 1.0, hi: float = 2.5) -> tuple[SpectralField, SpectralField]:
    """Initial (u0, B0): divergence-free, mean-free, Hermitian.

    kinds: 'beltrami' (u0 = 0, B0 = amplitude * ABC), 'random_band'
    (seeded, u0 and B0 each normalized to H^{1/2} norm = amplitude),
    'taylor_green' (u0 = amplitude * TG vortex, B0 = 0), 'zero'.
    """
    if kind == "zero":
        return SpectralField.zeros(grid), SpectralField.zeros(grid)
    if amplitude <= 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    if kind == "beltrami":
        return SpectralField.zeros(grid), abc_field(grid, amplitude)
    if kind == "taylor_green":
        return taylor_green(grid, amplitude), SpectralField.zeros(grid)
    if kind == "random_band":
        if seed is None:
            raise ValueError("random_band initial data needs a seed")
        u0 = random_field(grid, lo, hi, seed=seed, divfree=True)
        B0 = random_field(grid, lo, hi, seed=seed + 1, divfree=True)
        nu0 = hs_norm(u0, 0.5)
        nb0 = hs_norm(B0, 0.5)
        return (
            u0 * (amplitude / nu0 if nu0 > 0 else 0.0),
            B0 * (amplitude / nb0 if nb0 > 0 else 0.0),
        )
    raise ValueError(f"unknown initial-data kind {kind!r}")


# pressure recovery and scaling ------------------------------------------

def pressure_field(state: SimState3D, params: PhysicalParams) -> np.ndarray:
    """Scalar pressure from -lap pi = div(u.grad u - B.grad B); returned as
    spectral coefficients (mean zero)."""
    g = state.grid
    up = to_physical(g, state.u.c)
    Bp = to_physical(g, state.B.c)
    N6 = to_spectral(g, np.stack([up[i] * up[j] - Bp[i] * Bp[j] for i, j in _SYM]))
    N = {ij: N6[m] for m, ij in enumerate(_SYM)}
    divdiv = np.zeros(g.spectral_shape, dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            divdiv += -g.kvec[i] * g.kvec[j] * N[(min(i, j), max(i, j))] * g.dealias_mask
    return divdiv * g.inv_k2


def scaling_covariance_check(u: SpectralField, B: SpectralField, lam: int,
                             params: PhysicalParams) -> dict[str, float]:
    """Relative residuals of the velocity-type rescaling covariance.

    With S f = lam * f(lam x), (a) the eps = 0 RHS satisfies
    rhs(S u, S B) = lam^3 (rhs(u, B))(lam x), and (b) the Hall operator
    (J, B) -> eps curl(J x B) is covariant when J and B are BOTH scaled
    like the velocity (the current treated as an independent unknown).
    """
    if int(lam) != lam or lam < 1:
        raise ValueError(f"lambda must be a positive integer, got {lam}")
    lam = int(lam)
    g = u.grid
    representable = (g.n // 2 - 1) / lam

    def scaled(f: SpectralField) -> SpectralField:
        # drop roundoff-level content that a dilation could not represent
        return lam * dilate(band_filter(f, 0.0, representable), lam)

    def rel(a: SpectralField, b: SpectralField) -> float:
        scale = max(float(np.abs(b.c).max()), 1e-300)
        return float(np.abs(a.c - b.c).max()) / scale

    mhd = PhysicalParams(params.mu, params.nu, 0.0)
    st = SimState3D(0.0, u, B)
    du, dB = rhs_physical(st, mhd)
    st_s = SimState3D(0.0, scaled(u), scaled(B))
    du_s, dB_s = rhs_physical(st_s, mhd)
    # lam^3 f(lam x) = lam^2 * S f
    res_mhd = max(rel(du_s, lam**2 * scaled(du)), rel(dB_s, lam**2 * scaled(dB)))

    def hall_pair(J: SpectralField, Bf: SpectralField) -> SpectralField:
        gg = J.grid
        Jp = to_physical(gg, J.c)
        Bp = to_physical(gg, Bf.c)
        return curl3(SpectralField(gg, params.eps * to_spectral(gg, np.cross(Jp, Bp, axis=0)) * gg.dealias_mask))

    J = curl3(B)
    res_hall = rel(hall_pair(scaled(J), scaled(B)), lam**2 * scaled(hall_pair(J, B)))
    return {"mhd": res_mhd, "hall_pair": res_hall}
