"""3D solver: RHS structure, stepping accuracy, scaling covariance."""

import numpy as np
import pytest

from hallmhd.fields import SpectralField
from hallmhd.norms import hs_norm
from hallmhd.operators import curl3, laplacian_scalar, leray_project, to_spectral
from hallmhd.params import CFLError, PhysicalParams, StepControl
from hallmhd import solver3d as s3
from hallmhd.sampling import random_field

from conftest import rel_err

P1 = PhysicalParams(1.0, 1.0, 1.0)


def small_random_state(grid, amplitude=0.3, seed=12, extended=False, params=P1):
    u0, B0 = s3.make_initial(grid, "random_band", amplitude, seed=seed)
    return s3.make_state(u0, B0, params, extended=extended)


class TestRhsPhysical:
    def test_zero_state(self, g3):
        st = s3.make_state(SpectralField.zeros(g3), SpectralField.zeros(g3), P1)
        du, dB = s3.rhs_physical(st, P1)
        assert np.abs(du.c).max() == 0.0 and np.abs(dB.c).max() == 0.0

    def test_beltrami_pure_decay(self, g3):
        u0, B0 = s3.make_initial(g3, "beltrami", 0.2)
        st = s3.make_state(u0, B0, P1)
        du, dB = s3.rhs_physical(st, P1)
        assert np.abs(du.c).max() <= 1e-14
        assert rel_err(dB.c, -P1.nu * B0.c) < 1e-12

    def test_eps_zero_reduces_to_mhd(self, g3):
        st = small_random_state(g3)
        pm = PhysicalParams(1.0, 1.0, 0.0)
        du1, dB1 = s3.rhs_physical(st, P1)
        du0, dB0 = s3.rhs_physical(st, pm)
        # velocity equation identical; induction differs exactly by the Hall term
        assert np.abs(du1.c - du0.c).max() <= 1e-14 * np.abs(du0.c).max()
        ht = s3.hall_term(st.B, 1.0)
        assert rel_err(dB1.c - dB0.c, -ht.c) < 1e-12

    def test_outputs_divergence_free(self, g3):
        st = small_random_state(g3, seed=3)
        du, dB = s3.rhs_physical(st, P1)
        assert du.divergence_residual() < 1e-12
        assert dB.divergence_residual() < 1e-12


class TestHallTerm:
    def test_beltrami_vanishes(self, g3):
        _, B0 = s3.make_initial(g3, "beltrami", 0.5)
        assert np.abs(s3.hall_term(B0, 1.0).c).max() <= 1e-12 * np.abs(B0.c).max()

    def test_zero_field_and_zero_eps(self, g3):
        z = SpectralField.zeros(g3)
        assert np.abs(s3.hall_term(z, 1.0).c).max() == 0.0
        B = random_field(g3, 1, 4, seed=5)
        assert np.abs(s3.hall_term(B, 0.0).c).max() == 0.0


class TestRhsExtended:
    def test_zero_state(self, g3):
        st = s3.make_state(SpectralField.zeros(g3), SpectralField.zeros(g3), P1, extended=True)
        for d in s3.rhs_extended(st, P1):
            assert np.abs(d.c).max() == 0.0

    def test_mu_ne_nu_rejected(self, g3):
        st = small_random_state(g3, extended=True)
        with pytest.raises(ValueError):
            s3.rhs_extended(st, PhysicalParams(1.0, 2.0, 1.0))

    def test_missing_v_rejected(self, g3):
        st = small_random_state(g3)
        with pytest.raises(ValueError):
            s3.rhs_extended(st, P1)

    def test_algebraic_redundancy(self, g3):
        """With v = u - eps curl B exactly, the three equations satisfy
        dv/dt = du/dt - eps curl(dB/dt) to roundoff."""
        st = small_random_state(g3, extended=True)
        du, dB, dv = s3.rhs_extended(st, P1)
        target = du.c - P1.eps * curl3(dB).c
        assert rel_err(dv.c, target) < 1e-10

    def test_matches_physical_formulation(self, g3):
        st = small_random_state(g3, extended=True, seed=21)
        du_e, dB_e, _ = s3.rhs_extended(st, P1)
        du_p, dB_p = s3.rhs_physical(s3.SimState3D(0.0, st.u, st.B), P1)
        assert rel_err(du_e.c, du_p.c) < 1e-12
        assert rel_err(dB_e.c, dB_p.c) < 1e-12

    def test_eps_linearity_of_v_equation(self, g3):
        """At a fixed state only the v-equation carries eps, linearly
        (the Hall commutator and the doubled advective term)."""
        st = small_random_state(g3, extended=True, seed=33)
        p0 = PhysicalParams(1.0, 1.0, 0.0)
        p1 = PhysicalParams(1.0, 1.0, 1.0)
        p2 = PhysicalParams(1.0, 1.0, 2.0)
        du0, dB0, dv0 = s3.rhs_extended(st, p0)
        du1, dB1, dv1 = s3.rhs_extended(st, p1)
        du2, dB2, dv2 = s3.rhs_extended(st, p2)
        assert rel_err(du1.c, du0.c) < 1e-14 and rel_err(dB1.c, dB0.c) < 1e-14
        assert rel_err(dv2.c - dv0.c, 2.0 * (dv1.c - dv0.c)) < 1e-12

    def test_beltrami_heat_decay_of_v(self, g3):
        u0, B0 = s3.make_initial(g3, "beltrami", 0.2)
        st = s3.make_state(u0, B0, P1, extended=True)
        # v = -eps * B for the curl eigenfield
        assert rel_err(st.v.c, -P1.eps * B0.c) < 1e-13
        _, _, dv = s3.rhs_extended(st, P1)
        assert rel_err(dv.c, -P1.mu * st.v.c) < 1e-12


class TestStep:
    def test_zero_state_fixed_point(self, g3):
        st = s3.make_state(SpectralField.zeros(g3), SpectralField.zeros(g3), P1)
        out = s3.step(st, P1, StepControl(dt=1e-2, t_end=1))
        assert np.abs(out.u.c).max() == 0.0 and np.abs(out.B.c).max() == 0.0

    def test_beltrami_exact_heat_decay(self, g3):
        """The linear part is integrated exactly: with every quadratic term
        vanishing, the run matches the per-mode heat factor to roundoff."""
        nu = 0.7
        params = PhysicalParams(1.0, nu, 1.0)
        u0, B0 = s3.make_initial(g3, "beltrami", 0.1)
        st = s3.make_state(u0, B0, params)
        ctrl = StepControl(dt=1e-3, t_end=0.2)
        for _ in range(200):
            st = s3.step(st, params, ctrl)
        assert rel_err(st.B.c, np.exp(-nu * 0.2) * B0.c) < 1e-13
        assert np.abs(st.u.c).max() < 1e-13

    def test_divergence_and_mean_preserved(self, g3):
        params = PhysicalParams(1.0, 1.0, 1.0)
        st = small_random_state(g3, amplitude=0.4, seed=8, extended=True)
        ctrl = StepControl(dt=1e-3, t_end=1)
        for _ in range(25):
            st = s3.step(st, params, ctrl)
        for f in (st.u, st.B, st.v):
            assert f.divergence_residual() < 1e-11
            assert np.abs(f.mean_mode()).max() == 0.0

    def test_second_order_self_convergence(self, g3):
        st0 = small_random_state(g3, amplitude=0.3, seed=9, extended=True)

        def advance(dt, T):
            st = st0
            ctrl = StepControl(dt=dt, t_end=T)
            for _ in range(round(T / dt)):
                st = s3.step(st, P1, ctrl)
            return st

        T = 0.04
        ref = advance(T / 320, T)
        e1 = advance(T / 40, T)
        e2 = advance(T / 80, T)

        def err(a, b):
            return sum(rel_err(x.c, y.c) for x, y in
                       ((a.u, b.u), (a.B, b.B), (a.v, b.v)))

        ratio = err(e1, ref) / err(e2, ref)
        assert 3.5 <= ratio <= 4.5

    def test_cfl_rejection_reports_required_dt(self, g3):
        st = small_random_state(g3, amplitude=5.0, seed=10)
        with pytest.raises(CFLError) as exc:
            s3.step(st, P1, StepControl(dt=0.5, t_end=1))
        assert exc.value.dt_required < 0.5

    def test_matches_reference_composition(self, g3):
        """The compact stepper reproduces the step assembled from the
        public RHS functions and the integrating factor."""
        st = small_random_state(g3, amplitude=0.3, seed=11, extended=True)
        dt = 1e-3
        out = s3.step(st, P1, StepControl(dt=dt, t_end=1))
        Eu = np.exp(-P1.mu * g3.k2 * dt)
        du1, dB1, dv1, _, _ = s3._nonlinear_extended(st, P1)
        mid = s3.SimState3D(
            st.t + dt,
            SpectralField(g3, Eu * (st.u.c + dt * du1.c)),
            SpectralField(g3, Eu * (st.B.c + dt * dB1.c)),
            SpectralField(g3, Eu * (st.v.c + dt * dv1.c)),
        )
        du2, dB2, dv2, _, _ = s3._nonlinear_extended(mid, P1)
        u_ref = Eu * st.u.c + 0.5 * dt * (Eu * du1.c + du2.c)
        assert rel_err(out.u.c, leray_project(SpectralField(g3, u_ref)).c) < 1e-13


class TestInitialData:
    def test_beltrami_norm(self, g3):
        delta = 0.37
        _, B0 = s3.make_initial(g3, "beltrami", delta)
        # 12 unit-shell modes of modulus delta/2: any-order norm delta sqrt 3
        for s in (0.0, 0.5, 1.5):
            assert hs_norm(B0, s) == pytest.approx(delta * np.sqrt(3), rel=1e-13)

    def test_random_band_determinism_and_normalization(self, g3):
        u1, B1 = s3.make_initial(g3, "random_band", 0.25, seed=42)
        u2, B2 = s3.make_initial(g3, "random_band", 0.25, seed=42)
        assert np.array_equal(u1.c, u2.c) and np.array_equal(B1.c, B2.c)
        assert hs_norm(u1, 0.5) == pytest.approx(0.25, rel=1e-12)
        assert hs_norm(B1, 0.5) == pytest.approx(0.25, rel=1e-12)
        u3, _ = s3.make_initial(g3, "random_band", 0.25, seed=43)
        assert not np.array_equal(u1.c, u3.c)

    def test_taylor_green_divergence(self, g3):
        u0, B0 = s3.make_initial(g3, "taylor_green", 1.0)
        assert u0.divergence_residual() < 1e-13
        assert np.abs(B0.c).max() == 0.0

    def test_unknown_kind(self, g3):
        with pytest.raises(ValueError):
            s3.make_initial(g3, "orszag_tang", 1.0)
        with pytest.raises(ValueError):
            s3.make_initial(g3, "random_band", -1.0, seed=0)


class TestScalingCovariance:
    def test_lambda_one_trivial(self, g3_32):
        u = random_field(g3_32, 1, 2.4, seed=1) * 0.2
        B = random_field(g3_32, 1, 2.4, seed=2) * 0.2
        res = s3.scaling_covariance_check(u, B, 1, P1)
        assert max(res.values()) < 1e-12

    def test_mhd_and_hall_pair_covariance(self, g3_32):
        u = random_field(g3_32, 1, 2.4, seed=3) * 0.2
        B = random_field(g3_32, 1, 2.4, seed=4) * 0.2
        res = s3.scaling_covariance_check(u, B, 2, P1)
        assert res["mhd"] <= 1e-11
        assert res["hall_pair"] <= 1e-11

    def test_non_integer_lambda(self, g3_32):
        u = random_field(g3_32, 1, 2.0, seed=5)
        with pytest.raises(ValueError):
            s3.scaling_covariance_check(u, u, 1.5, P1)


class TestPressure:
    def test_poisson_residual(self, g3):
        st = small_random_state(g3, amplitude=0.5, seed=14)
        pi = s3.pressure_field(st, P1)
        # -lap pi must equal div(u.grad u - B.grad B) with dealiased products
        g = g3
        up = st.u.to_physical()
        Bp = st.B.to_physical()
        N6 = to_spectral(g, np.stack(
            [up[i] * up[j] - Bp[i] * Bp[j] for i, j in s3._SYM])) * g.dealias_mask
        N = {ij: N6[m] for m, ij in enumerate(s3._SYM)}
        divdiv = np.zeros(g.spectral_shape, dtype=complex)
        for i in range(3):
            for j in range(3):
                divdiv += -g.kvec[i] * g.kvec[j] * N[(min(i, j), max(i, j))]
        res = -laplacian_scalar(g, pi) - divdiv
        res[(0,) * 3] = 0.0
        assert np.abs(res).max() <= 1e-12 * max(np.abs(divdiv).max(), 1e-300)
