import math
import warnings

import numpy as np
import pytest

from carleman_dsolve.carleman import CarlemanSequence, log_weight
from carleman_dsolve.errors import AccuracyWarning, DomainError
from carleman_dsolve.extension import build_extension, dbar_check, plateau_sample, switch_heights
from carleman_dsolve.funcmodel import Jet

FSQ = CarlemanSequence.builtin("factorial_squared")


def exp_jet(radius=0.5, n_max=61):
    return Jet(lambda n, x: np.exp(np.asarray(x, dtype=float)), radius, n_max, name="exp")


def linear_jet(radius=0.5):
    def deriv(n, x):
        x = np.asarray(x, dtype=float)
        return x if n == 0 else (np.ones_like(x) if n == 1 else np.zeros_like(x))
    return Jet(deriv, radius, 10, name="x")


@pytest.fixture(scope="module")
def ext_exp():
    return build_extension(exp_jet(), FSQ, B=1.0, cutoff_margin=0.2)


class TestLinearJet:
    def test_plateau_is_identity(self):
        ext = build_extension(linear_jet(), FSQ)
        z = np.array([0.1 + 0.05j, -0.3 - 0.2j, 0.45j])
        assert np.allclose(ext.F(z), z, atol=1e-15)
        assert np.all(ext.dbar_F(z) == 0)

    def test_dbar_check_plateau(self):
        c = dbar_check(build_extension(linear_jet(), FSQ), 0.1 + 0.05j)
        assert c.analytic == 0 and c.discrepancy < 1e-9 and c.reliable


class TestExpJet:
    def test_reproduces_jet_on_interval(self, ext_exp):
        xs = np.linspace(-0.5, 0.5, 41)
        assert np.max(np.abs(ext_exp.F(xs + 0j) - np.exp(xs))) <= 1e-12

    def test_pinned_dbar_on_switch_height(self, ext_exp):
        # for (n!)^2 and B = 1 the switch heights are 1/n; at y = 1/10 exactly
        # one term survives: dbar F = f^(11)(0) (iy)^10 / (2 * 10!)
        assert ext_exp.thresholds[10] == pytest.approx(0.1, rel=1e-14)
        expected = 0.5 * 0.1**10 / math.factorial(10)
        val = ext_exp.dbar_F(0.1j)
        assert abs(val) == pytest.approx(expected, rel=1e-10)
        assert dbar_check(ext_exp, 0.1j).discrepancy <= 1e-6

    def test_outside_support(self, ext_exp):
        z = 0.8 + 0.1j
        assert ext_exp.F(z) == 0 and ext_exp.dbar_F(z) == 0
        assert dbar_check(ext_exp, z) == (0, 0, 0.0, True)

    def test_dbar_vanishes_on_axis_in_plateau(self, ext_exp):
        xs = np.linspace(-0.5, 0.5, 21) + 0j
        assert np.all(ext_exp.dbar_F(xs) == 0)

    def test_bound_holds_on_plateau(self, ext_exp):
        A = ext_exp.bound_constants.A
        assert math.isfinite(A)
        z = plateau_sample(ext_exp, nx=17, ny=25)
        assert np.all(ext_exp.bound_ratio_log(z) <= math.log(A) + 1e-9)
        d = np.abs(ext_exp.dbar_F(z))
        keep = d > 0
        rhs = math.log(A) + log_weight(FSQ, np.abs(z.imag[keep]))
        assert np.all(np.log(d[keep]) <= rhs + 1e-9)

    def test_fd_rate_is_quadratic(self, ext_exp):
        z = 0.2 + 0.07j
        d1 = dbar_check(ext_exp, z, h=1e-2).discrepancy
        d2 = dbar_check(ext_exp, z, h=5e-3).discrepancy
        assert d2 < d1 / 3

    def test_cutoff_band_checked(self, ext_exp):
        rng = np.random.default_rng(7)
        for _ in range(20):
            r = rng.uniform(0.56, 0.69)
            z = r * np.exp(1j * rng.uniform(0, 2 * np.pi))
            c = dbar_check(ext_exp, z)
            assert c.discrepancy <= 1e-6 or not c.reliable


def test_switch_heights_decrease():
    tau = switch_heights(CarlemanSequence.builtin("factorial_log"), 2.0, 50)
    assert np.all(np.diff(tau) < 0)


def test_invalid_B():
    with pytest.raises(DomainError):
        build_extension(exp_jet(), FSQ, B=0.0)


def test_short_jet_warns():
    with pytest.warns(AccuracyWarning):
        build_extension(exp_jet(n_max=20), FSQ, target_height=1e-3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        build_extension(exp_jet(n_max=61), FSQ, target_height=0.05)
