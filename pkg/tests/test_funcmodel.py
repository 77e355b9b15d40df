import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carleman_dsolve.errors import DomainError, InvalidInputError
from carleman_dsolve.funcmodel import (GridSpec, Jet, constant, derivative_via_cauchy, exp_i, exp_linear, expexp,
                                       handle_from_descriptor, jet_from_descriptor, log_scale_eval, polynomial,
                                       rational, trig)


class TestCauchyDerivative:
    def test_square(self):
        assert derivative_via_cauchy(polynomial([0, 0, 1]), 0.0, 2, radius=0.5) == pytest.approx(2.0, abs=1e-13)

    def test_exp_i(self):
        assert derivative_via_cauchy(exp_i(1.0), 0.0, 1, radius=0.5) == pytest.approx(1j, abs=1e-13)

    def test_rational_third_derivative(self):
        f = rational([1], [2, 1])
        val = derivative_via_cauchy(f, 1.0, 3, radius=0.5, nodes=64)
        assert abs(val - (-6 / 3**4)) <= 1e-10

    def test_order_zero_reproduces_value(self):
        f = trig(const=1, cos=[(2.0, 0.5)], sin=[(1.0, -0.25)])
        assert derivative_via_cauchy(f, 0.3, 0) == pytest.approx(complex(f(0.3)), abs=1e-13)

    def test_geometric_node_convergence(self):
        # at radius 0.5 both node counts are already at round-off; radius 2
        # (pole at distance 3) shows the geometric rate
        f = rational([1], [2, 1])
        exact = -6 / 3**4
        e32 = abs(derivative_via_cauchy(f, 1.0, 3, radius=2.0, nodes=32) - exact)
        e64 = abs(derivative_via_cauchy(f, 1.0, 3, radius=2.0, nodes=64) - exact)
        assert e64 * 10 <= e32

    def test_radius_outside_strip(self):
        f = rational([1], [1, 0, 1])  # poles at +-i
        with pytest.raises(DomainError):
            derivative_via_cauchy(f, 0.0, 1, radius=1.0)

    def test_too_few_nodes(self):
        with pytest.raises(InvalidInputError):
            derivative_via_cauchy(constant(1), 0.0, 1, radius=0.5, nodes=8)


class TestLogScale:
    def test_moderate(self):
        lm, ph = log_scale_eval(expexp(1.0, sign=-1), 5.0)
        assert lm == pytest.approx(-math.exp(5), rel=1e-14) and ph == 0

    def test_identity(self):
        assert log_scale_eval(constant(1.0), 0.7 + 0.2j) == (0.0, 0.0)

    def test_underflow_region_matches_mpmath(self):
        mpmath.mp.dps = 50
        ref = mpmath.log(mpmath.exp(-mpmath.exp(8)))
        lm, _ = log_scale_eval(expexp(1.0, sign=-1), 8.0)
        assert abs(complex(expexp(1.0, sign=-1)(8.0))) == 0.0
        assert lm == pytest.approx(float(ref), rel=1e-14)
        assert lm == pytest.approx(-2980.958, abs=1e-3)

    def test_exact_zero_sentinel(self):
        lm, ph = log_scale_eval(constant(0.0), 1.0)
        assert lm == -math.inf and ph == 0.0
        lm, ph = log_scale_eval(polynomial([0, 1]), 0.0)
        assert lm == -math.inf


class TestHandles:
    def test_rational_pole_in_strip(self):
        with pytest.raises(DomainError):
            rational([1], [0.25, 0, 1], strip_halfwidth=1.0)  # poles at +-0.5 i

    def test_rational_default_strip(self):
        f = rational([1], [0.25, 0, 1])
        assert f.strip_halfwidth == pytest.approx(0.5)

    @pytest.mark.parametrize("desc", [
        {"kind": "const", "value": [1, 2]},
        {"kind": "poly", "coeffs": [1, -2, 0.5]},
        {"kind": "exp_i", "omega": 1.5},
        {"kind": "exp", "rate": [0.5, 1]},
        {"kind": "trig", "const": 2, "sin": [[1, 0.1]], "cos": [[3, -1]]},
        {"kind": "rational", "num": [1, 1], "den": [4, 0, 1]},
        {"kind": "expexp", "rate": 2, "sign": -1},
    ])
    def test_descriptor_round_trip(self, desc):
        f = handle_from_descriptor(desc)
        g = handle_from_descriptor(f.descriptor)
        z = np.array([0.3 + 0.1j, -1.2, 0.9 - 0.2j])
        assert np.allclose(f(z), g(z), rtol=1e-14, atol=0)

    def test_unknown_kind(self):
        with pytest.raises(InvalidInputError):
            handle_from_descriptor({"kind": "bessel"})

    def test_shifted(self):
        f = trig(cos=[(1, 1)])
        assert complex(f.shifted(0.5)(0.2)) == pytest.approx(math.cos(0.7), abs=1e-15)


class TestJetAndGrid:
    def test_jet_from_handle_matches_exp(self):
        jet = Jet.from_handle(exp_linear(1.0), radius=0.5, n_max=30)
        xs = np.array([-0.4, 0.0, 0.3])
        for n in (0, 1, 7, 20, 30):
            assert np.allclose(jet.derivative(n, xs), np.exp(xs), rtol=1e-11, atol=0)

    def test_jet_descriptor(self):
        jet = jet_from_descriptor({"kind": "jet", "of": {"kind": "trig", "cos": [[1, 1]]}, "radius": 0.4})
        assert jet.derivative(2, 0.1) == pytest.approx(-math.cos(0.1), abs=1e-12)

    def test_jet_rejects_nonfinite(self):
        with pytest.raises(InvalidInputError):
            Jet(lambda n, x: np.full(np.shape(x), np.nan), 0.5, 4)

    def test_grid(self):
        g = GridSpec(-1, 1, 5, imag_offset=0.1)
        assert np.allclose(g.points(), np.linspace(-1, 1, 5) + 0.1j)
        assert GridSpec.from_config(g.to_config()) == g
        with pytest.raises(InvalidInputError):
            GridSpec(1, -1, 5)
        with pytest.raises(InvalidInputError):
            GridSpec(-1, 1, 1)


finite_z = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=80, deadline=None)
@given(finite_z, st.floats(min_value=-2, max_value=2), st.floats(min_value=0.1, max_value=3))
def test_log_and_plain_paths_agree(z, omega, rate):
    for f in (exp_i(omega, 0.7), exp_linear(complex(rate, omega)), expexp(rate, sign=-1, scale=2.0)):
        v = complex(f(z))
        if 1e-300 <= abs(v) <= 1e300:
            lm, ph = log_scale_eval(f, z)
            assert abs(math.exp(lm) * complex(math.cos(ph), math.sin(ph)) - v) <= 1e-12 * abs(v) * max(1, abs(lm))
