import math

import numpy as np
import pytest

from bpdi.ansatz import AnsatzSpec, Slot, build_hea, build_hva
from bpdi.errors import BridgeViolationError, LengthMismatchError, UnsupportedMethodError
from bpdi.gradients import (
    PARAMETER_SHIFT,
    GradientMethod,
    TermwiseGradientMatrix,
    central_fd,
    default_method,
    fd_sensitivity,
    grad_full,
    grad_termwise,
)
from bpdi.hamiltonian import Hamiltonian, build_lfim, build_tfim
from bpdi.oracles import dense_termwise_gradient


def single_ry():
    return AnsatzSpec("HEA", "TFIM", 1, 1, (Slot("RY", (0,), 0),), 1)


Z1 = Hamiltonian.from_terms(1, [(1.0, "Z")])


class TestMethod:
    def test_shift_and_denominator(self):
        assert PARAMETER_SHIFT.shift == math.pi / 2 and PARAMETER_SHIFT.denominator == 2
        fd = central_fd(1e-4)
        assert fd.shift == 1e-4 and fd.denominator == 2e-4

    def test_bad_epsilon(self):
        with pytest.raises(ValueError):
            central_fd(0.0)

    def test_defaults(self):
        assert default_method(build_hea(2, 1)).kind == "ParameterShift"
        assert default_method(build_hva(2, 1)) == GradientMethod("CentralFD", 1e-5)


class TestFull:
    @pytest.mark.parametrize("theta", [0.4, math.pi / 2, 2.9])
    def test_single_ry_z(self, theta):
        want = -math.sin(theta)
        assert grad_full(single_ry(), [theta], Z1)[0] == pytest.approx(want, abs=1e-14)
        assert grad_full(single_ry(), [theta], Z1, central_fd())[0] == pytest.approx(want, abs=1e-9)

    def test_half_pi_is_minus_one(self):
        assert grad_full(single_ry(), [math.pi / 2], Z1)[0] == pytest.approx(-1.0, abs=1e-15)

    def test_ps_vs_fd_hea(self):
        rng = np.random.default_rng(0)
        spec, H = build_hea(4, 4), build_tfim(4)
        for _ in range(10):
            th = rng.uniform(0, 2 * np.pi, spec.n_params)
            ps = grad_full(spec, th, H, PARAMETER_SHIFT)
            fd = grad_full(spec, th, H, central_fd(1e-5))
            assert np.max(np.abs(ps - fd)) <= 1e-6

    def test_hva_gamma_stationary_at_zero(self):
        g = grad_full(build_hva(2, 1), [0.0, 0.0], build_tfim(2), central_fd())
        assert abs(g[1]) < 1e-9

    def test_ps_rejected_for_shared(self):
        with pytest.raises(UnsupportedMethodError):
            grad_full(build_hva(3, 1), [0.1, 0.2], build_tfim(3), PARAMETER_SHIFT)

    def test_size_mismatch(self):
        with pytest.raises(LengthMismatchError):
            grad_full(build_hea(3, 1), np.zeros(6), build_tfim(4))
        with pytest.raises(LengthMismatchError):
            grad_full(build_hea(3, 1), np.zeros(5), build_tfim(3))


class TestTermwise:
    def test_shape(self):
        spec = build_hea(2, 2)
        mat = grad_termwise(spec, np.zeros(spec.n_params), build_tfim(2))
        assert mat.a.shape == (3, 8)

    @pytest.mark.parametrize(
        "spec, H, method",
        [
            (build_hea(2, 2), build_tfim(2), PARAMETER_SHIFT),
            (build_hea(3, 2), build_lfim(3), PARAMETER_SHIFT),
            (build_hva(3, 2), build_tfim(3), central_fd()),
            (build_hva(3, 2, "LFIM"), build_lfim(3), central_fd()),
        ],
    )
    def test_dense_oracle(self, spec, H, method):
        rng = np.random.default_rng(7)
        for _ in range(3):
            th = rng.uniform(0, 2 * np.pi, spec.n_params)
            got = grad_termwise(spec, th, H, method).a
            np.testing.assert_allclose(got, dense_termwise_gradient(spec, th, H), atol=1e-6, rtol=0)

    def test_zero_theta_hea_n2(self):
        spec = build_hea(2, 1)
        th = np.zeros(spec.n_params)
        np.testing.assert_allclose(grad_termwise(spec, th, build_tfim(2)).a, dense_termwise_gradient(spec, th, build_tfim(2)), atol=1e-6)

    @pytest.mark.parametrize("variant", ["HEA", "HVA"])
    def test_reconstruction(self, variant):
        rng = np.random.default_rng(8)
        spec = build_hea(6, 4) if variant == "HEA" else build_hva(6, 4)
        H = build_tfim(6)
        mat = grad_termwise(spec, rng.uniform(0, 2 * np.pi, spec.n_params), H, default_method(spec))
        assert mat.reconstruction_error().max() <= 1e-8
        np.testing.assert_allclose(mat.a.sum(axis=0), mat.g, rtol=1e-8, atol=1e-8)
        mat.check_reconstruction()

    def test_g_matches_grad_full(self):
        rng = np.random.default_rng(9)
        spec, H = build_hea(4, 2), build_lfim(4)
        th = rng.uniform(0, 2 * np.pi, spec.n_params)
        np.testing.assert_array_equal(grad_termwise(spec, th, H).g, grad_full(spec, th, H))

    def test_coefficient_linearity(self):
        rng = np.random.default_rng(10)
        spec = build_hea(3, 2)
        H = build_tfim(3, 0.7)
        terms = [(t.coeff, t.string) for t in H.terms]
        doubled = Hamiltonian.from_terms(3, [(2 * c if i == 4 else c, s) for i, (c, s) in enumerate(terms)])
        th = rng.uniform(0, 2 * np.pi, spec.n_params)
        a, b = grad_termwise(spec, th, H).a, grad_termwise(spec, th, doubled).a
        np.testing.assert_array_equal(np.delete(a, 4, axis=0), np.delete(b, 4, axis=0))
        np.testing.assert_allclose(b[4], 2 * a[4], rtol=1e-15, atol=0)

    def test_check_reconstruction_raises(self):
        mat = TermwiseGradientMatrix(np.array([[1.0, 2.0], [1.0, 0.0]]), np.array([2.0, 2.5]), PARAMETER_SHIFT)
        with pytest.raises(BridgeViolationError):
            mat.check_reconstruction()

    def test_dump_round_trip(self):
        rng = np.random.default_rng(11)
        spec = build_hva(3, 2)
        mat = grad_termwise(spec, rng.uniform(0, 2 * np.pi, spec.n_params), build_tfim(3), central_fd())
        back = TermwiseGradientMatrix.load(mat.dump())
        np.testing.assert_array_equal(back.a, mat.a)
        np.testing.assert_array_equal(back.g, mat.g)
        assert mat.dump().splitlines()[0] == "terms=5 params=4"


class TestSensitivity:
    def test_three_eps_agree(self):
        rng = np.random.default_rng(12)
        spec, H = build_hva(4, 4), build_tfim(4)
        th = rng.uniform(0, 2 * np.pi, spec.n_params)
        out = fd_sensitivity(spec, th, H, [1e-4, 1e-5, 1e-6])
        vals = list(out.values())
        for i in range(3):
            for j in range(i + 1, 3):
                assert np.max(np.abs(vals[i] - vals[j])) < 1e-6

    def test_single_eps_equals_full(self):
        spec, H = build_hva(3, 2), build_tfim(3)
        th = np.linspace(0.1, 1.0, spec.n_params)
        np.testing.assert_array_equal(fd_sensitivity(spec, th, H, [1e-5])[1e-5], grad_full(spec, th, H, central_fd(1e-5)))

    def test_empty(self):
        with pytest.raises(ValueError):
            fd_sensitivity(build_hva(2, 1), [0.1, 0.2], build_tfim(2), [])
