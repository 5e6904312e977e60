import numpy as np
import pytest

from bpdi.ansatz import build_ansatz, build_hea, build_hva, prepare_state, prepare_states
from bpdi.errors import InvalidSizeError, LengthMismatchError
from bpdi.oracles import dense_state


def overlap(a, b):
    return abs(np.vdot(a, b))


class TestHEA:
    def test_n2_d1(self):
        spec = build_hea(2, 1)
        assert spec.n_params == 4
        cnots = [s.targets for s in spec.slots if s.kind == "CNOT"]
        assert cnots == [(0, 1), (1, 0)]

    def test_n4_d4_counts(self):
        spec = build_hea(4, 4)
        assert spec.n_params == 32
        assert sum(s.kind == "CNOT" for s in spec.slots) == 16

    def test_layer_order(self):
        kinds = [s.kind for s in build_hea(3, 1).slots]
        assert kinds == ["RY"] * 3 + ["RZ"] * 3 + ["CNOT"] * 3

    def test_line_entangler(self):
        spec = build_hea(4, 2, entangler="line")
        assert sum(s.kind == "CNOT" for s in spec.slots) == 6
        assert all(s.targets != (3, 0) for s in spec.slots)

    def test_unique_params(self):
        spec = build_hea(5, 3)
        params = [s.param for s in spec.slots if s.param is not None]
        assert sorted(params) == list(range(spec.n_params))
        assert not spec.has_shared_or_scaled

    def test_zero_theta_gives_zero_state(self):
        for n in (2, 5):
            spec = build_hea(n, 3)
            psi = prepare_state(spec, np.zeros(spec.n_params)).amps
            want = np.zeros(1 << n)
            want[0] = 1
            np.testing.assert_allclose(psi, want, atol=1e-15)


class TestHVA:
    def test_param_counts(self):
        assert build_hva(4, 4).n_params == 8
        assert build_hva(4, 4, "LFIM").n_params == 12

    def test_sharing(self):
        spec = build_hva(4, 2)
        assert spec.gates_for(0) == [0, 1, 2, 3]
        assert [spec.slots[i].kind for i in spec.gates_for(1)] == ["RZZ"] * 3
        assert all(s.scale == 2.0 for s in spec.slots)
        assert spec.has_shared_or_scaled

    def test_open_chain(self):
        bonds = [s.targets for s in build_hva(5, 1).slots if s.kind == "RZZ"]
        assert bonds == [(0, 1), (1, 2), (2, 3), (3, 4)]

    def test_lfim_block(self):
        spec = build_hva(3, 1, "LFIM")
        assert [s.kind for s in spec.slots] == ["RX"] * 3 + ["RZZ"] * 2 + ["RZ"] * 3
        assert {s.param for s in spec.slots if s.kind == "RZ"} == {2}

    def test_beta_half_pi_flips_all(self):
        # RX(pi) on each qubit maps |00> to (-i)^2 |11>
        psi = prepare_state(build_hva(2, 1), [np.pi / 2, 0.0]).amps
        assert overlap(psi, [0, 0, 0, 1]) == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(psi, [0, 0, 0, -1], atol=1e-14)


class TestSimulation:
    @pytest.mark.parametrize("variant, model", [("HEA", "TFIM"), ("HVA", "TFIM"), ("HVA", "LFIM")])
    def test_matches_dense(self, variant, model):
        rng = np.random.default_rng(1)
        spec = build_ansatz(variant, 3, 2, model)
        for _ in range(3):
            th = rng.uniform(0, 2 * np.pi, spec.n_params)
            np.testing.assert_allclose(prepare_state(spec, th).amps, dense_state(spec, th), atol=1e-12)

    def test_batch_rows_match_single(self):
        rng = np.random.default_rng(2)
        spec = build_hea(4, 2)
        th = rng.uniform(0, 2 * np.pi, (5, spec.n_params))
        batch = prepare_states(spec, th)
        for b in range(5):
            np.testing.assert_allclose(batch[b], prepare_state(spec, th[b]).amps, atol=1e-14)

    def test_wrong_length(self):
        with pytest.raises(LengthMismatchError):
            prepare_state(build_hea(2, 1), np.zeros(3))

    def test_non_finite(self):
        with pytest.raises(ValueError):
            prepare_state(build_hea(2, 1), [0, 0, np.nan, 0])


@pytest.mark.parametrize("n, d", [(1, 1), (2, 0)])
def test_invalid_sizes(n, d):
    with pytest.raises(InvalidSizeError):
        build_hea(n, d)
    with pytest.raises(InvalidSizeError):
        build_hva(n, d)


def test_unknown_variant():
    with pytest.raises(ValueError):
        build_ansatz("QAOA", 2, 1)


def test_dump():
    lines = build_hva(2, 1).dump().splitlines()
    assert lines[0] == "RX 0 param=0 scale=2"
    assert lines[2] == "RZZ 0,1 param=1 scale=2"
    assert build_hea(2, 1).dump().splitlines()[-1] == "CNOT 1,0"
