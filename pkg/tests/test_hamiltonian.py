import pytest
from hypothesis import given, strategies as st

from bpdi.errors import InvalidSizeError
from bpdi.hamiltonian import Hamiltonian, build_lfim, build_tfim, term_count, weight


class TestTFIM:
    def test_two_qubits(self):
        H = build_tfim(2, 1.0)
        assert [(t.coeff, t.string) for t in H.terms] == [(-1.0, "ZZ"), (1.0, "XI"), (1.0, "IX")]

    @pytest.mark.parametrize("n, count", [(4, 7), (6, 11), (10, 19)])
    def test_term_count(self, n, count):
        assert term_count(build_tfim(n, 1.0)) == count

    def test_order_and_open_boundary(self):
        H = build_tfim(4, 0.7)
        assert H.strings == ["ZZII", "IZZI", "IIZZ", "XIII", "IXII", "IIXI", "IIIX"]
        assert "ZIIZ" not in H.strings
        assert list(H.coeffs) == [-1.0] * 3 + [0.7] * 4

    def test_too_small(self):
        with pytest.raises(InvalidSizeError):
            build_tfim(1, 1.0)


class TestLFIM:
    def test_counts(self):
        assert term_count(build_lfim(2, 1.0, 0.5)) == 5
        assert term_count(build_lfim(6, 1.0, 0.5)) == 17
        assert term_count(build_lfim(10, 1.0, 0.5)) == 29

    def test_z_block_last(self):
        H = build_lfim(3, 1.0, 0.5)
        assert H.strings[-3:] == ["ZII", "IZI", "IIZ"]
        assert list(H.coeffs[-3:]) == [0.5] * 3

    def test_hz_zero_reduces_to_tfim(self):
        assert build_lfim(4, 1.0, 0.0).terms == build_tfim(4, 1.0).terms

    def test_too_small(self):
        with pytest.raises(InvalidSizeError):
            build_lfim(1, 1.0, 0.5)


@given(n=st.integers(2, 12), h=st.floats(0.1, 5.0), hz=st.floats(0.1, 5.0))
def test_counts_and_locality(n, h, hz):
    assert term_count(build_tfim(n, h)) == 2 * n - 1
    lf = build_lfim(n, h, hz)
    assert term_count(lf) == 3 * n - 1
    assert all(1 <= weight(s) <= 2 for s in lf.strings)
    assert build_lfim(n, h, 0.0).terms == build_tfim(n, h).terms


class TestMerging:
    def test_duplicates_merge(self):
        H = Hamiltonian.from_terms(2, [(1.0, "ZZ"), (2.0, "ZZ")])
        assert term_count(H) == 1
        assert H.terms[0].coeff == 3.0

    def test_zero_sum_dropped(self):
        H = Hamiltonian.from_terms(2, [(1.0, "ZZ"), (1.0, "XI"), (-1.0, "ZZ")])
        assert H.strings == ["XI"]

    def test_length_checked(self):
        with pytest.raises(ValueError):
            Hamiltonian.from_terms(3, [(1.0, "ZZ")])

    def test_identity_rejected(self):
        with pytest.raises(ValueError):
            Hamiltonian.from_terms(2, [(1.0, "II")])


def test_text_round_trip():
    H = build_lfim(4, 1.3, 0.5)
    text = H.to_text()
    assert text.splitlines()[0] == "-1.0 ZZII"
    assert Hamiltonian.from_text(text) == H
