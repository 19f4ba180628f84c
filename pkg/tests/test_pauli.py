import numpy as np
import pytest

from powercos import (Hamiltonian, PauliTerm, apply_term, build_heisenberg_xyz,
                      expectation, format_hamiltonian, linear_combination,
                      parse_hamiltonian, to_dense)
from powercos.errors import ResourceLimitError
from tests.conftest import E0_GOLDEN, random_hamiltonian, random_state


def test_heisenberg_term_counts():
    assert len(build_heisenberg_xyz(4, 1.0, 1.0, 0.5, 0.0).terms) == 9
    assert len(build_heisenberg_xyz(2, 1.0, 1.0, 1.0, 0.0).terms) == 3
    assert len(build_heisenberg_xyz(4, 1.0, 1.0, 0.5, 0.3).terms) == 13
    for n in (2, 3, 5, 8):
        ham = build_heisenberg_xyz(n, 0.7, -0.2, 0.1, 0.4)
        assert len(ham.terms) == 3 * (n - 1) + n


def test_heisenberg_two_site_order():
    ham = build_heisenberg_xyz(2, 1.0, 1.0, 1.0, 0.0)
    assert [t.axes for t in ham.terms] == ["XX", "YY", "ZZ"]


def test_heisenberg_rejects_single_site():
    with pytest.raises(ValueError):
        build_heisenberg_xyz(1, 1.0, 1.0, 1.0, 0.0)


def test_zero_couplings_dropped():
    ham = build_heisenberg_xyz(3, 0.0, 1.0, 0.0, 0.0)
    assert all(set(t.axes) <= {"I", "Y"} for t in ham.terms)
    assert len(ham.terms) == 2


def test_duplicate_terms_merge_and_cancel():
    ham = Hamiltonian(2, [PauliTerm(0.5, "XZ"), PauliTerm(1.0, "ZZ"),
                          PauliTerm(0.25, "XZ"), PauliTerm(-1.0, "ZZ")])
    assert [(t.coefficient, t.axes) for t in ham.terms] == [(0.75, "XZ")]


def test_term_validation():
    with pytest.raises(ValueError):
        PauliTerm(float("nan"), "X")
    with pytest.raises(ValueError):
        PauliTerm(1.0, "XQ")
    with pytest.raises(ValueError):
        PauliTerm(1.0 + 2.0j, "X")
    with pytest.raises(ValueError):
        Hamiltonian(3, [PauliTerm(1.0, "XX")])


def test_to_dense_basics():
    assert np.array_equal(to_dense(Hamiltonian(1, [PauliTerm(1.0, "Z")])),
                          np.diag([1.0 + 0j, -1.0]))
    zz = to_dense(Hamiltonian(2, [PauliTerm(0.5, "ZZ")]))
    assert np.array_equal(zz, np.diag([0.5 + 0j, -0.5, -0.5, 0.5]))


def test_to_dense_benchmark_ground_energy(bench_h):
    vals = np.linalg.eigvalsh(to_dense(bench_h))
    assert vals[0] == pytest.approx(E0_GOLDEN, abs=1e-12)
    assert vals[0] == pytest.approx(-5.4243, abs=5e-4)


def test_to_dense_hermitian():
    rng = np.random.default_rng(11)
    for n in (1, 2, 4):
        ham = random_hamiltonian(n, 6, rng)
        mat = to_dense(ham)
        assert np.max(np.abs(mat - mat.conj().T)) <= 1e-14


def test_to_dense_cap():
    with pytest.raises(ResourceLimitError):
        to_dense(Hamiltonian(13, [PauliTerm(1.0, "Z" + "I" * 12)]))


def test_apply_term_basics():
    from powercos import init_basis

    zero = init_basis(1, 0)
    out = apply_term(zero, PauliTerm(1.0, "Z"))
    assert np.array_equal(out.amplitudes, zero.amplitudes)
    out = apply_term(zero, PauliTerm(2.0, "X"))
    assert np.array_equal(out.amplitudes, np.array([0.0, 2.0], dtype=complex))


def test_apply_term_matches_dense():
    rng = np.random.default_rng(12)
    for _ in range(25):
        n = 3
        ham = random_hamiltonian(n, 4, rng)
        psi = random_state(n, rng)
        for term in ham.terms:
            dense = to_dense(Hamiltonian(n, [term]))
            expected = dense @ psi.amplitudes
            got = apply_term(psi, term).amplitudes
            assert np.max(np.abs(got - expected)) < 1e-13


def test_apply_term_shape_error():
    from powercos import init_basis

    with pytest.raises(ValueError):
        apply_term(init_basis(2, 0), PauliTerm(1.0, "XXX"))


def test_expectation_matches_dense_quadratic_form():
    rng = np.random.default_rng(13)
    for n in range(1, 9):
        ham = random_hamiltonian(n, 2 * n + 1, rng)
        psi = random_state(n, rng)
        dense = to_dense(ham)
        expected = float(np.real(np.vdot(psi.amplitudes, dense @ psi.amplitudes)))
        assert expectation(psi, ham) == pytest.approx(expected, abs=1e-12)


def test_linear_combination_merges():
    a = Hamiltonian(2, [PauliTerm(1.0, "XX"), PauliTerm(0.5, "ZI")])
    b = Hamiltonian(2, [PauliTerm(2.0, "XX")])
    mix = linear_combination([(1.0, a), (0.25, b)])
    assert dict((t.axes, t.coefficient) for t in mix.terms) == {"XX": 1.5, "ZI": 0.5}


def test_serialization_round_trip(bench_h):
    text = format_hamiltonian(bench_h)
    again = parse_hamiltonian(text)
    assert again == bench_h
    assert "0.5 IIZZ" in text


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_hamiltonian("1.0 XX extra\n")
    with pytest.raises(ValueError):
        parse_hamiltonian("abc XX\n")
    with pytest.raises(ValueError):
        parse_hamiltonian("1.0 XX\n1.0 XXX\n")
    with pytest.raises(ValueError):
        parse_hamiltonian("# only a comment\n")


def test_parse_allows_comments_and_blanks():
    ham = parse_hamiltonian("# chain\n\n0.5 ZZ\n-1 XI\n")
    assert {t.axes for t in ham.terms} == {"ZZ", "XI"}
