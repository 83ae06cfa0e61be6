"""Transfer-matrix helpers: DFT blocks, permutation codecs, phase comparisons."""

import numpy as np
import pytest

from muxkit import linalg

RNG = np.random.default_rng(20260814)


def test_dft_matrix_is_complex_hadamard():
    for n in range(1, 17):
        w = linalg.dft_matrix(n)
        assert w.shape == (n, n)
        assert linalg.is_unitary(w)
        assert linalg.is_complex_hadamard(w)
        # row/column 0 are flat
        assert np.allclose(w[0], 1.0 / np.sqrt(n))
        assert np.allclose(w[:, 0], 1.0 / np.sqrt(n))


def test_dft_matrix_rejects_bad_n():
    with pytest.raises(ValueError):
        linalg.dft_matrix(0)


def test_dft_diagonalizes_cyclic_shift():
    # W^dag C W must be diagonal with unit-modulus entries
    for n in (2, 3, 4, 6, 8):
        w = linalg.dft_matrix(n)
        c = linalg.cyclic_perm(n, 1)
        d = w.conj().T @ c @ w
        assert np.abs(d - np.diag(np.diag(d))).max() < 1e-9
        assert np.allclose(np.abs(np.diag(d)), 1.0)


def test_cyclic_perm_power_composition():
    for n in (2, 3, 5, 9):
        for a in range(n):
            for b in range(n):
                lhs = linalg.cyclic_perm(n, a) @ linalg.cyclic_perm(n, b)
                rhs = linalg.cyclic_perm(n, (a + b) % n)
                assert np.abs(lhs - rhs).max() < 1e-12


def test_perm_matrix_mapping_roundtrip():
    for _ in range(50):
        n = int(RNG.integers(1, 12))
        mapping = RNG.permutation(n)
        mat = linalg.perm_matrix(mapping)
        assert linalg.is_permutation_matrix(mat)
        back = linalg.matrix_to_mapping(mat)
        assert np.array_equal(back, mapping)


def test_perm_matrix_rejects_non_permutation():
    with pytest.raises(ValueError):
        linalg.perm_matrix([0, 0, 1])
    with pytest.raises(ValueError):
        linalg.matrix_to_mapping(np.ones((3, 3)))
    # unitary but not a permutation
    assert not linalg.is_permutation_matrix(linalg.dft_matrix(4))


def test_matrix_to_mapping_tolerates_entry_phases():
    mapping = np.array([2, 0, 1])
    mat = linalg.perm_matrix(mapping) * np.exp(0.31j)
    assert np.array_equal(linalg.matrix_to_mapping(mat), mapping)


def test_global_phase_between():
    a = RNG.standard_normal((4, 4)) + 1j * RNG.standard_normal((4, 4))
    lam = np.exp(1.234j)
    assert abs(linalg.global_phase_between(lam * a, a) - lam) < 1e-12
    assert linalg.equal_up_to_global_phase(lam * a, a)
    assert not linalg.equal_up_to_global_phase(a + 0.1, a)
    with pytest.raises(ValueError):
        linalg.global_phase_between(a, np.zeros_like(a))


def test_equal_up_to_global_phase_zero_pair():
    z = np.zeros((3, 3), dtype=complex)
    assert linalg.equal_up_to_global_phase(z, z)


def test_canonical_angle_branch():
    # canonical branch is (-2pi, 0]
    th = RNG.uniform(-20, 20, size=200)
    out = linalg.canonical_angle(th)
    assert np.all(out <= 0.0)
    assert np.all(out > -2 * np.pi)
    assert np.allclose(np.exp(1j * out), np.exp(1j * th))
    assert linalg.canonical_angle(0.0) == 0.0
    assert linalg.canonical_angle(2 * np.pi) == 0.0


def test_phases_to_diag():
    ang = np.array([0.0, -np.pi / 2, np.pi])
    d = linalg.phases_to_diag(ang)
    assert np.allclose(np.diag(d), np.exp(1j * ang))
    assert np.abs(d - np.diag(np.diag(d))).max() == 0.0


def test_kron_all_matches_numpy():
    mats = [RNG.standard_normal((k, k)) for k in (2, 3, 2)]
    expect = np.kron(np.kron(mats[0], mats[1]), mats[2])
    assert np.allclose(linalg.kron_all(mats), expect)
    assert np.array_equal(linalg.kron_all([]), np.eye(1))
    assert np.allclose(linalg.kron(mats[0], mats[1]), np.kron(mats[0], mats[1]))
