"""Dense linear algebra helpers for switch-network calculations.

Everything works on plain complex numpy arrays.  Transfer matrices are
square ndarrays, phase vectors are 1-d angle arrays (radians), and
permutations travel either as 0-based mapping arrays or as 0/1 matrices.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "DEFAULT_TOL",
    "kron",
    "kron_all",
    "dft_matrix",
    "cyclic_perm",
    "cyclic_mapping",
    "perm_matrix",
    "matrix_to_mapping",
    "is_permutation_matrix",
    "is_unitary",
    "is_complex_hadamard",
    "equal_up_to_global_phase",
    "global_phase_between",
    "canonical_angle",
    "phases_to_diag",
]

DEFAULT_TOL = 1e-10


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the left factor acting on the slow index."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(factors) -> np.ndarray:
    """Kronecker product of a sequence of matrices (left to right)."""
    factors = list(factors)
    if not factors:
        return np.eye(1, dtype=complex)
    out = np.asarray(factors[0])
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f))
    return out


def dft_matrix(n: int) -> np.ndarray:
    """n-mode discrete-Fourier interferometer, entry (s, t) = exp(+i 2pi s t / n) / sqrt(n)."""
    if n < 1:
        raise ValueError("dft_matrix needs n >= 1")
    s, t = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.exp(2j * np.pi * s * t / n) / np.sqrt(n)


def cyclic_mapping(n: int, power: int = 1) -> np.ndarray:
    """Mapping array of the cyclic shift t -> (t + power) mod n."""
    return (np.arange(n) + power) % n


def cyclic_perm(n: int, power: int = 1) -> np.ndarray:
    """Matrix of the cyclic shift: entry (i, j) = 1 iff i = (j + power) mod n."""
    return perm_matrix(cyclic_mapping(n, power))


def perm_matrix(mapping: np.ndarray) -> np.ndarray:
    """Permutation matrix from a mapping array (mapping[t] = s routes input t to output s)."""
    mapping = np.asarray(mapping, dtype=int)
    n = mapping.size
    if sorted(mapping.tolist()) != list(range(n)):
        raise ValueError("not a permutation mapping")
    mat = np.zeros((n, n), dtype=complex)
    mat[mapping, np.arange(n)] = 1.0
    return mat


def matrix_to_mapping(mat: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Recover the mapping array from a permutation matrix (up to a global phase).

    Raises ValueError if the matrix is not a permutation within tol.
    """
    mat = np.asarray(mat)
    n = mat.shape[0]
    mapping = np.argmax(np.abs(mat), axis=0)
    if sorted(mapping.tolist()) != list(range(n)):
        raise ValueError("matrix is not a permutation")
    # one unit-modulus entry per column, zeros elsewhere
    check = np.zeros_like(mat)
    check[mapping, np.arange(n)] = mat[mapping, np.arange(n)]
    if np.max(np.abs(np.abs(mat[mapping, np.arange(n)]) - 1.0)) > tol:
        raise ValueError("matrix is not a permutation within tolerance")
    if np.max(np.abs(mat - check)) > tol:
        raise ValueError("matrix is not a permutation within tolerance")
    return mapping


def is_permutation_matrix(mat: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff mat is a permutation matrix up to per-entry phases of modulus 1."""
    try:
        matrix_to_mapping(mat, tol=tol)
    except ValueError:
        return False
    return True


def is_unitary(mat: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    eye = np.eye(mat.shape[0])
    return bool(np.max(np.abs(mat.conj().T @ mat - eye)) <= tol)


def is_complex_hadamard(mat: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff mat is unitary with all entries of modulus 1/sqrt(N) within tol."""
    mat = np.asarray(mat)
    if not is_unitary(mat, tol=tol):
        return False
    n = mat.shape[0]
    return bool(np.max(np.abs(np.abs(mat) - 1.0 / np.sqrt(n))) <= tol)


def global_phase_between(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> complex:
    """Unit-modulus lam with a = lam * b, or raise ValueError if none exists."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("shape mismatch")
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) <= tol:
        if np.max(np.abs(a)) <= tol:
            return 1.0 + 0.0j
        raise ValueError("no global phase relates a nonzero array to zero")
    lam = a[idx] / b[idx]
    if abs(abs(lam) - 1.0) > max(tol, 1e-8):
        raise ValueError("arrays differ by more than a phase")
    lam = lam / abs(lam)
    if np.max(np.abs(a - lam * b)) > tol:
        raise ValueError("arrays differ by more than a global phase")
    return complex(lam)


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    try:
        global_phase_between(a, b, tol=tol)
    except ValueError:
        return False
    return True


def canonical_angle(theta) -> np.ndarray:
    """Reduce angles to the canonical branch (-2pi, 0]."""
    theta = np.asarray(theta, dtype=float)
    out = np.mod(theta, -2.0 * np.pi)
    # mod returns values in (-2pi, 0] except exact multiples of 2pi give -0.0
    return out + 0.0


def phases_to_diag(angles) -> np.ndarray:
    """Diagonal phase-shifter matrix diag(exp(i * angles))."""
    return np.diag(np.exp(1j * np.asarray(angles, dtype=float)))
