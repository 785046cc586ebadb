"""Finite truncations of a totally atomic nest algebra, in floating point.

A block upper triangular matrix A (blocks given by the atom sizes) is
carried along the path ``A(z) = (A_ij z^(j-i))`` where i, j are atom
indices.  On the unit circle the path is a diagonal-unitary conjugate of A,
which is what the checks below measure.
"""

from __future__ import annotations

import numpy as np

from .errors import LilInputError

BOUNDARY_RTOL = 1e-10
NORM_ATOL = 1e-9
INVERSE_ATOL = 1e-8
SUBSPACE_ATOL = 1e-8


def atom_index(atoms) -> np.ndarray:
    atoms = [int(a) for a in atoms]
    if not atoms or min(atoms) < 1:
        raise LilInputError("atom sizes must be positive integers")
    return np.repeat(np.arange(len(atoms)), atoms)


def block_upper_mask(atoms) -> np.ndarray:
    k = atom_index(atoms)
    return k[:, None] <= k[None, :]


def _check_shape(A, atoms):
    k = atom_index(atoms)
    if A.shape != (k.size, k.size):
        raise LilInputError(f"matrix of shape {A.shape} does not match atoms {list(atoms)}")
    return k


def path(A, atoms, z) -> np.ndarray:
    """A(z): the (i, j) atom block scaled by z^(j - i).  Requires |z| <= 1."""
    A = np.asarray(A, dtype=complex)
    k = _check_shape(A, atoms)
    if abs(z) > 1 + 1e-12:
        raise LilInputError(f"|z| = {abs(z)} lies outside the closed unit disk")
    if np.any(A[~block_upper_mask(atoms)] != 0):
        raise LilInputError("matrix is not block upper triangular")
    diff = k[None, :] - k[:, None]
    if z == 1:
        return A.copy()
    scale = np.where(diff >= 0, complex(z) ** np.maximum(diff, 0), 0)
    return A * scale


def u_theta(atoms, theta: float) -> np.ndarray:
    """Diagonal unitary with e^(i m theta) on atom m (atoms numbered from 1)."""
    k = atom_index(atoms)
    return np.diag(np.exp(1j * (k + 1) * theta))


def boundary_conjugation_check(A, atoms, theta: float) -> float:
    """||U(θ)* A U(θ) - A(e^{iθ})||_F."""
    A = np.asarray(A, dtype=complex)
    U = u_theta(atoms, theta)
    return float(np.linalg.norm(U.conj().T @ A @ U - path(A, atoms, np.exp(1j * theta))))


def disk_samples(count: int, rng: np.random.Generator) -> np.ndarray:
    """Half on the unit circle, half inside; always includes 0 and 1."""
    nb = max(count // 2, 1)
    ni = max(count - nb, 0)
    offset = rng.uniform(0, 2 * np.pi / nb)
    boundary = np.exp(1j * (offset + 2 * np.pi * np.arange(nb) / nb))
    r = np.sqrt(rng.uniform(0, 1, ni))
    interior = r * np.exp(1j * rng.uniform(0, 2 * np.pi, ni))
    pts = np.concatenate([[0.0, 1.0], boundary, interior])
    return pts[:max(count, 2)]


def spectral_norm(A) -> float:
    return float(np.linalg.norm(A, 2))


def norm_bound_check(A, atoms, samples: int = 200, seed: int = 0) -> dict:
    """||A(z)|| <= ||A|| on the disk, with equality on the circle."""
    A = np.asarray(A, dtype=complex)
    rng = np.random.default_rng(seed)
    base = spectral_norm(A)
    worst_slack = -np.inf
    worst_boundary = 0.0
    violations = 0
    for z in disk_samples(samples, rng):
        nz = spectral_norm(path(A, atoms, z))
        slack = nz - base
        worst_slack = max(worst_slack, slack)
        if slack > NORM_ATOL:
            violations += 1
        if abs(abs(z) - 1) < 1e-15:
            worst_boundary = max(worst_boundary, abs(nz - base))
    return {
        "norm": base,
        "max_excess": float(worst_slack),
        "violations": violations,
        "max_boundary_deviation": float(worst_boundary),
        "ok": violations == 0 and worst_boundary <= NORM_ATOL,
    }


def inverse_path_check(A, B, atoms, samples: int = 200, seed: int = 0) -> dict:
    """A(z) B(z) = I across the disk when B = A^-1."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    I = np.eye(A.shape[0])
    if np.linalg.norm(A @ B - I) > INVERSE_ATOL:
        raise LilInputError("B is not an inverse of A")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for z in disk_samples(samples, rng):
        worst = max(worst, float(np.linalg.norm(path(A, atoms, z) @ path(B, atoms, z) - I)))
    return {"max_residual": worst, "ok": worst <= INVERSE_ATOL}


def multiplicativity_residual(A, B, atoms, z) -> float:
    """||(AB)(z) - A(z)B(z)||_F / (||A||_F ||B||_F)."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    r = np.linalg.norm(path(A @ B, atoms, z) - path(A, atoms, z) @ path(B, atoms, z))
    return float(r / max(np.linalg.norm(A) * np.linalg.norm(B), 1e-300))


def path_coefficients(A, atoms) -> np.ndarray:
    """Taylor coefficients D_0, D_1, ... of A(z), recovered from circle samples by FFT.

    Sampling at 2p points leaves room to see that coefficients of degree p
    and higher vanish.
    """
    p = len(atoms)
    m = 2 * p
    zs = np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.stack([path(A, atoms, z) for z in zs])
    return np.fft.fft(vals, axis=0) / m


def diagonal_band(A, atoms, d: int) -> np.ndarray:
    """D_d = sum_k E_k A E_{k+d}."""
    k = atom_index(atoms)
    A = np.asarray(A, dtype=complex)
    return np.where(k[None, :] - k[:, None] == d, A, 0)


def random_block_upper(atoms, rng: np.random.Generator, mask=None, shift: float = 3.0) -> np.ndarray:
    """Random complex block upper triangular matrix, well conditioned by a diagonal shift."""
    k = atom_index(atoms)
    n = k.size
    A = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    allowed = block_upper_mask(atoms)
    if mask is not None:
        allowed = allowed & np.asarray(mask, dtype=bool)
    A = np.where(allowed, A, 0)
    return A + shift * np.eye(n)


def pattern_mask(alg) -> np.ndarray:
    n = alg.n
    m = np.zeros((n, n), dtype=bool)
    for i, j in alg.unit_pairs:
        m[i, j] = True
    return m


def check_csl_atoms(alg, atoms):
    """The pattern must be block upper triangular for the atoms, with the atoms as its blocks."""
    k = atom_index(atoms)
    if k.size != alg.n:
        raise LilInputError(f"atoms {list(atoms)} do not add up to {alg.n}")
    starts = np.concatenate([[0], np.cumsum(atoms)])
    expected = [tuple(range(starts[a], starts[a + 1])) for a in range(len(atoms))]
    if sorted(alg.structure.blocks) != expected:
        raise LilInputError("pattern blocks differ from the atoms")
    if np.any(pattern_mask(alg) & ~block_upper_mask(atoms)):
        raise LilInputError("pattern is not block upper triangular for these atoms")


def lie_similarity_path_check(alg, L, atoms, samples: int = 50, seed: int = 0) -> dict:
    """Conjugate a (rational) Lie ideal by A(z) X A(z)^-1 and measure distance from L.

    ``L`` is an exact Subspace of M_n; it is converted to floats and
    orthonormalized.  A is a random invertible of the CSL algebra.
    """
    check_csl_atoms(alg, atoms)
    rng = np.random.default_rng(seed)
    n = alg.n
    A = random_block_upper(atoms, rng, mask=pattern_mask(alg))
    B = np.linalg.inv(A)
    basis = np.array([[float(x) for x in b] for b in L.basis], dtype=complex).reshape(-1, n * n)
    if basis.size:
        Qm, _ = np.linalg.qr(basis.T)
    else:
        Qm = np.zeros((n * n, 0))
    worst = 0.0
    for z in disk_samples(samples, rng):
        Az, Bz = path(A, atoms, z), path(B, atoms, z)
        for x in basis:
            X = x.reshape(n, n)
            y = (Az @ X @ Bz).reshape(-1)
            resid = y - Qm @ (Qm.conj().T @ y)
            worst = max(worst, float(np.linalg.norm(resid) / max(np.linalg.norm(x), 1e-300)))
    return {"dim": int(basis.shape[0]), "max_residual": worst, "ok": worst <= SUBSPACE_ATOL}
