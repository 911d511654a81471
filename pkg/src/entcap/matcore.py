"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The probe
factor of a bipartite space is always the slow (leftmost) Kronecker index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

SUPPORT_CUTOFF = 1e-12
HERMITIAN_TOL = 1e-10
HERMITIAN_HARD_TOL = 1e-8
NEGATIVE_TOL = 1e-8


class InputError(ValueError):
    """Rejected input: wrong shape, not a state, not a channel, ..."""


class ConsistencyError(RuntimeError):
    """An internal numerical invariant failed beyond tolerance."""


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise InputError(f"{name} must be two-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{name} has non-finite entries")
    return m


def _square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise InputError(f"{name} must be square, got shape {m.shape}")
    return m


def hermitize(h, name: str = "matrix") -> np.ndarray:
    """Return (h + h†)/2, rejecting inputs that are far from Hermitian."""
    m = _square(h, name)
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    if np.abs(m - m.conj().T).max(initial=0.0) > HERMITIAN_HARD_TOL * scale:
        raise InputError(f"{name} is not Hermitian")
    return (m + m.conj().T) / 2


def transpose_tilde(a) -> np.ndarray:
    """Transposition A -> J A† J with J complex conjugation, i.e. plain A^T."""
    return as_matrix(a).T.copy()


def tensor(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def tensor_all(mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def partial_trace(m, dim_a: int, dim_b: int, keep: str = "A") -> np.ndarray:
    """Reduce a matrix on C^dim_a ⊗ C^dim_b to one factor.

    Args:
        m: square matrix of side dim_a * dim_b.
        keep: "A" traces out the second factor, "B" the first.
    """
    m = _square(m)
    if m.shape[0] != dim_a * dim_b:
        raise InputError(
            f"partial_trace: side {m.shape[0]} != {dim_a} x {dim_b}"
        )
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep in ("A", "a", 0):
        return np.einsum("ibjb->ij", t)
    if keep in ("B", "b", 1):
        return np.einsum("aiaj->ij", t)
    raise InputError(f"partial_trace: keep must be 'A' or 'B', got {keep!r}")


def herm_eig(h) -> EigenSystem:
    """Deterministic Hermitian eigendecomposition, eigenvalues ascending."""
    m = hermitize(h)
    w, v = np.linalg.eigh(m)
    return EigenSystem(w, v)


def _check_psd(w: np.ndarray) -> None:
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    if w.size and w[0] < -NEGATIVE_TOL * scale:
        raise InputError(f"matrix has negative eigenvalue {w[0]:.3e}")


def support_mask(w: np.ndarray, support_cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    top = float(w.max(initial=0.0))
    if top <= 0:
        return np.zeros(w.shape, dtype=bool)
    return w > support_cutoff * top


def spectral_apply(
    eig: EigenSystem,
    f: Callable[[np.ndarray], np.ndarray],
    support_cutoff: float = SUPPORT_CUTOFF,
) -> np.ndarray:
    """Apply f on the support of a PSD spectrum; zero elsewhere."""
    w, v = eig.eigenvalues, eig.eigenvectors
    mask = support_mask(w, support_cutoff)
    fw = np.zeros(w.shape, dtype=float)
    fw[mask] = f(w[mask])
    vs = v[:, mask]
    return (vs * fw[mask]) @ vs.conj().T


_NAMED = {
    "sqrt": np.sqrt,
    "ln": np.log,
    "log": np.log,
    "inv": lambda x: 1.0 / x,
    "inv_sqrt": lambda x: 1.0 / np.sqrt(x),
}


def matrix_func(h, f="ln", support_cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Spectral function of a PSD matrix restricted to its support.

    Eigenvalues at or below ``support_cutoff * λ_max`` are mapped to 0, so
    ``ln``, ``inv`` and ``inv_sqrt`` act as pseudo-functions on the support.

    Args:
        h: Hermitian positive semidefinite matrix.
        f: one of "sqrt", "ln", "inv", "inv_sqrt" or a vectorized callable.
        support_cutoff: relative threshold defining the support.
    """
    eig = herm_eig(h)
    _check_psd(eig.eigenvalues)
    func = _NAMED[f] if isinstance(f, str) else f
    return spectral_apply(eig, func, support_cutoff)


def support_projector(h, support_cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    eig = herm_eig(h)
    _check_psd(eig.eigenvalues)
    mask = support_mask(eig.eigenvalues, support_cutoff)
    vs = eig.eigenvectors[:, mask]
    return vs @ vs.conj().T


def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def trace_norm(a) -> float:
    return float(np.abs(np.linalg.eigvalsh(hermitize(a))).sum())


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
