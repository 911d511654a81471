"""Density operators, amplitudes, entropy and the canonical purification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import (
    EigenSystem,
    InputError,
    NEGATIVE_TOL,
    herm_eig,
    hermitize,
    support_mask,
)

TRACE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A validated state: Hermitian, PSD, unit trace, spectrum cached."""

    matrix: np.ndarray
    eig: EigenSystem

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig.eigenvalues

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self) -> str:
        spec = np.array2string(self.eigenvalues, precision=4)
        return f"DensityOperator(dim={self.dim}, spectrum={spec})"


@dataclass(frozen=True, eq=False)
class Amplitude:
    """Operator χ from an auxiliary space into the state space, Tr χ†χ = 1."""

    matrix: np.ndarray

    def density(self) -> np.ndarray:
        return self.matrix @ self.matrix.conj().T


def make_density(m) -> DensityOperator:
    """Validate ``m`` as a density matrix.

    Small negative eigenvalues (above -1e-8) are clamped to zero and the
    result renormalized; anything worse is rejected.
    """
    if isinstance(m, DensityOperator):
        return m
    h = hermitize(m, "density")
    tr = float(np.trace(h).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise InputError(f"density trace is {tr:.12g}, expected 1")
    h = h / tr
    eig = herm_eig(h)
    w, v = eig.eigenvalues, eig.eigenvectors
    if w[0] < -NEGATIVE_TOL:
        raise InputError(f"density has negative eigenvalue {w[0]:.6g}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        w = w / w.sum()
        h = (v * w) @ v.conj().T
        eig = EigenSystem(w, v)
    return DensityOperator(h, eig)


def von_neumann_entropy(s) -> float:
    """S = -Σ λ ln λ in nats over the nonzero spectrum."""
    w = make_density(s).eigenvalues
    w = w[w > 0]
    return float(max(0.0, -np.sum(w * np.log(w))))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        j = int(np.argmax(np.abs(col)))
        if abs(col[j]) > 0:
            out[:, k] = col * (abs(col[j]) / col[j])
    return out


def purify(s) -> Amplitude:
    """Canonical purification Ω = Σ √λ_i (ē_i ⊗ e_i) as a d²×1 amplitude.

    The probe factor carries the conjugated eigenvectors, so the probe
    marginal of ΩΩ† is the transpose of ``s`` and the system marginal is
    ``s`` itself.
    """
    s = make_density(s)
    w, v = s.eigenvalues, _fix_phase(s.eig.eigenvectors)
    d = s.dim
    omega = np.zeros(d * d, dtype=complex)
    for lam, e in zip(w, v.T):
        if lam > 0:
            omega += np.sqrt(lam) * np.kron(e.conj(), e)
    return Amplitude(omega.reshape(d * d, 1))


def maximally_mixed(d: int) -> DensityOperator:
    return make_density(np.eye(d) / d)


def basis_state(d: int, k: int) -> DensityOperator:
    if not 0 <= k < d:
        raise InputError(f"basis index {k} out of range for dimension {d}")
    m = np.zeros((d, d), dtype=complex)
    m[k, k] = 1.0
    return make_density(m)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Ginibre-distributed density operator of the given rank (full by default)."""
    r = d if rank is None else rank
    g = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    m = g @ g.conj().T
    return make_density(m / np.trace(m).real)


def rank(s, support_cutoff: float = 1e-12) -> int:
    return int(support_mask(make_density(s).eigenvalues, support_cutoff).sum())
