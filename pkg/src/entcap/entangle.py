"""Compound states and entanglements.

An entanglement is stored extensionally as the compound density ϖ on
probe ⊗ system. Its map form is

    π(B) = Tr_sys[(I ⊗ B) ϖ],

so that ω(A ⊗ B) = Tr[A π(B)], π(I) is the probe marginal and
Tr π(B) = Tr[ς B]. For the canonical purification this gives
π(B) = ϱ^{1/2} B^T ϱ^{1/2}, and every entanglement factors as
π(B) = √ϱ Π(B)^T √ϱ with Π completely positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .matcore import (
    SUPPORT_CUTOFF,
    ConsistencyError,
    InputError,
    as_matrix,
    herm_eig,
    matrix_func,
    partial_trace,
    support_mask,
    support_projector,
)
from .qstate import Amplitude, DensityOperator, make_density, purify, random_density

CP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class CompoundState:
    """Density on C^dim_a ⊗ C^dim_b, probe A first."""

    dim_a: int
    dim_b: int
    density: DensityOperator

    @property
    def matrix(self) -> np.ndarray:
        return self.density.matrix

    def __repr__(self) -> str:
        return f"CompoundState(dim_a={self.dim_a}, dim_b={self.dim_b})"


@dataclass(frozen=True, eq=False)
class CPMap:
    """Completely positive map X -> Σ K X K† between full matrix algebras.

    ``normalization`` is "unital" when Σ K K† = I and "support" when it is
    only the support projector of some state.
    """

    dim_in: int
    dim_out: int
    kraus: tuple
    normalization: str = "unital"

    def __call__(self, b) -> np.ndarray:
        b = as_matrix(b)
        if b.shape != (self.dim_in, self.dim_in):
            raise InputError(f"CPMap expects {self.dim_in}x{self.dim_in}, got {b.shape}")
        out = np.zeros((self.dim_out, self.dim_out), dtype=complex)
        for k in self.kraus:
            out += k @ b @ k.conj().T
        return out

    def choi(self) -> np.ndarray:
        return choi_matrix(self, self.dim_in)


def make_compound(m, dim_a: int, dim_b: int) -> CompoundState:
    rho = make_density(m)
    if rho.dim != dim_a * dim_b:
        raise InputError(f"compound side {rho.dim} != {dim_a} x {dim_b}")
    return CompoundState(dim_a, dim_b, rho)


def compound_from_amplitude(v, dim_a: int, dim_b: int) -> CompoundState:
    """Compound state υυ† for an amplitude υ: F -> C^dim_a ⊗ C^dim_b."""
    m = v.matrix if isinstance(v, Amplitude) else as_matrix(v)
    if m.shape[0] != dim_a * dim_b:
        raise InputError(f"amplitude has {m.shape[0]} rows, expected {dim_a * dim_b}")
    return make_compound(m @ m.conj().T, dim_a, dim_b)


def standard_compound(s) -> CompoundState:
    s = make_density(s)
    return compound_from_amplitude(purify(s), s.dim, s.dim)


def product_compound(rho, sigma) -> CompoundState:
    rho, sigma = make_density(rho), make_density(sigma)
    return make_compound(np.kron(rho.matrix, sigma.matrix), rho.dim, sigma.dim)


def marginals(w: CompoundState) -> tuple[DensityOperator, DensityOperator]:
    m = w.matrix
    rho = make_density(partial_trace(m, w.dim_a, w.dim_b, keep="A"))
    sigma = make_density(partial_trace(m, w.dim_a, w.dim_b, keep="B"))
    return rho, sigma


def entanglement_apply(w: CompoundState, b) -> np.ndarray:
    """π(B) = Tr_sys[(I ⊗ B) ϖ], a dim_a x dim_a matrix."""
    b = as_matrix(b)
    if b.shape != (w.dim_b, w.dim_b):
        raise InputError(f"operator must be {w.dim_b}x{w.dim_b}, got {b.shape}")
    t = w.matrix.reshape(w.dim_a, w.dim_b, w.dim_a, w.dim_b)
    return np.einsum("kj,ajbk->ab", b, t)


def choi_matrix(f: Callable[[np.ndarray], np.ndarray], dim_in: int) -> np.ndarray:
    """Σ_ij E_ij ⊗ f(E_ij), input factor first."""
    blocks = []
    for i in range(dim_in):
        row = []
        for j in range(dim_in):
            e = np.zeros((dim_in, dim_in), dtype=complex)
            e[i, j] = 1.0
            row.append(as_matrix(f(e)))
        blocks.append(row)
    return np.block(blocks)


def cpmap_from_choi(
    choi, dim_in: int, dim_out: int, support_cutoff: float = SUPPORT_CUTOFF
) -> CPMap:
    """Minimal Kraus family from a Choi matrix; raises if it is not PSD."""
    c = as_matrix(choi)
    if c.shape != (dim_in * dim_out, dim_in * dim_out):
        raise InputError(f"Choi matrix shape {c.shape} inconsistent with {dim_in}->{dim_out}")
    eig = herm_eig(c)
    w, v = eig.eigenvalues, eig.eigenvectors
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    if w.size and w[0] < -CP_TOL * scale:
        raise ConsistencyError(f"Choi matrix not PSD: eigenvalue {w[0]:.3e}")
    mask = support_mask(w, support_cutoff)
    kraus = tuple(
        (np.sqrt(lam) * vec).reshape(dim_in, dim_out).T.copy()
        for lam, vec in zip(w[mask][::-1], v[:, mask].T[::-1])
    )
    if not kraus:
        kraus = (np.zeros((dim_out, dim_in), dtype=complex),)
    total = sum(k @ k.conj().T for k in kraus)
    norm = "unital" if np.allclose(total, np.eye(dim_out), atol=CP_TOL) else "support"
    return CPMap(dim_in, dim_out, kraus, norm)


def cpmap_from_function(f, dim_in: int, dim_out: int) -> CPMap:
    return cpmap_from_choi(choi_matrix(f, dim_in), dim_in, dim_out)


def identity_cpmap(d: int) -> CPMap:
    return CPMap(d, d, (np.eye(d, dtype=complex),), "unital")


def decompose_entanglement(w: CompoundState) -> tuple[DensityOperator, CPMap]:
    """Split an entanglement into the probe state ϱ and a CP map Π.

    Π(B) = ϱ̃^{-1/2} π(B)^T ϱ̃^{-1/2} with pseudo-inverses on the support,
    so Π(I) is the support projector of ϱ̃ = ϱ^T.
    """
    rho, _ = marginals(w)
    r = matrix_func(rho.matrix.T, "inv_sqrt")

    def big_pi(b):
        return r @ entanglement_apply(w, b).T @ r

    pi_map = cpmap_from_function(big_pi, w.dim_b, w.dim_a)
    return rho, pi_map


def compose_entanglement(rho, pi_map: CPMap) -> CompoundState:
    """Compound state whose entanglement is π(B) = √ϱ Π(B)^T √ϱ."""
    rho = make_density(rho)
    if pi_map.dim_out != rho.dim:
        raise InputError(f"CP map output dim {pi_map.dim_out} != state dim {rho.dim}")
    proj = support_projector(rho.matrix.T)
    dev = float(np.abs(pi_map(np.eye(pi_map.dim_in)) - proj).max())
    if dev > CP_TOL:
        raise InputError(f"Π(I) differs from the support projector by {dev:.3e}")
    da, db = rho.dim, pi_map.dim_in
    sq = matrix_func(rho.matrix, "sqrt")
    t = np.zeros((da, db, da, db), dtype=complex)
    for i in range(db):
        for j in range(db):
            e = np.zeros((db, db), dtype=complex)
            e[i, j] = 1.0
            t[:, j, :, i] = sq @ pi_map(e).T @ sq
    return make_compound(t.reshape(da * db, da * db), da, db)


def random_compound(
    dim_a: int, dim_b: int, rng: np.random.Generator, rank: int | None = None
) -> CompoundState:
    rho = random_density(dim_a * dim_b, rng, rank)
    return CompoundState(dim_a, dim_b, rho)


def random_entanglement_of(
    sigma, dim_a: int, rng: np.random.Generator, env_dim: int = 2
) -> CompoundState:
    """A random compound state whose system marginal is exactly ``sigma``.

    Built as a random probe-side channel applied to the canonical
    purification, then partial-traced onto the probe.
    """
    from .channel import random_cptp

    sigma = make_density(sigma)
    w = standard_compound(sigma)
    k = random_cptp(sigma.dim, dim_a, env_dim, rng)
    return apply_local(w, k, None)


def apply_local(w: CompoundState, probe_channel=None, system_channel=None) -> CompoundState:
    """(K* ⊗ Λ*)(ϖ) for channels acting on the probe and/or system factor."""
    m = w.matrix
    da, db = w.dim_a, w.dim_b
    if probe_channel is not None:
        if probe_channel.dim_in != da:
            raise InputError(f"probe channel expects dim {probe_channel.dim_in}, probe is {da}")
        m = _apply_factor(m, da, db, probe_channel.kraus, first=True)
        da = probe_channel.dim_out
    if system_channel is not None:
        if system_channel.dim_in != db:
            raise InputError(f"system channel expects dim {system_channel.dim_in}, system is {db}")
        m = _apply_factor(m, da, db, system_channel.kraus, first=False)
        db = system_channel.dim_out
    return make_compound(m, da, db)


def _apply_factor(m, da, db, kraus: Sequence[np.ndarray], first: bool) -> np.ndarray:
    t = m.reshape(da, db, da, db)
    out = None
    for k in kraus:
        if first:
            r = np.einsum("xa,abcd,yc->xbyd", k, t, k.conj())
        else:
            r = np.einsum("xb,abcd,yd->axcy", k, t, k.conj())
        out = r if out is None else out + r
    s = out.shape
    return out.reshape(s[0] * s[1], s[2] * s[3])
