"""Relative entropies of both types and the informations built on them.

All values are in nats.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .matcore import SUPPORT_CUTOFF, ConsistencyError, InputError, support_mask
from .qstate import DensityOperator, make_density, von_neumann_entropy
from .entangle import CompoundState, marginals, standard_compound

ABS_CONT_TOL = 1e-10


class EntropyType(enum.Enum):
    A_TYPE = "a"
    B_TYPE = "b"

    @classmethod
    def parse(cls, s) -> "EntropyType":
        if isinstance(s, cls):
            return s
        key = str(s).strip().lower()
        for t in cls:
            if key in (t.value, t.name.lower(), f"{t.value}-type"):
                return t
        raise InputError(f"unknown entropy type {s!r}; expected 'a' or 'b'")


@dataclass(frozen=True)
class DivergenceResult:
    value: float
    support_ok: bool

    def __float__(self) -> float:
        return self.value


def _pair(w, phi) -> tuple[DensityOperator, DensityOperator]:
    w, phi = make_density(w), make_density(phi)
    if w.dim != phi.dim:
        raise InputError(f"dimension mismatch: {w.dim} vs {phi.dim}")
    return w, phi


def _support_basis(s: DensityOperator, cutoff: float = SUPPORT_CUTOFF):
    mask = support_mask(s.eigenvalues, cutoff)
    return s.eigenvalues[mask], s.eig.eigenvectors[:, mask]


def _outside_mass(w: DensityOperator, q: np.ndarray) -> float:
    inside = np.einsum("ik,ij,jk->", q.conj(), w.matrix, q).real
    return float(1.0 - inside)


def _clip(v: float) -> float:
    # round-off only; genuine negatives are left visible
    return 0.0 if -1e-12 < v < 0 else v


def _a_type(w: DensityOperator, mu: np.ndarray, q: np.ndarray) -> DivergenceResult:
    if _outside_mass(w, q) > ABS_CONT_TOL:
        return DivergenceResult(np.inf, False)
    lw, _ = _support_basis(w)
    w_log_w = float(np.sum(lw * np.log(lw)))
    # Tr[ϖ ln φ] in the eigenbasis of φ
    diag = np.einsum("ik,ij,jk->k", q.conj(), w.matrix, q).real
    w_log_phi = float(np.sum(diag * np.log(mu)))
    return DivergenceResult(_clip(w_log_w - w_log_phi), True)


def _b_type(w: DensityOperator, mu: np.ndarray, q: np.ndarray) -> DivergenceResult:
    if _outside_mass(w, q) > ABS_CONT_TOL:
        return DivergenceResult(np.inf, False)
    lw, p = _support_basis(w)
    x = (q.conj().T @ p) * np.sqrt(lw)  # φ-eigenbasis coordinates of ϖ^{1/2} on its support
    m = (x.conj().T / mu) @ x
    m = (m + m.conj().T) / 2
    ev, u = np.linalg.eigh(m)
    if ev[0] <= 0:
        return DivergenceResult(np.inf, False)
    log_m = (u * np.log(ev)) @ u.conj().T
    return DivergenceResult(_clip(float(np.sum(lw * np.diag(log_m).real))), True)


def rel_entropy_a(w, phi) -> DivergenceResult:
    """Araki-Umegaki divergence Tr[ϖ(ln ϖ - ln φ)]; +inf unless supp ϖ ⊆ supp φ."""
    w, phi = _pair(w, phi)
    return _a_type(w, *_support_basis(phi))


def rel_entropy_b(w, phi) -> DivergenceResult:
    """Belavkin-Staszewski divergence Tr[ϖ^{1/2} ln(ϖ^{1/2} φ^{-1} ϖ^{1/2}) ϖ^{1/2}].

    The logarithm is taken on the support of ϖ: with ϖ = P diag(λ) P†,
    the compressed operator diag(√λ) P† φ⁺ P diag(√λ) is positive definite
    whenever supp ϖ ⊆ supp φ, and the value is Σ λ_i [ln M]_ii.
    """
    w, phi = _pair(w, phi)
    return _b_type(w, *_support_basis(phi))


def rel_entropy(w, phi, t) -> DivergenceResult:
    t = EntropyType.parse(t)
    return rel_entropy_a(w, phi) if t is EntropyType.A_TYPE else rel_entropy_b(w, phi)


def mutual_info(w: CompoundState, t) -> float:
    """Divergence of a compound state from the product of its marginals."""
    t = EntropyType.parse(t)
    rho, sigma = marginals(w)
    # support of ϱ⊗ς taken factorwise, so tiny-but-nonzero products survive
    l1, q1 = _support_basis(rho)
    l2, q2 = _support_basis(sigma)
    mu, q = np.outer(l1, l2).ravel(), np.kron(q1, q2)
    res = _a_type(w.density, mu, q) if t is EntropyType.A_TYPE else _b_type(w.density, mu, q)
    if not res.support_ok:
        raise ConsistencyError("compound state not dominated by its marginal product")
    return res.value


def mutual_info_entropies(w: CompoundState) -> float:
    """S(ϱ) + S(ς) - S(ϖ); equals the a-type mutual information."""
    rho, sigma = marginals(w)
    return von_neumann_entropy(rho) + von_neumann_entropy(sigma) - von_neumann_entropy(w.density)


def entangled_entropy(s, t) -> float:
    """Mutual information attained by the canonical purification of ``s``."""
    return mutual_info(standard_compound(s), t)


def entangled_entropy_closed_form(s, t) -> float:
    """2 S(ς) for a-type, ln Σ 1/λ over the support for b-type."""
    t = EntropyType.parse(t)
    s = make_density(s)
    if t is EntropyType.A_TYPE:
        return 2.0 * von_neumann_entropy(s)
    lam, _ = _support_basis(s)
    return float(np.log(np.sum(1.0 / lam)))


def conditional_entropy(w: CompoundState, t) -> float:
    _, sigma = marginals(w)
    return entangled_entropy(sigma, t) - mutual_info(w, t)


def monotonicity_check(w, phi, k, t) -> tuple[float, float]:
    """(R(K*ϖ : K*φ), R(ϖ : φ)); the first should never exceed the second."""
    from .channel import apply_schrodinger

    w, phi = _pair(w, phi)
    after = rel_entropy(apply_schrodinger(k, w), apply_schrodinger(k, phi), t)
    before = rel_entropy(w, phi, t)
    return after.value, before.value
