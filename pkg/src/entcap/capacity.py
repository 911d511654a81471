"""Exchange information and entangled channel capacity.

The capacity is the supremum over input states ς⁰ of

    J(ς⁰, Λ) = I(ϖ),   ϖ = (Id ⊗ Λ*)(canonical purification of ς⁰).

Inputs are parameterized as ς = exp(H)/Tr exp(H) with H Hermitian, which
keeps iterates full rank. Eigenvalues are clamped at ``OptimizerConfig.clamp``
so that a supremum reached only at the boundary shows up as a
non-converged report instead of a large finite number.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .channel import QuantumChannel, channel_compound, tensor_channels
from .divergence import EntropyType, mutual_info
from .matcore import InputError, tensor_all
from .qstate import DensityOperator, make_density

log = logging.getLogger(__name__)

MAX_JOINT_DIM = 16


class Method(enum.Enum):
    EXP_PARAM_GRADIENT = "gradient"
    NELDER_MEAD = "nelder-mead"

    @classmethod
    def parse(cls, s) -> "Method":
        if isinstance(s, cls):
            return s
        key = str(s).strip().lower().replace("_", "-")
        for m in cls:
            if key in (m.value, m.name.lower().replace("_", "-")):
                return m
        raise InputError(f"unknown optimizer method {s!r}")


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 2000
    tol: float = 1e-9
    restarts: int = 8
    seed: int = 0
    method: Method = Method.EXP_PARAM_GRADIENT
    fd_step: float = 1e-5
    grad_tol: float = 1e-7
    stall_iters: int = 20
    clamp: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        if not self.tol > 0:
            raise InputError("tol must be positive")
        if self.restarts < 1:
            raise InputError("restarts must be >= 1")
        if self.max_iters < 1:
            raise InputError("max_iters must be >= 1")


@dataclass
class CapacityReport:
    value: float
    optimal_input: DensityOperator
    entropy_type: EntropyType
    trace: list
    seed: int
    converged: bool
    at_boundary: bool = False
    restart_values: list = field(default_factory=list)

    def __repr__(self) -> str:
        return (
            f"CapacityReport(value={self.value:.9f}, type={self.entropy_type.value}, "
            f"converged={self.converged}, at_boundary={self.at_boundary})"
        )


def exchange_info(s0, c: QuantumChannel, t) -> float:
    """J(ς⁰, Λ): mutual information of the input-output compound state."""
    return mutual_info(channel_compound(s0, c), EntropyType.parse(t))


# parameterization -----------------------------------------------------------

def _theta_to_h(theta: np.ndarray, d: int) -> np.ndarray:
    h = np.zeros((d, d), dtype=complex)
    h[np.diag_indices(d)] = theta[:d]
    iu = np.triu_indices(d, 1)
    m = len(iu[0])
    h[iu] = theta[d:d + m] + 1j * theta[d + m:]
    h[(iu[1], iu[0])] = np.conj(h[iu])
    return h


def _spectrum(theta: np.ndarray, d: int, clamp: float) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(_theta_to_h(theta, d))
    p = np.exp(w - w.max())
    p /= p.sum()
    p = np.maximum(p, clamp)
    return p / p.sum(), v


def input_state(theta: np.ndarray, d: int, clamp: float) -> DensityOperator:
    """exp(H)/Tr exp(H) with eigenvalues clamped below at ``clamp``."""
    p, v = _spectrum(theta, d, clamp)
    return make_density((v * p) @ v.conj().T)


def _entropy(lam: np.ndarray) -> float:
    lam = lam[lam > 1e-300]
    return float(-np.sum(lam * np.log(lam)))


def exchange_info_spectral(p: np.ndarray, v: np.ndarray, c: QuantumChannel, t: EntropyType) -> float:
    """J(ς⁰, Λ) for ς⁰ = V diag(p) V†, p > 0, without building validated states.

    The output compound is ϖ = Y Y† with the k-th column of Y equal to
    (I ⊗ A_k)Ω, so both divergences reduce to small Gram-type matrices.
    Used by the optimizer; ``exchange_info`` stays the reference.
    """
    d = v.shape[0]
    omega = (v.conj() * np.sqrt(p)) @ v.T  # Ω as a d x d array, probe index first
    y = np.stack([(omega @ a.T).reshape(-1) for a in c.kraus], axis=1)
    gram = y.conj().T @ y
    g_w, g_u = np.linalg.eigh((gram + gram.conj().T) / 2)
    sigma0 = (v * p) @ v.conj().T
    out = sum(a @ sigma0 @ a.conj().T for a in c.kraus)
    s_w, s_u = np.linalg.eigh((out + out.conj().T) / 2)
    if t is EntropyType.A_TYPE:
        return _entropy(p) + _entropy(np.clip(s_w, 0, None)) - _entropy(np.clip(g_w, 0, None))
    keep = g_w > 1e-14 * g_w.max()
    yr = y @ g_u[:, keep]
    s_mask = s_w > 1e-12 * s_w.max()
    # φ⁺ = ϱ⁺ ⊗ ς⁺ with ϱ = ς⁰ transposed, applied in the product eigenbasis
    rho_vecs = v.conj()
    coords = np.einsum("ai,bj,abk->ijk", rho_vecs.conj(), s_u[:, s_mask].conj(),
                       yr.reshape(d, c.dim_out, -1))
    inv = 1.0 / np.outer(p, s_w[s_mask])
    m = np.einsum("ijk,ij,ijl->kl", coords.conj(), inv, coords)
    m_w, m_u = np.linalg.eigh((m + m.conj().T) / 2)
    if m_w[0] <= 0:
        return np.inf
    log_m = (m_u * np.log(m_w)) @ m_u.conj().T
    g_r = g_w[keep]
    return float(np.sum(np.diag(log_m).real * g_r))


class _Objective:
    def __init__(self, c: QuantumChannel, t: EntropyType, cfg: OptimizerConfig):
        self.c, self.t, self.cfg = c, t, cfg
        self.d = c.dim_in
        self.calls = 0

    def __call__(self, theta) -> float:
        self.calls += 1
        if not np.all(np.isfinite(theta)):
            return -np.inf
        p, v = _spectrum(theta, self.d, self.cfg.clamp)
        return exchange_info_spectral(p, v, self.c, self.t)

    def grad(self, theta) -> np.ndarray:
        h = self.cfg.fd_step
        g = np.empty_like(theta)
        for i in range(theta.size):
            e = np.zeros_like(theta)
            e[i] = h
            g[i] = (self(theta + e) - self(theta - e)) / (2 * h)
        return g


MAX_MOVE = 5.0
MIN_STEP = 1e-14


def _gradient_ascent(obj: _Objective, theta: np.ndarray, cfg: OptimizerConfig):
    """Quasi-Newton ascent: FD gradients, BFGS direction, backtracking steps."""
    f = obj(theta)
    g = obj.grad(theta)
    n = theta.size
    hinv = np.eye(n)
    trace = [(0, f)]
    small = 0
    converged = stalled = False
    for it in range(1, cfg.max_iters + 1):
        if np.sqrt(float(g @ g)) < cfg.grad_tol:
            converged = True
            break
        d = hinv @ g
        slope = float(g @ d)
        if slope <= 0:
            hinv = np.eye(n)
            d, slope = g.copy(), float(g @ g)
        t = min(1.0, MAX_MOVE / np.abs(d).max())
        fc = obj(theta + t * d)
        while not fc >= f + 1e-4 * t * slope and t > MIN_STEP:
            t *= 0.5
            fc = obj(theta + t * d)
        if t <= MIN_STEP:
            if np.allclose(hinv, np.eye(n)):
                stalled = True
                break
            hinv = np.eye(n)
            continue
        step = t * d
        theta_new = theta + step
        g_new = obj.grad(theta_new)
        # maximizing f == minimizing -f: curvature pair is (s, g - g_new)
        y = g - g_new
        sy = float(step @ y)
        if sy > 1e-16 * max(1.0, float(y @ y)):
            if it == 1:
                hinv = np.eye(n) * sy / float(y @ y)
            rho = 1.0 / sy
            v = np.eye(n) - rho * np.outer(step, y)
            hinv = v @ hinv @ v.T + rho * np.outer(step, step)
        else:
            hinv = np.eye(n)
        delta = fc - f
        theta, f, g = theta_new, fc, g_new
        trace.append((it, f))
        small = small + 1 if delta < cfg.tol else 0
        if small >= cfg.stall_iters:
            stalled = True
            break
    return theta, f, trace, converged, stalled


def _at_clamp(theta: np.ndarray, d: int, cfg: OptimizerConfig) -> bool:
    p, _ = _spectrum(theta, d, cfg.clamp)
    return bool(p.min() <= cfg.clamp * 1.5)


def _nelder_mead(obj: _Objective, theta: np.ndarray, cfg: OptimizerConfig, trace: list):
    start = trace[-1][0] if trace else 0
    hist = []

    def neg(x):
        return -obj(x)

    def cb(xk):
        hist.append(obj(xk))

    n = theta.size
    res = minimize(
        neg,
        theta,
        method="Nelder-Mead",
        callback=cb,
        options={
            "maxiter": 200 * n,
            "xatol": 1e-8,
            "fatol": cfg.tol,
            "adaptive": True,
            "initial_simplex": theta + 0.05 * np.vstack([np.zeros(n), np.eye(n)]),
        },
    )
    trace.extend((start + i + 1, v) for i, v in enumerate(hist))
    return res.x, -res.fun, bool(res.success)


def _outward_increase(c, t, rho: DensityOperator, cfg: OptimizerConfig) -> bool:
    """True when pushing clamped eigenvalues further toward zero still helps."""
    w, v = rho.eigenvalues, rho.eig.eigenvectors
    at = w <= cfg.clamp * 1.5
    if not at.any():
        return False
    base = exchange_info(rho, c, t)
    p = w.copy()
    p[at] = cfg.clamp * 1e-2
    p /= p.sum()
    pushed = exchange_info((v * p) @ v.conj().T, c, t)
    return pushed > base + max(cfg.tol, 1e-9)


def _single_run(obj: _Objective, theta0: np.ndarray, cfg: OptimizerConfig):
    if cfg.method is Method.NELDER_MEAD:
        trace = [(0, obj(theta0))]
        theta, f, ok = _nelder_mead(obj, theta0, cfg, trace)
        return theta, f, trace, ok
    theta, f, trace, converged, stalled = _gradient_ascent(obj, theta0, cfg)
    if stalled and _at_clamp(theta, obj.d, cfg):
        # pinned at the eigenvalue clamp; the boundary test decides
        return theta, f, trace, False
    if stalled and not converged:
        th2, f2, ok = _nelder_mead(obj, theta, cfg, trace)
        if f2 > f:
            theta, f = th2, f2
        converged = ok
    return theta, f, trace, converged


def restart_points(d: int, cfg: OptimizerConfig) -> list[np.ndarray]:
    """H = 0 first, then seeded Gaussian Hermitian generators."""
    pts = [np.zeros(d * d)]
    for k in range(1, cfg.restarts):
        rng = np.random.default_rng([cfg.seed, k])
        pts.append(rng.normal(size=d * d))
    return pts


def capacity(c: QuantumChannel, t, cfg: OptimizerConfig | None = None) -> CapacityReport:
    """Maximize J(·, Λ) over input states with multi-restart ascent."""
    cfg = cfg or OptimizerConfig()
    t = EntropyType.parse(t)
    obj = _Objective(c, t, cfg)
    best = None
    values = []
    for k, theta0 in enumerate(restart_points(c.dim_in, cfg)):
        theta, f, trace, ok = _single_run(obj, theta0, cfg)
        values.append(f)
        log.debug("restart %d: J=%.12g converged=%s", k, f, ok)
        if best is None or f > best[1] + 1e-12:
            best = (theta, f, trace, ok)
    theta, _, trace, ok = best
    rho = input_state(theta, c.dim_in, cfg.clamp)
    value = exchange_info(rho, c, t)
    boundary = _outward_increase(c, t, rho, cfg)
    return CapacityReport(
        value=value,
        optimal_input=rho,
        entropy_type=t,
        trace=trace,
        seed=cfg.seed,
        converged=ok and not boundary,
        at_boundary=boundary,
        restart_values=values,
    )


# additivity ------------------------------------------------------------------

def additivity_inputs_check(
    channels: Sequence[QuantumChannel], inputs: Sequence, t
) -> tuple[float, float]:
    """(J(⊗ς_i, ⊗Λ_i), Σ J(ς_i, Λ_i)) for product inputs."""
    if len(channels) != len(inputs) or not channels:
        raise InputError("channels and inputs must be aligned, non-empty lists")
    t = EntropyType.parse(t)
    states = [make_density(s) for s in inputs]
    for i, (c, s) in enumerate(zip(channels, states)):
        if s.dim != c.dim_in:
            raise InputError(f"input {i} has dim {s.dim}, channel {i} expects {c.dim_in}")
    joint = exchange_info(tensor_all([s.matrix for s in states]), tensor_channels(channels), t)
    total = sum(exchange_info(s, c, t) for c, s in zip(channels, states))
    return joint, total


@dataclass
class AdditivityResult:
    joint: float
    total: float
    joint_report: CapacityReport
    factor_reports: list

    def __iter__(self):
        return iter((self.joint, self.total))

    @property
    def gap(self) -> float:
        return self.joint - self.total

    @property
    def converged(self) -> bool:
        return self.joint_report.converged and all(r.converged for r in self.factor_reports)


def additivity_capacity_check(
    channels: Sequence[QuantumChannel], t, cfg: OptimizerConfig | None = None
) -> AdditivityResult:
    """Capacity of the product channel over all joint inputs vs the sum."""
    cfg = cfg or OptimizerConfig()
    if not channels:
        raise InputError("need at least one channel")
    joint_channel = tensor_channels(channels)
    if joint_channel.dim_in > MAX_JOINT_DIM:
        raise InputError(
            f"joint input dimension {joint_channel.dim_in} exceeds {MAX_JOINT_DIM}"
        )
    joint = capacity(joint_channel, t, cfg)
    factors = [capacity(c, t, cfg) for c in channels]
    return AdditivityResult(joint.value, sum(r.value for r in factors), joint, factors)
