"""Quantum channels stored as Schrödinger-picture Kraus families.

Λ*(ς) = Σ A_k ς A_k† and its Heisenberg dual Λ(B) = Σ A_k† B A_k, with
Σ A_k† A_k = I on the input space. The number of Kraus operators is the
dimension of the channel's noise space.

Channel spec files are JSON objects with either

    {"name": ..., "dim_in": d0, "dim_out": d, "kraus": [M_0, M_1, ...]}

where each matrix is a list of rows of ``[re, im]`` pairs, or

    {"name": ..., "preset": "depolarizing", "params": [0.5]}.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .matcore import InputError, as_matrix
from .qstate import DensityOperator, make_density
from .entangle import CompoundState, apply_local, standard_compound

KRAUS_TOL = 1e-8
_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    dim_in: int
    dim_out: int
    kraus: tuple
    name: str = field(default="channel")

    @property
    def noise_dim(self) -> int:
        return len(self.kraus)

    def __repr__(self) -> str:
        return (
            f"QuantumChannel({self.name!r}, {self.dim_in}->{self.dim_out}, "
            f"kraus={len(self.kraus)})"
        )


def make_channel(kraus: Sequence, name: str = "channel") -> QuantumChannel:
    if len(kraus) == 0:
        raise InputError("channel needs at least one Kraus operator")
    ops = []
    for k, a in enumerate(kraus):
        try:
            ops.append(as_matrix(a, f"kraus[{k}]"))
        except InputError as exc:
            raise InputError(f"kraus[{k}]: {exc}") from None
    dim_out, dim_in = ops[0].shape
    for k, a in enumerate(ops):
        if a.shape != (dim_out, dim_in):
            raise InputError(
                f"kraus[{k}] has shape {a.shape}, expected {(dim_out, dim_in)}"
            )
    total = sum(a.conj().T @ a for a in ops)
    dev = float(np.linalg.norm(total - np.eye(dim_in), 2))
    if dev > KRAUS_TOL:
        raise InputError(
            f"Kraus operators are not trace preserving: ||Σ A_k†A_k - I|| = {dev:.3e}"
        )
    return QuantumChannel(dim_in, dim_out, tuple(ops), name)


def apply_schrodinger(c: QuantumChannel, s) -> DensityOperator:
    m = s.matrix if isinstance(s, DensityOperator) else as_matrix(s)
    if m.shape != (c.dim_in, c.dim_in):
        raise InputError(f"{c.name} expects {c.dim_in}x{c.dim_in} input, got {m.shape}")
    out = sum(a @ m @ a.conj().T for a in c.kraus)
    return make_density(out)


def apply_heisenberg(c: QuantumChannel, b) -> np.ndarray:
    b = as_matrix(b)
    if b.shape != (c.dim_out, c.dim_out):
        raise InputError(f"{c.name} expects {c.dim_out}x{c.dim_out} observable, got {b.shape}")
    return sum(a.conj().T @ b @ a for a in c.kraus)


def tensor_channels(cs: Sequence[QuantumChannel]) -> QuantumChannel:
    if not cs:
        raise InputError("tensor_channels needs at least one channel")
    kraus = []
    for combo in itertools.product(*(c.kraus for c in cs)):
        k = np.ones((1, 1), dtype=complex)
        for a in combo:
            k = np.kron(k, a)
        kraus.append(k)
    dim_in = int(np.prod([c.dim_in for c in cs]))
    dim_out = int(np.prod([c.dim_out for c in cs]))
    name = " ⊗ ".join(c.name for c in cs)
    return QuantumChannel(dim_in, dim_out, tuple(kraus), name)


def _weyl(d: int, a: int, b: int) -> np.ndarray:
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)


def _prob(p, what: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InputError(f"{what} parameter must lie in [0, 1], got {p}")
    return p


def _dim(x, default: int = 2) -> int:
    d = default if x is None else x
    if float(d) != int(d) or int(d) < 1:
        raise InputError(f"dimension must be a positive integer, got {x}")
    return int(d)


def _drop_zero(ops):
    return [a for a in ops if np.abs(a).max() > 0]


def identity_channel(d: int = 2) -> QuantumChannel:
    d = _dim(d)
    return QuantumChannel(d, d, (np.eye(d, dtype=complex),), f"identity:{d}")


def isometry_channel(v) -> QuantumChannel:
    v = as_matrix(v, "isometry")
    return make_channel([v], "isometry")


def depolarizing(p: float, d: int = 2) -> QuantumChannel:
    """(1 - p) ς + p I/d, Kraus family from the Weyl operators."""
    p, d = _prob(p, "depolarizing"), _dim(d)
    ops = []
    for a in range(d):
        for b in range(d):
            w = (1 - p + p / d**2) if (a, b) == (0, 0) else p / d**2
            ops.append(np.sqrt(w) * _weyl(d, a, b))
    return make_channel(_drop_zero(ops), f"depolarizing:{p:g}")


def dephasing(p: float, d: int = 2) -> QuantumChannel:
    """(1 - p) ς + p diag(ς)."""
    p, d = _prob(p, "dephasing"), _dim(d)
    ops = [np.sqrt(1 - p) * np.eye(d, dtype=complex)]
    for k in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[k, k] = np.sqrt(p)
        ops.append(e)
    return make_channel(_drop_zero(ops), f"dephasing:{p:g}")


def amplitude_damping(gamma: float) -> QuantumChannel:
    g = _prob(gamma, "amplitude_damping")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - g)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(g)], [0, 0]], dtype=complex)
    return make_channel(_drop_zero([k0, k1]), f"amplitude_damping:{g:g}")


def pauli_channel(probs: Sequence[float]) -> QuantumChannel:
    """Qubit Pauli channel with probabilities for (I, X, Y, Z)."""
    if len(probs) != 4:
        raise InputError("pauli channel takes four probabilities (I, X, Y, Z)")
    ps = [_prob(p, "pauli") for p in probs]
    if abs(sum(ps) - 1) > KRAUS_TOL:
        raise InputError(f"pauli probabilities sum to {sum(ps)}, expected 1")
    ops = [np.sqrt(p) * _PAULI[k] for p, k in zip(ps, "IXYZ")]
    return make_channel(_drop_zero(ops), "pauli")


def _isometry_preset(*params):
    if len(params) == 1 and np.ndim(params[0]) == 2:
        return isometry_channel(params[0])
    if len(params) != 2:
        raise InputError("isometry takes a matrix or (dim_in, dim_out)")
    d0, d = _dim(params[0]), _dim(params[1])
    if d < d0:
        raise InputError(f"no isometry from dimension {d0} into {d}")
    return make_channel([np.eye(d, d0, dtype=complex)], f"isometry:{d0}:{d}")


PRESETS = {
    "identity": (identity_channel, "identity[:d]  noiseless channel on C^d (default d=2)"),
    "isometry": (_isometry_preset, "isometry:d0:d  canonical embedding C^d0 -> C^d"),
    "depolarizing": (depolarizing, "depolarizing:p[:d]  (1-p)ς + p I/d"),
    "dephasing": (dephasing, "dephasing:p[:d]  (1-p)ς + p diag(ς)"),
    "amplitude_damping": (amplitude_damping, "amplitude_damping:γ  qubit decay to |0>"),
    "pauli": (lambda *ps: pauli_channel(ps), "pauli:pI:pX:pY:pZ  qubit Pauli channel"),
}


def preset(name: str, params: Sequence = ()) -> QuantumChannel:
    key = name.strip().lower().replace("-", "_")
    if key not in PRESETS:
        raise InputError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    factory = PRESETS[key][0]
    try:
        return factory(*params)
    except TypeError:
        raise InputError(f"bad parameters {list(params)} for preset {name!r}") from None


def parse_preset(text: str) -> QuantumChannel:
    """Parse ``name[:p1[:p2...]]`` (commas also separate parameters)."""
    name, _, rest = text.partition(":")
    params = [float(x) for x in rest.replace(",", ":").split(":") if x.strip()] if rest else []
    return preset(name, params)


def random_cptp(dim_in: int, dim_out: int, env_dim: int, seed) -> QuantumChannel:
    """Random channel from a Gaussian isometry C^dim_in -> C^dim_out ⊗ C^env_dim.

    ``seed`` may be an int or a numpy Generator.
    """
    if env_dim < 1:
        raise InputError("env_dim must be >= 1")
    if dim_out * env_dim < dim_in:
        raise InputError(
            f"no isometry from dimension {dim_in} into {dim_out} x {env_dim}"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = dim_out * env_dim
    g = rng.normal(size=(n, dim_in)) + 1j * rng.normal(size=(n, dim_in))
    v, _ = np.linalg.qr(g)
    for j in range(dim_in):
        i = int(np.argmax(np.abs(v[:, j])))
        v[:, j] *= abs(v[i, j]) / v[i, j]
    kraus = tuple(v[k * dim_out:(k + 1) * dim_out, :].copy() for k in range(env_dim))
    return QuantumChannel(dim_in, dim_out, kraus, f"random({dim_in}->{dim_out},env={env_dim})")


def channel_compound(s0, c: QuantumChannel) -> CompoundState:
    """(Id ⊗ Λ*) applied to the canonical purification of the input ``s0``."""
    s0 = make_density(s0)
    if s0.dim != c.dim_in:
        raise InputError(f"input state has dim {s0.dim}, channel expects {c.dim_in}")
    return apply_local(standard_compound(s0), None, c)


def parse_matrix(obj, what: str = "matrix") -> np.ndarray:
    """Matrix from a list of rows of ``[re, im]`` pairs (bare reals allowed)."""
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise InputError(f"{what}: expected a non-empty list of rows")
    rows = []
    for i, row in enumerate(obj):
        vals = []
        for j, entry in enumerate(row):
            if isinstance(entry, (int, float)) and not isinstance(entry, bool):
                vals.append(complex(entry))
            elif (
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(x, (int, float)) for x in entry)
            ):
                vals.append(complex(entry[0], entry[1]))
            else:
                raise InputError(f"{what}: entry [{i}][{j}] must be [re, im], got {entry!r}")
        rows.append(vals)
    if len({len(r) for r in rows}) != 1:
        raise InputError(f"{what}: rows have unequal lengths")
    return as_matrix(rows, what)


def matrix_to_json(m) -> list:
    m = as_matrix(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def channel_from_spec(obj: dict) -> QuantumChannel:
    """Build a channel from a decoded channel-spec object."""
    if not isinstance(obj, dict):
        raise InputError("channel spec must be a JSON object")
    if "preset" in obj:
        params = obj.get("params", [])
        if not isinstance(params, list):
            raise InputError("field 'params' must be a list")
        c = preset(str(obj["preset"]), params)
        if "name" in obj:
            c = QuantumChannel(c.dim_in, c.dim_out, c.kraus, str(obj["name"]))
        return c
    if "kraus" not in obj:
        raise InputError("channel spec needs either 'kraus' or 'preset'")
    kraus_obj = obj["kraus"]
    if not isinstance(kraus_obj, list) or not kraus_obj:
        raise InputError("field 'kraus' must be a non-empty list of matrices")
    kraus = [parse_matrix(m, f"kraus[{k}]") for k, m in enumerate(kraus_obj)]
    for field_name, axis in (("dim_out", 0), ("dim_in", 1)):
        if field_name in obj:
            want = obj[field_name]
            if not isinstance(want, int):
                raise InputError(f"field '{field_name}' must be an integer")
            for k, a in enumerate(kraus):
                if a.shape[axis] != want:
                    raise InputError(
                        f"kraus[{k}] has shape {a.shape}, inconsistent with {field_name}={want}"
                    )
    return make_channel(kraus, str(obj.get("name", "channel")))


def channel_to_spec(c: QuantumChannel) -> dict:
    return {
        "name": c.name,
        "dim_in": c.dim_in,
        "dim_out": c.dim_out,
        "kraus": [matrix_to_json(a) for a in c.kraus],
    }


def loads_channel(text: str) -> QuantumChannel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"channel spec is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from None
    return channel_from_spec(obj)
