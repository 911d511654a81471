import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entcap.capacity import (
    Method,
    OptimizerConfig,
    additivity_capacity_check,
    additivity_inputs_check,
    capacity,
    exchange_info,
    exchange_info_spectral,
)
from entcap.channel import (
    QuantumChannel,
    amplitude_damping,
    depolarizing,
    identity_channel,
    random_cptp,
)
from entcap.divergence import EntropyType, entangled_entropy
from entcap.matcore import InputError, random_unitary
from entcap.qstate import make_density, maximally_mixed, random_density

A, B = EntropyType.A_TYPE, EntropyType.B_TYPE
seeds = st.integers(0, 2**32 - 1)
LN2 = math.log(2)
FAST = OptimizerConfig(restarts=3)


def test_exchange_info_examples(rng):
    assert exchange_info(maximally_mixed(2), identity_channel(2), A) == pytest.approx(2 * LN2, abs=1e-12)
    s = random_density(2, rng)
    for t in (A, B):
        assert exchange_info(s, depolarizing(1.0), t) == pytest.approx(0, abs=1e-10)
    assert exchange_info(s, amplitude_damping(1.0), A) == pytest.approx(0, abs=1e-10)


@given(seeds, st.integers(2, 3))
@settings(max_examples=30, deadline=None)
def test_exchange_info_laws(seed, d):
    rng = np.random.default_rng(seed)
    s = random_density(d, rng)
    c = random_cptp(d, int(rng.integers(2, 4)), int(rng.integers(1, 4)) + (d == 3), rng)
    ja, jb = exchange_info(s, c, A), exchange_info(s, c, B)
    assert ja <= jb + 1e-9
    # pre-composing with U† while rotating the input by U changes nothing
    u = random_unitary(d, rng)
    rotated = QuantumChannel(d, c.dim_out, tuple(k @ u.conj().T for k in c.kraus))
    s_rot = u @ s.matrix @ u.conj().T
    assert exchange_info(s_rot, rotated, A) == pytest.approx(ja, abs=1e-9)
    assert exchange_info(s_rot, rotated, B) == pytest.approx(jb, abs=1e-9)
    for t in (A, B):
        assert exchange_info(s, identity_channel(d), t) == pytest.approx(entangled_entropy(s, t), abs=1e-9)


@given(seeds, st.integers(2, 4))
@settings(max_examples=30, deadline=None)
def test_spectral_form_matches_reference(seed, d):
    rng = np.random.default_rng(seed)
    s = random_density(d, rng)
    c = random_cptp(d, int(rng.integers(2, 4)), d, rng)
    p, v = np.linalg.eigh(s.matrix)
    for t in (A, B):
        ref = exchange_info(s, c, t)
        assert exchange_info_spectral(p, v, c, t) == pytest.approx(ref, rel=1e-8, abs=1e-10)


def test_a_type_concave_on_segments(rng):
    for _ in range(20):
        c = random_cptp(2, 2, 2, rng)
        s0, s1 = random_density(2, rng).matrix, random_density(2, rng).matrix
        f = [exchange_info(make_density((1 - x) * s0 + x * s1), c, A) for x in (0, 0.5, 1)]
        assert f[1] >= (f[0] + f[2]) / 2 - 1e-8


def test_capacity_identity_a_type():
    rep = capacity(identity_channel(2), A)
    assert rep.converged and not rep.at_boundary
    assert rep.value == pytest.approx(2 * LN2, abs=1e-4)
    dist = 0.5 * np.abs(np.linalg.eigvalsh(rep.optimal_input.matrix - np.eye(2) / 2)).sum()
    assert dist <= 1e-3
    assert rep.value == pytest.approx(exchange_info(rep.optimal_input, identity_channel(2), A), abs=1e-8)
    assert rep.trace[0][0] == 0 and rep.seed == 0


def test_capacity_identity_b_type_is_boundary_divergent():
    # oracle: J = ln(1/λ + 1/(1-λ)) keeps growing as λ -> 0
    scan = [math.log(1 / x + 1 / (1 - x)) for x in (0.5, 0.1, 1e-3, 1e-6)]
    assert scan == sorted(scan)
    rep = capacity(identity_channel(2), B, FAST)
    assert not rep.converged and rep.at_boundary
    assert rep.value > scan[-1]


@pytest.mark.parametrize("t", [A, B])
def test_capacity_zero_channels(t):
    for c in (depolarizing(1.0), amplitude_damping(1.0)):
        rep = capacity(c, t, FAST)
        assert abs(rep.value) <= 1e-6


def test_capacity_depolarizing_a_type_at_uniform_input():
    # unital and unitarily covariant, so the concave a-type optimum is I/2
    c = depolarizing(0.5)
    want = exchange_info(maximally_mixed(2), c, A)
    rep = capacity(c, A, FAST)
    assert rep.value == pytest.approx(want, abs=1e-7)


def test_capacity_nelder_mead_method():
    rep = capacity(identity_channel(2), A, OptimizerConfig(method="nelder-mead", restarts=2))
    assert rep.value == pytest.approx(2 * LN2, abs=1e-4)
    assert OptimizerConfig(method="nelder-mead").method is Method.NELDER_MEAD


def test_capacity_deterministic():
    c = amplitude_damping(0.3)
    a, b = capacity(c, A, FAST), capacity(c, A, FAST)
    assert a.value == b.value and a.restart_values == b.restart_values
    assert np.array_equal(a.optimal_input.matrix, b.optimal_input.matrix)


def test_config_validation():
    with pytest.raises(InputError):
        OptimizerConfig(tol=0)
    with pytest.raises(InputError):
        OptimizerConfig(restarts=0)
    with pytest.raises(InputError):
        OptimizerConfig(method="simplex-ish")


def test_additivity_inputs_examples(rng):
    idc = identity_channel(2)
    joint, total = additivity_inputs_check([idc, idc], [np.eye(2) / 2] * 2, A)
    assert joint == pytest.approx(4 * LN2, abs=1e-10) and total == pytest.approx(4 * LN2, abs=1e-10)
    s1, s2 = random_density(2, rng), random_density(2, rng)
    joint, total = additivity_inputs_check([idc, depolarizing(1.0)], [s1, s2], A)
    ref = exchange_info(s1, idc, A)
    assert joint == pytest.approx(ref, abs=1e-10) and total == pytest.approx(ref, abs=1e-10)


def test_additivity_inputs_random(rng):
    for _ in range(10):
        cs = [random_cptp(2, 2, 2, rng) for _ in range(2)]
        ins = [random_density(2, rng) for _ in range(2)]
        for t in (A, B):
            joint, total = additivity_inputs_check(cs, ins, t)
            assert abs(joint - total) <= 1e-8


def test_additivity_inputs_errors():
    with pytest.raises(InputError):
        additivity_inputs_check([identity_channel(2)], [], A)
    with pytest.raises(InputError):
        additivity_inputs_check([identity_channel(2)], [np.eye(3) / 3], A)


def test_additivity_capacity_identity_pair():
    res = additivity_capacity_check([identity_channel(2)] * 2, A, FAST)
    joint, total = res
    assert joint == pytest.approx(4 * LN2, abs=1e-3)
    assert total == pytest.approx(4 * LN2, abs=1e-3)
    assert abs(res.gap) <= 1e-3 and res.converged


def test_additivity_capacity_dimension_guard():
    with pytest.raises(InputError):
        additivity_capacity_check([identity_channel(3), identity_channel(3), identity_channel(2)], A)
