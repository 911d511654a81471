"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (lines are collected into the terminal summary) or
directly with ``python3 tests/test_acceptance.py``.
"""

import math
import time

import numpy as np

from entcap.capacity import (
    OptimizerConfig,
    additivity_capacity_check,
    additivity_inputs_check,
    capacity,
)
from entcap.channel import (
    amplitude_damping,
    apply_heisenberg,
    apply_schrodinger,
    depolarizing,
    identity_channel,
    random_cptp,
)
from entcap.divergence import (
    EntropyType,
    conditional_entropy,
    mutual_info,
    rel_entropy,
)
from entcap.entangle import (
    apply_local,
    compose_entanglement,
    decompose_entanglement,
    random_compound,
    standard_compound,
)
from entcap.matcore import partial_trace
from entcap.qstate import purify, random_density, von_neumann_entropy

A, B = EntropyType.A_TYPE, EntropyType.B_TYPE
ROOT_SEED = 2024
LINES: list[str] = []


def report(num: int, title: str, ok: bool, detail: str) -> bool:
    LINES.append(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}: {detail}")
    return ok


def rng_for(crit: int, i: int) -> np.random.Generator:
    return np.random.default_rng([ROOT_SEED, crit, i])


def _channel(d, rng):
    d_out = int(rng.integers(2, 4))
    env = max(int(rng.integers(1, 4)), -(-d // d_out))
    return random_cptp(d, d_out, env, rng)


def test_01_noiseless_capacity():
    ok, parts = True, []
    for d in (2, 3):
        t0 = time.perf_counter()
        rep = capacity(identity_channel(d), A)
        dt = time.perf_counter() - t0
        err = abs(rep.value - 2 * math.log(d))
        dist = 0.5 * np.abs(np.linalg.eigvalsh(rep.optimal_input.matrix - np.eye(d) / d)).sum()
        good = err <= 1e-4 and dist <= 1e-3 and dt <= 30
        ok &= good
        parts.append(f"d={d} C={rep.value:.6f} |err|={err:.1e} tdist={dist:.1e} {dt:.1f}s")
    assert report(1, "noiseless capacity 2 ln d", ok, "; ".join(parts))


def test_02_zero_capacity_channels():
    cfg = OptimizerConfig(seed=ROOT_SEED)
    worst = 0.0
    for c in (depolarizing(1.0), amplitude_damping(1.0)):
        for t in (A, B):
            worst = max(worst, abs(capacity(c, t, cfg).value))
    assert report(2, "zero-capacity channels", worst <= 1e-6, f"max |C| = {worst:.1e} (tol 1e-6)")


def test_03_product_input_additivity():
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(50):
        rng = rng_for(3, i)
        cs = [random_cptp(2, 2, 2, rng) for _ in range(2)]
        ins = [random_density(2, rng) for _ in range(2)]
        for t in (A, B):
            joint, total = additivity_inputs_check(cs, ins, t)
            worst = max(worst, abs(joint - total))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt <= 60
    assert report(3, "product-input additivity of J", ok, f"50 pairs x 2 types, max gap {worst:.1e}, {dt:.1f}s")


def test_04_capacity_additivity():
    t0 = time.perf_counter()
    cases = {
        "id x id": [identity_channel(2), identity_channel(2)],
        "id x dep(1)": [identity_channel(2), depolarizing(1.0)],
        "dep(.5) x dep(.5)": [depolarizing(0.5), depolarizing(0.5)],
    }
    ok, parts = True, []
    for name, cs in cases.items():
        res = additivity_capacity_check(cs, A, OptimizerConfig(seed=ROOT_SEED))
        ok &= abs(res.gap) <= 1e-3
        parts.append(f"{name}: {res.joint:.6f} vs {res.total:.6f}")
    dt = time.perf_counter() - t0
    ok &= dt <= 300
    assert report(4, "capacity additivity (joint inputs)", ok, "; ".join(parts) + f"; {dt:.1f}s")


def test_05_monotonicity():
    bad, worst = 0, np.inf
    for i in range(500):
        rng = rng_for(5, i)
        d = int(rng.integers(2, 4))
        w, phi, k = random_density(d, rng), random_density(d, rng), _channel(d, rng)
        kw, kphi = apply_schrodinger(k, w), apply_schrodinger(k, phi)
        for t in (A, B):
            margin = rel_entropy(w, phi, t).value - rel_entropy(kw, kphi, t).value
            worst = min(worst, margin)
            bad += margin < -1e-9
    assert report(5, "relative entropy monotonicity", bad == 0,
                  f"500 triples x 2 types, violations {bad}, worst margin {worst:.1e}")


def test_06_data_processing():
    bad, worst = 0, np.inf
    for i in range(200):
        rng = rng_for(6, i)
        da, db = (int(x) for x in rng.integers(2, 4, size=2))
        w = random_compound(da, db, rng)
        kw = apply_local(w, _channel(da, rng), None)
        for t in (A, B):
            margin = mutual_info(w, t) - mutual_info(kw, t)
            worst = min(worst, margin)
            bad += margin < -1e-9
    assert report(6, "mutual information data processing", bad == 0,
                  f"200 states x 2 types, violations {bad}, worst margin {worst:.1e}")


def test_07_ordering():
    bad_r, worst_r = 0, np.inf
    for i in range(1000):
        rng = rng_for(7, i)
        d = int(rng.integers(2, 4))
        w, phi = random_density(d, rng), random_density(d, rng)
        m = rel_entropy(w, phi, B).value - rel_entropy(w, phi, A).value
        worst_r = min(worst_r, m)
        bad_r += m < -1e-9
    bad_i, worst_i = 0, np.inf
    for i in range(200):
        rng = rng_for(70, i)
        da, db = (int(x) for x in rng.integers(2, 4, size=2))
        w = random_compound(da, db, rng)
        m = mutual_info(w, B) - mutual_info(w, A)
        worst_i = min(worst_i, m)
        bad_i += m < -1e-9
    ok = bad_r == 0 and bad_i == 0
    assert report(7, "a-type <= b-type ordering", ok,
                  f"R: 1000 pairs, {bad_r} viol (min slack {worst_r:.1e}); "
                  f"I: 200 states, {bad_i} viol (min slack {worst_i:.1e})")


def test_08_entangled_entropy_closed_forms():
    worst = 0.0
    for i in range(100):
        rng = rng_for(8, i)
        s = random_density(int(rng.integers(2, 5)), rng)
        lam = np.linalg.eigvalsh(s.matrix)
        w = standard_compound(s)
        worst = max(worst, abs(mutual_info(w, A) - 2 * von_neumann_entropy(s)))
        worst = max(worst, abs(mutual_info(w, B) - math.log(np.sum(1 / lam))))
    assert report(8, "entangled entropy closed forms", worst <= 1e-9, f"100 states, max err {worst:.1e}")


def test_09_conditional_entropy_positive():
    worst = np.inf
    for i in range(200):
        rng = rng_for(9, i)
        da, db = (int(x) for x in rng.integers(2, 4, size=2))
        w = random_compound(da, db, rng)
        for t in (A, B):
            worst = min(worst, conditional_entropy(w, t))
    assert report(9, "conditional entropy positivity", worst >= -1e-9, f"200 states x 2 types, min {worst:.3e}")


def test_10_structural_round_trips():
    rt = 0.0
    for i in range(50):
        rng = rng_for(10, i)
        da, db = (int(x) for x in rng.integers(2, 4, size=2))
        w = random_compound(da, db, rng)
        back = compose_entanglement(*decompose_entanglement(w))
        rt = max(rt, float(np.abs(back.matrix - w.matrix).max()))
    pur = 0.0
    for i in range(50):
        rng = rng_for(11, i)
        d = int(rng.integers(2, 9))
        s = random_density(d, rng)
        om = purify(s).density()
        pur = max(pur, np.abs(partial_trace(om, d, d, "B") - s.matrix).max(),
                  np.abs(partial_trace(om, d, d, "A") - s.matrix.T).max())
    dual = 0.0
    for i in range(100):
        rng = rng_for(12, i)
        d = int(rng.integers(2, 4))
        c, s = _channel(d, rng), random_density(d, rng)
        g = rng.normal(size=(c.dim_out,) * 2) + 1j * rng.normal(size=(c.dim_out,) * 2)
        lhs = np.trace(apply_heisenberg(c, g) @ s.matrix)
        rhs = np.trace(g @ apply_schrodinger(c, s).matrix)
        dual = max(dual, abs(lhs - rhs))
    ok = rt <= 1e-9 and pur <= 1e-10 and dual <= 1e-10
    assert report(10, "structural round trips", ok,
                  f"decompose/compose {rt:.1e}, purification {pur:.1e}, duality {dual:.1e}")


if __name__ == "__main__":
    tests = [f for name, f in sorted(globals().items()) if name.startswith("test_")]
    for f in tests:
        try:
            f()
        except AssertionError:
            pass
        print(LINES[-1])
    raise SystemExit(0 if all(l.startswith("[PASS]") for l in LINES) else 1)
