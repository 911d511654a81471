"""Seeded property sweeps for the monotonicity, ordering and additivity laws.

Each check runs a fixed number of trials. Trial ``i`` of check ``k`` draws
from ``default_rng([seed, k, i])``, so results do not depend on execution
order. A check's margin is the slack of its inequality (or minus the
absolute error of an equality); it passes when the worst margin is at least
``-tol``. The first violating trial is kept as a reproducer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .capacity import additivity_inputs_check, exchange_info
from .channel import (
    apply_heisenberg,
    apply_schrodinger,
    identity_channel,
    isometry_channel,
    random_cptp,
)
from .divergence import (
    EntropyType,
    conditional_entropy,
    entangled_entropy,
    entangled_entropy_closed_form,
    mutual_info,
    rel_entropy_a,
    rel_entropy_b,
)
from .entangle import (
    apply_local,
    compose_entanglement,
    decompose_entanglement,
    random_compound,
    random_entanglement_of,
)
from .matcore import partial_trace, random_unitary
from .qstate import purify, random_density

A, B = EntropyType.A_TYPE, EntropyType.B_TYPE


@dataclass
class CheckResult:
    name: str
    trials: int
    violations: int
    worst_margin: float
    tol: float
    reproducer: dict | None = None

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass
class SuiteReport:
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def format(self) -> str:
        lines = [f"verification suite  seed={self.seed}", ""]
        head = f"{'check':<36} {'trials':>6} {'viol':>5} {'worst margin':>13} {'tol':>8}  result"
        lines += [head, "-" * len(head)]
        for c in self.checks:
            lines.append(
                f"{c.name:<36} {c.trials:>6} {c.violations:>5} {c.worst_margin:>13.3e} "
                f"{c.tol:>8.0e}  {'PASS' if c.passed else 'FAIL'}"
            )
        lines.append("")
        lines.append("ALL PASS" if self.passed else "FAILURES PRESENT")
        for c in self.checks:
            if c.reproducer is not None:
                lines.append(f"reproducer {c.name}: {json.dumps(c.reproducer, sort_keys=True)}")
        return "\n".join(lines)


def _mat(m) -> list:
    m = np.asarray(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


class _Runner:
    def __init__(self, seed: int):
        self.seed = seed
        self.report = SuiteReport(seed)

    def run(self, name: str, trials: int, tol: float, trial: Callable):
        """``trial(rng)`` returns (margin, reproducer-payload)."""
        k = len(self.report.checks)
        worst, bad, repro = np.inf, 0, None
        for i in range(trials):
            rng = np.random.default_rng([self.seed, k, i])
            margin, payload = trial(rng)
            if not margin >= -tol:
                bad += 1
                if repro is None:
                    repro = {"check": name, "rng": [self.seed, k, i], "margin": float(margin)}
                    repro.update(payload)
            worst = min(worst, float(margin))
        self.report.checks.append(CheckResult(name, trials, bad, worst, tol, repro))


def _channel_for(d: int, rng) -> object:
    d_out = int(rng.integers(2, 4))
    env = int(rng.integers(1, 4))
    while d_out * env < d:
        env += 1
    return random_cptp(d, d_out, env, rng)


def _kraus_payload(k) -> list:
    return [_mat(a) for a in k.kraus]


def verification_suite(seed: int = 0, divergences: dict | None = None) -> SuiteReport:
    """Run every sweep and return a report (failures are data, not errors).

    ``divergences`` may map an EntropyType to a replacement relative-entropy
    function ``f(w, phi) -> float``, used by the divergence-level checks.
    """
    rel = {A: lambda w, p: rel_entropy_a(w, p).value, B: lambda w, p: rel_entropy_b(w, p).value}
    if divergences:
        rel.update({EntropyType.parse(t): f for t, f in divergences.items()})
    r = _Runner(seed)

    for t in (A, B):
        def mono(rng, t=t):
            d = int(rng.integers(2, 4))
            w, phi = random_density(d, rng), random_density(d, rng)
            k = _channel_for(d, rng)
            after = rel[t](apply_schrodinger(k, w), apply_schrodinger(k, phi))
            before = rel[t](w, phi)
            return before - after, {"w": _mat(w.matrix), "phi": _mat(phi.matrix), "kraus": _kraus_payload(k)}
        r.run(f"monotonicity R({t.value})", 500, 1e-9, mono)

    for t in (A, B):
        def dpi(rng, t=t):
            da, db = (int(x) for x in rng.integers(2, 4, size=2))
            w = random_compound(da, db, rng)
            k = _channel_for(da, rng)
            after = mutual_info(apply_local(w, k, None), t)
            return mutual_info(w, t) - after, {"w": _mat(w.matrix), "dims": [da, db], "kraus": _kraus_payload(k)}
        r.run(f"data processing I({t.value})", 200, 1e-9, dpi)

    def order_r(rng):
        d = int(rng.integers(2, 4))
        w, phi = random_density(d, rng), random_density(d, rng)
        return rel[B](w, phi) - rel[A](w, phi), {"w": _mat(w.matrix), "phi": _mat(phi.matrix)}
    r.run("ordering R(a) <= R(b)", 1000, 1e-9, order_r)

    def order_i(rng):
        da, db = (int(x) for x in rng.integers(2, 4, size=2))
        w = random_compound(da, db, rng)
        return mutual_info(w, B) - mutual_info(w, A), {"w": _mat(w.matrix), "dims": [da, db]}
    r.run("ordering I(a) <= I(b)", 200, 1e-9, order_i)

    for t in (A, B):
        def closed(rng, t=t):
            s = random_density(int(rng.integers(2, 5)), rng)
            err = abs(entangled_entropy(s, t) - entangled_entropy_closed_form(s, t))
            return -err, {"state": _mat(s.matrix)}
        r.run(f"entangled entropy closed form ({t.value})", 100, 1e-9, closed)

    for t in (A, B):
        def cond(rng, t=t):
            da, db = (int(x) for x in rng.integers(2, 4, size=2))
            w = random_compound(da, db, rng)
            return conditional_entropy(w, t), {"w": _mat(w.matrix), "dims": [da, db]}
        r.run(f"conditional entropy >= 0 ({t.value})", 200, 1e-9, cond)

    for t in (A, B):
        def dominance(rng, t=t):
            s = random_density(int(rng.integers(2, 4)), rng)
            top = entangled_entropy(s, t)
            worst = np.inf
            for _ in range(100):
                w = random_entanglement_of(s, int(rng.integers(2, 4)), rng, int(rng.integers(2, 4)))
                worst = min(worst, top - mutual_info(w, t))
            return worst, {"state": _mat(s.matrix)}
        r.run(f"standard entanglement maximal ({t.value})", 5, 1e-9, dominance)

    for t in (A, B):
        def add_inputs(rng, t=t):
            cs = [random_cptp(2, 2, 2, rng) for _ in range(2)]
            ins = [random_density(2, rng) for _ in range(2)]
            joint, total = additivity_inputs_check(cs, ins, t)
            return -abs(joint - total), {
                "kraus": [_kraus_payload(c) for c in cs],
                "inputs": [_mat(s.matrix) for s in ins],
            }
        r.run(f"product-input additivity ({t.value})", 50, 1e-8, add_inputs)

    def order_j(rng):
        d = int(rng.integers(2, 4))
        c, s = _channel_for(d, rng), random_density(d, rng)
        return exchange_info(s, c, B) - exchange_info(s, c, A), {"input": _mat(s.matrix), "kraus": _kraus_payload(c)}
    r.run("ordering J(a) <= J(b)", 100, 1e-9, order_j)

    for t in (A, B):
        def noiseless(rng, t=t):
            d = int(rng.integers(2, 4))
            s = random_density(d, rng)
            if rng.random() < 0.5:
                c = identity_channel(d)
            else:
                u = random_unitary(d + 1, rng)[:, :d]
                c = isometry_channel(u)
            err = abs(exchange_info(s, c, t) - entangled_entropy(s, t))
            return -err, {"input": _mat(s.matrix), "kraus": _kraus_payload(c)}
        r.run(f"noiseless J = H ({t.value})", 50, 1e-9, noiseless)

    def roundtrip(rng):
        da, db = (int(x) for x in rng.integers(2, 4, size=2))
        w = random_compound(da, db, rng)
        rho, pi_map = decompose_entanglement(w)
        back = compose_entanglement(rho, pi_map)
        return -float(np.abs(back.matrix - w.matrix).max()), {"w": _mat(w.matrix), "dims": [da, db]}
    r.run("decompose/compose round trip", 50, 1e-9, roundtrip)

    def purification(rng):
        d = int(rng.integers(2, 9))
        s = random_density(d, rng)
        om = purify(s).density()
        err = max(
            np.abs(partial_trace(om, d, d, "B") - s.matrix).max(),
            np.abs(partial_trace(om, d, d, "A") - s.matrix.T).max(),
        )
        return -float(err), {"state": _mat(s.matrix)}
    r.run("purification marginals", 50, 1e-10, purification)

    def duality(rng):
        d = int(rng.integers(2, 4))
        c = _channel_for(d, rng)
        s = random_density(d, rng)
        g = rng.normal(size=(c.dim_out,) * 2) + 1j * rng.normal(size=(c.dim_out,) * 2)
        lhs = np.trace(apply_heisenberg(c, g) @ s.matrix)
        rhs = np.trace(g @ apply_schrodinger(c, s).matrix)
        return -float(abs(lhs - rhs)), {"input": _mat(s.matrix), "kraus": _kraus_payload(c)}
    r.run("Heisenberg/Schrodinger duality", 100, 1e-10, duality)

    return r.report
