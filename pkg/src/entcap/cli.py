"""Command-line front end.

    entcap capacity --preset identity:2 --type a
    entcap additivity --preset identity:2 --preset depolarizing:1.0 --type a
    entcap exchange-info --channel ad.json --input pure:0 --type both --output csv
    entcap verify --seed 42

Exit status: 0 success, 1 a computation did not converge (or a verification
check failed), 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import (
    OptimizerConfig,
    additivity_capacity_check,
    additivity_inputs_check,
    capacity,
    exchange_info,
)
from .channel import (
    PRESETS,
    QuantumChannel,
    channel_compound,
    loads_channel,
    matrix_to_json,
    parse_matrix,
    parse_preset,
    tensor_channels,
)
from .divergence import EntropyType, entangled_entropy, mutual_info
from .entangle import make_compound
from .matcore import ConsistencyError, InputError
from .qstate import DensityOperator, basis_state, make_density, maximally_mixed, von_neumann_entropy

CSV_COLUMNS = (
    "command", "channel", "entropy_type", "input_spec",
    "value_nats", "value_bits", "converged", "seed",
)
ADDITIVITY_TOL = 1e-3
LN2 = math.log(2.0)

log = logging.getLogger("entcap")


@dataclass
class Row:
    command: str
    channel: str
    entropy_type: str
    input_spec: str
    value_nats: float
    converged: bool
    seed: int

    @property
    def value_bits(self) -> float:
        return self.value_nats / LN2

    def as_csv(self) -> list:
        return [
            self.command, self.channel, self.entropy_type, self.input_spec,
            repr(float(self.value_nats)), repr(float(self.value_bits)),
            "true" if self.converged else "false", self.seed,
        ]


def load_channel_spec(path) -> QuantumChannel:
    """Read a JSON channel-spec file (explicit Kraus list or preset form)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read channel spec {path}: {exc.strerror}") from None
    try:
        return loads_channel(text)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def parse_state(spec: str, dim: int | None) -> DensityOperator:
    """Input state from 'maximally-mixed', 'pure:k', 'diag:p0,p1,...' or a JSON matrix."""
    s = spec.strip()
    if s.startswith("["):
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as exc:
            raise InputError(f"input matrix is not valid JSON: {exc.msg}") from None
        rho = make_density(parse_matrix(obj, "input"))
        if dim is not None and rho.dim != dim:
            raise InputError(f"input state has dim {rho.dim}, expected {dim}")
        return rho
    if s.startswith("diag:"):
        vals = [float(x) for x in s[5:].replace(":", ",").split(",") if x.strip()]
        return make_density(np.diag(vals))
    if dim is None:
        raise InputError(f"cannot size input {spec!r}: give a channel or --dim")
    if s in ("maximally-mixed", "mixed", "max-mixed"):
        return maximally_mixed(dim)
    if s.startswith("pure:"):
        try:
            k = int(s[5:])
        except ValueError:
            raise InputError(f"bad basis index in {spec!r}") from None
        return basis_state(dim, k)
    raise InputError(
        f"unrecognized input {spec!r}; use maximally-mixed, pure:k, diag:... or a JSON matrix"
    )


def state_spec(rho) -> str:
    return json.dumps(matrix_to_json(rho.matrix if isinstance(rho, DensityOperator) else rho))


def _types(arg: str) -> list[EntropyType]:
    if arg == "both":
        return [EntropyType.A_TYPE, EntropyType.B_TYPE]
    return [EntropyType.parse(arg)]


def _channels(args) -> list[tuple[str, QuantumChannel]]:
    out = []
    for p in args.preset or []:
        out.append((p, parse_preset(p)))
    for f in args.channel or []:
        out.append((f, load_channel_spec(f)))
    return out


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("ENTCAP_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"ENTCAP_SEED must be an integer, got {env!r}") from None


def _config(args, seed: int) -> OptimizerConfig:
    kw = {"seed": seed}
    for name in ("max_iters", "tol", "restarts", "method"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    return OptimizerConfig(**kw)


def _spectrum_label(rho: DensityOperator) -> str:
    vals = ", ".join(f"{x:.4f}" for x in rho.eigenvalues[::-1])
    return f"optimum spectrum=[{vals}]"


# commands --------------------------------------------------------------------

def cmd_presets(args, seed) -> tuple[list, list]:
    notes = [f"{name:<18} {desc}" for name, (_, desc) in PRESETS.items()]
    return [], notes


def cmd_entropy(args, seed):
    rows = []
    inputs = args.input or ["maximally-mixed"]
    for spec in inputs:
        rho = parse_state(spec, args.dim)
        rows.append(Row("entropy", "", "vn", spec, von_neumann_entropy(rho), True, seed))
        for t in _types(args.type):
            rows.append(Row("entropy", "", t.value, spec, entangled_entropy(rho, t), True, seed))
    return rows, []


def cmd_mutual_info(args, seed):
    chans = _channels(args)
    rows = []
    for spec in args.input or ["maximally-mixed"]:
        if chans:
            label, c = _joint(chans)
            w = channel_compound(parse_state(spec, c.dim_in), c)
        else:
            if not args.dims:
                raise InputError("mutual-info needs --dims dA,dB (or a channel)")
            da, db = args.dims
            w = make_compound(parse_state(spec, da * db).matrix, da, db)
            label = ""
        for t in _types(args.type):
            rows.append(Row("mutual-info", label, t.value, spec, mutual_info(w, t), True, seed))
    return rows, []


def _joint(chans):
    if len(chans) == 1:
        return chans[0]
    return " ⊗ ".join(l for l, _ in chans), tensor_channels([c for _, c in chans])


def cmd_exchange_info(args, seed):
    chans = _channels(args)
    if not chans:
        raise InputError("exchange-info needs --preset or --channel")
    label, c = _joint(chans)
    rows = []
    for spec in args.input or ["maximally-mixed"]:
        rho = parse_state(spec, c.dim_in)
        for t in _types(args.type):
            rows.append(Row("exchange-info", label, t.value, spec, exchange_info(rho, c, t), True, seed))
    return rows, []


def cmd_capacity(args, seed):
    chans = _channels(args)
    if not chans:
        raise InputError("capacity needs --preset or --channel")
    cfg = _config(args, seed)
    rows, notes = [], []
    for label, c in chans:
        for t in _types(args.type):
            rep = capacity(c, t, cfg)
            rows.append(Row("capacity", label, t.value, state_spec(rep.optimal_input),
                            rep.value, rep.converged, seed))
            notes.append(f"{label} ({t.value}): {_spectrum_label(rep.optimal_input)}")
            if rep.at_boundary:
                notes.append(
                    f"{label} ({t.value}): objective still increasing at the eigenvalue "
                    "clamp; supremum is at the boundary (likely divergent)"
                )
    return rows, notes


def cmd_additivity(args, seed):
    chans = _channels(args)
    if len(chans) < 2:
        raise InputError("additivity needs at least two channels")
    label = " ⊗ ".join(l for l, _ in chans)
    cs = [c for _, c in chans]
    rows, notes = [], []
    if args.input:
        if len(args.input) != len(cs):
            raise InputError("give one --input per channel (or none for capacities)")
        states = [parse_state(s, c.dim_in) for s, c in zip(args.input, cs)]
        for t in _types(args.type):
            joint, total = additivity_inputs_check(cs, states, t)
            rows.append(Row("additivity", label, t.value, " ⊗ ".join(args.input), joint, True, seed))
            rows.append(Row("additivity", "sum", t.value, " ⊗ ".join(args.input), total, True, seed))
            verdict = "ADDITIVE" if abs(joint - total) <= 1e-8 else "NOT ADDITIVE"
            notes.append(f"J({t.value}) joint={joint:.6f} sum={total:.6f}  {verdict} within 1e-8")
        return rows, notes
    cfg = _config(args, seed)
    for t in _types(args.type):
        res = additivity_capacity_check(cs, t, cfg)
        jr = res.joint_report
        rows.append(Row("additivity", label, t.value, state_spec(jr.optimal_input),
                        res.joint, jr.converged, seed))
        for (l, _), fr in zip(chans, res.factor_reports):
            rows.append(Row("additivity", l, t.value, state_spec(fr.optimal_input),
                            fr.value, fr.converged, seed))
        rows.append(Row("additivity", "sum", t.value, "", res.total, res.converged, seed))
        verdict = "ADDITIVE" if abs(res.gap) <= ADDITIVITY_TOL else "NOT ADDITIVE"
        notes.append(
            f"C({t.value}) joint={res.joint:.6f} sum={res.total:.6f}  {verdict} within 1e-3"
        )
        if not res.converged:
            notes.append(f"C({t.value}): at least one optimization did not converge")
    return rows, notes


def cmd_verify(args, seed):
    from .verify import verification_suite

    rep = verification_suite(seed)
    rows = [
        Row("verify", c.name, "", f"trials={c.trials} violations={c.violations}",
            c.worst_margin, c.passed, seed)
        for c in rep.checks
    ]
    return rows, [rep.format()]


COMMANDS = {
    "entropy": cmd_entropy,
    "mutual-info": cmd_mutual_info,
    "exchange-info": cmd_exchange_info,
    "capacity": cmd_capacity,
    "additivity": cmd_additivity,
    "verify": cmd_verify,
    "presets": cmd_presets,
}


# output ----------------------------------------------------------------------

def render_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.as_csv())
    return buf.getvalue()


def render_table(rows, units: str) -> str:
    if not rows:
        return ""
    unit_col = f"value ({units})"
    data = []
    for r in rows:
        v = r.value_bits if units == "bits" else r.value_nats
        inp = r.input_spec if len(r.input_spec) <= 28 else "(matrix, see --output csv)"
        data.append([r.command, r.channel, r.entropy_type, inp, f"{v:.6f}",
                     "yes" if r.converged else "NO"])
    head = ["command", "channel", "type", "input", unit_col, "converged"]
    widths = [max(len(str(x[i])) for x in data + [head]) for i in range(len(head))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*head), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*d) for d in data]
    return "\n".join(l.rstrip() for l in lines) + "\n"


def _dims(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.replace("x", ",").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected dA,dB") from None
    return a, b


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entcap", description="Entangled channel capacities and quantum relative entropies.")
    p.add_argument("--version", action="version", version=f"entcap {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--preset", action="append", metavar="NAME[:P1[:P2]]")
        sp.add_argument("--channel", action="append", metavar="FILE")
        sp.add_argument("--input", action="append", metavar="STATE",
                        help="maximally-mixed | pure:k | diag:p0,p1,.. | JSON matrix")
        sp.add_argument("--dim", type=int)
        sp.add_argument("--dims", type=_dims, metavar="dA,dB")
        sp.add_argument("--type", default="a", choices=["a", "b", "both"])
        sp.add_argument("--output", default="table", choices=["table", "csv"])
        sp.add_argument("--units", default="nats", choices=["nats", "bits"])
        sp.add_argument("--seed", type=int)
        sp.add_argument("--max-iters", dest="max_iters", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--restarts", type=int)
        sp.add_argument("--method", choices=["gradient", "nelder-mead"])
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        seed = _seed(args)
        rows, notes = COMMANDS[args.command](args, seed)
    except (InputError, ValueError) as exc:
        print(f"entcap: error: {exc}", file=err)
        return 2
    except ConsistencyError as exc:
        print(f"entcap: internal consistency failure: {exc}", file=err)
        return 1
    if args.output == "csv":
        out.write(render_csv(rows))
        for n in notes:
            if args.command != "verify":
                print(n, file=err)
    else:
        out.write(render_table(rows, args.units))
        if notes:
            if rows and args.command != "verify":
                out.write("\n")
            out.write("\n".join(notes) + "\n")
    return 0 if all(r.converged for r in rows) else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
