"""
Command-line front end.

    entangleport hub --n 4 --unitary haar --seed 7
    entangleport ps-experiment --n 4
    entangleport bound --n 4 --er 6
    entangleport graph --n 4 --kind symmetrized --format dot

Reports are JSON documents tagged ``"schema": "entangleport/1"``.  Reals are
rounded to 15 significant digits so identical runs give identical bytes.

Network spec file (``hub --config PATH``)::

    {
      "schema": "entangleport/1",
      "n": 3,
      "seed": 7,
      "unitary": "haar",            # haar | identity | ps | file:PATH
      "mode": "sampled",            # sampled | exhaustive
      "matrix": [[0, 2, 2], ...],   # optional, must be the star matrix
      "input": {"kind": "haar"}     # see _input_state
    }

Unitary files hold a JSON 2-D array of ``[re, im]`` pairs, row-major.

Exit codes: 0 success, 1 a check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import entops, resgraph, statevec as sv, teleproto
from .errors import EntangleportError, InputError, ProtocolError, UnsupportedError

SCHEMA = "entangleport/1"
SIG_DIGITS = 15

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    n: int = 2
    seed: int = 0
    unitary_spec: str = "haar"
    mode: str = "sampled"
    output_path: str | None = None
    format: str = "json"
    er: Fraction | float | None = None
    via: str = "direct"
    kind: str = "star"
    input_spec: dict = field(default_factory=lambda: {"kind": "haar"})
    matrix: list | None = None

    def validate(self) -> "RunConfig":
        if self.n < 1:
            raise InputError("--n must be >= 1")
        if self.mode not in ("sampled", "exhaustive"):
            raise InputError(f"unknown mode {self.mode!r}")
        if self.command == "hub" and self.mode == "exhaustive" and self.n > 3:
            raise InputError("exhaustive mode is limited to N <= 3; use --mode sampled")
        return self


def round_reals(obj):
    """Round every float in a JSON-ready structure to 15 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, (np.floating,)):
        return round_reals(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: round_reals(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_reals(v) for v in obj]
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(round_reals({"schema": SCHEMA, **doc}), indent=2) + "\n"


def load_unitary_file(path, n: int) -> np.ndarray:
    try:
        data = json.loads(Path(path).read_text())
        u = np.array([[complex(re, im) for re, im in row] for row in data])
    except (OSError, ValueError, TypeError) as exc:
        raise InputError(f"cannot read unitary file {path}: {exc}") from None
    return sv.check_unitary(u, n)


def _unitary(cfg: RunConfig) -> np.ndarray:
    spec, n = cfg.unitary_spec, cfg.n
    if spec == "haar":
        return sv.haar_random_unitary(2 ** n, cfg.seed)
    if spec == "identity":
        return np.eye(2 ** n, dtype=complex)
    if spec == "ps":
        return entops.ps_unitary(n)
    if spec.startswith("file:"):
        return load_unitary_file(spec[len("file:"):], n)
    raise InputError(f"unknown unitary spec {spec!r}")


def _amplitudes(raw) -> np.ndarray:
    return np.array([complex(*a) if isinstance(a, (list, tuple)) else complex(a) for a in raw])


def _input_state(cfg: RunConfig) -> sv.StateVector:
    """Data-register input.

    ``{"kind": "haar"}`` (seeded, generally entangled), ``{"kind": "basis",
    "bits": "0101"}``, ``{"kind": "product", "states": [[a0, a1], ...]}`` or
    ``{"kind": "amplitudes", "amplitudes": [...]}``; complex numbers are
    ``[re, im]`` pairs.
    """
    spec, n = cfg.input_spec, cfg.n
    kind = spec.get("kind", "haar")
    if kind == "haar":
        return sv.random_state(n, [cfg.seed, 1])
    if kind == "basis":
        return sv.basis_state(n, spec["bits"])
    if kind == "product":
        return sv.product_state([_amplitudes(s) for s in spec["states"]])
    if kind == "amplitudes":
        return sv.StateVector(_amplitudes(spec["amplitudes"]))
    raise InputError(f"unknown input kind {kind!r}")


def cmd_hub(cfg: RunConfig) -> tuple[dict, bool]:
    n = cfg.n
    if cfg.matrix is not None and resgraph.ResourceMatrix(cfg.matrix) != resgraph.star_matrix(n):
        raise InputError("the hub protocol runs on the star matrix only")
    u = _unitary(cfg)
    state = _input_state(cfg)
    if state.num_qubits != n:
        raise InputError(f"input state has {state.num_qubits} qubits, expected {n}")
    if cfg.mode == "exhaustive":
        reports = teleproto.run_hub_branches(n, u, state)
    else:
        reports = [teleproto.run_hub(n, u, state, rng=np.random.default_rng([cfg.seed, 2]))]

    audits = [r.monotonicity_audit for r in reports]
    doc = {
        "command": "hub",
        "config": {"n": n, "seed": cfg.seed, "unitary": cfg.unitary_spec, "mode": cfg.mode},
        "runs": len(reports),
        "fidelity_min": min(r.fidelity for r in reports),
        "ebits_total": reports[0].ebits_total,
        "cbits_total": reports[0].cbits_total,
        "ebits_expected": 2 * (n - 1),
        "cbits_expected": 4 * (n - 1),
        "cost_exact": all(r.cost_exact for r in reports),
        "monotonicity_audit": {
            "passed": all(a.passed for a in audits),
            "max_increase": max(a.max_increase for a in audits),
        },
        "locality_violations": sum(r.locality_violations for r in reports),
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    return doc, doc["passed"]


def cmd_ps_experiment(cfg: RunConfig) -> tuple[dict, bool]:
    exp = entops.run_ps_experiment(cfg.n, via=cfg.via)
    ok = abs(exp.cut_entropy_after - cfg.n) <= 1e-9 and exp.fidelity >= 1 - 1e-9
    if exp.audit is not None and cfg.via == "hub":
        ok = ok and exp.audit.passed
    doc = {"command": "ps-experiment", **exp.to_dict(), "expected": cfg.n, "passed": ok}
    return doc, ok


def cmd_bound(cfg: RunConfig) -> tuple[dict, bool]:
    if cfg.er is None:
        raise InputError("--er is required")
    rep = resgraph.verify_even_bound(cfg.n, cfg.er)
    return {"command": "bound", **rep.to_dict()}, rep.satisfied


def _graph_matrix(cfg: RunConfig) -> resgraph.ResourceMatrix:
    m = resgraph.ResourceMatrix(cfg.matrix) if cfg.matrix is not None else resgraph.star_matrix(cfg.n)
    if cfg.kind == "star":
        return m
    if cfg.kind == "symmetrized":
        return resgraph.symmetrize(m)
    raise InputError(f"unknown graph kind {cfg.kind!r}")


def cmd_graph(cfg: RunConfig) -> tuple[str, bool]:
    m = _graph_matrix(cfg)
    if cfg.format == "dot":
        return resgraph.export_dot(m), True
    doc = {"command": "graph", "kind": cfg.kind, **m.to_dict(),
           "total_entanglement": resgraph.total_entanglement(m)}
    return dumps(doc), True


COMMANDS = {
    "hub": cmd_hub,
    "ps-experiment": cmd_ps_experiment,
    "bound": cmd_bound,
    "graph": cmd_graph,
}


def parse_er(text: str):
    """Decimal strings become exact fractions; anything else falls back to float."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        try:
            return float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entangleport", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=("json",)):
        sp.add_argument("--n", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", dest="output_path")
        sp.add_argument("--format", choices=fmt, default=fmt[0])

    hub = sub.add_parser("hub", help="run the hub protocol")
    common(hub)
    hub.add_argument("--unitary", dest="unitary_spec")
    hub.add_argument("--mode", choices=("sampled", "exhaustive"))
    hub.add_argument("--config", help="JSON network spec")

    ps = sub.add_parser("ps-experiment", help="ebits created by the pairwise-SWAP")
    common(ps)
    ps.add_argument("--via", choices=("direct", "hub"), default="direct")

    bound = sub.add_parser("bound", help="check the even-N cut bound")
    common(bound)
    bound.add_argument("--er", type=parse_er, required=True)

    graph = sub.add_parser("graph", help="export a resource entanglement graph")
    common(graph, fmt=("dot", "json"))
    graph.add_argument("--kind", choices=("star", "symmetrized"), default="star")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base: dict = {}
    if getattr(args, "config", None):
        try:
            spec = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        if spec.get("schema", SCHEMA) != SCHEMA:
            raise InputError(f"unsupported schema {spec.get('schema')!r}")
        for key, dest in (("n", "n"), ("seed", "seed"), ("unitary", "unitary_spec"),
                          ("mode", "mode"), ("matrix", "matrix"), ("input", "input_spec")):
            if key in spec:
                base[dest] = spec[key]
    for dest in ("n", "seed", "unitary_spec", "mode", "output_path", "er", "via", "kind", "format"):
        val = getattr(args, dest, None)
        if val is not None:
            base[dest] = val
    if "n" not in base:
        raise InputError("--n is required")
    return RunConfig(command=args.command, **base).validate()


def run(cfg: RunConfig) -> tuple[str, bool]:
    out, ok = COMMANDS[cfg.command](cfg)
    text = out if isinstance(out, str) else dumps(out)
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    return text, ok


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        text, ok = run(cfg)
    except (InputError, UnsupportedError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ProtocolError as exc:
        print(f"protocol failure: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except EntangleportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    if not cfg.output_path:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
