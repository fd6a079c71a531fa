"""
Teleportation and the hub protocol: every lab teleports its qubit to A1,
A1 applies the collective unitary locally, and the qubits are teleported back.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import statevec as sv
from .errors import InputError
from .netmodel import AuditResult, Network, build_network
from .resgraph import star_matrix

HUB = 1
FIDELITY_ATOL = 1e-9


@dataclass(frozen=True)
class TeleportRecord:
    source: int
    destination: int
    branch_outcome: str
    ebits_used: int
    cbits_used: int
    probability: float

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "destination": self.destination,
            "branch_outcome": self.branch_outcome,
            "ebits_used": self.ebits_used,
            "cbits_used": self.cbits_used,
            "probability": self.probability,
        }


@dataclass
class ProtocolReport:
    N: int
    fidelity: float
    ebits_total: int
    cbits_total: int
    records: list = field(default_factory=list)
    monotonicity_audit: AuditResult | None = None
    locality_violations: int = 0

    @property
    def cost_exact(self) -> bool:
        return self.ebits_total == 2 * (self.N - 1) and self.cbits_total == 4 * (self.N - 1)

    @property
    def passed(self) -> bool:
        audit_ok = self.monotonicity_audit is None or self.monotonicity_audit.passed
        return (self.fidelity >= 1 - FIDELITY_ATOL and self.cost_exact
                and audit_ok and self.locality_violations == 0)

    @property
    def branch(self) -> tuple:
        return tuple(r.branch_outcome for r in self.records)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "fidelity": self.fidelity,
            "ebits_total": self.ebits_total,
            "cbits_total": self.cbits_total,
            "cost_exact": self.cost_exact,
            "records": [r.to_dict() for r in self.records],
            "monotonicity_audit": None if self.monotonicity_audit is None
            else self.monotonicity_audit.to_dict(),
            "locality_violations": self.locality_violations,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class _PendingTeleport:
    q: int
    near: int
    far: int
    src: int
    dest: int
    ebits0: int
    cbits0: int


def _teleport_prepare(net: Network, q: int, dest: int) -> _PendingTeleport:
    """Consume a pair and rotate into the Bell basis, up to the measurement."""
    src = net.owner(q)
    if src == dest:
        raise InputError(f"qubit {q} is already at A{dest}")
    ebits0, cbits0 = net.ledger.total_ebits, net.ledger.total_cbits
    pair = net.consume_bell_pair(src, dest)
    near, far = (pair.qubit_a, pair.qubit_b) if net.owner(pair.qubit_a) == src \
        else (pair.qubit_b, pair.qubit_a)
    net.apply(sv.CNOT, [q, near], "CNOT")
    net.apply(sv.H, [q], "H")
    return _PendingTeleport(q, near, far, src, dest, ebits0, cbits0)


def _teleport_finish(net: Network, t: _PendingTeleport, outcome=None, rng=None) -> TeleportRecord:
    """Measure, send the two bits, correct at the receiver, clean up."""
    bits, p = net.measure([t.q, t.near], outcome=outcome, rng=rng)
    net.send(t.src, t.dest, bits)

    msg = net.receive(t.src, t.dest)
    if msg[1] == "1":
        net.apply(sv.X, [t.far], "X")
    if msg[0] == "1":
        net.apply(sv.Z, [t.far], "Z")
    net.rebind(t.q, t.far)
    net.discard([t.q, t.near])

    return TeleportRecord(
        source=t.src,
        destination=t.dest,
        branch_outcome=bits,
        ebits_used=net.ledger.total_ebits - t.ebits0,
        cbits_used=net.ledger.total_cbits - t.cbits0,
        probability=p,
    )


def teleport_qubit(net: Network, q: int, dest: int, outcome=None, rng=None) -> TeleportRecord:
    """Teleport the state of physical qubit ``q`` to lab ``dest``.

    Pass ``outcome`` (two bits) to force a Bell-measurement branch, or ``rng``
    to sample it.  Any register slot held by ``q`` moves to the receiving half
    of the consumed pair.
    """
    return _teleport_finish(net, _teleport_prepare(net, q, dest), outcome, rng)


def _is_fresh_star(net: Network) -> bool:
    return (net.initial_resources == star_matrix(net.num_labs)
            and net.ledger.total_ebits == 0 and net.ledger.total_cbits == 0)


def _hub_plan(net: Network, u) -> tuple[np.ndarray, list, sv.StateVector]:
    n = net.num_labs
    if not _is_fresh_star(net):
        raise InputError("hub protocol needs a fresh network built on the star topology")
    u = sv.check_unitary(u, n)
    # (slot index, destination) per teleport; None marks the local U at the hub
    plan = [(j - 1, HUB) for j in range(2, n + 1)] + [None] + [(j - 1, j) for j in range(2, n + 1)]
    expected = sv.apply_unitary(net.input_state, u, range(n))
    return u, plan, expected


def _report(net: Network, records: list, expected: sv.StateVector) -> ProtocolReport:
    return ProtocolReport(
        N=net.num_labs,
        fidelity=sv.fidelity_up_to_phase(net.register_state(), expected),
        ebits_total=sum(r.ebits_used for r in records),
        cbits_total=sum(r.cbits_used for r in records),
        records=records,
        monotonicity_audit=net.audit_result(),
        locality_violations=count_locality_violations(net),
    )


def hub_execute(net: Network, u, outcomes: Sequence | None = None,
                rng: np.random.Generator | None = None) -> ProtocolReport:
    """Run the three-phase hub protocol for the collective unitary ``u``.

    ``outcomes`` forces one Bell-measurement branch per teleportation, in
    protocol order (labs 2..N inbound, then 2..N outbound); otherwise each
    branch is sampled from ``rng``.  Ancilla slots never move and ``u`` acts
    on the data qubits only.
    """
    n = net.num_labs
    u, plan, expected = _hub_plan(net, u)
    if outcomes is not None:
        outcomes = list(outcomes)
        if len(outcomes) != 2 * (n - 1):
            raise InputError(f"need {2 * (n - 1)} branch outcomes, got {len(outcomes)}")
    elif rng is None:
        raise InputError("pass outcomes= for branch mode or rng= for sampled mode")
    branch = iter(outcomes) if outcomes is not None else itertools.repeat(None)

    records = []
    for step in plan:
        if step is None:
            net.apply(u, net.slots[:n], "U")
        else:
            slot, dest = step
            records.append(teleport_qubit(net, net.slots[slot], dest, next(branch), rng))
    return _report(net, records, expected)


def hub_execute_all_branches(net: Network, u) -> list[ProtocolReport]:
    """Every Bell-outcome branch of the hub protocol, one report per leaf.

    The network is forked at each measurement, so the shared prefix of the
    protocol runs once.  Leaves come out in the same order as
    ``branch_sequences(N)``.
    """
    n = net.num_labs
    u, plan, expected = _hub_plan(net, u)
    reports = []

    def walk(node: Network, k: int, records: list) -> None:
        while k < len(plan) and plan[k] is None:
            node.apply(u, node.slots[:n], "U")
            k += 1
        if k == len(plan):
            reports.append(_report(node, records, expected))
            return
        slot, dest = plan[k]
        pending = _teleport_prepare(node, node.slots[slot], dest)
        outs = sv.branch_outcomes(2)
        for i, out in enumerate(outs):
            child = node if i == len(outs) - 1 else node.fork()
            rec = _teleport_finish(child, pending, outcome=out)
            walk(child, k + 1, records + [rec])

    walk(net, 0, [])
    return reports


def count_locality_violations(net: Network) -> int:
    """Non-global gates and measurements in the trace that touched more than one lab."""
    return sum(1 for ev in net.trace
               if ev.kind in ("gate", "measure") and not ev.global_op and len(set(ev.owners)) > 1)


def branch_sequences(n: int, exhaustive: bool = True, sample: int = 256,
                     seed=0) -> Iterator[tuple[str, ...]]:
    """Bell-outcome sequences for an N-lab hub run.

    All ``4**(2(N-1))`` sequences when ``exhaustive`` and N <= 3; otherwise
    ``sample`` sequences drawn uniformly with a seeded generator.
    """
    k = 2 * (n - 1)
    outs = sv.branch_outcomes(2)
    if exhaustive and n <= 3:
        yield from itertools.product(outs, repeat=k)
        return
    rng = np.random.default_rng(seed)
    for row in rng.integers(0, 4, size=(sample, k)):
        yield tuple(outs[i] for i in row)


def run_hub(n: int, u, input_state=None, ancillas=None, outcomes=None, rng=None,
            audit: bool = True) -> ProtocolReport:
    """Build a fresh star network and run the hub protocol once."""
    net = build_network(n, star_matrix(n), input_state, ancillas=ancillas, audit=audit)
    return hub_execute(net, u, outcomes=outcomes, rng=rng)


def run_hub_branches(n: int, u, input_state=None, branches: Iterable | None = None,
                     audit: bool = True) -> list[ProtocolReport]:
    """Hub reports over many branches.

    With ``branches=None`` every branch is explored (N <= 3 only); otherwise
    one fresh run per given outcome sequence.
    """
    if branches is None:
        if n > 3:
            raise InputError("exhaustive branch enumeration is limited to N <= 3")
        net = build_network(n, star_matrix(n), input_state, audit=audit)
        return hub_execute_all_branches(net, u)
    return [run_hub(n, u, input_state, outcomes=b, audit=audit) for b in branches]
