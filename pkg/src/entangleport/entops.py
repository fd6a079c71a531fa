"""
SWAP, pairwise-SWAP and the experiments that count the ebits they create.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import statevec as sv
from .errors import InputError
from .netmodel import AuditResult, Network, build_network
from .resgraph import CutSpec, ResourceMatrix, star_matrix
from .teleproto import ProtocolReport, hub_execute

__all__ = [
    "CutSpec",
    "PSExperiment",
    "cut_entropy",
    "ps_ebit_experiment",
    "ps_unitary",
    "run_ps_experiment",
    "swap_unitary",
    "two_ebit_experiment",
]


def swap_unitary() -> np.ndarray:
    """Exchange the states of two qubits."""
    u = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            u[b + 2 * a, a + 2 * b] = 1.0
    return u


def ps_unitary(n: int) -> np.ndarray:
    """SWAPs on qubit pairs (0,1), (2,3), ..., (n-2, n-1)."""
    if n < 2 or n % 2:
        raise InputError(f"pairwise-SWAP needs an even N >= 2, got {n}")
    s = swap_unitary()
    # kron puts its first factor on the high qubits
    return reduce(np.kron, [s] * (n // 2))


def cut_entropy(net: Network, cut: CutSpec) -> float:
    return net.cut_entropy(cut)


def _bell_pairs_locally(n: int) -> sv.StateVector:
    """Slots q_1..q_n then one ancilla per lab, each q_j Bell-paired with its ancilla."""
    state = sv.StateVector(np.ones(1))
    for _ in range(n):
        state = sv.tensor(state, sv.StateVector(sv.BELL))
    # tensor order is (q1, a1, q2, a2, ...); slots want (q1..qn, a1..an)
    order = [2 * j for j in range(n)] + [2 * j + 1 for j in range(n)]
    return sv.permute_qubits(state, order)


def two_ebit_experiment(before: bool = False) -> float:
    """Cut entropy between labs A and B after SWAPping halves of two local Bell pairs.

    Qubits are (alpha, alpha', beta, beta') = (0, 1, 2, 3); lab A holds 0, 1.
    """
    state = sv.tensor(sv.StateVector(sv.BELL), sv.StateVector(sv.BELL))
    if not before:
        state = sv.apply_unitary(state, swap_unitary(), [0, 2])
    return sv.entanglement_entropy(state, [0, 1])


@dataclass
class PSExperiment:
    N: int
    via: str
    cut_entropy_before: float
    cut_entropy_after: float
    fidelity: float
    audit: AuditResult | None = None
    report: ProtocolReport | None = None

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "via": self.via,
            "cut_entropy_before": self.cut_entropy_before,
            "cut_entropy_after": self.cut_entropy_after,
            "fidelity": self.fidelity,
            "monotonicity_audit": None if self.audit is None else self.audit.to_dict(),
            "ebits_total": None if self.report is None else self.report.ebits_total,
            "cbits_total": None if self.report is None else self.report.cbits_total,
        }


def run_ps_experiment(n: int, via: str = "direct", outcomes=None, rng=None,
                      audit: bool = True) -> PSExperiment:
    """PS on N labs that each hold ``q_j`` Bell-paired with a local ancilla.

    ``via="direct"`` applies the PS unitary as a tagged global gate on a
    network with no shared pairs.  ``via="hub"`` realizes it with the hub
    protocol on star resources, so the N ebits it creates across the even/odd
    cut are paid for with Bell pairs and the LOCC audit applies.
    """
    if n < 2 or n % 2:
        raise InputError(f"the PS experiment needs an even N >= 2, got {n}")
    u = ps_unitary(n)
    cut = CutSpec.even_odd(n)
    state = _bell_pairs_locally(n)
    expected = sv.apply_unitary(state, u, range(n))

    if via == "direct":
        net = build_network(n, ResourceMatrix(np.zeros((n, n))), state,
                            ancillas=[1] * n, audit=audit)
        before = net.cut_entropy(cut)
        net.apply_global(u, [net.slots[k] for k in range(n)], "PS")
        report = None
    elif via == "hub":
        net = build_network(n, star_matrix(n), state, ancillas=[1] * n, audit=audit)
        before = net.cut_entropy(cut)
        if outcomes is None and rng is None:
            outcomes = ["00"] * (2 * (n - 1))
        report = hub_execute(net, u, outcomes=outcomes, rng=rng)
    else:
        raise InputError(f"unknown route {via!r}")
    after = net.cut_entropy(cut)
    return PSExperiment(
        N=n,
        via=via,
        cut_entropy_before=before,
        cut_entropy_after=after,
        fidelity=sv.fidelity_up_to_phase(net.register_state(), expected),
        audit=net.audit_result(),
        report=report,
    )


def ps_ebit_experiment(n: int) -> float:
    """Ebits across the even/odd cut created by one PS operation."""
    return run_ps_experiment(n, via="direct").cut_entropy_after
