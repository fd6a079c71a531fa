"""
Laboratory network: qubit ownership, the Bell-pair registry, the classical
channel and the resource ledger.

Qubits carry stable integer ids.  The simulator keeps a dense "active"
register for qubits that have taken part in the protocol.  Registered Bell
pairs that have not been consumed are stored in factored form: they are in
the canonical Bell state and in product with everything else, so they are
only tensored into the active register when consumed.  ``full_state`` gives
the dense joint state over every live qubit when it is small enough.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import statevec as sv
from .errors import InputError, LocalityViolation, ProtocolError, ResourceExhausted
from .resgraph import CutSpec, ResourceMatrix, all_bipartitions

AUDIT_ATOL = 1e-9


def _edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class BellPair:
    qubit_a: int
    qubit_b: int
    labs: tuple[int, int]


@dataclass
class Ledger:
    """Ebits consumed per unordered lab pair, cbits sent per ordered pair."""

    ebits_consumed: dict = field(default_factory=lambda: defaultdict(int))
    cbits_sent: dict = field(default_factory=lambda: defaultdict(int))

    def record_ebit(self, i: int, j: int) -> None:
        self.ebits_consumed[_edge(i, j)] += 1

    def record_cbits(self, src: int, dst: int, count: int) -> None:
        self.cbits_sent[(src, dst)] += count

    def ebits(self, i: int, j: int) -> int:
        return self.ebits_consumed.get(_edge(i, j), 0)

    def cbits(self, src: int, dst: int) -> int:
        return self.cbits_sent.get((src, dst), 0)

    @property
    def total_ebits(self) -> int:
        return sum(self.ebits_consumed.values())

    @property
    def total_cbits(self) -> int:
        return sum(self.cbits_sent.values())


@dataclass(frozen=True)
class TraceEvent:
    step: int
    kind: str
    qubits: tuple
    owners: tuple
    detail: str = ""
    global_op: bool = False


@dataclass
class AuditResult:
    """LOCC monotonicity audit over lab bipartitions.

    ``max_increase`` is the largest per-branch rise of any cut value over its
    previous or initial value.  ``max_ensemble_increase`` compares, at each
    measurement, the outcome-averaged cut value with the value before it.
    Only the ensemble quantity is guaranteed for arbitrary local measurements;
    teleportation-based protocols satisfy the per-branch one as well.
    """

    passed: bool
    max_increase: float
    steps: int
    cuts: int
    global_ops: int = 0
    max_ensemble_increase: float = 0.0

    @property
    def ensemble_passed(self) -> bool:
        return self.max_ensemble_increase <= AUDIT_ATOL

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_increase": self.max_increase,
            "ensemble_passed": self.ensemble_passed,
            "max_ensemble_increase": self.max_ensemble_increase,
            "steps": self.steps,
            "cuts": self.cuts,
            "global_ops": self.global_ops,
        }


class Network:
    """N labs sharing Bell pairs, each holding one data qubit plus optional ancillas.

    The register that hub-style protocols act upon is the list of *slots*:
    data qubits ``q_1..q_N`` first, then ancillas grouped by lab.  A slot's
    physical qubit may change when its state is teleported.
    """

    def __init__(self, num_labs: int, resources, input_state=None, ancillas=None,
                 audit: bool = True, audit_cuts: Sequence[CutSpec] | None = None):
        if num_labs < 1:
            raise InputError("a network needs at least one lab")
        res = resources if isinstance(resources, ResourceMatrix) else ResourceMatrix(resources)
        if res.n != num_labs:
            raise InputError(f"resource matrix is {res.n}x{res.n}, expected {num_labs}")
        if not np.array_equal(res.entries, np.round(res.entries)):
            raise InputError("simulated resources must be whole Bell pairs")
        self.num_labs = num_labs
        self.initial_resources = res
        self.ledger = Ledger()
        self.trace: list[TraceEvent] = []
        self._owner: dict[int, int] = {}
        self._next_id = 0
        self._mailbox: dict[tuple[int, int], deque] = defaultdict(deque)

        anc = self._ancilla_counts(ancillas)
        slot_labs = list(range(1, num_labs + 1))
        self.slot_names = [f"q{j}" for j in slot_labs]
        for lab, count in enumerate(anc, start=1):
            slot_labs += [lab] * count
            self.slot_names += [f"a{lab}.{k}" for k in range(count)]
        self.slots = [self._new_qubit(lab) for lab in slot_labs]
        self._active = list(self.slots)
        self._state = self._coerce_input(input_state, len(self.slots))
        self.input_state = self._state

        self._registry: dict[tuple[int, int], deque] = defaultdict(deque)
        for i, j, w in res.edges():
            for _ in range(int(w)):
                pair = BellPair(self._new_qubit(i), self._new_qubit(j), (i, j))
                self._registry[(i, j)].append(pair)

        self.audit_enabled = audit
        self._cuts = list(audit_cuts) if audit_cuts is not None else all_bipartitions(num_labs)
        self._audit_steps = 0
        self._global_ops = 0
        self._max_increase = 0.0
        self._max_ensemble_increase = 0.0
        if audit:
            self._baseline = self._cut_values()
            self._prev = self._baseline

    def fork(self) -> "Network":
        """Independent copy that shares only immutable pieces (states, pairs, events)."""
        new = object.__new__(Network)
        new.__dict__.update(self.__dict__)
        new.ledger = Ledger(defaultdict(int, self.ledger.ebits_consumed),
                            defaultdict(int, self.ledger.cbits_sent))
        new.trace = list(self.trace)
        new._owner = dict(self._owner)
        new._mailbox = defaultdict(deque, {k: deque(v) for k, v in self._mailbox.items()})
        new.slots = list(self.slots)
        new._active = list(self._active)
        new._registry = defaultdict(deque, {k: deque(v) for k, v in self._registry.items()})
        return new

    # construction helpers

    def _ancilla_counts(self, ancillas) -> list[int]:
        if ancillas is None:
            return [0] * self.num_labs
        if isinstance(ancillas, dict):
            counts = [int(ancillas.get(j, 0)) for j in range(1, self.num_labs + 1)]
        else:
            counts = [int(c) for c in ancillas]
        if len(counts) != self.num_labs or any(c < 0 for c in counts):
            raise InputError("ancillas must give a nonnegative count for every lab")
        return counts

    @staticmethod
    def _coerce_input(input_state, num_slots: int) -> sv.StateVector:
        if input_state is None:
            return sv.basis_state(num_slots, "0" * num_slots)
        if isinstance(input_state, sv.StateVector):
            state = input_state
        else:
            state = sv.product_state(input_state)
        if state.num_qubits != num_slots:
            raise InputError(f"input state has {state.num_qubits} qubits, expected {num_slots}")
        return state

    def _new_qubit(self, lab: int) -> int:
        q = self._next_id
        self._next_id += 1
        self._owner[q] = lab
        return q

    # queries

    @property
    def state(self) -> sv.StateVector:
        """Dense state of the active register (see ``active_qubits`` for its order)."""
        return self._state

    @property
    def active_qubits(self) -> list[int]:
        return list(self._active)

    @property
    def live_qubits(self) -> list[int]:
        return sorted(self._owner)

    @property
    def data_qubits(self) -> dict[int, int]:
        """Lab j -> physical qubit currently holding q_j."""
        return {j: self.slots[j - 1] for j in range(1, self.num_labs + 1)}

    @property
    def bell_registry(self) -> list[BellPair]:
        return [p for edge in sorted(self._registry) for p in self._registry[edge]]

    def owner(self, q: int) -> int:
        try:
            return self._owner[q]
        except KeyError:
            raise InputError(f"qubit {q} is not live") from None

    def qubits_of(self, lab: int) -> list[int]:
        return sorted(q for q, o in self._owner.items() if o == lab)

    def available_ebits(self, i: int, j: int) -> int:
        return len(self._registry.get(_edge(i, j), ()))

    def residual_resources(self) -> ResourceMatrix:
        m = np.zeros((self.num_labs, self.num_labs))
        for (i, j), pairs in self._registry.items():
            m[i - 1, j - 1] = m[j - 1, i - 1] = len(pairs)
        return ResourceMatrix(m)

    def _positions(self, qubits: Sequence[int]) -> list[int]:
        pos = {q: k for k, q in enumerate(self._active)}
        try:
            return [pos[q] for q in qubits]
        except KeyError as exc:
            raise InputError(f"qubit {exc.args[0]} is not in the active register") from None

    def register_state(self) -> sv.StateVector:
        """State of the slot register (data then ancillas) in slot order.

        Only valid once all protocol workspace has been discarded.
        """
        if sorted(self._active) != sorted(self.slots):
            raise ProtocolError("workspace qubits are still live in the active register")
        return sv.permute_qubits(self._state, self._positions(self.slots))

    def full_state(self) -> tuple[sv.StateVector, list[int]]:
        """Dense state over every live qubit, registry pairs included, with its qubit order."""
        order = list(self._active)
        parts = [self._state]
        for pair in self.bell_registry:
            parts.append(sv.StateVector(sv.BELL))
            order += [pair.qubit_a, pair.qubit_b]
        return sv.tensor(*parts), order

    def cut_entropy(self, cut: CutSpec) -> float:
        """Ebits across ``cut``: active-register entropy plus crossing unused pairs."""
        cut.validate(self.num_labs)
        return self._cut_entropy(self._state, cut)

    def _cut_entropy(self, state: sv.StateVector, cut: CutSpec) -> float:
        side = [k for k, q in enumerate(self._active) if self._owner[q] in cut.side_a]
        value = sv.entanglement_entropy(state, side)
        for (i, j), pairs in self._registry.items():
            if (i in cut.side_a) != (j in cut.side_a):
                value += len(pairs)
        return value

    # audit

    def _cut_values(self, state: sv.StateVector | None = None) -> np.ndarray:
        state = self._state if state is None else state
        return np.array([self._cut_entropy(state, c) for c in self._cuts])

    def _audit_ensemble(self, positions: list[int]) -> None:
        """Outcome-averaged cut values of a pending measurement vs. the current ones."""
        if not self.audit_enabled or not self._cuts:
            return
        avg = np.zeros(len(self._cuts))
        probs = sv.outcome_probabilities(self._state, positions)
        for label, p in enumerate(probs):
            if p <= sv.BRANCH_CUTOFF:
                continue
            out = sv.label_to_bits(label, len(positions))
            post = sv.measure_computational(self._state, positions, outcome=out)[1]
            avg += p * self._cut_values(post)
        inc = float(np.max(avg - self._prev))
        self._max_ensemble_increase = max(self._max_ensemble_increase, inc)

    def _audit(self, global_op: bool = False, state_changed: bool = True) -> None:
        if not self.audit_enabled:
            return
        self._audit_steps += 1
        if not state_changed:
            return
        vals = self._cut_values()
        if global_op:
            self._global_ops += 1
            self._baseline = self._prev = vals
            return
        if vals.size:
            inc = max(float(np.max(vals - self._prev)), float(np.max(vals - self._baseline)))
            self._max_increase = max(self._max_increase, inc)
        self._prev = vals

    def audit_result(self) -> AuditResult | None:
        if not self.audit_enabled:
            return None
        return AuditResult(
            passed=self._max_increase <= AUDIT_ATOL,
            max_increase=self._max_increase,
            steps=self._audit_steps,
            cuts=len(self._cuts),
            global_ops=self._global_ops,
            max_ensemble_increase=self._max_ensemble_increase,
        )

    def _log(self, kind: str, qubits: Sequence[int], detail: str = "", global_op: bool = False) -> None:
        owners = tuple(self._owner[q] for q in qubits)
        self.trace.append(TraceEvent(len(self.trace), kind, tuple(qubits), owners, detail, global_op))

    # protocol steps

    def check_locality(self, qubits: Sequence[int]) -> int:
        """Owning lab of ``qubits``; raises LocalityViolation if they span labs."""
        labs = {self.owner(q) for q in qubits}
        if len(labs) > 1:
            raise LocalityViolation(f"qubits {list(qubits)} span labs {sorted(labs)}")
        return labs.pop() if labs else 0

    def consume_bell_pair(self, i: int, j: int) -> BellPair:
        if i == j:
            raise InputError("a Bell pair joins two distinct labs")
        pairs = self._registry.get(_edge(i, j))
        if not pairs:
            raise ResourceExhausted(f"no Bell pair left between A{i} and A{j}")
        pair = pairs.popleft()
        self._state = sv.tensor(self._state, sv.StateVector(sv.BELL))
        self._active += [pair.qubit_a, pair.qubit_b]
        self.ledger.record_ebit(i, j)
        self._log("consume", (pair.qubit_a, pair.qubit_b), f"A{i}-A{j}")
        self._audit()
        return pair

    def apply(self, u, qubits: Sequence[int], name: str = "") -> None:
        """Local gate: every target must belong to the same lab."""
        self.check_locality(qubits)
        self._state = sv.apply_unitary(self._state, u, self._positions(qubits))
        self._log("gate", qubits, name)
        self._audit()

    def apply_global(self, u, qubits: Sequence[int], name: str = "") -> None:
        """Reference gate exempt from the locality guard; resets the audit baseline."""
        self._state = sv.apply_unitary(self._state, u, self._positions(qubits))
        self._log("gate", qubits, name, global_op=True)
        self._audit(global_op=True)

    def measure(self, qubits: Sequence[int], outcome=None, rng=None) -> tuple[str, float]:
        self.check_locality(qubits)
        positions = self._positions(qubits)
        self._audit_ensemble(positions)
        bits, self._state, p = sv.measure_computational(
            self._state, positions, outcome=outcome, rng=rng)
        self._log("measure", qubits, bits)
        self._audit()
        return bits, p

    def discard(self, qubits: Sequence[int]) -> None:
        if set(qubits) & set(self.slots):
            raise ProtocolError("cannot discard a qubit that holds a register slot")
        self._log("discard", qubits)
        self._state = sv.discard_qubits(self._state, self._positions(qubits))
        gone = set(qubits)
        self._active = [q for q in self._active if q not in gone]
        for q in gone:
            del self._owner[q]
        self._audit()

    def send(self, src: int, dst: int, bits: str) -> None:
        if src == dst:
            raise InputError("a lab cannot send a message to itself")
        for lab in (src, dst):
            if not 1 <= lab <= self.num_labs:
                raise InputError(f"no lab A{lab}")
        bits = str(bits)
        if set(bits) - {"0", "1"}:
            raise InputError(f"message {bits!r} is not a bitstring")
        self._mailbox[(src, dst)].append(bits)
        self.ledger.record_cbits(src, dst, len(bits))
        self.trace.append(TraceEvent(len(self.trace), "send", (), (src, dst), bits))
        self._audit(state_changed=False)

    def receive(self, src: int, dst: int) -> str:
        box = self._mailbox.get((src, dst))
        if not box:
            raise ProtocolError(f"no message from A{src} waiting at A{dst}")
        return box.popleft()

    def rebind(self, old: int, new: int) -> None:
        """Move a register slot from physical qubit ``old`` to ``new``."""
        self.slots = [new if q == old else q for q in self.slots]


def build_network(n: int, resources, initial_data_states=None, ancillas=None,
                  audit: bool = True) -> Network:
    """Network of ``n`` labs with Bell pairs from ``resources``.

    ``initial_data_states`` is either a list of single-qubit states (one per
    slot) or a joint StateVector over all slots, which may be entangled.
    """
    return Network(n, resources, initial_data_states, ancillas=ancillas, audit=audit)


def locality_guard(net: Network, u_targets: Sequence[int]) -> int:
    """Owning lab of the targets, or LocalityViolation."""
    return net.check_locality(u_targets)
