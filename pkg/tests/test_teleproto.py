import numpy as np
import pytest

from entangleport import statevec as sv
from entangleport import teleproto as tp
from entangleport.entops import ps_unitary
from entangleport.errors import InputError, ResourceExhausted
from entangleport.netmodel import build_network
from entangleport.resgraph import CutSpec, star_matrix

import oracles

PLUS = np.array([1, 1]) / np.sqrt(2)


@pytest.mark.parametrize("branch", sv.branch_outcomes(2))
def test_teleport_plus_state_every_branch(branch):
    net = build_network(2, star_matrix(2), [[1, 0], PLUS])
    rec = tp.teleport_qubit(net, net.slots[1], 1, outcome=branch)
    assert rec.probability == pytest.approx(0.25, abs=1e-12)
    assert rec.branch_outcome == branch
    assert net.owner(net.slots[1]) == 1
    out = net.register_state()
    assert sv.fidelity_up_to_phase(out, sv.product_state([[1, 0], PLUS])) >= 1 - 1e-10


def test_teleport_arbitrary_states_every_branch():
    rng = np.random.default_rng(12)
    for _ in range(10):
        psi = sv.random_state(2, rng)
        for branch in sv.branch_outcomes(2):
            net = build_network(2, star_matrix(2), psi)
            tp.teleport_qubit(net, net.slots[0], 2, outcome=branch)
            assert sv.fidelity_up_to_phase(net.register_state(), psi) >= 1 - 1e-10


@pytest.mark.parametrize("branch", sv.branch_outcomes(2))
def test_teleporting_half_of_an_entangled_pair_keeps_entanglement(branch):
    # data qubits q1, q2 form an entangled pair; move q2 to lab 1 and back is not needed:
    # lab 3 is an idle spoke, q2 travels from A2 to A1
    psi = sv.tensor(sv.StateVector(sv.BELL), sv.basis_state(1, "0"))
    net = build_network(3, star_matrix(3), psi)
    before = sv.entanglement_entropy(net.register_state(), [0])
    tp.teleport_qubit(net, net.slots[1], 1, outcome=branch)
    after_state = net.register_state()
    assert sv.fidelity_up_to_phase(after_state, psi) >= 1 - 1e-10
    assert sv.entanglement_entropy(after_state, [0]) == pytest.approx(before, abs=1e-9)
    # both halves now sit at A1, so the A1|rest cut no longer sees the data pair
    assert net.cut_entropy(CutSpec.of({1}, 3)) == pytest.approx(3.0, abs=1e-9)


def test_teleport_ledger_and_record():
    net = build_network(2, star_matrix(2))
    rec = tp.teleport_qubit(net, net.slots[1], 1, rng=np.random.default_rng(0))
    assert (rec.ebits_used, rec.cbits_used) == (1, 2)
    assert (net.ledger.total_ebits, net.ledger.total_cbits) == (1, 2)
    assert net.ledger.cbits(2, 1) == 2
    assert (rec.source, rec.destination) == (2, 1)


def test_teleport_without_pair_is_exhausted():
    net = build_network(3, star_matrix(3))
    with pytest.raises(ResourceExhausted):
        tp.teleport_qubit(net, net.slots[1], 3, outcome="00")


def test_teleport_to_own_lab_rejected():
    net = build_network(2, star_matrix(2))
    with pytest.raises(InputError):
        tp.teleport_qubit(net, net.slots[0], 1, outcome="00")


def test_stray_message_cannot_be_mistaken_for_corrections():
    net = build_network(2, star_matrix(2), [[1, 0], PLUS])
    net.send(2, 1, "11")
    assert net.receive(2, 1) == "11"
    tp.teleport_qubit(net, net.slots[1], 1, outcome="00")
    assert sv.fidelity_up_to_phase(net.register_state(), sv.product_state([[1, 0], PLUS])) >= 1 - 1e-10


# hub protocol

def test_hub_identity_n2():
    rep = tp.run_hub(2, np.eye(4), sv.random_state(2, 0), rng=np.random.default_rng(1))
    assert rep.fidelity == pytest.approx(1.0, abs=1e-9)
    assert (rep.ebits_total, rep.cbits_total) == (2, 4)
    assert rep.passed


def test_hub_ps_n4_matches_bit_permutation():
    psi = sv.random_state(4, 3)
    expected = sv.StateVector(oracles.swap_bits_permutation(4, [(0, 1), (2, 3)]) @ psi.amplitudes)
    net = build_network(4, star_matrix(4), psi)
    rep = tp.hub_execute(net, ps_unitary(4), rng=np.random.default_rng(2))
    assert sv.fidelity_up_to_phase(net.register_state(), expected) >= 1 - 1e-9
    assert rep.fidelity >= 1 - 1e-9
    assert (rep.ebits_total, rep.cbits_total) == (6, 12)


def test_hub_haar_n3_seed7_against_matrix_product():
    u = sv.haar_random_unitary(8, 7)
    psi = sv.random_state(3, 70)
    expected = sv.StateVector(u @ psi.amplitudes)
    for branch in tp.branch_sequences(3, exhaustive=False, sample=16, seed=1):
        net = build_network(3, star_matrix(3), psi)
        rep = tp.hub_execute(net, u, outcomes=branch)
        assert sv.fidelity_up_to_phase(net.register_state(), expected) >= 1 - 1e-9
        assert (rep.ebits_total, rep.cbits_total) == (4, 8)


def test_hub_single_lab_is_local():
    u = sv.haar_random_unitary(2, 0)
    rep = tp.run_hub(1, u, sv.random_state(1, 0), outcomes=[])
    assert rep.fidelity == pytest.approx(1.0) and rep.ebits_total == rep.cbits_total == 0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_hub_has_zero_locality_violations(n):
    net = build_network(n, star_matrix(n), sv.random_state(n, n))
    rep = tp.hub_execute(net, sv.haar_random_unitary(2 ** n, n), rng=np.random.default_rng(n))
    assert rep.locality_violations == 0
    gates = [ev for ev in net.trace if ev.kind in ("gate", "measure")]
    assert gates and all(len(set(ev.owners)) == 1 for ev in gates)
    (u_event,) = [ev for ev in net.trace if ev.detail == "U"]
    assert set(u_event.owners) == {1}


def test_hub_requires_fresh_star():
    u = np.eye(8)
    with pytest.raises(InputError):
        tp.hub_execute(build_network(3, np.full((3, 3), 2) - 2 * np.eye(3)), u, outcomes=["00"] * 4)
    net = build_network(3, star_matrix(3))
    net.send(1, 2, "0")
    with pytest.raises(InputError):
        tp.hub_execute(net, u, outcomes=["00"] * 4)


def test_hub_rejects_bad_unitaries_and_branch_lists():
    with pytest.raises(InputError):
        tp.run_hub(3, np.eye(4), outcomes=["00"] * 4)
    with pytest.raises(InputError):
        tp.run_hub(3, np.eye(8), outcomes=["00"] * 3)
    with pytest.raises(InputError):
        tp.run_hub(3, np.eye(8))


def test_sampled_hub_is_deterministic():
    u, psi = sv.haar_random_unitary(16, 4), sv.random_state(4, 4)
    a = tp.run_hub(4, u, psi, rng=np.random.default_rng(11))
    b = tp.run_hub(4, u, psi, rng=np.random.default_rng(11))
    assert a.to_dict() == b.to_dict()


def test_branch_sequences():
    assert len(list(tp.branch_sequences(2))) == 16
    seqs3 = list(tp.branch_sequences(3))
    assert len(seqs3) == 256 == len(set(seqs3))
    seqs4 = list(tp.branch_sequences(4, seed=3))
    assert len(seqs4) == 256 and all(len(s) == 6 for s in seqs4)
    assert seqs4 == list(tp.branch_sequences(4, seed=3))


@pytest.mark.parametrize("n", [2, 3])
def test_branch_tree_equals_fresh_runs(n):
    u, psi = sv.haar_random_unitary(2 ** n, 5), sv.random_state(n, 6)
    tree = tp.run_hub_branches(n, u, psi)
    fresh = [tp.run_hub(n, u, psi, outcomes=b) for b in tp.branch_sequences(n)]
    assert [r.branch for r in tree] == [r.branch for r in fresh]
    for a, b in zip(tree, fresh):
        assert a.to_dict() == b.to_dict()


def test_exhaustive_enumeration_refused_above_three():
    with pytest.raises(InputError):
        tp.run_hub_branches(4, np.eye(16))


def test_report_invariants():
    rep = tp.run_hub(3, sv.haar_random_unitary(8, 1), rng=np.random.default_rng(0))
    assert rep.ebits_total == sum(r.ebits_used for r in rep.records)
    assert rep.cbits_total == sum(r.cbits_used for r in rep.records)
    assert all((r.ebits_used, r.cbits_used) == (1, 2) for r in rep.records)
    assert [r.destination for r in rep.records] == [1, 1, 2, 3]
    assert rep.monotonicity_audit.passed and rep.monotonicity_audit.ensemble_passed
