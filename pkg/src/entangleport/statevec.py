"""
Dense pure-state simulation.

Qubit ordering is little-endian throughout: qubit ``k`` is bit ``k`` of the
integer basis label, so qubit 0 is the least significant bit.  Bitstrings are
written qubit-0-first, i.e. ``"10"`` on two qubits is label 1.

When a state is reshaped to a ``[2] * n`` tensor, numpy axis ``a`` holds
qubit ``n - 1 - a``.  The helpers below hide that flip.
"""
from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, MeasurementError, ProtocolError

ATOL = 1e-10
SPECTRAL_ATOL = 1e-9
EIG_CUTOFF = 1e-12
BRANCH_CUTOFF = 1e-12

_SQRT2_INV = 1 / np.sqrt(2)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
# control = first target (low bit), target = second target (high bit)
CNOT = np.array([[1, 0, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0]], dtype=complex)
BELL = np.array([1, 0, 0, 1], dtype=complex) * _SQRT2_INV


class StateVector:
    """Normalized pure state of ``num_qubits`` qubits.

    The amplitude array is copied on construction and made read-only, so a
    StateVector can be shared freely; every operation returns a new one.
    """

    __slots__ = ("_amps", "_n")

    def __init__(self, amplitudes, *, check: bool = True):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size == 0 or 1 << n != amps.size:
            raise InputError(f"amplitude count {amps.size} is not a power of 2")
        if check:
            norm = np.vdot(amps, amps).real
            if abs(norm - 1.0) > ATOL:
                raise InputError(f"state is not normalized (|psi|^2 = {norm!r})")
        amps.setflags(write=False)
        self._amps = amps
        self._n = n

    @property
    def num_qubits(self) -> int:
        return self._n

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def dim(self) -> int:
        return self._amps.size

    def tensor(self) -> np.ndarray:
        return self._amps.reshape([2] * self._n)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self._amps, self._amps).real))

    def __len__(self) -> int:
        return self._amps.size

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self._n})"


def _axis(n: int, q: int) -> int:
    return n - 1 - q


def _check_targets(n: int, targets: Sequence[int]) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise InputError(f"duplicate targets {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise InputError(f"qubit {t} out of range for {n} qubits")
    return targets


def _parse_bits(bits) -> list[int]:
    if isinstance(bits, str):
        if set(bits) - {"0", "1"}:
            raise InputError(f"bitstring {bits!r} must contain only 0 and 1")
        return [int(b) for b in bits]
    out = [int(b) for b in bits]
    if set(out) - {0, 1}:
        raise InputError(f"bits {bits!r} must be 0 or 1")
    return out


def bits_to_label(bits) -> int:
    """Integer label of a qubit-0-first bit sequence."""
    return sum(b << k for k, b in enumerate(_parse_bits(bits)))


def label_to_bits(label: int, num_qubits: int) -> str:
    return "".join(str((label >> k) & 1) for k in range(num_qubits))


def basis_state(num_qubits: int, bits) -> StateVector:
    """Computational basis state; ``bits`` is listed qubit-0-first."""
    parsed = _parse_bits(bits)
    if len(parsed) != num_qubits:
        raise InputError(f"got {len(parsed)} bits for {num_qubits} qubits")
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[bits_to_label(parsed)] = 1.0
    return StateVector(amps)


def product_state(qubit_states: Iterable) -> StateVector:
    """Tensor product of single-qubit states; the first entry becomes qubit 0."""
    amps = np.ones(1, dtype=complex)
    for s in qubit_states:
        v = np.asarray(s, dtype=complex).reshape(-1)
        if v.size != 2:
            raise InputError("each single-qubit state needs exactly 2 amplitudes")
        amps = np.kron(v, amps)
    return StateVector(amps)


def tensor(*states: StateVector) -> StateVector:
    """Join registers; the first argument keeps the lowest qubit indices."""
    amps = np.ones(1, dtype=complex)
    for s in states:
        amps = np.kron(s.amplitudes, amps)
    return StateVector(amps, check=False)


def random_state(num_qubits: int, seed) -> StateVector:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    rng = np.random.default_rng(seed)
    dim = 1 << num_qubits
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(v / np.linalg.norm(v))


def check_unitary(u, num_targets: int | None = None, atol: float = ATOL) -> np.ndarray:
    """Return ``u`` as a complex array after validating shape and unitarity."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InputError(f"unitary must be square, got shape {u.shape}")
    dim = u.shape[0]
    if dim == 0 or dim & (dim - 1):
        raise InputError(f"unitary dimension {dim} is not a power of 2")
    if num_targets is not None and dim != 1 << num_targets:
        raise InputError(f"unitary of dim {dim} cannot act on {num_targets} qubits")
    resid = np.max(np.abs(u.conj().T @ u - np.eye(dim)))
    if resid > atol:
        raise InputError(f"matrix is not unitary (max |U^dag U - 1| = {resid:.3e})")
    return u


def apply_unitary(state: StateVector, u, targets: Sequence[int]) -> StateVector:
    """Apply ``u`` to ``targets``; ``targets[0]`` is the low bit of u's index."""
    n = state.num_qubits
    targets = _check_targets(n, targets)
    m = len(targets)
    u = check_unitary(u, m)
    if m == 0:
        return StateVector(state.amplitudes * u[0, 0], check=False)
    in_axes = [_axis(n, t) for t in reversed(targets)]
    ut = u.reshape([2] * (2 * m))
    out = np.tensordot(ut, state.tensor(), axes=(list(range(m, 2 * m)), in_axes))
    out = np.moveaxis(out, list(range(m)), in_axes)
    return StateVector(out.reshape(-1), check=False)


def _grouped(state: StateVector, first: Sequence[int]) -> np.ndarray:
    """Matrix with rows indexed by ``first`` (little-endian) and columns by the rest."""
    n = state.num_qubits
    lead = [_axis(n, q) for q in reversed(first)]
    rest = [a for a in range(n) if a not in lead]
    return np.transpose(state.tensor(), lead + rest).reshape(1 << len(first), -1)


def outcome_probabilities(state: StateVector, targets: Sequence[int]) -> np.ndarray:
    """Born probabilities indexed by the little-endian label of ``targets``."""
    targets = _check_targets(state.num_qubits, targets)
    return np.sum(np.abs(_grouped(state, targets)) ** 2, axis=1)


def measure_computational(state: StateVector, targets: Sequence[int], *,
                          outcome=None, rng: np.random.Generator | None = None):
    """Projective Z-basis measurement of ``targets``.

    Exactly one of ``outcome`` (branch mode: force that result) and ``rng``
    (sampled mode) must be given.  Returns ``(bits, post_state, probability)``
    where ``bits`` lists one result per target in target order.  Measured
    qubits stay in the register, collapsed.
    """
    targets = _check_targets(state.num_qubits, targets)
    if (outcome is None) == (rng is None):
        raise InputError("pass exactly one of outcome= (branch) or rng= (sampled)")
    probs = outcome_probabilities(state, targets)
    if outcome is None:
        label = int(np.searchsorted(np.cumsum(probs), rng.random() * probs.sum(), side="right"))
        label = min(label, probs.size - 1)
    else:
        bits = _parse_bits(outcome)
        if len(bits) != len(targets):
            raise InputError(f"outcome {outcome!r} does not match {len(targets)} targets")
        label = bits_to_label(bits)
    p = float(probs[label])
    if p <= BRANCH_CUTOFF:
        raise MeasurementError(f"outcome {label_to_bits(label, len(targets))} has probability {p:.3e}")

    n = state.num_qubits
    t = np.array(state.tensor())
    mask = np.zeros([2] * n, dtype=bool)
    idx = [slice(None)] * n
    for k, q in enumerate(targets):
        idx[_axis(n, q)] = (label >> k) & 1
    mask[tuple(idx)] = True
    t[~mask] = 0.0
    post = StateVector(t.reshape(-1) / np.sqrt(p), check=False)
    return label_to_bits(label, len(targets)), post, p


def branch_outcomes(num_targets: int) -> list[str]:
    """All outcome bitstrings for ``num_targets`` measured qubits."""
    return ["".join(b) for b in itertools.product("01", repeat=num_targets)]


def discard_qubits(state: StateVector, targets: Sequence[int], atol: float = ATOL) -> StateVector:
    """Remove qubits that sit in a computational basis state, re-indexing downward.

    Raises ProtocolError if any target is still in superposition or correlated
    with the rest of the register.
    """
    n = state.num_qubits
    targets = _check_targets(n, targets)
    t = state.tensor()
    picks = {}
    for q in targets:
        rho = reduced_density(state, [q])
        if abs(rho[0, 1]) > atol or min(rho[0, 0].real, rho[1, 1].real) > atol:
            raise ProtocolError(f"qubit {q} is not in a computational product state")
        picks[_axis(n, q)] = int(rho[1, 1].real > 0.5)
    idx = tuple(picks.get(a, slice(None)) for a in range(n))
    rest = np.array(t[idx]).reshape(-1)
    return StateVector(rest / np.linalg.norm(rest), check=False)


def permute_qubits(state: StateVector, order: Sequence[int]) -> StateVector:
    """New state whose qubit ``k`` is old qubit ``order[k]``."""
    n = state.num_qubits
    order = _check_targets(n, order)
    if len(order) != n:
        raise InputError("order must list every qubit exactly once")
    axes = [_axis(n, order[_axis(n, a)]) for a in range(n)]
    return StateVector(np.transpose(state.tensor(), axes).reshape(-1), check=False)


def reduced_density(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    """Partial trace onto ``keep``; ``keep[0]`` is the low bit of the result."""
    keep = _check_targets(state.num_qubits, keep)
    a = _grouped(state, keep)
    return a @ a.conj().T


def von_neumann_entropy(rho) -> float:
    """Base-2 entropy; eigenvalues below the cutoff contribute nothing."""
    vals = np.clip(np.linalg.eigvalsh(np.asarray(rho)), 0.0, None)
    return _shannon(vals)


def _shannon(p: np.ndarray) -> float:
    p = p[p > EIG_CUTOFF]
    h = float(-np.sum(p * np.log2(p)))
    # rounding noise from a spectrum like (1 - eps, eps)
    return h if h > EIG_CUTOFF else 0.0


def entanglement_entropy(state: StateVector, cut: Iterable[int]) -> float:
    """Ebits shared between ``cut`` and its complement (pure-state cut entropy).

    Uses the Schmidt coefficients of the bipartition, whose squares are the
    eigenvalues of the reduced density matrix on ``cut``.
    """
    cut = sorted(set(_check_targets(state.num_qubits, list(cut))))
    if not cut or len(cut) == state.num_qubits:
        return 0.0
    s = np.linalg.svd(_grouped(state, cut), compute_uv=False)
    return _shannon(s ** 2)


def fidelity_up_to_phase(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|``, insensitive to global phase."""
    if a.num_qubits != b.num_qubits:
        raise InputError(f"cannot compare {a.num_qubits}- and {b.num_qubits}-qubit states")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes))))


def haar_random_unitary(dim: int, seed) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix.

    The phases of R's diagonal are folded back into Q so that the result is
    distributed uniformly rather than biased by the QR sign convention.
    """
    if dim < 1:
        raise InputError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) * _SQRT2_INV
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
