"""
Resource entanglement matrices and the even-N lower bound.

Labs are numbered 1..N in the public API (CutSpec, DOT labels) and indexed
0..N-1 inside matrices.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterator

import numpy as np

from .errors import InputError, UnsupportedError

UNIFORM_ATOL = 1e-9
MAX_ENUMERATE = 10
_CHUNK = 20_000


@dataclass(frozen=True)
class ResourceMatrix:
    """Symmetric, nonnegative, zero-diagonal matrix of shared ebits."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim == 1 and m.size == 0:
            m = m.reshape(0, 0)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"resource matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InputError("resource matrix has non-finite entries")
        if np.any(m < 0):
            raise InputError("resource matrix has negative entries")
        if not np.array_equal(m, m.T):
            raise InputError("resource matrix is not symmetric")
        if np.any(np.diag(m) != 0):
            raise InputError("resource matrix has a nonzero diagonal")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, ij) -> float:
        """Weight between labs ``i`` and ``j`` (1-based)."""
        i, j = ij
        return float(self.entries[i - 1, j - 1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResourceMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Nonzero edges ``(i, j, weight)`` with ``i < j``, 1-based."""
        for i in range(self.n):
            for j in range(i + 1, self.n):
                w = self.entries[i, j]
                if w != 0:
                    yield i + 1, j + 1, float(w)

    def to_dict(self) -> dict:
        return {"n": self.n, "entries": self.entries.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ResourceMatrix":
        m = cls(np.array(d["entries"], dtype=float))
        if "n" in d and d["n"] != m.n:
            raise InputError(f"declared n={d['n']} but matrix is {m.n}x{m.n}")
        return m


@dataclass(frozen=True)
class CutSpec:
    """A bipartition of the labs ``1..N`` into two exhaustive, disjoint sides."""

    side_a: frozenset
    side_b: frozenset

    def __post_init__(self):
        a, b = frozenset(self.side_a), frozenset(self.side_b)
        if a & b:
            raise InputError(f"cut sides overlap on {sorted(a & b)}")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)

    @property
    def labs(self) -> frozenset:
        return self.side_a | self.side_b

    def validate(self, n: int) -> "CutSpec":
        if self.labs != frozenset(range(1, n + 1)):
            raise InputError(f"cut {self} does not cover labs 1..{n}")
        return self

    def swapped(self) -> "CutSpec":
        return CutSpec(self.side_b, self.side_a)

    @classmethod
    def of(cls, side_a, n: int) -> "CutSpec":
        a = frozenset(side_a)
        return cls(a, frozenset(range(1, n + 1)) - a).validate(n)

    @classmethod
    def even_odd(cls, n: int) -> "CutSpec":
        """Odd labs on side A, even labs on side B."""
        return cls.of(range(1, n + 1, 2), n)

    def __str__(self) -> str:
        return f"{sorted(self.side_a)}|{sorted(self.side_b)}"


def all_bipartitions(n: int) -> list[CutSpec]:
    """The ``2**(n-1) - 1`` nontrivial bipartitions; lab 1 is always on side A."""
    cuts = []
    others = list(range(2, n + 1))
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            side_a = {1, *extra}
            if len(side_a) < n:
                cuts.append(CutSpec.of(side_a, n))
    return cuts


def _as_matrix(m) -> ResourceMatrix:
    return m if isinstance(m, ResourceMatrix) else ResourceMatrix(m)


def total_entanglement(m) -> float:
    """Half the sum of all entries: every edge is counted once."""
    return 0.5 * float(np.sum(_as_matrix(m).entries))


def star_matrix(n: int) -> ResourceMatrix:
    """Two ebits between lab 1 and every other lab, nothing else."""
    if n < 1:
        raise InputError("N must be >= 1")
    idx = np.arange(n)
    delta = (idx == 0).astype(int)
    return ResourceMatrix(2 * np.abs(delta[:, None] - delta[None, :]))


def uniform_complete(n: int, weight: float) -> ResourceMatrix:
    return ResourceMatrix(weight * (np.ones((n, n)) - np.eye(n)))


def symmetrize_enumerate(m) -> ResourceMatrix:
    """Sum ``m[P(i), P(j)]`` over every permutation ``P`` of the vertices."""
    m = _as_matrix(m)
    n = m.n
    if n > MAX_ENUMERATE:
        raise InputError(f"explicit enumeration is limited to n <= {MAX_ENUMERATE}")
    e = m.entries
    acc = np.zeros((n, n))
    perms = itertools.permutations(range(n))
    while True:
        chunk = np.array(list(itertools.islice(perms, _CHUNK)), dtype=np.intp)
        if chunk.size == 0:
            break
        acc += e[chunk[:, :, None], chunk[:, None, :]].sum(axis=0)
    return ResourceMatrix(acc)


def symmetrize_closed(m) -> ResourceMatrix:
    """Closed form of the permutation sum: every edge gets ``2 (n-2)! E_R``."""
    m = _as_matrix(m)
    n = m.n
    if n < 2:
        return ResourceMatrix(np.zeros((n, n)))
    return uniform_complete(n, 2 * math.factorial(n - 2) * total_entanglement(m))


def symmetrize(m, method: str = "auto") -> ResourceMatrix:
    """Permutation-symmetrized resource matrix.

    ``method`` is ``"enumerate"``, ``"closed"`` or ``"auto"`` (enumeration up
    to n=7, closed form beyond).
    """
    m = _as_matrix(m)
    if method == "auto":
        method = "enumerate" if m.n <= 7 else "closed"
    if method == "enumerate":
        return symmetrize_enumerate(m)
    if method == "closed":
        return symmetrize_closed(m)
    raise InputError(f"unknown symmetrize method {method!r}")


def uniform_edge_weight(m, atol: float = UNIFORM_ATOL) -> float:
    """The common off-diagonal weight of a regular complete graph."""
    m = _as_matrix(m)
    if m.n < 2:
        raise InputError("a graph with fewer than 2 vertices has no edges")
    off = m.entries[~np.eye(m.n, dtype=bool)]
    if np.ptp(off) > atol:
        raise InputError(f"edge weights are not uniform (spread {np.ptp(off):.3e})")
    return float(off[0])


def cut_weight(m, cut: CutSpec) -> float:
    """Total weight of edges with one end on each side of ``cut``."""
    m = _as_matrix(m)
    cut.validate(m.n)
    a = [i - 1 for i in sorted(cut.side_a)]
    b = [j - 1 for j in sorted(cut.side_b)]
    if not a or not b:
        return 0.0
    return float(np.sum(m.entries[np.ix_(a, b)]))


@dataclass(frozen=True)
class BoundReport:
    """Outcome of the even/odd cut argument for one ``(N, E_R)``."""

    N: int
    E_R: object
    e: object
    cut_weight: object
    required: int
    implied_lower_bound: int
    satisfied: bool

    @property
    def tight(self) -> bool:
        return self.cut_weight == self.required

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "E_R": _number(self.E_R),
            "e": _number(self.e),
            "cut_weight": _number(self.cut_weight),
            "required": self.required,
            "implied_lower_bound": self.implied_lower_bound,
            "satisfied": self.satisfied,
            "tight": self.tight,
        }


def _number(x):
    """JSON-friendly number: exact integers stay integers."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return x


def verify_even_bound(N: int, E_R) -> BoundReport:
    """Check whether total resource entanglement ``E_R`` can drive the N!-fold PS operation.

    The symmetrized graph has edge weight ``e = 2 (N-2)! E_R``; the even/odd
    cut carries ``(N/2)^2 e`` ebits and must cover the ``N! N`` ebits the
    operation creates.  Rational inputs (int, Fraction) are handled exactly.
    """
    if isinstance(N, bool) or not isinstance(N, int) or N < 2:
        raise InputError(f"N must be an integer >= 2, got {N!r}")
    if N % 2:
        raise UnsupportedError("the cut argument is only established for even N")
    if isinstance(E_R, Rational):
        E_R = Fraction(E_R)
        slack = 0
    else:
        E_R = float(E_R)
        slack = 1e-9
    if E_R < 0:
        raise InputError("E_R must be nonnegative")
    e = 2 * math.factorial(N - 2) * E_R
    cw = (Fraction(N, 2) ** 2) * e if isinstance(e, Fraction) else (N / 2) ** 2 * e
    required = math.factorial(N) * N
    return BoundReport(
        N=N,
        E_R=E_R,
        e=e,
        cut_weight=cw,
        required=required,
        implied_lower_bound=2 * (N - 1),
        satisfied=bool(cw >= required - slack),
    )


def export_dot(m, name: str = "G") -> str:
    """Undirected weighted graph in DOT; zero-weight edges are left out."""
    m = _as_matrix(m)
    lines = [f"graph {name} {{"]
    lines += [f"  A{i};" for i in range(1, m.n + 1)]
    for i, j, w in m.edges():
        lines.append(f'  A{i} -- A{j} [label="{_fmt_weight(w)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _fmt_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else f"{w:.15g}"
