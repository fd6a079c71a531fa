"""Brute-force reference computations.

Everything here works label-by-label on plain Python loops so that it shares
no code path with the tensor-reshaping routines under test.
"""
import itertools
import math

import numpy as np


def bit(x, k):
    return (x >> k) & 1


def full_operator(u, targets, n):
    """2^n x 2^n matrix of ``u`` acting on ``targets`` (targets[0] = low bit of u)."""
    dim = 2 ** n
    op = np.zeros((dim, dim), dtype=complex)
    m = len(targets)
    for x in range(dim):
        xs = sum(bit(x, t) << k for k, t in enumerate(targets))
        base = x
        for t in targets:
            base &= ~(1 << t)
        for ys in range(2 ** m):
            y = base
            for k, t in enumerate(targets):
                y |= bit(ys, k) << t
            op[y, x] += u[ys, xs]
    return op


def partial_trace(amps, keep, n):
    """Reduced density matrix on ``keep`` by explicit summation over the rest."""
    amps = np.asarray(amps)
    rest = [q for q in range(n) if q not in keep]
    k = len(keep)
    rho = np.zeros((2 ** k, 2 ** k), dtype=complex)
    for r in range(2 ** len(rest)):
        rbits = sum(bit(r, i) << q for i, q in enumerate(rest))
        for a in range(2 ** k):
            xa = rbits | sum(bit(a, i) << q for i, q in enumerate(keep))
            for b in range(2 ** k):
                xb = rbits | sum(bit(b, i) << q for i, q in enumerate(keep))
                rho[a, b] += amps[xa] * np.conj(amps[xb])
    return rho


def entropy_bits(rho):
    vals = np.linalg.eigvalsh(rho)
    return float(sum(-v * math.log2(v) for v in vals if v > 1e-12))


def swap_bits_permutation(n, pairs):
    """Permutation matrix exchanging the bits in each (i, j) qubit pair."""
    dim = 2 ** n
    p = np.zeros((dim, dim))
    for x in range(dim):
        y = x
        for i, j in pairs:
            bi, bj = bit(x, i), bit(x, j)
            y &= ~((1 << i) | (1 << j))
            y |= (bj << i) | (bi << j)
        p[y, x] = 1
    return p


def symmetrize_loops(m):
    """Sum over permutations P of m[P(i)][P(j)], one entry at a time."""
    n = len(m)
    out = [[0.0] * n for _ in range(n)]
    for perm in itertools.permutations(range(n)):
        for i in range(n):
            for j in range(n):
                out[i][j] += m[perm[i]][perm[j]]
    return np.array(out)


def random_resource_matrix(rng, n, integer=False):
    a = rng.integers(0, 4, size=(n, n)).astype(float) if integer else rng.random((n, n)) * 3
    m = a + a.T
    np.fill_diagonal(m, 0)
    return m
