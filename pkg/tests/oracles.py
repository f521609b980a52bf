"""Independent reference implementations used only to check the package.

These deliberately avoid the package's computational kernels: circuits are
evaluated by building explicit 2^n x 2^n gate matrices and multiplying them
into the state, and contraction costs are minimized by exhaustive search over
set partitions.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from rcsbench.gates import fsim_matrix, sq_matrix


def dense_single(n: int, qubit: int, u: np.ndarray) -> np.ndarray:
    """Full-space matrix for a 2x2 gate; qubit 0 is the most significant."""
    left = np.eye(1 << qubit)
    right = np.eye(1 << (n - qubit - 1))
    return np.kron(np.kron(left, u), right)


def dense_two(n: int, q1: int, q2: int, u: np.ndarray) -> np.ndarray:
    """Full-space matrix for a 4x4 gate on (q1, q2); q1 is the high gate bit."""
    d = 1 << n
    full = np.zeros((d, d), dtype=complex)
    rest_mask = ~((1 << (n - 1 - q1)) | (1 << (n - 1 - q2)))
    for base in range(d):
        if base & ~rest_mask:
            continue
        for c1, c2 in itertools.product((0, 1), repeat=2):
            col = base | (c1 << (n - 1 - q1)) | (c2 << (n - 1 - q2))
            for b1, b2 in itertools.product((0, 1), repeat=2):
                row = base | (b1 << (n - 1 - q1)) | (b2 << (n - 1 - q2))
                full[row, col] = u[(b1 << 1) | b2, (c1 << 1) | c2]
    return full


def dense_run(circuit) -> np.ndarray:
    """Final state via explicit full-matrix products."""
    n = circuit.n_qubits
    pos = {q: i for i, q in enumerate(circuit.qubits)}
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    for cyc in circuit.cycles:
        for i, g in enumerate(cyc.single):
            state = dense_single(n, i, sq_matrix(g)) @ state
        for a, b, p in cyc.two_qubit:
            state = dense_two(n, pos[a], pos[b], fsim_matrix(p)) @ state
    return state


def exhaustive_min_cost(tn) -> float:
    """Minimum contraction cost by depth-first search over set partitions,
    memoized on the frozenset of remaining tensor groups."""
    dims = tn.indices
    open_set = frozenset(tn.open_indices)
    leaves = [frozenset(idx) for _, idx in tn.tensors]
    n = len(leaves)

    def indices_of(group: frozenset[int]) -> frozenset[str]:
        inside = set()
        for i in group:
            inside |= leaves[i]
        outside = set()
        for i in range(n):
            if i not in group:
                outside |= leaves[i]
        return frozenset(x for x in inside if x in outside or x in open_set)

    @lru_cache(maxsize=None)
    def indices_cached(group):
        return indices_of(group)

    def size(indices) -> float:
        out = 1.0
        for x in indices:
            out *= dims[x]
        return out

    memo: dict[frozenset, float] = {}

    def best(groups: frozenset) -> float:
        if len(groups) == 1:
            return 0.0
        if groups in memo:
            return memo[groups]
        groups_list = sorted(groups, key=sorted)
        out = np.inf
        for i in range(len(groups_list)):
            for j in range(i + 1, len(groups_list)):
                a, b = groups_list[i], groups_list[j]
                merged = a | b
                cost = size(indices_cached(a) | indices_cached(b))
                rest = (groups - {a, b}) | {merged}
                out = min(out, cost + best(frozenset(rest)))
        memo[groups] = out
        return out

    return best(frozenset(frozenset((i,)) for i in range(n)))


def matrix_chain_min_cost(chain_dims: list[int]) -> float:
    """Classic matrix-chain DP; cost of (p,q)x(q,r) is p*q*r."""
    n = len(chain_dims) - 1
    cost = [[0.0] * n for _ in range(n)]
    for span in range(1, n):
        for i in range(n - span):
            j = i + span
            cost[i][j] = min(
                cost[i][k] + cost[k + 1][j]
                + chain_dims[i] * chain_dims[k + 1] * chain_dims[j + 1]
                for k in range(i, j)
            )
    return cost[0][n - 1]
