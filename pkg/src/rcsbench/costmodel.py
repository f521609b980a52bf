"""Classical-cost estimation: tensor-network contraction paths with slicing,
sampling-cost extrapolation, and split-simulation (Schroedinger-Feynman
style) cut analysis with operator-Schmidt truncation.

Cost convention: merging two tensors costs the product of the dimensions of
the union of their indices, counting one complex multiply-add as one
operation.  An index is summed out of a merge result when no other tensor
carries it and it is not open.  Slicing fixes index values to bound the
largest intermediate tensor, multiplying the work by the slice count.
"""
from __future__ import annotations

import heapq
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, replace

import numpy as np

from . import rng
from .circuit import Circuit, _normalize_bipartition
from .errors import InputError, ResourceLimitError
from .gates import FsimParams, fsim_matrix

YEAR_SECONDS = 365.25 * 86400.0

# Throughput anchor (contraction FLOPs, wall seconds) for one perfect sample
# on the Summit supercomputer; used by runtime extrapolation.
SUMMIT_REFERENCE = (6.66e18, 833.75)

# Core count of the Fugaku supercomputer, the default split-simulation
# reference machine.
FUGAKU_CORES = 7_630_848

_ZERO_WEIGHT = 1e-12


@dataclass(frozen=True)
class TensorNetwork:
    """Structural tensor network: ids, index lists, index dimensions.

    Every index must appear on exactly two tensors (contracted) or on exactly
    one tensor and in ``open_indices`` (open).
    """

    tensors: tuple[tuple[str, tuple[str, ...]], ...]
    indices: dict[str, int]
    open_indices: tuple[str, ...]

    def validate(self) -> None:
        occ = Counter()
        for _, idx in self.tensors:
            if len(set(idx)) != len(idx):
                raise InputError("tensor repeats an index")
            occ.update(idx)
        open_set = set(self.open_indices)
        if len(open_set) != len(self.open_indices):
            raise InputError("duplicate open index")
        for name in occ:
            if name not in self.indices:
                raise InputError(f"index {name} has no dimension")
        for name, count in occ.items():
            expected = 1 if name in open_set else 2
            if count != expected:
                raise InputError(
                    f"index {name} appears on {count} tensors, expected {expected}")
        for name in open_set:
            if occ[name] != 1:
                raise InputError(f"open index {name} missing from the network")


@dataclass(frozen=True)
class ContractionPath:
    """Ordered pairwise merges in the evolving-list convention: (i, j) are
    positions in the current tensor list; both are removed and the result is
    appended."""

    merges: tuple[tuple[int, int], ...]
    step_costs: tuple[float, ...]
    total_flops: float
    largest_intermediate_rank: int


@dataclass(frozen=True)
class SliceResult:
    sliced_indices: tuple[str, ...]
    n_slices: int
    total_flops: float          # slice count times the per-slice path cost
    per_slice_flops: float
    largest_intermediate_rank: int


@dataclass(frozen=True)
class CutAnalysis:
    """Cross-cut gate census for a split simulation of the circuit."""

    bipartition: tuple[int, ...]
    g: int                                   # cross-cut two-qubit gate count
    spectra: tuple[tuple[float, float, float, float], ...]
    delta_theta: tuple[float, ...]           # |theta - pi/2| per cross gate
    path_count: float                        # product of retained ranks
    fidelity_budget: float = 0.0


@dataclass(frozen=True)
class CostReport:
    flops_per_sample: float
    n_samples: float
    fidelity: float
    total_flops: float
    reference: tuple[float, float]
    runtime_seconds: float
    runtime_years: float


def circuit_to_tn(circuit: Circuit, open_qubits=()) -> TensorNetwork:
    """Structural network of a circuit: one rank-1 tensor per initial |0>,
    one rank-2/rank-4 tensor per gate, a rank-1 projector on every closed
    output, and one open index per open qubit."""
    open_set = {int(q) for q in open_qubits}
    unknown = open_set - set(circuit.qubits)
    if unknown:
        raise InputError(f"open qubits not in the circuit: {sorted(unknown)}")

    wire = {q: 0 for q in circuit.qubits}
    dims: dict[str, int] = {}

    def fresh(q: int) -> str:
        name = f"q{q}.{wire[q]}"
        wire[q] += 1
        dims[name] = 2
        return name

    def current(q: int) -> str:
        return f"q{q}.{wire[q] - 1}"

    tensors: list[tuple[str, tuple[str, ...]]] = []
    for q in circuit.qubits:
        tensors.append((f"in:{q}", (fresh(q),)))
    gate_no = 0
    for cyc in circuit.cycles:
        for q in circuit.qubits:
            prev = current(q)
            tensors.append((f"g{gate_no}", (prev, fresh(q))))
            gate_no += 1
        for a, b, _ in cyc.two_qubit:
            pa, pb = current(a), current(b)
            tensors.append((f"g{gate_no}", (pa, pb, fresh(a), fresh(b))))
            gate_no += 1
    open_indices = []
    for q in circuit.qubits:
        if q in open_set:
            open_indices.append(current(q))
        else:
            tensors.append((f"out:{q}", (current(q),)))
    tn = TensorNetwork(tuple(tensors), dims, tuple(open_indices))
    tn.validate()
    return tn


def _size(indices, dims) -> float:
    out = 1.0
    for name in indices:
        out *= dims[name]
    return out


def replay_path(
    tn: TensorNetwork,
    merges: tuple[tuple[int, int], ...],
    sliced: frozenset[str] = frozenset(),
):
    """Execute a path structurally.  Returns (step costs, total cost,
    largest result rank, per-step result index sets, final index set)."""
    dims = tn.indices
    cur = [frozenset(idx) - sliced for _, idx in tn.tensors]
    occ = Counter()
    for fs in cur:
        occ.update(fs)
    open_set = frozenset(tn.open_indices) - sliced
    for name in open_set:
        occ[name] += 1  # phantom occurrence: open indices are never dropped

    costs: list[float] = []
    results: list[frozenset[str]] = []
    largest = 0
    for i, j in merges:
        if not (0 <= i < j < len(cur)):
            raise InputError(f"bad merge positions ({i}, {j})")
        a, b = cur[i], cur[j]
        union = a | b
        costs.append(_size(union, dims))
        for name in a:
            occ[name] -= 1
        for name in b:
            occ[name] -= 1
        keep = frozenset(name for name in union if occ[name] >= 1)
        for name in keep:
            occ[name] += 1
        del cur[j]
        del cur[i]
        cur.append(keep)
        results.append(keep)
        largest = max(largest, len(keep))
    if len(cur) != 1:
        raise InputError(f"path leaves {len(cur)} tensors, expected 1")
    return costs, float(sum(costs)), largest, results, cur[0]


def _positions_from_id_merges(n_leaves: int, id_merges, id_of_leaf) -> list[tuple[int, int]]:
    """Convert merges over node ids into evolving-list positions."""
    order = [id_of_leaf(k) for k in range(n_leaves)]
    out = []
    for a, b, m in id_merges:
        ia, ib = order.index(a), order.index(b)
        if ia > ib:
            ia, ib = ib, ia
        out.append((ia, ib))
        del order[ib]
        del order[ia]
        order.append(m)
    return out


def find_path_greedy_full(
    tn: TensorNetwork, seed: int = 0, restarts: int = 64, top_k: int = 4
) -> tuple[ContractionPath, tuple[float, ...]]:
    """Randomized-greedy path search; returns the best path plus every
    restart's total cost (for cost-distribution reporting).

    The greedy score of a merge is the size growth of the result; restart 0
    always takes the best-scoring merge, later restarts pick uniformly among
    the ``top_k`` best candidates.  Disconnected components are contracted
    independently and joined by outer products at the end.  Deterministic per
    (seed, restarts): ties and the final winner resolve by (cost, restart).
    """
    tn.validate()
    if restarts < 1:
        raise InputError("need at least one restart")
    best: tuple[float, int, list] | None = None
    totals = []
    for r in range(restarts):
        gen = rng.stream(seed, rng.Stream.PATH_SEARCH, index=r) if r else None
        id_merges = _greedy_once(tn, gen, top_k)
        merges = _positions_from_id_merges(len(tn.tensors), id_merges, lambda k: k)
        _, total, _, _, _ = replay_path(tn, tuple(merges))
        totals.append(total)
        if best is None or (total, r) < (best[0], best[1]):
            best = (total, r, merges)
    merges = tuple(best[2])
    costs, total, largest, _, _ = replay_path(tn, merges)
    return ContractionPath(merges, tuple(costs), total, largest), tuple(totals)


def find_path_greedy(
    tn: TensorNetwork, seed: int = 0, restarts: int = 64, top_k: int = 4
) -> ContractionPath:
    """Best randomized-greedy contraction path; see find_path_greedy_full."""
    return find_path_greedy_full(tn, seed, restarts, top_k)[0]


def _greedy_once(tn: TensorNetwork, gen, top_k: int) -> list[tuple[int, int, int]]:
    dims = tn.indices
    open_set = frozenset(tn.open_indices)
    nodes: dict[int, frozenset[str]] = {
        i: frozenset(idx) for i, (_, idx) in enumerate(tn.tensors)
    }
    occ = Counter()
    for fs in nodes.values():
        occ.update(fs)
    for name in open_set:
        occ[name] += 1
    holders: dict[str, set[int]] = defaultdict(set)
    for i, fs in nodes.items():
        for name in fs:
            holders[name].add(i)

    def result_of(a: int, b: int) -> frozenset[str]:
        union = nodes[a] | nodes[b]
        shared = nodes[a] & nodes[b]
        return frozenset(
            name for name in union
            if occ[name] - (2 if name in shared else 1) >= 1
        )

    def score(a: int, b: int) -> float:
        return _size(result_of(a, b), dims) - _size(nodes[a], dims) - _size(nodes[b], dims)

    heap: list[tuple[float, int, int]] = []
    seen_pairs: set[tuple[int, int]] = set()

    def push_pairs_of(i: int) -> None:
        neighbors = set()
        for name in nodes[i]:
            neighbors |= holders[name]
        neighbors.discard(i)
        for j in neighbors:
            pair = (min(i, j), max(i, j))
            if pair not in seen_pairs:
                seen_pairs.add(pair)
                heapq.heappush(heap, (score(*pair), pair[0], pair[1]))

    for i in list(nodes):
        push_pairs_of(i)

    next_id = len(nodes)
    id_merges: list[tuple[int, int, int]] = []

    def merge(a: int, b: int) -> None:
        nonlocal next_id
        keep = result_of(a, b)
        for node in (a, b):
            for name in nodes[node]:
                occ[name] -= 1
                holders[name].discard(node)
            del nodes[node]
        for name in keep:
            occ[name] += 1
            holders[name].add(next_id)
        nodes[next_id] = keep
        id_merges.append((a, b, next_id))
        push_pairs_of(next_id)
        next_id += 1

    while len(nodes) > 1:
        popped = []
        while heap and len(popped) < max(1, top_k if gen is not None else 1):
            entry = heapq.heappop(heap)
            if entry[1] in nodes and entry[2] in nodes:
                popped.append(entry)
        if popped:
            choice = popped[0] if gen is None else popped[int(gen.integers(0, len(popped)))]
            for entry in popped:
                if entry is not choice:
                    heapq.heappush(heap, entry)
            merge(choice[1], choice[2])
        else:
            # disconnected components: join the two smallest by outer product
            a, b = sorted(nodes, key=lambda i: (_size(nodes[i], dims), i))[:2]
            merge(min(a, b), max(a, b))
    return id_merges


def find_path_optimal(tn: TensorNetwork, max_tensors: int = 12) -> ContractionPath:
    """Exhaustive minimum-cost contraction tree by dynamic programming over
    tensor subsets (same cost convention as the greedy search)."""
    tn.validate()
    n = len(tn.tensors)
    if n > max_tensors:
        raise ResourceLimitError(
            f"optimal search limited to {max_tensors} tensors, got {n}")
    dims = tn.indices
    open_set = frozenset(tn.open_indices)
    leaf = [frozenset(idx) for _, idx in tn.tensors]
    idx_mask: dict[str, int] = defaultdict(int)
    for i, fs in enumerate(leaf):
        for name in fs:
            idx_mask[name] |= 1 << i
    full = (1 << n) - 1

    def indices_of(mask: int) -> frozenset[str]:
        out = []
        for name, m in idx_mask.items():
            if m & mask and (m & ~mask & full or name in open_set):
                out.append(name)
        return frozenset(out)

    idx_cache: dict[int, frozenset[str]] = {}

    def cached_indices(mask: int) -> frozenset[str]:
        fs = idx_cache.get(mask)
        if fs is None:
            fs = idx_cache[mask] = indices_of(mask)
        return fs

    best: dict[int, float] = {1 << i: 0.0 for i in range(n)}
    split: dict[int, int] = {}
    masks_by_size: list[list[int]] = [[] for _ in range(n + 1)]
    for mask in range(1, full + 1):
        masks_by_size[bin(mask).count("1")].append(mask)
    for size in range(2, n + 1):
        for mask in masks_by_size[size]:
            lowest = mask & -mask
            best_cost, best_sub = math.inf, 0
            sub = (mask - 1) & mask
            while sub:
                if sub & lowest:  # canonical halving: keep the lowest bit left
                    other = mask ^ sub
                    cost = (
                        best[sub]
                        + best[other]
                        + _size(cached_indices(sub) | cached_indices(other), dims)
                    )
                    if cost < best_cost:
                        best_cost, best_sub = cost, sub
                sub = (sub - 1) & mask
            best[mask] = best_cost
            split[mask] = best_sub

    id_merges: list[tuple[int, int, int]] = []
    next_id = n
    node_of_mask: dict[int, int] = {1 << i: i for i in range(n)}

    def build(mask: int) -> int:
        nonlocal next_id
        if mask in node_of_mask:
            return node_of_mask[mask]
        a = build(split[mask])
        b = build(mask ^ split[mask])
        id_merges.append((a, b, next_id))
        node_of_mask[mask] = next_id
        next_id += 1
        return node_of_mask[mask]

    build(full)
    merges = tuple(_positions_from_id_merges(n, id_merges, lambda k: k))
    costs, total, largest, _, _ = replay_path(tn, merges)
    return ContractionPath(merges, tuple(costs), total, largest)


def slice_network(
    tn: TensorNetwork, path: ContractionPath, max_intermediate_rank: int
) -> SliceResult:
    """Greedily fix indices until every intermediate along the path has rank
    at most ``max_intermediate_rank``.  Open indices are never sliced; the
    cap is unreachable if the open indices alone exceed it."""
    if len(tn.open_indices) > max_intermediate_rank:
        raise InputError(
            f"cap {max_intermediate_rank} is below the open-index count "
            f"{len(tn.open_indices)}")
    open_set = frozenset(tn.open_indices)
    sliced: set[str] = set()
    while True:
        costs, total, largest, results, _ = replay_path(
            tn, path.merges, frozenset(sliced))
        if largest <= max_intermediate_rank:
            break
        over = [fs for fs in results if len(fs) > max_intermediate_rank]
        votes = Counter()
        for fs in over:
            for name in fs:
                if name not in open_set and name not in sliced:
                    votes[name] += 1
        if not votes:
            raise InputError("no sliceable index left; cap unreachable")
        name = min(votes, key=lambda k: (-votes[k], k))
        sliced.add(name)
    n_slices = 1
    for name in sliced:
        n_slices *= tn.indices[name]
    return SliceResult(
        sliced_indices=tuple(sorted(sliced)),
        n_slices=n_slices,
        total_flops=float(n_slices) * total,
        per_slice_flops=total,
        largest_intermediate_rank=largest,
    )


def estimate_sampling_cost(
    flops_per_sample: float,
    n_samples: float,
    fidelity: float,
    reference: tuple[float, float] = SUMMIT_REFERENCE,
) -> CostReport:
    """Fidelity-weighted total cost and runtime extrapolation.

    total = flops_per_sample * n_samples * fidelity (the perfect-sample
    equivalent count); runtime scales the reference machine's seconds by
    total / reference flops.
    """
    if flops_per_sample < 0 or n_samples < 0 or not 0 <= fidelity <= 1:
        raise InputError("cost inputs must be nonnegative, fidelity in [0, 1]")
    flops_ref, seconds_ref = reference
    if flops_ref <= 0 or seconds_ref <= 0:
        raise InputError("reference throughput must be positive")
    total = flops_per_sample * n_samples * fidelity
    seconds = total / flops_ref * seconds_ref
    return CostReport(
        flops_per_sample=flops_per_sample,
        n_samples=n_samples,
        fidelity=fidelity,
        total_flops=total,
        reference=reference,
        runtime_seconds=seconds,
        runtime_years=seconds / YEAR_SECONDS,
    )


def schmidt_values(u: np.ndarray) -> np.ndarray:
    """Operator-Schmidt values of a two-qubit unitary: singular values of the
    reshuffled matrix M[(i,i'),(j,j')] = U[(i,j),(i',j')].  Their squares sum
    to 4 (the squared Frobenius norm)."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise InputError(f"expected a 4x4 matrix, got {u.shape}")
    if np.max(np.abs(u @ u.conj().T - np.eye(4))) > 1e-10:
        raise InputError("matrix is not unitary to 1e-10")
    reshuffled = u.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    return np.linalg.svd(reshuffled, compute_uv=False)


def sfa_cut(circuit: Circuit, bipartition, fidelity_budget: float = 0.0) -> CutAnalysis:
    """Census of the two-qubit gates crossing a bipartition: count g, swap
    angle deviation |theta - pi/2|, and operator-Schmidt spectrum per gate."""
    side = _normalize_bipartition(circuit, bipartition)
    spectra_cache: dict[FsimParams, tuple[float, ...]] = {}
    spectra: list[tuple[float, float, float, float]] = []
    deviations: list[float] = []
    for cyc in circuit.cycles:
        for a, b, p in cyc.two_qubit:
            if (a in side) == (b in side):
                continue
            s = spectra_cache.get(p)
            if s is None:
                s = spectra_cache[p] = tuple(float(v) for v in schmidt_values(fsim_matrix(p)))
            spectra.append(s)
            deviations.append(abs(p.theta - np.pi / 2))
    path_count = 1.0
    for s in spectra:
        path_count *= sum(1 for v in s if v * v / 4.0 > _ZERO_WEIGHT)
    return CutAnalysis(
        bipartition=tuple(sorted(side)),
        g=len(spectra),
        spectra=tuple(spectra),
        delta_theta=tuple(deviations),
        path_count=path_count,
        fidelity_budget=fidelity_budget,
    )


def sfa_speedup(cut: CutAnalysis, fidelity_budget: float | None = None) -> float:
    """Speedup over the balanced 4^g path count from truncating low-weight
    Schmidt terms.

    Per gate, the normalized squared Schmidt weights sum to one; terms are
    retained by descending weight.  Truncation drops the globally smallest
    retained weights while the product of per-gate retained fractions stays
    at least 1 - budget (zero-weight terms are free).  The speedup is
    4^g divided by the product of retained ranks, so balanced gates give 1 at
    zero budget and the factor is nondecreasing in the budget.
    """
    budget = cut.fidelity_budget if fidelity_budget is None else fidelity_budget
    if not 0.0 <= budget <= 1.0:
        raise InputError(f"fidelity budget {budget} outside [0, 1]")
    weights = [sorted((v * v / 4.0 for v in s), reverse=True) for s in cut.spectra]
    ranks = []
    fractions = []
    for w in weights:
        rank = max(1, sum(1 for v in w if v > _ZERO_WEIGHT))
        ranks.append(rank)
        fractions.append(sum(w[:rank]))
    floor = 1.0 - budget
    product = float(np.prod(fractions)) if fractions else 1.0
    while True:
        candidates = [
            (weights[i][ranks[i] - 1], i) for i in range(len(weights)) if ranks[i] > 1
        ]
        if not candidates:
            break
        w, i = min(candidates)
        new_fraction = fractions[i] - w
        new_product = product / fractions[i] * new_fraction if fractions[i] > 0 else 0.0
        if w > _ZERO_WEIGHT and new_product < floor - 1e-15:
            break
        ranks[i] -= 1
        fractions[i] = new_fraction
        product = new_product
    speedup = 4.0 ** cut.g
    for rank in ranks:
        speedup /= rank
    return float(speedup)
