"""Exact state-vector simulation with ideal and noisy bitstring sampling.

Conventions: qubit 0 is the most significant bit of the state index, and the
sampled word equals that index.  For a two-qubit gate the first qubit argument
is the high bit of the 4x4 matrix basis.  Amplitudes are double-precision
complex; the qubit limit (default 30) guards against accidental huge
allocations.

Two noise models ship: a speckle mixture (each sample comes from the ideal
distribution with probability F, uniform otherwise) and Pauli-trajectory
injection (after each gate, an error with the per-gate probability inserts a
uniformly random non-identity Pauli on the touched qubits; one bitstring is
drawn per trajectory).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .circuit import Circuit
from .errors import InputError, ResourceLimitError
from .gates import FsimParams, fsim_matrix, sq_matrix
from .samples import SampleSet, pack_bits

DEFAULT_QUBIT_LIMIT = 30

# Checkpoint budget for trajectory replay (bytes of saved layer states).
_CHECKPOINT_BUDGET = 512 << 20

_PAULIS = (
    np.array([[0, 1], [1, 0]], dtype=complex),        # X
    np.array([[0, -1j], [1j, 0]], dtype=complex),     # Y
    np.array([[1, 0], [0, -1]], dtype=complex),       # Z
)


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate Pauli error rates and per-bit readout error rates."""

    e1: float = 0.0
    e2: float = 0.0
    e_r0: float = 0.0  # readout error given true 0
    e_r1: float = 0.0  # readout error given true 1

    def __post_init__(self) -> None:
        for name, v in (("e1", self.e1), ("e2", self.e2),
                        ("e_r0", self.e_r0), ("e_r1", self.e_r1)):
            if not 0.0 <= v <= 1.0:
                raise InputError(f"noise rate {name}={v} outside [0, 1]")


def reference_noise() -> NoiseModel:
    """Average simultaneous error rates of the shipped 60-qubit configuration."""
    return NoiseModel(e1=0.0016, e2=0.0060, e_r0=0.0148, e_r1=0.0303)


def zero_state(n_qubits: int, dtype=np.complex128) -> StateVector:
    amps = np.zeros(1 << n_qubits, dtype=dtype)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.n_qubits:
        raise InputError(f"qubit {qubit} out of range for n={state.n_qubits}")


def _apply_1q(amps: np.ndarray, n: int, qubit: int, u: np.ndarray) -> None:
    view = amps.reshape(1 << qubit, 2, -1)
    view[...] = np.einsum("ij,ajc->aic", u, view)


def _apply_2q(amps: np.ndarray, n: int, q1: int, q2: int, u: np.ndarray) -> None:
    p, q = (q1, q2) if q1 < q2 else (q2, q1)
    view = amps.reshape(1 << p, 2, 1 << (q - p - 1), 2, -1)
    if q1 > q2:  # gate basis has q1 as the high bit; swap to axis order
        u = u.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
    blocks = [view[:, b >> 1, :, b & 1, :].copy() for b in range(4)]
    for b in range(4):
        view[:, b >> 1, :, b & 1, :] = (
            u[b, 0] * blocks[0] + u[b, 1] * blocks[1]
            + u[b, 2] * blocks[2] + u[b, 3] * blocks[3]
        )


def apply_single(state: StateVector, qubit: int, u: np.ndarray) -> StateVector:
    """Apply a 2x2 unitary in place on the given qubit."""
    _check_qubit(state, qubit)
    _apply_1q(state.amplitudes, state.n_qubits, qubit, np.asarray(u, dtype=complex))
    return state


def apply_two(state: StateVector, qubits: tuple[int, int], u: np.ndarray) -> StateVector:
    """Apply a 4x4 unitary in place; the first qubit is the high basis bit."""
    q1, q2 = qubits
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise InputError(f"two-qubit gate needs distinct qubits, got ({q1}, {q2})")
    _apply_2q(state.amplitudes, state.n_qubits, q1, q2, np.asarray(u, dtype=complex))
    return state


def _op_list(circuit: Circuit, dtype=np.complex128):
    """Flat gate sequence [(positions, matrix, is_two_qubit)], plus the op
    index reached at the end of each layer."""
    pos = {q: i for i, q in enumerate(circuit.qubits)}
    fsim_cache: dict[FsimParams, np.ndarray] = {}
    ops = []
    layer_ends = []
    for cyc in circuit.cycles:
        for i, gate in enumerate(cyc.single):
            ops.append(((i,), sq_matrix(gate).astype(dtype), False))
        layer_ends.append(len(ops))
        for a, b, p in cyc.two_qubit:
            m = fsim_cache.get(p)
            if m is None:
                m = fsim_cache[p] = fsim_matrix(p).astype(dtype)
            ops.append(((pos[a], pos[b]), m, True))
        layer_ends.append(len(ops))
    return ops, layer_ends


def _check_limit(n: int, limit: int) -> None:
    if n > limit:
        raise ResourceLimitError(
            f"circuit has {n} qubits, exceeding the simulator limit {limit}")


def run(circuit: Circuit, limit: int = DEFAULT_QUBIT_LIMIT,
        dtype=np.complex128) -> StateVector:
    """Evolve |0...0> through every cycle of the circuit.

    ``dtype`` may be ``numpy.complex64`` for speed at reduced precision.
    """
    n = circuit.n_qubits
    _check_limit(n, limit)
    state = zero_state(n, dtype)
    ops, _ = _op_list(circuit, dtype)
    for positions, u, two in ops:
        if two:
            _apply_2q(state.amplitudes, n, positions[0], positions[1], u)
        else:
            _apply_1q(state.amplitudes, n, positions[0], u)
    return state


def probabilities(state: StateVector) -> np.ndarray:
    """Born probabilities |amp|^2 over all bitstrings."""
    return np.abs(state.amplitudes) ** 2


def _draw_words(probs: np.ndarray, n_draws: int, gen: np.random.Generator) -> np.ndarray:
    cum = np.cumsum(probs)
    cum /= cum[-1]
    return np.searchsorted(cum, gen.random(n_draws), side="right").astype(np.uint64)


def sample_ideal(state: StateVector, n_samples: int, seed: int) -> SampleSet:
    """i.i.d. draws from the Born distribution; deterministic per seed."""
    if n_samples < 1:
        raise InputError(f"need at least one sample, got {n_samples}")
    gen = rng.stream(seed, rng.Stream.IDEAL_SAMPLING)
    words = _draw_words(probabilities(state), n_samples, gen)
    return SampleSet(state.n_qubits, words, meta={"model": "ideal", "seed": seed})


def sample_noisy_speckle(
    state: StateVector, fidelity: float, n_samples: int, seed: int
) -> SampleSet:
    """Mixture sampling: ideal with probability ``fidelity``, else uniform."""
    if not 0.0 <= fidelity <= 1.0:
        raise InputError(f"fidelity {fidelity} outside [0, 1]")
    if n_samples < 1:
        raise InputError(f"need at least one sample, got {n_samples}")
    gen = rng.stream(seed, rng.Stream.SPECKLE)
    ideal_mask = gen.random(n_samples) < fidelity
    n_ideal = int(ideal_mask.sum())
    words = np.empty(n_samples, dtype=np.uint64)
    if n_ideal:
        words[ideal_mask] = _draw_words(probabilities(state), n_ideal, gen)
    n_unif = n_samples - n_ideal
    if n_unif:
        words[~ideal_mask] = gen.integers(0, state.dim, n_unif, dtype=np.uint64)
    return SampleSet(state.n_qubits, words,
                     meta={"model": "speckle", "fidelity": fidelity, "seed": seed})


def sample_trajectory(
    circuit: Circuit,
    noise: NoiseModel,
    n_samples: int,
    seed: int,
    limit: int = DEFAULT_QUBIT_LIMIT,
    threads: int = 1,
    dtype=np.complex128,
) -> SampleSet:
    """Pauli-trajectory sampling, one bitstring per trajectory.

    After each gate, with probability e1 (e2) a uniformly random non-identity
    Pauli is applied to the touched qubit(s); two-qubit errors draw from the
    15 non-identity Pauli pairs.  Each trajectory uses its own derived
    substream, so results do not depend on evaluation order or thread count.
    """
    n = circuit.n_qubits
    _check_limit(n, limit)
    if n_samples < 1:
        raise InputError(f"need at least one sample, got {n_samples}")

    ops, layer_ends = _op_list(circuit, dtype)
    e_vec = np.array([noise.e2 if two else noise.e1 for _, _, two in ops])
    paulis = [m.astype(dtype) for m in _PAULIS]

    # Ideal pass with layer checkpoints so errorful trajectories replay only
    # the suffix after their first error.
    boundaries = [0] + list(layer_ends)
    stride = 1
    state_bytes = (1 << n) * np.dtype(dtype).itemsize
    while state_bytes * (len(boundaries) // stride + 1) > _CHECKPOINT_BUDGET:
        stride *= 2
    checkpoints: dict[int, np.ndarray] = {}
    state = zero_state(n, dtype)
    checkpoints[0] = state.amplitudes.copy()
    kept = {b for i, b in enumerate(boundaries) if i % stride == 0}
    for k, (positions, u, two) in enumerate(ops):
        if two:
            _apply_2q(state.amplitudes, n, positions[0], positions[1], u)
        else:
            _apply_1q(state.amplitudes, n, positions[0], u)
        if (k + 1) in kept:
            checkpoints[k + 1] = state.amplitudes.copy()
    ideal_cum = np.cumsum(np.abs(state.amplitudes).astype(np.float64) ** 2)
    ideal_cum /= ideal_cum[-1]

    start_of = np.zeros(max(len(ops), 1), dtype=int)  # op index -> checkpoint
    sorted_cps = sorted(checkpoints)
    for k in range(len(ops)):
        i = np.searchsorted(sorted_cps, k, side="right") - 1
        start_of[k] = sorted_cps[i]

    any_noise = len(ops) > 0 and float(e_vec.max()) > 0.0

    def one_trajectory(t: int) -> int:
        gen = rng.stream(seed, rng.Stream.TRAJECTORY, index=t)
        err_at = np.nonzero(gen.random(len(ops)) < e_vec)[0] if any_noise else ()
        if len(err_at) == 0:
            return int(np.searchsorted(ideal_cum, gen.random(), side="right"))
        begin = int(start_of[err_at[0]])
        amps = checkpoints[begin].copy()
        errors = set(int(k) for k in err_at)
        for k in range(begin, len(ops)):
            positions, u, two = ops[k]
            if two:
                _apply_2q(amps, n, positions[0], positions[1], u)
            else:
                _apply_1q(amps, n, positions[0], u)
            if k in errors:
                if two:
                    idx = int(gen.integers(0, 15)) + 1
                    p1, p2 = divmod(idx, 4)
                    if p1:
                        _apply_1q(amps, n, positions[0], paulis[p1 - 1])
                    if p2:
                        _apply_1q(amps, n, positions[1], paulis[p2 - 1])
                else:
                    _apply_1q(amps, n, positions[0], paulis[int(gen.integers(0, 3))])
        cum = np.cumsum(np.abs(amps).astype(np.float64) ** 2)
        cum /= cum[-1]
        return int(np.searchsorted(cum, gen.random(), side="right"))

    words = np.empty(n_samples, dtype=np.uint64)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for t, w in enumerate(pool.map(one_trajectory, range(n_samples),
                                           chunksize=64)):
                words[t] = w
    else:
        for t in range(n_samples):
            words[t] = one_trajectory(t)
    return SampleSet(n, words, meta={"model": "trajectory", "seed": seed})


def apply_readout_error(samples: SampleSet, noise: NoiseModel, seed: int) -> SampleSet:
    """Flip each measured bit independently: 0->1 with e_r0, 1->0 with e_r1."""
    gen = rng.stream(seed, rng.Stream.READOUT)
    bits = samples.bits()
    u = gen.random(bits.shape)
    flip = np.where(bits == 0, u < noise.e_r0, u < noise.e_r1)
    flipped = bits ^ flip.astype(np.uint8)
    meta = dict(samples.meta)
    meta["readout_error"] = {"e_r0": noise.e_r0, "e_r1": noise.e_r1, "seed": seed}
    return SampleSet(samples.n_qubits, pack_bits(flipped), meta=meta)


def predicted_fidelity(circuit: Circuit, noise: NoiseModel) -> float:
    """Multiplicative fidelity prediction: (1-e1)^#1q * (1-e2)^#2q times one
    readout factor 1 - (e_r0 + e_r1)/2 per measured qubit."""
    e_r = (noise.e_r0 + noise.e_r1) / 2.0
    return float(
        (1.0 - noise.e1) ** circuit.n_single_gates
        * (1.0 - noise.e2) ** circuit.n_two_qubit_gates
        * (1.0 - e_r) ** circuit.n_qubits
    )
