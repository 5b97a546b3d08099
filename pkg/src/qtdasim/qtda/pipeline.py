"""Quantum Betti-number pipeline: simplex state, uniform mixture, kernel readout.

The uniform superposition over the k-simplices present at a scale is turned
into the uniform mixture by copying onto an ancilla register and tracing it
out; phase estimation then runs on the Hermitian embedding of the boundary
map.  The probability of the all-zeros register outcome, times the number of
simplices, estimates the kernel dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from ..complex import DistanceMatrix, SimplexSet, enumerate_k_simplices
from ..errors import EmptyComplexError, IllSeparatedSpectrumError, InvalidInputError
from ..homology import BoundaryMatrix, boundary_matrix
from ..qsim import (
    DensityMatrix,
    HermitianOperator,
    StateVector,
    cnot,
    grover_amplify,
    marked_probability,
    optimal_grover_iterations,
    partial_trace,
    phase_estimate,
)

MAX_COPY_QUBITS = 10  # copy circuit doubles the register: 2n qubits of state vector


@dataclass(frozen=True)
class QtdaConfig:
    """Knobs for the simulated pipeline.

    ``t=None`` picks the register size automatically (see
    :func:`select_register_qubits`).  ``shots=None`` reads exact register
    probabilities; an integer samples that many measurements with ``rng_seed``.
    """

    t: int | None = None
    zero_tolerance: float = 1e-9
    use_squared_operator: bool = True
    grover: Literal["off", "exact_iterations"] = "off"
    rng_seed: int = 0
    readout: Literal["qpe", "exact"] = "qpe"
    qpe_accuracy: float = 1e-6
    max_t: int = 16
    shots: int | None = None

    def __post_init__(self):
        if self.t is not None and self.t < 1:
            raise InvalidInputError("t must be at least 1")
        if not 0 < self.zero_tolerance <= 1e-6:
            raise InvalidInputError("zero_tolerance must lie in (0, 1e-6]")
        if self.grover not in ("off", "exact_iterations"):
            raise InvalidInputError(f"unknown grover mode {self.grover!r}")
        if self.readout not in ("qpe", "exact"):
            raise InvalidInputError(f"unknown readout {self.readout!r}")
        if not 0 <= self.rng_seed < 2**64:
            raise InvalidInputError("rng_seed must be a 64-bit unsigned integer")
        if self.shots is not None and self.shots < 1:
            raise InvalidInputError("shots must be positive")


@dataclass(frozen=True)
class KernelEstimate:
    eta: float
    simplex_count: int
    kernel_dim_raw: float
    kernel_dim: int
    reliable: bool
    register_qubits: int | None = None


def kernel_estimate(eta: float, simplex_count: int, register_qubits: int | None = None) -> KernelEstimate:
    raw = eta * simplex_count
    dim = max(0, math.floor(raw + 0.5))
    # an estimate exactly halfway between integers cannot be rounded safely
    reliable = abs(raw - dim) < 0.5 - 1e-9
    return KernelEstimate(eta, simplex_count, raw, dim, reliable, register_qubits)


def prepare_simplicial_state(S: SimplexSet, n: int) -> StateVector:
    if not len(S):
        raise EmptyComplexError("no simplices to superpose")
    amps = np.zeros(1 << n, dtype=complex)
    amps[[s.bits for s in S]] = 1 / math.sqrt(len(S))
    return StateVector(amps)


def direct_mixture(S: SimplexSet, n: int) -> DensityMatrix:
    if not len(S):
        raise EmptyComplexError("no simplices to mix")
    diag = np.zeros(1 << n)
    diag[[s.bits for s in S]] = 1 / len(S)
    return DensityMatrix(np.diag(diag))


def copy_and_trace(state: StateVector, n: int, copy_qubits: Sequence[int] | None = None) -> DensityMatrix:
    """Attach an n-qubit ancilla in |0...0>, CNOT each listed qubit onto its
    ancilla partner, and trace the ancilla out."""
    copy_qubits = range(n) if copy_qubits is None else copy_qubits
    joint = state.tensor(StateVector.zeros(n))
    for q in copy_qubits:
        joint = cnot(joint, q, q + n)
    return partial_trace(joint, range(n))


def uniform_mixture(
    S: SimplexSet,
    n: int,
    copy_qubits: Sequence[int] | None = None,
    state: StateVector | None = None,
) -> DensityMatrix:
    """Uniform mixture over ``S`` built by copy-and-trace.

    ``state`` overrides the superposition fed to the copy step (e.g. the
    output of Grover preparation).  Above ``MAX_COPY_QUBITS`` points the
    doubled register no longer fits and the mixture is written down directly.
    """
    if not len(S):
        raise EmptyComplexError("no simplices to mix")
    if state is None:
        state = prepare_simplicial_state(S, n)
    if n > MAX_COPY_QUBITS:
        return direct_mixture(S, n)
    return copy_and_trace(state, n, copy_qubits)


def hermitian_boundary(bd: BoundaryMatrix | np.ndarray) -> HermitianOperator:
    """Block matrix [[0, d], [d^T, 0]] over rows (+) columns."""
    d = np.asarray(bd.entries if isinstance(bd, BoundaryMatrix) else bd, dtype=float)
    r, c = d.shape
    B = np.zeros((r + c, r + c))
    B[:r, r:] = d
    B[r:, :r] = d.T
    return HermitianOperator(B)


def embed_columns(rho: DensityMatrix | np.ndarray, cols: SimplexSet, n_rows: int) -> DensityMatrix:
    """Move a state on the n point qubits into the chain space rows (+) cols,
    supported on the column block."""
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    bits = [s.bits for s in cols]
    block = data[np.ix_(bits, bits)]
    if abs(np.trace(block).real - 1) > 1e-10:
        raise InvalidInputError("state has weight outside the simplex set")
    d = n_rows + len(cols)
    out = np.zeros((d, d), dtype=complex)
    out[n_rows:, n_rows:] = block
    return DensityMatrix(out)


def _zero_projector(B: HermitianOperator, tol: float) -> np.ndarray:
    w, v = B.eigenpairs
    mag = np.abs(w)
    if np.any((mag > tol) & (mag <= 10 * tol)):
        raise IllSeparatedSpectrumError(
            f"eigenvalues within 10x of the zero tolerance {tol}: {mag[(mag > tol) & (mag <= 10 * tol)]}"
        )
    vz = v[:, mag <= tol]
    return vz @ vz.conj().T


def kernel_probability_exact(rho: DensityMatrix | np.ndarray, B: HermitianOperator, zero_tolerance: float = 1e-9) -> float:
    """Weight of ``rho`` on the zero eigenspace of ``B``: Tr(P0 rho P0)."""
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if data.ndim == 1:
        data = np.outer(data, data.conj())
    if data.shape != B.matrix.shape:
        raise InvalidInputError(f"state shape {data.shape} does not match operator {B.matrix.shape}")
    P = _zero_projector(B, zero_tolerance)
    return float(np.real(np.trace(P @ data @ P)))


def readout_phases(B: HermitianOperator, config: QtdaConfig) -> tuple[np.ndarray, float]:
    """Eigenphases of the rescaled operator whose exponential is fed to phase
    estimation, plus the largest |eigenvalue| of B."""
    w, _ = B.eigenpairs
    lam_max = float(np.max(np.abs(w), initial=0.0))
    if lam_max <= config.zero_tolerance:
        return np.zeros_like(w), 0.0
    if config.use_squared_operator:
        return w**2 / (2 * lam_max**2), lam_max
    return w / (2 * lam_max), lam_max


def zero_leakage(phase: float | np.ndarray, t: int) -> np.ndarray:
    """Probability that an eigenstate with this (nonzero) phase reads out as register 0."""
    N = 1 << t
    phase = np.asarray(phase, dtype=float)
    return (np.sin(np.pi * N * phase) / (N * np.sin(np.pi * phase))) ** 2


def select_register_qubits(B: HermitianOperator, config: QtdaConfig) -> int:
    """Register size for the kernel readout.

    Start from the smallest t whose resolution 2**-t is at most half the
    smallest nonzero phase, then grow t until every nonzero phase leaks at most
    ``qpe_accuracy`` into the zero outcome, stopping at ``max_t``.  Inspecting
    the spectrum is a convenience of classical simulation.
    """
    if config.t is not None:
        return config.t
    phases, lam_max = readout_phases(B, config)
    if lam_max == 0:
        return 1
    w, _ = B.eigenpairs
    nonzero = np.abs(phases[np.abs(w) > config.zero_tolerance])
    phi_min = float(nonzero.min())
    t = max(1, math.ceil(-math.log2(phi_min / 2) - 1e-12))
    while t < config.max_t and zero_leakage(nonzero, t).max() > config.qpe_accuracy:
        t += 1
    return min(t, config.max_t)


def readout_unitary(B: HermitianOperator, config: QtdaConfig) -> np.ndarray:
    """exp(2 pi i B~) with B~ = B^2 / (2 lam_max^2), or B / (2 lam_max) unsquared.

    B~ shares B's eigenvectors, so the exponential reuses B's cached spectrum.
    """
    phases, _ = readout_phases(B, config)
    _, v = B.eigenpairs
    return (v * np.exp(2j * np.pi * phases)) @ v.conj().T


def register_distribution(rho: DensityMatrix | np.ndarray, B: HermitianOperator, config: QtdaConfig, t: int) -> np.ndarray:
    return phase_estimate(readout_unitary(B, config), rho, t)


def kernel_probability_qpe(rho: DensityMatrix | np.ndarray, B: HermitianOperator, config: QtdaConfig | None = None) -> float:
    """Probability of the all-zeros register after phase estimation of exp(2 pi i B~)."""
    config = config or QtdaConfig()
    _, lam_max = readout_phases(B, config)
    if lam_max == 0:
        return 1.0
    t = select_register_qubits(B, config)
    probs = register_distribution(rho, B, config, t)
    if config.shots is None:
        return float(probs[0])
    rng = np.random.default_rng(config.rng_seed)
    counts = rng.multinomial(config.shots, probs / probs.sum())
    return counts[0] / config.shots


@dataclass(frozen=True)
class GroverPreparation:
    state: StateVector  # renormalised marked component
    success_probability: float
    iterations: int
    marked_count: int
    search_space: int


def simplex_oracle(D: DistanceMatrix, eps: float, k: int) -> np.ndarray:
    """Boolean mask over all n-bit strings: popcount k+1 and pairwise within eps."""
    n = D.n
    mask = np.zeros(1 << n, dtype=bool)
    for s in enumerate_k_simplices(D, eps, k):
        mask[s.bits] = True
    return mask


def grover_prepare_simplices(D: DistanceMatrix, eps: float, k: int, config: QtdaConfig | None = None) -> GroverPreparation:
    mask = simplex_oracle(D, eps, k)
    M = int(mask.sum())
    if M == 0:
        raise EmptyComplexError(f"no {k}-simplices at scale {eps}; search cannot find any")
    N = 1 << D.n
    r = optimal_grover_iterations(N, M)
    full = grover_amplify(D.n, mask, r)
    p = marked_probability(full, mask)
    cond = np.where(mask, full.amplitudes, 0)
    cond = cond / np.linalg.norm(cond)
    return GroverPreparation(StateVector(cond), p, r, M, N)


@dataclass(frozen=True)
class QuantumBetti:
    betti: int
    k: int
    scale: float
    kernel_k: KernelEstimate
    kernel_k1: KernelEstimate
    simplex_counts: tuple[int, int]
    grover_success: dict[int, float] = field(default_factory=dict)

    @property
    def reliable(self) -> bool:
        return self.kernel_k.reliable and self.kernel_k1.reliable


def _kernel_for(D: DistanceMatrix, eps: float, j: int, config: QtdaConfig, grover: dict[int, float]) -> KernelEstimate:
    n = D.n
    if j == 0:
        return KernelEstimate(1.0, n, float(n), n, True)
    if j > n - 1:
        return KernelEstimate(0.0, 0, 0.0, 0, True)
    S = enumerate_k_simplices(D, eps, j)
    if not len(S):
        return KernelEstimate(0.0, 0, 0.0, 0, True)
    state = None
    if config.grover == "exact_iterations":
        prep = grover_prepare_simplices(D, eps, j, config)
        grover[j] = prep.success_probability
        state = prep.state
    rho_points = uniform_mixture(S, n, state=state)
    rows = enumerate_k_simplices(D, eps, j - 1)
    B = hermitian_boundary(boundary_matrix(S, rows))
    rho = embed_columns(rho_points, S, len(rows))
    if config.readout == "exact":
        return kernel_estimate(kernel_probability_exact(rho, B, config.zero_tolerance), len(S))
    t = select_register_qubits(B, config)
    eta = kernel_probability_qpe(rho, B, config)
    return kernel_estimate(eta, len(S), t)


def betti_via_quantum(D: DistanceMatrix, eps: float, k: int, config: QtdaConfig | None = None) -> QuantumBetti:
    """Betti number from two kernel readouts: dim Ker d_k + dim Ker d_{k+1} - |S_{k+1}|."""
    config = config or QtdaConfig()
    if not 0 <= k <= D.n - 1:
        raise InvalidInputError(f"homology dimension k={k} out of range 0..{D.n - 1}")
    if eps < 0:
        raise InvalidInputError("scale must be non-negative")
    grover: dict[int, float] = {}
    ker_k = _kernel_for(D, eps, k, config, grover)
    ker_k1 = _kernel_for(D, eps, k + 1, config, grover)
    size_k1 = len(enumerate_k_simplices(D, eps, k + 1)) if k + 1 <= D.n - 1 else 0
    size_k = len(enumerate_k_simplices(D, eps, k))
    betti = ker_k.kernel_dim + ker_k1.kernel_dim - size_k1
    return QuantumBetti(betti, k, eps, ker_k, ker_k1, (size_k, size_k1), grover)


def quantum_betti_numbers(D: DistanceMatrix, eps: float, max_k: int, config: QtdaConfig | None = None) -> list[QuantumBetti]:
    """``betti_via_quantum`` for k = 0..max_k, reading each kernel dimension once."""
    config = config or QtdaConfig()
    if not 0 <= max_k <= D.n - 1:
        raise InvalidInputError(f"max dimension {max_k} out of range 0..{D.n - 1}")
    if eps < 0:
        raise InvalidInputError("scale must be non-negative")
    grover: dict[int, float] = {}
    kernels = [_kernel_for(D, eps, j, config, grover) for j in range(max_k + 2)]
    sizes = [len(enumerate_k_simplices(D, eps, j)) if j <= D.n - 1 else 0 for j in range(max_k + 2)]
    out = []
    for k in range(max_k + 1):
        betti = kernels[k].kernel_dim + kernels[k + 1].kernel_dim - sizes[k + 1]
        used = {j: p for j, p in grover.items() if j in (k, k + 1)}
        out.append(QuantumBetti(betti, k, eps, kernels[k], kernels[k + 1], (sizes[k], sizes[k + 1]), used))
    return out
