"""Small dense quantum simulator.

Basis index bit ``j`` is qubit ``j`` (qubit 0 is the least significant bit).
When qubits encode points, qubit ``j`` is point ``j + 1``; see
:mod:`qtdasim.complex` for the ket rendering that puts point 1 leftmost.

States are immutable: every operation returns a new object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidInputError, NumericalError

INPUT_TOL = 1e-12
POST_TOL = 1e-9
NORM_TOL = 1e-10

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
GATES = {"H": H, "X": X, "Z": Z}


def _num_qubits(dim: int) -> int:
    m = dim.bit_length() - 1
    if dim < 1 or 1 << m != dim:
        raise InvalidInputError(f"dimension {dim} is not a power of two")
    return m


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        _num_qubits(amps.size)
        norm = np.vdot(amps, amps).real
        if abs(norm - 1) > NORM_TOL:
            raise InvalidInputError(f"state is not normalised (norm^2 = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, index: int, num_qubits: int) -> StateVector:
        amps = np.zeros(1 << num_qubits, dtype=complex)
        amps[index] = 1
        return cls(amps)

    @classmethod
    def zeros(cls, num_qubits: int) -> StateVector:
        return cls.basis(0, num_qubits)

    @property
    def num_qubits(self) -> int:
        return _num_qubits(self.amplitudes.size)

    def tensor(self, other: StateVector) -> StateVector:
        """``self`` on the low qubits, ``other`` on the qubits above them."""
        return StateVector(np.kron(other.amplitudes, self.amplitudes))

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    """Density operator.  Usually over qubits, but any dimension is allowed so
    that operators on non-power-of-two spaces (e.g. chain spaces) fit too."""

    data: np.ndarray

    def __post_init__(self):
        rho = np.array(self.data, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidInputError(f"density matrix must be square, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > NORM_TOL:
            raise InvalidInputError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1) > NORM_TOL:
            raise InvalidInputError(f"density matrix trace is {np.trace(rho).real}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -NORM_TOL:
            raise InvalidInputError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "data", rho)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def num_qubits(self) -> int:
        return _num_qubits(self.dim)

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.data)).copy()


def as_density(state: StateVector | DensityMatrix) -> DensityMatrix:
    return state.density() if isinstance(state, StateVector) else state


def check_unitary(u: np.ndarray, tol: float = INPUT_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidInputError(f"gate must be a square matrix, got shape {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > tol:
        raise InvalidInputError(f"gate is not unitary (max deviation {err:.3g})")
    return u


def _apply_on_qubits(amps: np.ndarray, m: int, u: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply ``u`` to ``qubits``; ``qubits[0]`` is the least significant bit of u's index."""
    s = len(qubits)
    psi = amps.reshape([2] * m)
    # tensor axis for qubit q is m-1-q; u's index has qubits[-1] as its top bit
    axes = [m - 1 - q for q in reversed(qubits)]
    psi = np.moveaxis(psi, axes, range(s)).reshape(1 << s, -1)
    psi = (u @ psi).reshape([2] * m)
    return np.moveaxis(psi, range(s), axes).reshape(-1)


def _check_indices(m: int, qubits: Iterable[int]) -> None:
    qubits = list(qubits)
    for q in qubits:
        if not 0 <= q < m:
            raise InvalidInputError(f"qubit index {q} out of range for {m} qubits")
    if len(set(qubits)) != len(qubits):
        raise InvalidInputError(f"qubit indices overlap: {qubits}")


def apply_gate(state: StateVector, gate: str | np.ndarray, target: int) -> StateVector:
    u = GATES[gate] if isinstance(gate, str) else check_unitary(gate)
    if u.shape != (2, 2):
        raise InvalidInputError("apply_gate takes a single-qubit gate")
    m = state.num_qubits
    _check_indices(m, [target])
    return StateVector(_apply_on_qubits(state.amplitudes, m, u, [target]))


def apply_unitary(state: StateVector, u: np.ndarray, qubits: Sequence[int]) -> StateVector:
    u = check_unitary(u)
    m = state.num_qubits
    _check_indices(m, qubits)
    if u.shape[0] != 1 << len(qubits):
        raise InvalidInputError(f"{u.shape[0]}-dim unitary does not act on {len(qubits)} qubits")
    return StateVector(_apply_on_qubits(state.amplitudes, m, u, list(qubits)))


def apply_controlled(state: StateVector, u: np.ndarray, control: int, targets: Sequence[int]) -> StateVector:
    u = check_unitary(u)
    m = state.num_qubits
    targets = list(targets)
    _check_indices(m, [control, *targets])
    if u.shape[0] != 1 << len(targets):
        raise InvalidInputError(f"{u.shape[0]}-dim unitary does not act on {len(targets)} qubits")
    s = len(targets)
    cu = np.eye(2 << s, dtype=complex)
    cu[1 << s :, 1 << s :] = u
    return StateVector(_apply_on_qubits(state.amplitudes, m, cu, [*targets, control]))


def cnot(state: StateVector, control: int, target: int) -> StateVector:
    return apply_controlled(state, X, control, [target])


def partial_trace(state: StateVector | DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on ``keep``; the kept qubits are renumbered 0.. in ascending order."""
    keep = sorted(set(keep))
    if not keep:
        raise InvalidInputError("keep set must be nonempty")
    m = state.num_qubits
    _check_indices(m, keep)
    drop = [q for q in range(m) if q not in keep]
    k_axes = [m - 1 - q for q in reversed(keep)]
    d_axes = [m - 1 - q for q in reversed(drop)]
    dk, dd = 1 << len(keep), 1 << len(drop)
    if isinstance(state, StateVector):
        psi = np.transpose(state.amplitudes.reshape([2] * m), k_axes + d_axes).reshape(dk, dd)
        return DensityMatrix(psi @ psi.conj().T)
    rho = state.data.reshape([2] * (2 * m))
    perm = k_axes + d_axes + [m + a for a in k_axes] + [m + a for a in d_axes]
    rho = np.transpose(rho, perm).reshape(dk, dd, dk, dd)
    return DensityMatrix(np.einsum("ajbj->ab", rho))


def measure_distribution(state: StateVector | DensityMatrix, qubits: Sequence[int]) -> dict[str, float]:
    """Outcome probabilities of measuring ``qubits`` in the computational basis.

    Keys are bit-strings listing ``qubits`` in the given order, left to right.
    """
    m = state.num_qubits
    qubits = list(qubits)
    _check_indices(m, qubits)
    if isinstance(state, StateVector):
        probs = state.probabilities()
    else:
        probs = np.clip(np.real(np.diag(state.data)), 0, None)
    out: dict[str, float] = {}
    for idx in np.flatnonzero(probs > 0):
        key = "".join(str(idx >> q & 1) for q in qubits)
        out[key] = out.get(key, 0.0) + float(probs[idx])
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class HermitianOperator:
    matrix: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInputError(f"operator must be square, got {a.shape}")
        if np.max(np.abs(a - a.conj().T), initial=0.0) > INPUT_TOL:
            raise InvalidInputError("operator is not Hermitian")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigenpairs(self) -> tuple[np.ndarray, np.ndarray]:
        return eigendecompose(self)


def eigendecompose(A: HermitianOperator) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""
    try:
        w, v = np.linalg.eigh(A.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def unitary_exponential(A: HermitianOperator, scale: float) -> np.ndarray:
    """exp(2*pi*i*scale*A), built from the cached spectrum of A."""
    w, v = A.eigenpairs
    return (v * np.exp(2j * np.pi * scale * w)) @ v.conj().T


def inverse_qft_rows(block: np.ndarray) -> np.ndarray:
    """Inverse QFT on the register index of an array shaped (2**t, ...).

    Row index ``r`` is the register basis state with register qubit j = bit j,
    so the leading phase bit lands on qubit t-1.
    """
    return np.fft.fft(block, axis=0, norm="ortho")


def qft_matrix(t: int) -> np.ndarray:
    n = 1 << t
    r = np.arange(n)
    return np.exp(2j * np.pi * np.outer(r, r) / n) / math.sqrt(n)


def _pure_components(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    diag = np.diag(rho)
    if np.allclose(rho, np.diag(diag), atol=1e-14, rtol=0):
        weights = diag.real
        idx = np.flatnonzero(weights > 0)
        vecs = np.zeros((rho.shape[0], idx.size), dtype=complex)
        vecs[idx, np.arange(idx.size)] = 1
        return weights[idx], vecs
    w, v = np.linalg.eigh(rho)
    keep = w > 1e-14
    return w[keep], v[:, keep]


def phase_estimate(U: np.ndarray, system: StateVector | DensityMatrix | np.ndarray, t: int) -> np.ndarray:
    """Register distribution from textbook phase estimation.

    The t-qubit register starts in |0...0>, gets Hadamards, controls
    U**(2**j) from register qubit j, and finishes with an inverse QFT.
    ``result[r]`` is the probability of reading integer ``r``, i.e. phase
    ``r / 2**t``.  The system may be any dimension matching ``U``; mixed
    inputs are propagated component by component, which is exactly the
    density-matrix evolution of the circuit.
    """
    if t < 1:
        raise InvalidInputError("phase estimation needs at least one register qubit")
    U = check_unitary(U, POST_TOL)
    if isinstance(system, StateVector):
        weights, vecs = np.ones(1), system.amplitudes[:, None]
    else:
        rho = system.data if isinstance(system, DensityMatrix) else np.asarray(system, dtype=complex)
        if rho.ndim == 1:
            weights, vecs = np.ones(1), rho[:, None]
        else:
            weights, vecs = _pure_components(rho)
    d = U.shape[0]
    if vecs.shape[0] != d:
        raise InvalidInputError(f"system dimension {vecs.shape[0]} does not match unitary dimension {d}")
    n_reg = 1 << t
    powers = [U]
    for _ in range(t - 1):
        powers.append(powers[-1] @ powers[-1])
    probs = np.zeros(n_reg)
    chunk = max(1, (1 << 22) // (n_reg * d))
    for start in range(0, vecs.shape[1], chunk):
        cols = vecs[:, start : start + chunk]
        c = cols.shape[1]
        # state[r, :, c]: register basis state r, system amplitudes of component c
        state = np.empty((n_reg, d, c), dtype=complex)
        state[:] = cols / math.sqrt(n_reg)
        for j, Uj in enumerate(powers):
            # rows whose register qubit j is 1
            on = state.reshape(n_reg >> (j + 1), 2, 1 << j, d, c)[:, 1]
            flat = np.moveaxis(on, 2, 0).reshape(d, -1)
            on[...] = np.moveaxis((Uj @ flat).reshape(d, n_reg >> (j + 1), 1 << j, c), 0, 2)
        state = inverse_qft_rows(state)
        probs += (np.abs(state) ** 2).sum(axis=1) @ weights[start : start + chunk]
    return probs


def register_bitstring(r: int, t: int) -> str:
    """Bit-string of outcome ``r`` with register qubit t-1 leftmost."""
    return format(r, f"0{t}b")


def grover_amplify(n: int, oracle: Callable[[int], bool] | np.ndarray, iterations: int) -> StateVector:
    """Multi-target amplitude amplification from the uniform state on n qubits.

    ``oracle`` is either a predicate on basis indices or a boolean mask of
    length 2**n.
    """
    N = 1 << n
    marked = _marked_mask(n, oracle)
    if not marked.any():
        raise InvalidInputError("oracle marks no basis state; search cannot succeed")
    if iterations < 0:
        raise InvalidInputError("iteration count must be non-negative")
    psi = np.full(N, 1 / math.sqrt(N), dtype=complex)
    for _ in range(iterations):
        psi[marked] *= -1
        psi = 2 * psi.mean() - psi
    psi /= np.linalg.norm(psi)
    return StateVector(psi)


def _marked_mask(n: int, oracle) -> np.ndarray:
    N = 1 << n
    if callable(oracle):
        return np.fromiter((bool(oracle(i)) for i in range(N)), dtype=bool, count=N)
    mask = np.asarray(oracle, dtype=bool)
    if mask.shape != (N,):
        raise InvalidInputError(f"oracle mask must have length {N}")
    return mask


def marked_probability(state: StateVector, oracle) -> float:
    mask = _marked_mask(state.num_qubits, oracle)
    return float(state.probabilities()[mask].sum())


def optimal_grover_iterations(N: int, M: int) -> int:
    if not 1 <= M <= N:
        raise InvalidInputError(f"need 1 <= M <= N, got M={M}, N={N}")
    theta = math.asin(math.sqrt(M / N))
    # round half up of pi/(4 theta) - 1/2
    return max(0, math.floor(math.pi / (4 * theta)))


def same_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = POST_TOL) -> bool:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    return bool(np.max(np.abs(np.outer(a, a.conj()) - np.outer(b, b.conj()))) <= tol)
