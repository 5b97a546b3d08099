import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtdasim.errors import InvalidInputError
from qtdasim.qsim import (
    H,
    X,
    DensityMatrix,
    HermitianOperator,
    StateVector,
    apply_controlled,
    apply_gate,
    apply_unitary,
    cnot,
    eigendecompose,
    grover_amplify,
    inverse_qft_rows,
    marked_probability,
    measure_distribution,
    optimal_grover_iterations,
    partial_trace,
    phase_estimate,
    qft_matrix,
    register_bitstring,
    same_up_to_phase,
    unitary_exponential,
)


def random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def gate_level_qft(t):
    """QFT built column by column from H, controlled phases and final swaps."""
    cols = []
    for basis in range(1 << t):
        psi = StateVector.basis(basis, t)
        for target in reversed(range(t)):
            psi = apply_gate(psi, "H", target)
            for ctrl in reversed(range(target)):
                phase = np.diag([1, np.exp(2j * np.pi / 2 ** (target - ctrl + 1))])
                psi = apply_controlled(psi, phase, ctrl, [target])
        for q in range(t // 2):
            swap = np.eye(4)[[0, 2, 1, 3]]
            psi = apply_unitary(psi, swap, [q, t - 1 - q])
        cols.append(psi.amplitudes)
    return np.array(cols).T


def gate_level_phase_estimation(U, psi, t):
    """Register distribution from the full state-vector circuit."""
    d = U.shape[0]
    m = int(math.log2(d))
    state = StateVector(psi).tensor(StateVector.zeros(t))
    system = list(range(m))
    for j in range(t):
        state = apply_gate(state, "H", m + j)
    for j in range(t):
        state = apply_controlled(state, np.linalg.matrix_power(U, 2**j), m + j, system)
    state = apply_unitary(state, qft_matrix(t).conj().T, [m + j for j in range(t)])
    probs = state.probabilities().reshape(1 << t, d).sum(axis=1)
    return probs


def test_gates_on_basis_states():
    psi = apply_gate(StateVector.zeros(2), "X", 0)
    assert psi.amplitudes.tolist() == [0, 1, 0, 0]
    psi = apply_gate(StateVector.zeros(2), "H", 1)
    np.testing.assert_allclose(psi.amplitudes, [2**-0.5, 0, 2**-0.5, 0])
    z = apply_gate(StateVector.basis(1, 1), "Z", 0)
    assert z.amplitudes.tolist() == [0, -1]


def test_cnot_truth_table():
    # control qubit 0, target qubit 1
    expected = {0: 0, 1: 3, 2: 2, 3: 1}
    for src, dst in expected.items():
        out = cnot(StateVector.basis(src, 2), 0, 1)
        assert int(np.argmax(np.abs(out.amplitudes))) == dst


def test_state_validation():
    with pytest.raises(InvalidInputError):
        StateVector([1, 1])
    with pytest.raises(InvalidInputError):
        StateVector([1, 0, 0])
    with pytest.raises(InvalidInputError):
        apply_gate(StateVector.zeros(1), np.array([[1, 1], [0, 1]]), 0)
    with pytest.raises(InvalidInputError):
        apply_gate(StateVector.zeros(1), "X", 1)
    with pytest.raises(InvalidInputError):
        cnot(StateVector.zeros(2), 0, 0)


def test_state_is_immutable():
    psi = StateVector.zeros(1)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0


def test_tensor_puts_self_on_low_qubits():
    a, b = StateVector.basis(1, 1), StateVector.zeros(2)
    assert int(np.argmax(a.tensor(b).probabilities())) == 1
    assert int(np.argmax(b.tensor(a).probabilities())) == 4


@pytest.mark.parametrize(
    "data",
    [
        [[0.5, 0.1], [0.2, 0.5]],
        [[0.5, 0], [0, 0.6]],
        [[1.5, 0], [0, -0.5]],
        [[1, 0, 0]],
    ],
)
def test_density_validation(data):
    with pytest.raises(InvalidInputError):
        DensityMatrix(data)


def test_density_of_any_dimension():
    rho = DensityMatrix(np.eye(3) / 3)
    assert rho.dim == 3
    assert rho.purity() == pytest.approx(1 / 3)
    with pytest.raises(InvalidInputError):
        rho.num_qubits


def test_partial_trace_of_bell_state():
    bell = cnot(apply_gate(StateVector.zeros(2), "H", 0), 0, 1)
    for keep in ([0], [1]):
        np.testing.assert_allclose(partial_trace(bell, keep).data, np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(partial_trace(bell.density(), [0]).data, np.eye(2) / 2, atol=1e-15)


def test_partial_trace_of_product_state_keeps_factor():
    rng = np.random.default_rng(3)
    a, b, c = (StateVector(random_state(rng, 2)) for _ in range(3))
    psi = a.tensor(b).tensor(c)
    reduced = partial_trace(psi, [0, 2])
    expected = np.outer(a.tensor(c).amplitudes, a.tensor(c).amplitudes.conj())
    np.testing.assert_allclose(reduced.data, expected, atol=1e-12)
    assert reduced.purity() == pytest.approx(1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.data())
def test_partial_trace_pure_and_mixed_agree(seed, m, data):
    rng = np.random.default_rng(seed)
    psi = StateVector(random_state(rng, 1 << m))
    keep = data.draw(st.lists(st.integers(0, m - 1), min_size=1, max_size=m, unique=True))
    a = partial_trace(psi, keep).data
    b = partial_trace(psi.density(), keep).data
    np.testing.assert_allclose(a, b, atol=1e-12)
    assert np.trace(a).real == pytest.approx(1)


def test_partial_trace_rejects_empty_keep():
    with pytest.raises(InvalidInputError):
        partial_trace(StateVector.zeros(2), [])


def test_measure_distribution_orders_keys_by_requested_qubits():
    psi = StateVector.basis(0b01, 2)
    assert measure_distribution(psi, [0, 1]) == {"10": 1.0}
    assert measure_distribution(psi, [1, 0]) == {"01": 1.0}
    plus = apply_gate(StateVector.zeros(1), "H", 0)
    dist = measure_distribution(plus.density(), [0])
    assert dist == pytest.approx({"0": 0.5, "1": 0.5})


def test_hermitian_operator_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        HermitianOperator([[0, 1], [0, 0]])


def test_unitary_exponential_of_pauli_x():
    A = HermitianOperator(X)
    w, _ = eigendecompose(A)
    assert w.tolist() == [-1, 1]
    U = unitary_exponential(A, 0.25)  # exp(i pi/2 X) = iX
    np.testing.assert_allclose(U, 1j * X, atol=1e-15)


@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_qft_matches_gate_level_circuit(t):
    np.testing.assert_allclose(gate_level_qft(t), qft_matrix(t), atol=1e-12)


def test_inverse_qft_rows_is_adjoint_of_qft():
    rng = np.random.default_rng(0)
    block = rng.normal(size=(8, 3)) + 1j * rng.normal(size=(8, 3))
    np.testing.assert_allclose(inverse_qft_rows(block), qft_matrix(3).conj().T @ block, atol=1e-12)


@pytest.mark.parametrize("t, r", [(1, 1), (3, 5), (4, 9)])
def test_phase_estimation_exact_phase(t, r):
    U = np.diag([np.exp(2j * np.pi * r / 2**t), 1.0])
    probs = phase_estimate(U, StateVector.basis(0, 1), t)
    assert probs[r] == pytest.approx(1)
    assert register_bitstring(r, t) == format(r, f"0{t}b")


def test_phase_estimation_inexact_phase_closed_form():
    t, phi = 5, 0.3
    N = 1 << t
    probs = phase_estimate(np.diag([np.exp(2j * np.pi * phi)]), np.array([1.0]), t)
    r = np.arange(N)
    delta = phi - r / N
    with np.errstate(invalid="ignore", divide="ignore"):
        expected = (np.sin(np.pi * N * delta) / (N * np.sin(np.pi * delta))) ** 2
    np.testing.assert_allclose(probs, expected, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(1, 4))
def test_phase_estimation_matches_gate_level(seed, m, t):
    rng = np.random.default_rng(seed)
    U = random_unitary(rng, 1 << m)
    psi = random_state(rng, 1 << m)
    np.testing.assert_allclose(phase_estimate(U, StateVector(psi), t), gate_level_phase_estimation(U, psi, t), atol=1e-10)


def test_phase_estimation_is_linear_in_mixtures():
    rng = np.random.default_rng(11)
    U = random_unitary(rng, 3)
    a, b = random_state(rng, 3), random_state(rng, 3)
    rho = 0.3 * np.outer(a, a.conj()) + 0.7 * np.outer(b, b.conj())
    mixed = phase_estimate(U, DensityMatrix(rho), 4)
    expected = 0.3 * phase_estimate(U, a, 4) + 0.7 * phase_estimate(U, b, 4)
    np.testing.assert_allclose(mixed, expected, atol=1e-12)
    assert mixed.sum() == pytest.approx(1)


def test_phase_estimation_rejects_bad_arguments():
    with pytest.raises(InvalidInputError):
        phase_estimate(np.eye(2), StateVector.zeros(1), 0)
    with pytest.raises(InvalidInputError):
        phase_estimate(np.eye(4), StateVector.zeros(1), 2)
    with pytest.raises(InvalidInputError):
        phase_estimate(np.array([[1, 1], [0, 1]]), StateVector.zeros(1), 2)


@pytest.mark.parametrize("n, marked", [(2, [3]), (3, [3, 5]), (4, [1, 2, 7])])
def test_grover_closed_form(n, marked):
    N, M = 1 << n, len(marked)
    theta = math.asin(math.sqrt(M / N))
    mask = np.zeros(N, dtype=bool)
    mask[marked] = True
    for r in range(6):
        psi = grover_amplify(n, mask, r)
        assert marked_probability(psi, mask) == pytest.approx(math.sin((2 * r + 1) * theta) ** 2, abs=1e-12)
        # marked amplitudes stay equal, so the conditional state is uniform on the marked set
        amps = psi.amplitudes[mask]
        np.testing.assert_allclose(amps, amps[0], atol=1e-12)


def test_grover_predicate_matches_mask():
    psi = grover_amplify(3, lambda i: i in (3, 5), 1)
    assert marked_probability(psi, lambda i: i in (3, 5)) == pytest.approx(1)


def test_grover_rejects_empty_oracle():
    with pytest.raises(InvalidInputError):
        grover_amplify(2, np.zeros(4, dtype=bool), 1)
    with pytest.raises(InvalidInputError):
        grover_amplify(2, np.ones(3, dtype=bool), 1)


def brute_best_iterations(N, M):
    theta = math.asin(math.sqrt(M / N))
    limit = int(math.pi / (4 * theta)) + 2
    probs = [math.sin((2 * r + 1) * theta) ** 2 for r in range(limit)]
    return probs


@pytest.mark.parametrize("N", [4, 8, 16, 64, 1024])
def test_optimal_iterations_maximise_closed_form(N):
    for M in range(1, N + 1):
        probs = brute_best_iterations(N, M)
        r = optimal_grover_iterations(N, M)
        assert probs[r] >= max(probs) - 1e-12


def test_optimal_iterations_large_search_space():
    N = 2**20
    assert optimal_grover_iterations(N, 1) == 804
    probs = brute_best_iterations(N, 1)
    assert int(np.argmax(probs)) == 804
    assert optimal_grover_iterations(8, 2) == 1
    with pytest.raises(InvalidInputError):
        optimal_grover_iterations(8, 0)


def test_same_up_to_phase():
    a = np.array([1, 1j]) / math.sqrt(2)
    assert same_up_to_phase(a, -1j * a)
    assert not same_up_to_phase(a, np.array([1, -1j]) / math.sqrt(2))
    assert np.allclose(H @ H, np.eye(2))
