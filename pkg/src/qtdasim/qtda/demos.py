"""End-to-end reproductions: the three-point example and the pure-state counterexample."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..complex import Simplex, SimplexSet, enumerate_k_simplices, validate_distance_matrix
from ..homology import barcode, betti_curve, betti_numbers, boundary_matrix, kernel_dimension
from ..qsim import (
    DensityMatrix,
    HermitianOperator,
    StateVector,
    apply_gate,
    cnot,
    eigendecompose,
    measure_distribution,
    partial_trace,
    phase_estimate,
    unitary_exponential,
)
from .pipeline import (
    QtdaConfig,
    betti_via_quantum,
    embed_columns,
    hermitian_boundary,
    kernel_estimate,
    kernel_probability_exact,
    kernel_probability_qpe,
    uniform_mixture,
)

# point 1 sits at the right angle: d12 = 3, d13 = 4, d23 = 5
THREE_POINT_DISTANCES = [[0, 3, 4], [3, 0, 5], [4, 5, 0]]
THREE_POINT_SCALES = {"eps1": 3.5, "eps2": 4.5}

# circuit wiring: qubits 0-2 are points 1-3, then the copy ancilla and the eigenvalue register
POINT_QUBITS = (0, 1, 2)
ANCILLA = 3
REGISTER = 4

# six points, seven edges a..g, with a hand-oriented boundary matrix
# (its column orientations do not all follow the ascending-vertex sign rule)
COUNTEREXAMPLE_EDGES = {
    "a": (0, 1),
    "b": (1, 2),
    "c": (2, 3),
    "d": (0, 3),
    "e": (0, 4),
    "f": (4, 5),
    "g": (1, 5),
}
COUNTEREXAMPLE_BOUNDARY = np.array(
    [
        [1, 0, 0, -1, 1, 0, 0],
        [-1, 1, 0, 0, 0, 0, -1],
        [0, -1, 1, 0, 0, 0, 0],
        [0, 0, -1, 1, 0, 0, 0],
        [0, 0, 0, 0, -1, 1, 0],
        [0, 0, 0, 0, 0, -1, 1],
    ]
)


def prepare_three_point_state(with_hadamard: bool) -> StateVector:
    """Simplex-state circuit on five qubits.

    X on point 1, optional H on point 2, CNOT point 2 -> point 3, X on point 2.
    Without the H this gives |110>; with it, (|110> + |101>)/sqrt(2).
    """
    psi = StateVector.zeros(5)
    psi = apply_gate(psi, "X", 0)
    if with_hadamard:
        psi = apply_gate(psi, "H", 1)
    psi = cnot(psi, 1, 2)
    return apply_gate(psi, "X", 1)


def _compiled_run(with_hadamard: bool) -> dict:
    psi = prepare_three_point_state(with_hadamard)
    # partial copy: only point 2 distinguishes the two edges
    psi = cnot(psi, 1, ANCILLA)
    # compiled phase estimation: point 1 sits in every edge, so one CNOT onto the register
    psi = cnot(psi, 0, REGISTER)
    register = measure_distribution(psi, [REGISTER])
    rho = partial_trace(psi, POINT_QUBITS)
    return {"register": register, "rho": rho}


def _compiled_operator(B: HermitianOperator, scale_name: str) -> HermitianOperator:
    # B1 = (B^eps1)^2 / 2 and B2 = (B^eps2)^2; both send every nonzero eigenvalue to an odd integer
    sq = B.matrix @ B.matrix
    return HermitianOperator(sq / 2 if scale_name == "eps1" else sq)


def three_point_demo(config: QtdaConfig | None = None) -> dict:
    """Run both scales of the three-point example through every path and
    cross-check them.  Raises AssertionError if compiled and general phase
    estimation disagree."""
    config = config or QtdaConfig()
    D = validate_distance_matrix(THREE_POINT_DISTANCES)
    n = D.n
    scales = {}
    for name, eps in THREE_POINT_SCALES.items():
        S1 = enumerate_k_simplices(D, eps, 1)
        S0 = enumerate_k_simplices(D, eps, 0)
        B = hermitian_boundary(boundary_matrix(S1, S0))
        compiled = _compiled_run(with_hadamard=name == "eps2")
        rho_points = compiled["rho"]
        mixture = uniform_mixture(S1, n)
        if np.max(np.abs(rho_points.data - mixture.data)) > 1e-10:
            raise AssertionError(f"{name}: partial copy and full copy give different mixtures")
        rho = embed_columns(rho_points, S1, len(S0))

        compiled_op = _compiled_operator(B, name)
        U = unitary_exponential(compiled_op, 0.5)  # exp(i pi B_compiled)
        general = phase_estimate(U, rho, 1)
        eta_compiled = compiled["register"].get("0", 0.0)
        eta_general = float(general[0])
        if abs(eta_compiled - eta_general) > 1e-9 or abs(compiled["register"].get("1", 0.0) - general[1]) > 1e-9:
            raise AssertionError(f"{name}: compiled and general phase estimation disagree")

        eta_exact = kernel_probability_exact(rho, B, config.zero_tolerance)
        eta_auto = kernel_probability_qpe(rho, B, config)
        ker1 = kernel_estimate(eta_compiled, len(S1), 1)
        beta0 = n + ker1.kernel_dim - len(S1)
        beta1 = ker1.kernel_dim  # no 2-simplices at either scale
        pipeline = [betti_via_quantum(D, eps, k, config).betti for k in (0, 1)]
        classical = betti_numbers(D, eps, 1)
        scales[name] = {
            "scale": eps,
            "simplices": [str(s) for s in S1],
            "state_probabilities": {
                str(Simplex(b, n)): float(a)
                for b, a in enumerate(partial_trace(prepare_three_point_state(name == "eps2"), POINT_QUBITS).diagonal())
                if a > 1e-12
            },
            "eigenvalues": [float(x) for x in eigendecompose(B)[0]],
            "compiled_operator_eigenvalues": [float(x) for x in eigendecompose(compiled_op)[0]],
            "register_compiled": compiled["register"],
            "register_general": {str(r): float(p) for r, p in enumerate(general)},
            "eta_compiled": eta_compiled,
            "eta_general": eta_general,
            "eta_exact": eta_exact,
            "eta_qpe_auto": eta_auto,
            "kernel_dim_raw": ker1.kernel_dim_raw,
            "kernel_dim": ker1.kernel_dim,
            "betti_compiled": [beta0, beta1],
            "betti_pipeline": pipeline,
            "betti_classical": classical,
        }
    bars = barcode(D, 1)
    curve = betti_curve(D, 0)
    return {
        "distances": THREE_POINT_DISTANCES,
        "scales": scales,
        "betti_curve_h0": {"breakpoints": list(curve.breakpoints), "values": list(curve.values)},
        "barcode": {str(k): [list(iv) for iv in v] for k, v in bars.intervals.items()},
    }


def counterexample_complex() -> tuple[SimplexSet, SimplexSet]:
    n = 6
    edges = SimplexSet.from_simplices(
        (Simplex.from_vertices(v, n) for v in COUNTEREXAMPLE_EDGES.values()), 1, n
    )
    points = SimplexSet.from_simplices((Simplex.from_vertices([i], n) for i in range(n)), 0, n)
    return edges, points


def counterexample_distances() -> list[list[float]]:
    """Six points realising exactly the seven edges at any scale in [1, 2)."""
    d = [[0.0 if i == j else 2.0 for j in range(6)] for i in range(6)]
    for a, b in COUNTEREXAMPLE_EDGES.values():
        d[a][b] = d[b][a] = 1.0
    return d


def _projection_probabilities(boundary: np.ndarray) -> tuple[float, float]:
    rows, cols = boundary.shape
    B = hermitian_boundary(boundary)
    mixed = np.zeros((rows + cols, rows + cols))
    mixed[rows:, rows:] = np.eye(cols) / cols
    pure = np.zeros(rows + cols)
    pure[rows:] = 1 / math.sqrt(cols)
    return kernel_probability_exact(DensityMatrix(mixed), B), kernel_probability_exact(pure, B)


def counterexample_demo() -> dict:
    """Kernel-projection probability of the uniform mixture versus the uniform
    pure state on the six-point, seven-edge complex."""
    mixed, pure = _projection_probabilities(COUNTEREXAMPLE_BOUNDARY)
    edges, points = counterexample_complex()
    canonical = boundary_matrix(edges, points).entries
    mixed_asc, pure_asc = _projection_probabilities(canonical)
    ker = kernel_dimension(canonical)
    D = validate_distance_matrix(counterexample_distances())
    return {
        "mixed": mixed,
        "pure": pure,
        "mixed_expected": str(Fraction(2, 7)),
        "pure_expected": str(Fraction(32, 35)),
        "kernel_dim_exact": ker,
        "edge_count": len(edges),
        "rank_ratio": ker / len(edges),
        "betti_exact": betti_numbers(D, 1.5, 1),
        # ascending-vertex orientation: the mixed value is unchanged, the pure one is not
        "mixed_ascending_orientation": mixed_asc,
        "pure_ascending_orientation": pure_asc,
    }
