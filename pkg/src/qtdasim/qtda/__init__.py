from .demos import counterexample_demo, three_point_demo
from .pipeline import (
    GroverPreparation,
    KernelEstimate,
    QtdaConfig,
    QuantumBetti,
    betti_via_quantum,
    embed_columns,
    grover_prepare_simplices,
    hermitian_boundary,
    kernel_estimate,
    kernel_probability_exact,
    kernel_probability_qpe,
    prepare_simplicial_state,
    quantum_betti_numbers,
    select_register_qubits,
    uniform_mixture,
)
from .proportions import ProportionGrid, error_threshold, proportion_monte_carlo, random_distances

__all__ = [
    "GroverPreparation",
    "KernelEstimate",
    "ProportionGrid",
    "QtdaConfig",
    "QuantumBetti",
    "betti_via_quantum",
    "counterexample_demo",
    "embed_columns",
    "error_threshold",
    "grover_prepare_simplices",
    "hermitian_boundary",
    "kernel_estimate",
    "kernel_probability_exact",
    "kernel_probability_qpe",
    "prepare_simplicial_state",
    "proportion_monte_carlo",
    "quantum_betti_numbers",
    "random_distances",
    "select_register_qubits",
    "three_point_demo",
    "uniform_mixture",
]
