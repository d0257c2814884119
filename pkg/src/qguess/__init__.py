"""Guessing-game certificates and the entanglement recovery they imply.

The package computes optimal guessing probabilities for conjugate
observables with primal/dual enclosures, builds the coherent recovery
circuit those measurements induce, and certifies the trade-off
relations connecting guessing, recovery fidelity, and complementarity.
"""

from .linalg import (
    Isometry,
    LabelError,
    LabeledState,
    Operator,
    SystemLabel,
    apply_operator,
    fidelity,
    herm,
    herm_eig,
    overlap,
    partial_trace,
    permute_systems,
    pinv_sqrt,
    psd_sqrt,
    purify,
    random_density,
    random_pure,
    reduce_matrix,
    tensor,
    trace_distance,
    trace_norm,
)
from .qops import (
    ConjugatePair,
    ThetaFamily,
    basis_kets,
    conjugate_pair,
    controlled_phase,
    fourier_basis,
    ghz,
    max_entangled,
    measure_dephase,
    omega,
    pauli_x,
    pauli_z,
    psi_z,
    theta_state,
    u_x,
    u_z,
    w_operator,
)
from .discrimination import (
    ConvergenceError,
    Ensemble,
    GuessCertificate,
    Povm,
    conditional_ensemble,
    guess_prob,
    helstrom,
    povm_value,
    pretty_good_measurement,
    shift_difference_measurement,
    solve_ensemble,
    strategy_value,
)
from .recovery import (
    ChannelChoi,
    FidelityEnclosure,
    RecoveryCircuit,
    build_recovery,
    circuit_fidelity,
    coherent_isometry,
    max_recovery_fidelity,
    max_sigma_fidelity,
    q_fidelity,
)
from .relations import (
    DualityPoint,
    RelationId,
    RelationReport,
    Verdict,
    bipartite_reports,
    check_duality,
    check_eq13,
    check_eq3,
    check_lemma1,
    check_qubit_circle,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    clamped_acos,
    duality_point,
    tripartite_reports,
)

__version__ = "1.0.0"

__all__ = [
    "ChannelChoi",
    "ConjugatePair",
    "ConvergenceError",
    "DualityPoint",
    "Ensemble",
    "FidelityEnclosure",
    "GuessCertificate",
    "Isometry",
    "LabelError",
    "LabeledState",
    "Operator",
    "Povm",
    "RecoveryCircuit",
    "RelationId",
    "RelationReport",
    "SystemLabel",
    "ThetaFamily",
    "Verdict",
    "apply_operator",
    "basis_kets",
    "bipartite_reports",
    "build_recovery",
    "check_duality",
    "check_eq13",
    "check_eq3",
    "check_lemma1",
    "check_qubit_circle",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "circuit_fidelity",
    "clamped_acos",
    "coherent_isometry",
    "conditional_ensemble",
    "conjugate_pair",
    "controlled_phase",
    "duality_point",
    "fidelity",
    "fourier_basis",
    "ghz",
    "guess_prob",
    "helstrom",
    "herm",
    "herm_eig",
    "max_entangled",
    "max_recovery_fidelity",
    "max_sigma_fidelity",
    "measure_dephase",
    "omega",
    "overlap",
    "partial_trace",
    "pauli_x",
    "pauli_z",
    "permute_systems",
    "pinv_sqrt",
    "povm_value",
    "pretty_good_measurement",
    "psd_sqrt",
    "psi_z",
    "purify",
    "q_fidelity",
    "random_density",
    "random_pure",
    "reduce_matrix",
    "shift_difference_measurement",
    "solve_ensemble",
    "strategy_value",
    "tensor",
    "theta_state",
    "trace_distance",
    "trace_norm",
    "u_x",
    "u_z",
    "w_operator",
]
