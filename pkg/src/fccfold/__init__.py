"""Peptide backbone folding on an FCC lattice as a higher-order binary optimisation problem."""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    LatticeConformation,
    TurnBasis,
    TurnBits,
    decode_conformation,
    decode_turn,
    enumerate_turn_table,
)
from .polynomial import BinaryPolynomial, evaluate, truncate_to_quadratic  # noqa: E402
from .hamiltonian import (  # noqa: E402
    AxisSelectors,
    MJTable,
    PenaltyFactors,
    assemble,
    build_continuity,
    build_crossing,
    build_hamiltonian,
    build_objective,
    build_overlap,
    calibrate_penalties,
    turn_component_polynomials,
)
from .solvers import AnnealSchedule, SampleSet, brute_force, simulated_annealing  # noqa: E402
from .quantum import (  # noqa: E402
    AnsatzConfig,
    PauliHamiltonian,
    VqeConfig,
    cvar_energy,
    pauli_term_count,
    simulate_ansatz,
    to_pauli,
    vqe_minimize,
)
from .analysis import (  # noqa: E402
    CartesianStructure,
    build_fes,
    contact_energy,
    detect_violations,
    kabsch_rmsd,
    radius_of_gyration,
    repair,
    select_representatives,
    to_angstrom,
)
