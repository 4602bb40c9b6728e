"""
qlab: a numerical laboratory for coarse-grained measurements on large spins.

Spin-s states and operators, sphere quadrature with slot partitions,
Husimi Q tables, slot POVMs with back-action, CHSH tests for three
measurement families, and closed-form precision limits.
"""

__version__ = "0.1.0"

from .bell import (
    ChshResult,
    DichotomicMeasurement,
    ViolationWindowRow,
    chsh,
    chsh_scan,
    correlation,
    direction_in_plane,
    measurement_effects,
    violation_window,
)
from .coarse_povm import (
    HiddenJointTable,
    JointOutcomeTable,
    PovmElement,
    hidden_joint_distribution,
    joint_probabilities,
    kraus_from_povm,
    povm_elements,
    reduced_state,
)
from .errors import NumericalAccuracyError, QuadratureTooCoarseError, UndefinedReductionError
from .husimi import (
    QTable1,
    QTable2,
    amplitude_table,
    q_joint,
    q_mixture_deviation,
    q_single,
    reduced_density,
)
from .limits import (
    ApparatusScenario,
    ConstantsProfile,
    PAPER_OOM,
    PRECISE,
    ReportRow,
    causal_angle,
    default_scenarios,
    load_profile,
    max_spin,
    planck_angle,
    profile_by_name,
    scenario_report,
    schwarzschild_radius,
    sql_angle,
)
from .sphere import (
    SlotPartition,
    SphereGrid,
    gauss_legendre_grid,
    hemisphere_partition,
    partition_intersection,
    polar_band_partition,
)
from .spin_core import (
    SphereDirection,
    SpinLength,
    TwoSpinState,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    angle_between,
    cat_rotation,
    coherent_amplitude_table,
    coherent_amplitudes,
    macro_entangled_state,
    rotation,
    singlet_state,
    spin_component,
    spin_lowering,
    spin_raising,
    spin_x,
    spin_y,
    spin_z,
    wigner_small_d,
)
