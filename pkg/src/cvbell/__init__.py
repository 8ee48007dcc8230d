"""Continuous-variable Bell correlations from Gaussian parametric sources.

Three independent routes to the CHSH quantity B of a parametric source:
closed-form Gaussian-moment analytics (:mod:`cvbell.bell` on states from
:mod:`cvbell.sources`), a Monte Carlo simulation of the synchronized
homodyne/dark-noise measurement protocol (:mod:`cvbell.protocol`), and a
truncated Fock-space photon-counting brute force (:mod:`cvbell.fock`).
"""

from .bell import (
    AngleSet,
    BellResult,
    CHSH_MAX_ANGLES,
    DetectionParams,
    SettingResult,
    SweepResult,
    SweepRow,
    bell_B,
    correlation_R_commutator,
    correlation_R_dark,
    e_value,
    optimize_angles,
    rotated_state,
    setting_pairs,
    sweep_squeezing,
    write_sweep_csv,
)
from .errors import (
    CvbellError,
    DegenerateEstimateError,
    DegenerateSourceError,
    InsufficientDataError,
)
from .fock import FockState, build_state, counting_B, counting_E
from .gaussian import (
    GaussianState,
    QuadratureIndex,
    SymplecticOp,
    apply,
    beamsplitter_pi2,
    fourth_moment,
    mode_permutation,
    polarization_rotation,
    reduce_to_modes,
    second_moment,
    single_mode_squeeze,
    symplectic_form,
    two_mode_squeeze,
    uncertainty_defect,
    vacuum,
)
from .protocol import (
    BellEstimate,
    DarkPortCheck,
    EstimateWithError,
    ProtocolConfig,
    ProtocolDataset,
    WindowRecord,
    dark_port_check,
    estimate_B,
    estimate_R,
    estimate_bell,
    run_protocol,
    write_dataset_csv,
    write_estimate_csv,
)
from .sources import (
    SourceKind,
    SourceParams,
    build_source,
    down_converter,
    four_opa_network,
    gain_from_squeezing_percent,
    squeezing_percent_from_gain,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
