"""Coulomb-gauge QED: lattice constraint analysis, Dirac brackets and tree-level amplitudes."""
from .amplitudes import (
    AmplitudeResult,
    compton_covariant,
    compton_final,
    compton_pieces,
    eemumu_coulomb,
    eemumu_covariant,
    eemumu_transverse,
)
from .classification import Classification, classify
from .consistency import ConsistencyResult, run_consistency
from .dirac import adjoint, slash, trace_product, u_spinor, v_spinor
from .dirac_bracket import DiracBracket, dirac_bracket
from .errors import (
    AlgorithmFailure,
    CoulqedError,
    DirectionError,
    FrameError,
    KinematicsError,
    ParityError,
    PoleError,
    StructureError,
    UnsupportedMassError,
    ZeroModeError,
)
from .graded import GradedPolynomial, PhaseSpace, gpb
from .kinematics import ComptonKinematics, PairKinematics
from .lattice import LatticeSpec
from .observables import CrossSectionPoint, dsigma_domega, spin_sum, total_sigma
from .polarization import PolarizationState, basis, mode_projection_identity, rotation
from .propagators import PropagatorFactor, coulomb_kernel, dirac_propagator, photon_propagator
from .qed import ConstraintFamily, ConstraintSet, QEDSystem, build_qed_system
from .wick import LadderOp, OperatorWord, normal_order, vev

__version__ = "0.1.0"
