"""Algebraic analysis of quadratic quantum Hamiltonians.

A quadratic function of K coordinates and K momenta is fully characterized by
its 2K x 2K adjoint (regular) matrix representation.  This package computes
that representation and everything the spectrum analysis needs on top of it:
natural frequencies, ladder operators, normal-form reconstruction with the
algebraic ground energy, pseudo-Hermiticity and antiunitary symmetry checks,
exceptional-point detection with the canonical Jordan form, and Heisenberg
time evolution with verification of the order-2K equation of motion.
"""

from .algebra import (
    BasisMismatchError,
    StructureError,
    ToleranceConfig,
    DEFAULT_TOL,
    OperatorBasis,
    QuadraticHamiltonian,
    LinearForm,
    SymplecticForm,
    symplectic_matrix,
    canonicalize,
    adjoint_matrix,
    commute_linear,
    commute_h_linear,
    product,
    is_pseudo_hermitian,
    check_structure,
    structure_residual,
    antiunitary_invariant,
    max_abs,
    matrices_equal,
)
from .spectral import (
    DegenerateSpectrumError,
    DefectiveMatrixError,
    ExceptionalPointError,
    ALL_REAL,
    COMPLEX_PAIRS,
    DEGENERATE,
    CharPoly,
    FrequencySpectrum,
    LadderOperator,
    SpectralDecomposition,
    characteristic_polynomial,
    natural_frequencies,
    ladder_operators,
    reconstruct,
    rescale_component,
    is_bounded_below,
)
from .jordan import (
    NumericalDegeneracyError,
    DefectReport,
    JordanDecomposition,
    multiplicities,
    is_exceptional,
    jordan_form,
)
from .dynamics import (
    EvolutionTrace,
    OdeCheckReport,
    propagator,
    evolve_observable,
    ode_check,
    PROPAGATOR_EXPONENT_BOUND,
)
from .models import (
    PU_BASIS,
    COUPLED_BASIS,
    PUParams,
    REALITY_REAL,
    REALITY_BOUNDARY,
    REALITY_COMPLEX,
    pais_uhlenbeck_general,
    pais_uhlenbeck,
    pais_uhlenbeck_pt,
    pu_reference_ladders,
    xi_frequencies,
    reality_class,
    coupled_masses,
    normal_mode_transform,
    separable_spectrum,
    annihilation_ops,
    single_oscillator,
)

__version__ = "0.1.0"
