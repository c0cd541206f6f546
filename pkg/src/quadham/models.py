"""Built-in oscillator models with closed-form reference values.

Two families: a fourth-order oscillator built from one coordinate pair with
an x p_y coupling (basis x, y, p_x, p_y), and the textbook pair of coupled
masses quantized through its normal modes (basis x1, x2, p1, p2).  Everything
is dimensionless with hbar = 1.

The general fourth-order family is

    H = 1/2 p_x^2 + a x p_y + (omega1^2 + omega2^2)/2 x^2
        + b omega1^2 omega2^2 / 2 y^2,

with complex parameters a, b.  Its squared natural frequencies are

    xi_pm = [omega1^2 + omega2^2
             +- sqrt(4 a^2 b omega1^2 omega2^2 + (omega1^2 + omega2^2)^2)] / 2,

real precisely when -(omega1^2+omega2^2)^2 / (4 omega1^2 omega2^2) < a^2 b < 0.
The choices (a=1, b=-1) and (a=-i, b=+1) give the Hermitian and the
PT-symmetric variants; both have a^2 b = -1, hence frequencies
{+-omega1, +-omega2}.  For the PT variant either sign of a = -+i yields the
same -i x p_y coupling up to relabeling; we fix a = -i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    LinearForm,
    OperatorBasis,
    QuadraticHamiltonian,
    ToleranceConfig,
    matrices_equal,
)

__all__ = [
    "PU_BASIS",
    "COUPLED_BASIS",
    "PUParams",
    "REALITY_REAL",
    "REALITY_BOUNDARY",
    "REALITY_COMPLEX",
    "pais_uhlenbeck_general",
    "pais_uhlenbeck",
    "pais_uhlenbeck_pt",
    "pu_reference_ladders",
    "xi_frequencies",
    "reality_class",
    "coupled_masses",
    "normal_mode_transform",
    "separable_spectrum",
    "annihilation_ops",
    "single_oscillator",
]

PU_BASIS = OperatorBasis(2, ("x", "y", "px", "py"))
COUPLED_BASIS = OperatorBasis(2, ("x1", "x2", "p1", "p2"))

REALITY_REAL = "real"
REALITY_BOUNDARY = "exceptional-boundary"
REALITY_COMPLEX = "complex"


@dataclass(frozen=True)
class PUParams:
    """Parameters of the general fourth-order oscillator."""

    a: complex = 1.0
    b: complex = -1.0
    omega1: float = 1.0
    omega2: float = 1.0

    def __post_init__(self):
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise ValueError(
                f"frequencies must be positive, got ({self.omega1}, {self.omega2})"
            )
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))


# ── fourth-order oscillator family ───────────────────────────────────────


def pais_uhlenbeck_general(p: PUParams) -> QuadraticHamiltonian:
    """H = 1/2 px^2 + a x py + (w1^2+w2^2)/2 x^2 + b w1^2 w2^2/2 y^2."""
    w1s, w2s = p.omega1**2, p.omega2**2
    g = np.zeros((4, 4), dtype=complex)
    g[2, 2] = 0.5
    g[0, 3] = p.a / 2.0
    g[3, 0] = p.a / 2.0
    g[0, 0] = (w1s + w2s) / 2.0
    g[1, 1] = p.b * w1s * w2s / 2.0
    return QuadraticHamiltonian(PU_BASIS, g)


def pais_uhlenbeck(omega1: float, omega2: float) -> QuadraticHamiltonian:
    """Hermitian variant (a=1, b=-1): real x p_y coupling, inverted y^2."""
    return pais_uhlenbeck_general(PUParams(1.0, -1.0, omega1, omega2))


def pais_uhlenbeck_pt(omega1: float, omega2: float) -> QuadraticHamiltonian:
    """PT-symmetric variant (a=-i, b=+1): -i x p_y coupling, upright y^2."""
    return pais_uhlenbeck_general(PUParams(-1j, 1.0, omega1, omega2))


def pu_reference_ladders(p: PUParams) -> tuple[LinearForm, LinearForm, LinearForm, LinearForm]:
    """Closed-form ladder operators of the a^2 b = -1 family, with the
    pinned-component normalization (p_x coefficient = 1).

    Z1, Z2 carry frequencies -omega1, -omega2; Z4, Z3 their negatives.  Only
    valid as eigenvectors when a^2 b = -1 (both built-in variants).
    """
    a, w1, w2 = p.a, p.omega1, p.omega2
    z1 = np.array([-1j * w1, w2**2 / a, 1.0, -1j * a / w1])
    z2 = np.array([-1j * w2, w1**2 / a, 1.0, -1j * a / w2])
    z3 = np.array([1j * w2, w1**2 / a, 1.0, 1j * a / w2])
    z4 = np.array([1j * w1, w2**2 / a, 1.0, 1j * a / w1])
    return tuple(LinearForm(PU_BASIS, z) for z in (z1, z2, z3, z4))


def xi_frequencies(p: PUParams) -> tuple[complex, complex]:
    """Squared natural frequencies xi_+ and xi_- (principal square root)."""
    s = p.omega1**2 + p.omega2**2
    disc = 4.0 * p.a**2 * p.b * p.omega1**2 * p.omega2**2 + s * s
    sq = np.sqrt(complex(disc))
    return complex((s + sq) / 2.0), complex((s - sq) / 2.0)


def reality_class(p: PUParams, tol: ToleranceConfig | None = None) -> str:
    """Classify the spectrum reality from the coupling product a^2 b.

    The frequencies are real exactly when a^2 b lies strictly inside
    (-(w1^2+w2^2)^2 / (4 w1^2 w2^2), 0); within coalesce_tol of either
    endpoint the spectrum is at an exceptional boundary.  The interval test
    presumes a real product, so complex a^2 b is rejected.
    """
    tol = tol or DEFAULT_TOL
    a2b = p.a**2 * p.b
    scale = abs(a2b) + 1.0
    if abs(a2b.imag) > tol.eq_tol * scale:
        raise ValueError(
            f"reality classification needs a real a^2 b, got {a2b:.6g}; "
            "classify via the frequency spectrum instead"
        )
    v = a2b.real
    lower = -((p.omega1**2 + p.omega2**2) ** 2) / (4.0 * p.omega1**2 * p.omega2**2)
    edge = tol.coalesce_tol * (1.0 + abs(lower))
    if abs(v - lower) <= edge or abs(v) <= edge:
        return REALITY_BOUNDARY
    if lower < v < 0.0:
        return REALITY_REAL
    return REALITY_COMPLEX


# ── coupled masses (trivial fourth-order quantization) ───────────────────


def coupled_masses(omega1: float, omega2: float) -> QuadraticHamiltonian:
    """Two equal masses between walls, coupled by a middle spring.

    H = 1/2 (p1^2 + p2^2) + w1^2/4 (x1 - x2)^2 + w2^2/4 (x1 + x2)^2 with the
    force constants already expressed through the normal-mode frequencies.
    Bounded from below for all positive frequencies.
    """
    if not (omega1 > 0 and omega2 > 0):
        raise ValueError(f"frequencies must be positive, got ({omega1}, {omega2})")
    w1s, w2s = omega1**2, omega2**2
    g = np.zeros((4, 4), dtype=complex)
    g[2, 2] = 0.5
    g[3, 3] = 0.5
    g[0, 0] = (w1s + w2s) / 4.0
    g[1, 1] = (w1s + w2s) / 4.0
    g[0, 1] = (w2s - w1s) / 4.0
    g[1, 0] = (w2s - w1s) / 4.0
    return QuadraticHamiltonian(COUPLED_BASIS, g)


def normal_mode_transform(
    Q: QuadraticHamiltonian, R: np.ndarray, tol: ToleranceConfig | None = None
) -> QuadraticHamiltonian:
    """Orthogonal point transformation x' = R x, p' = R p.

    gamma transforms by congruence with blockdiag(R, R): gamma' = B gamma
    B^T.  The adjoint spectrum is invariant.  R must be real orthogonal.
    """
    tol = tol or DEFAULT_TOL
    R = np.asarray(R, dtype=float)
    K = Q.basis.K
    if R.shape != (K, K):
        raise ValueError(f"R must be {K}x{K}, got {R.shape}")
    if not matrices_equal(R @ R.T, np.eye(K), tol.eq_tol):
        raise ValueError("R must be orthogonal")
    B = np.zeros((2 * K, 2 * K))
    B[:K, :K] = R
    B[K:, K:] = R
    return QuadraticHamiltonian(Q.basis, B @ Q.gamma @ B.T, Q.offset)


def separable_spectrum(
    omega1: float, omega2: float, nmax: int
) -> list[tuple[int, int, float]]:
    """Exact two-mode spectrum E = w1 (n1 + 1/2) + w2 (n2 + 1/2).

    All levels with 0 <= n1, n2 <= nmax, sorted ascending by energy with
    (n1, n2) as the tie-break.
    """
    if not (omega1 > 0 and omega2 > 0):
        raise ValueError(f"frequencies must be positive, got ({omega1}, {omega2})")
    if nmax < 0:
        raise ValueError(f"nmax must be nonnegative, got {nmax}")
    levels = [
        (n1, n2, omega1 * (n1 + 0.5) + omega2 * (n2 + 0.5))
        for n1 in range(nmax + 1)
        for n2 in range(nmax + 1)
    ]
    return sorted(levels, key=lambda lv: (lv[2], lv[0], lv[1]))


def annihilation_ops(omega1: float, omega2: float) -> tuple[LinearForm, LinearForm]:
    """Normal-mode annihilation operators of the coupled-mass model.

    a1 = sqrt(w1)/2 (x1 - x2) + i/(2 sqrt(w1)) (p1 - p2)
    a2 = sqrt(w2)/2 (x1 + x2) - i/(2 sqrt(w2)) (p1 + p2)

    Both satisfy [a, a^dagger] = 1 and [H, a_j] = -omega_j a_j.
    """
    if not (omega1 > 0 and omega2 > 0):
        raise ValueError(f"frequencies must be positive, got ({omega1}, {omega2})")
    r1, r2 = np.sqrt(omega1), np.sqrt(omega2)
    a1 = np.array([r1 / 2.0, -r1 / 2.0, 1j / (2.0 * r1), -1j / (2.0 * r1)])
    a2 = np.array([r2 / 2.0, r2 / 2.0, -1j / (2.0 * r2), -1j / (2.0 * r2)])
    return LinearForm(COUPLED_BASIS, a1), LinearForm(COUPLED_BASIS, a2)


def single_oscillator(omega: float) -> QuadraticHamiltonian:
    """K=1 smoke-test model: H = 1/2 p^2 + 1/2 omega^2 x^2."""
    if not omega > 0:
        raise ValueError(f"frequency must be positive, got {omega}")
    g = np.array([[omega**2 / 2.0, 0.0], [0.0, 0.5]], dtype=complex)
    return QuadraticHamiltonian(OperatorBasis.default(1), g)
