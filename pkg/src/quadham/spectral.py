"""Natural frequencies, ladder operators and normal-form reconstruction.

The characteristic polynomial P(lambda) = det(H - lambda I) of an adjoint
matrix is even, so its roots come in (+lambda, -lambda) pairs.  Each root
carries a ladder operator Z with [H_op, Z] = lambda Z, obtained from the
nullspace of (H - lambda I).  When none of the pairing commutators
sigma_j = [Z_j, Z_{2K-j+1}] vanishes the Hamiltonian can be rebuilt as

    H_op = - sum_j (lambda_j / sigma_j) Z_{2K-j+1} Z_j + E0,

which also yields the algebraic ground energy E0.  Vanishing sigma_j signals
an exceptional point (handled by the `jordan` module).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    LinearForm,
    QuadraticHamiltonian,
    StructureError,
    ToleranceConfig,
    adjoint_matrix,
    canonicalize,
    commute_linear,
    matrices_equal,
    max_abs,
    product,
    _u_matrix,
)

__all__ = [
    "DegenerateSpectrumError",
    "DefectiveMatrixError",
    "ExceptionalPointError",
    "ALL_REAL",
    "COMPLEX_PAIRS",
    "DEGENERATE",
    "CharPoly",
    "FrequencySpectrum",
    "LadderOperator",
    "SpectralDecomposition",
    "characteristic_polynomial",
    "natural_frequencies",
    "ladder_operators",
    "reconstruct",
    "rescale_component",
    "is_bounded_below",
]


class DegenerateSpectrumError(ValueError):
    """Eigenvalues coalesce; ladder construction must go through `jordan`."""


class DefectiveMatrixError(ValueError):
    """Nullspace dimension does not match the algebraic multiplicity."""


class ExceptionalPointError(ValueError):
    """A pairing commutator sigma_j vanishes (commutator breaking)."""


ALL_REAL = "all-real"
COMPLEX_PAIRS = "complex-pairs"
DEGENERATE = "degenerate"


@dataclass(frozen=True, eq=False)
class CharPoly:
    """det(H - lambda I) with coefficients in descending degree.

    `coeffs` has length 2K+1 with leading coefficient 1; `even_part` holds the
    K+1 coefficients of the same polynomial in mu = lambda^2 (odd-degree
    coefficients vanish for every adjoint matrix).
    """

    coeffs: np.ndarray
    even_part: np.ndarray

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True, eq=False)
class FrequencySpectrum:
    """The 2K natural frequencies, ordered so lambda_j = -lambda_{2K-j+1}.

    classification is one of ALL_REAL, COMPLEX_PAIRS, DEGENERATE.  In the
    all-real case the ordering is lambda_1 < .. < lambda_K < 0 < lambda_{K+1}
    < .. < lambda_2K.  `pairing` lists the K (j, 2K-1-j) index pairs
    (0-based).
    """

    lambdas: np.ndarray
    classification: str
    pairing: tuple[tuple[int, int], ...]

    @property
    def K(self) -> int:
        return len(self.lambdas) // 2


@dataclass(frozen=True, eq=False)
class LadderOperator:
    """A linear form Z with [H_op, Z] = eigenvalue * Z."""

    form: LinearForm
    eigenvalue: complex


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ladder operators in spectrum order plus pairing data.

    sigmas[j] = [Z_j, Z_{2K-1-j}] (0-based pairing); ground_energy is the E0
    of the reconstruction identity.
    """

    ladders: tuple[LadderOperator, ...]
    sigmas: np.ndarray
    ground_energy: complex


# ── characteristic polynomial ────────────────────────────────────────────


def characteristic_polynomial(
    H: np.ndarray, tol: ToleranceConfig | None = None
) -> CharPoly:
    """Coefficients of det(H - lambda I) via the Faddeev-LeVerrier recurrence.

    For even dimension det(H - lambda I) = det(lambda I - H), so the leading
    coefficient is 1.  Raises StructureError if any odd-degree coefficient
    survives beyond tolerance, since evenness is a theorem for adjoint
    matrices.
    """
    tol = tol or DEFAULT_TOL
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    if H.ndim != 2 or H.shape != (n, n):
        raise ValueError(f"matrix must be square, got {H.shape}")
    if n % 2:
        raise ValueError(f"adjoint matrices have even dimension, got {n}")

    # M_k = H M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(H M_k)/k
    coeffs = np.empty(n + 1, dtype=complex)
    coeffs[0] = 1.0
    M = np.zeros_like(H)
    eye = np.eye(n)
    for k in range(1, n + 1):
        M = H @ M + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(H @ M) / k

    scale = 1.0 + max_abs(coeffs)
    odd = coeffs[1::2]
    if max_abs(odd) > tol.eq_tol * scale:
        raise StructureError(
            "characteristic polynomial has odd-degree terms "
            f"(max magnitude {max_abs(odd):.3e}); input is not a valid adjoint matrix"
        )
    return CharPoly(coeffs=coeffs, even_part=coeffs[0::2].copy())


def _even_roots(even: np.ndarray) -> np.ndarray:
    """Roots in mu = lambda^2 of the even part (descending coefficients).

    Closed form for K <= 2, companion-matrix eigensolve otherwise.
    """
    K = len(even) - 1
    if K == 1:
        return np.array([-even[1] / even[0]])
    if K == 2:
        _, c1, c0 = even
        disc = c1 * c1 - 4.0 * c0
        sq = np.sqrt(complex(disc))
        return np.array([(-c1 + sq) / 2.0, (-c1 - sq) / 2.0])
    return np.roots(even)


def natural_frequencies(
    H: np.ndarray, tol: ToleranceConfig | None = None
) -> FrequencySpectrum:
    """Eigenvalues of the adjoint matrix from its characteristic polynomial.

    The even part is solved in mu = lambda^2 and the +/- square-root pairs are
    assembled so that lambda_j = -lambda_{2K-j+1} holds exactly.  The spectrum
    is classified DEGENERATE when any two of the 2K values coalesce within
    coalesce_tol (relative to the spectral radius); this covers both a
    repeated mu root and a mu root at zero.
    """
    tol = tol or DEFAULT_TOL
    cp = characteristic_polynomial(H, tol)
    K = cp.order // 2
    mu = _even_roots(cp.even_part)

    # principal branch: Re w > 0, with Im w >= 0 on the imaginary axis
    w = np.sqrt(mu.astype(complex))
    w = np.where((w.real < 0) | ((w.real == 0) & (w.imag < 0)), -w, w)

    radius = max_abs(w)
    gap = tol.coalesce_tol * (1.0 + radius)

    lam_all = np.concatenate([-w, w])
    degenerate = False
    for i in range(2 * K):
        for j in range(i + 1, 2 * K):
            if abs(lam_all[i] - lam_all[j]) <= gap:
                degenerate = True
    all_real = bool(np.all(np.abs(w.imag) <= gap))

    if all_real:
        w = w.real.astype(complex)  # snap classification-level noise
        order = np.argsort(w.real)
    else:
        order = np.lexsort((w.imag, w.real))
    w = w[order]
    lambdas = np.concatenate([-w[::-1], w])

    if degenerate:
        classification = DEGENERATE
    elif all_real:
        classification = ALL_REAL
    else:
        classification = COMPLEX_PAIRS

    pairing = tuple((j, 2 * K - 1 - j) for j in range(K))
    return FrequencySpectrum(
        lambdas=lambdas, classification=classification, pairing=pairing
    )


# ── ladder operators ─────────────────────────────────────────────────────


def _nullspace(A: np.ndarray, rank_tol: float) -> np.ndarray:
    """Orthonormal nullspace basis (columns) by SVD with a relative cutoff."""
    _, s, vh = np.linalg.svd(A)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(A.shape[1], dtype=complex)
    rank = int(np.sum(s > rank_tol * s[0]))
    return vh[rank:].conj().T


def _gauge_fix(v: np.ndarray, rank_tol: float) -> np.ndarray:
    """Unit Euclidean norm, first significant component rotated to +real."""
    v = v / np.linalg.norm(v)
    mags = np.abs(v)
    idx = int(np.argmax(mags > rank_tol * mags.max()))
    phase = v[idx] / abs(v[idx])
    return v * np.conj(phase)


def ladder_operators(
    Q: QuadraticHamiltonian,
    spectrum: FrequencySpectrum | None = None,
    tol: ToleranceConfig | None = None,
) -> SpectralDecomposition:
    """Ladder operator for each natural frequency, with pairing commutators.

    Each Z_i is the gauge-fixed nullspace vector of (H - lambda_i I).  The
    spectrum must not be degenerate (use `jordan` for defective or coalesced
    cases).  The ground energy comes from the reconstruction identity.

    Raises
    ------
    DegenerateSpectrumError : eigenvalues coalesce.
    DefectiveMatrixError    : a nullspace dimension differs from 1.
    ExceptionalPointError   : some pairing commutator vanishes.
    """
    tol = tol or DEFAULT_TOL
    H = adjoint_matrix(Q)
    if spectrum is None:
        spectrum = natural_frequencies(H, tol)
    if spectrum.classification == DEGENERATE:
        raise DegenerateSpectrumError(
            "spectrum is degenerate (eigenvalues coalesce); "
            "use jordan.jordan_form for the defective analysis"
        )

    n = H.shape[0]
    eye = np.eye(n)
    ladders = []
    for lam in spectrum.lambdas:
        ns = _nullspace(H - lam * eye, tol.rank_tol)
        if ns.shape[1] != 1:
            raise DefectiveMatrixError(
                f"nullspace of (H - {lam:.6g} I) has dimension {ns.shape[1]}, "
                "expected 1 for a simple eigenvalue"
            )
        v = _gauge_fix(ns[:, 0], tol.rank_tol)
        ladders.append(LadderOperator(LinearForm(Q.basis, v), complex(lam)))

    K = spectrum.K
    sigmas = np.array(
        [
            commute_linear(ladders[j].form, ladders[2 * K - 1 - j].form)
            for j in range(K)
        ]
    )
    gamma_rec, offset_rec = _pair_expansion(ladders, sigmas, tol)
    e0 = canonicalize(Q).offset - offset_rec
    return SpectralDecomposition(
        ladders=tuple(ladders), sigmas=sigmas, ground_energy=complex(e0)
    )


def _pair_expansion(ladders, sigmas, tol: ToleranceConfig):
    """gamma and offset of - sum_j (lambda_j / sigma_j) Z_{2K-1-j} Z_j."""
    K = len(sigmas)
    gamma = np.zeros((2 * K, 2 * K), dtype=complex)
    offset = 0.0 + 0.0j
    for j in range(K):
        zj = ladders[j]
        zp = ladders[2 * K - 1 - j]
        scale = np.linalg.norm(zj.form.coeffs) * np.linalg.norm(zp.form.coeffs)
        if abs(sigmas[j]) <= tol.rank_tol * scale:
            raise ExceptionalPointError(
                f"pairing commutator sigma_{j + 1} = {sigmas[j]:.3e} vanishes "
                "(commutator breaking at an exceptional point)"
            )
        term = canonicalize(
            complex(-zj.eigenvalue / sigmas[j]) * product(zp.form, zj.form)
        )
        gamma = gamma + term.gamma
        offset = offset + term.offset
    return gamma, offset


def reconstruct(
    Q: QuadraticHamiltonian,
    decomposition: SpectralDecomposition,
    tol: ToleranceConfig | None = None,
) -> tuple[QuadraticHamiltonian, complex]:
    """Rebuild Q from its ladder operators and solve for the ground energy.

    Expands - sum_j (lambda_j / sigma_j) Z_{2K-1-j} Z_j, canonicalizes, and
    determines E0 as the offset difference against canonicalize(Q).  The
    quadratic parts must agree within eq_tol; a mismatch means the
    decomposition does not belong to Q.
    """
    tol = tol or DEFAULT_TOL
    gamma_rec, offset_rec = _pair_expansion(
        decomposition.ladders, decomposition.sigmas, tol
    )
    q_can = canonicalize(Q)
    if not matrices_equal(gamma_rec, q_can.gamma, tol.eq_tol):
        raise RuntimeError(
            "reconstruction mismatch: expanded gamma differs from the "
            f"original by {max_abs(gamma_rec - q_can.gamma):.3e}"
        )
    e0 = q_can.offset - offset_rec
    rebuilt = QuadraticHamiltonian(Q.basis, gamma_rec, offset_rec + e0)
    return rebuilt, complex(e0)


def rescale_component(
    ladder: LadderOperator, label: str, value: complex = 1.0
) -> LadderOperator:
    """Rescale a ladder operator so the coefficient at `label` equals `value`.

    Useful for comparing against closed-form conventions that pin one
    component instead of the Euclidean norm.
    """
    idx = ladder.form.basis.index(label)
    cur = ladder.form.coeffs[idx]
    if cur == 0:
        raise ValueError(f"component {label!r} is zero; cannot rescale")
    return LadderOperator(ladder.form.scaled(complex(value) / cur), ladder.eigenvalue)


def is_bounded_below(
    Q: QuadraticHamiltonian,
    decomposition: SpectralDecomposition,
    tol: ToleranceConfig | None = None,
) -> bool | None:
    """Whether the operator spectrum is bounded from below, when decidable.

    For a Hermitian Hamiltonian with an all-real frequency spectrum, each
    lowering operator Z_j (lambda_j < 0) satisfies [Z_j, Z_j^dagger] = s_j
    with s_j real; the mode contributes +|lambda_j|(n + 1/2) when s_j > 0 and
    an inverted tower when s_j < 0.  Returns None when the criterion does not
    apply (non-Hermitian gamma, complex frequencies, or s_j too small to
    call).
    """
    tol = tol or DEFAULT_TOL
    g = Q.gamma
    if not matrices_equal(g, g.conj().T, tol.eq_tol):
        return None
    K = Q.basis.K
    signs = []
    for j in range(K):
        zj = decomposition.ladders[j]
        if abs(zj.eigenvalue.imag) > tol.coalesce_tol * (1.0 + abs(zj.eigenvalue)):
            return None
        s = commute_linear(zj.form, zj.form.dagger())
        if abs(s) <= tol.rank_tol:
            return None
        signs.append(s.real > 0)
    return all(signs)
