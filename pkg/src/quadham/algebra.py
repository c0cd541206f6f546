"""Operator calculus for quadratic Hamiltonians over the Heisenberg basis.

A quadratic Hamiltonian in K coordinates and K conjugate momenta is stored as
a coefficient matrix gamma over the ordered basis (x_1..x_K, p_1..p_K), with
hbar = 1 so that [x_m, p_n] = i delta_mn.  Every commutator of two basis
elements is a scalar, [O_i, O_j] = U_ij, where U is the canonical symplectic
matrix i * [[0, I], [-I, 0]].  The commutator action of the Hamiltonian on the
basis is encoded by its adjoint (regular) matrix H = (gamma + gamma^T) U,
which satisfies [H_op, O_i] = sum_j H_ji O_j and the structure identity
U H^T U = -H.

All values are immutable and all operations are pure functions, so everything
here is safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "BasisMismatchError",
    "StructureError",
    "ToleranceConfig",
    "DEFAULT_TOL",
    "OperatorBasis",
    "QuadraticHamiltonian",
    "LinearForm",
    "SymplecticForm",
    "symplectic_matrix",
    "canonicalize",
    "adjoint_matrix",
    "commute_linear",
    "commute_h_linear",
    "product",
    "is_pseudo_hermitian",
    "check_structure",
    "structure_residual",
    "antiunitary_invariant",
    "max_abs",
    "matrices_equal",
]


class BasisMismatchError(ValueError):
    """Two operands live on different operator bases."""


class StructureError(ValueError):
    """A matrix violates the structure required of an adjoint representation."""


def max_abs(a) -> float:
    """Max-norm (largest entry magnitude) of an array or scalar."""
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def matrices_equal(a, b, eq_tol: float) -> bool:
    """Entrywise equality in max-norm, with the absolute tolerance scaled by
    (1 + largest entry magnitude) because entries may span several orders
    (e.g. omega^4 against 1)."""
    a = np.asarray(a)
    b = np.asarray(b)
    scale = 1.0 + max(max_abs(a), max_abs(b))
    return max_abs(a - b) <= eq_tol * scale


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical policy knobs shared across the analysis.

    eq_tol       : matrix/scalar equality threshold (absolute, scaled by
                   1 + max entry magnitude).
    rank_tol     : singular-value cutoff for rank/nullspace decisions,
                   relative to the largest singular value.
    coalesce_tol : eigenvalue-coalescence threshold, relative to the
                   spectral radius (scaled by 1 + radius).
    """

    eq_tol: float = 1e-10
    rank_tol: float = 1e-9
    coalesce_tol: float = 1e-8

    def __post_init__(self):
        for name in ("eq_tol", "rank_tol", "coalesce_tol"):
            v = getattr(self, name)
            if not (v > 0.0):
                raise ValueError(f"{name} must be strictly positive, got {v!r}")


DEFAULT_TOL = ToleranceConfig()


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class OperatorBasis:
    """Ordered operator basis (x_1..x_K, p_1..p_K) for K degrees of freedom."""

    K: int
    labels: tuple[str, ...]

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"need at least one degree of freedom, got K={self.K}")
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != 2 * self.K:
            raise ValueError(
                f"basis needs exactly {2 * self.K} labels, got {len(self.labels)}"
            )
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be distinct")

    @classmethod
    def default(cls, K: int) -> "OperatorBasis":
        if K == 1:
            return cls(1, ("x", "p"))
        names = tuple(f"x{i + 1}" for i in range(K)) + tuple(
            f"p{i + 1}" for i in range(K)
        )
        return cls(K, names)

    @property
    def dim(self) -> int:
        return 2 * self.K

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown basis label {label!r}; have {self.labels}") from None


@dataclass(frozen=True, eq=False)
class LinearForm:
    """A linear combination sum_i c_i O_i of basis operators."""

    basis: OperatorBasis
    coeffs: np.ndarray

    def __post_init__(self):
        c = _freeze(np.asarray(self.coeffs).reshape(-1))
        if c.shape != (self.basis.dim,):
            raise ValueError(
                f"coefficient vector must have length {self.basis.dim}, got {c.shape}"
            )
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def unit(cls, basis: OperatorBasis, label: str) -> "LinearForm":
        """The single basis operator named `label`."""
        c = np.zeros(basis.dim, dtype=complex)
        c[basis.index(label)] = 1.0
        return cls(basis, c)

    def dagger(self) -> "LinearForm":
        """Hermitian adjoint: basis operators are Hermitian, so conjugate the
        coefficients."""
        return LinearForm(self.basis, np.conj(self.coeffs))

    def scaled(self, factor: complex) -> "LinearForm":
        return LinearForm(self.basis, factor * self.coeffs)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        _require_same_basis(self.basis, other.basis)
        return LinearForm(self.basis, self.coeffs + other.coeffs)

    def __rmul__(self, factor: complex) -> "LinearForm":
        return self.scaled(factor)


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    """H = sum_ij gamma_ij O_i O_j + offset, over a fixed operator basis."""

    basis: OperatorBasis
    gamma: np.ndarray
    offset: complex = 0.0

    def __post_init__(self):
        g = _freeze(np.asarray(self.gamma))
        n = self.basis.dim
        if g.shape != (n, n):
            raise ValueError(f"gamma must be {n}x{n}, got {g.shape}")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "offset", complex(self.offset))

    @property
    def K(self) -> int:
        return self.basis.K

    def shifted(self, delta: complex) -> "QuadraticHamiltonian":
        """Add a constant to the operator."""
        return replace(self, offset=self.offset + complex(delta))

    def __add__(self, other: "QuadraticHamiltonian") -> "QuadraticHamiltonian":
        _require_same_basis(self.basis, other.basis)
        return QuadraticHamiltonian(
            self.basis, self.gamma + other.gamma, self.offset + other.offset
        )

    def __rmul__(self, factor: complex) -> "QuadraticHamiltonian":
        factor = complex(factor)
        return QuadraticHamiltonian(
            self.basis, factor * self.gamma, factor * self.offset
        )


@dataclass(frozen=True, eq=False)
class SymplecticForm:
    """The commutator table [O_i, O_j] = U_ij, i.e. U = i [[0, I], [-I, 0]]."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _freeze(np.asarray(self.matrix))
        n = m.shape[0]
        if m.ndim != 2 or m.shape != (n, n) or n % 2:
            raise ValueError(f"symplectic matrix must be square of even size, got {m.shape}")
        if max_abs(m.real) > 0.0 or max_abs(m + m.T) > 0.0:
            raise ValueError("symplectic matrix must be purely imaginary and antisymmetric")
        if max_abs(m @ m - np.eye(n)) > 1e-12:
            raise ValueError("symplectic matrix must be self-inverse")
        object.__setattr__(self, "matrix", m)

    @property
    def K(self) -> int:
        return self.matrix.shape[0] // 2


def _require_same_basis(b1: OperatorBasis, b2: OperatorBasis) -> None:
    if b1 != b2:
        raise BasisMismatchError(f"operands live on different bases: {b1} vs {b2}")


def _u_matrix(K: int) -> np.ndarray:
    u = np.zeros((2 * K, 2 * K), dtype=complex)
    u[:K, K:] = 1j * np.eye(K)
    u[K:, :K] = -1j * np.eye(K)
    return u


def symplectic_matrix(K: int) -> SymplecticForm:
    """Canonical commutator matrix for K degrees of freedom.

    Satisfies U^dagger = U^{-1} = U; purely imaginary and antisymmetric.
    """
    if not isinstance(K, (int, np.integer)) or K < 1:
        raise ValueError(f"K must be a positive integer, got {K!r}")
    return SymplecticForm(_u_matrix(int(K)))


def canonicalize(Q: QuadraticHamiltonian) -> QuadraticHamiltonian:
    """Rewrite Q with symmetric gamma, folding the reordering constant into
    the offset.

    The antisymmetric part a = (gamma - gamma^T)/2 contributes the scalar
    (1/2) sum_ij a_ij U_ij, since sum_ij a_ij O_i O_j = (1/2) sum_ij a_ij
    [O_i, O_j].  The returned Hamiltonian is the identical operator, and
    operator equality becomes decidable on the (symmetric gamma, offset) pair.
    """
    g = Q.gamma
    sym = (g + g.T) / 2.0
    anti = (g - g.T) / 2.0
    if max_abs(anti) == 0.0:
        return Q
    u = _u_matrix(Q.K)
    shift = 0.5 * complex(np.sum(anti * u))
    return QuadraticHamiltonian(Q.basis, sym, Q.offset + shift)


def adjoint_matrix(Q: QuadraticHamiltonian) -> np.ndarray:
    """Adjoint (regular) matrix representation H = (gamma + gamma^T) U.

    Column i holds the coefficients of [H_op, O_i] over the basis.  The
    additive offset of Q does not contribute.
    """
    return (Q.gamma + Q.gamma.T) @ _u_matrix(Q.K)


def commute_linear(L1: LinearForm, L2: LinearForm) -> complex:
    """Scalar commutator [L1, L2] = c1^T U c2 (bilinear, no conjugation)."""
    _require_same_basis(L1.basis, L2.basis)
    return complex(L1.coeffs @ _u_matrix(L1.basis.K) @ L2.coeffs)


def commute_h_linear(Q: QuadraticHamiltonian, L: LinearForm) -> LinearForm:
    """Commutator [H_op, L] as a linear form: coefficient vector H c."""
    _require_same_basis(Q.basis, L.basis)
    return LinearForm(L.basis, adjoint_matrix(Q) @ L.coeffs)


def product(L1: LinearForm, L2: LinearForm) -> QuadraticHamiltonian:
    """Operator product L1 L2 as a quadratic Hamiltonian (gamma = c1 c2^T).

    The result is not canonicalized; canonicalize before comparing operators.
    """
    _require_same_basis(L1.basis, L2.basis)
    return QuadraticHamiltonian(L1.basis, np.outer(L1.coeffs, L2.coeffs))


def is_pseudo_hermitian(Q: QuadraticHamiltonian, tol: ToleranceConfig | None = None) -> bool:
    """Whether H^dagger = U H U for the adjoint matrix of Q.

    Guaranteed whenever gamma is Hermitian; the converse direction is what
    makes this a useful diagnostic for complex couplings.
    """
    tol = tol or DEFAULT_TOL
    h = adjoint_matrix(Q)
    u = _u_matrix(Q.K)
    return matrices_equal(h.conj().T, u @ h @ u, tol.eq_tol)


def structure_residual(H: np.ndarray) -> float:
    """Max-norm of U H^T U + H; zero for every genuine adjoint matrix."""
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    if H.ndim != 2 or H.shape != (n, n) or n % 2:
        raise ValueError(f"adjoint matrix must be square of even size, got {H.shape}")
    u = _u_matrix(n // 2)
    return max_abs(u @ H.T @ u + H)


def check_structure(Q: QuadraticHamiltonian, tol: ToleranceConfig | None = None) -> bool:
    """Self-test of the adjoint map: U H^T U = -H must hold for every Q.

    The identity follows from the Jacobi identity and holds for arbitrary
    gamma, so a failure indicates a corrupted matrix, not an unusual model.
    """
    tol = tol or DEFAULT_TOL
    h = adjoint_matrix(Q)
    scale = 1.0 + max_abs(h)
    return structure_residual(h) <= tol.eq_tol * scale


def antiunitary_invariant(
    Q: QuadraticHamiltonian, signs, tol: ToleranceConfig | None = None
) -> bool:
    """Invariance of Q under O_i -> signs_i O_i combined with complex
    conjugation (an antiunitary map).

    At the coefficient level the condition reads D gamma* D = gamma with
    D = diag(signs).  `signs` must contain only +1 and -1.
    """
    tol = tol or DEFAULT_TOL
    signs = np.asarray(signs, dtype=float).reshape(-1)
    if signs.shape != (Q.basis.dim,):
        raise ValueError(f"signs must have length {Q.basis.dim}, got {signs.shape}")
    if not np.all(np.abs(signs) == 1.0):
        raise ValueError("signs entries must be +1 or -1")
    d = np.diag(signs)
    return matrices_equal(d @ Q.gamma.conj() @ d, Q.gamma, tol.eq_tol)
