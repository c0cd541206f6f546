"""Heisenberg evolution of observables and the order-2K equation of motion.

The basis operators evolve as the row vector O(t) = O exp(itH), where H is
the adjoint matrix.  A single observable with coefficient column c therefore
evolves as c(t) = exp(itH) c(0): writing L = sum_j c_j O_j and expanding
L(t) = sum_j c_j O_j(t) = sum_k (exp(itH) c)_k O_k moves the matrix from the
right of the row vector to the left of the column.  Getting this transpose
wrong is the classic sign bug, hence the explicit derivation here.

Because P(H) = 0 for the characteristic polynomial P (Cayley-Hamilton), every
dynamical variable obeys the order-2K differential equation
P(-i d/dt) O(t) = 0; `ode_check` verifies both facts numerically.  The
finite-difference side runs in extended precision: a fourth-derivative
stencil at spacing h amplifies sample roundoff by eps/h^4, which at h = 1e-3
exceeds the verification tolerance in double precision no matter how the
samples are produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    LinearForm,
    QuadraticHamiltonian,
    ToleranceConfig,
    adjoint_matrix,
    max_abs,
)
from .spectral import characteristic_polynomial

__all__ = [
    "EvolutionTrace",
    "OdeCheckReport",
    "propagator",
    "evolve_observable",
    "ode_check",
    "PROPAGATOR_EXPONENT_BOUND",
]

# exp() of a float64 overflows just above 709; stay under with margin
PROPAGATOR_EXPONENT_BOUND = 700.0

_PADE13_THETA = 5.371920351148152
_PADE13_B = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    """Coefficient vectors c(t) of an observable at sample instants.

    The first sample equals the observable's coefficients exactly; later
    samples apply exp(i (t - times[0]) H).
    """

    times: np.ndarray
    coeff_samples: np.ndarray
    observable: LinearForm

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        c = np.array(self.coeff_samples, dtype=complex)
        t.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "coeff_samples", c)


@dataclass(frozen=True)
class OdeCheckReport:
    """Residuals of the algebraic and finite-difference equation checks.

    cayley_hamilton_residual : max-norm of P(H).
    stencil_residual         : worst interior residual of P(-i d/dt) applied
                               to the sampled coefficients.
    order                    : 2K, the order of the differential equation.
    """

    cayley_hamilton_residual: float
    stencil_residual: float
    order: int

    def __post_init__(self):
        if self.cayley_hamilton_residual < 0 or self.stencil_residual < 0:
            raise ValueError("residuals must be nonnegative")


def _as_adjoint(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    if H.ndim != 2 or H.shape != (n, n) or n % 2:
        raise ValueError(f"adjoint matrix must be square of even size, got {H.shape}")
    return H


def propagator(H: np.ndarray, t: float) -> np.ndarray:
    """exp(itH) by scaling-and-squaring with the degree-13 Pade approximant.

    Works unchanged for defective H (no eigendecomposition involved).  Raises
    OverflowError when |t| * ||H||_1 exceeds PROPAGATOR_EXPONENT_BOUND, past
    which the result would overflow double precision.
    """
    H = _as_adjoint(H)
    t = float(t)
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    A = 1j * t * H
    norm1 = float(np.max(np.sum(np.abs(A), axis=0))) if A.size else 0.0
    if norm1 > PROPAGATOR_EXPONENT_BOUND:
        raise OverflowError(
            f"|t| * ||H||_1 = {norm1:.3g} exceeds {PROPAGATOR_EXPONENT_BOUND}; "
            "exp(itH) would overflow"
        )

    n = A.shape[0]
    s = 0 if norm1 <= _PADE13_THETA else int(np.ceil(np.log2(norm1 / _PADE13_THETA)))
    As = A / (2.0**s)
    b = _PADE13_B
    eye = np.eye(n)
    A2 = As @ As
    A4 = A2 @ A2
    A6 = A2 @ A4
    U = As @ (
        A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
        + b[7] * A6
        + b[5] * A4
        + b[3] * A2
        + b[1] * eye
    )
    V = (
        A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
        + b[6] * A6
        + b[4] * A4
        + b[2] * A2
        + b[0] * eye
    )
    F = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        F = F @ F
    return F


def _expm_series(A: np.ndarray, dtype) -> np.ndarray:
    """Scaled Taylor exponential in an arbitrary complex dtype.

    LAPACK has no extended-precision kernels, so this inverse-free evaluator
    backs the verification path that needs more than double precision.
    """
    A = np.asarray(A).astype(dtype)
    n = A.shape[0]
    nrm = float(np.max(np.sum(np.abs(A.astype(complex)), axis=0))) if A.size else 0.0
    s = 0 if nrm <= 0.25 else int(np.ceil(np.log2(nrm / 0.25)))
    As = A / dtype(2.0**s)
    X = np.eye(n, dtype=dtype)
    term = np.eye(n, dtype=dtype)
    for k in range(1, 64):
        term = term @ As / dtype(k)
        X = X + term
        if float(np.max(np.abs(term.astype(complex)))) < 1e-24:
            break
    for _ in range(s):
        X = X @ X
    return X


def _validate_times(times: np.ndarray) -> np.ndarray:
    t = np.asarray(times, dtype=float).reshape(-1)
    if t.size == 0:
        raise ValueError("need at least one sample instant")
    if not np.all(np.isfinite(t)):
        raise ValueError("sample instants must be finite")
    if t.size > 1 and not np.all(np.diff(t) > 0):
        raise ValueError("sample instants must be strictly increasing")
    return t


def _uniform_step(t: np.ndarray) -> float | None:
    if t.size < 2:
        return None
    dt = np.diff(t)
    h = float(dt[0])
    return h if np.all(np.abs(dt - h) <= 1e-12 * max(1.0, abs(h))) else None


def evolve_observable(L: LinearForm, H: np.ndarray, times) -> EvolutionTrace:
    """Heisenberg trace c(t) = exp(i (t - times[0]) H) c(0) at each sample.

    Uniformly spaced grids are advanced by repeated application of the
    single-step propagator; irregular grids use one propagator per sample.
    """
    H = _as_adjoint(H)
    t = _validate_times(times)
    c0 = L.coeffs.astype(complex)
    samples = np.empty((t.size, c0.size), dtype=complex)
    samples[0] = c0
    h = _uniform_step(t)
    if h is not None:
        step = propagator(H, h)
        for k in range(1, t.size):
            samples[k] = step @ samples[k - 1]
    else:
        for k in range(1, t.size):
            samples[k] = propagator(H, t[k] - t[0]) @ c0
    return EvolutionTrace(times=t, coeff_samples=samples, observable=L)


def _fd_weights(deriv: int, offsets: np.ndarray) -> np.ndarray:
    """Finite-difference weights for the `deriv`-th derivative at 0 on the
    given integer offsets (Fornberg's recurrence)."""
    x = np.asarray(offsets, dtype=float)
    n = x.size
    c = np.zeros((n, deriv + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    for i in range(1, n):
        mn = min(i, deriv)
        c2 = 1.0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - x[i - 1] * c[i - 1, k]) / c2
                c[i, 0] = -c1 * x[i - 1] * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (x[i] * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = x[i] * c[j, 0] / c3
        c1 = c2
    return c[:, deriv]


def _central_stencil(deriv: int) -> tuple[np.ndarray, int]:
    """Second-order central stencil (weights, half-width) for d^deriv/dt^deriv."""
    if deriv == 0:
        return np.array([1.0]), 0
    hw = (deriv + 1) // 2
    offsets = np.arange(-hw, hw + 1)
    return _fd_weights(deriv, offsets), hw


def _stencil_residual(coeffs_desc: np.ndarray, samples: np.ndarray, h: float) -> float:
    """Worst interior residual of sum_m a_m (-i d/dt)^m applied to samples.

    `coeffs_desc` are polynomial coefficients in descending degree; samples
    are per-time coefficient rows.  All arithmetic runs in extended precision
    (see module docstring).
    """
    dtype = np.clongdouble
    cs = np.asarray(samples).astype(dtype)
    order = len(coeffs_desc) - 1
    hl = np.longdouble(h)

    terms = []
    hw_max = 0
    for m in range(order + 1):
        a = complex(coeffs_desc[order - m])
        if a == 0:
            continue
        wgt, hw = _central_stencil(m)
        factor = dtype(a) * dtype((-1j) ** m) / hl**m
        terms.append((factor, wgt.astype(np.longdouble), hw))
        hw_max = max(hw_max, hw)

    n = cs.shape[0]
    if n < 2 * hw_max + 1:
        raise ValueError(
            f"need at least {2 * hw_max + 1} samples for the order-{order} stencil, got {n}"
        )
    worst = 0.0
    for i in range(hw_max, n - hw_max):
        acc = np.zeros(cs.shape[1], dtype=dtype)
        for factor, wgt, hw in terms:
            window = cs[i - hw : i + hw + 1]
            acc = acc + factor * (wgt @ window)
        worst = max(worst, float(np.max(np.abs(acc.astype(complex)))))
    return worst


def ode_check(
    Q: QuadraticHamiltonian,
    L: LinearForm,
    times,
    tol: ToleranceConfig | None = None,
) -> OdeCheckReport:
    """Verify the order-2K differential equation for an evolving observable.

    Two independent checks: the Cayley-Hamilton residual ||P(H)||_max, and
    the finite-difference residual of P(-i d/dt) applied to the sampled
    trace, using second-order central stencils for derivatives up to 2K.
    The trace is regenerated internally in extended precision.

    Requires at least 2K+1 uniformly spaced samples.
    """
    tol = tol or DEFAULT_TOL
    H = _as_adjoint(adjoint_matrix(Q))
    t = _validate_times(times)
    n = H.shape[0]
    if t.size < n + 1:
        raise ValueError(f"need at least {n + 1} samples for an order-{n} equation, got {t.size}")
    h = _uniform_step(t)
    if h is None:
        raise ValueError("sample instants must be uniformly spaced")

    cp = characteristic_polynomial(H, tol)

    ph = np.zeros_like(H)
    eye = np.eye(n)
    for c in cp.coeffs:
        ph = ph @ H + c * eye
    ch_residual = max_abs(ph)

    # extended-precision trace: roundoff in double-precision samples would
    # swamp the h^2 truncation after division by h^{2K}
    dtype = np.clongdouble
    step = _expm_series(1j * h * H, dtype)
    cs = np.empty((t.size, n), dtype=dtype)
    cs[0] = L.coeffs.astype(dtype)
    for k in range(1, t.size):
        cs[k] = step @ cs[k - 1]

    stencil = _stencil_residual(cp.coeffs, cs, h)
    return OdeCheckReport(
        cayley_hamilton_residual=ch_residual,
        stencil_residual=stencil,
        order=n,
    )
