"""Exceptional-point detection and canonical Jordan form.

An adjoint matrix is not normal, so eigenvalue coalescence can make it
defective: fewer than 2K independent eigenvectors.  This module clusters the
spectrum, compares algebraic with geometric multiplicities, and builds the
similarity transform P whose columns are Jordan chains, so that P^{-1} H P is
block diagonal with ones on the superdiagonal inside each block.

Inputs within coalesce_tol of coalescence are treated as exactly coalesced
before any chain is built (cluster-first policy); this avoids working with
the catastrophically ill-conditioned eigenvector bases that appear next to an
exceptional point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOL, ToleranceConfig, max_abs
from .spectral import natural_frequencies, _nullspace, _gauge_fix

__all__ = [
    "NumericalDegeneracyError",
    "DefectReport",
    "JordanDecomposition",
    "multiplicities",
    "is_exceptional",
    "jordan_form",
]


class NumericalDegeneracyError(RuntimeError):
    """Chain construction failed; tolerances likely need adjustment."""


@dataclass(frozen=True, eq=False)
class DefectReport:
    """Per-cluster (eigenvalue, algebraic, geometric) multiplicities."""

    eigenvalue_clusters: tuple[tuple[complex, int, int], ...]
    is_defective: bool


@dataclass(frozen=True, eq=False)
class JordanDecomposition:
    """Similarity transform P and Jordan blocks (eigenvalue, size)."""

    transform: np.ndarray
    blocks: tuple[tuple[complex, int], ...]

    def jordan_matrix(self) -> np.ndarray:
        """Assemble the block-diagonal Jordan matrix J from `blocks`."""
        n = sum(size for _, size in self.blocks)
        J = np.zeros((n, n), dtype=complex)
        pos = 0
        for lam, size in self.blocks:
            for k in range(size):
                J[pos + k, pos + k] = lam
                if k + 1 < size:
                    J[pos + k, pos + k + 1] = 1.0
            pos += size
        return J


def _clusters(H: np.ndarray, tol: ToleranceConfig):
    """Cluster the natural frequencies within the coalescence gap.

    Returns a list of (representative, members) sorted by (Re, Im), where the
    representative is the cluster mean.
    """
    spectrum = natural_frequencies(H, tol)
    lam = spectrum.lambdas
    gap = tol.coalesce_tol * (1.0 + max_abs(lam))
    order = np.lexsort((lam.imag, lam.real))
    lam = lam[order]
    groups: list[list[complex]] = [[complex(lam[0])]]
    for z in lam[1:]:
        if abs(z - groups[-1][-1]) <= gap:
            groups[-1].append(complex(z))
        else:
            groups.append([complex(z)])
    out = [(complex(np.mean(g)), len(g)) for g in groups]
    return sorted(out, key=lambda c: (c[0].real, c[0].imag))


def multiplicities(H: np.ndarray, tol: ToleranceConfig | None = None) -> DefectReport:
    """Algebraic and geometric multiplicity of every eigenvalue cluster.

    The geometric multiplicity is the SVD nullity of (H - lambda I) at the
    cluster mean; the matrix is defective exactly when some cluster has
    geometric < algebraic.
    """
    tol = tol or DEFAULT_TOL
    H = np.asarray(H, dtype=complex)
    eye = np.eye(H.shape[0])
    clusters = []
    defective = False
    for lam, alg in _clusters(H, tol):
        geo = _nullspace(H - lam * eye, tol.rank_tol).shape[1]
        clusters.append((lam, alg, geo))
        if geo < alg:
            defective = True
    return DefectReport(eigenvalue_clusters=tuple(clusters), is_defective=defective)


def is_exceptional(H: np.ndarray, tol: ToleranceConfig | None = None) -> bool:
    """Whether H sits at an exceptional point (is defective)."""
    return multiplicities(H, tol).is_defective


def _block_sizes(d: list[int]) -> list[int]:
    """Jordan block sizes from the nullity chain d_p = nullity((H-lam)^p).

    The number of blocks of size s is 2 d_s - d_{s-1} - d_{s+1}; the chain is
    padded as constant beyond its plateau.
    """
    dd = d + [d[-1]]
    sizes = []
    for s in range(1, len(d)):
        count = 2 * dd[s] - dd[s - 1] - dd[s + 1]
        sizes.extend([s] * count)
    return sorted(sizes, reverse=True)


def _cluster_chains(H, lam, alg, tol: ToleranceConfig):
    """Jordan chains for one eigenvalue cluster, columns ordered
    eigenvector-first within each chain."""
    n = H.shape[0]
    E = H - lam * np.eye(n)

    null_bases = {0: np.zeros((n, 0), dtype=complex)}
    d = [0]
    Ep = np.eye(n, dtype=complex)
    p = 0
    while d[-1] < alg:
        p += 1
        if p > alg:
            raise NumericalDegeneracyError(
                f"nullity chain at eigenvalue {lam:.6g} stalled at {d[-1]} < {alg}; "
                "rank_tol / coalesce_tol likely need adjustment"
            )
        Ep = Ep @ E
        null_bases[p] = _nullspace(Ep, tol.rank_tol)
        d.append(null_bases[p].shape[1])

    if d[1] == alg:
        # diagonalizable cluster: the orthonormal eigenbasis is the chain set
        eigvecs = null_bases[1]
        return [
            (1, [_gauge_fix(eigvecs[:, k], tol.rank_tol)]) for k in range(alg)
        ]

    chains = []
    built = np.zeros((n, 0), dtype=complex)
    for size in _block_sizes(d):
        big = null_bases[size]
        avoid = np.hstack([null_bases[size - 1], built])
        if avoid.shape[1]:
            q, _ = np.linalg.qr(avoid)
            resid = big - q @ (q.conj().T @ big)
        else:
            resid = big
        norms = np.linalg.norm(resid, axis=0)
        k = int(np.argmax(norms))
        if norms[k] <= tol.rank_tol:
            raise NumericalDegeneracyError(
                f"no independent chain top of length {size} at eigenvalue {lam:.6g}"
            )
        top = resid[:, k] / norms[k]
        chain = [top]
        for _ in range(size - 1):
            chain.append(E @ chain[-1])
        chain.reverse()  # eigenvector first
        scale = 1.0 / np.linalg.norm(chain[0])
        chains.append((size, [v * scale for v in chain]))
        built = np.hstack(
            [built] + [np.reshape(v, (n, 1)) for v in chains[-1][1]]
        )
    return chains


def jordan_form(
    H: np.ndarray, tol: ToleranceConfig | None = None
) -> JordanDecomposition:
    """Canonical Jordan form of an adjoint matrix.

    For each eigenvalue cluster the block sizes follow from the nullity chain
    of powers of (H - lambda I); each block's chain starts from a vector of
    the large nullspace orthogonalized against the smaller one (and against
    chains already built), then descends by repeated application of
    (H - lambda I), so the chain relations hold by construction.  P is not
    unique; callers should compare J, chain residuals and block structure
    rather than P entrywise.

    Blocks are sorted by (Re lambda, Im lambda, size descending).  A
    diagonalizable input yields all blocks of size 1.
    """
    tol = tol or DEFAULT_TOL
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]

    blocks = []
    columns = []
    for lam, alg in _clusters(H, tol):
        for size, chain in _cluster_chains(H, lam, alg, tol):
            blocks.append((lam, size))
            columns.extend(chain)
    P = np.stack(columns, axis=1)

    sv = np.linalg.svd(P, compute_uv=False)
    if sv[-1] <= tol.rank_tol * sv[0]:
        raise NumericalDegeneracyError(
            f"Jordan transform is numerically singular (sigma_min/sigma_max = "
            f"{sv[-1] / sv[0]:.3e}); adjust tolerances"
        )
    return JordanDecomposition(transform=P, blocks=tuple(blocks))
