"""Dense complex linear algebra used throughout the package.

Vectorization is column-stacking everywhere: ``vec(A @ X @ B) ==
kron(B.T, A) @ vec(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOLERANCES, Tolerances


class DensityError(ValueError):
    """A matrix failed one of the density-matrix invariants."""

    def __init__(self, invariant: str, magnitude: float, message: str):
        super().__init__(message)
        self.invariant = invariant
        self.magnitude = magnitude


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray   # real, ascending
    eigenvectors: np.ndarray  # orthonormal columns


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix. Construct through :func:`validate_density`."""

    data: np.ndarray

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def diagonal(self) -> np.ndarray:
        return self.data.diagonal().real.copy()


def _require_square(a: np.ndarray, what: str = "matrix") -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be square, got shape {a.shape}")


def _require_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")


def hermitian_eig(a, assert_hermitian: bool = True,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> Spectrum:
    a = np.asarray(a)
    _require_square(a)
    violation = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if assert_hermitian and violation > tol.hermitian:
        raise ValueError(f"matrix is not Hermitian: max |a - a^dagger| = {violation:.3e}")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return Spectrum(w, v)


def expm(a) -> np.ndarray:
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    a = np.asarray(a)
    _require_square(a)
    _require_finite(a)
    return scipy.linalg.expm(a)


def null_space(a, rank_tol: float | None = None,
               tol: Tolerances = DEFAULT_TOLERANCES) -> list[np.ndarray]:
    """Orthonormal basis of the right null space of ``a``.

    Singular values at or below ``rank_tol`` count as zero; the default
    threshold is ``tol.rank_rtol * sigma_max``. Returns a list of column
    vectors, empty when ``a`` has full column rank.
    """
    a = np.asarray(a)
    _require_finite(a)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    cols = a.shape[1]
    if a.shape[0] == 0:
        return list(np.eye(cols, dtype=complex).T)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    smax = s[0] if s.size else 0.0
    if rank_tol is None:
        rank_tol = tol.rank_rtol * smax
    elif rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    rank = int(np.sum(s > rank_tol))
    return [vh[i].conj() for i in range(rank, cols)]


def smallest_singular_value(a) -> float:
    s = np.linalg.svd(np.asarray(a), compute_uv=False)
    return float(s[-1]) if s.size else 0.0


def validate_density(a, tol: Tolerances = DEFAULT_TOLERANCES,
                     psd_tol: float | None = None,
                     hermitian_tol: float | None = None) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity; return the Hermitized matrix.

    ``psd_tol`` and ``hermitian_tol`` override the corresponding fields of
    ``tol``; integrated trajectories use the looser trajectory tolerance.
    """
    if isinstance(a, DensityMatrix):
        a = a.data
    a = np.asarray(a, dtype=complex)
    _require_square(a)
    _require_finite(a)
    psd_tol = tol.psd if psd_tol is None else psd_tol
    hermitian_tol = tol.hermitian if hermitian_tol is None else hermitian_tol
    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > hermitian_tol:
        raise DensityError("hermitian", asym, f"not Hermitian: max |rho - rho^dagger| = {asym:.3e}")
    a = (a + a.conj().T) / 2
    trace_err = abs(np.trace(a) - 1.0)
    if trace_err > tol.trace:
        raise DensityError("trace", trace_err, f"trace differs from 1 by {trace_err:.3e}")
    min_eig = float(np.linalg.eigvalsh(a)[0])
    if min_eig < -psd_tol:
        raise DensityError("positivity", min_eig, f"not positive semidefinite: min eigenvalue {min_eig:.3e}")
    return DensityMatrix(a)


def vec(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if n is None:
        n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape(n, n, order="F")


def choi_matrix(superop: np.ndarray) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| (x) S(|i><j|)`` of a column-stacked superoperator."""
    superop = np.asarray(superop)
    n = int(round(np.sqrt(superop.shape[0])))
    choi = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            # vec(|i><j|) has its single 1 at index i + n*j
            image = unvec(superop[:, i + n * j], n)
            choi[i * n:(i + 1) * n, j * n:(j + 1) * n] = image
    return choi


def random_density(n: int, rng: np.random.Generator) -> DensityMatrix:
    """``G G^dagger / tr`` with i.i.d. complex standard-normal ``G`` (full rank a.s.)."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def complex_to_json(m: np.ndarray) -> list:
    """Nested lists with each complex entry as ``[re, im]``."""
    m = np.asarray(m, dtype=complex)
    return np.stack([m.real, m.imag], axis=-1).tolist()


def complex_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("expected [re, im] pairs as innermost arrays")
    return arr[..., 0] + 1j * arr[..., 1]
