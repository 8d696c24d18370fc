"""Numerical tolerances shared by every module.

All comparisons in the package are floating-point and go through one
:class:`Tolerances` record. Callers override individual fields with
``dataclasses.replace(DEFAULT_TOLERANCES, rank_rtol=1e-8)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10            # max |rho - rho^dagger| accepted as Hermitian
    trace: float = 1e-10                # |tr rho - 1|
    psd: float = 1e-10                  # min eigenvalue >= -psd
    trajectory_psd: float = 1e-8        # looser positivity and Hermiticity floor for evolved samples
    positive_definite: float = 1e-10    # min eigenvalue > this counts as definite
    rank_rtol: float = 1e-9             # singular values below rtol * sigma_max are null
    degeneracy: float = 1e-9            # eigenvalues closer than this are grouped
    stochastic: float = 1e-12           # row-sum test for doubly stochastic M
    sum_identity: float = 1e-12         # |sum B^dagger B - I|_max
    maximally_mixed: float = 1e-9       # |rho - I/n|_max
    residual: float = 1e-10             # |L(rho_inf)|_max
    normalization: float = 1e-12        # |norm(psi0) - 1|
    probability: float = 1e-10          # |sum p - 1| and negativity floor
    rk_rtol: float = 1e-10
    rk_atol: float = 1e-12

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
