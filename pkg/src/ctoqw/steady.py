"""Steady states of the open walk: solving, certifying and classifying them."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction as F

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .dynamics import evolve_ctoqw
from .graph import Graph, classify
from .lindblad import Liouvillian
from .numerics import (DensityMatrix, complex_to_json, null_space,
                       smallest_singular_value, unvec, validate_density)

MAXIMALLY_MIXED = "maximally_mixed"
COHERENT_LIMIT = "coherent_limit"
NON_UNIQUE = "non_unique"


class SteadyStateError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class SteadyStateReport:
    rho_inf: DensityMatrix | None
    kernel_dim: int
    unique: bool
    positive_definite: bool
    definiteness: str              # "definite", "indeterminate", "indefinite" or "n/a"
    min_eigenvalue: float | None
    residual: float
    classification: str
    convergence_consistent: bool | None = None
    kernel_basis: list[np.ndarray] = field(default_factory=list, repr=False)
    falsifications: list[str] = field(default_factory=list)
    spectral_gap: float | None = None

    def to_json(self) -> dict:
        out = {
            "kernel_dim": self.kernel_dim,
            "unique": self.unique,
            "positive_definite": self.positive_definite,
            "definiteness": self.definiteness,
            "min_eigenvalue": self.min_eigenvalue,
            "residual": self.residual,
            "classification": self.classification,
            "convergence_consistent": self.convergence_consistent,
            "falsifications": list(self.falsifications),
            "spectral_gap": self.spectral_gap,
            "rho_inf": None if self.rho_inf is None else complex_to_json(self.rho_inf.data),
        }
        if not self.unique:
            out["kernel_basis"] = [complex_to_json(unvec(v)) for v in self.kernel_basis]
        return out


def _hermitize_and_normalize(v: np.ndarray, n: int) -> np.ndarray:
    x = unvec(v, n)
    tr = np.trace(x)
    # null_space fixes the vector only up to a complex scale; rotate the trace
    # onto the positive real axis, then divide by it
    x = x * (np.conj(tr) / abs(tr))
    x = (x + x.conj().T) / 2
    return x / np.trace(x).real


def solve_steady_state(lio: Liouvillian, tol: Tolerances = DEFAULT_TOLERANCES) -> SteadyStateReport:
    """Solve ``L(rho) = 0`` with ``tr rho = 1`` from the Liouvillian null space.

    A one-dimensional kernel yields a validated density matrix; a larger one
    is reported as ``non_unique`` with the kernel basis and no single state.
    """
    n = lio.dim
    basis = null_space(lio.matrix, tol=tol)
    k = len(basis)
    if k == 0:
        smin = smallest_singular_value(lio.matrix)
        raise SteadyStateError(
            f"Liouvillian has trivial kernel (smallest singular value {smin:.3e}), "
            "which contradicts trace preservation")
    if k > 1:
        residual = max(float(np.max(np.abs(lio.matrix @ v))) for v in basis)
        return SteadyStateReport(None, k, False, False, "n/a", None, residual, NON_UNIQUE,
                                 kernel_basis=basis)

    rho = validate_density(_hermitize_and_normalize(basis[0], n), tol)
    residual = float(np.max(np.abs(lio.apply(rho.data))))
    min_eig = float(np.linalg.eigvalsh(rho.data)[0])
    if min_eig > tol.positive_definite:
        definiteness = "definite"
    elif min_eig > -tol.positive_definite:
        definiteness = "indeterminate"
    else:
        definiteness = "indefinite"
    mixed_gap = float(np.max(np.abs(rho.data - np.eye(n) / n)))
    label = MAXIMALLY_MIXED if mixed_gap <= tol.maximally_mixed else COHERENT_LIMIT
    return SteadyStateReport(rho, 1, True, definiteness == "definite", definiteness,
                             min_eig, residual, label, kernel_basis=basis)


def classify_steady_state(g: Graph, report: SteadyStateReport,
                          tol: Tolerances = DEFAULT_TOLERANCES) -> SteadyStateReport:
    """Check a solved report against the limit behaviour expected on connected graphs.

    For a connected graph the steady state must be unique and positive
    definite, and it equals ``I/n`` exactly when ``M`` is doubly stochastic.
    Disconnected graphs carry no prediction and pass vacuously.
    """
    cls = classify(g, tol)
    events = []
    if cls.connected:
        if not report.unique:
            events.append(f"connected graph but kernel dimension {report.kernel_dim}")
        elif not report.positive_definite:
            events.append(f"connected graph but steady state min eigenvalue {report.min_eigenvalue:.3e}")
        if report.unique:
            mixed = report.classification == MAXIMALLY_MIXED
            if cls.doubly_stochastic_M and not mixed:
                events.append("M doubly stochastic but steady state differs from I/n")
            if mixed and not cls.doubly_stochastic_M:
                events.append("steady state is I/n but M is not doubly stochastic")
        if report.residual > tol.residual:
            events.append(f"residual {report.residual:.3e} exceeds {tol.residual:.1e}")
    return replace(report, convergence_consistent=not events, falsifications=events)


@dataclass(frozen=True)
class CoherenceReport:
    l1_offdiag: float
    max_offdiag: float
    diag_distribution: np.ndarray


def coherence(rho) -> CoherenceReport:
    rho = np.asarray(rho)
    off = np.abs(rho - np.diag(np.diag(rho)))
    return CoherenceReport(float(off.sum()), float(off.max(initial=0.0)),
                           np.diag(rho).real.copy())


def trace_distance(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return 0.5 * float(np.sum(np.linalg.svd(a - b, compute_uv=False)))


def spectral_gap(lio: Liouvillian, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Smallest ``|Re lambda|`` over nonzero Liouvillian eigenvalues (diagnostic only)."""
    eig = np.linalg.eigvals(lio.matrix)
    cutoff = tol.rank_rtol * max(1.0, float(np.max(np.abs(eig))))
    nonzero = eig[np.abs(eig) > cutoff]
    return float(np.min(np.abs(nonzero.real))) if nonzero.size else 0.0


@dataclass(frozen=True, eq=False)
class ConvergenceProfile:
    times: np.ndarray
    distances: np.ndarray
    spectral_gap: float

    def __iter__(self):
        return iter(zip(self.times.tolist(), self.distances.tolist()))


def convergence_profile(lio: Liouvillian, rho0, target, times, method: str | None = None,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> ConvergenceProfile:
    traj = evolve_ctoqw(lio, rho0, times, method, tol)
    target = np.asarray(target)
    dist = np.array([trace_distance(s, target) for s in traj.states])
    return ConvergenceProfile(traj.times, dist, spectral_gap(lio, tol))


def _exact(rows) -> np.ndarray:
    return np.array([[complex(float(re), float(im)) for re, im in row] for row in rows])


_a, _b, _c = F(2, 7), F(3, 7), F(1, 14)
_p = (F(-1, 28), F(1, 28))
_pc = (F(-1, 28), F(-1, 28))
PATH3_STEADY_STATE = _exact([
    [(_a, 0), _p, (_c, 0)],
    [_pc, (_b, 0), _pc],
    [(_c, 0), _p, (_a, 0)],
])

_h, _l = F(11, 26), F(5, 26)
_hl, _lh, _ll = (F(-2, 39), F(-1, 39)), (F(-2, 39), F(1, 39)), (F(2, 39), 0)
CLAW_STEADY_STATE = _exact([
    [(_h, 0), _hl, _hl, _hl],
    [_lh, (_l, 0), _ll, _ll],
    [_lh, _ll, (_l, 0), _ll],
    [_lh, _ll, _ll, (_l, 0)],
])

REGRESSION_TARGETS = {
    "path3_steady_state": (Graph.from_edges(3, [(0, 1), (1, 2)]), PATH3_STEADY_STATE),
    "claw_steady_state": (Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)]), CLAW_STEADY_STATE),
}


def regression_match(g: Graph, report: SteadyStateReport, atol: float = 1e-10) -> dict | None:
    """Compare against a known exact steady state for this labelled graph, if any."""
    if report.rho_inf is None:
        return None
    for name, (target_graph, target) in REGRESSION_TARGETS.items():
        if g == target_graph:
            break
    else:
        cls = classify(g)
        if not (cls.connected and cls.regular):
            return None
        name, target = "maximally_mixed_regular", np.eye(g.n) / g.n
    err = float(np.max(np.abs(report.rho_inf.data - target)))
    return {"target": name, "max_abs_error": err, "match": err <= atol}
