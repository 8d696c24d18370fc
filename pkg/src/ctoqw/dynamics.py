"""Time evolution of the open, classical and unitary walks on a graph."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .config import DEFAULT_TOLERANCES, Tolerances
from .graph import Graph, laplacian
from .lindblad import Liouvillian, build_liouvillian
from .numerics import (DensityMatrix, expm, hermitian_eig, random_density,
                       unvec, validate_density, vec)

logger = logging.getLogger(__name__)

EXPM_MAX_DIM = 20
DEFAULT_SAMPLES = 64


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Trajectory:
    process: str          # "ctoqw", "ctrw" or "ctqw"
    times: np.ndarray
    states: list          # DensityMatrix, probability vectors or amplitude vectors

    def distributions(self) -> np.ndarray:
        """Site occupation probabilities, one row per sample."""
        if self.process == "ctoqw":
            return np.array([s.diagonal() for s in self.states])
        if self.process == "ctqw":
            return np.array([np.abs(s) ** 2 for s in self.states])
        return np.array(self.states)

    @property
    def final(self):
        return self.states[-1]


def default_times(horizon: float, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    """``t = 0`` followed by log-spaced points ending at ``horizon``."""
    if horizon <= 0:
        return np.array([0.0])
    return np.concatenate([[0.0], np.geomspace(horizon * 1e-3, horizon, samples - 1)])


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a nonempty 1-D sequence")
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be ascending and start at t >= 0")
    return times


def evolve_ctoqw(lio: Liouvillian, rho0, times, method: str | None = None,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> Trajectory:
    """Evolve ``d rho/dt = L(rho)`` and sample at ``times``.

    ``method="expm"`` multiplies by the exponential of each time step (cached
    per distinct step); ``"rk_adaptive"`` integrates with an embedded 8(5,3)
    Runge-Kutta pair. ``None`` picks expm up to dimension 20.
    """
    times = _check_times(times)
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (lio.dim, lio.dim):
        raise ValueError(f"dimension mismatch: rho0 is {rho0.shape}, walk has {lio.dim} sites")
    if method is None:
        method = "expm" if lio.dim <= EXPM_MAX_DIM else "rk_adaptive"

    if method == "expm":
        raw = _evolve_expm(lio.matrix, vec(rho0), times)
    elif method == "rk_adaptive":
        raw = _evolve_rk(lio, rho0, times, tol)
    else:
        raise ValueError(f"unknown method {method!r}")

    states = [DensityMatrix(rho0.copy()) if t == 0 else
              validate_density(unvec(v, lio.dim), tol, psd_tol=tol.trajectory_psd,
                                   hermitian_tol=tol.trajectory_psd)
              for t, v in zip(times, raw)]
    return Trajectory("ctoqw", times, states)


def _evolve_expm(generator: np.ndarray, v0: np.ndarray, times: np.ndarray) -> list[np.ndarray]:
    cache: dict[float, np.ndarray] = {}
    out, v, t_prev = [], v0, 0.0
    for t in times:
        dt = float(t - t_prev)
        if dt > 0:
            if dt not in cache:
                cache[dt] = expm(dt * generator)
            v = cache[dt] @ v
        out.append(v)
        t_prev = t
    return out


def _evolve_rk(lio: Liouvillian, rho0: np.ndarray, times: np.ndarray,
               tol: Tolerances) -> list[np.ndarray]:
    n = lio.dim
    if times[-1] == 0:
        return [vec(rho0) for _ in times]

    def rhs(_t, y):
        return vec(lio.apply(unvec(y, n)))

    sol = solve_ivp(rhs, (0.0, float(times[-1])), vec(rho0), method="DOP853",
                    t_eval=times, rtol=tol.rk_rtol, atol=tol.rk_atol)
    if sol.status != 0:
        reached = sol.t[-1] if sol.t.size else 0.0
        raise IntegrationError(f"integration failed at t = {reached:.6g}: {sol.message}")
    logger.debug("rk_adaptive: %d right-hand-side evaluations", sol.nfev)
    return list(sol.y.T)


def evolve_ctrw(g: Graph, p0, times, tol: Tolerances = DEFAULT_TOLERANCES) -> Trajectory:
    """Classical walk ``p(t) = exp(-t L) p0``.

    The sign is chosen so the walk relaxes: ``L`` is positive semidefinite,
    so ``exp(+t L)`` would blow up instead of reaching equipartition.
    """
    times = _check_times(times)
    p0 = np.asarray(p0, dtype=float)
    _check_probability(p0, g.n, tol)
    lap = laplacian(g)
    states = []
    for t in times:
        p = p0.copy() if t == 0 else expm(-t * lap) @ p0
        states.append(p)
    return Trajectory("ctrw", times, states)


def ctrw_limit(g: Graph, p0) -> np.ndarray:
    """``lim exp(-t L) p0``: each component's mass spread evenly over its vertices."""
    p0 = np.asarray(p0, dtype=float)
    out = np.zeros(g.n)
    for comp in g.components():
        out[comp] = p0[comp].sum() / len(comp)
    return out


def _check_probability(p: np.ndarray, n: int, tol: Tolerances) -> None:
    if p.shape != (n,):
        raise ValueError(f"probability vector must have length {n}, got shape {p.shape}")
    if np.any(p < -tol.probability) or abs(p.sum() - 1.0) > tol.probability:
        raise ValueError("initial distribution must be nonnegative and sum to 1")


def evolve_ctqw(g: Graph, psi0, times, tol: Tolerances = DEFAULT_TOLERANCES) -> Trajectory:
    """Unitary walk ``psi(t) = exp(-i t L) psi0`` through the Laplacian eigenbasis."""
    times = _check_times(times)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (g.n,):
        raise ValueError(f"amplitude vector must have length {g.n}, got shape {psi0.shape}")
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > tol.normalization:
        raise ValueError(f"initial amplitudes must have unit norm, got {norm:.15g}")
    spec = hermitian_eig(laplacian(g))
    coeffs = spec.eigenvectors.conj().T @ psi0
    states = [psi0.copy() if t == 0 else
              spec.eigenvectors @ (np.exp(-1j * t * spec.eigenvalues) * coeffs)
              for t in times]
    return Trajectory("ctqw", times, states)


def spectral_projectors(h: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES
                        ) -> list[tuple[float, np.ndarray]]:
    """Group eigenvalues within ``tol.degeneracy`` and return ``(lambda, P)`` pairs."""
    spec = hermitian_eig(h, tol=tol)
    groups: list[list[int]] = []
    for i, lam in enumerate(spec.eigenvalues):
        if groups and lam - spec.eigenvalues[groups[-1][-1]] <= tol.degeneracy:
            groups[-1].append(i)
        else:
            groups.append([i])
    out = []
    for idx in groups:
        v = spec.eigenvectors[:, idx]
        out.append((float(np.mean(spec.eigenvalues[idx])), v @ v.conj().T))
    return out


def ctqw_limiting_average(g: Graph, u: int, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Long-time average of ``|<v|psi(t)>|^2`` for a walker started at vertex ``u``.

    Equals ``sum_lambda |<v|P_lambda|u>|^2`` over the spectral projectors of
    the Laplacian; with a simple spectrum this is
    ``sum_j |<v|psi_j>|^2 |<u|psi_j>|^2``.
    """
    if not 0 <= u < g.n:
        raise ValueError(f"start vertex {u} out of range for n={g.n}")
    psi0 = np.zeros(g.n, dtype=complex)
    psi0[u] = 1.0
    return limiting_average_from(g, psi0, tol)


def limiting_average_from(g: Graph, psi0, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Same long-time average for an arbitrary normalized start ``psi0``."""
    psi0 = np.asarray(psi0, dtype=complex)
    probs = np.zeros(g.n)
    for _, proj in spectral_projectors(laplacian(g), tol):
        probs += np.abs(proj @ psi0) ** 2
    return probs


@dataclass(frozen=True)
class InitialState:
    """Initial condition usable by any of the three processes.

    ``kind`` is ``vertex`` (with ``vertex``), ``mixed``, ``uniform``,
    ``random`` (with ``seed``) or ``explicit`` (with ``data``).
    """

    kind: str
    vertex: int | None = None
    data: np.ndarray | None = None
    seed: int | None = None

    def density(self, n: int, tol: Tolerances = DEFAULT_TOLERANCES) -> DensityMatrix:
        if self.kind == "vertex":
            rho = np.zeros((n, n), dtype=complex)
            rho[self._vertex(n), self._vertex(n)] = 1.0
            return DensityMatrix(rho)
        if self.kind == "mixed":
            return DensityMatrix(np.eye(n, dtype=complex) / n)
        if self.kind == "uniform":
            psi = np.full(n, 1 / np.sqrt(n), dtype=complex)
            return DensityMatrix(np.outer(psi, psi.conj()))
        if self.kind == "random":
            return random_density(n, np.random.default_rng(self.seed))
        if self.kind == "explicit":
            data = np.asarray(self.data, dtype=complex)
            if data.shape == (n,):
                data = np.outer(data, data.conj())
            if data.shape != (n, n):
                raise ValueError(f"explicit state has shape {data.shape}, expected ({n}, {n})")
            return validate_density(data, tol)
        raise ValueError(f"unknown initial state kind {self.kind!r}")

    def probabilities(self, n: int, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
        if self.kind == "vertex":
            p = np.zeros(n)
            p[self._vertex(n)] = 1.0
            return p
        if self.kind in ("mixed", "uniform"):
            return np.full(n, 1.0 / n)
        if self.kind == "random":
            return self.density(n, tol).diagonal()
        if self.kind == "explicit":
            data = np.asarray(self.data)
            if np.iscomplexobj(data) and np.any(data.imag != 0):
                raise ValueError("a classical walk needs a real probability vector")
            p = np.asarray(data.real, dtype=float)
            _check_probability(p, n, tol)
            return p
        raise ValueError(f"unknown initial state kind {self.kind!r}")

    def amplitudes(self, n: int, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
        if self.kind == "vertex":
            psi = np.zeros(n, dtype=complex)
            psi[self._vertex(n)] = 1.0
            return psi
        if self.kind == "uniform":
            return np.full(n, 1 / np.sqrt(n), dtype=complex)
        if self.kind == "explicit":
            psi = np.asarray(self.data, dtype=complex)
            if psi.shape != (n,):
                raise ValueError(f"a unitary walk needs an amplitude vector of length {n}")
            return psi
        raise ValueError(f"initial state {self.kind!r} is mixed and has no amplitude vector")

    def _vertex(self, n: int) -> int:
        if self.vertex is None or not 0 <= self.vertex < n:
            raise ValueError(f"vertex {self.vertex} out of range for n={n}")
        return self.vertex


@dataclass(frozen=True, eq=False)
class Comparison:
    ctoqw: Trajectory
    ctrw: Trajectory
    ctqw: Trajectory
    ctqw_limit: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.ctoqw.times

    def table(self) -> np.ndarray:
        """``[time | ctoqw sites | ctrw sites | ctqw sites]`` rows."""
        return np.column_stack([self.times, self.ctoqw.distributions(),
                                self.ctrw.distributions(), self.ctqw.distributions()])


def compare_processes(g: Graph, init: InitialState, horizon: float, samples: int,
                      method: str | None = None, lio: Liouvillian | None = None,
                      tol: Tolerances = DEFAULT_TOLERANCES) -> Comparison:
    """Run all three walks from matching initial conditions on ``linspace(0, horizon, samples)``."""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if samples < 2:
        raise ValueError("need at least two samples")
    times = np.linspace(0.0, horizon, samples)
    lio = lio or build_liouvillian(g)
    open_walk = evolve_ctoqw(lio, init.density(g.n, tol), times, method, tol)
    classical = evolve_ctrw(g, init.probabilities(g.n, tol), times, tol)
    psi0 = init.amplitudes(g.n, tol)
    quantum = evolve_ctqw(g, psi0, times, tol)
    return Comparison(open_walk, classical, quantum, limiting_average_from(g, psi0, tol))
