"""Full real-space single-excitation Hamiltonian and exact propagation.

Basis ordering is fixed everywhere as [atom1, atom2, site 0, ...,
site n_sites-1]. Open boundary conditions: the finite chain stands in
for the infinite waveguide, so observables are only trustworthy while
the emitted wavefront has not returned from an edge; see
``LightConeWarning`` and ``model.sites_for_time``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import ConfigurationError, Geometry, ModelParams

#: refuse dense diagonalization above this many chain sites. Echo-free
#: evolution out to t ~ 2000/xi needs ~4100 sites, so the cap sits well
#: above that while still blocking accidental huge allocations.
MAX_DENSE_SITES = 9000


class LightConeWarning(UserWarning):
    """Requested times reach beyond the boundary-echo-safe window."""


class NumericalError(RuntimeError):
    """Dense eigensolver failed to converge."""


@dataclass(frozen=True)
class LatticeHamiltonian:
    """Hermitian matrix of the single-excitation sector."""

    matrix: np.ndarray
    params: ModelParams
    geometry: Geometry

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SingleExcitationState:
    """Amplitudes (alpha1, alpha2, beta_1..beta_n) of one excitation."""

    alpha1: complex
    alpha2: complex
    beta: np.ndarray

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "SingleExcitationState":
        return cls(alpha1=complex(vec[0]), alpha2=complex(vec[1]),
                   beta=np.asarray(vec[2:], dtype=complex))

    def to_vector(self) -> np.ndarray:
        return np.concatenate(([self.alpha1, self.alpha2], self.beta))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.to_vector()))

    @property
    def photon_weight(self) -> float:
        return float(np.sum(np.abs(self.beta) ** 2))


def atom_excited(n_sites: int, which: int = 1) -> SingleExcitationState:
    """The bare state with one excitation in atom 1 or atom 2."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    return SingleExcitationState(alpha1=1.0 if which == 1 else 0.0,
                                 alpha2=1.0 if which == 2 else 0.0,
                                 beta=np.zeros(n_sites, dtype=complex))


def assemble_hamiltonian(params: ModelParams, geometry: Geometry) -> LatticeHamiltonian:
    """Single-excitation Hamiltonian on the open chain.

    Row/column 0 and 1 are the atomic excitations; the remaining
    n_sites rows are photon site states. Each Hermitian pair is written
    once from its upper element, so H equals its conjugate transpose
    exactly.
    """
    n = geometry.n_sites
    dim = n + 2
    H = np.zeros((dim, dim), dtype=complex)
    H[0, 0] = params.omega_a
    H[1, 1] = params.omega_a
    lam_fwd = params.lam * np.exp(1j * params.phi)
    H[0, 1] = lam_fwd
    H[1, 0] = lam_fwd.conjugate()
    sites = np.arange(n)
    H[2 + sites, 2 + sites] = params.omega_c
    H[2 + sites[:-1], 2 + sites[1:]] = -params.xi
    H[2 + sites[1:], 2 + sites[:-1]] = -params.xi
    for atom_row, site in ((0, geometry.n1), (0, geometry.n2),
                           (1, geometry.m1), (1, geometry.m2)):
        H[atom_row, 2 + site] = params.g
        H[2 + site, atom_row] = params.g
    return LatticeHamiltonian(matrix=H, params=params, geometry=geometry)


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns)."""

    energies: np.ndarray
    states: np.ndarray
    params: ModelParams
    geometry: Geometry


def diagonalize(H: LatticeHamiltonian) -> SpectrumResult:
    """Full dense Hermitian eigendecomposition of the lattice Hamiltonian."""
    n_sites = H.geometry.n_sites
    if n_sites > MAX_DENSE_SITES:
        raise ConfigurationError(
            f"n_sites={n_sites} exceeds the dense-diagonalization cap "
            f"({MAX_DENSE_SITES})")
    try:
        energies, states = np.linalg.eigh(H.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed to converge: {exc}") from exc
    return SpectrumResult(energies=energies, states=states,
                          params=H.params, geometry=H.geometry)


@dataclass(frozen=True)
class Trajectory:
    """Atomic populations and total photon weight along a time grid."""

    times: np.ndarray
    pop1: np.ndarray
    pop2: np.ndarray
    photon_total: np.ndarray


def check_light_cone(geometry: Geometry, t_max: float, xi: float) -> bool:
    """True when 2 xi t_max stays within the distance to the nearer edge."""
    return 2.0 * xi * t_max <= geometry.boundary_distance()


def propagate(spectrum: SpectrumResult, initial: SingleExcitationState,
              times) -> Trajectory:
    """Evolve the state through the eigenbasis, exactly per requested time.

    psi(t) = sum_n exp(-i E_n t) <n|psi(0)> |n>; there is no time-step
    error, only the diagonalization residual. Emits LightConeWarning
    when the latest requested time lets the fastest wavefront reach a
    boundary (observables may then contain echo artefacts).
    """
    ts = np.asarray(list(times), dtype=float)
    if ts.size == 0:
        raise ValueError("empty time grid")
    if np.any(np.diff(ts) < 0):
        raise ValueError("times must be sorted ascending")
    psi0 = initial.to_vector()
    if psi0.shape != (spectrum.states.shape[0],):
        raise ValueError("state dimension does not match the spectrum")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("initial state must be normalised")
    if not check_light_cone(spectrum.geometry, float(ts.max()),
                            spectrum.params.xi):
        warnings.warn(
            f"t_max={ts.max():g} exceeds the echo-safe window for "
            f"boundary distance {spectrum.geometry.boundary_distance()} sites",
            LightConeWarning, stacklevel=2)

    coeff = spectrum.states.conj().T @ psi0
    # (dim x nt) table of amplitudes in one BLAS product
    phases = np.exp(-1j * np.outer(spectrum.energies, ts)) * coeff[:, None]
    psi_t = spectrum.states @ phases
    pop1 = np.abs(psi_t[0, :]) ** 2
    pop2 = np.abs(psi_t[1, :]) ** 2
    photon = np.sum(np.abs(psi_t[2:, :]) ** 2, axis=0)
    return Trajectory(times=ts, pop1=pop1, pop2=pop2, photon_total=photon)


def rhs_amplitude_equations(state: SingleExcitationState, params: ModelParams,
                            geometry: Geometry) -> SingleExcitationState:
    """Time derivative -i H psi of the amplitude equations.

    Written against the coupled amplitude equations directly (not the
    assembled matrix) so it can serve as an independent oracle for the
    spectral propagator.
    """
    a1, a2, beta = state.alpha1, state.alpha2, state.beta
    lam_fwd = params.lam * np.exp(1j * params.phi)
    da1 = params.omega_a * a1 + lam_fwd * a2 \
        + params.g * (beta[geometry.n1] + beta[geometry.n2])
    da2 = params.omega_a * a2 + lam_fwd.conjugate() * a1 \
        + params.g * (beta[geometry.m1] + beta[geometry.m2])
    dbeta = params.omega_c * beta.astype(complex, copy=True)
    dbeta[:-1] += -params.xi * beta[1:]
    dbeta[1:] += -params.xi * beta[:-1]
    dbeta[geometry.n1] += params.g * a1
    dbeta[geometry.n2] += params.g * a1
    dbeta[geometry.m1] += params.g * a2
    dbeta[geometry.m2] += params.g * a2
    return SingleExcitationState(alpha1=-1j * da1, alpha2=-1j * da2,
                                 beta=-1j * dbeta)


def rk4_propagate(params: ModelParams, geometry: Geometry,
                  initial: SingleExcitationState, t_final: float,
                  dt: float = 0.01) -> SingleExcitationState:
    """Classic fourth-order Runge-Kutta integration up to t_final.

    Cross-check integrator only; the spectral propagator is the
    production path. The step count is rounded so the last step lands
    on t_final exactly.
    """
    n_steps = max(1, int(round(t_final / dt)))
    h = t_final / n_steps

    def deriv(vec):
        s = SingleExcitationState.from_vector(vec)
        return rhs_amplitude_equations(s, params, geometry).to_vector()

    y = initial.to_vector()
    for _ in range(n_steps):
        k1 = deriv(y)
        k2 = deriv(y + 0.5 * h * k1)
        k3 = deriv(y + 0.5 * h * k2)
        k4 = deriv(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return SingleExcitationState.from_vector(y)
