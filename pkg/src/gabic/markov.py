"""Markovian 2x2 effective generator for the atomic amplitudes.

Eliminating the resonator chain at band centre leaves a non-Hermitian
2x2 matrix M acting on (alpha1, alpha2). Its entries combine the direct
exchange lam*exp(+-i phi) with interference kernels i^|distance| between
connection points, weighted by the emission scale g^2/xi. An eigenvalue
of M with vanishing imaginary part marks a bound state in the continuum
(BIC); the imaginary parts are exact here because the kernels are
evaluated by an integer period-4 table, never by floating trigonometry.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .model import Geometry, ModelParams, gamma

#: default |Im eigenvalue| below which a mode counts as non-decaying,
#: in units of xi. Closed-form arithmetic makes true zeros ~1e-15.
DEFAULT_BIC_TOL = 1e-9

# i^n for integer n, exact
_I_POW = (1 + 0j, 1j, -1 + 0j, -1j)


def i_power(n: int) -> complex:
    """Imaginary unit raised to an integer power, exact table lookup."""
    return _I_POW[n % 4]


def i_power_kernel(geometry: Geometry) -> tuple[complex, complex, complex, complex]:
    """Interference kernels (s11, s22, s12, s21) of the connection pattern.

    s11 = 1 + i^|n1-n2|, s22 = 1 + i^|m1-m2|,
    s12 = sum_{p,q} i^|n_p - m_q|, s21 = sum_{p,q} i^|m_p - n_q|.
    s12 equals s21 for any arrangement since the distance multisets
    coincide; both are returned to keep the matrix assembly explicit.
    """
    n = (geometry.n1, geometry.n2)
    m = (geometry.m1, geometry.m2)
    s11 = 1 + i_power(abs(n[0] - n[1]))
    s22 = 1 + i_power(abs(m[0] - m[1]))
    s12 = sum(i_power(abs(p - q)) for p in n for q in m)
    s21 = sum(i_power(abs(p - q)) for p in m for q in n)
    return s11, s22, s12, s21


@dataclass(frozen=True)
class EffectiveMatrix:
    """Entries of the effective non-Hermitian generator."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


def build_effective_matrix(params: ModelParams, geometry: Geometry) -> EffectiveMatrix:
    """Assemble M from the couplings and the interference kernels."""
    s11, s22, s12, s21 = i_power_kernel(geometry)
    gam = gamma(params)
    w = params.omega_a
    lam_fwd = params.lam * cmath.exp(1j * params.phi)
    return EffectiveMatrix(
        m11=w - 1j * gam * s11,
        m12=lam_fwd - 0.5j * gam * s12,
        m21=lam_fwd.conjugate() - 0.5j * gam * s21,
        m22=w - 1j * gam * s22,
    )


@dataclass(frozen=True)
class EigenPair2:
    """One eigenvalue of M with its unit-norm eigenvector.

    The vector phase is fixed by making the first entry of magnitude
    above 1e-12 real and positive. ``defective`` marks an exceptional
    point, where both returned pairs share the single eigenvector.
    """

    value: complex
    vector: np.ndarray
    defective: bool = False


def _phase_fixed(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    lead = v[0] if abs(v[0]) > 1e-12 else v[1]
    return v * (abs(lead) / lead)


def eigen2(M: EffectiveMatrix) -> tuple[EigenPair2, EigenPair2]:
    """Closed-form eigenpairs of the 2x2 matrix.

    eps = tr/2 +- sqrt((tr/2)^2 - det) with the principal square root.
    When the discriminant vanishes on the scale of rounding the matrix
    is treated as defective: the single eigenvector is returned twice
    with the flag set, rather than an ill-conditioned near-parallel
    pair.
    """
    a, b, c, d = M.m11, M.m12, M.m21, M.m22
    half_tr = 0.5 * (a + d)
    disc = half_tr * half_tr - (a * d - b * c)
    root = cmath.sqrt(disc)
    scale = max(abs(a), abs(b), abs(c), abs(d), 1e-300)
    if abs(root) <= 1e-8 * scale:
        rows = [(b, half_tr - a), (half_tr - d, c)]
        v = max(rows, key=lambda r: abs(r[0]) ** 2 + abs(r[1]) ** 2)
        if abs(v[0]) + abs(v[1]) <= 1e-12 * scale:
            # scalar matrix: degenerate but diagonalizable, not defective
            return (EigenPair2(half_tr, np.array([1.0, 0j])),
                    EigenPair2(half_tr, np.array([0j, 1.0])))
        # Jordan block: nullspace of (M - half_tr I)
        vec = _phase_fixed(np.array(v, dtype=complex))
        pair = EigenPair2(half_tr, vec, defective=True)
        return pair, pair
    pairs = []
    for eps in (half_tr + root, half_tr - root):
        rows = [(b, eps - a), (eps - d, c)]
        v = max(rows, key=lambda r: abs(r[0]) ** 2 + abs(r[1]) ** 2)
        pairs.append(EigenPair2(eps, _phase_fixed(np.array(v, dtype=complex))))
    return pairs[0], pairs[1]


def count_bics(eigenvalues, tol: float = DEFAULT_BIC_TOL) -> int:
    """Number of eigenvalues with |Im| below tol (0, 1 or 2)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return sum(1 for e in eigenvalues if abs(e.imag) < tol)


@dataclass(frozen=True)
class PhaseSweepRecord:
    """One grid point of a coupling-phase sweep, branches continuity-tracked."""

    phi: float
    eigen1: complex
    eigen2: complex
    n_bics: int


def sweep_phase(params: ModelParams, geometry: Geometry, phi_grid,
                bic_tol: float = DEFAULT_BIC_TOL) -> list[PhaseSweepRecord]:
    """Eigenvalues of M along a grid of coupling phases.

    Each grid point is independent (safe to parallelise); the branch
    assignment is a sequential post-pass that minimises the jump to the
    previous point, so eigen1/eigen2 are continuous curves rather than
    sorted pairs. At the first point the branch with the smaller real
    part (then smaller imaginary part) is eigen1.
    """
    phis = [float(p) for p in phi_grid]
    if not phis:
        raise ValueError("empty phase grid")
    if any(b <= a for a, b in zip(phis, phis[1:])):
        raise ValueError("phase grid must be strictly increasing")

    raw = []
    for phi in phis:
        p = ModelParams(params.omega_a, params.omega_c, params.xi,
                        params.g, params.lam, phi)
        e1, e2 = eigen2(build_effective_matrix(p, geometry))
        raw.append((e1.value, e2.value))

    records = []
    prev: tuple[complex, complex] | None = None
    for phi, (u, v) in zip(phis, raw):
        if prev is None:
            u, v = sorted((u, v), key=lambda z: (z.real, z.imag))
        else:
            keep = abs(u - prev[0]) + abs(v - prev[1])
            swap = abs(v - prev[0]) + abs(u - prev[1])
            if swap < keep:
                u, v = v, u
        prev = (u, v)
        records.append(PhaseSweepRecord(
            phi=phi, eigen1=u, eigen2=v,
            n_bics=count_bics((u, v), tol=bic_tol)))
    return records


def evolve_markov(params: ModelParams, geometry: Geometry, initial,
                  times) -> np.ndarray:
    """Atomic amplitudes under i d(alpha)/dt = M alpha.

    Returns an array of rows (t, alpha1, alpha2), using the spectral
    decomposition of M, or the explicit 2x2 Jordan form
    exp(-i eps t) (1 - i t (M - eps)) at an exceptional point.

    ``initial`` must be a unit-norm complex 2-vector; times must be
    non-negative (they need not be sorted).
    """
    alpha0 = np.asarray(initial, dtype=complex)
    if alpha0.shape != (2,):
        raise ValueError("initial state must be a complex 2-vector")
    if abs(np.linalg.norm(alpha0) - 1.0) > 1e-10:
        raise ValueError("initial state must be normalised")
    ts = np.asarray(list(times), dtype=float)
    if ts.size and ts.min() < 0:
        raise ValueError("times must be non-negative")

    M = build_effective_matrix(params, geometry)
    p1, p2 = eigen2(M)
    out = np.empty((ts.size, 3), dtype=complex)
    out[:, 0] = ts
    if p1.defective:
        eps = p1.value
        nilpotent = M.as_array() - eps * np.eye(2)
        for i, t in enumerate(ts):
            out[i, 1:] = cmath.exp(-1j * eps * t) * (
                alpha0 - 1j * t * (nilpotent @ alpha0))
        return out
    V = np.column_stack([p1.vector, p2.vector])
    coeff = np.linalg.solve(V, alpha0)
    eps = np.array([p1.value, p2.value])
    for i, t in enumerate(ts):
        # t = 0 returns the input bit-for-bit, not a reconstruction
        out[i, 1:] = alpha0 if t == 0.0 else V @ (np.exp(-1j * eps * t) * coeff)
    return out
