"""Physical parameters, coupling geometry and shared validation.

Conventions used throughout the package:
- hbar = 1; the photon hopping strength ``xi`` sets the energy unit and
  1/xi the time unit.
- The bare resonator frequency ``omega_c`` sets the energy origin; the
  waveguide band is [omega_c - 2 xi, omega_c + 2 xi].
- Lattice sites are indexed 0 .. n_sites-1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


class ConfigurationError(ValueError):
    """Raised when parameters or geometry violate their invariants."""


@dataclass(frozen=True)
class ModelParams:
    """Scalar couplings of the two-atom + resonator-chain model.

    Attributes
    ----------
    omega_a : atomic transition frequency (both atoms share it)
    omega_c : bare resonator frequency
    xi      : nearest-neighbour photon hopping (energy unit, > 0)
    g       : atom-waveguide coupling at each connection point
    lam     : direct atom-atom exchange strength (>= 0)
    phi     : phase of the direct exchange, lam * exp(+i phi) on
              the (atom1 <- atom2) matrix element
    """

    omega_a: float = 0.0
    omega_c: float = 0.0
    xi: float = 1.0
    g: float = 0.1
    lam: float = 0.016
    phi: float = 0.0

    def __post_init__(self):
        if not self.xi > 0:
            raise ConfigurationError(f"xi must be positive, got {self.xi}")
        if self.g < 0:
            raise ConfigurationError(f"g must be non-negative, got {self.g}")
        if self.lam < 0:
            raise ConfigurationError(f"lam must be non-negative, got {self.lam}")


@dataclass(frozen=True)
class Geometry:
    """Connection sites of the two giant atoms on a chain of n_sites.

    Atom 1 couples at sites (n1, n2), atom 2 at (m1, m2). Any
    arrangement with four distinct in-range sites is accepted; the
    braided order n1 < m1 < n2 < m2 is only detected, not required.
    """

    n1: int
    n2: int
    m1: int
    m2: int
    n_sites: int

    def __post_init__(self):
        for name in ("n1", "n2", "m1", "m2", "n_sites"):
            v = getattr(self, name)
            if not isinstance(v, (int,)) or isinstance(v, bool):
                raise ConfigurationError(f"{name} must be an integer, got {v!r}")
        if self.n_sites <= 0:
            raise ConfigurationError("n_sites must be positive")
        sites = (self.n1, self.n2, self.m1, self.m2)
        for s in sites:
            if not 0 <= s < self.n_sites:
                raise ConfigurationError(
                    f"index out of range: site {s} not in [0, {self.n_sites})")
        if len(set(sites)) != 4:
            raise ConfigurationError("coincident coupling sites")
        if not self.n1 < self.n2:
            raise ConfigurationError("require n1 < n2")
        if not self.m1 < self.m2:
            raise ConfigurationError("require m1 < m2")

    @property
    def size1(self) -> int:
        return self.n2 - self.n1

    @property
    def size2(self) -> int:
        return self.m2 - self.m1

    @property
    def equal_size(self) -> int | None:
        """Common atom size N, or None when the two atoms differ."""
        return self.size1 if self.size1 == self.size2 else None

    @property
    def separation(self) -> int:
        """Offset of atom 2 relative to atom 1 (m1 - n1)."""
        return self.m1 - self.n1

    @property
    def is_braided(self) -> bool:
        return self.n1 < self.m1 < self.n2 < self.m2

    @property
    def leftmost(self) -> int:
        return min(self.n1, self.m1)

    @property
    def rightmost(self) -> int:
        return max(self.n2, self.m2)

    @property
    def span(self) -> int:
        return self.rightmost - self.leftmost

    def boundary_distance(self) -> int:
        """Sites between the outermost coupling point and the nearer edge."""
        return min(self.leftmost, self.n_sites - 1 - self.rightmost)

    @classmethod
    def braided(cls, size: int, shift: int, n_sites: int,
                offset: int | None = None) -> "Geometry":
        """Braided pair with equal atom size and relative shift.

        Sites are (o, o+size) and (o+shift, o+size+shift). With
        ``offset=None`` the block is centred on the chain.
        """
        span = size + shift
        if offset is None:
            offset = (n_sites - span) // 2
        return cls(n1=offset, n2=offset + size,
                   m1=offset + shift, m2=offset + size + shift,
                   n_sites=n_sites)


def dispersion(k: float, params: ModelParams) -> float:
    """Band energy omega_c - 2 xi cos k of the resonator chain."""
    return params.omega_c - 2.0 * params.xi * math.cos(k)


def gamma(params: ModelParams) -> float:
    """Single-point emission rate scale g^2 / xi."""
    return params.g * params.g / params.xi


def sites_for_time(span: int, t_max: float, xi: float = 1.0) -> int:
    """Chain length keeping boundary echoes away from the coupling block.

    The fastest wavefront moves 2*xi sites per unit time; demanding
    2*xi*t_max free sites on each side (twice the single-trip reach)
    plus a 40-site margin keeps reflections out of every observable up
    to t_max.
    """
    return int(math.ceil(span + 4.0 * xi * t_max + 40))


def validate(params: ModelParams, geometry: Geometry) -> list[str]:
    """Check the combined configuration; return non-fatal warnings.

    Type invariants are enforced by the constructors; this re-checks
    them for configurations built by other means and adds cross-field
    checks. Raises ConfigurationError on violations. A detuned atom
    (omega_a != omega_c) is legal but the closed-form effective matrix
    assumes band-centre resonance, so it is reported as a warning
    rather than silently accepted or corrected.
    """
    ModelParams(params.omega_a, params.omega_c, params.xi,
                params.g, params.lam, params.phi)
    Geometry(geometry.n1, geometry.n2, geometry.m1, geometry.m2,
             geometry.n_sites)
    warnings: list[str] = []
    if params.omega_a != params.omega_c:
        warnings.append(
            "omega_a differs from omega_c: the closed-form effective matrix "
            "assumes band-centre resonance and will not match the lattice")
    return warnings
