"""Closed-form frequency-domain response functions of the arm cavities and the mirror.

All functions take angular frequencies (rad/s) and return plain Python/NumPy
scalars. Couplings are complex; their phase carries the cavity delay 2*beta.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.constants import hbar


class DomainError(ValueError):
    """Argument outside the domain where a kernel is defined (e.g. on a pole)."""


def beta(omega, kappa):
    """Cavity phase arctan(omega/kappa), in [0, pi/2) for omega >= 0."""
    if kappa <= 0:
        raise DomainError(f"kappa must be > 0, got {kappa!r}")
    if omega < 0:
        raise DomainError(f"omega must be >= 0, got {omega!r}")
    return math.atan(omega / kappa)


def chi_free_mass(omega):
    """Free-mass susceptibility -1/omega^2 (per unit mass)."""
    if omega <= 0:
        raise DomainError("free-mass susceptibility has a pole at omega = 0")
    return complex(-1.0 / omega**2)


def chi_pivot(omega, omega_m, eta_over_m):
    """Damped suspension susceptibility -(-w_m^2 + w (w + i eta/m))^-1.

    Falls back to exactly ``chi_free_mass`` when the suspension is absent so that
    the two models agree bit-for-bit in that limit.
    """
    if omega_m == 0 and eta_over_m == 0:
        return chi_free_mass(omega)
    denom = -(omega_m**2) + omega * (omega + 1j * eta_over_m)
    if denom == 0:
        raise DomainError("undamped suspension driven on resonance")
    return -1.0 / denom


@dataclass(frozen=True)
class ComplexResponse:
    value: complex
    omega: float

    def __post_init__(self):
        if not cmath.isfinite(self.value):
            raise DomainError(f"non-finite response at omega={self.omega!r}")

    def __abs__(self):
        return abs(self.value)

    @property
    def phase(self):
        return cmath.phase(self.value)


def coupling_K(omega, cavity, chi):
    """Optomechanical coupling -exp(2i beta) 2 kappa Theta chi / (kappa^2 + omega^2)."""
    return coupling_K_raw(omega, cavity.kappa, cavity.theta, chi)


def coupling_K_raw(omega, kappa, theta, chi):
    """As ``coupling_K`` but with kappa (rad/s) and theta (s^-3) passed directly."""
    if omega <= 0:
        raise DomainError("coupling is evaluated for omega > 0 only")
    b = beta(omega, kappa)
    value = -cmath.exp(2j * b) * 2.0 * kappa * theta * chi / (kappa**2 + omega**2)
    return ComplexResponse(complex(value), omega)


def sqrt_response(k):
    """Square root taking half of the factor's own phase (no branch wrapping)."""
    value = k.value if isinstance(k, ComplexResponse) else complex(k)
    return math.sqrt(abs(value)) * cmath.exp(0.5j * cmath.phase(value))


def coupling_cross(k_a, k_b):
    """Cross coupling sqrt(K_a K_b) with phase (arg K_a + arg K_b) / 2.

    Identical factors give back the factor itself.
    """
    if k_a.omega != k_b.omega:
        raise DomainError("K_a and K_b evaluated at different frequencies")
    if k_a.value == k_b.value:
        return k_a
    mag = math.sqrt(abs(k_a.value)) * math.sqrt(abs(k_b.value))
    if mag == 0:
        return ComplexResponse(0j, k_a.omega)
    phase = 0.5 * (cmath.phase(k_a.value) + cmath.phase(k_b.value))
    return ComplexResponse(mag * cmath.exp(1j * phase), k_a.omega)


def _check_eta(eta_int):
    if not 0.0 <= eta_int <= 1.0:
        raise DomainError(f"eta_int must lie in [0, 1], got {eta_int!r}")


def lossy_R(omega, kappa, eta_int):
    """Reflection of a cavity with internal efficiency eta_int: 2 eta kappa/(kappa - i w) - 1."""
    if kappa <= 0:
        raise DomainError("kappa must be > 0")
    _check_eta(eta_int)
    return ComplexResponse(2.0 * eta_int * kappa / (kappa - 1j * omega) - 1.0, omega)


def lossy_T(omega, kappa, eta_int):
    """Transmission of the internal-loss vacuum port: 2 kappa sqrt(eta (1 - eta))/(kappa - i w)."""
    if kappa <= 0:
        raise DomainError("kappa must be > 0")
    _check_eta(eta_int)
    return ComplexResponse(
        2.0 * kappa * math.sqrt(eta_int * (1.0 - eta_int)) / (kappa - 1j * omega), omega
    )


def sql_force_psd(omega, mass_m):
    """Force SQL hbar m omega^2."""
    if omega <= 0:
        raise DomainError("omega must be > 0")
    if mass_m <= 0:
        raise DomainError("mass must be > 0")
    return hbar * mass_m * omega**2


@dataclass(frozen=True)
class SqlNormalization:
    """Force-SQL at one frequency.

    ``h_sql_sq_ref`` is the signal-referred noise of an unsqueezed single cavity
    at |K| = 1 in the normalized units used throughout (vacuum variance 1/2), so
    ``psd / h_sql_sq_ref`` is the SQL-relative spectrum.
    """

    omega: float
    F_sql_sq: float
    h_sql_sq_ref: float = 0.5

    @classmethod
    def at(cls, omega, mass_m):
        return cls(omega, sql_force_psd(omega, mass_m))

    @property
    def F_sql(self):
        # |chi| keeps F_sql real; S_F^sql = hbar m omega^2 is the operative quantity
        return math.sqrt(self.F_sql_sq)
