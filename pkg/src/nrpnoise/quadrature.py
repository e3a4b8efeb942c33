"""Output quadratures as complex linear forms over a fixed catalog of noise channels.

A detector output at one sideband frequency is written as ``sum_j c_j Q_j`` where
``Q_j`` runs over :data:`CHANNELS`. Its symmetrized spectral density against an
input cross-spectral matrix ``S`` is the Hermitian form ``c^H S c``. Vacuum
channels have variance 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import DomainError

CHANNELS = (
    "Xin_a", "Yin_a", "Xin_b", "Yin_b",
    "vXin_a", "vYin_a", "vXin_b", "vYin_b",
    "vXint_a", "vYint_a", "vXint_b", "vYint_b",
    "vXout_a", "vYout_a", "vXout_b", "vYout_b",
    "Fth_mirror", "Fth_pivot", "Fgw",
)
INDEX = {name: i for i, name in enumerate(CHANNELS)}
N_CHANNELS = len(CHANNELS)

# amplitude-quadrature inputs drive the mirror (back-action); phase-quadrature
# inputs reach the detector directly (shot noise)
QBA_CHANNELS = ("Xin_a", "Xin_b", "vXin_a", "vXin_b", "vXint_a", "vXint_b", "vXout_a", "vXout_b")
SHOT_CHANNELS = ("Yin_a", "Yin_b", "vYin_a", "vYin_b", "vYint_a", "vYint_b", "vYout_a", "vYout_b")
SQUEEZED_X = ("Xin_a", "Xin_b")
SQUEEZED_Y = ("Yin_a", "Yin_b")
SIGNAL_CHANNEL = "Fgw"

VACUUM = 0.5


class FrequencyMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class QuadratureExpr:
    omega: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (N_CHANNELS,):
            raise ValueError(f"expected {N_CHANNELS} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError(f"non-finite coefficient at omega={self.omega!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_terms(cls, omega, terms):
        c = np.zeros(N_CHANNELS, dtype=complex)
        for name, value in terms.items():
            c[INDEX[name]] += value
        return cls(omega, c)

    @classmethod
    def zero(cls, omega):
        return cls(omega, np.zeros(N_CHANNELS, dtype=complex))

    def __getitem__(self, name):
        return complex(self.coeffs[INDEX[name]])

    def restricted(self, names):
        """Copy keeping only the listed channels."""
        mask = np.zeros(N_CHANNELS, dtype=bool)
        mask[[INDEX[n] for n in names]] = True
        return QuadratureExpr(self.omega, np.where(mask, self.coeffs, 0))

    def terms(self):
        return {n: complex(v) for n, v in zip(CHANNELS, self.coeffs) if v != 0}


@dataclass(frozen=True, eq=False)
class InputCovariance:
    """Symmetrized cross-spectral matrix over ``channels``.

    ``omega`` is None for frequency-independent blocks.
    """

    omega: float | None
    matrix: np.ndarray
    channels: tuple = field(default=CHANNELS)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = len(self.channels)
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match {n} channels")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > 1e-14 * scale:
            raise ValueError("covariance is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def entry(self, a, b):
        idx = {n: i for i, n in enumerate(self.channels)}
        return complex(self.matrix[idx[a], idx[b]])

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.matrix).min())


def _tmsv_pure(r):
    """Two-mode squeezed vacuum over (X_a, Y_a, X_b, Y_b)."""
    c, s = math.cosh(2 * r) / 2, math.sinh(2 * r) / 2
    return np.array([
        [c, 0, s, 0],
        [0, c, 0, -s],
        [s, 0, c, 0],
        [0, -s, 0, c],
    ], dtype=float)


def tmsv_input_covariance(r, eta_inp_a=1.0, eta_inp_b=1.0):
    """Covariance of the effective cavity inputs (X_a, Y_a, X_b, Y_b) after input loss.

    The pure TMSV state is mixed with vacuum on a beam splitter of transmissivity
    eta for each arm, giving ``2 S[X_a, X_a] = 1 + 2 eta_a sinh^2 r`` and
    ``2 S[X_a, X_b] = sqrt(eta_a eta_b) sinh 2r``.
    """
    if not (math.isfinite(r) and r >= 0):
        raise DomainError(f"squeezing r must be >= 0, got {r!r}")
    for eta in (eta_inp_a, eta_inp_b):
        if not 0.0 <= eta <= 1.0:
            raise DomainError(f"efficiency must lie in [0, 1], got {eta!r}")
    raw = np.zeros((8, 8))
    raw[:4, :4] = _tmsv_pure(r)
    raw[4:, 4:] = VACUUM * np.eye(4)
    ta, tb = math.sqrt(eta_inp_a), math.sqrt(eta_inp_b)
    la, lb = math.sqrt(1 - eta_inp_a), math.sqrt(1 - eta_inp_b)
    mix = np.zeros((4, 8))
    mix[0, 0], mix[0, 4] = ta, la
    mix[1, 1], mix[1, 5] = ta, la
    mix[2, 2], mix[2, 6] = tb, lb
    mix[3, 3], mix[3, 7] = tb, lb
    eff = mix @ raw @ mix.T
    return InputCovariance(None, eff, channels=("Xinp_a", "Yinp_a", "Xinp_b", "Yinp_b"))


def assemble_covariance(config, omega):
    """Full catalog covariance for ``config`` at ``omega``.

    Loss is not folded in here: the scheme builders route each loss port to its
    own vacuum channel, so the squeezed inputs carry the pure TMSV statistics.
    Thermal channels are in units where 1/2 is the force SQL, so a ratio of 1
    puts the thermal force exactly at S_F^sql.
    """
    m = np.zeros((N_CHANNELS, N_CHANNELS))
    pure = _tmsv_pure(config.squeezer.r)
    sq = [INDEX[n] for n in ("Xin_a", "Yin_a", "Xin_b", "Yin_b")]
    m[np.ix_(sq, sq)] = pure
    for name in CHANNELS:
        if name.startswith("v"):
            m[INDEX[name], INDEX[name]] = VACUUM
    m[INDEX["Fth_mirror"], INDEX["Fth_mirror"]] = VACUUM * config.thermal_psd_ratio
    m[INDEX["Fth_pivot"], INDEX["Fth_pivot"]] = VACUUM * config.pivot_thermal_psd_ratio
    return InputCovariance(omega, m)


def _coeff_vector(expr, cov):
    if cov.channels == CHANNELS:
        return expr.coeffs
    return np.array([expr[n] for n in cov.channels])


def _noise_vector(expr, cov):
    if cov.omega is not None and expr.omega != cov.omega:
        raise FrequencyMismatch(f"expr at {expr.omega!r}, covariance at {cov.omega!r}")
    c = np.array(_coeff_vector(expr, cov))
    if cov.channels == CHANNELS:
        c[INDEX[SIGNAL_CHANNEL]] = 0
    return c


def quadratic_form(expr, cov):
    """Complex value c^H S c (Fgw excluded)."""
    c = _noise_vector(expr, cov)
    return complex(c.conj() @ cov.matrix @ c)


def psd(expr, cov):
    """Symmetrized noise spectral density of ``expr``; the GW signal channel is not noise."""
    c = _noise_vector(expr, cov)
    value = complex(c.conj() @ cov.matrix @ c)
    # rounding scale of the sum, not of its (possibly cancelled) result
    scale = float(np.abs(c) @ np.abs(cov.matrix) @ np.abs(c))
    if abs(value.imag) > 1e-12 * scale:
        raise ArithmeticError(f"quadratic form has imaginary part {value.imag!r}")
    return max(value.real, 0.0)


def contribution(expr, cov, channels):
    """PSD contributed by a subset of channels (valid when it is uncorrelated with the rest)."""
    return psd(expr.restricted(channels), cov)


def linear_combine(expr_1, expr_2, weight):
    """expr_1 + weight * expr_2."""
    if expr_1.omega != expr_2.omega:
        raise FrequencyMismatch(f"{expr_1.omega!r} != {expr_2.omega!r}")
    return QuadratureExpr(expr_1.omega, expr_1.coeffs + weight * expr_2.coeffs)
