"""Readout schemes: closed-form single-cavity spectra and dual-cavity output quadratures.

The dual-cavity builders return :class:`QuadratureExpr` objects. Force channels
are expressed in units of the force SQL, so the GW signal coefficient squared is
the signal transfer and thermal ratios apply directly.
"""

from __future__ import annotations

import enum
import math

from .kernels import (
    DomainError,
    beta,
    chi_free_mass,
    chi_pivot,
    coupling_cross,
    coupling_K_raw,
    lossy_R,
    lossy_T,
    sqrt_response,
)
from .quadrature import QuadratureExpr, linear_combine


class SchemeId(enum.Enum):
    SingleVacuum = "single-vacuum"
    SingleSqueezed = "single-squeezed"
    HybridIdeal = "hybrid-ideal"
    DualLossless = "dual-lossless"
    DualLossy = "dual-lossy"
    DualLossyPivot = "dual-lossy-pivot"

    @classmethod
    def parse(cls, name):
        try:
            return cls(name)
        except ValueError:
            known = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scheme {name!r} (known: {known})") from None


class LossyConfigError(ValueError):
    """A lossless-only builder was handed a config with losses."""


def _magnitude(K):
    k = abs(getattr(K, "value", K))
    if k == 0:
        raise DomainError("coupling magnitude is zero")
    return k


def single_cavity_psd(omega, K, phi_L=math.pi / 2, r=0.0):
    """Bracketed single-cavity spectrum; the SQL touch point has value 2.

    ``r == 0`` gives the homodyne form ((K - cot phi)^2 + 1)/K, ``r > 0`` the
    phase-quadrature squeezed form e^{-2r} K + e^{2r}/K.
    """
    k = _magnitude(K)
    if r == 0:
        cot = math.cos(phi_L) / math.sin(phi_L)
        return ((k - cot) ** 2 + 1.0) / k
    if phi_L != math.pi / 2:
        raise DomainError("squeezed single-cavity form is defined for phi_L = pi/2 only")
    return math.exp(-2 * r) * k + math.exp(2 * r) / k


def hybrid_ideal_psd(omega, K, r):
    """Perfectly matched spin-optomechanical comparator: (K + 1/K)/cosh 2r."""
    k = _magnitude(K)
    return (k + 1.0 / k) / math.cosh(2 * r)


def hybrid_loss_factor(r, losses):
    """Noise factor of the matched comparator including the in/intra/out loss chain.

    Each arm of the entangled pair passes eta_inp * eta_int * eta_out; the two
    arms are combined with weight tanh 2r and the signal (arm A only) is
    attenuated by eta_int * eta_out. Equals 1/cosh 2r without loss.
    """
    ch, sh, t = math.cosh(2 * r), math.sinh(2 * r), math.tanh(2 * r)
    ea = losses.eta_inp_a * losses.eta_int_a * losses.eta_out_a
    eb = losses.eta_inp_b * losses.eta_int_b * losses.eta_out_b
    signal = losses.eta_int_a * losses.eta_out_a
    if signal == 0:
        raise DomainError("arm A transmits no signal")
    noise = (ea * ch + 1 - ea) + t**2 * (eb * ch + 1 - eb) - 2 * t * math.sqrt(ea * eb) * sh
    return noise / signal


def hybrid_psd(omega, K, r, losses):
    k = _magnitude(K)
    return (k + 1.0 / k) * hybrid_loss_factor(r, losses)


def _chi(omega, config, chi):
    if chi == "free":
        return chi_free_mass(omega)
    if chi == "pivot":
        return chi_pivot(omega, config.mech.omega_m, config.mech.eta_over_m)
    raise ValueError(f"unknown susceptibility model {chi!r}")


def derived_theta_b(config, ratio):
    """Cavity-B power giving K_b = ratio * K_a (exact at all omega when kappa_a == kappa_b)."""
    a, b = config.cavity_a, config.cavity_b
    return ratio * a.theta * b.kappa / a.kappa


def _balanced_theta_b(config):
    from .balancing import balancing_power_ratio

    return derived_theta_b(config, balancing_power_ratio(config.r, config.losses))


def couplings(omega, config, theta_b=None, chi="free"):
    """(K_a, K_b, K_ab) at ``omega``; theta_b defaults to the balancing condition."""
    if theta_b is None:
        theta_b = _balanced_theta_b(config)
    x = _chi(omega, config, chi)
    k_a = coupling_K_raw(omega, config.cavity_a.kappa, config.cavity_a.theta, x)
    k_b = coupling_K_raw(omega, config.cavity_b.kappa, theta_b, x)
    return k_a, k_b, coupling_cross(k_a, k_b)


def _sides(which):
    if which == "A":
        return "a", "b", 1.0
    if which == "B":
        return "b", "a", -1.0
    raise ValueError(f"which must be 'A' or 'B', got {which!r}")


def dual_output_expr(omega, which, config, theta_b=None, chi="free", pivot_force=False):
    """Lossless phase-quadrature output of cavity A or B.

    Thermal force enters with + on A and - on B (the mirrors move oppositely);
    the GW force enters both with + through the pivot.
    """
    if not config.losses.is_lossless:
        raise LossyConfigError("dual_output_expr needs a lossless config; use dual_output_expr_lossy")
    k_a, k_b, k_ab = couplings(omega, config, theta_b, chi)
    me, other, sign = _sides(which)
    k_self = k_a if me == "a" else k_b
    kappa = (config.cavity_a if me == "a" else config.cavity_b).kappa
    force = 1j * sqrt_response(2 * k_self.value)
    terms = {
        f"Yin_{me}": complex(math.cos(2 * beta(omega, kappa)), math.sin(2 * beta(omega, kappa))),
        f"Xin_{other}": k_ab.value,
        f"Xin_{me}": -k_self.value,
        "Fth_mirror": sign * force,
        "Fgw": force,
    }
    if pivot_force:
        terms["Fth_pivot"] = force
    return QuadratureExpr.from_terms(omega, terms)


def dual_output_expr_lossy(omega, which, config, theta_b=None, chi="free", pivot_force=False):
    """Output of cavity A or B with input, intracavity and output losses.

    Each loss port injects its own vacuum channel; the effective input
    quadratures are sqrt(eta_inp) * in + sqrt(1 - eta_inp) * v_in.
    """
    k_a, k_b, k_ab = couplings(omega, config, theta_b, chi)
    me, other, sign = _sides(which)
    L = config.losses
    eta = lambda kind, side: getattr(L, f"eta_{kind}_{side}")  # noqa: E731
    k_self = (k_a if me == "a" else k_b).value
    kappa = (config.cavity_a if me == "a" else config.cavity_b).kappa
    i_me, i_other = eta("int", me), eta("int", other)
    pre = math.sqrt(eta("out", me))

    R = lossy_R(omega, kappa, i_me).value
    T = lossy_T(omega, kappa, i_me).value
    x_other = pre * math.sqrt(i_me * i_other) * k_ab.value
    x_self = -pre * i_me * k_self
    force = pre * 1j * sqrt_response(2 * i_me * k_self)

    t_me, l_me = math.sqrt(eta("inp", me)), math.sqrt(1 - eta("inp", me))
    t_other, l_other = math.sqrt(eta("inp", other)), math.sqrt(1 - eta("inp", other))
    terms = {
        f"Yin_{me}": pre * R * t_me,
        f"vYin_{me}": pre * R * l_me,
        f"Xin_{other}": x_other * t_other,
        f"vXin_{other}": x_other * l_other,
        f"Xin_{me}": x_self * t_me,
        f"vXin_{me}": x_self * l_me,
        f"vYint_{me}": pre * T,
        f"vXint_{other}": pre * math.sqrt(i_me * (1 - i_other)) * k_ab.value,
        f"vXint_{me}": -pre * math.sqrt(i_me * (1 - i_me)) * k_self,
        "Fth_mirror": sign * force,
        "Fgw": force,
        f"vYout_{me}": math.sqrt(1 - eta("out", me)),
    }
    if pivot_force:
        terms["Fth_pivot"] = force
    return QuadratureExpr.from_terms(omega, terms)


def _default_weight(config):
    from .balancing import optimal_weight_analytic

    return optimal_weight_analytic(config.r, config.losses)


def balanced_expr(omega, config, weight=None, theta_b=None, chi="free", pivot_force=False):
    """Lossless combined readout Y_A + weight * Y_B (weight defaults to tanh 2r)."""
    if weight is None:
        weight = _default_weight(config)
    a = dual_output_expr(omega, "A", config, theta_b, chi, pivot_force)
    b = dual_output_expr(omega, "B", config, theta_b, chi, pivot_force)
    return linear_combine(a, b, weight)


def balanced_expr_lossy(omega, config, weight=None, theta_b=None, chi="free", pivot_force=False):
    """Lossy combined readout with the loss-corrected weight and balancing condition."""
    if weight is None:
        weight = _default_weight(config)
    a = dual_output_expr_lossy(omega, "A", config, theta_b, chi, pivot_force)
    b = dual_output_expr_lossy(omega, "B", config, theta_b, chi, pivot_force)
    return linear_combine(a, b, weight)


def pivot_balanced_expr(omega, config, weight=None, theta_b=None):
    """Lossy balanced readout with a suspended pivot: its susceptibility and thermal force.

    The pivot force moves both mirrors together, exactly like the GW signal.
    """
    return balanced_expr_lossy(omega, config, weight, theta_b, chi="pivot", pivot_force=True)


def signal_transfer(expr):
    """|coefficient of the GW force|^2."""
    return abs(expr["Fgw"]) ** 2
