"""Combination weight and pump-power balancing: closed forms and numerical recovery.

The numerical path minimizes the squeezed-input noise of the combined readout,
referred to cavity A's own coupling:

* weight: variance of the phase-quadrature TMSV term, divided by |c(Yin_a)|^2;
* power ratio: variance of the back-action TMSV term, divided by |c(Xin_a)|^2.

Vacuum ports opened by losses are left out of both objectives. Each objective
is then an exact parabola in its parameter (the ratio one in sqrt(ratio)), and
the minimizer lands on the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import DomainError
from .quadrature import SQUEEZED_X, SQUEEZED_Y, assemble_covariance, psd
from . import schemes

INV_PHI = (math.sqrt(5) - 1) / 2


class BracketError(RuntimeError):
    """The search interval does not contain a minimum, even after expansion."""


def optimal_weight_analytic(r, losses):
    """Weight on cavity B's output: sqrt(eta_out_a eta_inp_a / (eta_out_b eta_inp_b)) tanh 2r."""
    if r < 0:
        raise DomainError("r must be >= 0")
    if losses.eta_out_b == 0 or losses.eta_inp_b == 0:
        raise DomainError("cavity B efficiencies must be nonzero")
    scale = math.sqrt(losses.eta_out_a * losses.eta_inp_a / (losses.eta_out_b * losses.eta_inp_b))
    return scale * math.tanh(2 * r)


def balancing_power_ratio(r, losses):
    """K_b / K_a = (eta_int_a eta_inp_a / (eta_int_b eta_inp_b)) tanh^2 2r."""
    if r < 0:
        raise DomainError("r must be >= 0")
    if losses.eta_int_b == 0 or losses.eta_inp_b == 0:
        raise DomainError("cavity B efficiencies must be nonzero")
    return losses.eta_int_a * losses.eta_inp_a / (losses.eta_int_b * losses.eta_inp_b) * math.tanh(2 * r) ** 2


def _golden(f, a, b, tol, max_iter):
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2), (a, b)


def _parabolic_polish(f, x0, f0, h, lo, hi, tol, max_iter=40):
    """Successive three-point parabola steps from (x0, f0). Exact in one step for a parabola."""
    best_x, best_f = x0, f0
    converged = False
    for _ in range(max_iter):
        xm, xp = max(lo, best_x - h), min(hi, best_x + h)
        if xp - xm < 2 * np.finfo(float).eps * max(1.0, abs(best_x)):
            converged = h <= tol
            break
        fm, fp = f(xm), f(xp)
        x = np.array([xm, best_x, xp])
        y = np.array([fm, best_f, fp])
        if not np.all(np.isfinite(y)):
            break
        # vertex through the three points (handles the asymmetric stencil at the bounds)
        d1 = (y[1] - y[0]) / (x[1] - x[0]) if x[1] != x[0] else None
        d2 = (y[2] - y[1]) / (x[2] - x[1]) if x[2] != x[1] else None
        if d1 is None or d2 is None:
            break
        curv = (d2 - d1) / (x[2] - x[0])
        if curv <= 0:
            break
        vertex = 0.5 * (x[0] + x[1]) - d1 / (2 * curv)
        vertex = min(max(vertex, lo), hi)
        fv = f(vertex)
        step = abs(vertex - best_x)
        if fv <= best_f or step < tol:
            best_x, best_f = (vertex, fv) if fv <= best_f else (best_x, best_f)
            if step < tol:
                converged = True
                break
            h = max(min(h, 4 * step), 1e-3 * tol)
        else:
            h *= 0.25
    return best_x, best_f, converged


def minimize_scalar(objective, lo, hi, tol=1e-10, bounds=(-math.inf, math.inf), max_expand=40):
    """Deterministic bracketed minimization: golden section, then parabolic polish.

    If the minimum sits at an end of ``[lo, hi]`` the interval is expanded on that
    side (never past ``bounds``). A minimum pinned at a hard bound is returned as
    the bound itself.
    """
    if not lo < hi:
        raise BracketError(f"empty bracket [{lo!r}, {hi!r}]")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    f = objective
    for _ in range(max_expand + 1):
        mid = lo + (1 - INV_PHI) * (hi - lo)
        flo, fmid, fhi = f(lo), f(mid), f(hi)
        if fmid <= flo and fmid <= fhi:
            break
        width = hi - lo
        if flo < fmid:
            if lo <= bounds[0]:
                break
            lo = max(bounds[0], lo - width)
        elif fhi < fmid:
            if hi >= bounds[1]:
                break
            hi = min(bounds[1], hi + width)
    else:
        raise BracketError(f"no interior minimum found; last bracket [{lo!r}, {hi!r}]")

    width0 = hi - lo
    (x, fx), (a, b) = _golden(f, lo, hi, max(tol, 1e-4 * width0), 200)
    px, pf, converged = _parabolic_polish(f, x, fx, max(b - a, tol), lo, hi, tol)
    if converged and pf <= fx:
        return float(px)
    # polish could not help (kinks, plateaus): finish with plain golden section
    (gx, gf), _ = _golden(f, a, b, tol, 400)
    return float(gx if gf <= pf else px)


def optimize_weight_numeric(objective, bracket=(-0.5, 1.5), tol=1e-10):
    return minimize_scalar(objective, bracket[0], bracket[1], tol)


def _builder(config):
    if config.losses.is_lossless:
        return schemes.balanced_expr
    return schemes.balanced_expr_lossy


def _normalized_variance(expr, cov, channels):
    lead = expr[channels[0]]
    if lead == 0:
        return math.inf
    return psd(expr.restricted(channels), cov) / abs(lead) ** 2


def weight_objective(config, omega, theta_b=None, chi="free"):
    """w -> phase-quadrature squeezed noise of Y_A + w Y_B, per unit of cavity A's share."""
    build = _builder(config)
    cov = assemble_covariance(config, omega)
    return lambda w: _normalized_variance(build(omega, config, w, theta_b, chi), cov, SQUEEZED_Y)


def ratio_objective(config, omega, weight, chi="free"):
    """u -> back-action squeezed noise with K_b = u^2 K_a, per unit of cavity A's share."""
    build = _builder(config)
    cov = assemble_covariance(config, omega)

    def f(u):
        theta_b = schemes.derived_theta_b(config, u * u)
        return _normalized_variance(build(omega, config, weight, theta_b, chi), cov, SQUEEZED_X)

    return f


def optimize_power_ratio_numeric(config, omega, tol=1e-8, weight_tol=1e-10):
    """Ratio K_b/K_a minimizing the weight-optimized back-action noise.

    Searches over u = sqrt(K_b/K_a) >= 0, re-optimizing the weight for every
    candidate.
    """

    def outer(u):
        theta_b = schemes.derived_theta_b(config, u * u)
        w = optimize_weight_numeric(weight_objective(config, omega, theta_b), tol=weight_tol)
        return ratio_objective(config, omega, w)(u)

    u = minimize_scalar(outer, 0.0, 1.5, tol=tol / 4, bounds=(0.0, math.inf))
    return float(u * u)


@dataclass(frozen=True)
class BalanceReport:
    r: float
    analytic_weight: float
    numeric_weight: float
    analytic_power_ratio: float
    numeric_power_ratio: float
    weight_residual: float
    ratio_residual: float
    omega_eval: float

    def lines(self):
        return [f"{name} = {getattr(self, name)!r}" for name in self.__dataclass_fields__]


def verify_balance(config, omega, weight_tol=1e-10, ratio_tol=1e-8):
    w_analytic = optimal_weight_analytic(config.r, config.losses)
    rho_analytic = balancing_power_ratio(config.r, config.losses)
    w_numeric = optimize_weight_numeric(weight_objective(config, omega), tol=weight_tol)
    rho_numeric = optimize_power_ratio_numeric(config, omega, tol=ratio_tol, weight_tol=weight_tol)
    return BalanceReport(
        r=config.r,
        analytic_weight=w_analytic,
        numeric_weight=w_numeric,
        analytic_power_ratio=rho_analytic,
        numeric_power_ratio=rho_numeric,
        weight_residual=abs(w_numeric - w_analytic),
        ratio_residual=abs(rho_numeric - rho_analytic),
        omega_eval=omega,
    )
