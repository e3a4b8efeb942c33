"""Frequency sweeps, SQL-relative spectra, suppression factors, CSV export and a Monte-Carlo oracle."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import schemes
from .kernels import SqlNormalization, chi_free_mass, coupling_K_raw
from .params import TWO_PI
from .quadrature import (
    CHANNELS,
    INDEX,
    QBA_CHANNELS,
    SHOT_CHANNELS,
    SIGNAL_CHANNEL,
    assemble_covariance,
    contribution,
    psd,
)
from .schemes import SchemeId

SQL_BRACKET = 2.0
REPORT_FREQ_HZ = 100.0


class DecompositionError(ArithmeticError):
    pass


class NonFiniteSpectrum(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class NoiseSpectrum:
    scheme: SchemeId
    freqs_hz: np.ndarray
    psd_rel_sql: np.ndarray

    @property
    def psd_db(self):
        return 10.0 * np.log10(self.psd_rel_sql)

    def below_sql(self):
        return self.psd_rel_sql < 1.0


def _K_a(omega, config):
    a = config.cavity_a
    return coupling_K_raw(omega, a.kappa, a.theta, chi_free_mass(omega))


def _dual_rel_sql(expr, cov):
    signal = schemes.signal_transfer(expr)
    if signal == 0:
        raise NonFiniteSpectrum(f"no signal transfer at omega={expr.omega!r}")
    return psd(expr, cov) / signal / SqlNormalization(expr.omega, 1.0).h_sql_sq_ref


def rel_sql_point(scheme, config, omega, weight=None, theta_b=None):
    """Signal-referred noise of ``scheme`` at ``omega`` relative to the free-mass SQL."""
    if scheme is SchemeId.SingleVacuum:
        return schemes.single_cavity_psd(omega, _K_a(omega, config), config.homodyne_angle_phi_L, 0.0) / SQL_BRACKET
    if scheme is SchemeId.SingleSqueezed:
        return schemes.single_cavity_psd(omega, _K_a(omega, config), math.pi / 2, config.r) / SQL_BRACKET
    if scheme is SchemeId.HybridIdeal:
        return schemes.hybrid_psd(omega, _K_a(omega, config), config.r, config.losses) / SQL_BRACKET
    if scheme is SchemeId.DualLossless:
        cfg = config.lossless()
        expr = schemes.balanced_expr(omega, cfg, weight, theta_b)
        return _dual_rel_sql(expr, assemble_covariance(cfg, omega))
    if scheme is SchemeId.DualLossy:
        expr = schemes.balanced_expr_lossy(omega, config, weight, theta_b)
    elif scheme is SchemeId.DualLossyPivot:
        expr = schemes.pivot_balanced_expr(omega, config, weight, theta_b)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return _dual_rel_sql(expr, assemble_covariance(config, omega))


def sweep(config, scheme_list, weight=None, theta_b=None, workers=1):
    """Evaluate every scheme on the config's frequency grid; output order follows ``scheme_list``."""
    if not scheme_list:
        raise ValueError("scheme list is empty")
    freqs = config.sweep.frequencies_hz()
    omegas = TWO_PI * freqs
    out = []
    for scheme in scheme_list:
        point = lambda w, s=scheme: rel_sql_point(s, config, float(w), weight, theta_b)  # noqa: E731
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                values = np.fromiter(pool.map(point, omegas), float, len(omegas))
        else:
            values = np.fromiter(map(point, omegas), float, len(omegas))
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise NonFiniteSpectrum(f"{scheme.value}: non-finite or non-positive PSD in sweep")
        out.append(NoiseSpectrum(scheme, freqs, values))
    return out


def sql_touch_frequency(config, lo_hz=1e-3, hi_hz=1e6, tol=1e-13):
    """Frequency (Hz) where |K_a| = 1, by bisection on log-frequency (|K_a| is decreasing)."""
    g = lambda f: abs(_K_a(TWO_PI * f, config)) - 1.0  # noqa: E731
    if g(lo_hz) <= 0 or g(hi_hz) >= 0:
        raise ValueError("|K_a| = 1 is not bracketed")
    a, b = math.log(lo_hz), math.log(hi_hz)
    while b - a > tol:
        m = 0.5 * (a + b)
        if g(math.exp(m)) > 0:
            a = m
        else:
            b = m
    return math.exp(0.5 * (a + b))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int

    def agrees_with(self, value, n_sigma=3.0):
        return abs(self.mean - value) <= n_sigma * self.stderr


def _sampling_factor(matrix, floor=1e-12):
    lam, vec = np.linalg.eigh(matrix)
    scale = max(1.0, float(np.max(np.abs(lam))))
    if lam.min() < -floor * scale:
        raise DecompositionError(f"covariance not positive semidefinite (min eigenvalue {lam.min()!r})")
    return vec * np.sqrt(np.clip(lam, 0.0, None))


def monte_carlo_psd(expr, cov, n_samples=1_000_000, seed=0, chunk=100_000):
    """Sample circular complex Gaussian channel vectors z with E[z z^H] = S and average |c^H z|^2."""
    if cov.channels != CHANNELS:
        raise ValueError("Monte-Carlo oracle needs a full-catalog covariance")
    factor = _sampling_factor(cov.matrix)
    c = np.array(expr.coeffs)
    c[INDEX[SIGNAL_CHANNEL]] = 0
    rng = np.random.default_rng(seed)
    total = total_sq = 0.0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        w = (rng.standard_normal((m, len(CHANNELS))) + 1j * rng.standard_normal((m, len(CHANNELS)))) / math.sqrt(2)
        z = w @ factor.T
        x = np.abs(z @ c.conj()) ** 2
        total += x.sum()
        total_sq += (x * x).sum()
        done += m
    mean = total / n_samples
    var = (total_sq - n_samples * mean**2) / (n_samples - 1)
    return McEstimate(float(mean), float(math.sqrt(max(var, 0.0) / n_samples)), n_samples, seed)


@dataclass(frozen=True)
class SuppressionReport:
    r: float
    shot_db: float
    qba_db: float
    thermal_db: float
    signal_gain_db: float
    lossy: bool
    hybrid_gain_db: float
    closed_form_residual: float | None = None

    def lines(self):
        return [f"{name} = {getattr(self, name)!r}" for name in self.__dataclass_fields__]


def closed_form_suppression(r):
    """Lossless factors (shot, QBA, thermal, signal) of the balanced readout."""
    ch, t2 = math.cosh(2 * r), math.tanh(2 * r) ** 2
    return ch, ch**5, ch**4, (1 + t2) ** 2


def suppression_factors(config, omega, lossy):
    """Per-channel-group PSD ratios: unsqueezed cavity A alone over the balanced readout.

    Both readouts share K_a and the loss budget; the thermal ratio is taken with a
    unit thermal PSD so it does not depend on the configured thermal level.
    """
    cfg = config if lossy else config.lossless()
    cfg = replace(cfg, thermal_psd_ratio=1.0)
    build = schemes.balanced_expr_lossy if lossy else schemes.balanced_expr
    ref_cfg = cfg.with_squeezing(0.0)
    ref = build(omega, ref_cfg)
    bal = build(omega, cfg)
    cov_ref = assemble_covariance(ref_cfg, omega)
    cov_bal = assemble_covariance(cfg, omega)
    ratio = lambda group: contribution(ref, cov_ref, group) / contribution(bal, cov_bal, group)  # noqa: E731
    return (
        ratio(SHOT_CHANNELS),
        ratio(QBA_CHANNELS),
        ratio(("Fth_mirror",)),
        schemes.signal_transfer(bal) / schemes.signal_transfer(ref),
    )


def suppression_report(config, lossy=None, freq_hz=REPORT_FREQ_HZ):
    if lossy is None:
        lossy = not config.losses.is_lossless
    factors = suppression_factors(config, TWO_PI * freq_hz, lossy)
    residual = None
    if not lossy:
        closed = closed_form_suppression(config.r)
        residual = max(abs(f / c - 1.0) for f, c in zip(factors, closed))
    db = [10 * math.log10(f) for f in factors]
    losses = config.losses if lossy else config.lossless().losses
    hybrid_gain_db = -10 * math.log10(schemes.hybrid_loss_factor(config.r, losses))
    return SuppressionReport(config.r, db[0], db[1], db[2], db[3], lossy, hybrid_gain_db, residual)


def export_csv(spectra, path):
    """Write ``freq_hz,<scheme>_rel_sql,<scheme>_db,...`` with 17 significant digits."""
    if not spectra:
        raise ValueError("nothing to export")
    freqs = spectra[0].freqs_hz
    for s in spectra[1:]:
        if not np.array_equal(s.freqs_hz, freqs):
            raise ValueError("spectra are on different frequency grids")
    header = ["freq_hz"]
    for s in spectra:
        header += [f"{s.scheme.value}_rel_sql", f"{s.scheme.value}_db"]
    columns = [freqs]
    for s in spectra:
        columns += [s.psd_rel_sql, s.psd_db]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([format(float(v), ".17g") for v in row])


def read_csv(path):
    """Inverse of :func:`export_csv`: (freqs, {column name: array})."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array([[float(v) for v in row] for row in rows[1:]])
    cols = {name: body[:, i] for i, name in enumerate(header)}
    return cols.pop("freq_hz"), cols
