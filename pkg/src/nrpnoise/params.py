"""Physical parameters of the dual-cavity detector, config-file I/O and presets.

Frequencies that users quote in Hz (cavity linewidth, suspension frequency,
damping rate, laser frequency) are stored in Hz so that a config file
round-trips bit-exactly; the angular values are exposed as properties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from scipy.constants import c as SPEED_OF_LIGHT

TWO_PI = 2.0 * math.pi


class ConfigError(Exception):
    """Base class for configuration problems."""


class ParseError(ConfigError):
    """Malformed line or unknown key in a config file."""


class ValidationError(ConfigError):
    """A parameter violates its invariant. ``field`` names the offending parameter."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class ConflictError(ConfigError):
    """Optical power given both as theta and as pump intensity, and they disagree."""


def theta_from_intensity(intensity_w, omega_laser, mass_kg, length_m):
    """Normalized optical power 8 w_L I / (m c L) in s^-3."""
    return 8.0 * omega_laser * intensity_w / (mass_kg * SPEED_OF_LIGHT * length_m)


def intensity_from_theta(theta, omega_laser, mass_kg, length_m):
    return theta * mass_kg * SPEED_OF_LIGHT * length_m / (8.0 * omega_laser)


def _check(cond, name, message):
    if not cond:
        raise ValidationError(name, message)


@dataclass(frozen=True)
class CavityParams:
    length_L: float
    kappa_hz: float
    theta: float | None = None
    pump_intensity_I: float | None = None
    laser_frequency_hz: float | None = None

    def __post_init__(self):
        _check(math.isfinite(self.length_L) and self.length_L > 0, "length_L", "must be > 0")
        _check(math.isfinite(self.kappa_hz) and self.kappa_hz > 0, "kappa", "must be > 0")
        if self.theta is not None:
            _check(math.isfinite(self.theta) and self.theta > 0, "theta", "must be > 0")
        if self.pump_intensity_I is not None:
            _check(self.pump_intensity_I > 0, "pump_intensity_I", "must be > 0")
            _check(
                self.laser_frequency_hz is not None and self.laser_frequency_hz > 0,
                "laser_frequency_omega_L",
                "required (and > 0) when pump intensity is given",
            )

    @property
    def kappa(self):
        """Amplitude decay rate in rad/s."""
        return TWO_PI * self.kappa_hz

    @property
    def laser_frequency_omega_L(self):
        if self.laser_frequency_hz is None:
            return None
        return TWO_PI * self.laser_frequency_hz

    def resolved(self, mass_kg):
        """Return a copy whose theta is set, deriving it from the pump intensity if needed."""
        if self.pump_intensity_I is None:
            _check(self.theta is not None, "theta", "either theta or pump intensity is required")
            return self
        derived = theta_from_intensity(
            self.pump_intensity_I, self.laser_frequency_omega_L, mass_kg, self.length_L
        )
        if self.theta is not None:
            if abs(derived - self.theta) > 1e-9 * abs(self.theta):
                raise ConflictError(
                    f"theta={self.theta!r} disagrees with pump intensity (gives {derived!r})"
                )
            return self
        return replace(self, theta=derived)


@dataclass(frozen=True)
class MechanicalParams:
    mass_m: float
    omega_m_hz: float = 0.0
    eta_over_m_hz: float = 0.0

    def __post_init__(self):
        _check(math.isfinite(self.mass_m) and self.mass_m > 0, "mass_m", "must be > 0")
        _check(self.omega_m_hz >= 0, "omega_m", "must be >= 0")
        _check(self.eta_over_m_hz >= 0, "eta_over_m", "must be >= 0")

    @property
    def omega_m(self):
        return TWO_PI * self.omega_m_hz

    @property
    def eta_over_m(self):
        return TWO_PI * self.eta_over_m_hz


@dataclass(frozen=True)
class SqueezerParams:
    r: float
    phase: float = math.pi / 2

    def __post_init__(self):
        _check(math.isfinite(self.r) and self.r >= 0, "r", "must be >= 0")
        # only the pi/2 pump phase keeps X and Y uncorrelated
        _check(self.phase == math.pi / 2, "phase", "only pi/2 is supported")


@dataclass(frozen=True)
class LossBudget:
    eta_inp_a: float = 1.0
    eta_inp_b: float = 1.0
    eta_out_a: float = 1.0
    eta_out_b: float = 1.0
    eta_int_a: float = 1.0
    eta_int_b: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            _check(0.0 <= v <= 1.0, f.name, f"must lie in [0, 1], got {v!r}")

    @property
    def is_lossless(self):
        return all(getattr(self, f.name) == 1.0 for f in fields(self))


@dataclass(frozen=True)
class SweepSpec:
    f_min: float = 1.0
    f_max: float = 1000.0
    n_points: int = 2000
    spacing: str = "log"

    def __post_init__(self):
        _check(self.f_min > 0, "f_min", "must be > 0")
        _check(self.f_max > self.f_min, "f_max", "must exceed f_min")
        _check(int(self.n_points) == self.n_points and self.n_points >= 2, "n_points", "must be an integer >= 2")
        _check(self.spacing in ("log", "linear"), "spacing", "must be 'log' or 'linear'")

    def frequencies_hz(self):
        import numpy as np

        if self.spacing == "log":
            return np.geomspace(self.f_min, self.f_max, self.n_points)
        return np.linspace(self.f_min, self.f_max, self.n_points)


@dataclass(frozen=True)
class SystemConfig:
    cavity_a: CavityParams
    cavity_b: CavityParams
    mech: MechanicalParams
    squeezer: SqueezerParams
    losses: LossBudget = field(default_factory=LossBudget)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    homodyne_angle_phi_L: float = math.pi / 2
    thermal_psd_ratio: float = 0.0
    pivot_thermal_psd_ratio: float = 0.0

    def __post_init__(self):
        _check(0.0 < self.homodyne_angle_phi_L < math.pi, "phi_L", "must lie in (0, pi)")
        _check(self.thermal_psd_ratio >= 0, "thermal_ratio", "must be >= 0")
        _check(self.pivot_thermal_psd_ratio >= 0, "pivot_thermal_ratio", "must be >= 0")
        object.__setattr__(self, "cavity_a", self.cavity_a.resolved(self.mech.mass_m))
        object.__setattr__(self, "cavity_b", self.cavity_b.resolved(self.mech.mass_m))

    @property
    def r(self):
        return self.squeezer.r

    def with_squeezing(self, r):
        return replace(self, squeezer=SqueezerParams(r))

    def lossless(self):
        return replace(self, losses=LossBudget())


_KEYS = {
    "r": float,
    "phi_L": float,
    "L_a_m": float,
    "L_b_m": float,
    "kappa_a_hz": float,
    "kappa_b_hz": float,
    "theta_a_s3": float,
    "theta_b_s3": float,
    "I_a_w": float,
    "I_b_w": float,
    "omega_L_hz": float,
    "m_kg": float,
    "omega_m_hz": float,
    "eta_over_m_hz": float,
    "eta_inp_a": float,
    "eta_inp_b": float,
    "eta_out_a": float,
    "eta_out_b": float,
    "eta_int_a": float,
    "eta_int_b": float,
    "f_min_hz": float,
    "f_max_hz": float,
    "n_points": int,
    "spacing": str,
    "thermal_ratio": float,
    "pivot_thermal_ratio": float,
}

_REQUIRED = ("r", "L_a_m", "kappa_a_hz", "m_kg")


def parse_config(text):
    """Parse ``key = value`` lines into a dict of typed values."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in _KEYS:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        if not val:
            raise ParseError(f"line {lineno}: missing value for {key!r}")
        try:
            values[key] = _KEYS[key](val)
        except ValueError:
            raise ParseError(f"line {lineno}: cannot read {val!r} as {_KEYS[key].__name__}") from None
    return values


def config_from_dict(values):
    for key in _REQUIRED:
        if key not in values:
            raise ValidationError(key, "missing required key")
    g = values.get

    def build(cls, keymap, **kwargs):
        try:
            return cls(**kwargs)
        except ValidationError as exc:
            key = keymap.get(exc.field, exc.field)
            raise ValidationError(key, str(exc).split(": ", 1)[1]) from None

    def cavity_keys(s):
        return {"length_L": f"L_{s}_m", "kappa": f"kappa_{s}_hz", "theta": f"theta_{s}_s3",
                "pump_intensity_I": f"I_{s}_w", "laser_frequency_omega_L": "omega_L_hz"}

    cav_a = build(CavityParams, cavity_keys("a"), length_L=g("L_a_m"), kappa_hz=g("kappa_a_hz"),
                  theta=g("theta_a_s3"), pump_intensity_I=g("I_a_w"), laser_frequency_hz=g("omega_L_hz"))
    theta_b = g("theta_b_s3")
    if theta_b is None and g("I_b_w") is None:
        # unspecified cavity B mirrors cavity A; dual schemes re-derive it anyway
        theta_b = cav_a.theta
        if theta_b is None:
            theta_b = cav_a.resolved(g("m_kg")).theta
    cav_b = build(CavityParams, cavity_keys("b"), length_L=g("L_b_m", g("L_a_m")),
                  kappa_hz=g("kappa_b_hz", g("kappa_a_hz")), theta=theta_b,
                  pump_intensity_I=g("I_b_w"), laser_frequency_hz=g("omega_L_hz"))
    mech = build(MechanicalParams, {"mass_m": "m_kg", "omega_m": "omega_m_hz", "eta_over_m": "eta_over_m_hz"},
                 mass_m=g("m_kg"), omega_m_hz=g("omega_m_hz", 0.0), eta_over_m_hz=g("eta_over_m_hz", 0.0))
    losses = LossBudget(**{k: g(k, 1.0) for k in (f.name for f in fields(LossBudget))})
    sweep = build(SweepSpec, {"f_min": "f_min_hz", "f_max": "f_max_hz"},
                  f_min=g("f_min_hz", 1.0), f_max=g("f_max_hz", 1000.0),
                  n_points=g("n_points", 2000), spacing=g("spacing", "log"))
    return SystemConfig(
        cavity_a=cav_a,
        cavity_b=cav_b,
        mech=mech,
        squeezer=SqueezerParams(g("r")),
        losses=losses,
        sweep=sweep,
        homodyne_angle_phi_L=g("phi_L", math.pi / 2),
        thermal_psd_ratio=g("thermal_ratio", 0.0),
        pivot_thermal_psd_ratio=g("pivot_thermal_ratio", 0.0),
    )


def load_config(path):
    text = Path(path).read_text(encoding="utf-8")
    return config_from_dict(parse_config(text))


def dump_config(config):
    """Serialize to the key = value format; floats use repr so reparsing is exact."""
    a, b = config.cavity_a, config.cavity_b
    items = [
        ("r", config.squeezer.r),
        ("phi_L", config.homodyne_angle_phi_L),
        ("L_a_m", a.length_L),
        ("L_b_m", b.length_L),
        ("kappa_a_hz", a.kappa_hz),
        ("kappa_b_hz", b.kappa_hz),
        ("theta_a_s3", a.theta),
        ("theta_b_s3", b.theta),
        ("I_a_w", a.pump_intensity_I),
        ("I_b_w", b.pump_intensity_I),
        ("omega_L_hz", a.laser_frequency_hz if a.laser_frequency_hz is not None else b.laser_frequency_hz),
        ("m_kg", config.mech.mass_m),
        ("omega_m_hz", config.mech.omega_m_hz),
        ("eta_over_m_hz", config.mech.eta_over_m_hz),
    ]
    items += [(f.name, getattr(config.losses, f.name)) for f in fields(LossBudget)]
    items += [
        ("f_min_hz", config.sweep.f_min),
        ("f_max_hz", config.sweep.f_max),
        ("n_points", config.sweep.n_points),
        ("spacing", config.sweep.spacing),
        ("thermal_ratio", config.thermal_psd_ratio),
        ("pivot_thermal_ratio", config.pivot_thermal_psd_ratio),
    ]
    return "".join(f"{k} = {v!r}\n" if not isinstance(v, str) else f"{k} = {v}\n"
                   for k, v in items if v is not None)


def preset_fig2():
    """LIGO-like parameter set: r = 1.7, 4 km arms, 40 kg mirrors, 2.5 % in/out loss."""
    theta = (TWO_PI * 100.0) ** 3
    cavity = CavityParams(length_L=4000.0, kappa_hz=500.0, theta=theta)
    return SystemConfig(
        cavity_a=cavity,
        # placeholder; dual schemes derive cavity B's power from the balancing condition
        cavity_b=cavity,
        mech=MechanicalParams(mass_m=40.0),
        squeezer=SqueezerParams(1.7),
        losses=LossBudget(
            eta_inp_a=0.975, eta_inp_b=0.975,
            eta_out_a=0.975, eta_out_b=0.975,
            eta_int_a=0.9999, eta_int_b=0.9999,
        ),
        sweep=SweepSpec(1.0, 1000.0, 2000, "log"),
    )


def preset_fig3():
    """fig2 parameters with a suspended pivot: f_m = 0.25 Hz, damping 0.05 Hz."""
    return replace(preset_fig2(), mech=MechanicalParams(mass_m=40.0, omega_m_hz=0.25, eta_over_m_hz=0.05))
