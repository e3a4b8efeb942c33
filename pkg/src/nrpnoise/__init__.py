"""Quantum-noise budget for a dual-cavity detector with negative radiation-pressure coupling."""

from .params import (
    CavityParams,
    LossBudget,
    MechanicalParams,
    SqueezerParams,
    SweepSpec,
    SystemConfig,
    dump_config,
    load_config,
    preset_fig2,
    preset_fig3,
)
from .quadrature import CHANNELS, InputCovariance, QuadratureExpr, assemble_covariance, psd
from .schemes import SchemeId
from .spectrum import NoiseSpectrum, export_csv, suppression_report, sweep

__version__ = "0.1.0"
