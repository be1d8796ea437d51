"""Modal, transient and harmonic-balance solvers for reduced beam models."""

from .config import SolverConfig
from .frequency import extract_frequency, fit_backbone_beta
from .hbm import BackboneCurve, BackboneSample, hbm_backbone
from .modal import ModalResult, linear_modes
from .newmark import TransientResult, newmark_transient

__all__ = [
    "BackboneCurve",
    "BackboneSample",
    "ModalResult",
    "SolverConfig",
    "TransientResult",
    "extract_frequency",
    "fit_backbone_beta",
    "hbm_backbone",
    "linear_modes",
    "newmark_transient",
]
