"""Through-thickness homogenization of CNT-reinforced beams.

Effective properties follow the modified rule of mixtures with a scalar
load-transfer efficiency ``eta_E`` applied pointwise through the thickness.
All quantities are SI. The thickness coordinate used throughout is the
normalized ``s = z / h`` in ``[-1/2, 1/2]``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import AccuracyError, DomainError, ProfileError
from .quadrature import gauss_rule

DEFAULT_THICKNESS_ORDER = 16


class SlendernessWarning(UserWarning):
    """Beam is too stocky for Euler-Bernoulli kinematics."""


@dataclass(frozen=True)
class ConstituentSet:
    E_m: float
    rho_m: float
    E_cnt: float
    rho_cnt: float
    eta_E: float

    def __post_init__(self):
        for name in ("E_m", "rho_m", "E_cnt", "rho_cnt"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be strictly positive, got {value!r}")
        if not (0 < self.eta_E <= 1):
            raise DomainError(f"eta_E must lie in (0, 1], got {self.eta_E!r}")


class ProfileKind(str, enum.Enum):
    UD = "UD"
    FG_LINEAR = "FG_LINEAR"
    FG_X = "FG_X"
    CUSTOM = "CUSTOM"


@dataclass(frozen=True)
class DistributionProfile:
    """CNT volume fraction as a function of ``s = z/h``.

    Built-in kinds average to ``v_star`` by construction:

    * ``UD``        V(s) = v_star
    * ``FG_LINEAR`` V(s) = v_star (1 + 2 s)      (rich at the top face)
    * ``FG_X``      V(s) = 4 v_star |s|          (rich at both faces)

    ``CUSTOM`` takes a callable of ``s``; its mean is checked numerically.
    """

    kind: ProfileKind
    v_star: float
    custom_profile: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ProfileKind(self.kind))
        if not (0 <= self.v_star < 1):
            raise ProfileError(f"v_star must lie in [0, 1), got {self.v_star!r}")
        if self.kind is ProfileKind.CUSTOM:
            if self.custom_profile is None:
                raise ProfileError("CUSTOM profile requires custom_profile")
            mean = _thickness_integral(self.volume_fraction, 64)
            if abs(mean - self.v_star) > 1e-10:
                raise ProfileError(
                    f"custom profile averages to {mean:.12g}, expected v_star={self.v_star!r}"
                )
        else:
            peak = {ProfileKind.UD: 1.0, ProfileKind.FG_LINEAR: 2.0, ProfileKind.FG_X: 2.0}
            if peak[self.kind] * self.v_star > 1:
                raise ProfileError(
                    f"{self.kind.value} with v_star={self.v_star} exceeds unit volume fraction"
                )

    @property
    def is_polynomial(self):
        return self.kind is not ProfileKind.CUSTOM

    def volume_fraction(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind is ProfileKind.UD:
            v = np.full_like(s, self.v_star)
        elif self.kind is ProfileKind.FG_LINEAR:
            v = self.v_star * (1.0 + 2.0 * s)
        elif self.kind is ProfileKind.FG_X:
            v = 4.0 * self.v_star * np.abs(s)
        else:
            v = np.asarray(self.custom_profile(s), dtype=float) * np.ones_like(s)
        if np.any(~np.isfinite(v)) or np.any(v < -1e-14) or np.any(v > 1 + 1e-14):
            raise ProfileError(f"local volume fraction outside [0, 1] for {self.kind.value}")
        return v


@dataclass(frozen=True)
class BeamGeometry:
    L: float
    b: float
    h: float

    def __post_init__(self):
        for name in ("L", "b", "h"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be strictly positive, got {value!r}")
        if self.L / self.h < 10:
            warnings.warn(
                f"L/h = {self.L / self.h:.3g} < 10; Euler-Bernoulli kinematics are questionable",
                SlendernessWarning,
                stacklevel=3,
            )

    @property
    def area(self):
        return self.b * self.h

    @property
    def second_moment(self):
        return self.b * self.h**3 / 12.0


@dataclass(frozen=True)
class SectionProperties:
    EA: float
    EI: float
    rhoA: float

    def __post_init__(self):
        for name in ("EA", "EI", "rhoA"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class NondimParameters:
    alpha: float
    f_ref: float


def _check_zbar(zbar):
    z = np.asarray(zbar, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(np.abs(z) > 0.5 + 1e-15):
        raise DomainError("normalized thickness coordinate must lie in [-1/2, 1/2]")
    return z


def effective_modulus(profile, zbar, c):
    """Young's modulus at normalized depth ``zbar`` [Pa]."""
    v = profile.volume_fraction(_check_zbar(zbar))
    out = c.eta_E * v * c.E_cnt + (1.0 - v) * c.E_m
    return float(out) if np.ndim(out) == 0 else out


def effective_density(profile, zbar, c):
    """Mass density at normalized depth ``zbar`` [kg/m^3]."""
    v = profile.volume_fraction(_check_zbar(zbar))
    out = v * c.rho_cnt + (1.0 - v) * c.rho_m
    return float(out) if np.ndim(out) == 0 else out


def _thickness_integral(func, order):
    # Two Gauss panels split at the mid-plane so |s|-type kinks are integrated exactly.
    rule = gauss_rule(order)
    total = 0.0
    for lo, hi in ((-0.5, 0.0), (0.0, 0.5)):
        half = 0.5 * (hi - lo)
        s = lo + half * (rule.nodes + 1.0)
        total += half * float(np.dot(rule.weights, func(s)))
    return total


def _section_integrals(profile, c, order):
    EA = _thickness_integral(lambda s: effective_modulus(profile, s, c), order)
    EI = _thickness_integral(lambda s: effective_modulus(profile, s, c) * s**2, order)
    rhoA = _thickness_integral(lambda s: effective_density(profile, s, c), order)
    return np.array([EA, EI, rhoA])


def section_properties(geom, profile, c, thickness_quadrature_order=DEFAULT_THICKNESS_ORDER):
    """Sectional stiffness and mass integrals.

    Bending stiffness is taken about the geometric mid-plane; the extension-bending
    coupling of asymmetric profiles is neglected together with axial inertia.
    """
    if thickness_quadrature_order < 8:
        raise DomainError("thickness quadrature order must be >= 8")
    ints = _section_integrals(profile, c, thickness_quadrature_order)
    if not profile.is_polynomial:
        fine = _section_integrals(profile, c, 2 * thickness_quadrature_order)
        rel = np.max(np.abs(fine - ints) / np.abs(fine))
        if rel > 1e-8:
            raise AccuracyError(
                f"custom profile section integrals not converged (relative change {rel:.2e})"
            )
        ints = fine
    EA, EI, rhoA = ints
    return SectionProperties(
        EA=EA * geom.b * geom.h,
        EI=EI * geom.b * geom.h**3,
        rhoA=rhoA * geom.b * geom.h,
    )


def nondim_parameters(sec, geom):
    alpha = sec.EA * geom.h**2 / (2.0 * sec.EI)
    f_ref = math.sqrt(sec.EI / (sec.rhoA * geom.L**4)) / (2.0 * math.pi)
    return NondimParameters(alpha=alpha, f_ref=f_ref)


def eta_frequency_ratio(eta_1, eta_2, v, c):
    """Linear-frequency ratio f(eta_2)/f(eta_1) of a UD beam.

    Density does not depend on the efficiency, so only the modulus ratio enters.
    """
    for eta in (eta_1, eta_2):
        if not (0 < eta <= 1):
            raise DomainError(f"eta must lie in (0, 1], got {eta!r}")
    e1 = eta_1 * v * c.E_cnt + (1 - v) * c.E_m
    e2 = eta_2 * v * c.E_cnt + (1 - v) * c.E_m
    return math.sqrt(e2 / e1)
