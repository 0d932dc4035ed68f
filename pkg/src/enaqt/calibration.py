"""Two-waveguide analytics and inverse-design helpers.

Everything here is closed-form coupled-mode theory for isolated pairs:
power-transfer beats, detuning extraction from the maximum transfer, the
exponential coupling-versus-separation fit, and the effective trapping
rate of a tightly coupled chain.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np


def pair_transfer(c: float, delta_beta: float, z: float) -> float:
    """Cross power P2(z) = (C^2/Omega^2) sin^2(Omega z) for a detuned pair.

    Omega = sqrt(C^2 + (delta_beta/2)^2).  Guide 1 starts fully excited;
    the return value is the guide-2 population after propagating z.
    """
    if c <= 0:
        raise ValueError(f"coupling must be positive, got {c}")
    if z < 0:
        raise ValueError(f"z must be non-negative, got {z}")
    omega = math.hypot(c, 0.5 * delta_beta)
    return (c / omega) ** 2 * math.sin(omega * z) ** 2


def detuning_from_max_transfer(p_max: float) -> float:
    """Invert the peak transfer p_max = C^2/(C^2 + delta_beta^2/4).

    Returns the ratio delta_beta/C.  The peak transfer of a detuned pair
    depends only on this ratio, which is what makes it usable as a
    calibration observable.
    """
    if not 0 < p_max <= 1:
        raise ValueError(f"p_max must lie in (0, 1], got {p_max}")
    return 2.0 * math.sqrt(1.0 / p_max - 1.0)


@dataclass(frozen=True)
class CouplingCurve:
    """Exponential fit C(s) = A exp(-s/d) to measured pair couplings."""

    amplitude_per_cm: float
    decay_length_um: float
    samples: Tuple[Tuple[float, float], ...]
    log_residuals: Tuple[float, ...]

    def coupling_at(self, separation_um: float) -> float:
        return self.amplitude_per_cm * math.exp(-separation_um / self.decay_length_um)

    @property
    def separation_range_um(self) -> Tuple[float, float]:
        seps = [s for s, _ in self.samples]
        return (min(seps), max(seps))


def fit_coupling_curve(samples: Sequence[Tuple[float, float]]) -> CouplingCurve:
    """Least-squares fit of ln C against separation.

    Linear in log space, so the fit is exact for noiseless exponential
    data.  Needs at least two distinct separations.
    """
    samples = tuple((float(s), float(c)) for s, c in samples)
    for s, c in samples:
        if s <= 0 or c <= 0:
            raise ValueError(f"separations and couplings must be positive, got ({s}, {c})")
    seps = np.array([s for s, _ in samples])
    if len(set(seps.tolist())) < 2:
        raise ValueError("need samples at >= 2 distinct separations to fit")
    logc = np.log([c for _, c in samples])
    # ln C = ln A - s/d
    coeffs, residuals, *_ = np.polyfit(seps, logc, 1, full=True)
    slope, intercept = coeffs
    if slope >= 0:
        raise ValueError("fitted coupling grows with separation; data is not evanescent decay")
    fitted = intercept + slope * seps
    return CouplingCurve(
        amplitude_per_cm=float(np.exp(intercept)),
        decay_length_um=float(-1.0 / slope),
        samples=samples,
        log_residuals=tuple(float(r) for r in (logc - fitted)),
    )


def separation_for_coupling(curve: CouplingCurve, c_target: float) -> float:
    """Invert the fitted curve: s = -d ln(c_target / A).

    Warns when the requested coupling falls outside the separations the
    curve was fitted on, since the exponential model is only trusted there.
    """
    if c_target <= 0:
        raise ValueError(f"target coupling must be positive, got {c_target}")
    s = -curve.decay_length_um * math.log(c_target / curve.amplitude_per_cm)
    lo, hi = curve.separation_range_um
    if not lo <= s <= hi:
        warnings.warn(
            f"separation {s:.3f} um extrapolates beyond the fitted range "
            f"[{lo:.3f}, {hi:.3f}] um",
            stacklevel=2,
        )
    return s


@dataclass(frozen=True)
class TrapRatio:
    """Trap-to-sink coupling ratio x = C_trap/C_sink, valid on (0, 1)."""

    x: float

    def __post_init__(self):
        if not 0 < self.x < 1:
            raise ValueError(f"trap ratio must lie in (0, 1), got {self.x}")

    @classmethod
    def from_couplings(cls, c_trap: float, c_sink: float) -> "TrapRatio":
        return cls(c_trap / c_sink)


def effective_trap_rate(x, c_sink: float) -> float:
    """Constant effective transfer rate kappa = c_sink * 2 x^2 (1 - x^2)^(-1/2).

    This is the decay-pole rate of a site coupled through C_trap to a
    semi-infinite chain of hopping C_sink (x = C_trap/C_sink); it reduces
    to the golden-rule rate 2*C_trap^2/C_sink for x << 1.  The dimensionless
    expression is scaled by c_sink so the result is a population decay rate
    in cm^-1.  The rate diverges as x -> 1 and the single-exponential
    picture degrades well before that.
    """
    ratio = x.x if isinstance(x, TrapRatio) else float(x)
    if not 0 < ratio < 1:
        raise ValueError(f"trap ratio must lie in (0, 1), got {ratio}")
    if c_sink <= 0:
        raise ValueError(f"c_sink must be positive, got {c_sink}")
    return c_sink * 2.0 * ratio * ratio / math.sqrt(1.0 - ratio * ratio)
