"""Closed-form linear-entropy results for the three environment models.

The three models share one initial condition (a coherent state of amplitude
alpha0) and one mixedness measure, the linear entropy 1 - Tr(rho^2) of the
reduced single-mode state:

* ``master``     - Markovian thermal bath with decay rate ``rate``;
* ``amplitude``  - excitation exchange with one thermal oscillator at
  coupling ``rate``;
* ``kerr``       - cross-Kerr (occupation-occupation) coupling to one thermal
  oscillator at coupling ``rate``.

Every function here is a pure closed form; the brute-force counterparts live
in the master-equation and joint-evolution modules and are used as oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import CutoffTooSmallError
from .states import min_cutoff_for_thermal, thermal_tail, thermal_weights

# Default tail tolerance for the truncated double sum of the cross-Kerr
# entropy; the truncation error is bounded by twice the tail mass.
KERR_TAIL_TOL = 1e-8

_CROSSING_FRACTION = 1.0 - math.exp(-1.0)


class Model(str, Enum):
    MASTER = "master"
    AMPLITUDE = "amplitude"
    KERR = "kerr"


@dataclass(frozen=True)
class ModelParams:
    """Shared parameter bundle: initial amplitude, environment occupation,
    coupling/decay rate, model tag, and optional natural frequency."""

    alpha0: complex
    nbar: float
    rate: float
    model: Model
    omega: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha0", complex(self.alpha0))
        object.__setattr__(self, "nbar", float(self.nbar))
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "model", Model(self.model))
        if self.rate <= 0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        if self.nbar < 0:
            raise ValueError(f"nbar must be nonnegative, got {self.nbar}")
        if self.omega < 0:
            raise ValueError(f"omega must be nonnegative, got {self.omega}")


@dataclass(frozen=True)
class PFunctionGaussian:
    """Gaussian diagonal coherent-state weight: center C(t), width S(t)."""

    center: complex
    width: float

    def __post_init__(self):
        if self.width < 0:
            raise ValueError(f"width must be nonnegative, got {self.width}")


def _require_model(p: ModelParams, model: Model, op: str):
    if p.model is not model:
        raise ValueError(f"{op} requires model={model.value!r}, got {p.model.value!r}")


def _check_times(t):
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0):
        raise ValueError("time must be nonnegative")
    return tt


def _scalar_like(t, values):
    return float(values) if np.ndim(t) == 0 else values


def master_linear_entropy(t, p: ModelParams):
    """1 - 1/(1 + 2 nbar (1 - exp(-2 rate t))); independent of alpha0 and omega."""
    _require_model(p, Model.MASTER, "master_linear_entropy")
    tt = _check_times(t)
    x = 2.0 * p.nbar * (-np.expm1(-2.0 * p.rate * tt))
    return _scalar_like(t, 1.0 - 1.0 / (1.0 + x))


def amplitude_linear_entropy(t, p: ModelParams):
    """1 - 1/(1 + 2 nbar sin^2(rate t)); period pi/rate, independent of alpha0."""
    _require_model(p, Model.AMPLITUDE, "amplitude_linear_entropy")
    tt = _check_times(t)
    x = 2.0 * p.nbar * np.sin(p.rate * tt) ** 2
    return _scalar_like(t, 1.0 - 1.0 / (1.0 + x))


def kerr_kmax(nbar: float, tail_tol: float = KERR_TAIL_TOL) -> int:
    """Smallest truncation of the thermal sum with tail mass below tolerance."""
    return min_cutoff_for_thermal(nbar, tail_tol)


def kerr_linear_entropy(t, p: ModelParams, kmax: int | None = None,
                        tail_tol: float = KERR_TAIL_TOL):
    """Double sum over thermal weights of coherent-overlap dephasing factors.

    The truncated weights are renormalized so the value at t = 0 vanishes
    exactly; the truncation error against the infinite sum stays bounded by
    twice the tail mass.  Period 2 pi / rate.
    """
    _require_model(p, Model.KERR, "kerr_linear_entropy")
    tt = _check_times(t)
    if kmax is None:
        kmax = kerr_kmax(p.nbar, tail_tol)
    elif thermal_tail(p.nbar, kmax) >= tail_tol:
        raise CutoffTooSmallError(
            f"kmax={kmax} leaves thermal tail {thermal_tail(p.nbar, kmax):.3e} "
            f">= tolerance {tail_tol:.3e} at nbar={p.nbar}"
        )
    w = thermal_weights(p.nbar, kmax)
    w = w / w.sum()
    # collapse the double sum over (k, l) to a single sum over d = k - l
    pair = np.array([w[d:] @ w[: kmax + 1 - d] for d in range(kmax + 1)])
    d = np.arange(kmax + 1)
    a2 = abs(p.alpha0) ** 2
    dephase = 1.0 - np.cos(p.rate * np.multiply.outer(tt, d))
    kept = (np.exp(-2.0 * a2 * dephase) * pair).sum(axis=-1) * 2.0 - pair[0]
    return _scalar_like(t, np.maximum(0.0, 1.0 - kept))


def linear_entropy_of_model(t, p: ModelParams, kmax: int | None = None):
    """Dispatch to the closed form matching ``p.model``."""
    if p.model is Model.MASTER:
        return master_linear_entropy(t, p)
    if p.model is Model.AMPLITUDE:
        return amplitude_linear_entropy(t, p)
    return kerr_linear_entropy(t, p, kmax=kmax)


def master_solution_params(t: float, p: ModelParams) -> tuple[complex, float]:
    """Displaced-thermal parameters (alpha_t, nbar_t) of the exact bath solution."""
    _require_model(p, Model.MASTER, "master_solution_params")
    if t < 0:
        raise ValueError("time must be nonnegative")
    alpha_t = p.alpha0 * math.exp(-p.rate * t)
    nbar_t = -math.expm1(-2.0 * p.rate * t) * p.nbar
    return alpha_t, nbar_t


def heisenberg_coeffs(t: float, p: ModelParams) -> tuple[complex, complex]:
    """Mode-mixing coefficients (A, B) of the exchange coupling; |A|^2+|B|^2 = 1."""
    _require_model(p, Model.AMPLITUDE, "heisenberg_coeffs")
    phase = np.exp(-1j * p.omega * t)
    return complex(phase * math.cos(p.rate * t)), complex(-1j * phase * math.sin(p.rate * t))


def p_function_gaussian(t: float, p: ModelParams) -> PFunctionGaussian:
    """Gaussian coherent-state weight of the reduced state: width nbar sin^2(rate t),
    center alpha0 exp(-i omega t) cos(rate t)."""
    _require_model(p, Model.AMPLITUDE, "p_function_gaussian")
    width = p.nbar * math.sin(p.rate * t) ** 2
    center = p.alpha0 * complex(np.exp(-1j * p.omega * t)) * math.cos(p.rate * t)
    return PFunctionGaussian(center=center, width=width)


@dataclass(frozen=True, eq=False)
class EntropySeries:
    """Linear entropy sampled on an ascending time grid, with parameter echo."""

    times: np.ndarray
    zeta: np.ndarray
    model: Model
    params: ModelParams

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        zeta = np.asarray(self.zeta, dtype=float)
        if times.ndim != 1 or times.size < 1:
            raise ValueError("times must be a nonempty 1-D grid")
        if zeta.shape != times.shape:
            raise ValueError("zeta and times must have matching shapes")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly ascending")
        bound = 2.0 * self.params.nbar / (1.0 + 2.0 * self.params.nbar) + 1e-9
        if np.any(zeta < -1e-12) or np.any(zeta > bound):
            raise ValueError("zeta values leave the [0, plateau] band")
        if times[0] == 0.0 and abs(zeta[0]) > 1e-12:
            raise ValueError(f"zeta(0) = {zeta[0]:.3e} is not 0 within 1e-12")
        if self.model is not self.params.model:
            raise ValueError("series model tag must match its parameters")
        zeta = np.maximum(zeta, 0.0)
        times.setflags(write=False)
        zeta.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "zeta", zeta)


def entropy_series(p: ModelParams, times, kmax: int | None = None) -> EntropySeries:
    """Evaluate the model's closed form on a grid."""
    times = np.asarray(times, dtype=float)
    return EntropySeries(times, linear_entropy_of_model(times, p, kmax=kmax), p.model, p)


def _dephased_overlap_mean(x: float) -> float:
    # mean over a uniform phase of exp(-x (1 - cos theta))
    if x > 600.0:
        return (1.0 + 1.0 / (8.0 * x)) / math.sqrt(2.0 * math.pi * x)
    return math.exp(-x) * float(np.i0(x))


def analytic_plateau(p: ModelParams) -> float:
    """Long-time mixedness level used by the crossing criterion.

    For the bath and exchange models this is the exact maximum
    2 nbar / (1 + 2 nbar).  The cross-Kerr entropy has no closed-form maximum;
    its plateau is the level reached once every unequal-occupation pair has
    dephased to its time-averaged overlap, which lies below the diagonal bound
    and depends on alpha0.
    """
    if p.nbar == 0:
        return 0.0
    base = 2.0 * p.nbar / (1.0 + 2.0 * p.nbar)
    if p.model is not Model.KERR:
        return base
    a2 = abs(p.alpha0) ** 2
    if a2 == 0:
        return 0.0
    w0 = 1.0 / (1.0 + 2.0 * p.nbar)
    return 1.0 - w0 - (1.0 - w0) * _dephased_overlap_mean(2.0 * a2)


def decoherence_time_estimate(p: ModelParams) -> float:
    """Closed-form decoherence-time estimate per model; inf when no mixing occurs."""
    if p.nbar == 0:
        return math.inf
    if p.model is Model.MASTER:
        return 1.0 / (4.0 * p.rate * p.nbar)
    if p.model is Model.AMPLITUDE:
        return 1.0 / (p.rate * math.sqrt(2.0 * p.nbar))
    a2 = abs(p.alpha0) ** 2
    if a2 == 0:
        return math.inf
    return 1.0 / (5.0 * p.rate * math.sqrt(a2 * p.nbar))


def measured_decoherence_time(series: EntropySeries) -> float | None:
    """First time the sampled entropy reaches (1 - 1/e) of the analytic plateau.

    Linear interpolation between grid points; returns None when the series
    never crosses (for instance at zero temperature).
    """
    plateau = analytic_plateau(series.params)
    if plateau <= 0.0:
        return None
    target = _CROSSING_FRACTION * plateau
    above = series.zeta >= target
    if not above.any():
        return None
    i = int(np.argmax(above))
    if i == 0:
        return float(series.times[0])
    t0, t1 = series.times[i - 1], series.times[i]
    z0, z1 = series.zeta[i - 1], series.zeta[i]
    return float(t0 + (target - z0) * (t1 - t0) / (z1 - z0))


def recurrence_time(p: ModelParams) -> float | None:
    """Period after which the reversible models return to the initial pure state;
    None for the irreversible bath model."""
    if p.model is Model.AMPLITUDE:
        return math.pi / p.rate
    if p.model is Model.KERR:
        return 2.0 * math.pi / p.rate
    return None
