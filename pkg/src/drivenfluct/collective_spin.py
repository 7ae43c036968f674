"""Closed-form fluctuation statistics of transversally driven collective spins.

A rotationally symmetric spin system in a longitudinal field, prepared in a
total-spin eigenstate |S, m> and rotated by a transverse drive, has an energy
density whose full statistics reduce to one-body angular-momentum algebra.
This module provides the closed forms (standard deviation, mean, even central
moments, Bessel characteristic function, bounded arcsine density) together
with the exact (2S+1)-dimensional ladder computation that backs them for any
finite S.

Units: hbar = 1 throughout; m is the z projection in units of hbar, fields
are energies, and densities are per lattice site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .special import bessel_j0

__all__ = [
    "SpinSector",
    "DriveSchedule",
    "AnalyticDistribution",
    "EmpiricalDistribution",
    "EnergyDistribution",
    "UndefinedSpinError",
    "UnsupportedScheduleError",
    "ScheduleRangeError",
    "DegenerateDistributionError",
    "analytic_sigma",
    "analytic_energy_mean",
    "central_moment",
    "characteristic_value",
    "arcsine_density",
    "arcsine_cdf",
    "eigenweight_distribution",
    "ks_distance_to_arcsine",
    "wigner_d_column",
    "distribution_from_json_dict",
]


class UndefinedSpinError(ValueError):
    """Raised when a quantity needs m/S and the sector has S = 0."""


class UnsupportedScheduleError(ValueError):
    """Raised for drive protocols outside an operation's closed form."""


class ScheduleRangeError(ValueError):
    """Raised when a requested time lies outside the drive schedule."""


class DegenerateDistributionError(ValueError):
    """Raised when a zero-width distribution is used where a density is needed."""


def _check_half_integer(value: float, name: str) -> None:
    doubled = 2.0 * value
    if abs(doubled - round(doubled)) > 1e-9:
        raise ValueError(f"{name} must be a half-integer, got {value}")


@dataclass(frozen=True)
class SpinSector:
    """Quantum numbers (N, S, m) of a collective-spin initial state."""

    n_sites: int
    s_tot: float
    m: float

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be a positive integer")
        _check_half_integer(self.s_tot, "s_tot")
        _check_half_integer(self.m, "m")
        if self.s_tot < 0:
            raise ValueError("s_tot must be non-negative")
        if self.s_tot > self.n_sites / 2 + 1e-9:
            raise ValueError("s_tot cannot exceed n_sites/2 for spin-1/2 constituents")
        if abs(self.m) > self.s_tot + 1e-9:
            raise ValueError("|m| cannot exceed s_tot")
        gap = self.s_tot - abs(self.m)
        if abs(gap - round(gap)) > 1e-9:
            raise ValueError("s_tot - |m| must be an integer")
        cogap = self.n_sites / 2 - self.s_tot
        if abs(cogap - round(cogap)) > 1e-9:
            raise ValueError("n_sites/2 - s_tot must be an integer")

    @property
    def w(self) -> float:
        """Reduced polarization m/S; undefined for the S = 0 singlet."""
        if self.s_tot == 0:
            raise UndefinedSpinError("w = m/s_tot is undefined for s_tot = 0")
        return self.m / self.s_tot

    @property
    def dim(self) -> int:
        return int(round(2 * self.s_tot)) + 1


@dataclass(frozen=True)
class DriveSchedule:
    """Piecewise-constant transverse drive on top of a static longitudinal field.

    ``mode`` selects whether the transverse field replaces the system
    Hamiltonian during the drive or augments it; ``segments`` is an ordered
    tuple of (duration, b_y) pairs and ``b_z`` the longitudinal field.
    """

    mode: Literal["replace", "augment"]
    segments: tuple[tuple[float, float], ...]
    b_z: float

    def __post_init__(self):
        if self.mode not in ("replace", "augment"):
            raise ValueError(f"unknown drive mode {self.mode!r}")
        object.__setattr__(
            self,
            "segments",
            tuple((float(d), float(b)) for d, b in self.segments),
        )
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        for duration, _ in self.segments:
            if not duration > 0.0:
                raise ValueError("segment durations must be strictly positive")

    @property
    def total_duration(self) -> float:
        return math.fsum(d for d, _ in self.segments)

    def theta_at(self, t: float) -> float:
        """Accumulated rotation angle integral of b_y up to time t (exact sum)."""
        if t < -1e-12 or t > self.total_duration + 1e-9:
            raise ScheduleRangeError(f"t = {t} outside schedule span [0, {self.total_duration}]")
        theta = 0.0
        remaining = t
        for duration, b_y in self.segments:
            step = min(duration, remaining)
            if step <= 0.0:
                break
            theta += b_y * step
            remaining -= step
        return theta

    def boundary_times(self) -> list[float]:
        times = [0.0]
        for duration, _ in self.segments:
            times.append(times[-1] + duration)
        return times


@dataclass(frozen=True)
class AnalyticDistribution:
    """Arcsine-shaped energy-density law with given center and width."""

    center: float
    width: float

    def __post_init__(self):
        if self.width < 0.0:
            raise ValueError("width must be non-negative")

    @property
    def support(self) -> tuple[float, float]:
        half = self.width * math.sqrt(2.0)
        return (self.center - half, self.center + half)

    def density(self, value: float) -> float:
        return arcsine_density(value, self.center, self.width)

    def cdf(self, value: float) -> float:
        return arcsine_cdf(value, self.center, self.width)

    def to_json_dict(self) -> dict:
        return {"type": "analytic", "center": self.center, "width": self.width}


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Discrete energy-density law: (value, weight) pairs sorted by value."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple(sorted((float(v), float(w)) for v, w in self.points))
        object.__setattr__(self, "points", pts)
        weights = np.array([w for _, w in pts])
        if weights.size == 0:
            raise ValueError("empirical distribution needs at least one point")
        if np.any(weights < -1e-12):
            raise ValueError("empirical weights must be non-negative")
        total = math.fsum(w for _, w in pts)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"empirical weights sum to {total}, not 1 within 1e-12")

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.points])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.points])

    def mean(self) -> float:
        return float(np.dot(self.weights, self.values))

    def central_moment(self, order: int) -> float:
        delta = self.values - self.mean()
        return float(np.dot(self.weights, delta**order))

    def variance(self) -> float:
        return self.central_moment(2)

    def std(self) -> float:
        return math.sqrt(max(self.variance(), 0.0))

    def characteristic(self, q: float) -> complex:
        """Mean of exp(iq (value - mean)) under the weights."""
        delta = self.values - self.mean()
        return complex(np.dot(self.weights, np.exp(1j * q * delta)))

    def to_json_dict(self) -> dict:
        return {
            "type": "empirical",
            "points": [{"value": v, "weight": w} for v, w in self.points],
        }


EnergyDistribution = Union[AnalyticDistribution, EmpiricalDistribution]


def distribution_from_json_dict(record: dict) -> EnergyDistribution:
    kind = record.get("type")
    if kind == "analytic":
        return AnalyticDistribution(center=record["center"], width=record["width"])
    if kind == "empirical":
        return EmpiricalDistribution(
            points=tuple((p["value"], p["weight"]) for p in record["points"])
        )
    raise ValueError(f"unknown distribution type {kind!r}")


def _fluctuation_factor(sector: SpinSector) -> float:
    # sqrt(1 + 1/S - w^2); exact for all S, not only asymptotically
    return math.sqrt(max(1.0 + 1.0 / sector.s_tot - sector.w**2, 0.0))


def analytic_sigma(sector: SpinSector, schedule: DriveSchedule, t_f: float) -> float:
    """Standard deviation of the energy density after driving to time t_f.

    Replace mode: B_z S |sin theta| sqrt(1 + 1/S - w^2) / (N sqrt(2)) with
    theta the accumulated rotation angle.  Augment mode (single constant
    segment only): the same prefactor with the precession-axis geometry
    sqrt(sin^2(Bt) + B_z^2 (1 - cos Bt)^2 / B^2) and B = hypot(b_y, b_z).
    """
    if sector.s_tot == 0:
        raise UndefinedSpinError("sigma needs w = m/s_tot; s_tot = 0 sector rejected")
    prefactor = (
        abs(schedule.b_z)
        * sector.s_tot
        / (sector.n_sites * math.sqrt(2.0))
        * _fluctuation_factor(sector)
    )
    if schedule.mode == "replace":
        theta = schedule.theta_at(t_f)
        return prefactor * abs(math.sin(theta))
    if len(schedule.segments) != 1:
        raise UnsupportedScheduleError(
            "augment-mode closed form requires a single constant-b_y segment"
        )
    duration, b_y = schedule.segments[0]
    if t_f < -1e-12 or t_f > duration + 1e-9:
        raise ScheduleRangeError(f"t_f = {t_f} outside the augment segment [0, {duration}]")
    b_total = math.hypot(b_y, schedule.b_z)
    if b_total == 0.0:
        return 0.0
    phase = b_total * t_f
    geometry = math.sqrt(
        math.sin(phase) ** 2
        + (schedule.b_z**2 / b_total**2) * (1.0 - math.cos(phase)) ** 2
    )
    return prefactor * (abs(b_y) / b_total) * geometry


def _axis_projection(schedule: DriveSchedule, t_f: float) -> float:
    # <S_z(t)>/m: cos(theta) under replace; the zz element of the precession
    # rotation about the tilted field axis under augment.
    if schedule.mode == "replace":
        return math.cos(schedule.theta_at(t_f))
    if len(schedule.segments) != 1:
        raise UnsupportedScheduleError(
            "augment-mode closed form requires a single constant-b_y segment"
        )
    duration, b_y = schedule.segments[0]
    if t_f < -1e-12 or t_f > duration + 1e-9:
        raise ScheduleRangeError(f"t_f = {t_f} outside the augment segment [0, {duration}]")
    b_total = math.hypot(b_y, schedule.b_z)
    if b_total == 0.0:
        return 1.0
    cos_phase = math.cos(b_total * t_f)
    return cos_phase + (schedule.b_z**2 / b_total**2) * (1.0 - cos_phase)


def analytic_energy_mean(
    sector: SpinSector, schedule: DriveSchedule, t_f: float, e_symm: float = 0.0
) -> float:
    """Mean energy density (e_symm - B_z <S_z(t)>)/N at drive time t_f.

    e_symm is the rotationally invariant part of the global energy in the
    initial eigenstate; the width formulas are independent of it.
    """
    return (e_symm - schedule.b_z * sector.m * _axis_projection(schedule, t_f)) / sector.n_sites


def _ladder_arrays(s_tot: float) -> tuple[np.ndarray, np.ndarray]:
    # m values ascending and raising-operator amplitudes c_k = |S+|S,m_k>|
    dim = int(round(2 * s_tot)) + 1
    m_values = np.arange(dim, dtype=float) - s_tot
    below = m_values[:-1]
    couplings = np.sqrt(s_tot * (s_tot + 1.0) - below * (below + 1.0))
    return m_values, couplings


def central_moment(
    sector: SpinSector,
    schedule: DriveSchedule,
    t_f: float,
    g: int,
    method: Literal["asymptotic", "exact"] = "exact",
) -> float:
    """Even central moment <(delta eps)^(2g)> of the energy density.

    "asymptotic" evaluates the large-N law binom(2g, g) (sigma^2/2)^g;
    "exact" applies the rotated ladder operator 2g times in the (2S+1)
    representation (global energy internally, divided by N^(2g) at the end,
    which avoids underflow for large N).  Odd moments vanish identically and
    are not parameterized here.
    """
    if g < 1:
        raise ValueError("moment index g must be a positive integer")
    if schedule.mode != "replace":
        raise UnsupportedScheduleError("central moments implemented for replace mode")
    if method == "asymptotic":
        sigma_sq = analytic_sigma(sector, schedule, t_f) ** 2
        return float(math.comb(2 * g, g)) * (0.5 * sigma_sq) ** g
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    if sector.s_tot == 0:
        raise UndefinedSpinError("exact moments need w; s_tot = 0 sector rejected")
    theta = schedule.theta_at(t_f)
    m_values, couplings = _ladder_arrays(sector.s_tot)
    # X = B_z (cos(theta) S_z + sin(theta) S_x) about its mean B_z cos(theta) m
    diag = schedule.b_z * math.cos(theta) * (m_values - sector.m)
    off = schedule.b_z * math.sin(theta) * couplings / 2.0
    vec = np.zeros(len(m_values))
    vec[int(round(sector.m + sector.s_tot))] = 1.0
    for _ in range(g):
        nxt = diag * vec
        nxt[:-1] += off * vec[1:]
        nxt[1:] += off * vec[:-1]
        vec = nxt
    global_moment = float(np.dot(vec, vec))
    return global_moment / float(sector.n_sites) ** (2 * g)


def characteristic_value(q: float, sigma: float) -> float:
    """Characteristic function J0(q sigma sqrt(2)) of the arcsine law."""
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    return bessel_j0(q * sigma * math.sqrt(2.0))


def arcsine_density(value: float, center: float, width: float) -> float:
    """Bounded arcsine density with standard deviation ``width`` about ``center``.

    Supported on |value - center| < width sqrt(2); exactly zero outside.
    """
    if width <= 0.0:
        raise DegenerateDistributionError(
            "zero-width distribution has no density; use a point mass"
        )
    delta = value - center
    radicand = 2.0 - (delta / width) ** 2
    if radicand <= 0.0:
        return 0.0
    return 1.0 / (math.pi * width * math.sqrt(radicand))


def arcsine_cdf(value: float, center: float, width: float) -> float:
    """Cumulative distribution of :func:`arcsine_density`."""
    if width <= 0.0:
        raise DegenerateDistributionError(
            "zero-width distribution has no density; use a point mass"
        )
    span = width * math.sqrt(2.0)
    delta = value - center
    if delta <= -span:
        return 0.0
    if delta >= span:
        return 1.0
    return 0.5 + math.asin(delta / span) / math.pi


def wigner_d_column(s_tot: float, m: float, theta: float) -> np.ndarray:
    """Column d^S_{m', m}(theta) of the rotation about y, m' ascending.

    Computed by diagonalizing the real symmetric tridiagonal similarity
    transform of the S_y generator (stable for any S, unlike factorial
    formulas); the returned column is renormalized to unit norm.
    """
    _check_half_integer(s_tot, "s_tot")
    _check_half_integer(m, "m")
    dim = int(round(2 * s_tot)) + 1
    if dim == 1:
        return np.ones(1)
    _, couplings = _ladder_arrays(s_tot)
    eigvals, eigvecs = eigh_tridiagonal(np.zeros(dim), couplings / 2.0)
    col_index = int(round(m + s_tot))
    phase = (1j) ** np.arange(dim)
    rotated = eigvecs @ (np.exp(-1j * theta * eigvals) * eigvecs[col_index, :])
    column = np.real(np.conj(phase) * rotated * phase[col_index])
    return column / np.linalg.norm(column)


def eigenweight_distribution(
    sector: SpinSector,
    theta: float,
    b_z: float = 1.0,
    e_symm: float = 0.0,
) -> EmpiricalDistribution:
    """Exact weights |d^S_{m',m}(theta)|^2 on energies (e_symm - B_z m')/N."""
    column = wigner_d_column(sector.s_tot, sector.m, theta)
    weights = column**2
    weights = weights / weights.sum()
    m_values = np.arange(sector.dim, dtype=float) - sector.s_tot
    energies = (e_symm - b_z * m_values) / sector.n_sites
    merged: dict[float, float] = {}
    for value, weight in zip(energies.tolist(), weights.tolist()):
        merged[value] = merged.get(value, 0.0) + weight
    return EmpiricalDistribution(points=tuple(merged.items()))


def ks_distance_to_arcsine(
    distribution: EmpiricalDistribution, center: float, width: float
) -> float:
    """Kolmogorov-Smirnov distance between step weights and the arcsine CDF."""
    running = 0.0
    worst = 0.0
    for value, weight in distribution.points:
        target = arcsine_cdf(value, center, width)
        worst = max(worst, abs(running - target), abs(running + weight - target))
        running += weight
    return worst
