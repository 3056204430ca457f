"""Coherent states on a circle: construction, evolution, overlaps, revivals.

The circle has circumference 2l with fundamental domain [-l, l).  A
coherent state labelled by a phase point (q, p) is the 2l-periodization
of the free Gaussian packet; equivalently a Gaussian-weighted comb of
Fourier modes e_k(x) = exp(i pi k x / l) / sqrt(2l).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .params import (CapacityError, ContractViolation, DomainError,
                     MethodUnavailable, PhasePoint, PhysicalParams,
                     wrap_position)
from .theta import TAIL_REL, overlap_core

# Gaussian windows keep every term with log-weight above -WINDOW_LOG
# (weight >= e^-40 ~ 4e-18), padded by WINDOW_MARGIN entries.
WINDOW_LOG = 40.0
WINDOW_MARGIN = 4
MODE_CAP = 10**7


@dataclass(frozen=True)
class WaveState:
    """Spectral representation of a state on a compact domain.

    Attributes
    ----------
    domain : {'circle', 'box'}
    params : PhysicalParams
    k_min : int
        Mode index of ``coefficients[0]`` (1 for box states).
    coefficients : ndarray of complex
        Coefficients over e_k = exp(i pi k x / l)/sqrt(2l) (circle) or
        f_k = sin(pi k (x - l) / 2l)/sqrt(l) (box).  Modes outside the
        stored window are exactly zero.
    time : float
        Evolution time already applied to the coefficients.
    source : PhasePoint or None
        The generating packet label, kept so image-sum evaluation stays
        available; None for states not built from a single packet.
    """

    domain: str
    params: PhysicalParams
    k_min: int
    coefficients: np.ndarray
    time: float = 0.0
    source: PhasePoint | None = None

    def __post_init__(self) -> None:
        if self.domain not in ("circle", "box"):
            raise ContractViolation(f"unknown domain {self.domain!r}")
        c = np.asarray(self.coefficients, dtype=complex)
        if not np.all(np.isfinite(c.view(float))):
            raise ContractViolation("non-finite spectral coefficients")
        object.__setattr__(self, "coefficients", c)

    @property
    def k_values(self) -> np.ndarray:
        return self.k_min + np.arange(len(self.coefficients))

    def norm_sq(self) -> float:
        """Squared norm of the represented function, Sum |c_k|^2."""
        return float(np.sum(np.abs(self.coefficients) ** 2))


@dataclass(frozen=True)
class TimeScales:
    """Characteristic times: traversal, collapse, and full revival."""

    t_cl: float
    t_coll: float
    t_rev: float


@dataclass(frozen=True)
class RevivalStructure:
    """Reduced revival fraction c = M/N with the derived peak data.

    At t = (M/N) * t_rev the density splits into n_prime copies of the
    initial packet, offset by ``a``.
    """

    M: int
    N: int
    n_prime: int
    a: float
    irrational_flag: bool = False


@dataclass(frozen=True)
class LimitProfile:
    """Predicted limit density: packet centers + spread + momentum.

    ``spread_d`` is the width D of the Gaussian spreading profile
    (0 = delta peaks, math.inf = uniform).  For box profiles,
    ``mirrored`` marks that the reflected family at -p is included.
    ``weight`` is the mass carried by each center.
    """

    centers: tuple[float, ...]
    spread_d: float
    momentum: float
    weight: float
    domain: str
    half_length: float
    mirrored: bool = False


def _mode_window(params: PhysicalParams, p: float, half_length: float):
    """Integer modes k with alpha^2 (pi k / l - p / hbar)^2 <= WINDOW_LOG."""
    l = half_length
    center = p * l / (math.pi * params.hbar)
    half = l * math.sqrt(WINDOW_LOG) / (math.pi * params.alpha)
    k_min = math.floor(center - half) - WINDOW_MARGIN
    k_max = math.ceil(center + half) + WINDOW_MARGIN
    if k_max - k_min + 1 > MODE_CAP:
        raise CapacityError(
            f"spectral window needs {k_max - k_min + 1} modes "
            "(cap 1e7); increase hbar or alpha")
    return k_min, k_max


def circle_coefficients(params: PhysicalParams, phase: PhasePoint,
                        half_length: float | None = None):
    """Gaussian-comb Fourier coefficients of the periodized packet.

    Returns (k_min, coefficient array) with
    c_k = (pi a^2 / 2 l^4)^(1/4) sqrt(2 l)
          exp{-a^2 (pi k / l - p/hbar)^2 - i pi k q / l}.
    """
    l = params.half_length if half_length is None else half_length
    a2 = params.alpha**2
    k_min, k_max = _mode_window(params, phase.p, l)
    k = np.arange(k_min, k_max + 1)
    pref = (math.pi * a2 / (2.0 * l**4)) ** 0.25 * math.sqrt(2.0 * l)
    c = pref * np.exp(-a2 * (math.pi * k / l - phase.p / params.hbar) ** 2
                      - 1j * math.pi * k * phase.q / l)
    return k_min, c


def make_circle_state(params: PhysicalParams, phase: PhasePoint) -> WaveState:
    """Coherent state on the circle labelled by (q, p), at time 0.

    Requires alpha < l/4 so the packet fits the domain cleanly; the
    position label is wrapped into [-l, l).
    """
    if not params.alpha < params.half_length / 4.0:
        raise ContractViolation(
            f"alpha={params.alpha} must be < half_length/4="
            f"{params.half_length / 4.0}")
    phase = PhasePoint(wrap_position(phase.q, params.half_length), phase.p)
    k_min, c = circle_coefficients(params, phase)
    return WaveState("circle", params, k_min, c, 0.0, phase)


def circle_norm_sq(params: PhysicalParams, phase: PhasePoint) -> float:
    """Squared norm of the circle coherent state, as a fast theta-type sum.

    Equals 1 + 2 sum_{k>=1} exp(-l^2 k^2 / 2 alpha^2) cos(2 p l k / hbar).
    """
    l = params.half_length
    a2 = params.alpha**2
    total = 1.0
    k = 1
    while True:
        term = 2.0 * math.exp(-l * l * k * k / (2.0 * a2)) \
            * math.cos(2.0 * phase.p * l * k / params.hbar)
        total += term
        if math.exp(-l * l * k * k / (2.0 * a2)) < TAIL_REL * (abs(total) + 1.0):
            return total
        k += 1


def evolve(state: WaveState, t: float) -> WaveState:
    """Advance a state by time t (free motion; exact spectral phases)."""
    par = state.params
    k = state.k_values
    if state.domain == "circle":
        freq = (math.pi * k / par.half_length) ** 2
    else:
        freq = (math.pi * k / (2.0 * par.half_length)) ** 2
    phases = np.exp(-1j * par.hbar * t * freq / (2.0 * par.mass))
    return replace(state, coefficients=state.coefficients * phases,
                   time=state.time + t)


def _image_window(params: PhysicalParams, center: float, t: float,
                  period: float, lo: float, hi: float):
    """Image shifts n*period whose Gaussian weight at [lo, hi] can matter."""
    g = params.gamma(t)
    # |x - center - n*period| <= w keeps exp(-(..)^2/(4 a^2 (1+g^2)))
    # above the tail threshold.
    w = math.sqrt(4.0 * WINDOW_LOG * params.alpha**2 * (1.0 + g * g))
    n_lo = math.floor((lo - center - w) / period) - 1
    n_hi = math.ceil((hi - center + w) / period) + 1
    return n_lo, n_hi


def _eval_circle_images(params: PhysicalParams, phase: PhasePoint,
                        x: np.ndarray, t: float, half_length: float):
    """Sum of freely evolving packets over shifts of 2l (vectorized)."""
    from .theta import gaussian_packet

    l = half_length
    m = params.mass
    center = phase.q + phase.p * t / m
    n_lo, n_hi = _image_window(params, center, t, 2.0 * l,
                               float(np.min(x)), float(np.max(x)))
    out = np.zeros_like(x, dtype=complex)
    for n in range(n_lo, n_hi + 1):
        shifted = PhasePoint(phase.q + 2.0 * n * l, phase.p)
        out += gaussian_packet(params, shifted, x, t)
    return out


def eval_state(state: WaveState, x, method: str = "spectral"):
    """Evaluate the wave function at position(s) x.

    method 'spectral' synthesizes the stored coefficients; 'image_sum'
    sums shifted free packets at the stored time (available only for
    packet-generated states).  The two agree within combined truncation
    tolerance.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    par = state.params
    l = par.half_length
    if method == "spectral":
        k = state.k_values
        if state.domain == "circle":
            basis = np.exp(1j * math.pi * np.outer(x, k) / l) \
                / math.sqrt(2.0 * l)
        else:
            basis = np.sin(math.pi * np.outer(x - l, k) / (2.0 * l)) \
                / math.sqrt(l)
        out = basis @ state.coefficients
    elif method == "image_sum":
        if state.source is None:
            raise MethodUnavailable(
                "image_sum requires a packet-generated state")
        qp = state.source
        if state.domain == "circle":
            out = _eval_circle_images(par, qp, x, state.time, l)
        else:
            # Difference of two periodized packets on the doubled circle.
            shifted = PhasePoint(qp.q - l, qp.p)
            mirror = PhasePoint(l - qp.q, -qp.p)
            out = (_eval_circle_images(par, shifted, x - l, state.time, 2.0 * l)
                   - _eval_circle_images(par, mirror, x - l, state.time,
                                         2.0 * l))
    else:
        raise ContractViolation(f"unknown method {method!r}")
    return out[0] if out.shape == (1,) else out


def circle_overlap(params: PhysicalParams, a: PhasePoint, b: PhasePoint,
                   t: float, half_length: float | None = None) -> complex:
    """Scalar product (state_a, evolved state_b) on the circle.

    Computed as the image sum of free-line overlaps over shifts of the
    second label by multiples of 2l, truncated by the Gaussian window.
    """
    l = params.half_length if half_length is None else half_length
    g = params.gamma(t)
    m = params.mass
    # Real decay rate of the overlap exponent in the position shift.
    decay = 1.0 / (2.0 * params.alpha**2 * (4.0 + g * g))
    drift = b.q - a.q + (a.p + b.p) * t / (2.0 * m)
    half = math.sqrt(WINDOW_LOG / decay) / (2.0 * l)
    k_center = -drift / (2.0 * l)
    k_lo = math.floor(k_center - half) - WINDOW_MARGIN
    k_hi = math.ceil(k_center + half) + WINDOW_MARGIN
    shifts = b.q + 2.0 * l * np.arange(k_lo, k_hi + 1)
    vals = overlap_core(params, a.q, a.p, shifts, b.p, t)
    return complex(np.sum(vals))


def time_scales(params: PhysicalParams, p: float, domain: str) -> TimeScales:
    """Traversal, collapse, and revival times for momentum p."""
    m, l, hbar = params.mass, params.half_length, params.hbar
    t_coll = 2.0 * m * l * params.alpha / (math.sqrt(3.0) * hbar)
    if domain == "circle":
        t_cl = 2.0 * l * m / abs(p) if p != 0.0 else math.inf
        t_rev = 4.0 * m * l * l / (math.pi * hbar)
    elif domain == "box":
        t_cl = 4.0 * l * m / abs(p) if p != 0.0 else math.inf
        t_rev = 16.0 * m * l * l / (math.pi * hbar)
    else:
        raise ContractViolation(f"unknown domain {domain!r}")
    return TimeScales(t_cl, t_coll, t_rev)


def revival_structure(M: int, N: int, half_length: float) -> RevivalStructure:
    """Peak structure of the fractional revival at c = M/N (reduced)."""
    if N <= 0:
        raise ContractViolation("N must be a positive integer")
    if math.gcd(M, N) != 1:
        raise ContractViolation(f"fraction {M}/{N} is not reduced")
    n_prime = N if N % 2 == 1 else N // 2
    a = 2.0 * half_length / N if N % 4 == 2 else 0.0
    return RevivalStructure(M, N, n_prime, a)


def irrational_structure() -> RevivalStructure:
    """Limit structure for irrational c: one peak, no offset."""
    return RevivalStructure(0, 1, 1, 0.0, irrational_flag=True)


def limit_profile(structure: RevivalStructure, phase: PhasePoint, D: float,
                  t_offset: float, domain: str, params: PhysicalParams
                  ) -> LimitProfile:
    """Predicted limit density near t = c * t_rev + t_offset.

    Centers sit at q + (spacing)k + a - (p/m) t_offset, k < n_prime,
    with spacing 2l/N' on the circle and 4l/N' in the box (where the
    centers live on the doubled, unfolded circle).  D = math.inf encodes
    the uniform profile; box uniform profiles carry both momentum signs
    with half weight each (mirrored).
    """
    if D < 0.0:
        raise DomainError("spread D must be in [0, inf]")
    l = params.half_length
    n_prime = structure.n_prime
    drift = -phase.p * t_offset / params.mass
    if domain == "circle":
        spacing, wrap_l, offset = 2.0 * l / n_prime, l, structure.a
    elif domain == "box":
        # Centers live on the doubled circle of half-length 2l, so both
        # the spacing and the N = 2 (mod 4) offset double.
        spacing, wrap_l, offset = 4.0 * l / n_prime, 2.0 * l, \
            2.0 * structure.a
    else:
        raise ContractViolation(f"unknown domain {domain!r}")
    centers = tuple(
        wrap_position(phase.q + spacing * k + offset + drift, wrap_l)
        for k in range(n_prime))
    mirrored = domain == "box" and math.isinf(D)
    return LimitProfile(centers, D, phase.p, 1.0 / n_prime, domain, l,
                        mirrored=mirrored)


def profile_position_density(profile: LimitProfile, x) -> np.ndarray:
    """Position marginal of the limit profile on a grid.

    D = 0 is not representable on a grid (delta peaks); use the center
    list directly in that case.
    """
    x = np.asarray(x, dtype=float)
    l = profile.half_length
    if profile.spread_d == 0.0:
        raise MethodUnavailable("delta-peak profile has no grid density")
    if math.isinf(profile.spread_d):
        return np.full_like(x, 1.0 / (2.0 * l))
    D = profile.spread_d
    period = 2.0 * l if profile.domain == "circle" else 4.0 * l
    n_img = int(math.ceil(6.0 * D / period)) + 1
    out = np.zeros_like(x)
    for c in profile.centers:
        for n in range(-n_img, n_img + 1):
            out += profile.weight * np.exp(
                -(x - c - n * period) ** 2 / (2.0 * D * D)) \
                / math.sqrt(2.0 * math.pi * D * D)
    return out


def transition_density(params: PhysicalParams, a: PhasePoint, b: PhasePoint,
                       t: float, domain: str) -> float:
    """Phase-space transition density (1/2 pi hbar)|overlap|^2."""
    if domain == "circle":
        ov = circle_overlap(params, a, b, t)
    elif domain == "box":
        from .box import box_overlap
        ov = box_overlap(params, a, b, t)
    else:
        raise ContractViolation(f"unknown domain {domain!r}")
    return abs(ov) ** 2 / (2.0 * math.pi * params.hbar)


def as_fraction(M: int, N: int) -> Fraction:
    """Reduced-fraction helper used by callers supplying c = M/N."""
    return Fraction(M, N)
