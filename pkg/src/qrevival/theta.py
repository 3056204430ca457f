"""Free-line Gaussian packets and the Jacobi theta series.

Everything on the circle and in the box reduces to three kernels:

* ``theta``          -- theta(z, tau) = sum_k exp(-pi tau k^2 + 2 pi i k z),
  Re tau > 0, with a single modular reduction into the fast-converging
  regime when Re tau < 1;
* ``gaussian_packet`` -- the freely evolving minimal packet eta_{qp,t};
* ``gaussian_overlap`` -- the closed-form scalar product
  (eta_{qp}, eta_{q'p',t}).
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .params import DomainError, PhasePoint, PhysicalParams, RangeError

# Tail rule shared by every Gaussian-weighted series in the package:
# stop once the next term falls below TAIL_REL * (|partial sum| + 1).
TAIL_REL = 1e-16

_EXP_CAP = 709.0  # log of the largest finite double


def _guarded_exp(w: complex, k: int) -> complex:
    if w.real > _EXP_CAP:
        raise RangeError(f"theta series term k={k} overflows exp ({w.real:.1f})")
    return cmath.exp(w)


def _theta_series(z: complex, tau: complex) -> complex:
    """Direct summation of the defining series; fast for Re tau >= 1."""
    total = _guarded_exp(0j, 0)
    k = 1
    quiet = 0
    while True:
        pair = (_guarded_exp(-math.pi * tau * k * k + 2j * math.pi * k * z, k)
                + _guarded_exp(-math.pi * tau * k * k - 2j * math.pi * k * z, -k))
        total += pair
        if abs(pair) < TAIL_REL * (abs(total) + 1.0):
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
        k += 1
        if k > 10**6:
            raise RangeError("theta series failed to converge")


def _theta_images(z: complex, tau: complex) -> complex:
    """Image-sum form (1/sqrt(tau)) sum_n exp(-pi (z-n)^2 / tau).

    This is the defining series after one application of the modular
    relation; it converges fast when Re tau < 1.
    """
    inv = 1.0 / tau
    n0 = round(z.real)
    total = 0j
    # Centre the sum on the nearest integer so both tails decay.
    n = 0
    quiet = 0
    while True:
        if n == 0:
            step = _guarded_exp(-math.pi * (z - n0) ** 2 * inv, n0)
        else:
            step = (_guarded_exp(-math.pi * (z - (n0 + n)) ** 2 * inv, n0 + n)
                    + _guarded_exp(-math.pi * (z - (n0 - n)) ** 2 * inv, n0 - n))
        total += step
        if n > 0 and abs(step) < TAIL_REL * (abs(total) + 1.0):
            quiet += 1
            if quiet >= 2:
                break
        elif n > 0:
            quiet = 0
        n += 1
        if n > 10**6:
            raise RangeError("theta image sum failed to converge")
    return total / cmath.sqrt(tau)


def theta(z: complex, tau: complex) -> complex:
    """Jacobi theta function sum_k exp(-pi tau k^2 + 2 pi i k z).

    Parameters
    ----------
    z : complex
    tau : complex
        Must satisfy Re tau > 0.

    Notes
    -----
    For Re tau < 1 the modular relation is applied once and the sum is
    carried out in the image (Gaussian comb) representation, which is
    the fast-converging regime there.  Both branches agree to ~1e-13
    relative across the overlap region.
    """
    z = complex(z)
    tau = complex(tau)
    if not tau.real > 0.0:
        raise DomainError(f"theta requires Re tau > 0, got tau={tau!r}")
    if tau.real >= 1.0:
        return _theta_series(z, tau)
    return _theta_images(z, tau)


def gaussian_packet(params: PhysicalParams, phase: PhasePoint, x, t: float = 0.0):
    """Freely evolving Gaussian packet eta_{qp,t}(x) on the line.

    At t = 0 this is the minimal packet
    (2 pi alpha^2)^(-1/4) exp{-(x-q)^2/(4 alpha^2) + i p (x-q)/hbar};
    for t != 0 the centre moves along the classical trajectory and the
    width grows with gamma = hbar t / (2 m alpha^2).

    ``x`` may be a scalar or an ndarray; the return matches.
    """
    a2 = params.alpha**2
    g = params.gamma(t)
    q, p = phase.q, phase.p
    m, hbar = params.mass, params.hbar
    # (1+i gamma)^(-1/2) via the principal log keeps the prefactor
    # continuous in t through gamma = 0.
    pref = (2.0 * math.pi * a2) ** (-0.25) * cmath.exp(-0.5 * cmath.log(1.0 + 1j * g))
    x = np.asarray(x, dtype=float)
    xc = x - q - p * t / m
    expo = (-xc**2 / (4.0 * a2 * (1.0 + 1j * g))
            + 1j * p * (x - q - p * t / (2.0 * m)) / hbar)
    out = pref * np.exp(expo)
    return out[()] if out.ndim == 0 else out


def dispersion(params: PhysicalParams, t: float) -> float:
    """Position mean-square deviation sqrt(alpha^2 + (hbar t / 2 m alpha)^2)."""
    return math.hypot(params.alpha,
                      params.hbar * t / (2.0 * params.mass * params.alpha))


def overlap_core(params: PhysicalParams, q: float, p: float, qb, pb, t: float):
    """Closed-form (eta_{qp}, eta_{q'p',t}) with array support in (q', p').

    Returns
    -------
    complex scalar or ndarray broadcast over ``qb``, ``pb``.
    """
    a2 = params.alpha**2
    g = params.gamma(t)
    m, hbar = params.mass, params.hbar
    qb = np.asarray(qb, dtype=float)
    pb = np.asarray(pb, dtype=float)
    dq = qb - q
    ps = pb + p
    pd = pb - p
    pref = cmath.sqrt(2.0 / (2.0 + 1j * g))
    expo = (-(dq + ps * t / (2.0 * m)) ** 2 / (4.0 * a2 * (2.0 + 1j * g))
            - a2 * pd**2 / (2.0 * hbar**2)
            - 1j * ps * dq / (2.0 * hbar)
            - 1j * t * ps**2 / (8.0 * m * hbar))
    out = pref * np.exp(expo)
    return out[()] if out.ndim == 0 else out


def gaussian_overlap(params: PhysicalParams, a: PhasePoint, b: PhasePoint,
                     t: float = 0.0) -> complex:
    """Scalar product (eta_a, eta_{b,t}) of free-line packets, in closed form."""
    return complex(overlap_core(params, a.q, a.p, b.q, b.p, t))
