"""Coherent states in an infinite square well via the doubled circle.

A box [-l, l] with hard walls unfolds onto a circle of circumference 4l:
classically through the two-sheeted covering map, quantum mechanically
through the odd-symmetrization map Theta.  Box coherent states are
antisymmetrized periodized packets; their overlaps and norms reduce to
circle kernels on the doubled domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import WaveState, circle_coefficients, circle_norm_sq, \
    circle_overlap
from .params import ContractViolation, DegenerateStateError, DomainError, \
    PhasePoint, PhysicalParams

ROOT_HALF = math.sqrt(2.0) / 2.0


@dataclass(frozen=True)
class CoveringImage:
    """Image of a box phase point on the doubled circle [-2l, 2l)."""

    q_prime: float
    p_prime: float


def covering_map(phase: PhasePoint, half_length: float) -> CoveringImage:
    """Unfold a box phase point onto the doubled circle.

    q' = q - l for p >= 0, q' = l - q for p < 0; p' = |p|.
    """
    l = half_length
    if not -l <= phase.q <= l:
        raise DomainError(f"q={phase.q} outside the box [-{l}, {l}]")
    if phase.p >= 0.0:
        return CoveringImage(phase.q - l, phase.p)
    return CoveringImage(l - phase.q, -phase.p)


def fold_position(q_prime: float, half_length: float) -> tuple[float, float]:
    """Fold a doubled-circle position back into the box.

    Returns (q, sign) where sign is the momentum orientation of the
    sheet: q = q' + l on [-2l, 0) (rightward), q = l - q' on [0, 2l)
    (leftward).
    """
    l = half_length
    qp = (q_prime + 2.0 * l) % (4.0 * l) - 2.0 * l
    if qp < 0.0:
        return qp + l, 1.0
    return l - qp, -1.0


def _check_excluded(params: PhysicalParams, phase: PhasePoint,
                    eps_q: float | None, eps_p: float | None) -> None:
    eq = 3.0 * params.alpha if eps_q is None else eps_q
    ep = 3.0 * params.hbar / params.alpha if eps_p is None else eps_p
    for corner in (params.half_length, -params.half_length):
        if abs(phase.q - corner) < eq and abs(phase.p) < ep:
            raise DegenerateStateError(
                f"phase point ({phase.q}, {phase.p}) lies within the "
                f"exclusion region around ({corner}, 0) where the box "
                "coherent state degenerates to zero")


def box_coefficients(params: PhysicalParams, phase: PhasePoint):
    """Sine-basis coefficients of the box coherent state (modes k >= 1).

    Built from the doubled-circle comb C_k of the packet at (q - l, p):
    b_k = i (C_k - C_{-k}), the odd part picked out by antisymmetrizing
    across the wall.
    """
    l = params.half_length
    shifted = PhasePoint(phase.q - l, phase.p)
    k_min, c = circle_coefficients(params, shifted, half_length=2.0 * l)
    k_max = k_min + len(c) - 1
    top = max(abs(k_min), abs(k_max))
    full = np.zeros(2 * top + 1, dtype=complex)
    full[k_min + top: k_max + 1 + top] = c
    k = np.arange(1, top + 1)
    b = 1j * (full[k + top] - full[-k + top])
    return b


def make_box_state(params: PhysicalParams, phase: PhasePoint,
                   eps_q: float | None = None,
                   eps_p: float | None = None) -> WaveState:
    """Coherent state of the infinite square well labelled by (q, p).

    Refuses labels inside the exclusion neighborhoods of (+-l, 0),
    where the antisymmetrized state collapses to zero (default radii
    3*alpha in position, 3*hbar/alpha in momentum).
    """
    l = params.half_length
    if not params.alpha < l / 4.0:
        raise ContractViolation(
            f"alpha={params.alpha} must be < half_length/4={l / 4.0}")
    if not -l <= phase.q <= l:
        raise DomainError(f"q={phase.q} outside the box [-{l}, {l}]")
    _check_excluded(params, phase, eps_q, eps_p)
    b = box_coefficients(params, phase)
    return WaveState("box", params, 1, b, 0.0, phase)


def theta_map(psi: np.ndarray, half_length: float) -> np.ndarray:
    """Fold a sampled doubled-circle function into the box.

    ``psi`` samples a function on a uniform grid over [-2l, 2l) with an
    even number of points N (so +-l land on grid nodes); returns samples
    of (sqrt(2)/2)[psi(y - l) - psi(l - y)] on [-l, l) with N/2 points.

    The reflections are exact index arithmetic; no interpolation.
    """
    psi = np.asarray(psi)
    n = len(psi)
    if n % 4 != 0:
        raise ContractViolation(
            "doubled-circle grid length must be divisible by 4 so the "
            "wall points align with samples")
    # Grid: y_j = -2l + j * (4l/n).  y - l -> index j - n/4 (mod n);
    # l - y -> index n/4 - j (mod n), since 5n/4 - j wraps to n/4 - j.
    j = np.arange(n)
    shifted = psi[(j - n // 4) % n]
    reflected = psi[(n // 4 - j) % n]
    folded = ROOT_HALF * (shifted - reflected)
    # Keep the box window [-l, l): indices n/4 .. 3n/4 of the y-grid.
    return folded[n // 4: 3 * n // 4]


def theta_inv_map(phi: np.ndarray, half_length: float) -> np.ndarray:
    """Odd-extend sampled box data back to the doubled circle.

    ``phi`` samples [-l, l) with N points; returns 2N samples on
    [-2l, 2l): (sqrt(2)/2) phi(x + l) for x in [-2l, 0),
    -(sqrt(2)/2) phi(l - x) for x in [0, 2l).
    """
    phi = np.asarray(phi)
    n = len(phi)
    if n % 2 != 0:
        raise ContractViolation("box grid length must be even")
    out = np.zeros(2 * n, dtype=complex if np.iscomplexobj(phi) else float)
    # x_i = -2l + i * (2l/n).  For i < n, x + l lands on box index i.
    out[:n] = ROOT_HALF * phi
    # For i >= n, l - x_i lands on box index (2n - i) mod n; at i = n
    # the target is the phi(l) wall value, which the wrap replaces by
    # phi(-l) -- both vanish for genuine box functions.
    i = np.arange(n, 2 * n)
    out[n:] = -ROOT_HALF * phi[(2 * n - i) % n]
    return out


def box_overlap(params: PhysicalParams, a: PhasePoint, b: PhasePoint,
                t: float) -> complex:
    """Scalar product (box state a, evolved box state b).

    Reduces to circle overlaps on the doubled circle: the second state
    contributes its direct image at (q' - l, p') minus the reflected
    image at (l - q', -p').
    """
    l = params.half_length
    aa = PhasePoint(a.q - l, a.p)
    direct = PhasePoint(b.q - l, b.p)
    mirror = PhasePoint(l - b.q, -b.p)
    return (circle_overlap(params, aa, direct, t, half_length=2.0 * l)
            - circle_overlap(params, aa, mirror, t, half_length=2.0 * l))


def box_norm_sq(params: PhysicalParams, phase: PhasePoint) -> float:
    """Squared norm of the box coherent state.

    The periodized-packet norm on the doubled circle minus the (real)
    cross term with its wall reflection; exactly 0 at (+-l, 0).
    """
    l = params.half_length
    shifted = PhasePoint(phase.q - l, phase.p)
    mirror = PhasePoint(l - phase.q, -phase.p)
    base = circle_norm_sq(
        PhysicalParams(params.hbar, params.mass, params.alpha, 2.0 * l),
        shifted)
    cross = circle_overlap(params, shifted, mirror, 0.0, half_length=2.0 * l)
    return base - cross.real
