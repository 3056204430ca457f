"""Theta kernel, free packets, and the closed-form line overlap."""

import math
import os

import numpy as np
import pytest

from qrevival.oracles import QuadratureSpec, quad_inner, read_golden
from qrevival.params import PhasePoint, PhysicalParams, RangeError
from qrevival.theta import (dispersion, gaussian_overlap, gaussian_packet,
                            overlap_core, theta)

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def test_theta_known_value():
    # Direct summation of exp(-pi k^2): 1 + 2e^-pi + 2e^-4pi + ...
    expected = 1.0 + 2.0 * sum(math.exp(-math.pi * k * k)
                               for k in range(1, 20))
    assert abs(theta(0.0, 1.0) - expected) < 1e-15
    assert abs(theta(0.0, 1.0) - 1.0864348112) < 1e-10


def test_theta_against_golden():
    config, tol, rows = read_golden(os.path.join(GOLDEN, "theta_values.csv"))
    assert config["oracle"] == "direct_summation"
    for row in rows:
        z = complex(float(row["z_re"]), float(row["z_im"]))
        tau = complex(float(row["tau_re"]), float(row["tau_im"]))
        want = complex(float(row["value_re"]), float(row["value_im"]))
        got = theta(z, tau)
        assert abs(got - want) <= tol * abs(want)


@pytest.mark.parametrize("seed", range(6))
def test_theta_modular_identity(seed):
    rng = np.random.default_rng(seed)
    tau = complex(rng.uniform(0.2, 5.0), rng.uniform(-0.4, 0.4))
    z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-0.3, 0.3))
    lhs = theta(z / (1j * tau), 1.0 / tau)
    rhs = np.sqrt(tau) * np.exp(math.pi * z * z / tau) * theta(z, tau)
    assert abs(lhs - rhs) < 1e-12 * abs(rhs)


def test_theta_branch_continuity():
    # Values straddling the representation switch at Re tau = 1 agree.
    z = 0.3 + 0.05j
    left = theta(z, 1.0 - 1e-9)
    right = theta(z, 1.0 + 1e-9)
    assert abs(left - right) < 1e-7 * abs(right)


def test_theta_overflow_guard():
    with pytest.raises(RangeError):
        theta(500.0j, 1.0)


def test_packet_normalization():
    par = PhysicalParams(0.1, 1.0, 0.35, math.pi)
    ph = PhasePoint(0.2, 1.3)
    for t in (0.0, 0.8):
        val = quad_inner(lambda x: gaussian_packet(par, ph, x, t),
                         lambda x: gaussian_packet(par, ph, x, t),
                         (-30.0, 30.0), QuadratureSpec(subdivisions=32))
        assert abs(val.real - 1.0) < 1e-12


def test_dispersion_matches_second_moment():
    par = PhysicalParams(0.2, 1.3, 0.4, math.pi)
    ph = PhasePoint(-0.3, 0.9)
    t = 0.7
    spec = QuadratureSpec(subdivisions=32)
    center = ph.q + ph.p * t / par.mass

    def weighted(x):
        return (x - center) * gaussian_packet(par, ph, x, t)

    second = quad_inner(weighted, weighted, (-40.0, 40.0), spec).real
    assert abs(math.sqrt(second) - dispersion(par, t)) < 1e-8


def test_dispersion_time_scaling():
    par = PhysicalParams(0.2, 1.0, 0.3, math.pi)
    spread = par.hbar / (2.0 * par.mass * par.alpha)
    for t in (0.5, 1.7):
        expect = math.sqrt(par.alpha**2 + (spread * t) ** 2)
        assert abs(dispersion(par, t) - expect) < 1e-15


def test_overlap_against_golden():
    _, tol, rows = read_golden(os.path.join(GOLDEN, "line_overlaps.csv"))
    for row in rows:
        par = PhysicalParams(float(row["hbar"]), float(row["mass"]),
                             float(row["alpha"]), math.pi)
        a = PhasePoint(float(row["qa"]), float(row["pa"]))
        b = PhasePoint(float(row["qb"]), float(row["pb"]))
        want = complex(float(row["overlap_re"]), float(row["overlap_im"]))
        got = gaussian_overlap(par, a, b, float(row["t"]))
        assert abs(got - want) < tol


def test_overlap_position_shift():
    par = PhysicalParams(0.1, 1.0, 0.3, math.pi)
    for delta in (0.1, 0.7, 1.9):
        ov = gaussian_overlap(par, PhasePoint(0.2, 0.8),
                              PhasePoint(0.2 + delta, 0.8), 0.0)
        assert abs(abs(ov) - math.exp(-delta**2 / (8.0 * par.alpha**2))) \
            < 1e-14


def test_overlap_self_is_one():
    par = PhysicalParams(0.07, 2.0, 0.5, math.pi)
    ph = PhasePoint(-1.1, 0.6)
    assert abs(gaussian_overlap(par, ph, ph, 0.0) - 1.0) < 1e-15


def test_overlap_core_broadcasts(rng):
    par = PhysicalParams(0.1, 1.0, 0.3, math.pi)
    qb = rng.uniform(-1.0, 1.0, size=(4, 1))
    pb = rng.uniform(-1.0, 1.0, size=(1, 5))
    vals = overlap_core(par, 0.2, 0.5, qb, pb, 0.4)
    assert vals.shape == (4, 5)
    for i in range(4):
        for j in range(5):
            single = gaussian_overlap(par, PhasePoint(0.2, 0.5),
                                      PhasePoint(qb[i, 0], pb[0, j]), 0.4)
            assert abs(vals[i, j] - single) < 1e-15
