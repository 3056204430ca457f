"""Circle coherent states: coefficients, norms, evolution, revivals."""

import math
import os
from fractions import Fraction

import numpy as np
import pytest

from qrevival.circle import (as_fraction, circle_norm_sq, circle_overlap,
                             eval_state, evolve, irrational_structure,
                             limit_profile, make_circle_state,
                             profile_position_density, revival_structure,
                             time_scales)
from qrevival.oracles import (QuadratureSpec, brute_evolve,
                              circle_state_callable, quad_inner, read_golden)
from qrevival.params import (CapacityError, ContractViolation,
                             MethodUnavailable, PhasePoint, PhysicalParams)

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")
L = math.pi


def test_alpha_contract():
    par = PhysicalParams(0.1, 1.0, L / 3.0, L)
    with pytest.raises(ContractViolation):
        make_circle_state(par, PhasePoint(0.0, 1.0))


def test_capacity_guard():
    par = PhysicalParams(1e-12, 1.0, 1e-9, L)
    with pytest.raises(CapacityError):
        make_circle_state(par, PhasePoint(0.0, 1.0))


def test_coefficients_match_projection():
    par = PhysicalParams(0.1, 1.0, 0.3, L)
    ph = PhasePoint(0.4, 1.2)
    state = make_circle_state(par, ph)
    f = circle_state_callable(par, ph)
    spec = QuadratureSpec(subdivisions=16)
    for k in (state.k_min, state.k_min + len(state.coefficients) // 2):
        def basis(x, k=k):
            return np.exp(1j * math.pi * k * np.asarray(x) / L) \
                / math.sqrt(2.0 * L)
        want = quad_inner(basis, f, (-L, L), spec)
        got = state.coefficients[k - state.k_min]
        assert abs(got - want) < 1e-12


def test_norm_series_vs_quadrature(rng):
    spec = QuadratureSpec(subdivisions=16)
    for _ in range(4):
        par = PhysicalParams(rng.uniform(0.05, 0.3), 1.0,
                             rng.uniform(0.2, 0.7), L)
        ph = PhasePoint(rng.uniform(-L, L), rng.uniform(-2.0, 2.0))
        series = circle_norm_sq(par, ph)
        f = circle_state_callable(par, ph)
        quad = quad_inner(f, f, (-L, L), spec).real
        assert abs(series - quad) < 1e-12 * quad


def test_norm_near_one_for_narrow_packets():
    par = PhysicalParams(0.1, 1.0, 0.1 * L, L)
    for p in (0.0, 1.0, 3.7):
        assert abs(circle_norm_sq(par, PhasePoint(0.2, p)) - 1.0) < 1e-15


def test_norm_wide_packet_value():
    # alpha = l/2, p = 0: norm^2 = 1 + 2e^-2 + 2e^-8 + 2e^-18 + ...
    par = PhysicalParams(0.1, 1.0, L / 2.0, L)
    expected = 1.0 + 2.0 * sum(math.exp(-2.0 * k * k) for k in range(1, 10))
    assert abs(circle_norm_sq(par, PhasePoint(0.0, 0.0)) - expected) < 1e-14
    assert abs(expected - 1.27134) < 1e-5


def test_norm_against_golden():
    _, tol, rows = read_golden(os.path.join(GOLDEN, "norms.csv"))
    for row in rows:
        if row["domain"] != "circle":
            continue
        par = PhysicalParams(float(row["hbar"]), float(row["mass"]),
                             float(row["alpha"]), float(row["half_length"]))
        got = circle_norm_sq(par, PhasePoint(float(row["q"]),
                                             float(row["p"])))
        assert abs(got - float(row["norm_sq"])) < tol * got


def test_overlap_against_golden():
    _, tol, rows = read_golden(os.path.join(GOLDEN, "circle_overlaps.csv"))
    for row in rows:
        par = PhysicalParams(float(row["hbar"]), float(row["mass"]),
                             float(row["alpha"]), float(row["half_length"]))
        a = PhasePoint(float(row["qa"]), float(row["pa"]))
        b = PhasePoint(float(row["qb"]), float(row["pb"]))
        want = complex(float(row["overlap_re"]), float(row["overlap_im"]))
        got = circle_overlap(par, a, b, float(row["t"]))
        assert abs(got - want) < tol


def test_dual_engine_densities(rng):
    par = PhysicalParams(0.05 * L, 1.0, 0.05 * L, L)
    ph = PhasePoint(0.3, 1.0)
    state = make_circle_state(par, ph)
    scales = time_scales(par, ph.p, "circle")
    x = rng.uniform(-L, L, size=128)
    for t in (0.0, 0.3 * scales.t_coll):
        st = evolve(state, t)
        a = eval_state(st, x, method="spectral")
        b = eval_state(st, x, method="image_sum")
        assert np.max(np.abs(np.abs(a) ** 2 - np.abs(b) ** 2)) < 1e-10


def test_evolve_matches_brute_oracle():
    par = PhysicalParams(0.1, 1.0, 0.3, L)
    ph = PhasePoint(-0.4, 1.1)
    state = make_circle_state(par, ph)
    n = 1024
    x = -L + 2.0 * L / n * np.arange(n)
    psi0 = eval_state(state, x)
    t = 0.9
    brute = brute_evolve(psi0, par, t, "circle")
    direct = eval_state(evolve(state, t), x)
    assert np.max(np.abs(brute - direct)) < 1e-10


def test_image_sum_requires_source():
    par = PhysicalParams(0.1, 1.0, 0.3, L)
    state = make_circle_state(par, PhasePoint(0.0, 1.0))
    import dataclasses
    anon = dataclasses.replace(state, source=None)
    with pytest.raises(MethodUnavailable):
        eval_state(anon, np.array([0.0]), method="image_sum")


def test_full_revival():
    par = PhysicalParams(0.1, 1.0, 0.3, L)
    ph = PhasePoint(0.5, 1.4)
    scales = time_scales(par, ph.p, "circle")
    auto = circle_overlap(par, ph, ph, scales.t_rev)
    norm = circle_norm_sq(par, ph)
    assert abs(abs(auto) - norm) < 1e-11


def test_time_scales_formulas():
    par = PhysicalParams(0.05, 2.0, 0.3, L)
    s = time_scales(par, 1.5, "circle")
    assert abs(s.t_cl - 2.0 * L * 2.0 / 1.5) < 1e-15
    assert abs(s.t_coll - 2.0 * 2.0 * L * 0.3
               / (math.sqrt(3.0) * 0.05)) < 1e-12
    assert abs(s.t_rev - 4.0 * 2.0 * L * L / (math.pi * 0.05)) < 1e-9


@pytest.mark.parametrize("m,n,n_prime,has_offset", [
    (1, 3, 3, False), (1, 2, 1, True), (1, 4, 2, False), (3, 5, 5, False),
    (1, 6, 3, True), (5, 8, 4, False),
])
def test_revival_structure(m, n, n_prime, has_offset):
    s = revival_structure(m, n, L)
    assert s.n_prime == n_prime
    if has_offset:
        assert abs(s.a - 2.0 * L / n) < 1e-15
    else:
        assert s.a == 0.0


def test_revival_structure_rejects_unreduced():
    with pytest.raises(ContractViolation):
        revival_structure(2, 4, L)


def test_irrational_structure():
    s = irrational_structure()
    assert s.n_prime == 1 and s.a == 0.0 and s.irrational_flag


def test_fractional_revival_peak_positions():
    par = PhysicalParams(0.02, 1.0, 0.02 * L, L)
    ph = PhasePoint(0.5, 1.0)
    state = make_circle_state(par, ph)
    scales = time_scales(par, ph.p, "circle")
    n = 1024
    x = -L + 2.0 * L / n * (np.arange(n) + 0.5)
    cell = 2.0 * L / n
    for frac in (Fraction(1, 3), Fraction(1, 2), Fraction(1, 4)):
        structure = revival_structure(frac.numerator, frac.denominator, L)
        dens = np.abs(eval_state(evolve(state, float(frac) * scales.t_rev),
                                 x)) ** 2
        peaks = [float(x[i]) for i in range(n)
                 if dens[i] > dens[i - 1] and dens[i] >= dens[(i + 1) % n]
                 and dens[i] > 0.2 * dens.max()]
        profile = limit_profile(structure, ph, 0.0, 0.0, "circle", par)
        assert len(peaks) == structure.n_prime
        for c in profile.centers:
            assert min(abs(pk - c) for pk in peaks) <= cell


def test_limit_profile_drift_and_density():
    par = PhysicalParams(0.05, 1.0, 0.2, L)
    structure = revival_structure(0, 1, L)
    offset = -0.3
    profile = limit_profile(structure, PhasePoint(0.1, 2.0), 0.4, offset,
                            "circle", par)
    # drift = -p t_offset / m moves the center forward for t past c T_rev.
    assert abs(profile.centers[0] - (0.1 + 2.0 * 0.3)) < 1e-14
    x = np.linspace(-L, L, 2048, endpoint=False)
    dens = profile_position_density(profile, x)
    assert abs(np.sum(dens) * (2.0 * L / 2048) - 1.0) < 1e-10


def test_limit_profile_delta_has_no_density():
    par = PhysicalParams(0.05, 1.0, 0.2, L)
    profile = limit_profile(revival_structure(0, 1, L), PhasePoint(0.0, 1.0),
                            0.0, 0.0, "circle", par)
    with pytest.raises(MethodUnavailable):
        profile_position_density(profile, np.array([0.0]))


def test_as_fraction_roundtrip():
    assert as_fraction(3, 7) == Fraction(3, 7)
    assert as_fraction(1, 4) == Fraction(1, 4)
