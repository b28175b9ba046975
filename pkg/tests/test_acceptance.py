"""Acceptance gate: one test per criterion, each printing a PASS line.

Criteria 1 to 6 reproduce the closed-form numbers for the standard
example scenario (M = 1e-9 g, R = 1e-3 cm, width = 0.1 cm).  Criteria
7 to 13 are property-based checks of the potential, the propagator, the
reduction pipeline, the desk-scale localization run, and the spectrum.
Run with `pytest tests/test_acceptance.py -v -s`.
"""

import math

import numpy as np
import pytest

import gravtwin.estimates as est
from gravtwin import (
    ComplexField,
    FactoredEvolution,
    Grid,
    PropagatorConfig,
    RadialGrid,
    fidelity,
    imaginary_time_ground_state,
    init_gaussian_pair,
    init_gaussian_relative,
    make_pair_propagator,
    make_relative_propagator,
    partial_trace,
    radial_shoot,
    threshold_kappa,
    v_oracle,
    v_scaled,
    von_neumann_entropy,
)
from gravtwin.potential import _overlap_branch_prime, _tail_branch_prime
from gravtwin.spectrum import THRESHOLD_GRID, THRESHOLD_U_MAX, bound_state_count

HG_TARGET_ERG = 3.31e-24  # reference energy scale for the gate
HG_STD_TARGET_ERG = 3.09e-24


def ok(n, detail):
    print(f"[acceptance] criterion {n:02d} PASS: {detail}")


class TestPaperNumberReproduction:
    def test_criterion_01_localization_time(self, example_scenario):
        tau = est.localization_time(example_scenario)
        assert 10**-3.5 <= tau <= 10**-2.5
        ok(1, f"localization time {tau:.3e} s in [1e-3.5, 1e-2.5]")

    def test_criterion_02_localization_length(self, example_scenario):
        lam = est.localization_length(example_scenario)
        assert 1e-11 <= lam <= 1e-10
        ok(2, f"localization length {lam:.3e} cm in [1e-11, 1e-10]")

    def test_criterion_03_branch_count_and_entropy(self, example_scenario):
        n = est.branch_count(example_scenario)
        s = math.log(n)
        assert 1e28 <= n <= 1e29
        assert abs(s - math.log(10.0) * 28.5) <= 2.0
        ok(3, f"branch count {n:.3e}, entropy {s:.2f} vs {math.log(10)*28.5:.2f} within 2")

    def test_criterion_04_spreading_time(self, example_scenario):
        t = est.spreading_time(example_scenario)
        assert 1e15 <= t <= 1e17
        ok(4, f"spreading time {t:.3e} s within a decade of 1e16")

    def test_criterion_05_gaussian_energy(self, example_scenario):
        g = est.gaussian_energy(example_scenario)
        assert g.mean < 0
        assert abs(math.log10(abs(g.mean) / HG_TARGET_ERG)) <= 1.0
        ratio = g.bound_dominance / (HG_TARGET_ERG / HG_STD_TARGET_ERG)
        assert 1.0 / 3.0 <= ratio <= 3.0
        ok(5, f"pair energy {g.mean:.3e} erg (|log10 vs 3.31e-24| = "
              f"{abs(math.log10(abs(g.mean)/HG_TARGET_ERG)):.2f}), dominance {g.bound_dominance:.2f}")

    def test_criterion_06_threshold_mass(self):
        kappa_star = threshold_kappa()
        protons = est.threshold_mass_protons(1.0, kappa_star)
        assert 1e9 <= protons <= 1e12
        ok(6, f"kappa* = {kappa_star:.3f} gives threshold mass {protons:.3e} proton masses")


class TestPotentialAcceptance:
    def test_criterion_07_potential(self):
        us = np.linspace(0.0, 5.0, 50)
        worst = max(abs(float(v_scaled(float(u))) - v_oracle(float(u))) for u in us)
        assert worst < 1e-5
        assert abs(_overlap_branch_prime(2.0) - _tail_branch_prime(2.0)) < 1e-13
        for u in (2.5, 7.0, 40.0):
            assert v_scaled(u) == -1.0 / (2.0 * u)
        ok(7, f"closed form vs quadrature oracle: worst |diff| = {worst:.2e} over 50 points; "
              "C1 contact; exact point tail")


@pytest.fixture(scope="module")
def long_2d_run():
    """1e4 Strang steps of the joint state on a 256^2 grid, mask off."""
    grid = Grid(48.0, 256)
    prop = make_pair_propagator(grid, v_scaled, 25.0, PropagatorConfig(dt=0.005))
    f = init_gaussian_pair(4.0, grid)
    e0 = prop.energy(f.values)[0]
    vals = f.values
    worst_norm = 0.0
    worst_energy = 0.0
    worst_swap = 0.0
    for _ in range(100):
        vals = prop.step(vals, 100)
        worst_norm = max(worst_norm, abs(ComplexField(grid, vals).norm2() - 1.0))
        worst_energy = max(worst_energy, abs(prop.energy(vals)[0] - e0) / abs(e0))
        worst_swap = max(worst_swap, float(np.max(np.abs(vals - vals.T))))
    return {"norm": worst_norm, "energy": worst_energy, "swap": worst_swap,
            "grid": grid, "prop": prop, "initial": f}


class TestPropagatorAcceptance:
    def test_criterion_08_conservation_and_analytic(self, long_2d_run):
        assert long_2d_run["norm"] < 1e-10
        assert long_2d_run["energy"] < 1e-6

        # free-particle spreading against the closed form
        kappa, a0 = 20.0, 2.0
        mass = kappa / 2.0
        grid1 = Grid(60.0, 1024)
        t_double = math.sqrt(3.0) * mass * a0**2
        steps = int(round(t_double / 0.004))
        zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))
        prop = make_relative_propagator(grid1, zero, kappa, PropagatorConfig(dt=t_double / steps))
        spread = prop.step(init_gaussian_relative(a0, grid1).values, steps)
        sigma = ComplexField(grid1, spread).position_std()
        sigma_want = a0 * math.sqrt(2.0)
        assert abs(sigma / sigma_want - 1.0) < 1e-4

        # harmonic coherent return
        omega = math.sqrt(1.0 / mass)
        period = 2.0 * math.pi / omega
        grid2 = Grid(40.0, 512)
        u = grid2.coords
        aho = 1.0 / math.sqrt(mass * omega)
        f0 = ComplexField(grid2, np.exp(-((u - 3.0) ** 2) / (2 * aho**2)).astype(complex)).normalized()
        hprop = make_relative_propagator(grid2, lambda r: 0.5 * np.asarray(r) ** 2, kappa,
                                         PropagatorConfig(dt=period / 4000))
        back = hprop.step(f0.values, 4000)
        fid = fidelity(ComplexField(grid2, back).normalized(), f0)
        assert fid > 0.999

        # time reversal on the 2D stepper
        prop2d = long_2d_run["prop"]
        f2d = long_2d_run["initial"]
        fwd = prop2d.step(f2d.values, 1000)
        rec = prop2d.step_reversed(fwd, 1000)
        reversal = float(np.max(np.abs(rec - f2d.values)))
        assert reversal < 1e-10

        ok(8, f"1e4-step drift: norm {long_2d_run['norm']:.2e}, energy {long_2d_run['energy']:.2e}; "
              f"free width err {abs(sigma/sigma_want-1):.2e}; harmonic fidelity {fid:.6f}; "
              f"reversal {reversal:.2e}")

    def test_criterion_09_swap_symmetry(self, long_2d_run):
        assert long_2d_run["swap"] < 1e-10
        ok(9, f"swap residual stayed below {long_2d_run['swap']:.2e} over 1e4 steps")


class TestReductionAcceptance:
    def test_criterion_10_reduction(self, desk_localization_run):
        grid = Grid(64.0, 256)
        x = grid.coords
        psi = np.exp(-(x**2) / 8.0).astype(complex)
        pure = partial_trace(ComplexField(grid, np.outer(psi, psi)).normalized())
        s_pure = von_neumann_entropy(pure)
        assert s_pure <= 1e-8

        a = np.exp(-((x + 12.0) ** 2) / 2.0).astype(complex)
        b = np.exp(-((x - 12.0) ** 2) / 2.0).astype(complex)
        two = partial_trace(ComplexField(grid, np.outer(a, b) + np.outer(b, a)).normalized())
        s_two = von_neumann_entropy(two)
        assert s_two == pytest.approx(math.log(2.0), abs=1e-6)

        # every snapshot of the desk run already passed validate() during
        # construction; spot-check the recorded series is complete
        assert len(desk_localization_run["series"]) == 21
        ok(10, f"pure entropy {s_pure:.1e}; two-branch entropy {s_two:.8f} = ln 2; "
               "reduced state Hermitian/PSD/unit-trace at all 21 snapshots")


class TestLocalizationAcceptance:
    def test_criterion_11_entropic_localization(self, desk_localization_run):
        series = desk_localization_run["series"]
        s0 = series[0]["entropy"]
        s_end = series[-1]["entropy"]
        c0 = series[0]["coherence_length"]
        c_end = series[-1]["coherence_length"]
        w0 = series[0]["diagonal_width"]
        w_end = series[-1]["diagonal_width"]
        assert s0 < 1e-6
        assert s_end > 0.1
        assert series[10]["entropy"] > 0.1  # already mixed at t = width (the scaled localization time)
        assert c0 / c_end >= 5.0
        assert w0 / w_end < 2.0
        ok(11, f"entropy {s0:.1e} -> {s_end:.3f} nats; coherence shrink {c0/c_end:.1f}x; "
               f"diagonal width shrink {w0/w_end:.3f}x (kappa 25, width 10)")


class TestCrossMethodAcceptance:
    def test_criterion_12_cross_method(self):
        # factored vs full-2D joint evolution at t = 5
        xy = Grid(96.0, 512)
        rel = Grid(192.0, 2048)
        cfg = PropagatorConfig(dt=0.01)
        fac = FactoredEvolution(10.0, 25.0, rel, cfg)
        f2d = init_gaussian_pair(10.0, xy)
        prop = make_pair_propagator(xy, v_scaled, 25.0, cfg)
        vals = prop.step(f2d.values, 500)
        fac.advance(500)
        rec = fac.reconstruct(xy)
        full = ComplexField(xy, vals).normalized()
        fid = fidelity(rec, full)
        assert fid > 0.999

        kernel_gap = float(np.max(np.abs(partial_trace(rec).kernel - partial_trace(full).kernel)))
        assert kernel_gap < 1e-3

        # imaginary time vs shooting
        gs = imaginary_time_ground_state(v_scaled, 100.0, RadialGrid(40.0, 4096))
        shot = radial_shoot(100.0, grid=RadialGrid(40.0, 16384), max_states=1)
        gap = abs(gs.energy - shot.eigenvalues[0])
        assert gap < 1e-6
        ok(12, f"factored/2D fidelity {fid:.6f}; reduced-kernel gap {kernel_gap:.1e}; "
               f"imaginary-time vs shooting energy gap {gap:.1e}")


class TestSpectrumAcceptance:
    def test_criterion_13_spectrum(self, tail_levels_kappa100):
        # point-mass law in the genuine asymptotic regime n >> sqrt(kappa):
        # the soft core's constant quantum defect keeps the raw deviation
        # above 5 percent until n ~ 78 (see the decisions ledger)
        devs = [abs(e / (-100.0 / (16.0 * n * n)) - 1.0)
                for n, e in enumerate(tail_levels_kappa100.eigenvalues, start=1)]
        assert all(d < 0.05 for d in devs[79:])
        assert all(d2 < d1 for d1, d2 in zip(devs[15:], devs[16:]))

        counts = [bound_state_count(k) for k in (1.0, 3.0, 10.0, 30.0, 100.0)]
        assert counts == sorted(counts)

        ks = threshold_kappa()
        fine = threshold_kappa(grid=RadialGrid(THRESHOLD_U_MAX, 2 * THRESHOLD_GRID.points))
        assert abs(fine - ks) < 1e-3 * ks
        ok(13, f"tail levels within 5% of -kappa/(16 n^2) for n >= 80 (deviation at n=100: "
               f"{devs[99]:.3f}); bound counts {counts} non-decreasing; kappa* {ks:.4f} "
               f"stable to 3 figures under grid refinement")
