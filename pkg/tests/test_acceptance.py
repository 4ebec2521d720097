"""Acceptance suite: one test per headline criterion, each printing a
PASS/FAIL line.  Run with `pytest tests/test_acceptance.py -v -s`.

The sweeps are seeded and sized as stated in each test; tolerances are
pinned here, not computed from observed behavior.
"""

import math

import numpy as np
import pytest

import dnls_lab as dl
from dnls_lab import GaugeFrame, SimConfig

FOUR_PI = 4.0 * math.pi
LINE_GRID = dl.make_grid(20 * math.pi, 2048)
PROBE_GRID = dl.make_grid(math.pi, 16384)
SWEEP_SEED = 42
SWEEP_TRIALS = 10_000


def report(name: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def reference_gauged_datum():
    return dl.gauge_forward(dl.gaussian_field(LINE_GRID))


@pytest.fixture(scope="module")
def conservation_runs(reference_gauged_datum):
    """Gauged evolutions of G(exp(-x^2)) to t = 1 for the pinned dt set."""
    runs = {}
    for dt in (4e-4, 2e-4, 1e-4):
        cfg = SimConfig(
            dt=dt,
            t_end=1.0,
            frame=GaugeFrame.GAUGED,
            record_stride=max(1, round(0.02 / dt)),
        )
        runs[dt] = dl.evolve(reference_gauged_datum, cfg)
    return runs


def max_drifts(traj):
    d = traj.diagnostics
    return {
        "M": float(d["mass_drift_rel"].max()),
        "P": float(d["momentum_drift_rel"].max()),
        "E": float(d["energy_drift_rel"].max()),
    }


def test_c01_sharp_constant_identities():
    c18 = dl.SHARP.c_gn ** (-18.0)
    argmax, fmax = dl.cubic_f_max()
    ok = (
        abs(c18 - 4.0 * math.pi**2 / 27.0) < 1e-12
        and abs(argmax - 3.0 / (8.0 * math.pi)) < 1e-12
        and abs(fmax - 1.0 / (64.0 * math.pi)) < 1e-12
    )
    xs = np.arange(0.0, 1.0, 1e-6)
    scan = float(np.max(dl.cubic_f(xs)))
    ok = ok and abs(scan - fmax) < 1e-11
    report(
        "c01 sharp-constants",
        ok,
        f"C^-18 err {abs(c18 - 4 * math.pi ** 2 / 27):.2e}, scan err {abs(scan - fmax):.2e}",
    )


def test_c02_gn_inequality_suites():
    g = dl.gaussian_field(LINE_GRID)
    sextic = dl.check_gn_sextic(g)
    interp = dl.check_gn_interp(g)
    witness_ok = (
        abs(sextic.lhs - math.sqrt(math.pi / 6.0)) < 1e-8
        and abs(interp.lhs - (math.pi / 6.0) ** (1.0 / 12.0)) < 1e-8
    )
    violations = 0
    worst = math.inf
    for trial in range(SWEEP_TRIALS):
        rng = np.random.default_rng([SWEEP_SEED, trial])
        f = dl.random_decaying_field(LINE_GRID, rng)
        for rep in (dl.check_gn_sextic(f), dl.check_gn_interp(f)):
            if rep.slack < -1e-8 * rep.rhs:
                violations += 1
            worst = min(worst, rep.slack / max(rep.rhs, 1e-300))
    report(
        "c02 gn-suites",
        witness_ok and violations == 0,
        f"{SWEEP_TRIALS} trials, {violations} violations, worst slack/rhs {worst:.3e}",
    )


def test_c03_apriori_lemma_sweeps():
    counts = {k: 0 for k in ("momentum-lower", "modulation", "l4-bound", "kinetic", "h1-bound")}
    step = math.pi / LINE_GRID.half_length
    for trial in range(SWEEP_TRIALS):
        rng = np.random.default_rng([SWEEP_SEED + 1, trial])
        free = dl.random_decaying_field(
            LINE_GRID, rng, target_mass=rng.uniform(0.1, 8.0 * math.pi)
        )
        if not dl.momentum_lower_bound(free).satisfied:
            counts["momentum-lower"] += 1
        if not dl.kinetic_l4_bound(free).satisfied:
            counts["kinetic"] += 1
        alpha = float(rng.integers(-200, 201)) * step
        if dl.phase_modulation_residual(free, alpha) > 1e-10:
            counts["modulation"] += 1

        sub = dl.random_decaying_field(
            LINE_GRID, rng, target_mass=rng.uniform(0.1, 0.95 * FOUR_PI)
        )
        l2 = dl.lp_norm(sub, 2.0)
        p = dl.momentum_gauged(sub)
        e = dl.energy_gauged(sub)
        l4b = dl.l4_bound(l2, p, e)
        if dl.lp_norm(sub, 4.0) ** 8 - l4b > 1e-10 * max(1.0, l4b):
            counts["l4-bound"] += 1
        h1b = dl.h1_bound(l2, p, e)
        if dl.lp_norm(dl.derivative(sub), 2.0) ** 2 - h1b > 1e-9 * max(1.0, h1b):
            counts["h1-bound"] += 1
    total = sum(counts.values())
    report("c03 lemma-sweeps", total == 0, f"{SWEEP_TRIALS} trials per check, violations {counts}")


def test_c04_conservation_under_flow(conservation_runs):
    drifts_fine = max_drifts(conservation_runs[1e-4])
    below = all(v < 1e-6 for v in drifts_fine.values())

    # Fourth-order reduction.  At the pinned dt set the drifts of this datum
    # sit at the roundoff floor (~1e-13), so each refinement must either show
    # the 2^4 reduction or land under an explicit machine allowance of 1e-12.
    floor = 1e-12
    consistent = True
    series = [max(max_drifts(conservation_runs[dt]).values()) for dt in (4e-4, 2e-4, 1e-4)]
    for big, small in zip(series, series[1:]):
        consistent = consistent and (small <= big / 10.0 or small <= floor)

    # The order itself is measured where the signal is resolvable: same datum
    # and horizon, coarser steps.
    coarse = {}
    with pytest.warns(UserWarning):
        for dt in (8e-3, 4e-3, 2e-3):
            cfg = SimConfig(
                dt=dt, t_end=1.0, frame=GaugeFrame.GAUGED, record_stride=max(1, round(0.04 / dt))
            )
            run = dl.evolve(dl.gauge_forward(dl.gaussian_field(LINE_GRID)), cfg)
            coarse[dt] = max_drifts(run)["P"]
    slope = float(
        np.polyfit(np.log([8e-3, 4e-3, 2e-3]), np.log([coarse[dt] for dt in (8e-3, 4e-3, 2e-3)]), 1)[0]
    )
    order_ok = 3.2 <= slope <= 5.0
    report(
        "c04 conservation",
        below and consistent and order_ok,
        f"drifts@1e-4 {drifts_fine}, floor-consistency {consistent}, order slope {slope:.2f}",
    )


def test_c05_plane_wave_regression():
    grid = dl.make_grid(math.pi, 64)
    amplitude, xi0 = 0.5, 2.0
    omega = xi0**2 - amplitude**2 * xi0
    cfg = SimConfig(dt=1e-3, t_end=1.0, frame=GaugeFrame.ORIGINAL, record_stride=10**9)
    traj = dl.evolve(dl.plane_wave_field(grid, amplitude, xi0), cfg)
    exact = amplitude * np.exp(1j * (xi0 * grid.nodes - omega * 1.0))
    err = float(np.max(np.abs(traj.final_field.samples - exact)))
    report("c05 plane-wave", err < 1e-8, f"sup error {err:.3e} at t=1, dt=1e-3")


def test_c06_gauge_consistency(reference_gauged_datum):
    u0 = dl.gaussian_field(LINE_GRID)
    dt = 1e-3
    u1 = dl.evolve(
        u0, SimConfig(dt=dt, t_end=1.0, frame=GaugeFrame.ORIGINAL, record_stride=10**9)
    ).final_field
    v1 = dl.evolve(
        reference_gauged_datum,
        SimConfig(dt=dt, t_end=1.0, frame=GaugeFrame.GAUGED, record_stride=10**9),
    ).final_field
    dynamic = float(np.max(np.abs(dl.gauge_forward(u1).samples - v1.samples)))

    worst_rt = 0.0
    worst_corr = 0.0
    for trial in range(1000):
        rng = np.random.default_rng([SWEEP_SEED + 2, trial])
        u = dl.random_decaying_field(LINE_GRID, rng, frame=GaugeFrame.ORIGINAL)
        v = dl.gauge_forward(u)
        back = dl.gauge_inverse(v)
        scale = max(1.0, float(np.max(np.abs(u.samples))))
        worst_rt = max(worst_rt, float(np.max(np.abs(back.samples - u.samples))) / scale)
        a, b = dl.conserved_set(u), dl.conserved_set(v)
        for x, y in ((a.mass, b.mass), (a.momentum, b.momentum), (a.energy, b.energy)):
            worst_corr = max(worst_corr, abs(x - y) / max(1.0, abs(x)))
    ok = dynamic < 1e-4 and worst_rt < 1e-12 and worst_corr < 1e-8
    report(
        "c06 gauge-consistency",
        ok,
        f"dynamic {dynamic:.3e}, roundtrip {worst_rt:.3e}, correspondence {worst_corr:.3e}",
    )


def test_c07_i_operator_layer():
    cutoffs = [16.0, 64.0, 256.0, 1024.0]
    lattice_ok = True
    xi = np.abs(PROBE_GRID.frequencies)
    for cutoff in cutoffs:
        m = dl.make_multiplier(cutoff, PROBE_GRID)
        lattice_ok = lattice_ok and bool(
            np.all(m.values > 0)
            and np.all(m.values <= 1)
            and np.all(m.values[xi <= cutoff] == 1.0)
            and np.allclose(
                m.values[xi >= 2 * cutoff], np.sqrt(cutoff / xi[xi >= 2 * cutoff]), atol=0
            )
        )
    fields = dl.probe_field_suite(PROBE_GRID, np.random.default_rng(SWEEP_SEED + 3), 100)
    contraction_ok = True
    for f in fields:
        norm = dl.lp_norm(f, 2.0)
        for cutoff in cutoffs:
            m = dl.make_multiplier(cutoff, PROBE_GRID)
            contraction_ok = contraction_ok and dl.lp_norm(dl.apply_I(f, m), 2.0) <= norm * (
                1 + 1e-13
            )
    opnorm = dl.operator_norm_study(fields, cutoffs)
    commutator = dl.momentum_commutator_study(fields, cutoffs)
    opnorm_ok = (
        max(opnorm.sup_lower.values()) <= 4.0
        and max(opnorm.sup_upper.values()) <= 4.0
        and abs(opnorm.slope_lower) <= 0.05
        and abs(opnorm.slope_upper) <= 0.05
    )
    commutator_ok = (
        max(commutator.sup_ratio.values()) <= 4.0
        and commutator.slope <= 0.05
        and commutator.recombination_error < 1e-10
    )
    report(
        "c07 i-operator",
        lattice_ok and contraction_ok and opnorm_ok and commutator_ok,
        f"opnorm slopes ({opnorm.slope_lower:.3f}, {opnorm.slope_upper:.3f}), "
        f"commutator slope {commutator.slope:.3f}, recombination {commutator.recombination_error:.2e}",
    )


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_c08_modified_energy_drift_study():
    grid = dl.make_grid(10 * math.pi, 1024)
    v0 = dl.gauge_forward(dl.gaussian_field(grid, amplitude=1.6))
    cfg = SimConfig(dt=4e-3, t_end=1.0, frame=GaugeFrame.GAUGED, record_stride=25)
    study = dl.modified_energy_drift_study(v0, [64.0, 128.0, 256.0], 1.0, cfg, lambda_scale=1 / 64)
    drifts = [row.drift for row in study.rows]
    monotone = all(b < a for a, b in zip(drifts, drifts[1:]))
    report(
        "c08 energy-drift",
        monotone,
        "drift by cutoff: " + ", ".join(f"N={r.cutoff:.0f}: {r.drift:.3e}" for r in study.rows),
    )


def test_c09_gwp_budget():
    b = dl.gwp_budget(math.sqrt(math.pi), 1.0, 10.0, 0.125)
    gamma_ok = abs(b.gamma0 - math.sqrt(1.0 + FOUR_PI)) < 1e-12
    invariants_ok = True
    rng = np.random.default_rng(SWEEP_SEED + 4)
    for _ in range(50):
        bb = dl.gwp_budget(
            math.sqrt(rng.uniform(0.01, 0.95 * FOUR_PI)),
            rng.uniform(0.2, 5.0),
            rng.uniform(0.5, 5000.0),
            rng.uniform(0.02, 0.24),
        )
        invariants_ok = invariants_ok and (
            100.0 * bb.gamma0 * bb.eps0 < 1.0 and bb.guaranteed_time >= bb.target_time
        )
    times = np.geomspace(1.0, 1e4, 9)
    cutoffs = [dl.gwp_budget(math.sqrt(math.pi), 1.0, float(t), 0.125).cutoff for t in times]
    slope = float(np.polyfit(np.log(times), np.log([float(c) for c in cutoffs]), 1)[0])
    slope_ok = abs(slope - 4.0) <= 0.08  # criterion: fitted exponent within 2%
    report(
        "c09 gwp-budget",
        gamma_ok and invariants_ok and slope_ok,
        f"gamma0 err {abs(b.gamma0 - math.sqrt(1 + FOUR_PI)):.2e}, exponent {slope:.4f}",
    )


def test_c10_dynamical_apriori_ceiling(conservation_runs):
    worst = 0.0
    checked = 0

    def scan(traj):
        nonlocal worst, checked
        d = traj.diagnostics
        for i in range(len(traj.times)):
            bound = dl.h1_bound(math.sqrt(d["mass"][i]), d["momentum"][i], d["energy"][i])
            if bound > 0:
                worst = max(worst, d["h1_seminorm"][i] ** 2 / bound)
                checked += 1

    scan(conservation_runs[1e-4])
    for trial in range(2):
        rng = np.random.default_rng([SWEEP_SEED + 5, trial])
        v0 = dl.random_decaying_field(
            LINE_GRID, rng, target_mass=rng.uniform(1.0, 0.9 * FOUR_PI)
        )
        traj = dl.evolve(
            v0, SimConfig(dt=2e-4, t_end=0.2, frame=GaugeFrame.GAUGED, record_stride=50)
        )
        assert not traj.aborted
        scan(traj)
    report(
        "c10 apriori-ceiling",
        worst <= 1.0 + 1e-6,
        f"max ||v_x||^2 / bound = {worst:.4f} over {checked} records",
    )
