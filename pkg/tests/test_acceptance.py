"""Acceptance criteria; one PASS/FAIL line per criterion is printed after the run.

Run standalone with ``python tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from gaussqi import cli, specfun
from gaussqi.asymmetric import (
    advantage_ratio,
    coherent_stein_quantities,
    stein_quantities_asymptotic,
    stein_quantities_exact,
    roc_gen,
)
from gaussqi.classical import ClassicalRocParams, homodyne_roc, marcum_roc
from gaussqi.scenario import (
    ChannelSpec,
    LinkBudget,
    SourceSpec,
    c_quantum,
    c_separable,
    correlation_of_p,
    hypothesis_pair_coherent,
    hypothesis_pair_generic,
    planck_occupation,
    snr,
)
from gaussqi.symmetric import advantage_threshold, appendix_fit, closed_form_error_bounds, qbb


def _finish(crit):
    assert crit.passed, crit.line()


def test_factor_four_exponent(criterion):
    crit = criterion(1, "factor-4 exponent")
    start = time.perf_counter()
    n_s, n_b, kappa = 1e-3, 1e3, 1e-4
    closed = closed_form_error_bounds(n_s, n_b, kappa, 1.0, c_quantum(n_s))
    ratio_closed = closed["tmsv"].exponent_per_copy / closed["cs"].exponent_per_copy
    crit.check("closed_form_ratio", ratio_closed == 4.0, f"{ratio_closed:.15g}")
    channel = ChannelSpec(kappa, n_b)
    tmsv = qbb(hypothesis_pair_generic(SourceSpec.generic(n_s, c_quantum(n_s)), channel))
    coh = qbb(hypothesis_pair_coherent(n_s, channel))
    ratio = tmsv.exponent_per_copy / coh.exponent_per_copy
    crit.check("exact_qbb_ratio_within_2pct", abs(ratio / 4.0 - 1.0) <= 0.02, f"{ratio:.6f}")
    elapsed = time.perf_counter() - start
    crit.check("runtime_lt_1s", elapsed < 1.0, f"{elapsed:.3f}s")
    _finish(crit)


def test_appendix_fit(criterion):
    crit = criterion(2, "appendix g_C fit")
    start = time.perf_counter()
    for n_s, n_b in ((1e-2, 20.0), (1e-4, 200.0)):
        cq = c_quantum(n_s)
        rows = appendix_fit(n_s, n_b, np.linspace(cq / 10, cq, 10))
        ratios = [r.g_fitted / r.g_model for r in rows]
        worst = max(abs(x - 1.0) for x in ratios)
        crit.check(f"ratio_in_[0.99,1.01]@Ns={n_s:g}",
                   all(0.99 <= x <= 1.01 for x in ratios), f"max|r-1|={worst:.2e}")
    elapsed = time.perf_counter() - start
    crit.check("runtime_lt_10s", elapsed < 10.0, f"{elapsed:.2f}s")
    _finish(crit)


def test_advantage_threshold(criterion):
    crit = criterion(3, "advantage threshold")
    n_s, n_b, kappa = 1e-3, 1e3, 1e-4
    c_half = 0.5 * math.sqrt(n_s * (n_s + 1.0))
    b = closed_form_error_bounds(n_s, n_b, kappa, 1.0, c_half)
    gen, cs = b["gen"].exponent_per_copy, b["cs"].exponent_per_copy
    crit.check("closed_form_gen_eq_cs", abs(gen - cs) <= 4 * np.finfo(float).eps * cs,
               f"{gen:.17g} vs {cs:.17g}")
    crit.check("threshold_c_min", advantage_threshold(n_s)["c_min"] == pytest.approx(c_half),
               f"{advantage_threshold(n_s)['c_min']:.6e}")
    for ns_fit, nb_fit in ((1e-2, 20.0), (1e-4, 200.0)):
        cq = c_quantum(ns_fit)
        g = appendix_fit(ns_fit, nb_fit, [0.5 * cq])[0].g_fitted
        crit.check(f"g_at_half_Cq@Ns={ns_fit:g}", abs(g - 0.25) <= 0.005, f"{g:.6f}")
    boundary = brentq(lambda n: 0.5 * c_quantum(n) - c_separable(n), 0.05, 5.0, xtol=1e-15)
    crit.check("separable_boundary_1/3", abs(boundary - 1.0 / 3.0) < 1e-12,
               f"{boundary:.15f}")
    feasible = (advantage_threshold(1.0 / 3.0)["separable_feasible"]
                and not advantage_threshold(1.0 / 3.0 - 1e-9)["separable_feasible"])
    crit.check("separable_feasible_flag", feasible, feasible)
    _finish(crit)


def test_fig1_ratio(criterion):
    crit = criterion(4, "advantage-ratio curve")
    a_q, a_d = advantage_ratio(c_quantum(1.0), 1.0), advantage_ratio(c_separable(1.0), 1.0)
    crit.check("A(Cq,1)=2ln2", abs(a_q - 2 * math.log(2)) < 1e-12, f"{a_q:.15f}")
    crit.check("A(Cd,1)=ln2", abs(a_d - math.log(2)) < 1e-12, f"{a_d:.15f}")
    a_q20, a_d20 = advantage_ratio(c_quantum(20.0), 20.0), advantage_ratio(c_separable(20.0), 20.0)
    gap = abs(a_q20 - a_d20) / max(a_q20, a_d20)
    crit.check("within_5pct@Ns=20", gap <= 0.05, f"{gap:.4f}")
    a_q3, a_d3 = advantage_ratio(c_quantum(1e3), 1e3), advantage_ratio(c_separable(1e3), 1e3)
    crit.check("to_1_within_1pct@Ns=1e3", abs(a_q3 - 1) < 0.01 and abs(a_d3 - 1) < 0.01,
               f"{a_q3:.5f},{a_d3:.5f}")
    _finish(crit)


def _dominance(preset, p):
    values = cli.ROC_PRESETS[preset]
    link = LinkBudget(values["freq_hz"], values["temp_k"], values["area_m2"], values["range_m"])
    n_s, m = values["n_s"], values["m"]
    c = correlation_of_p(n_s, p)
    grid = cli._pfa_grid(1e-6, 400)
    grid = grid[(grid >= 1e-3) & (grid <= 0.5)]
    params = ClassicalRocParams(m, link.kappa, n_s, link.n_b)
    losing = [x for x in grid
              if roc_gen(x, m, n_s, c, link.kappa, link.n_b).log_p_md
              >= homodyne_roc(x, params).log_p_md]
    return losing, grid.size


def test_fig2_regime(criterion):
    crit = criterion(5, "ROC regime")
    n_b = planck_occupation(1e9, 290.0)
    crit.check("planck_in_[5.8e3,6.3e3]", 5.8e3 <= n_b <= 6.3e3, f"{n_b:.2f}")
    link = LinkBudget(1e9, 290.0, 0.1, 1.0)
    crit.check("kappa_1pct", abs(link.kappa / 6.33e-4 - 1) <= 0.01, f"{link.kappa:.5e}")
    gamma_db = snr(link.kappa, 1.0, link.n_b)["gamma_db"]
    crit.check("gamma_db_0.2dB", abs(gamma_db + 69.8) <= 0.2, f"{gamma_db:.3f}")
    for preset, p in (("fig2a", 1 / 6), ("fig2b", 0.5)):
        losing, total = _dominance(preset, p)
        detail = (f"homodyne better on {len(losing)}/{total} points up to p_fa={max(losing):.3g}"
                  if losing else f"dominates on {total} points")
        crit.check(f"p={p:.3g}_dominates_homodyne_{preset}", not losing, detail)
    start = time.perf_counter()
    for preset in ("fig2a", "fig2b"):
        args = cli.build_parser().parse_args(["roc", "--preset", preset, "--points", "400"])
        table = cli.run_roc(args)
    elapsed = time.perf_counter() - start
    crit.check("runtime_lt_30s", elapsed < 30.0 and len(table.rows) == 400, f"{elapsed:.2f}s")
    _finish(crit)


def test_exact_vs_asymptotic_stein(criterion):
    crit = criterion(6, "exact vs asymptotic Stein")
    worst = 0.0
    for n_s in (1e-3, 0.1, 1.0, 10.0):
        for kappa in (1e-4, 1e-2, 0.5):
            for n_b in (0.1, 1.0, 1e2, 1e4):
                exact = stein_quantities_exact(hypothesis_pair_coherent(n_s, ChannelSpec(kappa, n_b)))
                ref = coherent_stein_quantities(n_s, kappa, n_b)
                worst = max(worst, abs(exact.d / ref.d - 1.0))
    crit.check("coherent_D_1e-10", worst < 1e-10, f"{worst:.2e}")
    n_s, kappa = 1e-2, 1e-2
    n_bs = [1e2 * 2 ** k for k in range(5)]
    for label, c in (("C_q", c_quantum(n_s)), ("C_d", c_separable(n_s))):
        gaps = []
        for n_b in n_bs:
            pair = hypothesis_pair_generic(SourceSpec.generic(n_s, c), ChannelSpec(kappa, n_b))
            exact = stein_quantities_exact(pair)
            asym = stein_quantities_asymptotic(n_s, c, kappa, n_b)
            gaps.append((abs(exact.d - asym.d) / exact.d, abs(exact.v - asym.v) / exact.v))
        gaps = np.array(gaps)
        halving = gaps[:-1] / gaps[1:]
        ok = bool(np.all(np.abs(halving - 2.0) <= 0.4))
        crit.check(f"gap_halves_{label}", ok,
                   f"ratios in [{halving.min():.4f}, {halving.max():.4f}]")
    _finish(crit)


@pytest.mark.slow
def test_oracle_equivalence(criterion):
    crit = criterion(7, "oracle equivalence")
    start = time.perf_counter()
    grid = cli.ORACLE_GRID
    tasks = cli.oracle_tasks(grid["n_s"], grid["n_b"], grid["kappa"])
    reports = [cli._oracle_instance(t) for t in tasks]
    elapsed = time.perf_counter() - start
    errors = [r for r in reports if "deviations" not in r]
    crit.check("all_instances_built", not errors, f"{len(reports) - len(errors)}/{len(reports)}")
    good = [r for r in reports if "deviations" in r]
    for key, tol in (("c_s", 1e-6), ("d", 1e-5), ("v", 1e-5), ("certificate", 1e-8)):
        worst = max((r["deviations"][key] for r in good), default=math.inf)
        crit.check(f"{key}<{tol:g}", worst < tol, f"{worst:.2e}")
    ordering = all(r["ordering_ok"] for r in good)
    crit.check("helstrom<=qcb<=qbb", ordering, f"{sum(r['ordering_ok'] for r in good)}/{len(good)}")
    crit.check("runtime_lt_5min", elapsed < 300.0, f"{elapsed:.1f}s")
    _finish(crit)


def test_classical_benchmarks(criterion):
    crit = criterion(8, "classical benchmarks")
    grid = np.logspace(-8, math.log10(0.999), 60)
    params = ClassicalRocParams(1e4, 0.0, 0.5, 10.0)
    hom = max(abs(homodyne_roc(x, params).p_md - (1 - x)) for x in grid)
    crit.check("homodyne_kappa0", hom < 1e-10, f"{hom:.2e}")
    mar = max(abs(marcum_roc(x, 0.0).p_md - (1 - x)) for x in grid)
    crit.check("marcum_snr0", mar < 1e-10, f"{mar:.2e}")
    xs = [0.0, 0.1, 1.0, 5.0, 20.0]
    q_x0 = max(abs(specfun.marcum_q1(x, 0.0) - 1.0) for x in xs)
    crit.check("Q(x,0)=1", q_x0 < 1e-12, f"{q_x0:.2e}")
    q_0y = max(abs(specfun.marcum_q1(0.0, y) - math.exp(-0.5 * y * y)) for y in xs)
    crit.check("Q(0,y)=exp(-y^2/2)", q_0y < 1e-12, f"{q_0y:.2e}")
    _finish(crit)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
