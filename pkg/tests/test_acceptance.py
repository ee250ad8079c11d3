"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line through the ``acceptance_report`` fixture;
the lines are printed in an "acceptance criteria" section at the end of the
pytest run.  Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import time
from fractions import Fraction

import pytest

from seymour.analytics import (
    C1,
    C2,
    digraph_expectation_lower,
    digraph_window,
    tournament_expectation_bounds,
)
from seymour.experiments import (
    ExperimentConfig,
    deviation_experiment,
    evolution_dict,
    evolve_experiment,
    exhaustive_tournaments,
    run_digraph_trials,
    run_tournament_trials,
    stats_csv,
    to_json,
    deviation_csv,
)
from seymour.cli import main
from seymour.graph import (
    Triangle,
    eccentricity_at_most_2,
    find_triangle_via_seymour,
    is_directed_triangle,
    seymour_set,
    seymour_set_degree_criterion,
)
from seymour.models import gen_tournament, rng_stream

SEED = 20240601

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def even_run():
    return run_tournament_trials(ExperimentConfig("tournament", 1000, trials=10**4, master_seed=SEED))


@pytest.fixture(scope="module")
def deviation_rows():
    cfg = ExperimentConfig("tournament", (101, 501, 1001), trials=10**4, master_seed=SEED, deviation_A=3.0)
    return {r.n: r for r in deviation_experiment(cfg)}


def test_c1_exhaustive_small_tournaments(acceptance_report):
    start = time.perf_counter()
    mins = {n: exhaustive_tournaments(n).min_s for n in range(1, 8)}
    elapsed = time.perf_counter() - start
    ok = all(m >= 1 for m in mins.values()) and elapsed < 300
    acceptance_report("C1 exhaustive n<=7", ok, f"min |S| by n = {mins}; enumeration took {elapsed:.2f}s")
    assert ok


def test_c2_exact_n3_and_monte_carlo(acceptance_report):
    ex = exhaustive_tournaments(3)
    trials = 10**6
    st = run_tournament_trials(ExperimentConfig("tournament", 3, trials=trials, master_seed=SEED))
    sigma = math.sqrt(float(ex.exact_var_s) / trials)
    z = (st.mean_s - 1.5) / sigma
    ok = ex.exact_e_s == Fraction(3, 2) and ex.histogram == {1: 6, 3: 2} and abs(z) <= 4
    acceptance_report("C2 exact n=3", ok, f"E|S|={ex.exact_e_s}, histogram={ex.histogram}, MC mean={st.mean_s:.5f} (z={z:+.2f})")
    assert ok


def test_c3_expectation_half_n(acceptance_report, even_run):
    n = 1000
    rep = tournament_expectation_bounds(n)
    se = math.sqrt(even_run.var_s / even_run.trials)
    lo, hi = rep.e_s_lower - 4 * se, rep.e_s_upper + 4 * se
    rel = abs(even_run.mean_s / n - 0.5)
    ok = rel < 0.01 and lo <= even_run.mean_s <= hi
    acceptance_report(
        "C3 E|S| ~ n/2",
        ok,
        f"n=1000 mean_s={even_run.mean_s:.4f}, |mean/n-1/2|={rel:.5f}, bounds+4se=[{lo:.4f}, {hi:.4f}]",
    )
    assert ok


def test_c4_variance_parity_split(acceptance_report, even_run, deviation_rows):
    even = even_run.var_s / 1000
    odd = deviation_rows[1001].var_s / 1001
    ratio = odd / even
    even_ok = 0.8 * C1 <= even <= 1.2 * C1
    odd_ok = 0.8 * C2 <= odd <= 1.2 * C2
    ratio_ok = 3.5 <= ratio <= 7.5
    ok = even_ok and odd_ok and ratio_ok
    acceptance_report(
        "C4 variance parity split",
        ok,
        f"Var/n even={even:.4f} in [{0.8 * C1:.3f}, {1.2 * C1:.3f}]: {even_ok}; "
        f"odd={odd:.4f} in [{0.8 * C2:.3f}, {1.2 * C2:.3f}]: {odd_ok}; "
        f"ratio={ratio:.3f} in [3.5, 7.5]: {ratio_ok}",
    )
    assert ok


def test_c5_concentration(acceptance_report, deviation_rows):
    fracs = {n: r.frac_A for n, r in sorted(deviation_rows.items())}
    ok = all(f <= 0.05 for f in fracs.values()) and all(r.trials == 10**4 for r in deviation_rows.values())
    acceptance_report("C5 concentration A=3", ok, f"deviation fraction by n = {fracs}")
    assert ok


def test_c6_all_seymour_digraphs(acceptance_report):
    st = run_digraph_trials(ExperimentConfig("digraph", 2000, p="0.3", trials=200, master_seed=SEED))
    lower = digraph_expectation_lower(2000, "0.3")
    ok = st.frac_all_seymour >= 0.99 and lower > 1999.999
    acceptance_report(
        "C6 all-Seymour digraphs", ok, f"frac_all_seymour={st.frac_all_seymour:.3f}, E|S| lower bound={lower:.9f}"
    )
    assert ok


def test_c7_window_arithmetic(acceptance_report):
    w = digraph_window(10**4, 0.1, 0.1)
    back = abs(2 * w.p_max * math.exp(1 - 2 * w.p_max) - (1 - w.eps_n))
    ok = abs(w.p_min - 0.04398) <= 1e-4 and back < 1e-12 and not w.empty
    acceptance_report("C7 window arithmetic", ok, f"p_min={w.p_min:.7f}, p_max={w.p_max:.10f}, residual={back:.2e}")
    assert ok


def test_c8_degree_criterion_equivalence(acceptance_report):
    detail = {}
    ok = True
    for n in (10, 50, 200):
        checked = mismatches = t = 0
        while checked < 1000:
            g = gen_tournament(n, rng_stream(SEED + 8, n * 10**6 + t))
            t += 1
            if not eccentricity_at_most_2(g):
                continue
            checked += 1
            mismatches += seymour_set_degree_criterion(g) != seymour_set(g)
        detail[n] = f"{mismatches}/{checked} mismatches ({t} drawn)"
        ok = ok and mismatches == 0
    acceptance_report("C8 degree criterion", ok, str(detail))
    assert ok


def test_c9_triangle_construction(acceptance_report):
    found = t = failures = 0
    while found < 1000:
        g = gen_tournament(99, rng_stream(SEED + 9, t))
        t += 1
        if min(g.out_degrees().min(), g.in_degrees().min()) < 33:
            continue
        found += 1
        tri = find_triangle_via_seymour(g)
        if not (isinstance(tri, Triangle) and is_directed_triangle(g, tri)):
            failures += 1
    ok = failures == 0
    acceptance_report("C9 triangle construction", ok, f"{failures} failures on {found} qualifying tournaments ({t} drawn)")
    assert ok


def test_c10_determinism(acceptance_report, tmp_path):
    outputs = []
    for workers in (1, 2):
        tour = run_tournament_trials(ExperimentConfig("tournament", 150, trials=600, master_seed=SEED, workers=workers))
        dig = run_digraph_trials(ExperimentConfig("digraph", 150, p="0.2", trials=300, master_seed=SEED, workers=workers))
        dev = deviation_experiment(
            ExperimentConfig("tournament", (60, 61), trials=1000, master_seed=SEED, deviation_A=1.0, workers=workers)
        )
        outputs.append(
            (stats_csv([tour, dig]), to_json([tour.to_dict(), dig.to_dict()]), deviation_csv(dev))
        )
    outputs.append((to_json(evolution_dict(evolve_experiment(5, 60, 50, SEED))),))
    outputs.append((to_json(evolution_dict(evolve_experiment(5, 60, 50, SEED))),))
    files = []
    for workers in ("1", "2"):
        path = tmp_path / f"mc{workers}.json"
        main(["mc", "--n", "40", "41", "--trials", "500", "--format", "json", "--workers", workers, "-o", str(path)])
        files.append(path.read_bytes())
    ok = outputs[0] == outputs[1] and outputs[2] == outputs[3] and files[0] == files[1]
    acceptance_report("C10 determinism", ok, "CSV/JSON byte-identical across reruns and worker counts 1 vs 2")
    assert ok
