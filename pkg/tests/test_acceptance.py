"""Acceptance criteria 1 to 7, one PASS/FAIL line each.

Tolerances and sizes are pinned here; they are not derived from the code
under test. Run ``pytest tests/test_acceptance.py -v`` (lines are printed
even without ``-s``).
"""

import time

import numpy as np
import pytest

from icap import regimes, verify
from icap.regimes import ContractionWitness, RiccatiCertificate

pytestmark = pytest.mark.acceptance

REFERENCE_TOL = 1e-3
EXAMPLES_BUDGET_S = 1.0
GRID_N = 20
GRID_BAND = 1e-6
GRID_BUDGET_S = 5.0
LEMMA_N = 500
RICCATI_N = 200
RICCATI_BAND = 0.02
LEMMA_BUDGET_S = 60.0
RADIUS_N = 100
RADIUS_SAMPLES = 100_000
RADIUS_BELOW = 1e-6
RADIUS_ABOVE = 1e-3
WATERFILL_N = 50
KKT_TOL = 1e-9
BOUND_N = 50
BOUND_TOL = 1e-9
HEURISTIC_TOL = 1e-3

PRINTED = {
    1: {"R1 max": 1.3863, "R2 max": 1.3863},
    2: {"R1 max": 1.6770, "R2 max": 1.8636, "R1+R2 max": 3.2812},
    3: {"sum capacity": 5.6622},
    4: {"sum capacity": 7.7171, "beamforming TIN sum rate": 9.9162},
    5: {
        "sum capacity": 5.9541,
        "radius(Phi1)": 0.4614,
        "radius(Phi2)": 0.1822,
        "S1bar[1] (power form)": 2.0922,
        "S1bar[2] (power form)": 3.3021,
        "S1bar[3] (power form)": 2.6057,
        "sum capacity (power form)": 6.1066,
    },
}


def _line(capsys, criterion, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")


@pytest.fixture(scope="module")
def runs():
    """Suite results shared by criterion 4 (witnesses produced during criteria 1 to 3)."""
    return {}


def test_criterion_1_examples(capsys, runs):
    t0 = time.perf_counter()
    reports = {n: verify.run_example(n) for n in range(1, 6)}
    elapsed = time.perf_counter() - t0
    runs["examples"] = reports
    problems = []
    for n, printed in PRINTED.items():
        got = {q.name: q.computed for q in reports[n].quantities}
        for name, value in printed.items():
            if name not in got:
                problems.append(f"Ex.{n} {name} missing")
            elif abs(got[name] - value) > REFERENCE_TOL:
                problems.append(f"Ex.{n} {name}: computed {got[name]:.6f}, reference {value}")
        problems += [f"Ex.{n} {f}" for f in reports[n].failures if not any(p.endswith(f) for p in problems)]
    problems = list(dict.fromkeys(problems))
    ok = not problems and elapsed < EXAMPLES_BUDGET_S
    detail = f"5 examples in {elapsed:.2f} s" + ("" if not problems else "; " + "; ".join(problems))
    _line(capsys, 1, ok, detail)
    assert not problems, problems
    assert elapsed < EXAMPLES_BUDGET_S


def test_criterion_2_scalar_grid(capsys, runs):
    res = verify.scalar_grid_suite(n=GRID_N, band=GRID_BAND)
    runs["scalar_grid"] = res
    ok = res.agreed == res.total and res.total > 0 and res.seconds < GRID_BUDGET_S
    _line(capsys, 2, ok, res.line())
    assert res.total > 0 and res.agreed == res.total, res.failures[:3]
    assert res.seconds < GRID_BUDGET_S


def test_criterion_3_lemma_oracles(capsys, runs):
    pd = verify.pd_suite(n=LEMMA_N)
    li = verify.leftinv_suite(n=LEMMA_N)
    ri = verify.riccati_suite(n=RICCATI_N)
    runs["lemma_riccati"] = ri
    total_s = pd.seconds + li.seconds + ri.seconds
    counted = ri.total - ri.excluded
    ok = (pd.agreed == pd.total == LEMMA_N and li.agreed == li.total == LEMMA_N
          and ri.agreed == ri.total == RICCATI_N and total_s < LEMMA_BUDGET_S)
    _line(capsys, 3, ok, f"pd {pd.agreed}/{pd.total}, leftinv {li.agreed}/{li.total}, "
                         f"riccati {ri.agreed}/{ri.total} ({counted} outside the band), {total_s:.1f} s")
    assert pd.agreed == pd.total == LEMMA_N, pd.failures[:3]
    assert li.agreed == li.total == LEMMA_N, li.failures[:3]
    assert ri.agreed == ri.total == RICCATI_N, ri.failures[:3]
    assert total_s < LEMMA_BUDGET_S


def _recheck(w, inst):
    if isinstance(w, ContractionWitness):
        return w.reverify()
    if isinstance(w, RiccatiCertificate):
        return w.reverify(inst)["ok"]
    if isinstance(w, tuple):
        return all(_recheck(x, inst) for x in w)
    return True


def test_criterion_4_witness_reverification(capsys, runs):
    checked = ok_count = 0
    for n in range(1, 6):
        for name in (f"ex{n}",) + (("ex5_power",) if n == 5 else ()):
            inst = verify.load_fixture(name)
            for v in regimes.classify(inst).verdicts.values():
                if v.satisfied and v.witness is not None:
                    checked += 1
                    ok_count += bool(_recheck(v.witness, inst) and regimes.reverify_witness(v, inst))
    for key, fn in (("scalar_grid", lambda: verify.scalar_grid_suite(n=GRID_N)),
                    ("lemma_riccati", lambda: verify.riccati_suite(n=RICCATI_N))):
        res = runs.get(key) or fn()
        checked += res.witnesses
        ok_count += res.witnesses_ok
    ok = checked > 0 and ok_count == checked
    _line(capsys, 4, ok, f"{ok_count}/{checked} witnesses re-verified")
    assert checked > 0 and ok_count == checked


def test_criterion_5_numerical_radius(capsys):
    res = verify.radius_suite(n=RADIUS_N, samples=RADIUS_SAMPLES)
    low, high = res.extra["max_oracle_excess"], res.extra["max_radius_excess"]
    ok = res.agreed == res.total == RADIUS_N and low <= RADIUS_BELOW and high <= RADIUS_ABOVE
    _line(capsys, 5, ok, f"{res.agreed}/{res.total}; oracle above radius by at most {low:.1e}, "
                         f"radius above oracle by at most {high:.1e}")
    assert res.agreed == res.total == RADIUS_N, res.failures[:3]
    assert low <= RADIUS_BELOW and high <= RADIUS_ABOVE


def test_criterion_6_waterfill_kkt(capsys):
    res = verify.waterfill_suite(n=WATERFILL_N)
    worst = res.extra["worst"]
    ok = (res.agreed == res.total == WATERFILL_N
          and worst["level_spread"] <= KKT_TOL and worst["fw_gap"] <= KKT_TOL)
    _line(capsys, 6, ok, f"{res.agreed}/{res.total}; level spread {worst['level_spread']:.1e}, "
                         f"first-order gap {worst['fw_gap']:.1e}")
    assert res.agreed == res.total == WATERFILL_N, res.failures[:3]
    assert worst["level_spread"] <= KKT_TOL and worst["fw_gap"] <= KKT_TOL


def test_criterion_7_bound_consistency(capsys):
    res = verify.bound_suite(n=BOUND_N)
    obj, heur = res.extra["max_objective_error"], res.extra["max_heuristic_error"]
    ok = res.agreed == res.total and obj <= BOUND_TOL and heur <= HEURISTIC_TOL
    _line(capsys, 7, ok, f"{res.agreed}/{res.total}; objective error {obj:.1e}, heuristic error {heur:.1e}")
    assert res.agreed == res.total, res.failures[:3]
    assert obj <= BOUND_TOL and heur <= HEURISTIC_TOL
    assert res.witnesses_ok == res.witnesses


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
