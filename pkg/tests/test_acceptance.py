"""End-to-end acceptance criteria, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
when output capture is on).
"""
import time

import pytest

from forcinglab import verification as vf


@pytest.fixture
def report(capsys):
    def emit(number, ok, summary, seconds):
        with capsys.disabled():
            print(f"\ncriterion {number:>2}: {'PASS' if ok else 'FAIL'}  {summary}  [{seconds:.1f}s]")

    return emit


def timed(fn, *args, **kwargs):
    t = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t


def test_criterion_01_density(report):
    rep, secs = timed(vf.density_campaign, vf.fragment_f0())
    ok = rep.verdict == "PASS" and secs < 60
    report(1, ok, f"density on F0, {rep.counts['cases']} cases, {len(rep.counterexamples)} failures", secs)
    assert rep.verdict == "PASS", rep.counterexamples[:3]
    assert secs < 60


def test_criterion_02_criticality(report):
    rep, secs = timed(vf.criticality_campaign, vf.fragment_f1())
    rejected = all(v == 1 for k, v in rep.counts.items() if k.startswith("forbidden_rejected_"))
    ok = rep.verdict == "PASS" and rejected and secs < 300
    report(2, ok, f"forbidden constellation rejected: {rejected}; density on F1: {rep.counts['density_cases']} cases", secs)
    assert rejected
    assert rep.verdict == "PASS", rep.counterexamples[:3]
    assert secs < 300


def test_criterion_03_glb(report):
    rep, secs = timed(vf.glb_campaign, vf.fragment_f0())
    report(3, rep.verdict == "PASS", f"union validity vs lower bounds, {rep.counts['pairs']} pairs", secs)
    assert rep.verdict == "PASS", rep.counterexamples[:3]


def test_criterion_04_single_step_rank(report):
    betas = ["0", "1", "2", "w"]
    t = time.perf_counter()
    f0 = vf.rank_campaign(vf.fragment_f0(), betas)
    f1 = vf.rank_campaign(vf.fragment_f1(), betas)
    secs = time.perf_counter() - t
    mutant, msecs = timed(vf.rank_campaign, vf.fragment_f1(), ["5", "6"], prepare=False)
    mutant_found = mutant.counts.get("counterexamples_total", 0)
    ok = f0.verdict == f1.verdict == "PASS" and mutant_found >= 1 and secs < 600
    report(
        4,
        ok,
        f"F0 {f0.counts['checks']} checks, F1 {f1.counts['checks']} checks; "
        f"without preparation {mutant_found} counterexamples",
        secs + msecs,
    )
    assert f0.verdict == "PASS", f0.counterexamples[:3]
    assert f1.verdict == "PASS", f1.counterexamples[:3]
    assert mutant_found >= 1
    assert secs < 600


def test_criterion_05_iterated_rank(report):
    t = time.perf_counter()
    two = vf.ground_rank_campaign([vf.ground_stage_f0(), vf.ground_stage_one()], ["0", "1"])
    f0 = vf.fragment_f0()
    single = vf.rank_campaign(f0, ["0", "1"])
    degenerate = vf.ground_rank_campaign([f0], ["0", "1"])
    secs = time.perf_counter() - t
    agree = (
        single.verdict == degenerate.verdict
        and single.counts == degenerate.counts
        and single.counterexamples == degenerate.counterexamples
    )
    report(5, two.verdict == "PASS" and agree, f"2-stage {two.counts['checks']} checks; 1-stage agreement: {agree}", secs)
    assert two.verdict == "PASS", two.counterexamples[:3]
    assert agree


def test_criterion_06_heart_merge(report):
    rep, secs = timed(vf.heart_campaign, vf.fragment_f1())
    report(6, rep.verdict == "PASS", f"{rep.counts['merged']} of {rep.counts['pairs']} run pairs merged", secs)
    assert rep.verdict == "PASS", rep.counterexamples[:3]


def test_criterion_07_steel_rank(report):
    rep, secs = timed(vf.steel_rank_campaign)
    ok = rep.verdict == "PASS" and secs < 600
    report(7, ok, f"{rep.counts['conditions']} conditions, {rep.counts['checks']} checks", secs)
    assert rep.verdict == "PASS", rep.counterexamples[:3]
    assert secs < 600


def test_criterion_08_refined_threshold(report):
    t = time.perf_counter()
    runs = {r: vf.refined_campaign(reading=r) for r in ("structural", "literal")}
    divergence = vf.steel_reading_divergence()
    secs = time.perf_counter() - t
    parts = []
    for r, rep in runs.items():
        total = rep.counts.get("counterexamples_total", 0)
        low = rep.counts.get("counterexamples_with_beta_prime_below_beta", 0)
        parts.append(f"{r}: {total} counterexamples ({low} with beta' < beta)")
    parts.append(f"readings differ on {divergence['structural_only'] + divergence['literal_only']} conditions (informational)")
    ok = all(rep.verdict == "PASS" for rep in runs.values())
    report(8, ok, "; ".join(parts), secs)
    for r, rep in runs.items():
        assert rep.verdict == "PASS", (r, rep.counterexamples[:2])


def test_criterion_09_wf_oracle(report):
    rep, secs = timed(vf.wf_oracle_campaign)
    ok = rep.verdict == "PASS" and secs < 60
    report(9, ok, f"{rep.counts['three_way_checks']} three-way and {rep.counts['checks']} code checks", secs)
    assert rep.verdict == "PASS", rep.counterexamples[:3]
    assert secs < 60


def test_criterion_10_borel_oracle(report):
    rep, secs = timed(vf.borel_oracle_campaign)
    report(10, rep.verdict == "PASS", f"{len(vf.space_corpus())} spaces, {rep.counts['codes']} codes", secs)
    assert rep.verdict == "PASS", rep.counterexamples[:3]


def test_criterion_11_ordinal_laws(report):
    rep, secs = timed(vf.ordinal_laws_campaign)
    ok = rep.verdict == "PASS" and secs < 10
    report(11, ok, f"{sum(v for k, v in rep.counts.items() if k != 'universe')} law checks", secs)
    assert rep.verdict == "PASS", rep.counterexamples[:3]
    assert secs < 10
