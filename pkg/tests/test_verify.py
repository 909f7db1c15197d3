import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import dyadic_instance, pinching_instance
from ncmart import config
from ncmart.serialization import dumps
from ncmart.symspaces import Lp, Orlicz, OrliczFunction
from ncmart.verify import (CHECKS, CSV_COLUMNS, Instance, InstanceSpec, RatioReport, SuiteConfig,
                           check_davis_inclusions, check_dual_doob, check_hardy_inequalities,
                           check_stein_lepingle_yor, generate_instance, power_band, report_csv,
                           run_check, run_suite, summary_table, trend_test)
from strategies import instance_specs


def single_difference_instance(seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    part = [list(range(4))]
    return pinching_instance(x, [part, part])


def test_generation_is_deterministic():
    spec = InstanceSpec(dim=8, levels=3, filtration="random", blocks=2, weighted=True, seed=7)
    a, b = generate_instance(spec), generate_instance(spec)
    assert np.array_equal(a.terminal, b.terminal)
    assert a.filtration.to_json() == b.filtration.to_json()
    c = generate_instance(InstanceSpec(dim=8, levels=3, filtration="random", blocks=2,
                                       weighted=True, seed=8))
    assert not np.array_equal(a.terminal, c.terminal)


@pytest.mark.parametrize("kw", [dict(dim=0), dict(dim=65), dict(levels=9), dict(mode="x"),
                                dict(filtration="x"), dict(dim=6, blocks=4), dict(rank=0),
                                dict(seed=-1)])
def test_bad_instance_specs(kw):
    with pytest.raises(ValueError):
        InstanceSpec(**kw)


def test_rank_truncation():
    inst = generate_instance(InstanceSpec(dim=8, levels=2, rank=3, seed=1))
    assert np.linalg.matrix_rank(inst.terminal) <= 3


def test_dual_doob_forward_l1_is_exact():
    for seed in range(5):
        inst = generate_instance(InstanceSpec(dim=8, levels=4, seed=seed, filtration="random"))
        rep = check_dual_doob(inst, Lp(1.0))[0]
        assert rep.band == (1.0, 1.0) and rep.tol == 1e-10
        assert abs(rep.ratio[0] - 1) <= 1e-10 and rep.passed


def test_dual_doob_single_term_contracts():
    inst = generate_instance(InstanceSpec(dim=8, levels=3, seed=2))
    rng = np.random.default_rng(0)
    g = inst.gaussian(rng)
    zero = np.zeros_like(g)
    rep = check_dual_doob(inst, Lp(2.0), terms=[g.conj().T @ g, zero, zero])[0]
    assert rep.ratio[0] <= 1 + 1e-12


def test_dual_doob_ranges():
    inst = generate_instance(InstanceSpec(dim=4, levels=2, seed=0))
    with pytest.raises(ValueError):
        check_dual_doob(inst, Lp(0.5), direction="forward")
    with pytest.raises(ValueError):
        check_dual_doob(inst, Lp(2.0), direction="reverse")
    rev = check_dual_doob(inst, Lp(0.5), direction="reverse")[0]
    assert rev.ratio[0] > 0


def test_lepingle_yor_fixed_points():
    inst = generate_instance(InstanceSpec(dim=8, levels=3, seed=3))
    F = inst.filtration
    rng = np.random.default_rng(1)
    # xi_n already in M_{n-1}: the image is the sequence itself
    terms = [F.expectation(inst.gaussian(rng), max(n - 1, 1)) for n in range(1, 4)]
    rep = check_stein_lepingle_yor(inst, Lp(1.0), which="lepingle_yor", terms=terms)[0]
    assert rep.ratio[0] == pytest.approx(1.0, abs=1e-12)


def test_stein_one_term_contracts():
    inst = generate_instance(InstanceSpec(dim=8, levels=3, seed=4))
    g = inst.gaussian(np.random.default_rng(2))
    zero = np.zeros_like(g)
    rep = check_stein_lepingle_yor(inst, Lp(1.5), terms=[g, zero, zero])[0]
    assert rep.ratio[0] <= 1 + 1e-12
    with pytest.raises(ValueError):
        check_stein_lepingle_yor(inst, Lp(1.0))


def test_hardy_isometric_and_single_difference():
    inst = generate_instance(InstanceSpec(dim=8, levels=4, seed=5, filtration="random"))
    for rep in check_hardy_inequalities(inst, Lp(2.0))[:2]:
        assert rep.ratio[0] <= 1 + 1e-9
    for rep in check_hardy_inequalities(single_difference_instance(), Lp(1.0))[:2]:
        assert rep.ratio[0] == pytest.approx(1.0, rel=1e-10)
    assert check_hardy_inequalities(inst, Lp(1.0))[0].constant == pytest.approx(math.sqrt(2))


def test_hardy_phi_moment_only_with_phi():
    inst = generate_instance(InstanceSpec(dim=4, levels=2, seed=0))
    assert len(check_hardy_inequalities(inst, Lp(1.0))) == 3
    reps = check_hardy_inequalities(inst, Lp(1.0), phi=OrliczFunction("two_power", 1.0, 2.0))
    assert len(reps) == 4 and reps[-1].name.startswith("hardy[phi_moment")


def test_davis_single_difference_and_l2():
    inst = pinching_instance(np.diag([1.0, 2.0, 3.0, 4.0]).astype(complex),
                             [[[0], [1], [2], [3]], [[0, 1], [2, 3]], [[0, 1, 2, 3]]])
    # only the first difference is nonzero
    reps = check_davis_inclusions(inst, Lp(1.0))
    assert reps[1].ratio[0] == pytest.approx(1.0)
    inst = generate_instance(InstanceSpec(dim=8, levels=3, seed=6))
    a, b, split = check_davis_inclusions(inst, Lp(2.0))
    assert b.constant == 1.0 and b.ratio[0] <= 1 + 1e-9 and a.passed
    assert split.reported_only
    with pytest.raises(ValueError):
        check_davis_inclusions(inst, Lp(0.5))


def test_power_band_lower_end():
    # 1/r = (1 - theta)/2, lower end (r / (2 gamma))^(1/gamma)
    assert power_band(0.5, 2.0, 1.0)[0] == pytest.approx(1.0)
    lo, hi = power_band(0.5, 1.0, 1.0)
    assert lo == pytest.approx(2.0) and hi > lo
    assert power_band(0.5, math.inf, 1.0)[0] == 1.0


def test_run_check_dispatch():
    inst = generate_instance(InstanceSpec(dim=4, levels=2, seed=0))
    reps = run_check(inst, {"name": "stein", "space": {"space": "lp", "p": 4}})
    assert reps[0].name == "stein[norm,L_4]"
    with pytest.raises(ValueError):
        run_check(inst, {"name": "nope"})
    assert set(CHECKS) == {"k_closedness", "interpolation", "dual_doob", "stein", "lepingle_yor",
                           "hardy", "davis"}


def _report(name, rows, constant=None):
    rep = RatioReport(name, constant=constant)
    for seed, dim, mode, r in rows:
        rep.add(InstanceSpec(dim=dim, seed=seed, mode=mode), r, 1.0)
    return rep


def test_trend_test_detects_growth_and_ignores_noise():
    growth = [(s, d, "noncommutative", d * (1 + 0.01 * s)) for s in range(12) for d in (4, 8, 16, 32)]
    assert not trend_test(_report("g", growth))["passed"]
    rng = np.random.default_rng(0)
    noise = [(s, d, "noncommutative", 1 + rng.random()) for s in range(12) for d in (4, 8, 16, 32)]
    assert trend_test(_report("n", noise))["passed"]
    # growth in the sign test alone is not enough when the maxima are not monotone
    mixed = [(s, d, "dyadic", (d if s else 100.0 / d)) for s in range(12) for d in (4, 8, 16)]
    assert trend_test(_report("m", mixed))["passed"]


def test_report_verdicts_and_merge():
    a = _report("c", [(0, 4, "dyadic", 1.5)], constant=2.0)
    b = _report("c", [(1, 4, "dyadic", 2.5)], constant=2.0)
    m = RatioReport.merge([a, b])
    assert m.failures() == [1] and not m.passed
    with pytest.raises(ValueError):
        RatioReport.merge([a, _report("c", [(2, 4, "dyadic", 1.0)], constant=3.0)])
    with pytest.raises(ZeroDivisionError):
        RatioReport("z").add(InstanceSpec(), 1.0, 0.0)
    assert RatioReport("z").add(InstanceSpec(), 0.0, 0.0).ratio == [1.0]


SMALL = {"seeds": {"start": 0, "count": 3}, "dims": [4, 8], "levels": [2, 3],
         "checks": [{"name": "k_closedness", "p": 2}, {"name": "dual_doob", "space": {"space": "lp", "p": 1}},
                    {"name": "hardy", "space": {"space": "lp", "p": 1}},
                    {"name": "davis", "space": {"space": "lp", "p": 2}}]}


def _strip(report):
    return dumps({k: v for k, v in report.items() if k != "header"})


def test_suite_is_deterministic_and_threads_agree(monkeypatch):
    monkeypatch.setenv("NCMART_THREADS", "1")
    a = run_suite(SMALL)
    monkeypatch.setenv("NCMART_THREADS", "3")
    b = run_suite(SMALL)
    assert _strip(a) == _strip(b)
    assert a["passed"]
    assert set(a["header"]) == {"generated", "seconds"}


def test_suite_config_validation():
    with pytest.raises(ValueError):
        SuiteConfig.from_json({"bogus": 1})
    with pytest.raises(ValueError):
        SuiteConfig.from_json({"checks": [{"name": "nope"}]})
    with pytest.raises(ValueError):
        SuiteConfig.from_json({"modes": ["quantum"]})
    cfg = SuiteConfig.from_json(SMALL)
    assert cfg.seeds == (0, 1, 2) and len(cfg.corpus()) == 3 * 2 * 2
    assert SuiteConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg


def test_csv_and_summary():
    report = run_suite({**SMALL, "dims": [4], "modes": ["dyadic"]})
    text = report_csv(report)
    assert "\r\n" in text
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) - 1 == sum(len(r["rows"]) for r in report["reports"])
    assert all(len(r) == len(CSV_COLUMNS) for r in rows)
    table = summary_table(report)
    assert table.strip().endswith("overall: pass")


@settings(max_examples=10, deadline=None)
@given(instance_specs(dims=(4, 8)))
def test_ratios_are_scale_invariant(spec):
    inst = generate_instance(spec)
    big = Instance(spec, inst.filtration, 7.5 * inst.terminal)
    entries = [{"name": "hardy", "space": Lp(1.0)}, {"name": "davis", "space": Lp(1.5)},
               {"name": "k_closedness"},
               {"name": "davis", "space": Orlicz(OrliczFunction("two_power", 1.0, 2.0))}]
    for e in entries:
        for r1, r2 in zip(run_check(inst, e), run_check(big, e)):
            assert r1.name == r2.name
            assert r2.ratio[0] == pytest.approx(r1.ratio[0], rel=1e-9, abs=1e-12)


def test_commutative_checks_match_scalar_oracles():
    from oracles import davis_scalar, dyadic_atoms, hardy_scalar
    for seed in range(4):
        inst = generate_instance(InstanceSpec(dim=16, levels=4, mode="dyadic", weighted=True,
                                              seed=seed))
        w = inst.algebra.coord_weights
        x = np.diagonal(inst.terminal)
        atoms = dyadic_atoms(16, 4)
        h = hardy_scalar(x, w, atoms, 1.5)
        reps = check_hardy_inequalities(inst, Lp(1.5))
        assert reps[0].ratio[0] == pytest.approx(h["S_c/s_c"], rel=1e-9)
        assert reps[1].ratio[0] == pytest.approx(h["x/s_c"], rel=1e-9)
        d = davis_scalar(x, w, atoms, 1.5)
        a, b, _ = check_davis_inclusions(inst, Lp(1.5))
        assert a.ratio[0] == pytest.approx(d["a"], rel=1e-9)
        assert b.ratio[0] == pytest.approx(d["b"], rel=1e-9)


def test_default_config_parses():
    from pathlib import Path
    root = Path(__file__).resolve().parents[1]
    for name in ("default.json", "interpolation.json"):
        cfg = SuiteConfig.from_json(json.loads((root / "configs" / name).read_text()))
        assert cfg.checks and config.EPSILON == cfg.epsilon
