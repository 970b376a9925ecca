import csv
import io
import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbent.entropy import (
    EntropyReport,
    Quantity,
    bootstrap,
    entropy_quantities,
    one_orbital,
    one_orbital_ssr,
    percentile_bounds,
    two_orbital_mi,
    von_neumann,
)
from orbent.ordm import exact_1ordm, exact_2ordm
from orbent.pipeline import RunConfig, analyze, run, sample_plan, set_estimates
from orbent.planner import Target, plan
from orbent.state import FIXTURE_LABELS, NoiseModel, ShotTable, build_state, load_fixture

SINGLETS = [f for f in FIXTURE_LABELS if f.startswith("singlet")]
PAIRS = list(itertools.combinations(range(4), 2))


def exact_values(label, ssr):
    psi = build_state(load_fixture(label))
    ones = {i: exact_1ordm(psi, i, 8).diag for i in range(4)}
    pairs = {p: np.linalg.eigvalsh(exact_2ordm(psi, p, ssr, 8).matrix) for p in PAIRS}
    return entropy_quantities(ones, pairs, ssr)


def test_von_neumann_examples():
    assert von_neumann([1, 0, 0, 0]) == 0.0
    assert von_neumann([0.25] * 4) == pytest.approx(2.0, abs=1e-15)
    w = [0.987554, 0, 0, 0.012446]
    binary = -(w[0] * math.log2(w[0]) + w[3] * math.log2(w[3]))
    assert von_neumann(w) == pytest.approx(binary, abs=1e-15)
    # the quoted approximate figure is 0.09597; the formula gives 0.096605
    assert von_neumann(w) == pytest.approx(0.09597, abs=1e-3)
    with pytest.raises(ValueError):
        von_neumann([1.1, -0.1])
    assert von_neumann([1 + 1e-12, -1e-12]) == pytest.approx(0, abs=1e-11)


def test_image16_orbital3_entropy_from_fixture():
    psi = build_state(load_fixture("singlet-image-16"))
    w = exact_1ordm(psi, 3, 8).diag
    assert von_neumann(w) == pytest.approx(-sum(x * math.log2(x) for x in w if x > 0), abs=1e-12)
    assert von_neumann(w) == pytest.approx(0.09662, abs=1e-5)


def test_one_orbital_examples():
    o = one_orbital([1, 0, 0, 0])
    assert (o.s1, o.E, o.I) == (0.0, 0.0, 0.0)
    o = one_orbital([0.0, 0.470385, 0.470385, 0.059229])
    assert o.s1 == pytest.approx(1.27, abs=5e-3)
    assert o.E == o.s1 and o.I == 2 * o.s1


def test_triplet_ssr_entanglement():
    psi = build_state(load_fixture("triplet-image-1"))
    w = exact_1ordm(psi, 2, 8).diag
    i_ssr, e_ssr = one_orbital_ssr(w)
    assert e_ssr == pytest.approx(2 * w[1], abs=1e-12)
    assert e_ssr == pytest.approx(0.94077, abs=1e-5)
    assert i_ssr >= e_ssr - 1e-12


def test_ssr_examples():
    i_ssr, e_ssr = one_orbital_ssr([0.2, 0, 0, 0.8])
    assert e_ssr == 0 and i_ssr == pytest.approx(von_neumann([0.2, 0.8]), abs=1e-15)
    assert one_orbital_ssr([0.7, 0.3, 0, 0])[1] == 0.0
    with pytest.raises(ValueError):
        one_orbital_ssr([0.5, 0.5])


simplex4 = st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3).map(
    lambda v: [x / sum(v) for x in v])


@settings(max_examples=100, deadline=None)
@given(simplex4, st.sampled_from([1, 2]))
def test_no_ssr_entanglement_without_both_single_occupations(w, zero):
    w = list(w)
    w[zero] = 0.0
    i_ssr, e_ssr = one_orbital_ssr(w)
    assert e_ssr == 0.0
    assert i_ssr == pytest.approx(von_neumann(w), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(simplex4)
def test_ssr_quantities_are_bounded(w):
    i_ssr, e_ssr = one_orbital_ssr(w)
    s1 = von_neumann(w)
    assert -1e-12 <= e_ssr <= 1 + 1e-12
    assert e_ssr <= s1 + 1e-12
    assert i_ssr <= 2 * s1 + 1e-12


def test_two_orbital_examples():
    assert two_orbital_mi(0.0, 0.0, [1] + [0] * 15) == (0.0, 0.0)
    assert two_orbital_mi(1.0, 1.0, [0.5, 0.5], same=True)[1] == 0.0
    s2, mi = two_orbital_mi(1.0, 1.0, [0.5, 0.5] + [0] * 14)
    assert (s2, mi) == (1.0, 0.5)


@pytest.mark.parametrize("label", SINGLETS)
def test_singlet_entanglement_vanishes(label):
    v = exact_values(label, True)
    for i in range(4):
        assert abs(v[f"Essr[{i}]"]) < 1e-12
        assert v[f"Issr[{i}]"] == pytest.approx(v[f"s1[{i}]"], abs=1e-12)
        assert v[f"Issr[{i}]"] == pytest.approx(v[f"I[{i}]"] / 2, abs=1e-12)


@pytest.mark.parametrize("label", FIXTURE_LABELS)
def test_total_correlation_dominates_ssr_correlation(label):
    full, ssr = exact_values(label, False), exact_values(label, True)
    for i, j in PAIRS:
        assert full[f"I[{i},{j}]"] >= ssr[f"Issr[{i},{j}]"] - 1e-10
        assert full[f"I[{i},{j}]"] >= -1e-10 and ssr[f"Issr[{i},{j}]"] >= -1e-10
    for k, v in full.items():
        assert v >= -1e-12
        if k.startswith("s1"):
            assert v <= 2
        if k.startswith("s2"):
            assert v <= 4


def test_pair23_hosts_largest_mutual_information():
    v = exact_values("singlet-image-12", False)
    best = max(PAIRS, key=lambda p: v[f"I[{p[0]},{p[1]}]"])
    assert best == (2, 3)


def test_report_round_trips():
    rep = EntropyReport("x", True, {"s1[0]": Quantity(0.5), "s2[0,1]": Quantity(1.25, 1.0, 1.5, 10)})
    back = EntropyReport.from_dict(json.loads(rep.to_json()))
    assert back.to_dict() == rep.to_dict()
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["label", "value", "lo", "hi"]
    assert rows[1] == ["s1[0]", "0.5", "", ""]
    assert [float(x) for x in rows[2][1:]] == [1.25, 1.0, 1.5]
    assert rep["s2[0,1]"] == 1.25


def test_percentile_bounds():
    b = percentile_bounds({"a": np.arange(1001.0)})
    assert b["a"] == (25.0, 975.0)


def test_bootstrap_of_constant_data_has_zero_width():
    s = object()
    tables = [ShotTable((s,), np.ones((100, 1), dtype=np.int8))]
    bounds, samples = bootstrap(tables, lambda ts: {"m": float(ts[0].outcomes.mean())}, 50, seed=1)
    assert bounds["m"] == (1.0, 1.0)
    assert len(samples["m"]) == 50


def test_exact_mode_intervals_are_zero_width():
    res = run(RunConfig("singlet-image-8", bootstrap=20, pairs=((0, 1),)), write=False)
    for q in res.report.quantities.values():
        assert q.lo == q.value == q.hi and q.n == 20
    assert res.warnings


def test_bootstrap_is_deterministic_and_reruns_denoising():
    cfg = RunConfig("triplet-image-1", mode="simulate", shots=2000, bootstrap=30, seed=4, pairs=((1, 2),))
    a = run(cfg, write=False).report.to_dict()
    b = run(cfg, write=False).report.to_dict()
    assert a == b
    calls = []
    p = plan([Target((1,)), Target((2,)), Target((1, 2))])
    tables = sample_plan(build_state(load_fixture("triplet-image-1")), p, NoiseModel(0.02, 2000, 1))

    def analyze_counting(ts):
        calls.append(len(ts))
        return analyze(p, set_estimates(ts), "on", 2000).values

    bounds, samples = bootstrap(tables, analyze_counting, 25)
    assert calls == [p.total] * 25
    assert len(samples["s2[1,2]"]) == 25
    lo, hi = bounds["s2[1,2]"]
    assert lo < hi


@pytest.mark.slow
def test_interval_coverage_for_one_orbital_entropies():
    label = "singlet-image-1"
    psi = build_state(load_fixture(label))
    p = plan([Target((i,)) for i in range(4)])
    truth = exact_values(label, True)
    hits, total = 0, 0
    for rep in range(200):
        tables = sample_plan(psi, p, NoiseModel(0.0, 10_000, rep), "coverage")
        bounds, _ = bootstrap(tables, lambda ts: analyze(p, set_estimates(ts), "on", 10_000).values, 200, seed=rep)
        for i in range(4):
            lo, hi = bounds[f"s1[{i}]"]
            hits += lo - 1e-12 <= truth[f"s1[{i}]"] <= hi + 1e-12
            total += 1
    assert hits / total >= 0.9
