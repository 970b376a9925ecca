import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import pauli_matrix
from orbent.pauli import PauliString
from orbent.planner import REFERENCE_SETS_01
from orbent.state import (
    FIXTURE_LABELS,
    CIState,
    NoiseModel,
    ShotTable,
    born_probabilities,
    build_state,
    derive_rng,
    estimate_expectations,
    exact_expectations,
    joint_eigenbasis,
    load_fixture,
    sample_set,
)

P = PauliString.from_dense


def z_set(n=8):
    return [P(d + "I" * (n - 4)) for d in REFERENCE_SETS_01[0]]


def test_fixture_image1_amplitude():
    psi = build_state(load_fixture("singlet-image-1"))
    norm = np.sqrt(0.7246799**2 + 0.6249013**2 + 0.2215456**2 + 0.1877628**2)
    assert psi[int("11111100", 2)] == pytest.approx(-0.7246799 / norm, abs=1e-15)
    assert np.count_nonzero(psi) == 4
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


def test_fixture_triplet_image8():
    psi = build_state(load_fixture("triplet-image-8"))
    ci = load_fixture("triplet-image-8")
    for bits, amp in ci.terms:
        assert psi[int(bits, 2)] == pytest.approx(amp / ci.norm, abs=1e-15)
    assert {abs(round(a, 7)) for _, a in ci.terms} == {0.7055596, 0.0467516}


def test_all_fixtures_load():
    for label in FIXTURE_LABELS:
        ci = load_fixture(label)
        assert ci.label == label and ci.n_qubits == 8 and len(ci.terms) == 4
        assert abs(ci.norm - 1) < 1e-6


def test_zero_state():
    psi = build_state(CIState(8, (("00000000", 1.0),)))
    assert psi[0] == 1 and np.count_nonzero(psi) == 1


def test_bad_ci_states_rejected():
    with pytest.raises(ValueError):
        CIState(2, (("01", 0.5), ("01", 0.5)))
    with pytest.raises(ValueError):
        CIState(2, (("011", 1.0),))
    with pytest.raises(ValueError):
        build_state(CIState(2, (("01", 0.9), ("10", 0.1))))
    with pytest.raises(KeyError):
        load_fixture("singlet-image-2")


def test_fixture_path_override(tmp_path):
    f = tmp_path / "custom.json"
    f.write_text('{"label": "custom", "n_qubits": 2, "terms": [{"bits": "10", "amp": 1.0}]}')
    assert load_fixture(str(f)).terms == (("10", 1.0),)


def test_single_z_eigenspaces():
    spaces = joint_eigenbasis([P("Z")])
    assert sorted(sp.outcomes for sp in spaces) == [(-1,), (1,)]
    assert [sp.rank for sp in spaces] == [1, 1]


def test_all_z_set_eigenspaces():
    strings = z_set()
    spaces = joint_eigenbasis(strings)
    assert len(spaces) == 16
    assert all(sp.rank == 16 for sp in spaces)
    # outcomes are the parity patterns of the 16 computational states of qubits 0..3
    expected = set()
    for bits in itertools.product((0, 1), repeat=4):
        expected.add(tuple(int((-1) ** sum(b for b, q in zip(bits, s.dense[:4]) if q == "Z")) for s in strings))
    assert {sp.outcomes for sp in spaces} == expected


@pytest.mark.parametrize("group", REFERENCE_SETS_01)
def test_eigenspaces_match_dense_projectors(group):
    strings = [P(d) for d in group]
    spaces = joint_eigenbasis(strings)
    mats = [pauli_matrix(d) for d in group]
    total = 0
    for sp in spaces:
        proj = np.eye(16)
        for m, o in zip(mats, sp.outcomes):
            proj = proj @ (np.eye(16) + o * m) / 2
        rank = round(np.trace(proj).real)
        assert rank == sp.rank > 0
        total += rank
    assert total == 16


def test_non_commuting_set_rejected():
    with pytest.raises(ValueError):
        joint_eigenbasis([P("XI"), P("ZI")])


def test_born_probabilities_reproduce_expectations():
    psi = build_state(load_fixture("singlet-image-1"))
    for group in REFERENCE_SETS_01:
        strings = [P(d + "IIII") for d in group]
        spaces = joint_eigenbasis(strings)
        probs = born_probabilities(psi, strings, spaces)
        outcomes = np.array([sp.outcomes for sp in spaces])
        exact = exact_expectations(psi, strings)
        np.testing.assert_allclose(probs @ outcomes, [exact[s] for s in strings], atol=1e-12)


def test_full_depolarization_washes_out_traceless_strings():
    psi = build_state(load_fixture("singlet-image-12"))
    for group in REFERENCE_SETS_01[:2]:
        strings = [P(d + "IIII") for d in group]
        table = sample_set(psi, strings, NoiseModel(1.0, 200_000, 3))
        for s, (mean, err) in estimate_expectations(table).items():
            assert abs(mean) < 5 * err + 1e-3


def test_large_shot_limit():
    psi = build_state(load_fixture("singlet-image-8"))
    strings = z_set()
    exact = exact_expectations(psi, strings)
    table = sample_set(psi, strings, NoiseModel(0.0, 1_000_000, 1))
    for s, (mean, err) in estimate_expectations(table).items():
        assert abs(mean - exact[s]) <= 5 * max(err, 1e-6)


def test_ten_thousand_shots_within_tolerance():
    psi = build_state(load_fixture("singlet-image-12"))
    strings = z_set()
    exact = exact_expectations(psi, strings)
    misses = 0
    for seed in range(20):
        table = sample_set(psi, strings, NoiseModel(0.0, 10_000, seed))
        misses += sum(abs(m - exact[s]) >= 0.05 for s, (m, _) in estimate_expectations(table).items())
    assert misses == 0


def test_all_z_sampling_matches_direct_born_sampling():
    psi = build_state(load_fixture("singlet-image-1"))
    strings = z_set()
    spaces = joint_eigenbasis(strings)
    born = born_probabilities(psi, strings, spaces)
    # direct computational-basis distribution of qubits 0..3
    probs4 = (np.abs(psi) ** 2).reshape(16, 16).sum(axis=1)
    singles = [strings.index(P(("I" * q) + "Z" + "I" * (7 - q))) for q in range(4)]
    for sp, p in zip(spaces, born):
        idx = int("".join(str((1 - sp.outcomes[k]) // 2) for k in singles), 2)
        assert p == pytest.approx(probs4[idx], abs=1e-12)
    shots = 200_000
    table = sample_set(psi, strings, NoiseModel(0.0, shots, 9))
    idx = np.zeros(shots, dtype=int)
    for k in singles:
        idx = 2 * idx + (1 - table.outcomes[:, k]) // 2
    freq = np.bincount(idx, minlength=16) / shots
    np.testing.assert_allclose(freq, probs4, atol=5 * np.sqrt(0.25 / shots))


def test_sampled_outcomes_are_joint_eigenvalues():
    psi = build_state(load_fixture("triplet-image-1"))
    strings = [P(d + "IIII") for d in REFERENCE_SETS_01[2]]
    allowed = {sp.outcomes for sp in joint_eigenbasis(strings)}
    table = sample_set(psi, strings, NoiseModel(0.3, 2000, 4))
    assert {tuple(int(v) for v in row) for row in table.outcomes} <= allowed


def test_sampling_is_deterministic_given_seed():
    psi = build_state(load_fixture("singlet-image-12"))
    strings = z_set()
    a = sample_set(psi, strings, NoiseModel(0.02, 1000, 5))
    b = sample_set(psi, strings, NoiseModel(0.02, 1000, 5))
    c = sample_set(psi, strings, NoiseModel(0.02, 1000, 6))
    assert np.array_equal(a.outcomes, b.outcomes)
    assert not np.array_equal(a.outcomes, c.outcomes)


def test_derived_streams_are_independent_of_call_order():
    x1 = derive_rng(3, "sample", 0).random()
    derive_rng(3, "sample", 1).random()
    assert derive_rng(3, "sample", 0).random() == x1
    assert derive_rng(3, "sample", 1).random() != x1


def test_estimate_examples():
    s = P("Z")
    t = ShotTable((s,), np.ones((10, 1), dtype=np.int8))
    assert estimate_expectations(t)[s] == (1.0, 0.0)
    half = np.array([1] * 5000 + [-1] * 5000, dtype=np.int8).reshape(-1, 1)
    mean, err = estimate_expectations(ShotTable((s,), half))[s]
    assert mean == 0.0
    assert err == pytest.approx(0.01, abs=1e-15)


def test_bootstrap_means_match_standard_error():
    psi = build_state(load_fixture("singlet-image-12"))
    strings = z_set()
    table = sample_set(psi, strings, NoiseModel(0.0, 10_000, 2))
    est = estimate_expectations(table)
    boots = np.array([table.resample(derive_rng(0, "b", k)).outcomes.mean(axis=0) for k in range(400)])
    for col, s in enumerate(strings):
        mean, err = est[s]
        assert boots[:, col].mean() == pytest.approx(mean, abs=4 * err / np.sqrt(400) + 1e-12)
        if err > 0:
            assert boots[:, col].std() == pytest.approx(err, rel=0.2)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(p=1.5)
    with pytest.raises(ValueError):
        NoiseModel(shots=0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1))
def test_depolarized_distribution_is_valid(seed, p):
    psi = build_state(load_fixture("singlet-image-16"))
    strings = [P(d + "IIII") for d in REFERENCE_SETS_01[1]]
    table = sample_set(psi, strings, NoiseModel(p, 200, seed))
    assert table.outcomes.shape == (200, 8)
    assert set(np.unique(table.outcomes)) <= {-1, 1}
