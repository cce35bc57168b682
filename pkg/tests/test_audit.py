import json
import random

import pytest

from modalwb import frames, partitions
from modalwb.audit import (
    GenSpec,
    cluster_depth_bound,
    emit_report,
    non_adjacent_frame,
    random_frame,
    run_suite,
    satisfies_structure,
)


def test_genspec_validation():
    with pytest.raises(ValueError, match="structure"):
        GenSpec(structure="weird")
    with pytest.raises(ValueError, match="parameter"):
        GenSpec(structure="pretransitive")
    with pytest.raises(ValueError):
        GenSpec(n_min=3, n_max=2)


def test_random_frame_deterministic():
    spec = GenSpec(n_max=5, alphabet_size=2, seed=42)
    assert random_frame(spec) == random_frame(spec)
    other = GenSpec(n_max=5, alphabet_size=2, seed=43)
    assert random_frame(spec) != random_frame(other)


def test_random_frame_structures():
    rng = random.Random(0)
    for structure, param in [
        ("preorder", None),
        ("transitive", None),
        ("wk4", None),
        ("pretransitive", 1),
        ("bounded-height", 2),
    ]:
        spec = GenSpec(n_max=6, structure=structure, param=param, seed=7)
        for _ in range(30):
            f = random_frame(spec, rng)
            assert satisfies_structure(f, structure, param)
            if structure == "preorder":
                assert frames.transitivity_index(f) <= 1
            if structure == "bounded-height":
                assert frames.height(f) <= 2


def test_unknown_suite():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite("nope", GenSpec(), 1)


def test_exact_depth_suites_reject_large_frames():
    with pytest.raises(ValueError, match="exact"):
        run_suite("top-down", GenSpec(n_max=9), 1)
    with pytest.raises(ValueError, match="md-sum"):
        run_suite("md-sum", GenSpec(n_max=8), 1)


@pytest.mark.parametrize(
    "suite,spec,trials",
    [
        ("tuned-equivalences", GenSpec(n_max=5, alphabet_size=2, density=0.4), 60),
        ("height-correspondence", GenSpec(n_max=4, density=0.3), 40),
        ("atr-correspondence", GenSpec(n_max=4, density=0.3), 40),
        ("rpp-correspondence", GenSpec(n_max=4, density=0.3), 40),
        ("md-sum", GenSpec(n_max=4), 20),
        ("top-down", GenSpec(n_max=8, density=0.3), 15),
        ("cluster-bound", GenSpec(n_max=8, density=0.3), 15),
        ("lex-phi", GenSpec(n_max=3), 40),
        ("diff-axioms", GenSpec(n_max=4), 40),
        ("definability", GenSpec(n_max=8, density=0.3), 15),
        ("byrd-frame", GenSpec(), 5),
    ],
)
def test_suites_pass(suite, spec, trials):
    report = run_suite(suite, spec, trials)
    assert report.passes == trials, [f.detail for f in report.failures]
    assert report.passes + len(report.failures) == report.trials


def test_report_roundtrip_and_determinism(tmp_path):
    spec = GenSpec(n_max=4, seed=11)
    r1 = run_suite("atr-correspondence", spec, 25)
    r2 = run_suite("atr-correspondence", spec, 25)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    emit_report(r1, p1)
    emit_report(r2, p2)
    assert p1.read_bytes() == p2.read_bytes()
    data = json.loads(p1.read_text())
    assert set(data) == {"suite", "seed", "trials", "passes", "failures", "config"}
    assert data["trials"] == 25


def test_empty_report_shape(tmp_path):
    report = run_suite("byrd-frame", GenSpec(seed=1), 0)
    assert report.trials == 0 and report.passes == 0 and report.failures == []
    emit_report(report, tmp_path / "r.json")
    data = json.loads((tmp_path / "r.json").read_text())
    assert data["failures"] == []


def test_failure_serializes_minimized_frame(monkeypatch):
    # coarsen the tuned check so the suite disagrees and emits counterexamples
    real = partitions.is_tuned

    def coarsened(frame, part, modalities=None):
        mods = range(max(len(frame.alphabet) - 1, 0))
        return real(frame, part, modalities=mods)

    monkeypatch.setattr(partitions, "is_tuned", coarsened)
    spec = GenSpec(n_max=5, alphabet_size=2, density=0.4, seed=3)
    report = run_suite("tuned-equivalences", spec, 80)
    assert report.failures
    failure = report.failures[0]
    frame = frames.from_dict(failure.frame)
    assert 1 <= frame.n <= 5
    # the frame JSON embeds the standard format
    assert set(failure.frame) == {"alphabet", "points", "rel"}


def test_byrd_family_values():
    report = run_suite("byrd-frame", GenSpec(), 5)
    assert report.ok()
    for size, want in [(4, 3), (5, 2), (6, 2), (7, 2), (8, 2), (9, 2)]:
        assert frames.transitivity_index(non_adjacent_frame(size)) == want
        assert frames.height(non_adjacent_frame(size)) == 1


def test_byrd_family_is_reflexive_and_symmetric():
    from modalwb import semantics
    from modalwb.syntax import default_alphabet, parse

    al = default_alphabet(1)
    reflexivity = parse("p0 -> <d0>p0", al)
    symmetry = parse("p0 -> [d0]<d0>p0", al)
    for size in range(5, 10):
        frame = non_adjacent_frame(size)
        assert semantics.validity_bruteforce(frame, reflexivity)
        assert semantics.validity_bruteforce(frame, symmetry)


def test_cluster_depth_bound_arithmetic():
    assert [cluster_depth_bound(1, 1, h) for h in range(1, 5)] == [1, 4, 7, 10]
    for h in range(1, 8):
        assert cluster_depth_bound(1, 1, h) == 3 * h - 2
        assert cluster_depth_bound(2, 1, h) == 4 * h - 2
