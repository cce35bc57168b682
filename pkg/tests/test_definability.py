import random

import pytest

from modalwb import semantics
from modalwb.definability import (
    ALL_GAMMA_FAMILIES,
    GAMMA_FORBIDS,
    build_jankov,
    distinguishing_formulas,
    stable_top,
    verify_definability,
)
from modalwb.frames import Frame, generated_upset, min_part, restriction, transitivity_index
from modalwb.partitions import frame_modal_depth, refine_sequence
from modalwb.semantics import Model, extent, model_depth
from modalwb.syntax import And, Falsum, Neg, Var, box, default_alphabet, depth

AL1 = default_alphabet(1)


def uni(n, pairs):
    return Frame(AL1, n, [set(pairs)])


CHAIN3 = uni(3, [(0, 1), (1, 2)])


def random_model(rng, n_max=6, mods=None, k=None):
    n = rng.randint(1, n_max)
    mods = mods if mods is not None else rng.randint(1, 2)
    k = k if k is not None else rng.randint(0, 2)
    rels = [
        {(a, b) for a in range(n) for b in range(n) if rng.random() < 0.4}
        for _ in range(mods)
    ]
    frame = Frame(default_alphabet(mods), n, rels)
    val = tuple(frozenset(p for p in range(n) if rng.random() < 0.5) for _ in range(k))
    return Model(frame, k, val)


def random_upset(rng, frame):
    up = generated_upset(frame, [p for p in range(frame.n) if rng.random() < 0.5])
    return up if up else frozenset(range(frame.n))


def conjunct_spine(f):
    while isinstance(f, And):
        yield from conjunct_spine(f.left)
        f = f.right
    yield f


def test_chain_top_point_formula():
    model = Model(CHAIN3, 0, ())
    forms = distinguishing_formulas(model)
    top_formula = forms[frozenset({2})]
    assert depth(top_formula) == 1
    assert extent(model, top_formula) == {2}
    # semantically the no-successor point: same extent as boxed falsum
    assert extent(model, box(0, Falsum())) == extent(model, top_formula)


def test_one_block_model_formula():
    universal = uni(2, [(0, 0), (0, 1), (1, 0), (1, 1)])
    model = Model(universal, 0, ())
    forms = distinguishing_formulas(model)
    (block, formula), = forms.items()
    assert block == frozenset({0, 1})
    assert depth(formula) == 0
    assert extent(model, formula) == {0, 1}


def test_distinguishing_formulas_exact_on_random_models():
    rng = random.Random(0)
    for _ in range(500):
        model = random_model(rng)
        trace, _ = refine_sequence(model.frame, model.valuation)
        forms = distinguishing_formulas(model)
        assert set(forms) == set(trace[-1].blocks)
        births = dict(zip(trace[-1].blocks, trace[-1].birth))
        for block, formula in forms.items():
            assert extent(model, formula) == block
            assert depth(formula) <= births[block]


def test_build_jankov_requires_upset():
    model = Model(CHAIN3, 0, ())
    with pytest.raises(ValueError, match="non-empty"):
        build_jankov(model, frozenset())
    with pytest.raises(ValueError, match="upset"):
        build_jankov(model, frozenset({0}))


def test_build_jankov_rejects_small_m():
    model = Model(CHAIN3, 0, ())
    with pytest.raises(ValueError, match="transitivity index"):
        build_jankov(model, frozenset({0, 1, 2}), m=1)


def test_alpha_formulas_carry_literal_profiles():
    rng = random.Random(1)
    for _ in range(100):
        model = random_model(rng, k=2)
        upset = random_upset(rng, model.frame)
        family, _, _ = build_jankov(model, upset)
        for block, alpha in family.formulas.items():
            spine = list(conjunct_spine(alpha))
            rep = min(block)
            for l in range(model.k):
                want = Var(l) if rep in model.valuation[l] else Neg(Var(l))
                assert want in spine
            assert depth(alpha) <= family.depth_bound


def test_jankov_on_cluster_model():
    cluster = uni(3, [(a, b) for a in range(3) for b in range(3)])
    model = Model(cluster, 1, (frozenset({0, 2}),))
    y = frozenset({0, 1, 2})
    family, gamma, beta = build_jankov(model, y)
    trace, _ = refine_sequence(model.frame, model.valuation)
    final = trace[-1]
    for a in sorted(y):
        want = final.blocks[final.index_of(a)]
        assert extent(model, beta[a]) == want


def test_gamma_depth_bound():
    rng = random.Random(2)
    for _ in range(100):
        model = random_model(rng)
        upset = random_upset(rng, model.frame)
        family, gamma, beta = build_jankov(model, upset)
        m, d = family.m, family.depth_bound
        assert depth(gamma) <= m + d + 1
        for f in beta.values():
            assert depth(f) <= m + d + 1
        for alpha in family.formulas.values():
            assert depth(alpha) <= d


def test_verify_definability_random():
    rng = random.Random(3)
    for _ in range(100):
        model = random_model(rng)
        upset = random_upset(rng, model.frame)
        report = verify_definability(model, upset)
        assert report.ok(), report
        assert report.pairs_checked == len(upset) * model.frame.n


def test_verify_definability_k0():
    rng = random.Random(4)
    for _ in range(50):
        model = random_model(rng, k=0)
        report = verify_definability(model, random_upset(rng, model.frame))
        assert report.ok(), report


def test_verify_definability_with_m_override():
    rng = random.Random(5)
    for _ in range(30):
        model = random_model(rng, n_max=4)
        upset = random_upset(rng, model.frame)
        m0 = transitivity_index(model.frame)
        report = verify_definability(model, upset, m=m0 + 1)
        assert report.ok(), report


def test_dropping_a_gamma_family_breaks_definability():
    rng = random.Random(6)
    families = tuple(f for f in ALL_GAMMA_FAMILIES if f != GAMMA_FORBIDS)
    broken = 0
    for _ in range(100):
        model = random_model(rng)
        upset = random_upset(rng, model.frame)
        report = verify_definability(model, upset, families=families)
        if not report.ok():
            broken += 1
    assert broken > 0


def test_stable_top_whole_set():
    model = Model(CHAIN3, 0, ())
    z, cap, report = stable_top(model, frozenset({0, 1, 2}))
    assert z == frozenset({0, 1, 2})
    assert report.ok(), report


def test_stable_top_two_cluster_chain():
    # clusters {0,1} -> {2,3}, valuation separating the clusters
    frame = uni(4, [(0, 1), (1, 0), (0, 2), (1, 3), (2, 3), (3, 2)])
    model = Model(frame, 1, (frozenset({2, 3}),))
    y = frozenset({2, 3})
    z, cap, report = stable_top(model, y)
    assert z == y
    assert report.ok(), report


def test_stable_top_random():
    rng = random.Random(7)
    for _ in range(100):
        model = random_model(rng)
        upset = random_upset(rng, model.frame)
        z, cap, report = stable_top(model, upset)
        assert report.ok(), (report, z, cap)
        assert upset <= z
        d = model_depth(semantics.restrict_model(model, upset))[0]
        assert cap == transitivity_index(model.frame) + d + 1


def test_top_down_depth_bound():
    rng = random.Random(8)
    for _ in range(60):
        n = rng.randint(1, 6)
        frame = Frame(
            default_alphabet(1),
            n,
            [{(a, b) for a in range(n) for b in range(n) if rng.random() < 0.35}],
        )
        m = transitivity_index(frame)
        bottom = min_part(frame)
        from modalwb.frames import skeleton

        skel = skeleton(frame)
        has_below = {j for (_, j) in skel.order}
        minimal = [i for i in range(len(skel.clusters)) if i not in has_below]
        drop = set().union(
            *(skel.clusters[i] for i in minimal if rng.random() < 0.5)
        ) if minimal else set()
        upset = [p for p in range(n) if p not in drop]
        c = frame_modal_depth(restriction(frame, bottom))
        d = frame_modal_depth(restriction(frame, upset))
        assert frame_modal_depth(frame) <= d + m + c + 1
