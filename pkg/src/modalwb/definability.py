"""Synthesis of distinguishing formulas and the bounded-box definability
construction for upsets of pretransitive models.

``distinguishing_formulas`` replays the refinement trace of a model and
builds, for every block of the stabilized partition, a formula whose extent
is exactly that block; a block born at stage s gets a formula of modal
depth at most s. On top of these, ``build_jankov`` assembles a Jankov-Fine
style formula: it encodes the minimal filtration table of an upset under a
bounded box (a chain of union diamonds up to the frame's transitivity
index), so that each point's equivalence class becomes definable in the
whole model, not just inside the upset. ``verify_definability`` and
``stable_top`` model-check the resulting guarantees exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import frames, partitions, semantics
from .frames import Frame, mask_of
from .semantics import Model
from .syntax import (
    And,
    Dia,
    Formula,
    Imp,
    Neg,
    Var,
    conj,
    depth,
    diamond_upto,
    disj,
)

GAMMA_FORCES = "forces"
GAMMA_FORBIDS = "forbids"
GAMMA_COVERS = "covers"
ALL_GAMMA_FAMILIES = (GAMMA_FORCES, GAMMA_FORBIDS, GAMMA_COVERS)


@dataclass(frozen=True, eq=False)
class DefinableFamily:
    """Per-class defining formulas for an upset.

    ``formulas`` maps each equivalence class within the upset (as a point
    set of the ambient model) to a formula that defines it inside the
    restricted model; every formula carries the full literal profile of its
    class and has modal depth at most ``depth_bound``. ``m`` is the
    transitivity index in force.
    """

    target: frozenset[int]
    formulas: dict[frozenset[int], Formula]
    m: int
    depth_bound: int


def _box_star(m: int, mods, f: Formula) -> Formula:
    return Neg(diamond_upto(m, mods, Neg(f)))


def _literal_profile(model: Model, rep: int) -> list[Formula]:
    return [
        Var(l) if rep in model.valuation[l] else Neg(Var(l))
        for l in range(model.k)
    ]


def _stage_formulas(model: Model) -> tuple[list[partitions.Partition], dict[frozenset[int], Formula]]:
    """Refinement trace plus a defining formula per block of the final stage.

    Stage-0 blocks are defined by their literal profiles. A block that
    splits off at stage d is defined by its parent's formula together with
    signed splitters: diamonds of previous-stage block formulas, chosen
    greedily until every sibling inside the parent is excluded.
    """
    frame = model.frame
    trace, _ = partitions.refine_sequence(frame, model.valuation)
    forms: dict[frozenset[int], Formula] = {}
    for block in trace[0].blocks:
        forms[block] = conj(_literal_profile(model, min(block)))
    for d in range(1, len(trace)):
        prev, cur = trace[d - 1], trace[d]
        pool = []
        for mod in range(len(frame.alphabet)):
            for pb in prev.blocks:
                pool.append((mod, pb, frame.preimage(mod, pb)))
        nxt: dict[frozenset[int], Formula] = {}
        prev_set = set(prev.blocks)
        for block in cur.blocks:
            if block in prev_set:
                nxt[block] = forms[block]
                continue
            parent = next(b for b in prev.blocks if block <= b)
            siblings = [b for b in cur.blocks if b <= parent and b != block]
            conjuncts = [forms[parent]]
            remaining = siblings
            for mod, pb, pre in pool:
                if not remaining:
                    break
                inside = min(block) in pre
                still = [s for s in remaining if (min(s) in pre) == inside]
                if len(still) < len(remaining):
                    dia = Dia(mod, forms[pb])
                    conjuncts.append(dia if inside else Neg(dia))
                    remaining = still
            if remaining:
                raise AssertionError("refinement stage left siblings unseparated")
            nxt[block] = conj(conjuncts)
        forms = nxt
    return trace, forms


def distinguishing_formulas(model: Model) -> dict[frozenset[int], Formula]:
    """For each block of the model's stabilized partition, a formula whose
    extent is exactly that block; depth is bounded by the block's birth
    stage."""
    _, forms = _stage_formulas(model)
    return forms


def _related_table(frame: Frame, blocks: list[frozenset[int]]):
    masks = [mask_of(b) for b in blocks]
    table = {}
    for mod in range(len(frame.alphabet)):
        for j, bm in enumerate(masks):
            pre = frame.preimage_mask(mod, bm)
            for i, am in enumerate(masks):
                table[(mod, i, j)] = bool(am & pre)
    return table


def build_jankov(
    model: Model,
    upset,
    m: int | None = None,
    families=ALL_GAMMA_FAMILIES,
):
    """Defining formulas for an upset's classes, valid across the whole model.

    Returns ``(family, gamma, beta)``: the per-class formulas, the boxed
    filtration-table formula gamma, and per point of the upset the formula
    beta = alpha(point's class) & gamma. ``m`` defaults to the frame's
    transitivity index and may be overridden upward for audits; ``families``
    selects which gamma conjunct families are emitted (exposed so the
    mutation audits can drop one).
    """
    frame = model.frame
    y = frozenset(upset)
    if not y:
        raise ValueError("upset must be non-empty")
    if not frames.is_upset(frame, y):
        raise ValueError("target set is not an upset")
    index = frames.transitivity_index(frame)
    if m is None:
        m = index
    elif m < index:
        raise ValueError(f"m={m} is below the transitivity index {index}")
    unknown = set(families) - set(ALL_GAMMA_FAMILIES)
    if unknown:
        raise ValueError(f"unknown gamma families {sorted(unknown)}")

    old = sorted(y)
    sub = semantics.restrict_model(model, y)
    subtrace, subforms = _stage_formulas(sub)
    d = len(subtrace) - 1

    alphas: dict[frozenset[int], Formula] = {}
    for b, form in subforms.items():
        lifted = frozenset(old[p] for p in b)
        lits = _literal_profile(sub, min(b))
        alphas[lifted] = conj(lits + [form])

    blocks = sorted(alphas, key=min)
    all_mods = tuple(range(len(frame.alphabet)))
    related = _related_table(frame, blocks)

    parts = []
    if GAMMA_FORCES in families:
        items = [
            Imp(alphas[blocks[i]], Dia(mod, alphas[blocks[j]]))
            for mod in all_mods
            for i in range(len(blocks))
            for j in range(len(blocks))
            if related[(mod, i, j)]
        ]
        parts.append(_box_star(m, all_mods, conj(items)))
    if GAMMA_FORBIDS in families:
        items = [
            Imp(alphas[blocks[i]], Neg(Dia(mod, alphas[blocks[j]])))
            for mod in all_mods
            for i in range(len(blocks))
            for j in range(len(blocks))
            if not related[(mod, i, j)]
        ]
        parts.append(_box_star(m, all_mods, conj(items)))
    if GAMMA_COVERS in families:
        parts.append(_box_star(m, all_mods, disj([alphas[b] for b in blocks])))
    gamma = conj(parts)

    block_of = {}
    for b in blocks:
        for p in b:
            block_of[p] = b
    beta = {p: And(alphas[block_of[p]], gamma) for p in old}
    family = DefinableFamily(target=y, formulas=alphas, m=m, depth_bound=d)
    return family, gamma, beta


@dataclass
class DefinabilityReport:
    """Outcome of model-checking the defining formulas across a model."""

    pairs_checked: int
    violations: tuple[tuple[int, int, bool, bool], ...]
    max_beta_depth: int
    depth_limit: int

    def ok(self) -> bool:
        return not self.violations and self.max_beta_depth <= self.depth_limit


def verify_definability(
    model: Model,
    upset,
    m: int | None = None,
    families=ALL_GAMMA_FAMILIES,
) -> DefinabilityReport:
    """Check, for every point a of the upset and every point b of the model,
    that beta(a) holds at b exactly when a and b lie in the same block of
    the model's stabilized partition. Violating pairs are report content,
    not errors."""
    family, _, beta = build_jankov(model, upset, m=m, families=families)
    trace, _ = partitions.refine_sequence(model.frame, model.valuation)
    final = trace[-1]
    violations = []
    checked = 0
    max_depth = 0
    for a in sorted(family.target):
        ext = semantics.extent(model, beta[a])
        expected = final.blocks[final.index_of(a)]
        max_depth = max(max_depth, depth(beta[a]))
        for b in range(model.frame.n):
            checked += 1
            holds = b in ext
            same = b in expected
            if holds != same:
                violations.append((a, b, holds, same))
    return DefinabilityReport(
        pairs_checked=checked,
        violations=tuple(violations),
        max_beta_depth=max_depth,
        depth_limit=family.m + family.depth_bound + 1,
    )


@dataclass
class StableTopReport:
    """The four guarantees of the stable-top construction."""

    upset_ok: bool
    definable_ok: bool
    depth_ok: bool
    stability_ok: bool
    defining_depth: int
    depth_limit: int

    def ok(self) -> bool:
        return self.upset_ok and self.definable_ok and self.depth_ok and self.stability_ok


def stable_top(model: Model, upset, m: int | None = None):
    """Saturate an upset to the union Z of equivalence classes meeting it.

    Returns ``(Z, D, report)`` with D = m + depth(restricted model) + 1.
    The report checks that Z is an upset, that the disjunction of beta
    formulas over class representatives defines Z within depth D, that the
    restricted model's depth stays within D, and that stage-D equivalence
    already pins both membership in Z and the final class of every point
    of Z.
    """
    family, _, beta = build_jankov(model, upset, m=m)
    cap = family.m + family.depth_bound + 1
    trace, stab = partitions.refine_sequence(model.frame, model.valuation)
    final = trace[-1]
    z_blocks = [b for b in final.blocks if b & family.target]
    z = frozenset().union(*z_blocks) if z_blocks else frozenset()

    upset_ok = frames.is_upset(model.frame, z)

    reps = [min(b) for b in sorted(family.formulas, key=min)]
    defining = disj([beta[r] for r in reps])
    defining_depth = depth(defining)
    definable_ok = (
        semantics.extent(model, defining) == z and defining_depth <= cap
    )

    depth_ok = semantics.model_depth(semantics.restrict_model(model, z))[0] <= cap

    stage = trace[min(cap, stab)]
    stability_ok = True
    for block in stage.blocks:
        if not block & z:
            continue
        if not block <= z:
            stability_ok = False
            break
        rep = min(block)
        target = final.blocks[final.index_of(rep)]
        if not block <= target:
            stability_ok = False
            break
    report = StableTopReport(
        upset_ok=upset_ok,
        definable_ok=definable_ok,
        depth_ok=depth_ok,
        stability_ok=stability_ok,
        defining_depth=defining_depth,
        depth_limit=cap,
    )
    return z, cap, report
