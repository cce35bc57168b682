"""Random frame generation and reproducible property suites.

Each suite re-checks one frame-level law with two independently computed
sides (a brute-force semantic side against a relational side, or a library
routine against an inline reimplementation). Suites are deterministic: the
per-trial RNG stream is derived from (seed, trial index), so reports are
byte-identical across reruns. Failing trials serialize a counterexample
frame, greedily minimized by point deletion while the violation persists.

Suite ids:

  tuned-equivalences    four characterizations of tuned partitions agree
  height-correspondence bounded-height axiom validity vs skeleton height
  atr-correspondence    pretransitivity axiom validity vs transitivity index
  rpp-correspondence    reducible-path axiom validity vs path enumeration
  md-sum                depth of a disjoint sum vs summand depths
  top-down              depth bound from an upset plus the minimal part
  cluster-bound         depth bound (d+m+1)h - m - 1 from cluster depths
  lex-phi               lexicographic-sum axioms valid in constructed sums
  diff-axioms           difference axioms valid in difference expansions
  definability          defining formulas exact, stable top checks pass
  byrd-frame            fixed family: |a-b| != 1 truncations, indices (2, 1)
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Callable

from . import definability, frames, partitions, semantics, syntax
from .frames import Frame
from .partitions import Partition
from .semantics import Model
from .syntax import Alphabet, default_alphabet

REJECTION_BUDGET = 5000

STRUCTURES = ("any", "preorder", "transitive", "wk4", "pretransitive", "bounded-height")


class GenerationError(RuntimeError):
    """Raised when rejection sampling cannot hit the requested class."""


@dataclass(frozen=True)
class GenSpec:
    """Shape of the random frames a suite draws."""

    n_min: int = 1
    n_max: int = 4
    alphabet_size: int = 1
    density: float = 0.35
    structure: str = "any"
    param: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.structure not in STRUCTURES:
            raise ValueError(f"unknown structure {self.structure!r}")
        if self.structure in ("pretransitive", "bounded-height") and self.param is None:
            raise ValueError(f"structure {self.structure!r} needs a parameter")
        if not 0 < self.n_min <= self.n_max:
            raise ValueError("need 0 < n_min <= n_max")


@dataclass
class Failure:
    trial: int
    frame: dict | None
    detail: str


@dataclass
class AuditReport:
    suite: str
    seed: int
    trials: int
    passes: int
    failures: list[Failure]
    config: dict

    def ok(self) -> bool:
        return not self.failures


def _trans_rows(pairs, n):
    rows = [0] * n
    for a, b in pairs:
        rows[a] |= 1 << b
    for k in range(n):
        rk = rows[k]
        bit = 1 << k
        for a in range(n):
            if rows[a] & bit:
                rows[a] |= rk
    return rows


def _rows_pairs(rows):
    return {(a, b) for a in range(len(rows)) for b in frames.iter_bits(rows[a])}


def satisfies_structure(frame: Frame, structure: str, param: int | None) -> bool:
    if structure == "any":
        return True
    if structure == "pretransitive":
        return frames.transitivity_index(frame) <= param
    if structure == "bounded-height":
        return frames.height(frame) <= param
    for rel in frame.relations:
        rows = [0] * frame.n
        for a, b in rel:
            rows[a] |= 1 << b
        if structure == "preorder":
            if any(not (rows[a] >> a) & 1 for a in range(frame.n)):
                return False
        if structure in ("preorder", "transitive"):
            for a in range(frame.n):
                for b in frames.iter_bits(rows[a]):
                    if rows[b] & ~rows[a]:
                        return False
        if structure == "wk4":
            for a in range(frame.n):
                for b in frames.iter_bits(rows[a]):
                    if rows[b] & ~rows[a] & ~(1 << a):
                        return False
    return True


def random_frame(spec: GenSpec, rng: random.Random | None = None) -> Frame:
    """Draw a frame from the declared structural class; deterministic for a
    fixed seed. Rejection-sampled classes raise GenerationError when the
    budget runs out."""
    rng = random.Random(spec.seed) if rng is None else rng
    alphabet = default_alphabet(spec.alphabet_size)
    for _ in range(REJECTION_BUDGET):
        n = rng.randint(spec.n_min, spec.n_max)
        rels = []
        for _ in range(spec.alphabet_size):
            pairs = {
                (a, b)
                for a in range(n)
                for b in range(n)
                if rng.random() < spec.density
            }
            if spec.structure == "transitive":
                pairs = _rows_pairs(_trans_rows(pairs, n))
            elif spec.structure == "preorder":
                t = _trans_rows(pairs, n)
                for a in range(n):
                    t[a] |= 1 << a
                pairs = _rows_pairs(_trans_rows(_rows_pairs(t), n))
            elif spec.structure == "wk4":
                t = _rows_pairs(_trans_rows(pairs, n))
                pairs = {(a, b) for a, b in t if a != b or rng.random() < 0.5}
            rels.append(pairs)
        frame = Frame(alphabet, n, rels)
        if satisfies_structure(frame, spec.structure, spec.param):
            return frame
    raise GenerationError(
        f"could not generate a {spec.structure!r} frame within {REJECTION_BUDGET} draws"
    )


def random_partition(rng: random.Random, n: int) -> Partition:
    if n == 0:
        return Partition(0, ())
    labels = [0] * n
    used = 1
    for i in range(1, n):
        labels[i] = rng.randint(0, used)
        used = max(used, labels[i] + 1)
    blocks = [set() for _ in range(used)]
    for p, l in enumerate(labels):
        blocks[l].add(p)
    return Partition.of(n, [b for b in blocks if b])


def random_model(rng: random.Random, frame: Frame, k: int) -> Model:
    val = tuple(
        frozenset(p for p in range(frame.n) if rng.random() < 0.5) for _ in range(k)
    )
    return Model(frame, k, val)


def random_upset(rng: random.Random, frame: Frame) -> frozenset[int]:
    seeds = [p for p in range(frame.n) if rng.random() < 0.5]
    up = frames.generated_upset(frame, seeds)
    return up if up else frozenset(range(frame.n))


def non_adjacent_frame(n: int) -> Frame:
    """Unimodal frame on 0..n-1 where a sees b iff |a-b| differs from 1."""
    rel = {(a, b) for a in range(n) for b in range(n) if abs(a - b) != 1}
    return Frame(default_alphabet(1), n, [rel])


def cluster_depth_bound(d: int, m: int, h: int) -> int:
    """The height-times-cluster-depth bound (d+m+1)*h - m - 1."""
    return (d + m + 1) * h - m - 1


@dataclass
class _Trial:
    ok: bool
    frame: Frame | None = None
    detail: str = ""
    violates: Callable | None = None  # point-subset -> bool, for minimization


def _tuned_by_quantifiers(frame: Frame, part: Partition) -> bool:
    # the literal some-implies-every reading, point by point
    for mod in range(len(frame.alphabet)):
        for u in part.blocks:
            for v in part.blocks:
                sees = [a for a in u if frame.succ(mod, a) & v]
                if sees and len(sees) != len(u):
                    return False
    return True


def _tuned_by_inclusion(frame: Frame, part: Partition) -> bool:
    for mod in range(len(frame.alphabet)):
        for v in part.blocks:
            pre = frame.preimage(mod, v)
            for u in part.blocks:
                if not (u <= pre or not (u & pre)):
                    return False
    return True


def _tuned_by_composition(frame: Frame, part: Partition) -> bool:
    sim = {(a, b) for block in part.blocks for a in block for b in block}
    for rel in frame.relations:
        left = {(x, b) for (x, a) in sim for (a2, b) in rel if a2 == a}
        right = {(x, b) for (x, c) in rel for (c2, b) in sim if c2 == c}
        if not left <= right:
            return False
    return True


def _project_partition(part: Partition, pts: list[int]) -> Partition:
    pos = {p: i for i, p in enumerate(pts)}
    blocks = [frozenset(pos[p] for p in b if p in pos) for b in part.blocks]
    return Partition.of(len(pts), [b for b in blocks if b])


def _suite_tuned_equivalences(spec: GenSpec, rng: random.Random, trial: int) -> _Trial:
    frame = random_frame(spec, rng)
    part = random_partition(rng, frame.n)

    def agree(fr, pr):
        a = partitions.is_tuned(fr, pr)
        quot, proj = frames.quotient_filtration(fr, pr)
        c = frames.is_pmorphism(fr, quot, proj)
        d = _tuned_by_inclusion(fr, pr)
        f = _tuned_by_composition(fr, pr)
        return (a, c, d, f)

    a, c, d, f = agree(frame, part)
    ok = a == c == d == f

    def violates(pts):
        if not pts:
            return False
        sub = frames.restriction(frame, pts)
        vals = agree(sub, _project_partition(part, sorted(pts)))
        return len(set(vals)) > 1

    detail = f"(a)={a} (c)={c} (d)={d} (f)={f} blocks={[sorted(b) for b in part.blocks]}"
    return _Trial(ok, frame, detail, violates)


def _pick_correspondence_frame(spec, rng, max_index=3, max_height=None):
    for _ in range(REJECTION_BUDGET):
        frame = random_frame(spec, rng)
        if frames.transitivity_index(frame) > max_index:
            continue
        if max_height is not None and frames.height(frame) > max_height:
            continue
        return frame
    raise GenerationError("rejection budget exhausted for correspondence frame")


def _suite_height_correspondence(spec: GenSpec, rng: random.Random, trial: int) -> _Trial:
    frame = _pick_correspondence_frame(spec, rng, max_index=3, max_height=3)
    idx = frames.transitivity_index(frame)
    h = rng.randint(0, 3)
    m = rng.randint(idx, 3)
    mods = tuple(range(len(frame.alphabet)))
    axiom = syntax.finite_height_axiom_star(h, m, mods)
    valid = semantics.validity_bruteforce(frame, axiom)
    bounded = frames.height(frame) <= h
    ok = valid == bounded

    def violates(pts):
        if not pts:
            return False
        sub = frames.restriction(frame, pts)
        m2 = max(m, frames.transitivity_index(sub))
        ax = syntax.finite_height_axiom_star(h, m2, mods)
        return semantics.validity_bruteforce(sub, ax) != (frames.height(sub) <= h)

    detail = f"h={h} m={m} height={frames.height(frame)} valid={valid}"
    return _Trial(ok, frame, detail, violates)


def _suite_atr_correspondence(spec: GenSpec, rng: random.Random, trial: int) -> _Trial:
    frame = random_frame(spec, rng)
    m = rng.randint(0, 3)
    mods = tuple(range(len(frame.alphabet)))
    axiom = syntax.pretransitivity_axiom(mods, m)
    valid = semantics.validity_bruteforce(frame, axiom)
    relational = frames.transitivity_index(frame) <= m
    ok = valid == relational

    def violates(pts):
        if not pts:
            return False
        sub = frames.restriction(frame, pts)
        return semantics.validity_bruteforce(sub, axiom) != (
            frames.transitivity_index(sub) <= m
        )

    detail = f"m={m} index={frames.transitivity_index(frame)} valid={valid}"
    return _Trial(ok, frame, detail, violates)


def _suite_rpp_correspondence(spec: GenSpec, rng: random.Random, trial: int) -> _Trial:
    frame = random_frame(spec, rng)
    n = max(1, frame.n)
    m_hi = min(3, max(0, 14 // n - 2))
    m = rng.randint(0, m_hi)
    mods = tuple(range(len(frame.alphabet)))
    axiom = syntax.reducible_path_axiom(m, mods)
    valid = semantics.validity_bruteforce(frame, axiom)
    relational = frames.is_path_reducible(frame, m)
    ok = valid == relational

    def violates(pts):
        if not pts:
            return False
        sub = frames.restriction(frame, pts)
        return semantics.validity_bruteforce(sub, axiom) != frames.is_path_reducible(sub, m)

    detail = f"m={m} path_reducible={relational} valid={valid}"
    return _Trial(ok, frame, detail, violates)


def _suite_md_sum(spec: GenSpec, rng: random.Random, trial: int) -> _Trial:
    f1 = random_frame(spec, rng)
    f2 = random_frame(spec, rng)
    total = frames.disjoint_sum([f1, f2])
    md1 = partitions.frame_modal_depth(f1)
    md2 = partitions.frame_modal_depth(f2)
    m = frames.transitivity_index(total)
    md = partitions.frame_modal_depth(total)
    bound = max(md1, md2) + m + 1
    ok = md <= bound
    detail = f"md(sum)={md} md1={md1} md2={md2} m={m} bound={bound}"
    return _Trial(ok, total, detail, None)


def _suite_top_down(spec: GenSpec, rng: random.Random, trial: int) -> _Trial:
    frame = random_frame(spec, rng)
    m = frames.transitivity_index(frame)
    skel = frames.skeleton(frame)
    has_below = {j for (_, j) in skel.order}
    minimal = [i for i in range(len(skel.clusters)) if i not in has_below]
    dropped = [i for i in minimal if rng.random() < 0.5]
    removed = set().union(*(skel.clusters[i] for i in dropped)) if dropped else set()
    upset = [p for p in range(frame.n) if p not in removed]

    def bound_holds(fr, up):
        mm = frames.transitivity_index(fr)
        c = partitions.frame_modal_depth(frames.restriction(fr, frames.min_part(fr)))
        d = partitions.frame_modal_depth(frames.restriction(fr, up))
        return partitions.frame_modal_depth(fr) <= d + mm + c + 1

    ok = bound_holds(frame, upset)
    detail = f"upset={sorted(upset)} m={m}"
    return _Trial(ok, frame, detail, None)


def _suite_cluster_bound(spec: GenSpec, rng: random.Random, trial: int) -> _Trial:
    frame = random_frame(spec, rng)
    h = frames.height(frame)
    if h == 0:
        return _Trial(True, frame, "empty frame, vacuous", None)
    m = frames.transitivity_index(frame)
    cluster_md = max(
        partitions.frame_modal_depth(c) for c in frames.cluster_frames(frame)
    )
    dhat = cluster_md + m + 1
    md = partitions.frame_modal_depth(frame)
    bound = cluster_depth_bound(dhat, m, h)
    ok = md <= bound
    detail = f"md={md} h={h} m={m} dhat={dhat} bound={bound}"
    return _Trial(ok, frame, detail, None)


def _suite_lex_phi(spec: GenSpec, rng: random.Random, trial: int) -> _Trial:
    n_index = rng.randint(spec.n_min, min(3, spec.n_max))
    v_size = 1 + (rng.random() < 0.3)
    h_size = 1 + (rng.random() < 0.3)
    v_alpha = Alphabet(tuple(f"a{i}" for i in range(v_size)))
    h_alpha = Alphabet(tuple(f"b{i}" for i in range(h_size)))
    density = max(spec.density, 0.3)
    idx_rels = [
        {(a, b) for a in range(n_index) for b in range(n_index) if rng.random() < density}
        for _ in range(v_size)
    ]
    index_frame = Frame(v_alpha, n_index, idx_rels)
    budget = 6
    fibers = []
    for _ in range(n_index):
        size = rng.randint(0, min(2, budget))
        budget -= size
        rels = [
            {(a, b) for a in range(size) for b in range(size) if rng.random() < density}
            for _ in range(h_size)
        ]
        fibers.append(Frame(h_alpha, size, rels))
    total = frames.lex_sum(index_frame, fibers)
    axioms = syntax.lex_sum_axioms(
        range(v_size), range(v_size, v_size + h_size)
    )
    bad = [
        syntax.print_formula(ax, total.alphabet)
        for ax in axioms
        if not semantics.validity_bruteforce(total, ax)
    ]
    detail = f"sum n={total.n}; failing axioms: {bad}" if bad else f"sum n={total.n}"
    return _Trial(not bad, total, detail, None)


def _suite_diff_axioms(spec: GenSpec, rng: random.Random, trial: int) -> _Trial:
    frame = random_frame(spec, rng)
    expanded = frames.expand(frame, "difference")
    diff = len(expanded.alphabet) - 1
    rel = expanded.relations[diff]
    structural = rel | {(a, a) for a in range(frame.n)} == {
        (a, b) for a in range(frame.n) for b in range(frame.n)
    }
    axioms = syntax.difference_axioms(diff, range(len(frame.alphabet)))
    bad = [
        syntax.print_formula(ax, expanded.alphabet)
        for ax in axioms
        if not semantics.validity_bruteforce(expanded, ax)
    ]
    ok = structural and not bad

    def violates(pts):
        if not pts:
            return False
        sub = frames.expand(frames.restriction(frame, pts), "difference")
        return any(not semantics.validity_bruteforce(sub, ax) for ax in axioms)

    detail = f"structural={structural}; failing axioms: {bad}"
    return _Trial(ok, frame, detail, violates if not structural or bad else None)


def _suite_definability(spec: GenSpec, rng: random.Random, trial: int) -> _Trial:
    frame = random_frame(spec, rng)
    k = rng.randint(0, 2)
    model = random_model(rng, frame, k)
    upset = random_upset(rng, frame)
    rep = definability.verify_definability(model, upset)
    _, _, top_rep = definability.stable_top(model, upset)
    ok = rep.ok() and top_rep.ok()
    detail = (
        f"k={k} upset={sorted(upset)} violations={len(rep.violations)} "
        f"beta_depth={rep.max_beta_depth}<={rep.depth_limit} stable_top={top_rep}"
    )
    return _Trial(ok, frame, detail, None)


def _suite_byrd_frame(spec: GenSpec, rng: random.Random, trial: int) -> _Trial:
    # truncation of the naturals at n, i.e. points {0..n}; the 4-point
    # restriction {0..3} is too small (its index is 3, not 2)
    n = 4 + trial % 5
    frame = non_adjacent_frame(n + 1)
    idx = frames.transitivity_index(frame)
    h = frames.height(frame)
    ok = idx == 2 and h == 1
    return _Trial(ok, frame, f"n={n} index={idx} height={h}", None)


SUITES: dict[str, Callable[[GenSpec, random.Random, int], _Trial]] = {
    "tuned-equivalences": _suite_tuned_equivalences,
    "height-correspondence": _suite_height_correspondence,
    "atr-correspondence": _suite_atr_correspondence,
    "rpp-correspondence": _suite_rpp_correspondence,
    "md-sum": _suite_md_sum,
    "top-down": _suite_top_down,
    "cluster-bound": _suite_cluster_bound,
    "lex-phi": _suite_lex_phi,
    "diff-axioms": _suite_diff_axioms,
    "definability": _suite_definability,
    "byrd-frame": _suite_byrd_frame,
}

_EXACT_DEPTH_SUITES = ("md-sum", "top-down", "cluster-bound", "definability")


def _trial_seed(seed: int, trial: int) -> int:
    return ((seed + 1) * 0x9E3779B97F4A7C15 + trial * 0xBF58476D1CE4E5B9) & (2**63 - 1)


def _minimize(frame: Frame, violates: Callable) -> Frame:
    pts = list(range(frame.n))
    changed = True
    while changed and len(pts) > 1:
        changed = False
        for p in list(pts):
            cand = [q for q in pts if q != p]
            try:
                still_bad = violates(cand)
            except Exception:
                still_bad = False
            if still_bad:
                pts = cand
                changed = True
                break
    return frames.restriction(frame, pts)


def run_suite(suite: str, spec: GenSpec, trials: int) -> AuditReport:
    """Run one property suite; deterministic for a fixed spec seed."""
    try:
        fn = SUITES[suite]
    except KeyError:
        raise ValueError(f"unknown suite {suite!r}") from None
    if suite in _EXACT_DEPTH_SUITES and spec.n_max > partitions.EXACT_DEPTH_LIMIT:
        raise ValueError(
            f"suite {suite!r} uses exact modal depth and needs n_max <= "
            f"{partitions.EXACT_DEPTH_LIMIT}"
        )
    if suite == "md-sum" and spec.n_max > partitions.EXACT_DEPTH_LIMIT // 2:
        raise ValueError("md-sum sums two frames; needs n_max <= 4")
    failures: list[Failure] = []
    passes = 0
    for t in range(trials):
        rng = random.Random(_trial_seed(spec.seed, t))
        res = fn(spec, rng, t)
        if res.ok:
            passes += 1
            continue
        shown = res.frame
        if shown is not None and res.violates is not None:
            shown = _minimize(shown, res.violates)
        failures.append(
            Failure(t, frames.to_dict(shown) if shown is not None else None, res.detail)
        )
    config = {
        "n_min": spec.n_min,
        "n_max": spec.n_max,
        "alphabet_size": spec.alphabet_size,
        "density": spec.density,
        "structure": spec.structure,
        "param": spec.param,
    }
    return AuditReport(suite, spec.seed, trials, passes, failures, config)


def report_to_dict(report: AuditReport) -> dict:
    return {
        "suite": report.suite,
        "seed": report.seed,
        "trials": report.trials,
        "passes": report.passes,
        "failures": [
            {"trial": f.trial, "frame": f.frame, "detail": f.detail}
            for f in report.failures
        ],
        "config": report.config,
    }


def emit_report(report: AuditReport, path) -> None:
    """Write the report as JSON with stable key order; reruns with the same
    seed produce byte-identical files."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
