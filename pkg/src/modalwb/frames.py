"""Finite polymodal Kripke frames and their relational algorithms.

A frame is a point set {0..n-1} with one binary relation per modality of an
alphabet. Frames are immutable after construction and safe to share; point
sets are plain frozensets at the API surface while the algorithms work on
integer bitmasks internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .syntax import Alphabet

Pair = tuple[int, int]


class PathBudgetExceeded(RuntimeError):
    """Raised when path enumeration exceeds its configured budget."""


def mask_of(points: Iterable[int]) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def points_of(mask: int) -> frozenset[int]:
    return frozenset(iter_bits(mask))


def _rel_rows(rel, n: int) -> list[int]:
    rows = [0] * n
    for a, b in rel:
        rows[a] |= 1 << b
    return rows


def _rows_to_rel(rows) -> frozenset[Pair]:
    return frozenset((a, b) for a in range(len(rows)) for b in iter_bits(rows[a]))


def _compose_rows(r1, r2) -> list[int]:
    out = []
    for m in r1:
        acc = 0
        for b in iter_bits(m):
            acc |= r2[b]
        out.append(acc)
    return out


def _closure_rows(rows, reflexive: bool) -> list[int]:
    n = len(rows)
    rows = list(rows)
    if reflexive:
        for a in range(n):
            rows[a] |= 1 << a
    for k in range(n):
        rk = rows[k]
        bit = 1 << k
        for a in range(n):
            if rows[a] & bit:
                rows[a] |= rk
    return rows


class Frame:
    """Immutable frame; one relation (a frozenset of ordered pairs) per modality."""

    def __init__(self, alphabet: Alphabet, n: int, relations: Sequence[Iterable[Pair]]):
        if n < 0:
            raise ValueError("point count must be non-negative")
        rels = tuple(frozenset((int(a), int(b)) for a, b in rel) for rel in relations)
        if len(rels) != len(alphabet):
            raise ValueError(
                f"{len(alphabet)} modalities but {len(rels)} relations given"
            )
        for rel in rels:
            for a, b in rel:
                if not (0 <= a < n and 0 <= b < n):
                    raise ValueError(f"pair ({a},{b}) outside points 0..{n - 1}")
        self.alphabet = alphabet
        self.n = n
        self.relations = rels
        self._rows = None

    def rows(self, mod: int) -> list[int]:
        """Per-point successor bitmasks of one modality (cached)."""
        if self._rows is None:
            self._rows = [_rel_rows(rel, self.n) for rel in self.relations]
        return self._rows[mod]

    def succ(self, mod: int, a: int) -> frozenset[int]:
        return points_of(self.rows(mod)[a])

    def preimage_mask(self, mod: int, vmask: int) -> int:
        rows = self.rows(mod)
        acc = 0
        for a in range(self.n):
            if rows[a] & vmask:
                acc |= 1 << a
        return acc

    def preimage(self, mod: int, points: Iterable[int]) -> frozenset[int]:
        return points_of(self.preimage_mask(mod, mask_of(points)))

    def __eq__(self, other):
        return (
            isinstance(other, Frame)
            and self.alphabet == other.alphabet
            and self.n == other.n
            and self.relations == other.relations
        )

    def __hash__(self):
        return hash((self.alphabet, self.n, self.relations))

    def __repr__(self):
        edges = sum(len(r) for r in self.relations)
        return f"Frame(n={self.n}, alphabet={self.alphabet.names}, edges={edges})"


@dataclass(frozen=True)
class SkeletonPoset:
    """Clusters of a frame with the strict order induced on cluster indices."""

    clusters: tuple[frozenset[int], ...]
    order: frozenset[tuple[int, int]]


def union_relation(frame: Frame) -> frozenset[Pair]:
    return frozenset().union(*frame.relations) if frame.relations else frozenset()


def rt_closure(rel: Iterable[Pair], n: int) -> frozenset[Pair]:
    """Reflexive transitive closure of a relation on {0..n-1}."""
    return _rows_to_rel(_closure_rows(_rel_rows(rel, n), reflexive=True))


def transitivity_index(frame: Frame) -> int:
    """Least m such that m+1 steps of the union relation collapse into at
    most m; always at most n on a frame with n points."""
    n = frame.n
    base = _rel_rows(union_relation(frame), n)
    upto = [1 << a for a in range(n)]
    power = list(base)
    for m in range(n + 1):
        if all((power[a] & ~upto[a]) == 0 for a in range(n)):
            return m
        for a in range(n):
            upto[a] |= power[a]
        power = _compose_rows(power, base)
    raise AssertionError("unreachable: n+1 steps always collapse on n points")


def skeleton(frame: Frame) -> SkeletonPoset:
    """Clusters (mutual-reachability classes of the union relation, with the
    diagonal counted) and the strict order between them."""
    n = frame.n
    star = _closure_rows(_rel_rows(union_relation(frame), n), reflexive=True)
    assigned = [-1] * n
    clusters: list[frozenset[int]] = []
    for a in range(n):
        if assigned[a] >= 0:
            continue
        members = [b for b in range(n) if (star[a] >> b) & 1 and (star[b] >> a) & 1]
        idx = len(clusters)
        for b in members:
            assigned[b] = idx
        clusters.append(frozenset(members))
    order = set()
    for i, ci in enumerate(clusters):
        a = min(ci)
        for j, cj in enumerate(clusters):
            if i != j and (star[a] >> min(cj)) & 1:
                order.add((i, j))
    return SkeletonPoset(tuple(clusters), frozenset(order))


def height(frame: Frame) -> int:
    """Size of the longest chain in the skeleton; 0 on the empty frame."""
    skel = skeleton(frame)
    k = len(skel.clusters)
    below = [[i for i in range(k) if (i, j) in skel.order] for j in range(k)]
    memo: dict[int, int] = {}

    def chain_to(j):
        if j not in memo:
            memo[j] = 1 + max((chain_to(i) for i in below[j]), default=0)
        return memo[j]

    return max((chain_to(j) for j in range(k)), default=0)


def is_path_reducible(frame: Frame, m: int, budget: int = 10**6) -> bool:
    """True iff every union-relation path of m+1 steps has a repeated point
    or a one-step shortcut between its members.

    Enumerates only the paths that are still candidates for violating the
    property (simple, shortcut-free prefixes); raises PathBudgetExceeded
    after ``budget`` extension steps rather than guessing.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    n = frame.n
    rows = _rel_rows(union_relation(frame), n)
    steps = 0

    def extend(path: list[int]) -> bool:
        # returns True if some extension reaches a violating full path
        nonlocal steps
        if len(path) == m + 2:
            return True
        last = path[-1]
        for b in iter_bits(rows[last]):
            steps += 1
            if steps > budget:
                raise PathBudgetExceeded(
                    f"path enumeration exceeded budget of {budget}"
                )
            if b in path:
                continue  # repeated point, the path satisfies the property
            idx = len(path)  # the new point would sit at position idx = j+1
            j = idx - 1
            if j <= m and any((rows[path[i]] >> b) & 1 for i in range(j)):
                continue  # shortcut found, the path satisfies the property
            path.append(b)
            if extend(path):
                return True
            path.pop()
        return False

    for start in range(n):
        if extend([start]):
            return False
    return True


def restriction(frame: Frame, points: Iterable[int]) -> Frame:
    """Restriction to a point subset, reindexed along sorted(points)."""
    pts = sorted(set(points))
    for p in pts:
        if not 0 <= p < frame.n:
            raise ValueError(f"point {p} out of range")
    pos = {p: i for i, p in enumerate(pts)}
    rels = [
        frozenset((pos[a], pos[b]) for a, b in rel if a in pos and b in pos)
        for rel in frame.relations
    ]
    return Frame(frame.alphabet, len(pts), rels)


def is_upset(frame: Frame, points: Iterable[int]) -> bool:
    """True iff the set is closed under every relation's successors."""
    mask = mask_of(points)
    if mask >> frame.n:
        raise ValueError("point out of range")
    for mod in range(len(frame.alphabet)):
        rows = frame.rows(mod)
        for p in iter_bits(mask):
            if rows[p] & ~mask:
                return False
    return True


def generated_upset(frame: Frame, points: Iterable[int]) -> frozenset[int]:
    """Closure of the set under reachability along the union relation."""
    mask = mask_of(points)
    if mask >> frame.n:
        raise ValueError("point out of range")
    star = _closure_rows(_rel_rows(union_relation(frame), frame.n), reflexive=True)
    acc = 0
    for p in iter_bits(mask):
        acc |= star[p]
    return points_of(acc)


def min_part(frame: Frame) -> frozenset[int]:
    """Union of the minimal clusters of the skeleton."""
    skel = skeleton(frame)
    has_below = {j for (_, j) in skel.order}
    pts: set[int] = set()
    for i, c in enumerate(skel.clusters):
        if i not in has_below:
            pts |= c
    return frozenset(pts)


def cluster_frames(frame: Frame) -> list[Frame]:
    """Restriction of the frame to each cluster, in cluster order."""
    return [restriction(frame, c) for c in skeleton(frame).clusters]


def disjoint_sum(frames_: Sequence[Frame], alphabet: Alphabet | None = None) -> Frame:
    """Tagged union of frames over a common alphabet; no cross edges."""
    frames_ = list(frames_)
    if alphabet is None:
        alphabet = frames_[0].alphabet if frames_ else Alphabet(())
    for f in frames_:
        if f.alphabet != alphabet:
            raise ValueError("alphabet mismatch in disjoint sum")
    rels: list[set[Pair]] = [set() for _ in alphabet.names]
    off = 0
    for f in frames_:
        for mi, rel in enumerate(f.relations):
            rels[mi].update((a + off, b + off) for a, b in rel)
        off += f.n
    return Frame(alphabet, off, rels)


def lex_sum(
    index_frame: Frame,
    fibers: Sequence[Frame],
    fiber_alphabet: Alphabet | None = None,
) -> Frame:
    """Lexicographic sum: one fiber frame per index point. Vertical
    relations (those of the index frame) ignore the fiber coordinate;
    horizontal relations act inside each fiber."""
    fibers = list(fibers)
    if len(fibers) != index_frame.n:
        raise ValueError("one fiber frame per index point is required")
    if fiber_alphabet is None:
        if not fibers:
            raise ValueError("fiber alphabet required when the index frame is empty")
        fiber_alphabet = fibers[0].alphabet
    for f in fibers:
        if f.alphabet != fiber_alphabet:
            raise ValueError("fiber alphabets differ")
    if set(index_frame.alphabet.names) & set(fiber_alphabet.names):
        raise ValueError("vertical and horizontal alphabets overlap")
    offs = []
    total = 0
    for f in fibers:
        offs.append(total)
        total += f.n
    vertical = []
    for rel in index_frame.relations:
        pairs = set()
        for i, j in rel:
            for a in range(fibers[i].n):
                for b in range(fibers[j].n):
                    pairs.add((offs[i] + a, offs[j] + b))
        vertical.append(pairs)
    horizontal = []
    for mi in range(len(fiber_alphabet)):
        pairs = set()
        for i, f in enumerate(fibers):
            pairs.update((offs[i] + a, offs[i] + b) for a, b in f.relations[mi])
        horizontal.append(pairs)
    alphabet = Alphabet(index_frame.alphabet.names + fiber_alphabet.names)
    return Frame(alphabet, total, vertical + horizontal)


def expand(frame: Frame, kind: str, name: str | None = None) -> Frame:
    """Add a universal (everything sees everything) or difference
    (everything sees everything else) modality."""
    if kind == "universal":
        name = name or "u"
        rel = {(a, b) for a in range(frame.n) for b in range(frame.n)}
    elif kind == "difference":
        name = name or "neq"
        rel = {(a, b) for a in range(frame.n) for b in range(frame.n) if a != b}
    else:
        raise ValueError(f"unknown expansion kind {kind!r}")
    if name in frame.alphabet.names:
        raise ValueError(f"modality name {name!r} already in the alphabet")
    return Frame(
        Alphabet(frame.alphabet.names + (name,)),
        frame.n,
        frame.relations + (frozenset(rel),),
    )


def _partition_blocks(frame: Frame, blocks_like) -> list[frozenset[int]]:
    blocks = [frozenset(b) for b in getattr(blocks_like, "blocks", blocks_like)]
    seen: set[int] = set()
    for b in blocks:
        if not b:
            raise ValueError("empty block in partition")
        for p in b:
            if not 0 <= p < frame.n:
                raise ValueError(f"point {p} out of range")
            if p in seen:
                raise ValueError(f"point {p} occurs in two blocks")
            seen.add(p)
    if len(seen) != frame.n:
        raise ValueError("blocks do not cover all points")
    blocks.sort(key=min)
    return blocks


def quotient_filtration(frame: Frame, partition) -> tuple[Frame, tuple[int, ...]]:
    """Minimal filtration of the frame through a partition: blocks become
    points, related iff some representatives are. Returns the quotient frame
    and the canonical projection (point -> block index, blocks in
    min-element order)."""
    blocks = _partition_blocks(frame, partition)
    proj = [0] * frame.n
    for i, b in enumerate(blocks):
        for p in b:
            proj[p] = i
    rels = [
        frozenset((proj[a], proj[b]) for a, b in rel) for rel in frame.relations
    ]
    return Frame(frame.alphabet, len(blocks), rels), tuple(proj)


def is_pmorphism(frame: Frame, image: Frame, mapping: Sequence[int]) -> bool:
    """Check the forth and back conditions of a p-morphism, per modality."""
    mapping = tuple(mapping)
    if len(mapping) != frame.n:
        raise ValueError("mapping must be total on the source frame")
    if frame.alphabet != image.alphabet:
        raise ValueError("alphabet mismatch")
    if any(not 0 <= v < image.n for v in mapping):
        raise ValueError("mapping target out of range")
    for mod in range(len(frame.alphabet)):
        for a, b in frame.relations[mod]:
            if (mapping[a], mapping[b]) not in image.relations[mod]:
                return False
        for a in range(frame.n):
            targets = image.rows(mod)[mapping[a]]
            covered = 0
            for b in iter_bits(frame.rows(mod)[a]):
                covered |= 1 << mapping[b]
            if targets & ~covered:
                return False
    return True


def to_dict(frame: Frame) -> dict:
    return {
        "alphabet": list(frame.alphabet.names),
        "points": frame.n,
        "rel": {
            nm: sorted([a, b] for a, b in rel)
            for nm, rel in zip(frame.alphabet.names, frame.relations)
        },
    }


def from_dict(data: dict) -> Frame:
    try:
        names = tuple(data["alphabet"])
        n = int(data["points"])
        rel = data["rel"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed frame object: {exc}") from None
    alphabet = Alphabet(names)
    missing = [nm for nm in names if nm not in rel]
    if missing:
        raise ValueError(f"relations missing for modalities {missing}")
    relations = [[(int(a), int(b)) for a, b in rel[nm]] for nm in names]
    return Frame(alphabet, n, relations)


def load_frame(path) -> Frame:
    with open(path, "r", encoding="utf-8") as fh:
        return from_dict(json.load(fh))


def dump_frame(frame: Frame, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(frame), fh, indent=2, sort_keys=True)
        fh.write("\n")


_DOT_COLORS = ("black", "red3", "blue3", "green4", "orange3", "purple3")


def to_dot(frame: Frame, name: str = "frame") -> str:
    """Graphviz rendering: one styled edge set per modality, clusters drawn
    as subgraph boxes."""
    skel = skeleton(frame)
    lines = [f"digraph {name} {{"]
    for ci, cluster in enumerate(skel.clusters):
        lines.append(f"  subgraph cluster_{ci} {{")
        lines.append("    style=rounded;")
        for p in sorted(cluster):
            lines.append(f'    n{p} [label="{p}"];')
        lines.append("  }")
    for mi, nm in enumerate(frame.alphabet.names):
        color = _DOT_COLORS[mi % len(_DOT_COLORS)]
        for a, b in sorted(frame.relations[mi]):
            lines.append(f'  n{a} -> n{b} [color={color}, label="{nm}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
