"""Partitions of frame points: tuned partitions, induced refinement
sequences, coarsest tuned refinements, frame modal depth, and subalgebra
counting.

The central algorithm is ``refine_sequence``: starting from the partition
induced by a family of point sets, each stage refines the previous
partition by the modal preimages of its blocks. Blocks only ever split, so
on an n-point frame the sequence stabilizes within n stages. The
stabilized partition is tuned, and it is the coarsest tuned refinement of
the seed: every tuned refinement of the seed also refines it. The
stabilization index is the modal depth of the seeding data, and the
maximum over all seed partitions is the modal depth of the frame.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .frames import Frame, iter_bits, mask_of, points_of


class CapExceeded(RuntimeError):
    """Raised when a brute-force enumeration would exceed its cap."""


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks covering {0..n-1}, in min-element order.

    ``birth`` (present on partitions produced by refinement) records, per
    block, the first stage at which the block appeared.
    """

    n: int
    blocks: tuple[frozenset[int], ...]
    birth: tuple[int, ...] | None = None

    @classmethod
    def of(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        blocks = [frozenset(b) for b in blocks]
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise ValueError("empty block in partition")
            for p in b:
                if not 0 <= p < n:
                    raise ValueError(f"point {p} out of range")
                if p in seen:
                    raise ValueError(f"point {p} occurs in two blocks")
                seen.add(p)
        if len(seen) != n:
            raise ValueError("blocks do not cover all points")
        return cls(n, tuple(sorted(blocks, key=min)))

    def index_of(self, point: int) -> int:
        for i, b in enumerate(self.blocks):
            if point in b:
                return i
        raise ValueError(f"point {point} not covered")

    def __len__(self):
        return len(self.blocks)


def singletons(n: int) -> Partition:
    return Partition.of(n, [{i} for i in range(n)])


def one_block(n: int) -> Partition:
    return Partition.of(n, [set(range(n))] if n else [])


def refines(fine: Partition, coarse: Partition) -> bool:
    """True iff every block of ``fine`` lies inside a block of ``coarse``."""
    return all(any(b <= c for c in coarse.blocks) for b in fine.blocks)


def _split_masks(blocks: list[int], splitters: Iterable[int]) -> list[int]:
    out = list(blocks)
    for s in splitters:
        nxt = []
        for b in out:
            inside = b & s
            if inside and inside != b:
                nxt.append(inside)
                nxt.append(b & ~s)
            else:
                nxt.append(b)
        out = nxt
    out.sort(key=lambda m: (m & -m).bit_length())
    return out


def _induced_masks(n: int, set_masks: Iterable[int]) -> list[int]:
    full = (1 << n) - 1
    if full == 0:
        return []
    return _split_masks([full], set_masks)


def induced_partition(n: int, family: Iterable[Iterable[int]]) -> Partition:
    """Partition into classes of equal membership profile across the family."""
    masks = []
    for s in family:
        m = mask_of(s)
        if m >> n:
            raise ValueError("family set out of range")
        masks.append(m)
    blocks = tuple(points_of(m) for m in _induced_masks(n, masks))
    return Partition(n, blocks)


def _check_partition(frame: Frame, partition: Partition) -> None:
    if partition.n != frame.n:
        raise ValueError("partition is over a different point count")
    Partition.of(frame.n, partition.blocks)


def is_tuned(frame: Frame, partition: Partition, modalities: Sequence[int] | None = None) -> bool:
    """True iff block-to-block visibility is all-or-nothing: for every
    modality and blocks U, V, either U lies inside the preimage of V or it
    misses it entirely."""
    _check_partition(frame, partition)
    mods = range(len(frame.alphabet)) if modalities is None else modalities
    bmasks = [mask_of(b) for b in partition.blocks]
    for mod in mods:
        for v in bmasks:
            pre = frame.preimage_mask(mod, v)
            for u in bmasks:
                inter = u & pre
                if inter and inter != u:
                    return False
    return True


def _next_stage_masks(frame: Frame, blocks: list[int]) -> list[int]:
    splitters = list(blocks)
    for mod in range(len(frame.alphabet)):
        for b in blocks:
            splitters.append(frame.preimage_mask(mod, b))
    return _split_masks(blocks, splitters)


def refine_sequence(
    frame: Frame, initial: Iterable[Iterable[int]]
) -> tuple[list[Partition], int]:
    """Iterated refinement by modal preimages.

    Stage 0 is the partition induced by the initial family; stage d is
    induced by the blocks of stage d-1 together with every relation's
    preimage of each of those blocks. Returns the trace of partitions up to
    and including the first fixpoint, and the stabilization index (the
    least d with stage d equal to stage d+1). Each partition in the trace
    carries per-block birth stages.
    """
    n = frame.n
    masks = []
    for s in initial:
        m = mask_of(s)
        if m >> n:
            raise ValueError("initial set out of range")
        masks.append(m)
    cur = _induced_masks(n, masks)
    births = {b: 0 for b in cur}
    trace = [Partition(n, tuple(points_of(b) for b in cur), (0,) * len(cur))]
    stage = 0
    while True:
        nxt = _next_stage_masks(frame, cur)
        if nxt == cur:
            return trace, stage
        stage += 1
        births = {b: births.get(b, stage) for b in nxt}
        trace.append(
            Partition(
                n,
                tuple(points_of(b) for b in nxt),
                tuple(births[b] for b in nxt),
            )
        )
        cur = nxt


def coarsest_tuned_refinement(frame: Frame, partition: Partition) -> Partition:
    """Stabilized refinement of the partition; tuned, refines the input, and
    is refined by every tuned refinement of the input."""
    _check_partition(frame, partition)
    trace, _ = refine_sequence(frame, partition.blocks)
    return trace[-1]


def _stabilization_masks(frame: Frame, initial_masks: list[int]) -> int:
    cur = _induced_masks(frame.n, initial_masks)
    stage = 0
    while True:
        nxt = _next_stage_masks(frame, cur)
        if nxt == cur:
            return stage
        cur = nxt
        stage += 1


def _set_partition_masks(n: int):
    """All set partitions of {0..n-1} as lists of bitmasks (restricted
    growth strings)."""
    if n == 0:
        yield []
        return
    labels = [0] * n

    def rec(i, used):
        if i == n:
            out = [0] * used
            for p, l in enumerate(labels):
                out[l] |= 1 << p
            yield out
            return
        for l in range(used + 1):
            labels[i] = l
            yield from rec(i + 1, max(used, l + 1))

    yield from rec(1, 1)


def _random_partition_masks(rng: random.Random, n: int) -> list[int]:
    if n == 0:
        return []
    labels = [0] * n
    used = 1
    for i in range(1, n):
        labels[i] = rng.randint(0, used)
        used = max(used, labels[i] + 1)
    out = [0] * used
    for p, l in enumerate(labels):
        out[l] |= 1 << p
    return out


EXACT_DEPTH_LIMIT = 8


def frame_modal_depth(
    frame: Frame,
    mode: str = "exact",
    trials: int = 200,
    seed: int = 0,
) -> int:
    """Modal depth of the frame: the largest stabilization index of the
    refinement sequence over seed partitions of the points.

    Exact mode enumerates every set partition (Bell-number many, so the
    point count is capped at 8); the sequence depends only on the partition
    induced by a seeding family, which is why set partitions suffice.
    Sampled mode maximizes over random seed partitions and is only a lower
    bound.
    """
    n = frame.n
    if mode == "exact":
        if n > EXACT_DEPTH_LIMIT:
            raise ValueError(
                f"exact mode enumerates set partitions and needs n <= {EXACT_DEPTH_LIMIT}, got {n}"
            )
        best = 0
        for masks in _set_partition_masks(n):
            best = max(best, _stabilization_masks(frame, masks))
        return best
    if mode == "sampled":
        rng = random.Random(seed)
        best = 0
        for _ in range(trials):
            best = max(best, _stabilization_masks(frame, _random_partition_masks(rng, n)))
        return best
    raise ValueError(f"unknown mode {mode!r}")


def subalgebra_size(frame: Frame, generators: Iterable[Iterable[int]]) -> int:
    """Size of the subalgebra of the frame's powerset modal algebra generated
    by the given point sets: 2 to the number of blocks of the coarsest tuned
    refinement of the induced partition."""
    base = induced_partition(frame.n, generators)
    fixed = coarsest_tuned_refinement(frame, base)
    return 2 ** len(fixed.blocks)


def count_k_formulas(frame: Frame, k: int, cap: int = 4096) -> int:
    """Number of pairwise nonequivalent k-formulas over the frame's logic.

    Builds the disjoint sum of one copy of the frame per k-valuation, seeds
    one generator per variable (the union of its extents across copies), and
    counts the generated subalgebra.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    n = frame.n
    profiles = (1 << n) ** k
    if profiles > cap:
        raise CapExceeded(f"{profiles} valuation profiles exceed cap {cap}")
    total = n * profiles
    rels: list[set[tuple[int, int]]] = [set() for _ in frame.alphabet.names]
    gen_masks = [0] * k
    off = 0
    for combo in itertools.product(range(1 << n), repeat=k):
        for mi, rel in enumerate(frame.relations):
            rels[mi].update((a + off, b + off) for a, b in rel)
        for l, m in enumerate(combo):
            for p in iter_bits(m):
                gen_masks[l] |= 1 << (off + p)
        off += n
    big = Frame(frame.alphabet, total, rels)
    return subalgebra_size(big, [points_of(g) for g in gen_masks])
