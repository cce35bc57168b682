"""Truth sets, brute-force frame validity, and model-level modal depth.

Everything here is pure and works over immutable inputs. The evaluator
compiles a formula DAG once into a flat instruction list, then runs it per
valuation with point sets as bitmasks, which keeps exhaustive validity
checks on desk-scale frames fast.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import partitions
from .frames import Frame, mask_of, points_of
from .partitions import CapExceeded, Partition
from .syntax import And, Dia, Falsum, Formula, Imp, Neg, Or, Var, iter_nodes, variables, modalities

DEFAULT_VALUATION_CAP = 1 << 24


@dataclass(frozen=True)
class Model:
    """A frame with a k-valuation (one extent per variable p0..p(k-1))."""

    frame: Frame
    k: int
    valuation: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "valuation", tuple(frozenset(v) for v in self.valuation))
        if self.k < 0 or len(self.valuation) != self.k:
            raise ValueError(f"expected {self.k} extents, got {len(self.valuation)}")
        for ext in self.valuation:
            for p in ext:
                if not 0 <= p < self.frame.n:
                    raise ValueError(f"extent point {p} out of range")


_VAR, _FALSE, _NEG, _AND, _OR, _IMP, _DIA, _BOX = range(8)


def _compile(f: Formula) -> list[tuple[int, int, int]]:
    """Instruction list over the unique nodes of the DAG, children first."""
    index: dict[int, int] = {}
    prog: list[tuple[int, int, int]] = []
    for g in iter_nodes(f):
        if isinstance(g, Var):
            ins = (_VAR, g.index, 0)
        elif isinstance(g, Falsum):
            ins = (_FALSE, 0, 0)
        elif isinstance(g, Neg):
            ins = (_NEG, index[id(g.child)], 0)
        elif isinstance(g, And):
            ins = (_AND, index[id(g.left)], index[id(g.right)])
        elif isinstance(g, Or):
            ins = (_OR, index[id(g.left)], index[id(g.right)])
        elif isinstance(g, Imp):
            ins = (_IMP, index[id(g.left)], index[id(g.right)])
        elif isinstance(g, Dia):
            ins = (_BOX if g.boxed else _DIA, g.mod, index[id(g.child)])
        else:
            raise TypeError(f"not a formula: {g!r}")
        index[id(g)] = len(prog)
        prog.append(ins)
    return prog


def _evaluate(prog, frame: Frame, var_masks, full: int) -> int:
    n = frame.n
    vals = [0] * len(prog)
    i = 0
    for op, x, y in prog:
        if op == _VAR:
            v = var_masks[x]
        elif op == _FALSE:
            v = 0
        elif op == _NEG:
            v = vals[x] ^ full
        elif op == _AND:
            v = vals[x] & vals[y]
        elif op == _OR:
            v = vals[x] | vals[y]
        elif op == _IMP:
            v = (vals[x] ^ full) | vals[y]
        elif op == _DIA:
            target = vals[y]
            rows = frame.rows(x)
            v = 0
            for a in range(n):
                if rows[a] & target:
                    v |= 1 << a
        else:  # _BOX: points all of whose successors lie in the target
            target = vals[y] ^ full
            rows = frame.rows(x)
            v = 0
            for a in range(n):
                if not rows[a] & target:
                    v |= 1 << a
        vals[i] = v
        i += 1
    return vals[-1] if prog else 0


def _check_modalities(frame: Frame, f: Formula) -> None:
    bad = [m for m in modalities(f) if m >= len(frame.alphabet)]
    if bad:
        raise ValueError(f"modality ids {sorted(bad)} outside alphabet of size {len(frame.alphabet)}")


def extent(model: Model, f: Formula) -> frozenset[int]:
    """Points of the model where the formula is true (standard Kripke
    semantics; a diamond is the relational preimage of its child's extent)."""
    _check_modalities(model.frame, f)
    bad = [v for v in variables(f) if v >= model.k]
    if bad:
        raise ValueError(f"variables {sorted(bad)} outside the {model.k}-valuation")
    full = (1 << model.frame.n) - 1
    var_masks = [mask_of(ext) for ext in model.valuation]
    return points_of(_evaluate(_compile(f), model.frame, var_masks, full))


def validity_bruteforce(frame: Frame, f: Formula, cap: int = DEFAULT_VALUATION_CAP) -> bool:
    """True iff the formula is true at every point under every valuation of
    its occurring variables. Raises CapExceeded when the assignment space
    2^(k*n) is larger than ``cap``."""
    _check_modalities(frame, f)
    vars_ = sorted(variables(f))
    n = frame.n
    total = (1 << n) ** len(vars_)
    if total > cap:
        raise CapExceeded(
            f"{len(vars_)} variables on {n} points need {total} assignments (cap {cap})"
        )
    prog = _compile(f)
    full = (1 << n) - 1
    if not vars_:
        return _evaluate(prog, frame, [], full) == full
    width = max(vars_) + 1
    var_masks = [0] * width
    radix = 1 << n
    stack = [0] * len(vars_)
    while True:
        for pos, v in enumerate(vars_):
            var_masks[v] = stack[pos]
        if _evaluate(prog, frame, var_masks, full) != full:
            return False
        pos = 0
        while pos < len(stack):
            stack[pos] += 1
            if stack[pos] < radix:
                break
            stack[pos] = 0
            pos += 1
        if pos == len(stack):
            return True


def model_depth(model: Model) -> tuple[int, list[Partition]]:
    """Stabilization index of the refinement sequence induced by the
    valuation extents, together with the full partition trace."""
    trace, stab = partitions.refine_sequence(model.frame, model.valuation)
    return stab, trace


def restrict_model(model: Model, points) -> Model:
    """Restriction of frame and valuation to a point subset, reindexed along
    sorted(points)."""
    from . import frames as _frames

    pts = sorted(set(points))
    sub = _frames.restriction(model.frame, pts)
    pos = {p: i for i, p in enumerate(pts)}
    val = tuple(
        frozenset(pos[p] for p in ext if p in pos) for ext in model.valuation
    )
    return Model(sub, model.k, val)
