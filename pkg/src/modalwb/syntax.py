"""Polymodal formula language: syntax trees, text grammar, and schema builders.

Formulas are immutable trees over variables ``p0, p1, ...``, falsum, the
Boolean connectives, and one diamond per modality of a finite alphabet.
A box is stored as a flagged diamond node (so it survives printing and
re-parsing); its semantics is the usual dual, not-diamond-not.

The builders at the bottom produce the formula schemas the rest of the
workbench audits: bounded-height axioms, pretransitivity axioms,
reducible-path axioms, lexicographic-sum axioms, and difference-modality
axioms. Large schema instances share subtrees, so consumers should treat
formulas as DAGs (every traversal here is sharing-aware).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

VAR_LIMIT = 10**6

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Alphabet:
    """Ordered modality names; the position of a name is its modality id."""

    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate modality names: {self.names!r}")
        for nm in self.names:
            if not _NAME_RE.fullmatch(nm):
                raise ValueError(f"invalid modality name {nm!r}")

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __getitem__(self, i):
        return self.names[i]

    def index(self, name: str) -> int:
        return self.names.index(name)


def default_alphabet(size: int) -> Alphabet:
    """Canonical alphabet d0, d1, ... used when no names are given."""
    return Alphabet(tuple(f"d{i}" for i in range(size)))


class Formula:
    """Base class of formula nodes. Nodes are immutable; equality is structural."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Formula):
    index: int


@dataclass(frozen=True, slots=True)
class Falsum(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Neg(Formula):
    child: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Dia(Formula):
    """Diamond of one modality; ``boxed=True`` flags the dual (box) reading."""

    mod: int
    child: Formula
    boxed: bool = False


def top() -> Formula:
    return Neg(Falsum())


def box(mod: int, f: Formula) -> Formula:
    return Dia(mod, f, boxed=True)


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-folded conjunction; empty input gives the verum ~false."""
    parts = list(parts)
    if not parts:
        return top()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    """Left-folded disjunction; empty input gives falsum."""
    parts = list(parts)
    if not parts:
        return Falsum()
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def iter_nodes(f: Formula) -> Iterator[Formula]:
    """Unique nodes of the formula DAG, children before parents."""
    seen = set()
    stack = [(f, False)]
    while stack:
        g, done = stack.pop()
        if done:
            yield g
            continue
        if id(g) in seen:
            continue
        seen.add(id(g))
        stack.append((g, True))
        if isinstance(g, (Neg, Dia)):
            stack.append((g.child, False))
        elif isinstance(g, (And, Or, Imp)):
            stack.append((g.right, False))
            stack.append((g.left, False))


def variables(f: Formula) -> frozenset[int]:
    return frozenset(g.index for g in iter_nodes(f) if isinstance(g, Var))


def modalities(f: Formula) -> frozenset[int]:
    return frozenset(g.mod for g in iter_nodes(f) if isinstance(g, Dia))


def is_k_formula(f: Formula, k: int) -> bool:
    return all(v < k for v in variables(f))


def depth(f: Formula) -> int:
    """Modal depth: the maximal number of nested modalities (boxes count)."""
    d: dict[int, int] = {}
    for g in iter_nodes(f):
        if isinstance(g, (Var, Falsum)):
            d[id(g)] = 0
        elif isinstance(g, Neg):
            d[id(g)] = d[id(g.child)]
        elif isinstance(g, Dia):
            d[id(g)] = 1 + d[id(g.child)]
        else:
            d[id(g)] = max(d[id(g.left)], d[id(g.right)])
    return d[id(f)]


class ParseError(ValueError):
    """Syntax error; ``pos`` is the 1-based offset into the input text."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (offset {pos})")
        self.pos = pos


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        pos = i + 1
        if ch == "p" and i + 1 < n and text[i + 1].isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("var", text[i + 1 : j], pos))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            m = _NAME_RE.match(text, i)
            word = m.group()
            if word == "true":
                tokens.append(("true", word, pos))
            elif word == "false":
                tokens.append(("false", word, pos))
            else:
                raise ParseError(f"unexpected word {word!r}", pos)
            i = m.end()
            continue
        if ch == "~":
            tokens.append(("not", ch, pos))
        elif ch == "&":
            tokens.append(("and", ch, pos))
        elif ch == "|":
            tokens.append(("or", ch, pos))
        elif ch == "(":
            tokens.append(("lparen", ch, pos))
        elif ch == ")":
            tokens.append(("rparen", ch, pos))
        elif ch == "-":
            if text[i : i + 2] != "->":
                raise ParseError("expected '->'", pos)
            tokens.append(("imp", "->", pos))
            i += 2
            continue
        elif ch in "<[":
            close = ">" if ch == "<" else "]"
            m = _NAME_RE.match(text, i + 1)
            if not m:
                raise ParseError("expected modality name", pos + 1)
            j = m.end()
            if j >= n or text[j] != close:
                raise ParseError(f"expected {close!r}", j + 1)
            tokens.append(("box" if ch == "[" else "dia", m.group(), pos))
            i = j + 1
            continue
        else:
            raise ParseError(f"unexpected character {ch!r}", pos)
        i += 1
    tokens.append(("eof", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, tokens, alphabet):
        self.toks = tokens
        self.i = 0
        self.alphabet = alphabet

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek()[0] == "imp":
            self.take()
            return Imp(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[0] == "or":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "and":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "not":
            self.take()
            return Neg(self.unary())
        if kind in ("dia", "box"):
            self.take()
            try:
                mod = self.alphabet.index(val)
            except ValueError:
                raise ParseError(f"unknown modality name {val!r}", pos) from None
            return Dia(mod, self.unary(), boxed=(kind == "box"))
        return self.atom()

    def atom(self) -> Formula:
        kind, val, pos = self.take()
        if kind == "var":
            idx = int(val)
            if idx >= VAR_LIMIT:
                raise ParseError("variable index overflow", pos)
            return Var(idx)
        if kind == "false":
            return Falsum()
        if kind == "true":
            return top()
        if kind == "lparen":
            f = self.formula()
            k2, _, pos2 = self.take()
            if k2 != "rparen":
                raise ParseError("expected ')'", pos2)
            return f
        raise ParseError("expected formula", pos)


def parse(text: str, alphabet: Alphabet) -> Formula:
    """Parse a formula; raises ParseError with a 1-based offset on bad input.

    Grammar: atoms ``p<digits>``, ``true``, ``false``; prefix ``~``,
    ``<name>``, ``[name]``; infix ``&``, ``|``, ``->`` with precedence
    unary > & > | > -> and right-associative ``->``.
    """
    p = _Parser(_tokenize(text), alphabet)
    f = p.formula()
    kind, _, pos = p.peek()
    if kind != "eof":
        raise ParseError("unexpected trailing input", pos)
    return f


_LEVEL_IMP, _LEVEL_OR, _LEVEL_AND, _LEVEL_UNARY = 0, 1, 2, 3


def print_formula(f: Formula, alphabet: Alphabet | None = None) -> str:
    """Render with minimal parentheses; parse(print_formula(f)) == f."""
    names = None if alphabet is None else alphabet.names

    def name_of(mod):
        if names is None:
            return f"d{mod}"
        if mod >= len(names):
            raise ValueError(f"modality id {mod} outside alphabet {names!r}")
        return names[mod]

    def go(g, level):
        if isinstance(g, Var):
            return f"p{g.index}"
        if isinstance(g, Falsum):
            return "false"
        if isinstance(g, Neg):
            return "~" + go(g.child, _LEVEL_UNARY)
        if isinstance(g, Dia):
            nm = name_of(g.mod)
            op = f"[{nm}]" if g.boxed else f"<{nm}>"
            return op + go(g.child, _LEVEL_UNARY)
        if isinstance(g, And):
            s = go(g.left, _LEVEL_AND) + " & " + go(g.right, _LEVEL_UNARY)
            lv = _LEVEL_AND
        elif isinstance(g, Or):
            s = go(g.left, _LEVEL_OR) + " | " + go(g.right, _LEVEL_AND)
            lv = _LEVEL_OR
        elif isinstance(g, Imp):
            s = go(g.left, _LEVEL_OR) + " -> " + go(g.right, _LEVEL_IMP)
            lv = _LEVEL_IMP
        else:
            raise TypeError(f"not a formula: {g!r}")
        return "(" + s + ")" if lv < level else s

    return go(f, _LEVEL_IMP)


def _norm_subset(subset) -> tuple[int, ...]:
    out = tuple(sorted({int(b) for b in subset}))
    if any(b < 0 for b in out):
        raise ValueError(f"negative modality id in {out!r}")
    return out


def _nat(v, what="parameter") -> int:
    v = int(v)
    if v < 0:
        raise ValueError(f"{what} must be non-negative, got {v}")
    return v


def star_translate(f: Formula, m: int, subset: Iterable[int]) -> Formula:
    """Replace every diamond of a unimodal formula by the bounded
    reachability diamond over ``subset`` (a disjunction of chains of length
    0..m), and every box by its dual."""
    m = _nat(m, "m")
    subset = _norm_subset(subset)
    mods = modalities(f)
    if len(mods) > 1:
        raise ValueError(
            f"star translation needs a unimodal formula, found modalities {sorted(mods)}"
        )
    out: dict[int, Formula] = {}
    for g in iter_nodes(f):
        if isinstance(g, (Var, Falsum)):
            r = g
        elif isinstance(g, Neg):
            r = Neg(out[id(g.child)])
        elif isinstance(g, And):
            r = And(out[id(g.left)], out[id(g.right)])
        elif isinstance(g, Or):
            r = Or(out[id(g.left)], out[id(g.right)])
        elif isinstance(g, Imp):
            r = Imp(out[id(g.left)], out[id(g.right)])
        else:
            inner = out[id(g.child)]
            if g.boxed:
                r = Neg(diamond_upto(m, subset, Neg(inner)))
            else:
                r = diamond_upto(m, subset, inner)
        out[id(g)] = r
    return out[id(f)]


def diamond_union(subset: Iterable[int], f: Formula) -> Formula:
    """Union diamond over a set of modalities; the empty union is falsum."""
    subset = _norm_subset(subset)
    if not subset:
        return Falsum()
    return disj([Dia(b, f) for b in subset])


def diamond_power(i: int, subset: Iterable[int], f: Formula) -> Formula:
    i = _nat(i, "power")
    subset = _norm_subset(subset)
    for _ in range(i):
        f = diamond_union(subset, f)
    return f


def diamond_upto(m: int, subset: Iterable[int], f: Formula) -> Formula:
    """Disjunction of union-diamond chains of length 0..m; length 0 is f itself."""
    m = _nat(m, "m")
    subset = _norm_subset(subset)
    parts = [f]
    cur = f
    for _ in range(m):
        cur = diamond_union(subset, cur)
        parts.append(cur)
    return disj(parts)


def pretransitivity_axiom(subset: Iterable[int], m: int) -> Formula:
    """Axiom whose frame condition is: m+1 steps collapse into at most m."""
    m = _nat(m, "m")
    subset = _norm_subset(subset)
    return Imp(diamond_power(m + 1, subset, Var(0)), diamond_upto(m, subset, Var(0)))


def finite_height_axiom(h: int) -> Formula:
    """Unimodal bounded-height axiom over modality 0, variables p1..ph.

    Height 0 is falsum; height h is p_h -> [](<>p_h | previous)."""
    h = _nat(h, "h")
    f: Formula = Falsum()
    for i in range(1, h + 1):
        f = Imp(Var(i), box(0, Or(Dia(0, Var(i)), f)))
    return f


def finite_height_axiom_star(h: int, m: int, subset: Iterable[int]) -> Formula:
    """Star-translated bounded-height axiom for m-transitive polymodal frames."""
    return star_translate(finite_height_axiom(h), m, subset)


def reducible_path_axiom(m: int, subset: Iterable[int]) -> Formula:
    """Axiom expressing that every path of m+1 steps has a repeated point or
    a one-step shortcut; variables p0..p(m+1)."""
    m = _nat(m, "m")
    subset = _norm_subset(subset)
    ante: Formula = Var(m + 1)
    for i in range(m, -1, -1):
        ante = And(Var(i), diamond_union(subset, ante))
    parts = []
    for i in range(0, m + 2):
        for j in range(i + 1, m + 2):
            parts.append(diamond_power(i, subset, And(Var(i), Var(j))))
    for i in range(0, m + 1):
        for j in range(i + 1, m + 1):
            parts.append(
                diamond_power(i, subset, And(Var(i), diamond_union(subset, Var(j + 1))))
            )
    return Imp(ante, disj(parts))


def lex_sum_axioms(vertical: Iterable[int], horizontal: Iterable[int]) -> tuple[Formula, ...]:
    """The three interaction axioms of lexicographic sums, per modality pair:
    vertical absorbs horizontal on either side, and vertical reach is stable
    under horizontal steps."""
    v_ = _norm_subset(vertical)
    h_ = _norm_subset(horizontal)
    if set(v_) & set(h_):
        raise ValueError("vertical and horizontal modality sets overlap")
    p = Var(0)
    out = []
    for v in v_:
        for h in h_:
            dv = Dia(v, p)
            out.append(Imp(Dia(h, dv), dv))
            out.append(Imp(Dia(v, Dia(h, p)), dv))
            out.append(Imp(dv, box(h, dv)))
    return tuple(out)


def difference_axioms(diff: int, others: Iterable[int] = ()) -> tuple[Formula, ...]:
    """Axioms of the difference modality ``diff``: symmetry, weak
    transitivity, and inclusion of every other modality into diff-or-here."""
    diff = _nat(diff, "diff")
    others = _norm_subset(others)
    if diff in others:
        raise ValueError("difference modality listed among the others")
    p = Var(0)
    dd = Dia(diff, p)
    out = [
        Imp(p, box(diff, dd)),
        Imp(Dia(diff, dd), Or(dd, p)),
    ]
    out.extend(Imp(Dia(d, p), Or(dd, p)) for d in others)
    return tuple(out)


_SCHEMAS = {
    "diamond_union": lambda subset, formula: diamond_union(subset, formula),
    "diamond_upto": lambda m, subset, formula: diamond_upto(m, subset, formula),
    "atr": lambda subset, m: pretransitivity_axiom(subset, m),
    "B": lambda h: finite_height_axiom(h),
    "B_star": lambda h, m, subset: finite_height_axiom_star(h, m, subset),
    "Rm": lambda m, subset: reducible_path_axiom(m, subset),
    "phi_lex": lambda vertical, horizontal: lex_sum_axioms(vertical, horizontal),
    "diff_axioms": lambda diff, others=(): difference_axioms(diff, others),
}


def build_schema(kind: str, **params):
    """Named entry point for every schema; equal parameters always yield
    structurally equal output."""
    try:
        builder = _SCHEMAS[kind]
    except KeyError:
        raise ValueError(f"unknown schema kind {kind!r}") from None
    try:
        return builder(**params)
    except TypeError as exc:
        raise ValueError(f"invalid parameters for schema {kind!r}: {exc}") from None
