"""Linear representations of the diagram multicategories.

A representation assigns each boundary object a free module on an explicit
finite basis and each diagram a multilinear map between them, multiplicative
under plugging.  Instances here: the loop-scalar representation on Kauffman
bases (Temperley-Lieb), its colored variant (one loop scalar per color), the
free representation on pods (universal), and direct sums.

All checks are report-valued: they return a `CheckReport` listing each sample
with both sides, never raising on mathematical failure.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .diagram import (LOW, UP, OUTER, BoxType, Diagram, Pin, PlanarityError,
                      PluggingError, _pair, boundary_cycle, enumerate_kauffman,
                      plug)
from .decor import (CCW, CW, Decorated, DecorationError, decorate,
                    plug_decorated)
from .scalars import ONE, ZERO, FreeVector, MultilinearMap, Scalar


class TruncationError(RuntimeError):
    """A universal-representation operation left the enumerated range."""


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.failures

    def record(self, sample, lhs, rhs):
        self.checked += 1
        if lhs != rhs:
            self.failures.append({"sample": sample, "lhs": str(lhs), "rhs": str(rhs)})

    def to_json(self) -> dict:
        return {"name": self.name, "checked": self.checked,
                "passed": self.passed, "failures": self.failures[:10]}

    def __str__(self) -> str:
        status = "pass" if self.passed else f"FAIL ({len(self.failures)} failures)"
        return f"[{status}] {self.name}: {self.checked} samples"


# ---------------------------------------------------------------------------
# Representation interface
# ---------------------------------------------------------------------------


class Representation:
    """Object label -> finite basis; diagram -> multilinear map."""

    tag: object

    def space(self, label) -> tuple:
        return (self.tag, label)

    def object_space(self, label) -> list:
        raise NotImplementedError

    def dim(self, label) -> int:
        return len(self.object_space(label))

    def basis_vector(self, label, key) -> FreeVector:
        return FreeVector.basis(self.space(label), key)

    def basis_vectors(self, label) -> list[FreeVector]:
        return [self.basis_vector(label, k) for k in self.object_space(label)]

    def outer_label(self, morphism):
        raise NotImplementedError

    def slot_labels(self, morphism) -> list:
        raise NotImplementedError

    def plug_morphisms(self, morphism, parts: Sequence):
        raise NotImplementedError

    def action(self, morphism) -> MultilinearMap:
        raise NotImplementedError

    def evaluate(self, morphism, args: Sequence[FreeVector]) -> FreeVector:
        return self.action(morphism).apply(list(args))

    def element(self, morphism) -> FreeVector:
        """The vector of a slot-free diagram (its nullary action)."""
        return self.action(morphism).apply([])


# ---------------------------------------------------------------------------
# Temperley-Lieb: loops become the scalar d
# ---------------------------------------------------------------------------


class TLRepresentation(Representation):
    """Free modules on Kauffman diagrams; each closed loop contributes d."""

    def __init__(self, d: Scalar):
        self.d = d
        self.tag = ("tl", d.terms)

    def object_space(self, label: BoxType | tuple[int, int]) -> list[Diagram]:
        return enumerate_kauffman(*label)

    def outer_label(self, morphism: Diagram) -> BoxType:
        return morphism.outer

    def slot_labels(self, morphism: Diagram) -> list[BoxType]:
        return list(morphism.inner)

    def plug_morphisms(self, morphism: Diagram, parts) -> Diagram:
        return plug(morphism, list(parts))

    def action(self, morphism: Diagram) -> MultilinearMap:
        sources = tuple(self.space(BoxType(*b)) for b in morphism.inner)
        target = self.space(morphism.outer)

        def rule(keys: tuple) -> FreeVector:
            res = plug(morphism, list(keys))
            coeff = self.d ** res.loops
            stripped = Diagram.make(res.outer, res.inner, res.strings, 0, res.nesting)
            return FreeVector.make(target, {stripped: coeff})

        return MultilinearMap(sources, target, rule)


def tl_representation(d: Scalar) -> TLRepresentation:
    return TLRepresentation(d)


# ---------------------------------------------------------------------------
# Decorated bases (shared by the colored and oriented variants)
# ---------------------------------------------------------------------------

# Object labels are (lower word, upper word); letters are colors, signs, or
# (color, sign) pairs depending on the decoration layers in play.
Word = tuple
Label = tuple[Word, Word]


def _letter(color, sign):
    if color is not None and sign is not None:
        return (color, sign)
    return color if sign is None else sign


def _split_letter(letter, colored: bool, oriented: bool):
    if colored and oriented:
        return letter
    if colored:
        return (letter, None)
    return (None, letter)


def decorated_boundary_label(deco: Decorated) -> Label:
    colored = deco.colors is not None
    oriented = deco.tails is not None
    low, up = deco.boundary()
    def shrink(word):
        return tuple(_letter(c if colored else None, s if oriented else None)
                     for c, s in word)
    return (shrink(low), shrink(up))


def decorated_slot_label(deco: Decorated, j: int) -> Label:
    colored = deco.colors is not None
    oriented = deco.tails is not None
    low, up = deco.slot_decoration(j)
    def shrink(word):
        return tuple(_letter(c if colored else None, s if oriented else None)
                     for c, s in word)
    return (shrink(low), shrink(up))


def decorated_kauffman(label: Label, colored: bool, oriented: bool) -> list[Decorated]:
    """Box-free loop-free decorated diagrams with the given boundary."""
    low, up = label
    m, n = len(low), len(up)
    letters = {}
    for i, letter in enumerate(low, start=1):
        letters[Pin(OUTER, LOW, i)] = _split_letter(letter, colored, oriented)
    for i, letter in enumerate(up, start=1):
        letters[Pin(OUTER, UP, i)] = _split_letter(letter, colored, oriented)

    out = []
    for diagram in enumerate_kauffman(m, n):
        colors = {} if colored else None
        tails = {} if oriented else None
        ok = True
        for s in diagram.strings:
            a, b = s
            ca, sa = letters[a]
            cb, sb = letters[b]
            if colored:
                if ca != cb:
                    ok = False
                    break
                colors[s] = ca
            if oriented:
                # sign '+' at a pin means upward flow; derive the tail.
                tail_candidates = []
                for p, sign in ((a, sa), (b, sb)):
                    up_flow = sign == "+"
                    is_tail = up_flow if (p.side == LOW) else not up_flow
                    tail_candidates.append(p if is_tail else None)
                chosen = [p for p in tail_candidates if p is not None]
                if len(chosen) != 1:
                    ok = False
                    break
                tails[s] = chosen[0]
        if ok:
            out.append(Decorated.make(diagram, colors, tails, ()))
    return out


class DecoratedLoopRepresentation(Representation):
    """Shared engine: plug decorated diagrams, convert loop marks to scalars."""

    colored = False
    oriented = False

    def loop_scalar(self, mark) -> Scalar:
        raise NotImplementedError

    def object_space(self, label: Label) -> list[Decorated]:
        return decorated_kauffman(label, self.colored, self.oriented)

    def outer_label(self, morphism: Decorated) -> Label:
        return decorated_boundary_label(morphism)

    def slot_labels(self, morphism: Decorated) -> list[Label]:
        return [decorated_slot_label(morphism, j)
                for j in range(1, morphism.base.slots + 1)]

    def plug_morphisms(self, morphism: Decorated, parts) -> Decorated:
        return plug_decorated(morphism, list(parts))

    def action(self, morphism: Decorated) -> MultilinearMap:
        sources = tuple(self.space(l) for l in self.slot_labels(morphism))
        target = self.space(self.outer_label(morphism))

        def rule(keys: tuple) -> FreeVector:
            res = plug_decorated(morphism, list(keys))
            coeff = ONE
            for mark in res.loop_marks:
                coeff = coeff * self.loop_scalar(mark)
            stripped = Decorated.make(
                Diagram.make(res.base.outer, res.base.inner, res.base.strings,
                             0, res.base.nesting),
                dict(res.colors) if res.colors is not None else None,
                dict(res.tails) if res.tails is not None else None, ())
            return FreeVector.make(target, {stripped: coeff})

        return MultilinearMap(sources, target, rule)


class BischJonesRepresentation(DecoratedLoopRepresentation):
    """Colored Kauffman bases; a loop of color c contributes dmap[c]."""

    colored = True
    oriented = False

    def __init__(self, dmap: Mapping[str, Scalar]):
        self.dmap = dict(dmap)
        self.tag = ("bisch-jones", tuple(sorted((c, d.terms) for c, d in self.dmap.items())))

    def loop_scalar(self, mark) -> Scalar:
        color, _ = mark
        return self.dmap[color]


def bisch_jones_representation(dmap: Mapping[str, Scalar]) -> BischJonesRepresentation:
    return BischJonesRepresentation(dmap)


class OrientedTLRepresentation(DecoratedLoopRepresentation):
    """Oriented monochromatic Kauffman bases; loops contribute by sense."""

    colored = False
    oriented = True

    def __init__(self, d_minus: Scalar, d_plus: Optional[Scalar] = None):
        self.d_minus = d_minus
        # Clockwise loops default to the same scalar, keeping pivotality.
        self.d_plus = d_plus if d_plus is not None else d_minus
        self.tag = ("oriented-tl", d_minus.terms, self.d_plus.terms)

    def loop_scalar(self, mark) -> Scalar:
        _, sense = mark
        return self.d_minus if sense == CCW else self.d_plus


def oriented_tl_representation(d: Scalar, d_plus: Optional[Scalar] = None):
    return OrientedTLRepresentation(d, d_plus)


# ---------------------------------------------------------------------------
# Universal representation (free on pods, truncated)
# ---------------------------------------------------------------------------


class UniversalRepresentation(Representation):
    """Free modules on loop-free pods with at most `bound` inner boxes.

    Pods are colored and oriented; inner boxes are drawn from a finite
    signature of decorated box types.  The action plugs pods freely.
    """

    def __init__(self, colors: Sequence[str], bound: int = 2,
                 signature: Optional[Sequence[Label]] = None):
        self.colors = tuple(colors)
        self.bound = bound
        if signature is None:
            c = self.colors[0]
            signature = [((), ()), (((c, "+"),), ((c, "+"),))]
        self.signature = tuple(signature)
        self.tag = ("universal", self.colors, bound, self.signature)

    def object_space(self, label: Label) -> list[Decorated]:
        out = []
        for k in range(self.bound + 1):
            for types in itertools.product(self.signature, repeat=k):
                out.extend(_pods_with_boxes(label, types))
        return out

    def outer_label(self, morphism: Decorated) -> Label:
        return decorated_boundary_label(morphism)

    def slot_labels(self, morphism: Decorated) -> list[Label]:
        return [decorated_slot_label(morphism, j)
                for j in range(1, morphism.base.slots + 1)]

    def plug_morphisms(self, morphism: Decorated, parts) -> Decorated:
        res = plug_decorated(morphism, list(parts))
        if res.base.slots > self.bound:
            raise TruncationError(
                f"plugging produced {res.base.slots} boxes, bound is {self.bound}")
        return res

    def action(self, morphism: Decorated) -> MultilinearMap:
        sources = tuple(self.space(l) for l in self.slot_labels(morphism))
        target = self.space(self.outer_label(morphism))

        def rule(keys: tuple) -> FreeVector:
            return FreeVector.basis(target, self.plug_morphisms(morphism, list(keys)))

        return MultilinearMap(sources, target, rule)


def universal_representation(colors: Sequence[str], bound: int = 2,
                             signature=None) -> UniversalRepresentation:
    return UniversalRepresentation(colors, bound, signature)


def _pods_with_boxes(label: Label, box_types: Sequence[Label]) -> list[Decorated]:
    """All loop-free pods with the given outer label and decorated slots."""
    low, up = label
    pins = []
    letters = {}
    for i, letter in enumerate(low, start=1):
        p = Pin(OUTER, LOW, i)
        pins.append(p)
        letters[p] = letter
    for i, letter in enumerate(up, start=1):
        p = Pin(OUTER, UP, i)
        pins.append(p)
        letters[p] = letter
    inner = []
    for j, (blow, bup) in enumerate(box_types, start=1):
        inner.append(BoxType(len(blow), len(bup)))
        for i, letter in enumerate(blow, start=1):
            p = Pin(j, LOW, i)
            pins.append(p)
            letters[p] = letter
        for i, letter in enumerate(bup, start=1):
            p = Pin(j, UP, i)
            pins.append(p)
            letters[p] = letter

    if len(pins) % 2:
        return []

    out = []
    for matching in _all_matchings(pins):
        # Colors must agree; one end must be a tail, the other a head.
        colors = {}
        tails = {}
        ok = True
        for a, b in matching:
            (ca, sa), (cb, sb) = letters[a], letters[b]
            if ca != cb:
                ok = False
                break
            s = _pair(a, b)
            colors[s] = ca
            cand = []
            for p, sign in ((a, sa), (b, sb)):
                up_flow = sign == "+"
                if p.box == OUTER:
                    is_tail = up_flow if p.side == LOW else not up_flow
                else:
                    is_tail = up_flow if p.side == UP else not up_flow
                cand.append(p if is_tail else None)
            chosen = [p for p in cand if p is not None]
            if len(chosen) != 1:
                ok = False
                break
            tails[s] = chosen[0]
        if not ok:
            continue
        for nesting in _all_nestings(BoxType(len(low), len(up)), inner, matching):
            try:
                base = Diagram.make((len(low), len(up)), inner, matching,
                                    0, nesting)
            except PlanarityError:
                continue
            out.append(Decorated.make(base, colors, tails, ()))
    return out


def _all_matchings(pins: list) -> Iterable[list[tuple]]:
    if not pins:
        yield []
        return
    first, rest = pins[0], pins[1:]
    for i, other in enumerate(rest):
        for sub in _all_matchings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + sub


def _all_nestings(outer: BoxType, inner, matching) -> Iterable[list]:
    """Every nesting forest over the components of the candidate matching."""
    probe = Diagram(BoxType(*outer), tuple(BoxType(*b) for b in inner),
                    tuple(sorted(_pair(a, b) for a, b in matching)), 0, ())
    comps = probe.components
    floaters = sorted(c for c in comps if c != 0)
    if not floaters:
        yield []
        return
    # Check per-component genus first; invalid matchings have no embedding.
    for comp, verts in comps.items():
        n_darts = sum(len(probe._vertex_darts(v)) for v in verts)
        if len(verts) - n_darts // 2 + len(probe.faces_of(comp)) != 2:
            return

    choices = []
    for comp in floaters:
        opts = []
        for host in comps:
            if host == comp:
                continue
            for face in probe.faces_of(host):
                for attach in probe.faces_of(comp):
                    opts.append((comp, host, face, attach))
        choices.append(opts)
    for combo in itertools.product(*choices):
        parent = {c: h for c, h, _, _ in combo}
        # acyclicity
        ok = True
        for c in floaters:
            seen = {c}
            cur = c
            while cur != 0:
                cur = parent.get(cur, 0)
                if cur in seen:
                    ok = False
                    break
                seen.add(cur)
            if not ok:
                break
        if ok:
            yield list(combo)


# ---------------------------------------------------------------------------
# Direct sums (used as the planar-algebra counterexample)
# ---------------------------------------------------------------------------


class DirectSumRepresentation(Representation):
    def __init__(self, left: Representation, right: Representation):
        self.left = left
        self.right = right
        self.tag = ("sum", left.tag, right.tag)

    def object_space(self, label) -> list:
        return [("L", k) for k in self.left.object_space(label)] + \
               [("R", k) for k in self.right.object_space(label)]

    def outer_label(self, morphism):
        return self.left.outer_label(morphism)

    def slot_labels(self, morphism):
        return self.left.slot_labels(morphism)

    def plug_morphisms(self, morphism, parts):
        return self.left.plug_morphisms(morphism, parts)

    def action(self, morphism) -> MultilinearMap:
        sources = tuple(self.space(l) for l in self.slot_labels(morphism))
        target = self.space(self.outer_label(morphism))
        inner_left = self.left.action(morphism)
        inner_right = self.right.action(morphism)

        def rule(keys: tuple) -> FreeVector:
            sides = {side for side, _ in keys}
            if len(sides) > 1:
                return FreeVector.zero(target)
            side = sides.pop() if sides else "L"
            inner = inner_left if side == "L" else inner_right
            res = inner.rule(tuple(k for _, k in keys))
            return res.map_keys(lambda k: (side, k), target)

        return MultilinearMap(sources, target, rule)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def _basis_tuples(rep: Representation, labels: Sequence, rng: Optional[random.Random],
                  limit: int) -> Iterable[tuple]:
    spaces = [rep.object_space(l) for l in labels]
    total = 1
    for s in spaces:
        total *= max(len(s), 1)
    if any(not s for s in spaces):
        return []
    combos = itertools.product(*spaces)
    if rng is None or total <= limit:
        return itertools.islice(combos, limit)
    picked = []
    for _ in range(limit):
        picked.append(tuple(rng.choice(s) for s in spaces))
    return picked


def check_multiplicativity(rep: Representation, samples: Sequence[tuple],
                           rng: Optional[random.Random] = None,
                           tuples_per_sample: int = 16) -> CheckReport:
    """pi_T after the parts' actions equals pi of the plugged diagram."""
    report = CheckReport("multiplicativity")
    for morphism, parts in samples:
        whole = rep.plug_morphisms(morphism, parts)
        outer_map = rep.action(morphism)
        part_maps = [rep.action(p) for p in parts]
        whole_map = rep.action(whole)
        flat_labels = [l for p in parts for l in rep.slot_labels(p)]
        for keys in _basis_tuples(rep, flat_labels, rng, tuples_per_sample):
            args = [rep.basis_vector(l, k) for l, k in zip(flat_labels, keys)]
            pos = 0
            mids = []
            for p, pm in zip(parts, part_maps):
                k = len(rep.slot_labels(p))
                mids.append(pm.apply(args[pos:pos + k]))
                pos += k
            lhs = outer_map.apply(mids)
            rhs = whole_map.apply(args)
            report.record({"morphism": str(morphism), "keys": str(keys)}, lhs, rhs)
    return report


def check_intertwiner(phi: Mapping, rep: Representation, rep2: Representation,
                      samples: Sequence, rng: Optional[random.Random] = None,
                      tuples_per_sample: int = 16) -> CheckReport:
    """Commuting squares phi . pi_T = pi'_T . (phi x ... x phi) on samples.

    `phi` maps object labels to linear maps given as basis-key -> FreeVector
    in rep2's space (dict or callable).
    """
    report = CheckReport("intertwiner")

    def apply_phi(label, vec: FreeVector) -> FreeVector:
        fn = phi[label] if not callable(phi) else phi(label)
        out = FreeVector.zero(rep2.space(label))
        for key, coeff in vec.terms:
            img = fn(key) if callable(fn) else fn[key]
            out = out + img.scale(coeff)
        return out

    for morphism in samples:
        labels = rep.slot_labels(morphism)
        out_label = rep.outer_label(morphism)
        m1 = rep.action(morphism)
        m2 = rep2.action(morphism)
        for keys in _basis_tuples(rep, labels, rng, tuples_per_sample):
            args = [rep.basis_vector(l, k) for l, k in zip(labels, keys)]
            lhs = apply_phi(out_label, m1.apply(args))
            rhs = m2.apply([apply_phi(l, a) for l, a in zip(labels, args)])
            report.record({"morphism": str(morphism), "keys": str(keys)}, lhs, rhs)
    return report


def is_planar_algebra(rep: Representation, empty_label=None) -> bool:
    """dim P_{0,0} == 1 over the empty boundary object."""
    if empty_label is None:
        empty_label = ((), ())
    try:
        return rep.dim(empty_label) == 1
    except (TypeError, KeyError):
        return rep.dim(BoxType(0, 0)) == 1


@dataclass(frozen=True)
class StarStructure:
    """Involutions *: P(v,w) -> P(w,v), given per object label."""

    label_map: Callable  # label -> starred label
    key_map: Callable    # basis key -> starred basis key

    def apply(self, rep: Representation, label, vec: FreeVector) -> FreeVector:
        target = rep.space(self.label_map(label))
        return FreeVector.make(target, [(self.key_map(k), c) for k, c in vec.terms])


def check_star(rep: Representation, star: StarStructure,
               samples: Sequence, star_morphism: Callable,
               rng: Optional[random.Random] = None,
               tuples_per_sample: int = 16) -> CheckReport:
    """pi_T(x1..xl)* == pi_{T*}(x1*..xl*) on the samples."""
    report = CheckReport("star")
    for morphism in samples:
        labels = rep.slot_labels(morphism)
        out_label = rep.outer_label(morphism)
        starred = star_morphism(morphism)
        m1 = rep.action(morphism)
        m2 = rep.action(starred)
        for keys in _basis_tuples(rep, labels, rng, tuples_per_sample):
            args = [rep.basis_vector(l, k) for l, k in zip(labels, keys)]
            lhs = star.apply(rep, out_label, m1.apply(args))
            rhs = m2.apply([star.apply(rep, l, a) for l, a in zip(labels, args)])
            report.record({"morphism": str(morphism), "keys": str(keys)}, lhs, rhs)
    return report


def tl_star_structure(rep: Representation) -> StarStructure:
    """Horizontal reflection (with orientation reversal when oriented)."""

    def label_map(label):
        if isinstance(label, BoxType) or (isinstance(label, tuple) and len(label) == 2
                                          and all(isinstance(x, int) for x in label)):
            m, n = label
            return BoxType(n, m)
        low, up = label
        return (up, low)

    def key_map(key):
        if isinstance(key, Diagram):
            return _reflect_diagram(key)
        return key.star()

    return StarStructure(label_map, key_map)


def _reflect_diagram(d: Diagram) -> Diagram:
    def r(p: Pin) -> Pin:
        return Pin(p.box, 1 - p.side, p.idx)

    return d._relabel(r, BoxType(d.outer.upper, d.outer.lower),
                      tuple(BoxType(b.upper, b.lower) for b in d.inner),
                      reverses=True)
