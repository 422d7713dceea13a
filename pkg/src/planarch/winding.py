"""Winding Temperley-Lieb diagrams decorated by a finite linear category.

Boundary pins carry (object, integer) labels.  A box-free, loop-free
noncrossing diagram is admissible when every string's half-winding equals the
difference of its endpoint integers: through strands need equal labels, a
string between two upper pins needs its right label one higher, and between
two lower pins one lower.

Each string gets a hom-space of the category: strings flow upward where the
integer label is even, downward where it is odd, and the space is
hom(source object, target object) along that flow.  Stacking diagrams
concatenates strings and composes their hom-elements in flow order; the
winding constraint makes closed loops impossible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .diagram import (LOW, UP, OUTER, BoxType, Diagram, Pin, PluggingError,
                      _pair, compose_template, enumerate_kauffman, plug_traced)
from .scalars import ONE, ZERO, FreeVector, Scalar, parse_scalar

# A boundary letter and label word: (object name, winding integer).
Letter = tuple[str, int]
WLabel = tuple[tuple[Letter, ...], tuple[Letter, ...]]


class CategoryError(ValueError):
    """The composition tables do not define a category."""


@dataclass(frozen=True)
class FiniteLinearCategory:
    """Objects, finite hom bases, and exact bilinear composition tables."""

    objects: tuple[str, ...]
    hom_bases: tuple[tuple[tuple[str, str], tuple[str, ...]], ...]
    # ((a, b, c), g-name, f-name) -> tuple of (h-name, Scalar) for g . f
    table: tuple[tuple[tuple[tuple[str, str, str], str, str],
                       tuple[tuple[str, Scalar], ...]], ...]
    identities: tuple[tuple[str, tuple[tuple[str, Scalar], ...]], ...]

    @staticmethod
    def make(objects: Sequence[str],
             hom: Mapping[tuple[str, str], Sequence[str]],
             compose: Mapping, identities: Mapping) -> "FiniteLinearCategory":
        cat = FiniteLinearCategory(
            tuple(objects),
            tuple(sorted((tuple(k), tuple(v)) for k, v in hom.items())),
            tuple(sorted((k, tuple(sorted(v.items()))) for k, v in compose.items())),
            tuple(sorted((k, tuple(sorted(v.items()))) for k, v in identities.items())),
        )
        cat.validate()
        return cat

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        for key, basis in self.hom_bases:
            if key == (a, b):
                return basis
        return ()

    def hom_space(self, a: str, b: str):
        return ("hom", a, b)

    def vector(self, a: str, b: str, name: str) -> FreeVector:
        return FreeVector.basis(self.hom_space(a, b), name)

    def identity(self, a: str) -> FreeVector:
        for obj, terms in self.identities:
            if obj == a:
                return FreeVector.make(self.hom_space(a, a), list(terms))
        raise CategoryError(f"no identity for object {a!r}")

    def compose_basis(self, abc: tuple[str, str, str], g: str, f: str) -> FreeVector:
        for key, terms in self.table:
            if key == (abc, g, f):
                return FreeVector.make(self.hom_space(abc[0], abc[2]), list(terms))
        raise CategoryError(f"no composition entry for {g} . {f} over {abc}")

    def compose(self, abc: tuple[str, str, str], g: FreeVector, f: FreeVector) -> FreeVector:
        out = FreeVector.zero(self.hom_space(abc[0], abc[2]))
        for gk, gc in g.terms:
            for fk, fc in f.terms:
                out = out + self.compose_basis(abc, gk, fk).scale(gc * fc)
        return out

    def validate(self):
        for a, b in itertools.product(self.objects, repeat=2):
            for f in self.hom(a, b):
                fv = self.vector(a, b, f)
                lhs = self.compose((a, b, b), self.identity(b), fv)
                rhs = self.compose((a, a, b), fv, self.identity(a))
                if lhs != fv or rhs != fv:
                    raise CategoryError(f"unit law fails on {f}: {a}->{b}")
        for a, b, c, e in itertools.product(self.objects, repeat=4):
            for f in self.hom(a, b):
                for g in self.hom(b, c):
                    gf = self.compose_basis((a, b, c), g, f)
                    for h in self.hom(c, e):
                        hv = self.vector(c, e, h)
                        lhs = self.compose((a, c, e), hv, gf)
                        hg = self.compose_basis((b, c, e), h, g)
                        rhs = self.compose((a, b, e), hg,
                                           self.vector(a, b, f))
                        if lhs != rhs:
                            raise CategoryError(
                                f"associativity fails on {h}.{g}.{f}")

    # -- serialization -----------------------------------------------------

    @staticmethod
    def from_json(data: dict) -> "FiniteLinearCategory":
        hom = {tuple(k.split(":")): v for k, v in data["hom"].items()}
        compose = {}
        for key, entries in data.get("compose", {}).items():
            a, b, c = key.split(":")
            for pair_key, result in entries.items():
                g, f = pair_key.split("|")
                compose[((a, b, c), g, f)] = {
                    h: parse_scalar(coeff) for h, coeff in result.items()}
        identities = {}
        for a, terms in data["identity"].items():
            identities[a] = {k: parse_scalar(v) for k, v in terms.items()}
        return FiniteLinearCategory.make(data["objects"], hom, compose, identities)


def one_object_line(unit_name: str = "1", obj: str = "*") -> FiniteLinearCategory:
    """The degenerate category: one object, one-dimensional hom, unit composition."""
    return FiniteLinearCategory.make(
        [obj], {(obj, obj): [unit_name]},
        {((obj, obj, obj), unit_name, unit_name): {unit_name: ONE}},
        {obj: {unit_name: ONE}})


# ---------------------------------------------------------------------------
# Admissible diagrams
# ---------------------------------------------------------------------------


def _pin_letters(label: WLabel) -> dict[Pin, Letter]:
    low, up = label
    out = {}
    for i, letter in enumerate(low, start=1):
        out[Pin(OUTER, LOW, i)] = letter
    for i, letter in enumerate(up, start=1):
        out[Pin(OUTER, UP, i)] = letter
    return out


def _string_ok(a: Pin, b: Pin, letters) -> bool:
    (_, na), (_, nb) = letters[a], letters[b]
    if a.side != b.side:
        return na == nb
    left, right = (a, b) if a.idx < b.idx else (b, a)
    nl, nr = letters[left][1], letters[right][1]
    if a.side == UP:
        return nr == nl + 1
    return nl == nr + 1


def enumerate_winding(label: WLabel) -> list[Diagram]:
    """All loop-free noncrossing matchings compatible with the winding labels."""
    letters = _pin_letters(label)
    out = []
    for diagram in enumerate_kauffman(len(label[0]), len(label[1])):
        if all(_string_ok(a, b, letters) for a, b in diagram.strings):
            out.append(diagram)
    return out


def string_flow(a: Pin, b: Pin, letters) -> tuple[Pin, Pin]:
    """(source, target) of a string: flow points up where the label is even."""
    for p, q in ((a, b), (b, a)):
        n = letters[p][1]
        up_flow = n % 2 == 0
        departs = up_flow if p.side == LOW else not up_flow
        if departs:
            return p, q
    raise PluggingError(f"string {a}-{b} has no consistent flow")


def string_hom(a: Pin, b: Pin, letters) -> tuple[str, str]:
    src, dst = string_flow(a, b, letters)
    return letters[src][0], letters[dst][0]


def build_ld(diagram: Diagram, label: WLabel,
             cat: FiniteLinearCategory) -> list[tuple[str, ...]]:
    """Basis of the tensor space over the diagram's strings: one hom-basis
    name per string, in canonical string order."""
    letters = _pin_letters(label)
    factors = []
    for s in diagram.strings:
        x, y = string_hom(*s, letters)
        basis = cat.hom(x, y)
        factors.append(basis)
    return [tuple(combo) for combo in itertools.product(*factors)]


@dataclass(frozen=True)
class WindingSpace:
    """The direct sum over admissible diagrams of their string-hom tensors."""

    cat: FiniteLinearCategory
    label: WLabel

    def diagrams(self) -> list[Diagram]:
        return enumerate_winding(self.label)

    def basis(self) -> list[tuple[Diagram, tuple[str, ...]]]:
        out = []
        for d in self.diagrams():
            for combo in build_ld(d, self.label, self.cat):
                out.append((d, combo))
        return out

    @property
    def dim(self) -> int:
        return len(self.basis())

    def space(self):
        return ("winding", self.cat.objects, self.label)

    def vector(self, diagram: Diagram, combo: tuple[str, ...]) -> FreeVector:
        return FreeVector.basis(self.space(), (diagram, combo))


def p_space(cat: FiniteLinearCategory, label: WLabel) -> WindingSpace:
    return WindingSpace(cat, label)


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------


def w_compose(cat: FiniteLinearCategory,
              upper_label: WLabel, upper: FreeVector,
              lower_label: WLabel, lower: FreeVector) -> tuple[WLabel, FreeVector]:
    """Stack an element of P(v,w) on one of P(u,v); compose hom-elements
    along concatenated strings in flow order."""
    if upper_label[0] != lower_label[1]:
        raise PluggingError("stacked elements do not match at the seam")
    out_label = (lower_label[0], upper_label[1])
    out_space = WindingSpace(cat, out_label).space()
    out = FreeVector.zero(out_space)
    for (d_up, combo_up), c_up in upper.terms:
        for (d_low, combo_low), c_low in lower.terms:
            key_coeffs = _compose_keys(cat, upper_label, d_up, combo_up,
                                       lower_label, d_low, combo_low, out_label)
            for (dgm, combo), coeff in key_coeffs:
                out = out + FreeVector.make(out_space, {(dgm, combo): coeff * c_up * c_low})
    return out_label, out


def _compose_keys(cat, upper_label, d_up, combo_up, lower_label, d_low,
                  combo_low, out_label):
    template = compose_template(len(lower_label[0]), len(upper_label[0]),
                                len(upper_label[1]))
    stacked, trace = plug_traced(template, [d_up, d_low])
    if stacked.loops:
        raise PluggingError("winding composition produced a loop")

    letters = {1: _pin_letters(upper_label), 2: _pin_letters(lower_label)}
    out_letters = _pin_letters(out_label)
    up_hom = dict(zip(d_up.strings, combo_up))
    low_hom = dict(zip(d_low.strings, combo_low))

    factors: list[FreeVector] = []
    for new_string in stacked.strings:
        chain = trace.chains[new_string]
        segments = [(w, _pair(frm, to)) for (w, frm, to) in chain if w != "T"]
        src, dst = string_flow(*new_string, out_letters)
        # Orient the chain along the flow of the composite string.
        if chain[0][1] != src:
            segments = list(reversed(segments))
        total: Optional[FreeVector] = None
        cursor = None
        for world, old_pair in segments:
            elem_name = (up_hom if world == 1 else low_hom)[old_pair]
            x, y = string_hom(*old_pair, letters[world])
            piece = cat.vector(x, y, elem_name)
            if total is None:
                total = piece
                cursor = (x, y)
            else:
                if x != cursor[1]:
                    raise PluggingError(
                        f"flow mismatch along a concatenated string: {cursor} then {x}->{y}")
                total = cat.compose((cursor[0], cursor[1], y), piece, total)
                cursor = (cursor[0], y)
        if total is None:
            raise PluggingError("empty chain in winding composition")
        # Distribute tensor factors later; collect per-string vectors.
        factors.append(total)

    # Expand the product of per-string vectors into basis keys.
    keys = []
    def expand(i: int, acc_names: tuple, acc_coeff: Scalar):
        if i == len(factors):
            keys.append(((stacked_strip(stacked), acc_names), acc_coeff))
            return
        for name, coeff in factors[i].terms:
            expand(i + 1, acc_names + (name,), acc_coeff * coeff)
    expand(0, (), ONE)
    return keys


def stacked_strip(d: Diagram) -> Diagram:
    return Diagram.make(d.outer, d.inner, d.strings, d.loops, d.nesting)
