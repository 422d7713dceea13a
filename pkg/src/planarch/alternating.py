"""Alternating decorations and the odd-to-even extension of representations.

Boundary signs alternate around every box; objects split by the direction of
their leftmost arrows ('+' parity when they point up).  A representation
defined only on positive objects extends uniquely to all alternating objects
when anticlockwise loops carry a nonzero scalar: odd objects embed into the
positive object one step wider (tensor an upward strand on the left), and the
action routes through a bending pod C that closes exactly one anticlockwise
loop when fed an embedded element.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .decor import (CCW, CW, Decorated, DecorationError, compose_decorated,
                    plug_decorated, tensor_decorated)
from .diagram import (LOW, UP, OUTER, BoxType, Diagram, Pin, _pair, identity,
                      spoke)
from .reps import (CheckReport, Representation, decorated_boundary_label,
                   decorated_slot_label)
from .scalars import ONE, FreeVector, MultilinearMap, Scalar

Sign = str
Label = tuple[tuple[Sign, ...], tuple[Sign, ...]]


def flip(sign: Sign) -> Sign:
    return "-" if sign == "+" else "+"


def alternating_label(m: int, n: int, parity: Sign = "+") -> Label:
    """The unique alternating (m,n) sign words with given leftmost direction."""
    if (m + n) % 2:
        raise DecorationError(f"({m},{n}) admits no alternating decoration")
    v = tuple(parity if i % 2 == 0 else flip(parity) for i in range(m))
    w = tuple(parity if i % 2 == 0 else flip(parity) for i in range(n))
    return (v, w)


def label_parity(label: Label) -> Sign:
    v, w = label
    if v:
        return v[0]
    if w:
        return w[0]
    return "+"


def label_shape(label: Label) -> BoxType:
    return BoxType(len(label[0]), len(label[1]))


# ---------------------------------------------------------------------------
# Primitive pods
# ---------------------------------------------------------------------------


def identity_pod(word: Sequence[Sign]) -> Decorated:
    base = identity(len(word))
    tails = {}
    for i, sign in enumerate(word, start=1):
        s = _pair(Pin(OUTER, LOW, i), Pin(OUTER, UP, i))
        tails[s] = Pin(OUTER, LOW, i) if sign == "+" else Pin(OUTER, UP, i)
    return Decorated.make(base, None, tails, ())


def up_strand() -> Decorated:
    return identity_pod(("+",))


def cup_pod(first: Sign) -> Decorated:
    """(0,2) pod with upper word (first, flip(first))."""
    base = Diagram.make((0, 2), (), [(Pin(OUTER, UP, 1), Pin(OUTER, UP, 2))])
    s = base.strings[0]
    tail = Pin(OUTER, UP, 2) if first == "+" else Pin(OUTER, UP, 1)
    return Decorated.make(base, None, {s: tail}, ())


def cap_pod(first: Sign) -> Decorated:
    """(2,0) pod with lower word (first, flip(first))."""
    base = Diagram.make((2, 0), (), [(Pin(OUTER, LOW, 1), Pin(OUTER, LOW, 2))])
    s = base.strings[0]
    tail = Pin(OUTER, LOW, 1) if first == "+" else Pin(OUTER, LOW, 2)
    return Decorated.make(base, None, {s: tail}, ())


def spoke_pod(label: Label) -> Decorated:
    """One slot of the given alternating type, wired straight through."""
    v, w = label
    base = spoke((len(v), len(w)))
    tails = {}
    for i, sign in enumerate(v, start=1):
        s = _pair(Pin(OUTER, LOW, i), Pin(1, LOW, i))
        tails[s] = Pin(OUTER, LOW, i) if sign == "+" else Pin(1, LOW, i)
    for i, sign in enumerate(w, start=1):
        s = _pair(Pin(1, UP, i), Pin(OUTER, UP, i))
        tails[s] = Pin(1, UP, i) if sign == "+" else Pin(OUTER, UP, i)
    return Decorated.make(base, None, tails, ())


def loop_pod(sense: str) -> Decorated:
    return Decorated.make(Diagram.make((0, 0), loops=1), None, {}, [(None, sense)])


def c_pod(m: int, n: int) -> Decorated:
    """The bending pod: negative (m,n) outside, positive (m+1,n+1) slot.

    The slot's leftmost lower and upper pins join around the left side, so
    plugging an embedded element 1 (x) a closes one anticlockwise loop.
    """
    strings = [(Pin(1, LOW, 1), Pin(1, UP, 1))]
    tails = {_pair(Pin(1, LOW, 1), Pin(1, UP, 1)): Pin(1, UP, 1)}
    for i in range(1, m + 1):
        s = (Pin(1, LOW, i + 1), Pin(OUTER, LOW, i))
        strings.append(s)
        # outer sign alternates -,+,-,... so odd i has a head at the boundary
        tails[_pair(*s)] = Pin(1, LOW, i + 1) if i % 2 else Pin(OUTER, LOW, i)
    for i in range(1, n + 1):
        s = (Pin(1, UP, i + 1), Pin(OUTER, UP, i))
        strings.append(s)
        tails[_pair(*s)] = Pin(OUTER, UP, i) if i % 2 else Pin(1, UP, i + 1)
    base = Diagram.make((m, n), [(m + 1, n + 1)], strings)
    return Decorated.make(base, None, tails, ())


# ---------------------------------------------------------------------------
# Loop scaling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopPolicy:
    """Scalar per anticlockwise loop (and per clockwise, defaulting equal)."""

    d_minus: Scalar
    d_plus: Optional[Scalar] = None

    @property
    def clockwise(self) -> Scalar:
        return self.d_plus if self.d_plus is not None else self.d_minus

    def require_invertible(self):
        if self.d_minus.is_zero():
            raise DecorationError("the anticlockwise loop scalar must be nonzero")


def strip_ccw_loops(morphism: Decorated) -> tuple[Decorated, int]:
    """Remove anticlockwise loop marks; return the stripped pod and count."""
    kept = [mk for mk in morphism.loop_marks if mk[1] != CCW]
    removed = len(morphism.loop_marks) - len(kept)
    base = morphism.base
    new_base = Diagram.make(base.outer, base.inner, base.strings,
                            base.loops - removed, base.nesting)
    return Decorated.make(new_base,
                          dict(morphism.colors) if morphism.colors is not None else None,
                          dict(morphism.tails) if morphism.tails is not None else None,
                          kept), removed


def check_loop_scaling(rep: Representation, policy: LoopPolicy,
                       samples: Sequence[Decorated],
                       rng: Optional[random.Random] = None,
                       tuples_per_sample: int = 8) -> CheckReport:
    """pi_T equals d^l pi_{T0} where T0 drops the l anticlockwise loops."""
    from .reps import _basis_tuples
    report = CheckReport("loop-scaling")
    for morphism in samples:
        stripped, l = strip_ccw_loops(morphism)
        scale = policy.d_minus ** l
        m1 = rep.action(morphism)
        m0 = rep.action(stripped)
        labels = rep.slot_labels(morphism)
        tuples = list(_basis_tuples(rep, labels, rng, tuples_per_sample)) or \
            ([()] if not labels else [])
        for keys in tuples:
            args = [rep.basis_vector(l2, k) for l2, k in zip(labels, keys)]
            lhs = m1.apply(args)
            rhs = m0.apply(args).scale(scale)
            report.record({"morphism": str(morphism), "loops": l}, lhs, rhs)
    return report


# ---------------------------------------------------------------------------
# Restriction and extension
# ---------------------------------------------------------------------------


class PositiveRestriction(Representation):
    """A representation seen only on positive alternating objects."""

    def __init__(self, full: Representation):
        self.full = full
        self.tag = full.tag

    def _check(self, label: Label):
        if label_parity(label) != "+":
            raise DecorationError(f"{label} is not a positive object")

    def object_space(self, label):
        self._check(label)
        return self.full.object_space(label)

    def outer_label(self, morphism):
        label = self.full.outer_label(morphism)
        self._check(label)
        return label

    def slot_labels(self, morphism):
        labels = self.full.slot_labels(morphism)
        for l in labels:
            self._check(l)
        return labels

    def plug_morphisms(self, morphism, parts):
        return self.full.plug_morphisms(morphism, parts)

    def action(self, morphism):
        self.outer_label(morphism)
        self.slot_labels(morphism)
        return self.full.action(morphism)


def restrict_to_positive(rep: Representation) -> PositiveRestriction:
    return PositiveRestriction(rep)


class ExtendedRepresentation(Representation):
    """Extension of a positive-object representation to all alternating ones.

    Odd-object vectors are kept in embedded form: an element of the odd
    (m,n) space is stored as its image 1 (x) a inside the positive
    (m+1,n+1) space.  Actions plug the bending pod into every odd slot, pad
    odd outputs with a left strand, and divide by d per odd slot.
    """

    def __init__(self, plus: Representation, policy: LoopPolicy):
        policy.require_invertible()
        self.plus = plus
        self.policy = policy
        self.tag = ("extended", plus.tag)

    @staticmethod
    def _embedded_label(label: Label) -> Label:
        m, n = label_shape(label)
        return alternating_label(m + 1, n + 1, "+")

    def space(self, label):
        if label_parity(label) == "+":
            return self.plus.space(label)
        return self.plus.space(self._embedded_label(label))

    def object_space(self, label):
        if label_parity(label) == "+":
            return self.plus.object_space(label)
        raise DecorationError(
            "odd spaces are presented by spanning vectors; use odd_spanning()")

    def dim(self, label) -> int:
        if label_parity(label) == "+":
            return self.plus.dim(label)
        return len(self.odd_spanning(label))

    def odd_spanning(self, label: Label) -> list[FreeVector]:
        """Images pi(1 (x) C)(b) over the wider positive basis: they span the
        embedded odd space."""
        m, n = label_shape(label)
        wide = self._embedded_label(label)
        projector = self.action_on_positive(tensor_decorated(up_strand(), c_pod(m, n)))
        out = []
        seen = set()
        for b in self.plus.object_space(wide):
            v = projector.apply([self.plus.basis_vector(wide, b)])
            if not v.is_zero() and v.terms not in seen:
                seen.add(v.terms)
                out.append(v)
        return out

    def action_on_positive(self, morphism: Decorated) -> MultilinearMap:
        return self.plus.action(morphism)

    def outer_label(self, morphism: Decorated) -> Label:
        return decorated_boundary_label(morphism)

    def slot_labels(self, morphism: Decorated) -> list[Label]:
        return [decorated_slot_label(morphism, j)
                for j in range(1, morphism.base.slots + 1)]

    def plug_morphisms(self, morphism, parts):
        return plug_decorated(morphism, list(parts))

    def action(self, morphism: Decorated) -> MultilinearMap:
        slot_labels = self.slot_labels(morphism)
        out_label = self.outer_label(morphism)
        parts = []
        odd_slots = 0
        for label in slot_labels:
            if label_parity(label) == "+":
                parts.append(spoke_pod(label))
            else:
                m, n = label_shape(label)
                parts.append(c_pod(m, n))
                odd_slots += 1
        padded = plug_decorated(morphism, parts)
        if label_parity(out_label) != "+":
            padded = tensor_decorated(up_strand(), padded)
        inner = self.plus.action(padded)
        scale = self.policy.d_minus ** (-odd_slots) if odd_slots else ONE

        sources = tuple(self.space(l) for l in slot_labels)
        target = self.space(out_label)

        def rule(keys: tuple) -> FreeVector:
            return inner.rule(keys).scale(scale)

        return MultilinearMap(sources, target, rule)


def extend_adplus(plus: Representation, policy: LoopPolicy) -> ExtendedRepresentation:
    return ExtendedRepresentation(plus, policy)


def embed_odd(key: Decorated) -> Decorated:
    """The embedding a -> 1 (x) a of an odd pod into the wider positive object."""
    return tensor_decorated(up_strand(), key)


# ---------------------------------------------------------------------------
# Random alternating morphisms
# ---------------------------------------------------------------------------


def random_alternating_word(rng: random.Random, length: int, first: Sign) -> tuple:
    return tuple(first if i % 2 == 0 else flip(first) for i in range(length))


def random_ad_morphism(rng: random.Random, *, layers: int = 3, max_width: int = 6,
                       max_boxes: int = 2, positive: bool = False) -> Decorated:
    """A random alternating pod built by stacking primitive layers."""
    from .decor import is_alternating_diagram
    for _ in range(200):
        pod = _random_ad_attempt(rng, layers, max_width, max_boxes, positive)
        if is_alternating_diagram(pod, positive=positive or None):
            return pod
    raise RuntimeError("alternating sampler failed to produce a valid pod")


def _random_ad_attempt(rng, layers, max_width, max_boxes, positive) -> Decorated:
    width = rng.randrange(0, max_width // 2 + 1) * 2
    first = "+" if positive or rng.random() < 0.5 else "-"
    word = list(random_alternating_word(rng, width, first))
    pod = identity_pod(tuple(word))
    boxes = 0
    for _ in range(layers):
        items: list[Decorated] = []
        new_word: list[Sign] = []
        i = 0
        # Invariant: once something is emitted, the next emitted sign is
        # forced (e); consuming even segments never disturbs it.
        while i < len(word) or not items:
            remaining = len(word) - i
            e = flip(new_word[-1]) if new_word else None
            emit_sign = e if e is not None else \
                (word[i] if remaining else ("+" if positive else rng.choice("+-")))
            opts = (["id"] * 3 if remaining else [])
            if remaining >= 2:
                opts += ["cap"] * 2
            if len(new_word) + remaining + 2 <= max_width:
                opts += ["cup"] * 2
            if boxes < max_boxes and (not positive or emit_sign == "+"):
                opts += ["box"]
            if not opts:
                opts = ["cup"]
            kind = rng.choice(opts)
            if kind == "id":
                items.append(identity_pod((word[i],)))
                new_word.append(word[i])
                i += 1
            elif kind == "cap":
                items.append(cap_pod(word[i]))
                i += 2
            elif kind == "cup":
                items.append(cup_pod(emit_sign))
                new_word += [emit_sign, flip(emit_sign)]
            else:
                take = rng.randrange(0, remaining // 2 + 1) * 2
                consumed = tuple(word[i:i + take])
                room = max(0, (max_width - len(new_word)) // 2)
                emit_len = rng.randrange(0, room + 1) * 2
                emitted = random_alternating_word(rng, emit_len, emit_sign)
                items.append(spoke_pod((consumed, emitted)))
                new_word += list(emitted)
                i += take
                boxes += 1
            if not word and items:
                break
        layer = items[0]
        for item in items[1:]:
            layer = tensor_decorated(layer, item)
        pod = compose_decorated(layer, pod)
        word = list(new_word)
    return pod
