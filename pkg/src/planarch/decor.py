"""String decorations: colors, orientations, winding labels.

Orientations are stored as one `tail` pin per string (the end the flow leaves
from); the +/- sign read at a boundary pin is derived.  The sign convention:
a pin reads '+' when the strand's arrow points upward there, so on the outer
lower edge and on box upper edges '+' means the pin is a tail, elsewhere that
it is a head.

Free loops carry their own decoration: a color and a rotational sense
('ccw'/'cw'), since a directed circle in the plane is one or the other and
plugging has to track which.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .diagram import (LOW, UP, OUTER, BoxType, Diagram, Pin, PluggingError,
                      StringPair, _pair, boundary_cycle, compose_template,
                      plug_traced, tensor_template)
from .grid import CompileResult, GridPresentation, compile_grid_full

CCW, CW = "ccw", "cw"

# (color, sense); either entry may be None when that decoration layer is absent
LoopMark = tuple[Optional[str], Optional[str]]


class DecorationError(ValueError):
    """Inconsistent or incomplete string decorations."""


@dataclass(frozen=True)
class Decorated:
    """A diagram with per-string colors and/or orientations."""

    base: Diagram
    colors: Optional[tuple[tuple[StringPair, str], ...]] = None
    tails: Optional[tuple[tuple[StringPair, Pin], ...]] = None
    loop_marks: tuple[LoopMark, ...] = ()

    @staticmethod
    def make(base: Diagram,
             colors: Optional[Mapping[StringPair, str]] = None,
             tails: Optional[Mapping[StringPair, Pin]] = None,
             loop_marks: Sequence[LoopMark] = ()) -> "Decorated":
        strings = set(base.strings)
        if colors is not None:
            colors = {_pair(*k): v for k, v in colors.items()}
            if set(colors) != strings:
                raise DecorationError("need exactly one color per string")
        if tails is not None:
            tails = {_pair(*k): v for k, v in tails.items()}
            if set(tails) != strings:
                raise DecorationError("need exactly one direction per string")
            for s, tail in tails.items():
                if tail not in s:
                    raise DecorationError(f"tail {tail} is not an endpoint of {s}")
        if len(loop_marks) != base.loops:
            raise DecorationError(
                f"{base.loops} loops need {base.loops} loop marks, got {len(loop_marks)}")
        for color, sense in loop_marks:
            if sense not in (None, CCW, CW):
                raise DecorationError(f"bad loop sense {sense!r}")
            if (sense is None) != (tails is None):
                raise DecorationError("loop senses required iff strings are oriented")
            if (color is None) != (colors is None):
                raise DecorationError("loop colors required iff strings are colored")
        return Decorated(
            base,
            tuple(sorted(colors.items())) if colors is not None else None,
            tuple(sorted(tails.items())) if tails is not None else None,
            tuple(sorted(loop_marks, key=lambda lm: (str(lm[0]), str(lm[1])))),
        )

    # -- lookups -------------------------------------------------------------

    def color_of(self, string: StringPair) -> Optional[str]:
        if self.colors is None:
            return None
        return dict(self.colors)[_pair(*string)]

    def tail_of(self, string: StringPair) -> Pin:
        if self.tails is None:
            raise DecorationError("diagram is not oriented")
        return dict(self.tails)[_pair(*string)]

    def string_at(self, pin: Pin) -> StringPair:
        partner = self.base.partner[pin]
        return _pair(pin, partner)

    def flows_up_at(self, pin: Pin) -> bool:
        """True when the strand's arrow points upward at this pin."""
        tail = self.tail_of(self.string_at(pin))
        is_tail = tail == pin
        if pin.box == OUTER:
            return is_tail if pin.side == LOW else not is_tail
        return is_tail if pin.side == UP else not is_tail

    def sign_at(self, pin: Pin) -> str:
        return "+" if self.flows_up_at(pin) else "-"

    def pin_letter(self, pin: Pin):
        color = self.color_of(self.string_at(pin))
        sign = self.sign_at(pin) if self.tails is not None else None
        return (color, sign)

    def boundary(self) -> tuple[tuple, tuple]:
        """(lower word, upper word) of (color, sign) letters, left to right."""
        m, n = self.base.outer
        return (tuple(self.pin_letter(Pin(OUTER, LOW, i)) for i in range(1, m + 1)),
                tuple(self.pin_letter(Pin(OUTER, UP, i)) for i in range(1, n + 1)))

    def slot_decoration(self, j: int) -> tuple[tuple, tuple]:
        bm, bn = self.base.inner[j - 1]
        return (tuple(self.pin_letter(Pin(j, LOW, i)) for i in range(1, bm + 1)),
                tuple(self.pin_letter(Pin(j, UP, i)) for i in range(1, bn + 1)))

    # -- involutions ----------------------------------------------------------

    def reverse_orientations(self) -> "Decorated":
        """Flip every arrow, colors kept; flips each loop's sense."""
        if self.tails is None:
            raise DecorationError("diagram is not oriented")
        new_tails = {s: (s[1] if t == s[0] else s[0]) for s, t in self.tails}
        marks = tuple((c, CW if sense == CCW else CCW) for c, sense in self.loop_marks)
        return Decorated.make(self.base,
                              dict(self.colors) if self.colors is not None else None,
                              new_tails, marks)

    def star(self) -> "Decorated":
        """Reflect across a horizontal line after reversing arrows."""
        base = self.base
        m, n = base.outer

        def r(p: Pin) -> Pin:
            return Pin(p.box, 1 - p.side, p.idx)

        new_base = base._relabel(r, BoxType(n, m),
                                 tuple(BoxType(b.upper, b.lower) for b in base.inner),
                                 reverses=True)

        def map_pair(s: StringPair) -> StringPair:
            return _pair(r(s[0]), r(s[1]))

        colors = {map_pair(s): c for s, c in self.colors} if self.colors is not None else None
        tails = None
        if self.tails is not None:
            # star tail = image of the old head (reverse, then reflect)
            tails = {}
            for s, t in self.tails:
                head = s[1] if t == s[0] else s[0]
                tails[map_pair(s)] = r(head)
        # Reflection flips each sense; reversal flips it back.
        return Decorated.make(new_base, colors, tails, self.loop_marks)

    def transpose(self) -> "Decorated":
        base = self.base
        t_base = base.transpose()

        def rho(p: Pin) -> Pin:
            bm, bn = base.box_type(p.box)
            if p.side == LOW:
                return Pin(p.box, UP, bm + 1 - p.idx)
            return Pin(p.box, LOW, bn + 1 - p.idx)

        def map_pair(s: StringPair) -> StringPair:
            return _pair(rho(s[0]), rho(s[1]))

        colors = {map_pair(s): c for s, c in self.colors} if self.colors is not None else None
        tails = {map_pair(s): rho(t) for s, t in self.tails} if self.tails is not None else None
        return Decorated.make(t_base, colors, tails, self.loop_marks)

    def __mul__(self, other: "Decorated") -> "Decorated":
        return compose_decorated(self, other)

    def __matmul__(self, other: "Decorated") -> "Decorated":
        return tensor_decorated(self, other)


def decorate(base: Diagram, colors=None, tails=None, loop_marks=()) -> Decorated:
    return Decorated.make(base, colors, tails, loop_marks)


# ---------------------------------------------------------------------------
# Plugging with decorations
# ---------------------------------------------------------------------------


def plug_decorated(t: Decorated, parts: Sequence[Decorated]) -> Decorated:
    if t.base.slots != len(parts):
        raise PluggingError(f"expected {t.base.slots} parts, got {len(parts)}")
    if not parts:
        return t
    colored = t.colors is not None
    oriented = t.tails is not None
    for j, part in enumerate(parts, start=1):
        if (part.colors is not None) != colored or (part.tails is not None) != oriented:
            raise DecorationError("all pieces must carry the same decoration layers")
        bm, bn = t.base.inner[j - 1]
        for side, count in ((LOW, bm), (UP, bn)):
            for i in range(1, count + 1):
                slot_pin = Pin(j, side, i)
                part_pin = Pin(OUTER, side, i)
                if colored and t.color_of(t.string_at(slot_pin)) != \
                        part.color_of(part.string_at(part_pin)):
                    raise DecorationError(
                        f"color mismatch at slot {j} pin {side}:{i}")
                if oriented and t.sign_at(slot_pin) != part.sign_at(part_pin):
                    raise DecorationError(
                        f"orientation mismatch at slot {j} pin {side}:{i}")

    new_base, trace = plug_traced(t.base, parts=[p.base for p in parts])
    worlds = {"T": t}
    for j, part in enumerate(parts, start=1):
        worlds[j] = part

    colors = {} if colored else None
    tails = {} if oriented else None
    for pair, chain in trace.chains.items():
        world0, frm, to = chain[0]
        old = _pair(frm, to)
        if colored:
            colors[pair] = worlds[world0].color_of(old)
        if oriented:
            # The chain is walked from the first segment's `frm` end.
            aligned = worlds[world0].tail_of(old) == frm
            start_new = _relabel_endpoint(world0, frm, trace)
            end_new = pair[0] if pair[1] == start_new else pair[1]
            tails[pair] = start_new if aligned else end_new

    marks: list[LoopMark] = list(t.loop_marks)
    for part in parts:
        marks.extend(part.loop_marks)
    for cycle, left_interior in trace.loop_cycles:
        world0, frm, to = cycle[0]
        color = worlds[world0].color_of(_pair(frm, to)) if colored else None
        sense = None
        if oriented:
            aligned = worlds[world0].tail_of(_pair(frm, to)) == frm
            interior_on_flow_left = left_interior if aligned else not left_interior
            sense = CCW if interior_on_flow_left else CW
        marks.append((color, sense))

    return Decorated.make(new_base, colors, tails, marks)


def _relabel_endpoint(world, pin: Pin, trace) -> Pin:
    if world == "T":
        return pin
    return Pin(trace.slot_map[(world, pin.box)], pin.side, pin.idx)


def compose_decorated(s: Decorated, t: Decorated) -> Decorated:
    """Stack s over t, threading decorations through the seam."""
    template = compose_template(t.base.outer.lower, s.base.outer.lower,
                                s.base.outer.upper)
    deco = _decorate_template(template, [s, t])
    return plug_decorated(deco, [s, t])


def tensor_decorated(s: Decorated, t: Decorated) -> Decorated:
    template = tensor_template(s.base.outer.lower, s.base.outer.upper,
                               t.base.outer.lower, t.base.outer.upper)
    deco = _decorate_template(template, [s, t])
    return plug_decorated(deco, [s, t])


def _decorate_template(template: Diagram, parts: Sequence[Decorated]) -> Decorated:
    """Give a wiring template the decorations its parts force on it."""
    colored = parts[0].colors is not None if parts else False
    oriented = parts[0].tails is not None if parts else False
    colors = {} if colored else None
    tails = {} if oriented else None
    for pair in template.strings:
        # Find an endpoint lying on a slot; copy that part's boundary data.
        slot_end = pair[0] if pair[0].box != OUTER else pair[1]
        if slot_end.box == OUTER:
            raise PluggingError("template string misses every slot")
        j = slot_end.box
        part_pin = Pin(OUTER, slot_end.side, slot_end.idx)
        part = parts[j - 1]
        if colored:
            colors[pair] = part.color_of(part.string_at(part_pin))
        if oriented:
            part_up = part.flows_up_at(part_pin)
            other = pair[0] if pair[0] != slot_end else pair[1]
            if slot_end.side == LOW:
                # Below the slot: upward flow points into the box (head there).
                tails[pair] = other if part_up else slot_end
            else:
                # Above the slot: upward flow leaves the box (tail there).
                tails[pair] = slot_end if part_up else other
    return Decorated.make(template, colors, tails, ())


# ---------------------------------------------------------------------------
# Decorations from grid attributes
# ---------------------------------------------------------------------------


def _cell_flow(cells, key: str):
    """From o/c attributes along a path: (color, aligned-with-path or None)."""
    color = None
    aligned = None
    for kind, attrs, mark in cells:
        for k, v in attrs:
            if k == "c":
                if color is not None and color != v:
                    raise DecorationError(f"conflicting colors {color!r}/{v!r} on one string")
                color = v
            elif k == "o":
                if v not in "+-":
                    raise DecorationError(f"bad orientation {v!r}")
                forward = mark in ("up", "L2R")
                this = (v == "+") == forward
                if aligned is not None and aligned != this:
                    raise DecorationError("conflicting orientations on one string")
                aligned = this
    return color, aligned


def compile_decorated(grid: GridPresentation) -> Decorated:
    """Compile a grid, reading c= (color) and o= (orientation) attributes.

    Orientation attributes: on an id item '+' means the strand flows upward
    there; on a cup or cap, '+' means it flows left leg to right leg.
    """
    res = compile_grid_full(grid)
    any_color = any_orient = False
    per_string = {}
    for pair, (start, cells) in res.paths.items():
        color, aligned = _cell_flow(cells, pair)
        per_string[pair] = (color, aligned, start)
        any_color = any_color or color is not None
        any_orient = any_orient or aligned is not None
    loop_info = []
    for cells, _ in res.loops:
        color, aligned = _cell_flow(cells, None)
        loop_info.append((color, aligned))
        any_color = any_color or color is not None
        any_orient = any_orient or aligned is not None

    colors = {} if any_color else None
    tails = {} if any_orient else None
    for pair, (color, aligned, start) in per_string.items():
        if any_color:
            if color is None:
                raise DecorationError(f"string {pair[0]}-{pair[1]} has no color")
            colors[pair] = color
        if any_orient:
            if aligned is None:
                raise DecorationError(f"string {pair[0]}-{pair[1]} has no orientation")
            tails[pair] = start if aligned else (pair[1] if start == pair[0] else pair[0])
    marks = []
    for color, aligned in loop_info:
        if any_color and color is None:
            raise DecorationError("a free loop has no color")
        if any_orient and aligned is None:
            raise DecorationError("a free loop has no orientation")
        # The recorded loop traversal is clockwise.
        sense = None
        if any_orient:
            sense = CW if aligned else CCW
        marks.append((color if any_color else None, sense))
    return Decorated.make(res.diagram, colors, tails, marks)


# ---------------------------------------------------------------------------
# Alternation
# ---------------------------------------------------------------------------


def disk_word(deco: Decorated) -> tuple:
    """Boundary letters in disk order; lower-edge signs flipped so that '+'
    reads 'arrow pointing out of the disk'."""
    out = []
    for p in boundary_cycle(*deco.base.outer):
        color, sign = deco.pin_letter(p)
        if sign is not None and p.side == LOW:
            sign = "+" if sign == "-" else "-"
        out.append((color, sign))
    return tuple(out)


def is_alternating_word(signs: Sequence[str]) -> bool:
    """Circularly alternating +,-; the empty word counts as alternating."""
    k = len(signs)
    if k % 2:
        return False
    return all(signs[i] != signs[(i + 1) % k] for i in range(k))


def boundary_parity(deco: Decorated) -> str:
    """'+' when the leftmost boundary arrows point up (positive parity)."""
    m, n = deco.base.outer
    if m:
        return deco.sign_at(Pin(OUTER, LOW, 1))
    if n:
        return deco.sign_at(Pin(OUTER, UP, 1))
    return "+"


def is_alternating(deco: Decorated, positive: Optional[bool] = None) -> bool:
    """Alternating boundary; with positive=True additionally starts with +."""
    word = disk_word(deco)
    if not is_alternating_word([sign for _, sign in word]):
        return False
    if positive:
        return boundary_parity(deco) == "+"
    return True


def is_alternating_diagram(deco: Decorated, positive: Optional[bool] = None) -> bool:
    """Every box (outer and inner) carries an alternating decoration."""
    if not is_alternating(deco, positive):
        return False
    for j in range(1, deco.base.slots + 1):
        lower, upper = deco.slot_decoration(j)
        word = []
        bm, bn = deco.base.inner[j - 1]
        for i in range(1, bm + 1):
            sign = deco.sign_at(Pin(j, LOW, i))
            word.append("+" if sign == "-" else "-")
        for i in range(bn, 0, -1):
            word.append(deco.sign_at(Pin(j, UP, i)))
        if not is_alternating_word(word):
            return False
        if positive:
            first = deco.sign_at(Pin(j, LOW, 1)) if bm else \
                (deco.sign_at(Pin(j, UP, 1)) if bn else "+")
            if first != "+":
                return False
    return True


# ---------------------------------------------------------------------------
# Half-winding
# ---------------------------------------------------------------------------

_TURN = {("cap", "L2R"): -1, ("cap", "R2L"): +1,
         ("cup", "L2R"): +1, ("cup", "R2L"): -1}


def half_winding(grid: GridPresentation, string: StringPair,
                 start: Optional[Pin] = None) -> int:
    """Net tangent rotation (in units of pi) of a string drawn in a grid."""
    res = compile_grid_full(grid)
    key = _pair(*string)
    if key not in res.paths:
        raise DecorationError(f"{key} is not a string of this grid")
    path_start, cells = res.paths[key]
    w = sum(_TURN.get((kind, mark), 0) for kind, _, mark in cells)
    if start is not None and start != path_start:
        if start not in key:
            raise DecorationError(f"{start} is not an endpoint of {key}")
        w = -w
    return w


def arc_half_winding(outer: BoxType, string: StringPair) -> int:
    """Half-winding of a boundary-to-boundary string with no boxes in the way,
    traversed from its first (sorted) endpoint."""
    a, b = _pair(*string)
    if a.side != b.side:
        return 0
    # a is the left endpoint (sorted by index on the same side).
    return +1 if a.side == UP else -1


@dataclass(frozen=True)
class WindingDiagram:
    """A decorated diagram with an integer label on every boundary/box pin."""

    deco: Decorated
    labels: tuple[tuple[Pin, int], ...]

    @staticmethod
    def make(deco: Decorated, labels: Mapping[Pin, int]) -> "WindingDiagram":
        pins = set(deco.base.all_darts())
        if set(labels) != pins:
            raise DecorationError("every pin needs exactly one winding label")
        return WindingDiagram(deco, tuple(sorted(labels.items())))

    def label(self, pin: Pin) -> int:
        return dict(self.labels)[pin]


def is_winding(wd: WindingDiagram, grid: Optional[GridPresentation] = None) -> bool:
    """Loop-free, and every string satisfies w = n1 - n0 along its traversal."""
    base = wd.deco.base
    if base.loops:
        return False
    grid = grid if grid is not None else base.witness
    for s in base.strings:
        if grid is not None:
            w = half_winding(grid, s, start=s[0])
        elif not base.inner:
            w = arc_half_winding(base.outer, s)
        else:
            raise DecorationError("winding check needs a grid drawing for boxed diagrams")
        if w != wd.label(s[1]) - wd.label(s[0]):
            return False
    return True
