"""Grid notation: the textual input format for diagrams.

A grid is a stack of slices read bottom-to-top; each slice is a row of items
read left-to-right:

    diagram := slice (";" slice)*
    slice   := item ("," item)*
    item    := "id" | "cup" | "cap" | "box:" NAME "(" INT "," INT ")"

Any item may carry an attribute suffix ``[key=value, ...]`` (colors,
orientations, winding labels; see the decorations module).  ``cup`` opens two
strands, ``cap`` closes two, ``id`` passes one through, and a box consumes its
lower pins and emits its upper pins.  Boxes become slots numbered in order of
appearance (bottom-to-top, left-to-right); names are grid-level labels only.

Compilation sweeps the slices once, building the string matching, counting
closed loops, and tracking the regions between strands so that the nesting of
disconnected islands comes out right.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .diagram import (LOW, UP, OUTER, BoxType, Diagram, Face, Pin,
                      PlanarityError, _pair, resolve_embedding)


class ParseError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


@dataclass(frozen=True)
class Item:
    kind: str                               # 'id' | 'cup' | 'cap' | 'box'
    name: Optional[str] = None              # box name
    shape: Optional[BoxType] = None         # box type
    attrs: tuple[tuple[str, str], ...] = ()

    @property
    def n_in(self) -> int:
        return {"id": 1, "cup": 0, "cap": 2}.get(self.kind, self.shape.lower if self.shape else 0)

    @property
    def n_out(self) -> int:
        return {"id": 1, "cup": 2, "cap": 0}.get(self.kind, self.shape.upper if self.shape else 0)

    def attr(self, key: str) -> Optional[str]:
        for k, v in self.attrs:
            if k == key:
                return v
        return None

    def __str__(self) -> str:
        if self.kind == "box":
            base = f"box:{self.name}({self.shape.lower},{self.shape.upper})"
        else:
            base = self.kind
        if self.attrs:
            base += "[" + ",".join(f"{k}={v}" for k, v in self.attrs) + "]"
        return base


@dataclass(frozen=True)
class GridPresentation:
    slices: tuple[tuple[Item, ...], ...]

    def __post_init__(self):
        width = None
        names = set()
        for s, row in enumerate(self.slices, start=1):
            w_in = sum(it.n_in for it in row)
            w_out = sum(it.n_out for it in row)
            if width is not None and w_in != width:
                raise PlanarityError(
                    f"slice {s} consumes {w_in} strands but slice {s - 1} produced {width}")
            width = w_out
            for it in row:
                if it.kind == "box":
                    if it.name in names:
                        raise PlanarityError(f"slot name {it.name!r} reused")
                    names.add(it.name)

    @property
    def bottom_width(self) -> int:
        return sum(it.n_in for it in self.slices[0]) if self.slices else 0

    @property
    def top_width(self) -> int:
        return sum(it.n_out for it in self.slices[-1]) if self.slices else 0

    def boxes(self) -> list[tuple[int, int, Item]]:
        """(slice index, item index, item) for every box, in slot order."""
        out = []
        for s, row in enumerate(self.slices):
            for i, it in enumerate(row):
                if it.kind == "box":
                    out.append((s, i, it))
        return out

    def slot_names(self) -> list[str]:
        return [it.name for _, _, it in self.boxes()]

    def __str__(self) -> str:
        return ";".join(",".join(str(it) for it in row) for row in self.slices)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str):
        raise ParseError(self.line, self.col, message)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_ws(self):
        while self.peek() in " \t\r\n" and self.peek():
            self.advance()

    def expect(self, ch: str):
        self.skip_ws()
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.advance()

    def word(self) -> str:
        self.skip_ws()
        if not (self.peek().isalpha() or self.peek() == "_"):
            self.error("expected a name")
        out = ""
        while self.peek().isalnum() or self.peek() == "_":
            out += self.advance()
        return out

    def integer(self) -> int:
        self.skip_ws()
        out = ""
        if self.peek() in "+-":
            out += self.advance()
        if not self.peek().isdigit():
            self.error("expected an integer")
        while self.peek().isdigit():
            out += self.advance()
        return int(out)


def parse_grid(text: str) -> GridPresentation:
    sc = _Scanner(text)
    slices: list[tuple[Item, ...]] = []
    row: list[Item] = []
    sc.skip_ws()
    if not sc.peek():
        sc.error("empty grid")
    while True:
        row.append(_parse_item(sc))
        sc.skip_ws()
        ch = sc.peek()
        if ch == ",":
            sc.advance()
        elif ch == ";":
            sc.advance()
            slices.append(tuple(row))
            row = []
        elif not ch:
            slices.append(tuple(row))
            break
        else:
            sc.error(f"expected ',', ';' or end of input, found {ch!r}")
    try:
        return GridPresentation(tuple(slices))
    except PlanarityError as exc:
        raise ParseError(sc.line, sc.col, str(exc)) from exc


def _parse_item(sc: _Scanner) -> Item:
    sc.skip_ws()
    word = sc.word()
    name = None
    shape = None
    if word == "box":
        sc.expect(":")
        name = sc.word()
        sc.expect("(")
        m = sc.integer()
        sc.expect(",")
        n = sc.integer()
        sc.expect(")")
        if m < 0 or n < 0:
            sc.error("box pin counts must be non-negative")
        shape = BoxType(m, n)
    elif word not in ("id", "cup", "cap"):
        sc.error(f"unknown item {word!r}")
    attrs: list[tuple[str, str]] = []
    sc_pos = sc.pos
    sc.skip_ws()
    if sc.peek() == "[":
        sc.advance()
        while True:
            key = sc.word()
            sc.expect("=")
            sc.skip_ws()
            val = ""
            while sc.peek() not in ",]" and sc.peek() not in " \t\r\n" and sc.peek():
                val += sc.advance()
            if not val:
                sc.error("empty attribute value")
            attrs.append((key, val))
            sc.skip_ws()
            if sc.peek() == ",":
                sc.advance()
            elif sc.peek() == "]":
                sc.advance()
                break
            else:
                sc.error("expected ',' or ']' in attributes")
    else:
        sc.pos = sc_pos
    return Item(word if word != "box" else "box", name, shape, tuple(attrs))


# ---------------------------------------------------------------------------
# Compilation
# ---------------------------------------------------------------------------

# A cell on a string's path: (kind, attrs, mark). For 'id' the mark is 'up' or
# 'down' (path direction); for 'cup'/'cap' it is 'L2R' or 'R2L'.
Cell = tuple[str, tuple[tuple[str, str], ...], str]

_FLIP = {"up": "down", "down": "up", "L2R": "R2L", "R2L": "L2R"}


class _Ref:
    """Mutable handle for an open strand end (token + which path end)."""
    __slots__ = ("tok", "end")

    def __init__(self, tok: "_Tok", end: int):
        self.tok = tok
        self.end = end


class _Tok:
    __slots__ = ("cells", "ends", "refs")

    def __init__(self):
        self.cells: list[Cell] = []
        # ends[e]: Pin once attached, None while open
        self.ends: list[Optional[Pin]] = [None, None]
        # refs[e]: live _Ref for an open end
        self.refs: list[Optional[_Ref]] = [None, None]

    def open_ref(self, end: int) -> _Ref:
        ref = _Ref(self, end)
        self.refs[end] = ref
        return ref

    def reverse(self):
        self.cells = [(k, a, _FLIP[m]) for k, a, m in reversed(self.cells)]
        self.ends.reverse()
        self.refs.reverse()
        for e in (0, 1):
            if self.refs[e] is not None:
                self.refs[e].end = e


@dataclass
class CompileResult:
    diagram: Diagram
    # string pair -> (start pin, cells ordered from that pin)
    paths: dict[tuple[Pin, Pin], tuple[Pin, list[Cell]]]
    # per closed loop: cells in clockwise traversal, and whether the left of
    # that traversal is the interior side (always False for clockwise, kept
    # for uniformity with plugging traces)
    loops: list[tuple[list[Cell], bool]]
    slot_names: dict[str, int]
    # per pin: winding label attributes found on boundary ids
    pin_labels: dict[Pin, int]
    # region class bordered by each face of each component
    face_region: dict[tuple[int, Face], object] = field(default_factory=dict)
    # per horizontal level (0 = below first slice), the region class of each gap
    gap_levels: list[list[object]] = field(default_factory=list)


class _Region:
    """Union-find node for a region between strands."""
    __slots__ = ("parent",)

    def __init__(self):
        self.parent = self

    def find(self) -> "_Region":
        node = self
        while node.parent is not node:
            node.parent = node.parent.parent
            node = node.parent
        return node

    def union(self, other: "_Region"):
        ra, rb = self.find(), other.find()
        if ra is not rb:
            ra.parent = rb


def compile_grid(grid: GridPresentation) -> Diagram:
    return compile_grid_full(grid).diagram


def compile_grid_full(grid: GridPresentation) -> CompileResult:
    m = grid.bottom_width
    n = grid.top_width

    strands: list[_Ref] = []
    gaps: list[_Region] = [_Region() for _ in range(m + 1)]
    outer_empty = gaps[0]
    dart_side: dict[Pin, tuple[_Region, _Region]] = {}
    box_host: dict[int, _Region] = {}
    loop_records: list[tuple[_Region, _Region, list[Cell]]] = []
    strings: list[tuple[Pin, Pin]] = []
    paths: dict[tuple[Pin, Pin], tuple[Pin, list[Cell]]] = {}
    slot_names: dict[str, int] = {}
    pin_labels: dict[Pin, int] = {}
    inner_types: list[BoxType] = []

    def finish(tok: _Tok):
        a, b = tok.ends
        pair = _pair(a, b)
        strings.append(pair)
        if a <= b:
            paths[pair] = (a, tok.cells)
        else:
            tok.reverse()
            paths[pair] = (b, tok.cells)

    def attach(ref: _Ref, pin: Pin):
        tok = ref.tok
        tok.ends[ref.end] = pin
        tok.refs[ref.end] = None
        if tok.ends[0] is not None and tok.ends[1] is not None:
            finish(tok)

    def new_pinned(pin: Pin) -> _Ref:
        tok = _Tok()
        tok.ends[0] = pin
        return tok.open_ref(1)

    gap_history: list[list[_Region]] = [list(gaps)]

    # Bottom boundary.
    for i in range(1, m + 1):
        pin = Pin(OUTER, LOW, i)
        strands.append(new_pinned(pin))
        dart_side[pin] = (gaps[i - 1], gaps[i])

    for row in grid.slices:
        new_strands: list[_Ref] = []
        new_gaps: list[_Region] = [gaps[0]]
        c = 0  # cursor into old strands
        for item in row:
            if item.kind == "id":
                ref = strands[c]
                cell: Cell = ("id", item.attrs, "up" if ref.end == 1 else "down")
                if ref.end == 1:
                    ref.tok.cells.append(cell)
                else:
                    ref.tok.cells.insert(0, cell)
                new_strands.append(ref)
                new_gaps.append(gaps[c + 1])
                c += 1
            elif item.kind == "cup":
                tok = _Tok()
                tok.cells.append(("cup", item.attrs, "L2R"))
                g = new_gaps[-1]
                new_strands.append(tok.open_ref(0))
                new_strands.append(tok.open_ref(1))
                new_gaps.append(_Region())
                new_gaps.append(g)
            elif item.kind == "cap":
                ref_a, ref_b = strands[c], strands[c + 1]
                west = new_gaps[-1]
                middle = gaps[c + 1]
                east = gaps[c + 2]
                west.union(east)
                tok_a, tok_b = ref_a.tok, ref_b.tok
                if tok_a is tok_b:
                    # Closed loop; record cells in clockwise traversal
                    # (arriving up the left leg at this, its topmost, cap).
                    if ref_a.end == 0:
                        tok_a.reverse()
                    cells = tok_a.cells + [("cap", item.attrs, "L2R")]
                    loop_records.append((west, middle, cells))
                else:
                    if ref_a.end == 0:
                        tok_a.reverse()
                    if ref_b.end == 1:
                        tok_b.reverse()
                    tok_a.cells = tok_a.cells + [("cap", item.attrs, "L2R")] + tok_b.cells
                    tok_a.ends[1] = tok_b.ends[1]
                    tok_a.refs[1] = tok_b.refs[1]
                    if tok_a.refs[1] is not None:
                        tok_a.refs[1].tok = tok_a
                        tok_a.refs[1].end = 1
                    if tok_a.ends[0] is not None and tok_a.ends[1] is not None:
                        finish(tok_a)
                c += 2
            else:  # box
                slot = len(inner_types) + 1
                slot_names[item.name] = slot
                inner_types.append(item.shape)
                mb, nb = item.shape
                g_w = new_gaps[-1]
                g_e = gaps[c + mb] if mb else g_w
                for t in range(1, mb + 1):
                    pin = Pin(slot, LOW, t)
                    west = g_w if t == 1 else gaps[c + t - 1]
                    east = gaps[c + t] if t < mb else g_e
                    dart_side[pin] = (west, east)
                    attach(strands[c + t - 1], pin)
                if nb == 0:
                    g_w.union(g_e)
                    if mb == 0:
                        box_host[slot] = g_w
                else:
                    fresh = [_Region() for _ in range(nb - 1)]
                    row_gaps = [g_w] + fresh + [g_e]
                    for t in range(1, nb + 1):
                        pin = Pin(slot, UP, t)
                        new_strands.append(new_pinned(pin))
                        dart_side[pin] = (row_gaps[t - 1], row_gaps[t])
                        new_gaps.append(row_gaps[t])
                c += mb
        if c != len(strands):
            raise PlanarityError("slice consumed fewer strands than available")
        strands = new_strands
        gaps = new_gaps
        gap_history.append(list(gaps))

    # Top boundary.
    if len(strands) != n:
        raise PlanarityError("top boundary width mismatch")
    for i in range(1, n + 1):
        pin = Pin(OUTER, UP, i)
        dart_side[pin] = (gaps[i - 1], gaps[i])
        attach(strands[i - 1], pin)

    _collect_pin_labels(grid, pin_labels)

    # ---- assemble ----------------------------------------------------------
    probe = Diagram(BoxType(m, n), tuple(inner_types),
                    tuple(sorted(strings)), 0, ())
    comp_faces: dict[int, list[Face]] = {}
    face_region: dict[tuple[int, Face], object] = {}
    for comp in probe.components:
        faces = probe.faces_of(comp)
        comp_faces[comp] = faces
        for f in faces:
            if f is None:
                verts = probe.components[comp]
                box = next(iter(verts))
                region = outer_empty if box == OUTER else box_host[box]
            else:
                d = f
                west, east = dart_side[d]
                # The face of a dart is the region on its right.
                region = east if (d.box == OUTER) == (d.side == LOW) else west
            face_region[(comp, f)] = region.find()

    loop_sides = [(w.find(), mid.find()) for w, mid, _ in loop_records]
    nesting, left_interior = resolve_embedding(comp_faces, face_region, loop_sides, 0)

    diagram = Diagram.make((m, n), inner_types, strings, len(loop_records), nesting,
                           witness=grid)
    loops_out = [(cells, li) for (_, _, cells), li in zip(loop_records, left_interior)]
    gap_levels = [[g.find() for g in row_gaps] for row_gaps in gap_history]
    return CompileResult(diagram, paths, loops_out, slot_names, pin_labels,
                         face_region, gap_levels)


def _collect_pin_labels(grid, pin_labels):
    """Winding labels: `w` on an id item in the bottom/top slice labels the
    outer pin(s) at that position."""
    if not grid.slices:
        return
    # Bottom slice: position of each id item = its input strand index.
    pos = 0
    for item in grid.slices[0]:
        if item.kind == "id" and item.attr("w") is not None:
            pin_labels[Pin(OUTER, LOW, pos + 1)] = int(item.attr("w"))
            if len(grid.slices) == 1:
                pin_labels[Pin(OUTER, UP, pos + 1)] = int(item.attr("w"))
        pos += item.n_in
    if len(grid.slices) > 1:
        pos = 0
        for item in grid.slices[-1]:
            if item.kind == "id" and item.attr("w") is not None:
                pin_labels[Pin(OUTER, UP, pos + 1)] = int(item.attr("w"))
            pos += item.n_out


# ---------------------------------------------------------------------------
# Grid surgery (used to propagate drawings through plugging)
# ---------------------------------------------------------------------------


def stack(lower: GridPresentation, upper: GridPresentation) -> GridPresentation:
    if lower.top_width != upper.bottom_width:
        raise PlanarityError("stacked grids do not match at the seam")
    return GridPresentation(lower.slices + upper.slices)


def beside(left: GridPresentation, right: GridPresentation) -> GridPresentation:
    """Place two grids side by side, padding the shorter with id slices."""
    h = max(len(left.slices), len(right.slices))

    def padded(g: GridPresentation) -> list[tuple[Item, ...]]:
        rows = list(g.slices)
        idrow = tuple(Item("id") for _ in range(g.top_width))
        while len(rows) < h:
            rows.append(idrow)
        return rows

    lrows, rrows = padded(left), padded(right)
    return GridPresentation(tuple(l + r for l, r in zip(lrows, rrows)))


def identity_grid(n: int) -> GridPresentation:
    """Grid of n vertical strands; n = 0 gives the (internal) empty grid."""
    if n == 0:
        return GridPresentation(())
    return GridPresentation((tuple(Item("id") for _ in range(n)),))


def splice(grid: GridPresentation, parts: dict[str, GridPresentation]) -> GridPresentation:
    """Replace each named box item by the corresponding part grid.

    Part slot names are prefixed with the host slot's name to stay unique.
    """
    rows_out: list[tuple[Item, ...]] = []
    for row in grid.slices:
        if not any(it.kind == "box" and it.name in parts for it in row):
            rows_out.append(row)
            continue
        # Split the row into per-item column spans, then emit enough rows to
        # hold the tallest replacement, padding everything else with ids.
        segments: list[list[tuple[Item, ...]]] = []
        for it in row:
            if it.kind == "box" and it.name in parts:
                sub = []
                for r in parts[it.name].slices:
                    sub.append(tuple(
                        Item(i.kind, f"{it.name}_{i.name}", i.shape, i.attrs)
                        if i.kind == "box" else i
                        for i in r))
                segments.append(sub)
            else:
                segments.append([(it,)])
        height = max(len(seg) for seg in segments)
        for seg in segments:
            # Pad with id rows matching the segment's final width.
            top_w = sum(i.n_out for i in seg[-1])
            while len(seg) < height:
                seg.append(tuple(Item("id") for _ in range(top_w)))
        for level in range(height):
            rows_out.append(tuple(it for seg in segments for it in seg[level]))
    return GridPresentation(tuple(rows_out))
