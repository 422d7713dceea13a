"""Reconstruct a grid drawing from a diagram's combinatorial data.

Rendering must depend only on the isotopy class, so equal diagrams need equal
drawings even when they were built by different routes.  Each connected
component is drawn by a deterministic backtracking scheduler (place boxes,
close caps, open cups; one event per slice) whose result is verified by
compiling it back; floating components are then inserted into the first open
gap of their host face, depth-first along the nesting forest.

The first schedule found under the fixed move order is the canonical drawing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .diagram import (LOW, UP, OUTER, BoxType, Diagram, Face, Pin,
                      relabel_slots, _pair)
from .grid import GridPresentation, Item, compile_grid_full


class SynthesisError(RuntimeError):
    """No grid drawing was found within the search budget."""


_BUDGET = 400_000


def synthesize_grid(d: Diagram) -> GridPresentation:
    """A canonical grid whose compilation is `d` (boxes named b<slot>)."""
    grid = _assemble(d)
    check = compile_grid_full(grid)
    if check.slot_names:
        perm = {idx: int(name[1:]) for name, idx in check.slot_names.items()}
        got = relabel_slots(check.diagram, perm)
    else:
        got = check.diagram
    if got != Diagram.make(d.outer, d.inner, d.strings, d.loops, d.nesting):
        raise SynthesisError("synthesized grid does not compile back to the diagram")
    return grid


def _assemble(d: Diagram) -> GridPresentation:
    subs = {comp: _extract(d, comp) for comp in d.components}
    children: dict[int, list[tuple[int, Face]]] = {c: [] for c in d.components}
    for comp, parent, pface, _ in d.nesting:
        children[parent].append((comp, pface))

    def build(comp: int) -> GridPresentation:
        sub, pinmap, slotmap = subs[comp]
        if comp == 0:
            grid = _draw_component(sub, slotmap, loops=d.loops)
        else:
            attach = _record_for(d, comp)[3]
            target = Diagram.make((0, 0), sub.inner, sub.strings,
                                  nesting=[(1, 0, None, _map_face(sub, pinmap, attach))])
            grid = _draw_component(target, slotmap)
        for child, pface in sorted(children[comp], key=lambda cf: cf[0]):
            child_grid = build(child)
            grid = _insert(grid, child_grid, d, comp, subs[comp], pface)
        return grid

    return build(0)


def _record_for(d: Diagram, comp: int):
    for rec in d.nesting:
        if rec[0] == comp:
            return rec
    raise KeyError(comp)


def _extract(d: Diagram, comp: int):
    """The component alone, boxes renumbered in increasing slot order."""
    verts = d.components[comp]
    boxes = sorted(v for v in verts if v != OUTER)
    slotmap = {v: i for i, v in enumerate(boxes, start=1)}

    def pinmap(p: Pin) -> Pin:
        if p.box == OUTER:
            return p
        return Pin(slotmap[p.box], p.side, p.idx)

    outer = d.outer if comp == 0 else BoxType(0, 0)
    strings = [(pinmap(a), pinmap(b)) for a, b in d.strings if a.box in verts]
    inner = [d.inner[v - 1] for v in boxes]
    sub = Diagram(BoxType(*outer), tuple(inner),
                  tuple(sorted(_pair(a, b) for a, b in strings)), 0, ())
    return sub, pinmap, slotmap


def _map_face(sub: Diagram, pinmap, face: Face) -> Face:
    if face is None:
        return None
    return sub.face_of_dart(pinmap(face))


def _insert(host: GridPresentation, child: GridPresentation, d: Diagram,
            comp: int, sub_info, face: Face) -> GridPresentation:
    """Insert a closed child grid into the first gap bordering `face`."""
    if not host.slices:
        return child
    sub, pinmap, slotmap = sub_info
    full = compile_grid_full(host)
    orig_of = {idx: int(name[1:]) for name, idx in full.slot_names.items()}

    target = None
    if face is None:
        target = full.face_region.get((0, None))
    else:
        want = _map_face(sub, pinmap, face)
        for (c, f), region in full.face_region.items():
            if f is None:
                continue
            orig_box = orig_of.get(f.box, 0) if f.box != OUTER else OUTER
            if orig_box not in d.components[comp]:
                continue
            drawn_pin = Pin(slotmap[orig_box], f.side, f.idx) if f.box != OUTER else f
            if sub.face_of_dart(drawn_pin) == want:
                target = region
                break
    if target is None:
        raise SynthesisError("host face not found in drawn grid")
    for level, row in enumerate(full.gap_levels):
        for g, region in enumerate(row):
            if region is target:
                return _splice_rows(host, child, level, g)
    raise SynthesisError("no open gap borders the host face")


def _splice_rows(host: GridPresentation, child: GridPresentation,
                 level: int, gap: int) -> GridPresentation:
    width = host.bottom_width if level == 0 else \
        sum(it.n_out for it in host.slices[level - 1])
    rows = list(host.slices[:level])
    for crow in child.slices:
        rows.append(tuple([Item("id")] * gap) + crow +
                    tuple([Item("id")] * (width - gap)))
    rows.extend(host.slices[level:])
    return GridPresentation(tuple(rows))


# ---------------------------------------------------------------------------
# Single-component scheduler
# ---------------------------------------------------------------------------


def _other(string: tuple[Pin, Pin], p: Pin) -> Pin:
    return string[1] if string[0] == p else string[0]


@dataclass
class _State:
    rows: list
    # strand: (path id, heading pin); paths sharing an id are one drawn arc
    strands: list
    # path id -> string
    path_string: dict
    unplaced: list
    cups_used: dict


def _draw_component(target: Diagram, slotmap: dict[int, int],
                    loops: int = 0) -> GridPresentation:
    """Deterministic search for a grid compiling to `target`.

    Boxes are named b<orig> after the original slot ids in `slotmap` so the
    assembled drawing stays traceable to the input diagram.
    """
    m, n = target.outer
    if not target.strings and not target.inner and not loops:
        return GridPresentation(())
    names = {tgt: f"b{orig}" for orig, tgt in slotmap.items()}
    partner = target.partner

    rows: list[tuple[Item, ...]] = []
    for _ in range(loops):
        rows.append(tuple([Item("cup")] + [Item("id")] * m))
        rows.append(tuple([Item("cap")] + [Item("id")] * m))

    strands = []
    path_string = {}
    for i in range(1, m + 1):
        p = Pin(OUTER, LOW, i)
        s = _pair(p, partner[p])
        path_string[i] = s
        strands.append((i, _other(s, p)))

    for allowance in (1, 2, 3):
        state = _State(rows=list(rows), strands=list(strands),
                       path_string=dict(path_string),
                       unplaced=list(range(1, target.slots + 1)), cups_used={})
        ctx = {"budget": _BUDGET, "next": m + 1,
               "target": target, "names": names, "partner": partner,
               "allowance": allowance, "loops": loops}
        found = _search(ctx, state)
        if found is not None:
            return found
    raise SynthesisError(f"could not draw component within budget: {target}")


def _order_ok(st: _State, unplaced: set) -> bool:
    """Strands never cross, so headings to fixed targets must stay sorted."""
    last_up = 0
    last_low: dict[int, int] = {}
    for _, h in st.strands:
        if h.box == OUTER and h.side == UP:
            if h.idx < last_up:
                return False
            last_up = h.idx
        elif h.box != OUTER and h.side == LOW and h.box in unplaced:
            if h.idx < last_low.get(h.box, 0):
                return False
            last_low[h.box] = h.idx
    return True


def _search(ctx, st: _State) -> Optional[GridPresentation]:
    ctx["budget"] -= 1
    if ctx["budget"] < 0:
        return None
    target: Diagram = ctx["target"]
    m, n = target.outer
    width = len(st.strands)
    if not _order_ok(st, set(st.unplaced)):
        return None

    # Finish?
    if not st.unplaced and width == n and \
            all(h == Pin(OUTER, UP, i + 1) for i, (_, h) in enumerate(st.strands)):
        rows = st.rows or [tuple(Item("id") for _ in range(width))]
        candidate = GridPresentation(tuple(rows))
        got = compile_grid_full(candidate)
        if got.slot_names:
            inv_names = {v: k for k, v in ctx["names"].items()}
            perm = {idx: inv_names[nm] for nm, idx in got.slot_names.items()}
            drawn = relabel_slots(got.diagram, perm)
        else:
            drawn = got.diagram
        if drawn == Diagram.make(target.outer, target.inner, target.strings,
                                 ctx["loops"], target.nesting):
            return candidate
        return None

    # Place a box.
    for j in st.unplaced:
        mj, nj = target.inner[j - 1]
        for q in range(0, width - mj + 1):
            if not all(st.strands[q + t - 1][1] == Pin(j, LOW, t)
                       for t in range(1, mj + 1)):
                continue
            row = tuple([Item("id")] * q
                        + [Item("box", ctx["names"][j], target.inner[j - 1])]
                        + [Item("id")] * (width - q - mj))
            emitted = []
            new_paths = dict(st.path_string)
            for t in range(1, nj + 1):
                p = Pin(j, UP, t)
                s = _pair(p, ctx["partner"][p])
                pid = ctx["next"]
                ctx["next"] += 1
                new_paths[pid] = s
                emitted.append((pid, _other(s, p)))
            nxt = _State(rows=st.rows + [row],
                         strands=st.strands[:q] + emitted + st.strands[q + mj:],
                         path_string=new_paths,
                         unplaced=[x for x in st.unplaced if x != j],
                         cups_used=st.cups_used)
            out = _search(ctx, nxt)
            if out is not None:
                return out

    # Close a cap.
    for i in range(width - 1):
        (pa, ha), (pb, hb) = st.strands[i], st.strands[i + 1]
        if pa == pb:
            continue  # the two ends of one arc; capping would close a loop
        if st.path_string[pa] != st.path_string[pb] or ha == hb:
            continue
        row = tuple([Item("id")] * i + [Item("cap")] + [Item("id")] * (width - i - 2))
        merged = [(pa if p == pb else p, h)
                  for p, h in st.strands[:i] + st.strands[i + 2:]]
        nxt = _State(rows=st.rows + [row], strands=merged,
                     path_string=st.path_string, unplaced=st.unplaced,
                     cups_used=st.cups_used)
        out = _search(ctx, nxt)
        if out is not None:
            return out

    # Open a cup for a string whose endpoints both lie above.
    future = {Pin(OUTER, UP, i) for i in range(1, n + 1)}
    for j in st.unplaced:
        mj, nj = target.inner[j - 1]
        future |= {Pin(j, LOW, t) for t in range(1, mj + 1)}
        future |= {Pin(j, UP, t) for t in range(1, nj + 1)}
    for s in target.strings:
        if s[0] not in future or s[1] not in future:
            continue
        if st.cups_used.get(s, 0) >= ctx["allowance"]:
            continue
        both_fixed = (s[0].box == OUTER and s[1].box == OUTER) or \
                     (s[0].box == s[1].box and s[0].side == LOW and s[1].side == LOW)
        orientations = ((s[0], s[1]),) if both_fixed else ((s[0], s[1]), (s[1], s[0]))
        for g in range(width + 1):
            for heads in orientations:
                pid = ctx["next"]
                ctx["next"] += 1
                new_paths = dict(st.path_string)
                new_paths[pid] = s
                row = tuple([Item("id")] * g + [Item("cup")]
                            + [Item("id")] * (width - g))
                cups = dict(st.cups_used)
                cups[s] = cups.get(s, 0) + 1
                nxt = _State(rows=st.rows + [row],
                             strands=st.strands[:g] + [(pid, heads[0]), (pid, heads[1])]
                             + st.strands[g:],
                             path_string=new_paths, unplaced=st.unplaced,
                             cups_used=cups)
                out = _search(ctx, nxt)
                if out is not None:
                    return out
    return None
