"""Planar box-type diagrams as labeled combinatorial maps.

A diagram of type (m, n) lives in an outer box with m lower and n upper pins
and contains numbered inner boxes (slots) plus non-crossing strings joining
pins.  We store the isotopy class, not a drawing:

* the matching (which pin joins which), with the rotation around every box
  fixed by its type (anticlockwise: lower pins left-to-right, then upper
  pins right-to-left),
* a count of free closed loops (never embedded; representations only ever
  multiply them out),
* a nesting forest locating each connected component that does not touch the
  outer boundary: which face of which component hosts it, and which of its
  own faces points outward.  Without this, isotopy classes of disconnected
  pictures would collapse.

Faces are orbits of phi(x) = sigma(alpha(x)); the orbit of a dart is the face
on the right of that dart, pointing away from its box.  Validity is the Euler
check V - E + F = 2 on every component.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Optional, Sequence


class PlanarityError(ValueError):
    """The matching/nesting data does not describe a planar diagram."""


class PluggingError(ValueError):
    """Arity or type mismatch in a plugging operation."""


LOW, UP = 0, 1
OUTER = 0


class Pin(NamedTuple):
    """An endpoint slot: box index (0 = outer), side (0 lower / 1 upper), 1-based index."""

    box: int
    side: int
    idx: int

    def __str__(self) -> str:
        side = "low" if self.side == LOW else "up"
        if self.box == OUTER:
            return f"out.{side}.{self.idx}"
        return f"in.{self.box}.{side}.{self.idx}"

    @staticmethod
    def parse(text: str) -> "Pin":
        parts = text.split(".")
        if parts[0] == "out" and len(parts) == 3:
            return Pin(OUTER, LOW if parts[1] == "low" else UP, int(parts[2]))
        if parts[0] == "in" and len(parts) == 4:
            return Pin(int(parts[1]), LOW if parts[2] == "low" else UP, int(parts[3]))
        raise ValueError(f"bad pin id {text!r}")


class BoxType(NamedTuple):
    """Pin counts of a box: `lower` on the bottom edge, `upper` on the top."""

    lower: int
    upper: int

    def __str__(self) -> str:
        return f"({self.lower},{self.upper})"


# A face is identified by the least dart of its phi-orbit; a box with no pins
# has the single "empty" face None.
Face = Optional[Pin]
# A nesting record: (component, parent component, face of parent, own outward face).
NestRecord = tuple[int, int, Face, Face]

StringPair = tuple[Pin, Pin]


def _pair(a: Pin, b: Pin) -> StringPair:
    return (a, b) if a <= b else (b, a)


def _rotation(box: int, bt: BoxType) -> list[Pin]:
    """Anticlockwise rotation cycle of darts around a box (or the outer boundary)."""
    if box == OUTER:
        return [Pin(OUTER, UP, i) for i in range(1, bt.upper + 1)] + \
               [Pin(OUTER, LOW, i) for i in range(bt.lower, 0, -1)]
    return [Pin(box, LOW, i) for i in range(1, bt.lower + 1)] + \
           [Pin(box, UP, i) for i in range(bt.upper, 0, -1)]


@dataclass(frozen=True)
class Diagram:
    """Isotopy class of a planar box-type diagram."""

    outer: BoxType
    inner: tuple[BoxType, ...]
    strings: tuple[StringPair, ...]
    loops: int = 0
    nesting: tuple[NestRecord, ...] = ()
    # Optional drawing the diagram was compiled from; never part of equality.
    witness: Optional[object] = field(default=None, compare=False, repr=False)

    # -- construction ------------------------------------------------------

    @staticmethod
    def make(outer: BoxType | tuple[int, int],
             inner: Sequence[BoxType | tuple[int, int]] = (),
             strings: Iterable[tuple[Pin, Pin]] = (),
             loops: int = 0,
             nesting: Iterable[NestRecord] = (),
             witness: Optional[object] = None) -> "Diagram":
        outer = BoxType(*outer)
        inner_t = tuple(BoxType(*b) for b in inner)
        pairs = tuple(sorted(_pair(a, b) for a, b in strings))
        d = Diagram(outer, inner_t, pairs, loops, tuple(sorted(nesting)), witness)
        d._validate()
        return d

    def _validate(self) -> None:
        if self.loops < 0:
            raise PlanarityError("negative loop count")
        expected = set(self.all_darts())
        seen: set[Pin] = set()
        for a, b in self.strings:
            for p in (a, b):
                if p not in expected:
                    raise PlanarityError(f"string endpoint {p} is not a pin of this diagram")
                if p in seen:
                    raise PlanarityError(f"pin {p} used twice")
                seen.add(p)
            if a == b:
                raise PlanarityError(f"string joins pin {a} to itself")
        if seen != expected:
            missing = sorted(expected - seen)
            raise PlanarityError(f"pins left free: {', '.join(map(str, missing))}")
        # Genus-0 Euler check, component by component.
        for comp, verts in self.components.items():
            n_darts = sum(len(self._vertex_darts(v)) for v in verts)
            e = n_darts // 2
            f = len(self.faces_of(comp))
            if len(verts) - e + f != 2:
                raise PlanarityError(
                    f"component {comp} has genus > 0 (V={len(verts)}, E={e}, F={f})")
        # Nesting forest sanity.
        floaters = {c for c in self.components if c != 0}
        recorded = {r[0] for r in self.nesting}
        if recorded != floaters:
            raise PlanarityError(
                f"nesting records {sorted(recorded)} do not match floating components {sorted(floaters)}")
        parent = {}
        for comp, par, pface, aface in self.nesting:
            if par not in self.components:
                raise PlanarityError(f"nesting parent {par} is not a component")
            if pface not in self.faces_of(par):
                raise PlanarityError(f"{pface} is not a face of component {par}")
            if aface not in self.faces_of(comp):
                raise PlanarityError(f"{aface} is not a face of component {comp}")
            parent[comp] = par
        for comp in recorded:
            seen_chain = {comp}
            cur = comp
            while cur != 0:
                cur = parent[cur]
                if cur in seen_chain:
                    raise PlanarityError("nesting forest has a cycle")
                seen_chain.add(cur)

    # -- basic views -------------------------------------------------------

    @property
    def slots(self) -> int:
        return len(self.inner)

    def box_type(self, box: int) -> BoxType:
        return self.outer if box == OUTER else self.inner[box - 1]

    def all_darts(self) -> list[Pin]:
        out = []
        for box in range(0, len(self.inner) + 1):
            bt = self.box_type(box)
            out += [Pin(box, LOW, i) for i in range(1, bt.lower + 1)]
            out += [Pin(box, UP, i) for i in range(1, bt.upper + 1)]
        return out

    @cached_property
    def partner(self) -> dict[Pin, Pin]:
        m = {}
        for a, b in self.strings:
            m[a] = b
            m[b] = a
        return m

    def _vertex_darts(self, box: int) -> list[Pin]:
        return _rotation(box, self.box_type(box))

    @cached_property
    def sigma(self) -> dict[Pin, Pin]:
        nxt = {}
        for box in range(0, len(self.inner) + 1):
            cyc = self._vertex_darts(box)
            for i, p in enumerate(cyc):
                nxt[p] = cyc[(i + 1) % len(cyc)]
        return nxt

    @cached_property
    def components(self) -> dict[int, frozenset[int]]:
        """Component id (0 for the outer's, else least slot) -> vertex set."""
        parent = {v: v for v in range(0, len(self.inner) + 1)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.strings:
            ra, rb = find(a.box), find(b.box)
            if ra != rb:
                parent[ra] = rb
        groups: dict[int, set[int]] = {}
        for v in parent:
            groups.setdefault(find(v), set()).add(v)
        out = {}
        for verts in groups.values():
            cid = 0 if 0 in verts else min(verts)
            out[cid] = frozenset(verts)
        return out

    def component_of(self, box: int) -> int:
        for cid, verts in self.components.items():
            if box in verts:
                return cid
        raise KeyError(box)

    @cached_property
    def _face_orbits(self) -> dict[int, tuple[tuple[Pin, ...], ...]]:
        """Per component: the phi-orbits (faces), each starting at its least dart."""
        sigma = self.sigma
        partner = self.partner
        seen: set[Pin] = set()
        per_comp: dict[int, list[tuple[Pin, ...]]] = {c: [] for c in self.components}
        for start in self.all_darts():
            if start in seen:
                continue
            orbit = []
            x = start
            while True:
                orbit.append(x)
                seen.add(x)
                x = sigma[partner[x]]
                if x == start:
                    break
            lo = orbit.index(min(orbit))
            orbit = orbit[lo:] + orbit[:lo]
            per_comp[self.component_of(start.box)].append(tuple(orbit))
        return {c: tuple(sorted(fs)) for c, fs in per_comp.items()}

    def faces_of(self, comp: int) -> list[Face]:
        orbits = self._face_orbits[comp]
        if not orbits:
            return [None]
        return [o[0] for o in orbits]

    def face_of_dart(self, dart: Pin) -> Pin:
        """Least dart of the face on the right of `dart` (pointing away from its box)."""
        comp = self.component_of(dart.box)
        for orbit in self._face_orbits[comp]:
            if dart in orbit:
                return orbit[0]
        raise KeyError(dart)

    # -- canonical form ----------------------------------------------------

    def canonical_key(self) -> tuple:
        return (
            tuple(self.outer),
            tuple(tuple(b) for b in self.inner),
            tuple((str(a), str(b)) for a, b in self.strings),
            self.loops,
            tuple((c, p, str(pf) if pf else None, str(af) if af else None)
                  for c, p, pf, af in self.nesting),
        )

    def __str__(self) -> str:
        bits = [f"Diagram{self.outer}"]
        if self.inner:
            bits.append("[" + ", ".join(str(b) for b in self.inner) + "]")
        bits.append("{" + ", ".join(f"{a}-{b}" for a, b in self.strings) + "}")
        if self.loops:
            bits.append(f"loops={self.loops}")
        return " ".join(bits)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        data = {
            "outer": list(self.outer),
            "inner": [list(b) for b in self.inner],
            "matching": [[str(a), str(b)] for a, b in self.strings],
            "rotation": {
                ("out" if box == OUTER else f"in.{box}"):
                    [str(p) for p in self._vertex_darts(box)]
                for box in range(0, len(self.inner) + 1)
            },
            "loops": self.loops,
        }
        if self.nesting:
            data["nesting"] = [
                {"component": c, "parent": p,
                 "parent_face": str(pf) if pf else None,
                 "attach_face": str(af) if af else None}
                for c, p, pf, af in self.nesting
            ]
        return data

    @staticmethod
    def from_json(data: dict) -> "Diagram":
        nesting = [
            (r["component"], r["parent"],
             Pin.parse(r["parent_face"]) if r.get("parent_face") else None,
             Pin.parse(r["attach_face"]) if r.get("attach_face") else None)
            for r in data.get("nesting", [])
        ]
        return Diagram.make(
            tuple(data["outer"]),
            [tuple(b) for b in data["inner"]],
            [(Pin.parse(a), Pin.parse(b)) for a, b in data["matching"]],
            data.get("loops", 0),
            nesting,
        )

    # -- operations --------------------------------------------------------

    def transpose(self) -> "Diagram":
        """Rotate the whole diagram by pi; involutive."""
        m, n = self.outer

        def rho(p: Pin) -> Pin:
            bm, bn = self.box_type(p.box)
            if p.side == LOW:
                return Pin(p.box, UP, bm + 1 - p.idx)
            return Pin(p.box, LOW, bn + 1 - p.idx)

        return self._relabel(rho, BoxType(n, m),
                             tuple(BoxType(b.upper, b.lower) for b in self.inner))

    def _relabel(self, rho, new_outer: BoxType, new_inner: tuple[BoxType, ...],
                 slot_map=None, reverses: bool = False) -> "Diagram":
        """Rebuild with pins mapped through `rho`.

        With `reverses` (a reflection, flipping the plane's orientation) the
        region right of a dart becomes the region left of its image, so face
        ids shift through the matching.
        """
        old_faces = {}
        for comp, orbits in self._face_orbits.items():
            for orbit in orbits:
                old_faces[orbit[0]] = orbit

        def face_img(f: Face) -> Face:
            if f is None:
                return None
            if reverses:
                return min(rho(self.partner[p]) for p in old_faces[f])
            return min(rho(p) for p in old_faces[f])

        smap = slot_map or (lambda c: c)
        nesting = [(smap(c), smap(p) if p else p, face_img(pf), face_img(af))
                   for c, p, pf, af in self.nesting]
        return Diagram.make(new_outer, new_inner,
                            [(rho(a), rho(b)) for a, b in self.strings],
                            self.loops, nesting)

    def __mul__(self, other: "Diagram") -> "Diagram":
        return compose(self, other)

    def __matmul__(self, other: "Diagram") -> "Diagram":
        return tensor(self, other)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def identity(n: int) -> Diagram:
    """n parallel vertical strands; n = 0 is the empty diagram."""
    return Diagram.make((n, n), (), [(Pin(0, LOW, i), Pin(0, UP, i)) for i in range(1, n + 1)])


def empty() -> Diagram:
    return identity(0)


def spoke(bt: BoxType | tuple[int, int]) -> Diagram:
    """Identity morphism on a box object: one slot wired straight to the boundary."""
    m, n = bt
    strings = [(Pin(0, LOW, i), Pin(1, LOW, i)) for i in range(1, m + 1)]
    strings += [(Pin(1, UP, i), Pin(0, UP, i)) for i in range(1, n + 1)]
    nesting = [(1, 0, None, None)] if m == 0 and n == 0 else []
    return Diagram.make((m, n), [(m, n)], strings, nesting=nesting)


def cup() -> Diagram:
    return Diagram.make((0, 2), (), [(Pin(0, UP, 1), Pin(0, UP, 2))])


def cap() -> Diagram:
    return Diagram.make((2, 0), (), [(Pin(0, LOW, 1), Pin(0, LOW, 2))])


def _scaffold(outer, inner, strings) -> Diagram:
    """Unvalidated diagram used only for face lookups during construction."""
    return Diagram(BoxType(*outer), tuple(BoxType(*b) for b in inner),
                   tuple(sorted(_pair(a, b) for a, b in strings)), 0, ())


def _west_face(probe: Diagram) -> Face:
    """The root-component face along the left frame edge."""
    if probe.outer.upper:
        return probe.face_of_dart(Pin(OUTER, UP, 1))
    if probe.outer.lower:
        return probe.face_of_dart(probe.partner[Pin(OUTER, LOW, 1)])
    return None


def _east_face(probe: Diagram) -> Face:
    if probe.outer.lower:
        return probe.face_of_dart(Pin(OUTER, LOW, probe.outer.lower))
    if probe.outer.upper:
        return probe.face_of_dart(probe.partner[Pin(OUTER, UP, probe.outer.upper)])
    return None


def compose_template(l: int, m: int, n: int) -> Diagram:
    """Stacking diagram: slot 1 of type (m,n) above slot 2 of type (l,m)."""
    strings = [(Pin(0, LOW, i), Pin(2, LOW, i)) for i in range(1, l + 1)]
    strings += [(Pin(2, UP, i), Pin(1, LOW, i)) for i in range(1, m + 1)]
    strings += [(Pin(1, UP, i), Pin(0, UP, i)) for i in range(1, n + 1)]
    probe = _scaffold((l, n), [(m, n), (l, m)], strings)
    nesting = []
    if l == 0 and n == 0 and m > 0:
        # Both slots join into one island inside the empty outer box.
        nesting.append((1, 0, None, probe.face_of_dart(Pin(1, LOW, 1))))
    else:
        if m == 0 and n == 0:
            nesting.append((1, 0, _west_face(probe), None))
        if l == 0 and m == 0:
            nesting.append((2, 0, _west_face(probe), None))
    return Diagram.make((l, n), [(m, n), (l, m)], strings, nesting=nesting)


def tensor_template(l: int, k: int, m: int, n: int) -> Diagram:
    """Juxtaposition diagram: slot 1 of type (l,k) left of slot 2 of type (m,n)."""
    strings = [(Pin(0, LOW, i), Pin(1, LOW, i)) for i in range(1, l + 1)]
    strings += [(Pin(0, LOW, l + i), Pin(2, LOW, i)) for i in range(1, m + 1)]
    strings += [(Pin(1, UP, i), Pin(0, UP, i)) for i in range(1, k + 1)]
    strings += [(Pin(2, UP, i), Pin(0, UP, k + i)) for i in range(1, n + 1)]
    probe = _scaffold((l + m, k + n), [(l, k), (m, n)], strings)
    nesting = []
    if l == 0 and k == 0:
        nesting.append((1, 0, _west_face(probe), None))
    if m == 0 and n == 0:
        nesting.append((2, 0, _east_face(probe), None))
    return Diagram.make((l + m, k + n), [(l, k), (m, n)], strings, nesting=nesting)


def compose(s: Diagram, t: Diagram) -> Diagram:
    """Vertical stacking s over t: an (m,n) after an (l,m) gives an (l,n)."""
    if s.outer.lower != t.outer.upper:
        raise PluggingError(
            f"cannot compose {s.outer} over {t.outer}: middle boundary mismatch")
    return plug(compose_template(t.outer.lower, s.outer.lower, s.outer.upper), [s, t])


def tensor(s: Diagram, t: Diagram) -> Diagram:
    """Side-by-side juxtaposition, s left of t."""
    return plug(tensor_template(s.outer.lower, s.outer.upper,
                                t.outer.lower, t.outer.upper), [s, t])


def transpose(t: Diagram) -> Diagram:
    return t.transpose()


def canonicalize(t: Diagram) -> tuple:
    """Total deterministic key; equal keys iff the diagrams are planar-isotopic."""
    return t.canonical_key()


def relabel_slots(t: Diagram, perm: dict[int, int]) -> Diagram:
    """Renumber inner boxes by `perm` (a bijection on 1..slots)."""
    if sorted(perm) != list(range(1, t.slots + 1)) or sorted(perm.values()) != sorted(perm):
        raise PluggingError("slot relabeling must be a bijection on slot indices")
    new_inner = [None] * t.slots
    for old, new in perm.items():
        new_inner[new - 1] = t.inner[old - 1]

    def rho(p: Pin) -> Pin:
        if p.box == OUTER:
            return p
        return Pin(perm[p.box], p.side, p.idx)

    def smap(comp: int) -> int:
        if comp == 0:
            return 0
        verts = t.components[comp]
        return min(perm[v] for v in verts)

    return t._relabel(rho, t.outer, tuple(new_inner), slot_map=smap)


# ---------------------------------------------------------------------------
# Plugging
# ---------------------------------------------------------------------------

# One traversed piece of an old string: (world, from-pin, to-pin) in that
# world's own labels, where world is 'T' or a 1-based slot index.
Segment = tuple[object, Pin, Pin]


@dataclass(frozen=True)
class PlugTrace:
    """How old strings assembled into the plugged diagram's strings and loops."""

    # new string pair (new labels) -> ordered chain of segments
    chains: dict[StringPair, tuple[Segment, ...]]
    # per new loop: its segment cycle and whether the left side of the
    # traversal direction is the interior (non-boundary) side
    loop_cycles: tuple[tuple[tuple[Segment, ...], bool], ...]
    # part slot -> new slot index
    slot_map: dict[tuple[int, int], int]


class _DSU:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _face_key(diagram: Diagram, comp: int, face: Face):
    return face if face is not None else ("empty", comp)


def resolve_embedding(comp_faces: dict[int, list], face_region: dict,
                      loop_sides: list[tuple[object, object]], root: int):
    """Derive the nesting forest (and loop orientation sides) from wall data.

    `comp_faces[c]` lists the faces of component c; `face_region[(c, f)]` is
    the region class each face borders; `loop_sides[i]` gives the two region
    classes flanking removed loop i (left of traversal, right of traversal).
    Components, regions and loops form a tree on the sphere; rooting it at
    the outer component reads off every hosting relation.

    Returns (nesting records, [left_is_interior per loop]).
    """
    adj: dict[object, list[tuple[object, object]]] = {}

    def add_edge(a, b, label):
        adj.setdefault(a, []).append((b, label))
        adj.setdefault(b, []).append((a, label))

    for comp, faces in comp_faces.items():
        for f in faces:
            add_edge(("C", comp), ("R", face_region[(comp, f)]), f)
    for i, (left, right) in enumerate(loop_sides):
        add_edge(("L", i), ("R", left), "left")
        add_edge(("L", i), ("R", right), "right")

    n_edges = sum(len(v) for v in adj.values()) // 2
    rootnode = ("C", root)
    adj.setdefault(rootnode, [])
    # BFS from the outer component.
    parent: dict[object, tuple[object, object]] = {rootnode: (None, None)}
    queue = [rootnode]
    while queue:
        node = queue.pop(0)
        for nb, label in adj[node]:
            if nb not in parent:
                parent[nb] = (node, label)
                queue.append(nb)
    if len(parent) != len(adj) or n_edges != len(adj) - 1:
        raise PlanarityError("embedding wall structure is not a tree")

    nesting: list[NestRecord] = []
    for node in adj:
        kind = node[0]
        if kind != "C" or node == rootnode:
            continue
        comp = node[1]
        region, attach = parent[node]
        up, via = parent[region]
        # Skip over removed loops when finding the hosting component.
        while up[0] == "L":
            region2, _ = parent[up]
            up, via = parent[region2]
        nesting.append((comp, up[1], via, attach))

    left_interior = []
    for i in range(len(loop_sides)):
        _, label = parent[("L", i)]
        # The parent edge points toward the boundary; that side is exterior.
        left_interior.append(label == "right")
    return sorted(nesting), left_interior


def plug(t: Diagram, parts: Sequence[Diagram]) -> Diagram:
    return plug_traced(t, parts)[0]


def plug_traced(t: Diagram, parts: Sequence[Diagram]) -> tuple[Diagram, PlugTrace]:
    """Plug `parts[j]` into slot j+1 of `t`; also report how strings fused.

    Surviving inner boxes are renumbered left-to-right in plugging order:
    part 1's boxes first, then part 2's, and so on.
    """
    if len(parts) != t.slots:
        raise PluggingError(f"expected {t.slots} parts, got {len(parts)}")
    for j, part in enumerate(parts, start=1):
        if part.outer != t.inner[j - 1]:
            raise PluggingError(
                f"slot {j} expects {t.inner[j - 1]}, part has outer type {part.outer}")
    if not parts:
        return t, PlugTrace({}, (), {})

    worlds: dict[object, Diagram] = {"T": t}
    for j, part in enumerate(parts, start=1):
        worlds[j] = part

    # New slot numbering.
    slot_map: dict[tuple[int, int], int] = {}
    new_inner: list[BoxType] = []
    for j, part in enumerate(parts, start=1):
        for i, bt in enumerate(part.inner, start=1):
            new_inner.append(bt)
            slot_map[(j, i)] = len(new_inner)

    def relabel(world, p: Pin) -> Pin:
        if world == "T":
            assert p.box == OUTER
            return p
        return Pin(slot_map[(world, p.box)], p.side, p.idx)

    def is_interface(world, p: Pin) -> bool:
        if world == "T":
            return p.box != OUTER
        return p.box == OUTER

    def hop(world, p: Pin) -> tuple[object, Pin]:
        if world == "T":
            return p.box, Pin(OUTER, p.side, p.idx)
        return "T", Pin(world, p.side, p.idx)

    # ---- fuse strings by walking chains ----------------------------------
    used: set[tuple[object, StringPair]] = set()
    chains: dict[StringPair, tuple[Segment, ...]] = {}
    new_strings: list[StringPair] = []

    def walk(world, start: Pin) -> tuple[list[Segment], object, Pin]:
        segs: list[Segment] = []
        w, p = world, start
        while True:
            q = worlds[w].partner[p]
            used.add((w, _pair(p, q)))
            segs.append((w, p, q))
            if not is_interface(w, q):
                return segs, w, q
            w, p = hop(w, q)

    real_starts: list[tuple[object, Pin]] = []
    for i in range(1, t.outer.lower + 1):
        real_starts.append(("T", Pin(OUTER, LOW, i)))
    for i in range(1, t.outer.upper + 1):
        real_starts.append(("T", Pin(OUTER, UP, i)))
    for j, part in enumerate(parts, start=1):
        for b, bt in enumerate(part.inner, start=1):
            for i in range(1, bt.lower + 1):
                real_starts.append((j, Pin(b, LOW, i)))
            for i in range(1, bt.upper + 1):
                real_starts.append((j, Pin(b, UP, i)))

    for world, start in real_starts:
        first = worlds[world].partner[start]
        if (world, _pair(start, first)) in used:
            continue
        segs, w_end, end = walk(world, start)
        pair = _pair(relabel(world, start), relabel(w_end, end))
        new_strings.append(pair)
        chains[pair] = tuple(segs)

    # Remaining strings close up into loops.
    def walk_cycle(world, start: Pin) -> tuple[Segment, ...]:
        segs: list[Segment] = []
        w, p = world, start
        while True:
            q = worlds[w].partner[p]
            used.add((w, _pair(p, q)))
            segs.append((w, p, q))
            w2, p2 = hop(w, q)
            if (w2, p2) == (world, start):
                return tuple(segs)
            w, p = w2, p2

    loop_cycles_raw: list[tuple[Segment, ...]] = []
    for world, diagram in worlds.items():
        for pair in diagram.strings:
            if (world, pair) in used:
                continue
            loop_cycles_raw.append(walk_cycle(world, pair[0]))

    # ---- region bookkeeping ----------------------------------------------
    dsu = _DSU()

    def fkey(world, comp: int, face: Face):
        return (world, _face_key(worlds[world], comp, face))

    def face_cls(world, dart: Pin):
        return dsu.find((world, worlds[world].face_of_dart(dart)))

    # Regions shared inside each old diagram, per its nesting forest.
    for world, diagram in worlds.items():
        for comp, par, pface, aface in diagram.nesting:
            dsu.union(fkey(world, par, pface), fkey(world, comp, aface))

    # Glue faces around every slot.
    for j, part in enumerate(parts, start=1):
        rot_t = _rotation(j, t.inner[j - 1])
        if not rot_t:
            comp_t = t.component_of(j)
            dsu.union(fkey("T", comp_t, None), fkey(j, part.component_of(OUTER), None))
            continue
        for k, a in enumerate(rot_t):
            b = rot_t[(k + 1) % len(rot_t)]
            b_part = Pin(OUTER, b.side, b.idx)
            f_t = t.face_of_dart(t.partner[a])
            f_s = part.face_of_dart(part.partner[b_part])
            dsu.union(("T", f_t), (j, f_s))

    loop_sides = []
    for segs in loop_cycles_raw:
        world, x0, _ = segs[0]
        left = face_cls(world, worlds[world].partner[x0])
        right = face_cls(world, x0)
        loop_sides.append((left, right))

    # ---- assemble the new diagram -----------------------------------------
    nesting, left_interior = _plug_nesting(t, worlds, new_inner, new_strings,
                                           slot_map, dsu, loop_sides)
    result = Diagram.make(t.outer, new_inner, new_strings,
                          t.loops + sum(p.loops for p in parts) + len(loop_cycles_raw),
                          nesting=nesting)
    trace = PlugTrace(chains, tuple(zip(loop_cycles_raw, left_interior)), slot_map)
    return result, trace


def _plug_nesting(t, worlds, new_inner, new_strings, slot_map, dsu,
                  loop_sides) -> tuple[list[NestRecord], list[bool]]:
    probe = Diagram(t.outer, tuple(new_inner),
                    tuple(sorted(_pair(a, b) for a, b in new_strings)),
                    0, ())  # unvalidated scaffold for face computation

    inv_slot = {v: k for k, v in slot_map.items()}

    def old_world_dart(p: Pin) -> tuple[object, Pin]:
        if p.box == OUTER:
            return "T", p
        j, i = inv_slot[p.box]
        return j, Pin(i, p.side, p.idx)

    comp_faces: dict[int, list] = {}
    face_region: dict = {}
    for comp in probe.components:
        faces = probe.faces_of(comp)
        comp_faces[comp] = faces
        for f in faces:
            if f is None:
                verts = probe.components[comp]
                assert len(verts) == 1
                box = next(iter(verts))
                if box == OUTER:
                    cls = dsu.find(("T", _face_key(t, t.component_of(OUTER), None)))
                else:
                    j, i = inv_slot[box]
                    part = worlds[j]
                    cls = dsu.find((j, _face_key(part, part.component_of(i), None)))
            else:
                # Identify the region through any dart of the new face.
                orbit = next(o for o in probe._face_orbits[comp] if o[0] == f)
                w, old = old_world_dart(orbit[0])
                cls = dsu.find((w, worlds[w].face_of_dart(old)))
            face_region[(comp, f)] = cls

    return resolve_embedding(comp_faces, face_region, loop_sides, 0)


# ---------------------------------------------------------------------------
# Kauffman diagrams and bending
# ---------------------------------------------------------------------------


def boundary_cycle(m: int, n: int) -> list[Pin]:
    """Outer pins in disk order: lower left-to-right, then upper right-to-left."""
    return [Pin(OUTER, LOW, i) for i in range(1, m + 1)] + \
           [Pin(OUTER, UP, i) for i in range(n, 0, -1)]


def _noncrossing_matchings(points: list) -> Iterable[list[tuple]]:
    if not points:
        yield []
        return
    first = points[0]
    for k in range(1, len(points), 2):
        left = points[1:k]
        right = points[k + 1:]
        for lm in _noncrossing_matchings(left):
            for rm in _noncrossing_matchings(right):
                yield [(first, points[k])] + lm + rm


def enumerate_kauffman(m: int, n: int) -> list[Diagram]:
    """All (m,n)-diagrams with no inner boxes and no loops (noncrossing matchings)."""
    if (m + n) % 2:
        return []
    out = []
    for matching in _noncrossing_matchings(boundary_cycle(m, n)):
        out.append(Diagram.make((m, n), (), matching))
    return out


def bend_pair(m: int, n: int) -> tuple[Diagram, Diagram]:
    """One-slot diagrams converting an (m,n) object to ((m+n)/2, (m+n)/2) and back.

    Plugging one into the other gives the straight-wired slot diagram on
    either side; the bends run through the right vacant space.
    """
    if (m + n) % 2:
        raise PluggingError(f"({m},{n}) has odd total pin count")
    k = (m + n) // 2
    s_strings: list[tuple[Pin, Pin]] = []
    t_strings: list[tuple[Pin, Pin]] = []
    if m >= k:
        for i in range(1, k + 1):
            s_strings.append((Pin(0, LOW, i), Pin(1, LOW, i)))
            t_strings.append((Pin(0, LOW, i), Pin(1, LOW, i)))
        for i in range(1, n + 1):
            s_strings.append((Pin(1, UP, i), Pin(0, UP, i)))
            t_strings.append((Pin(1, UP, i), Pin(0, UP, i)))
        for j in range(1, m - k + 1):
            s_strings.append((Pin(1, LOW, k + j), Pin(0, UP, k - j + 1)))
            t_strings.append((Pin(1, UP, n + j), Pin(0, LOW, m - j + 1)))
    else:
        for i in range(1, m + 1):
            s_strings.append((Pin(0, LOW, i), Pin(1, LOW, i)))
            t_strings.append((Pin(0, LOW, i), Pin(1, LOW, i)))
        for i in range(1, k + 1):
            s_strings.append((Pin(1, UP, i), Pin(0, UP, i)))
            t_strings.append((Pin(1, UP, i), Pin(0, UP, i)))
        for j in range(1, k - m + 1):
            s_strings.append((Pin(1, UP, k + j), Pin(0, LOW, m + (n - k) - j + 1)))
            t_strings.append((Pin(0, UP, k + j), Pin(1, LOW, m + (n - k) - j + 1)))
    s = Diagram.make((k, k), [(m, n)], s_strings)
    t = Diagram.make((m, n), [(k, k)], t_strings)
    return s, t


# ---------------------------------------------------------------------------
# Disk diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiskDiagram:
    """Disk-type view: pins numbered 1..n anticlockwise around each boundary.

    Remembers where each box was cut so the box view can be recovered.
    """

    origin: Diagram

    @property
    def outer_pins(self) -> int:
        return self.origin.outer.lower + self.origin.outer.upper

    @property
    def outer_split(self) -> int:
        return self.origin.outer.lower

    def pin_numbers(self) -> dict[Pin, int]:
        m, n = self.origin.outer
        return {p: i + 1 for i, p in enumerate(boundary_cycle(m, n))}

    def matching(self) -> list[tuple]:
        """Strings with outer endpoints shown as disk numbers."""
        nums = self.pin_numbers()
        out = []
        for a, b in self.origin.strings:
            ka = nums.get(a, a)
            kb = nums.get(b, b)
            out.append(tuple(sorted((ka, kb), key=str)))
        return sorted(out, key=str)


def box_to_disk(t: Diagram) -> DiskDiagram:
    return DiskDiagram(t)


def disk_to_box(d: DiskDiagram, split: int | None = None) -> Diagram:
    """Recut the outer circle so the first `split` pins become the lower edge."""
    n_total = d.outer_pins
    if split is None:
        split = d.outer_split
    if not 0 <= split <= n_total:
        raise PluggingError(f"split {split} out of range for {n_total} pins")
    old_positions = {p: i + 1 for i, p in enumerate(boundary_cycle(*d.origin.outer))}

    def rho(p: Pin) -> Pin:
        if p.box != OUTER:
            return p
        pos = old_positions[p]
        if pos <= split:
            return Pin(OUTER, LOW, pos)
        return Pin(OUTER, UP, n_total - pos + 1)

    return d.origin._relabel(rho, BoxType(split, n_total - split), d.origin.inner)
