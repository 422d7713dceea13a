"""The tensor-category view of a representation.

Hom(m, n) is the representation space of the (m, n) object; composition and
tensor product of morphism vectors act through the distinguished stacking and
juxtaposition pluggings.  The cap/cup pair is a rigidity pair (evaluation and
coevaluation); `assemble_action` rebuilds any diagram's multilinear map from
identity, cup and cap morphisms alone, slice by slice through a grid drawing,
which must agree with the native action when the pair satisfies the zig-zag
identities and box rotation is invisible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .diagram import (BoxType, Diagram, Pin, PluggingError, compose,
                      compose_template, enumerate_kauffman, identity,
                      tensor_template, cup as cup_diagram, cap as cap_diagram)
from .grid import GridPresentation, Item
from .reps import Representation, CheckReport
from .scalars import ONE, FreeVector, MultilinearMap, Scalar
from .synth import synthesize_grid


@dataclass(frozen=True, eq=False)
class Morphism:
    """An element of Hom(source, target) = P_{source,target}."""

    rep: Representation
    source: int
    target: int
    vec: FreeVector

    def __post_init__(self):
        expected = self.rep.space(BoxType(self.source, self.target))
        if self.vec.space != expected:
            raise PluggingError(
                f"vector lives in {self.vec.space!r}, expected {expected!r}")

    def __eq__(self, other):
        return isinstance(other, Morphism) and \
            (self.source, self.target, self.vec) == \
            (other.source, other.target, other.vec)

    __hash__ = None

    def __mul__(self, other: "Morphism") -> "Morphism":
        return mor_compose(self, other)

    def __matmul__(self, other: "Morphism") -> "Morphism":
        return mor_tensor(self, other)

    def scale(self, s) -> "Morphism":
        return Morphism(self.rep, self.source, self.target, self.vec.scale(s))

    def __add__(self, other: "Morphism") -> "Morphism":
        return Morphism(self.rep, self.source, self.target, self.vec + other.vec)

    def transpose(self) -> "Morphism":
        out = FreeVector.make(self.rep.space(BoxType(self.target, self.source)),
                              [(k.transpose(), c) for k, c in self.vec.terms])
        return Morphism(self.rep, self.target, self.source, out)

    def __str__(self) -> str:
        return f"Morphism({self.source}->{self.target}: {self.vec})"


def mor_from_diagram(rep: Representation, diagram: Diagram) -> Morphism:
    """The morphism of a slot-free diagram (its nullary action)."""
    return Morphism(rep, diagram.outer.lower, diagram.outer.upper,
                    rep.element(diagram))


def mor_identity(rep: Representation, n: int) -> Morphism:
    return mor_from_diagram(rep, identity(n))


def mor_compose(a: Morphism, b: Morphism) -> Morphism:
    """a after b: composition through the stacking plugging."""
    if a.source != b.target:
        raise PluggingError(f"cannot compose {a.source}->{a.target} after "
                            f"{b.source}->{b.target}")
    template = compose_template(b.source, a.source, a.target)
    out = a.rep.action(template).apply([a.vec, b.vec])
    return Morphism(a.rep, b.source, a.target, out)


def mor_tensor(a: Morphism, b: Morphism) -> Morphism:
    template = tensor_template(a.source, a.target, b.source, b.target)
    out = a.rep.action(template).apply([a.vec, b.vec])
    return Morphism(a.rep, a.source + b.source, a.target + b.target, out)


# ---------------------------------------------------------------------------
# Rigidity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RigidityPair:
    """Evaluation eps: 2 -> 0 and coevaluation delta: 0 -> 2."""

    eps: Morphism
    delta: Morphism

    def __post_init__(self):
        if (self.eps.source, self.eps.target) != (2, 0):
            raise PluggingError("eps must map the square of the generator to the unit")
        if (self.delta.source, self.delta.target) != (0, 2):
            raise PluggingError("delta must map the unit to the square of the generator")


def tl_rigidity_pair(rep: Representation) -> RigidityPair:
    return RigidityPair(eps=mor_from_diagram(rep, cap_diagram()),
                        delta=mor_from_diagram(rep, cup_diagram()))


def check_zigzag(pair: RigidityPair) -> bool:
    """(eps (x) id)(id (x) delta) = id and (id (x) eps)(delta (x) id) = id."""
    rep = pair.eps.rep
    one = mor_identity(rep, 1)
    left = mor_compose(mor_tensor(pair.eps, one), mor_tensor(one, pair.delta))
    right = mor_compose(mor_tensor(one, pair.eps), mor_tensor(pair.delta, one))
    return left == one and right == one and pair.eps == pair.delta.transpose()


def left_dim(rep: Representation, pair: RigidityPair) -> Scalar:
    """Close the generator's identity strand on the left."""
    if rep.dim(BoxType(0, 0)) != 1:
        raise PluggingError("left dimension needs a one-dimensional closed space")
    closed = mor_compose(pair.eps, pair.delta)
    if not closed.vec.terms:
        from .scalars import ZERO
        return ZERO
    ((_, coeff),) = closed.vec.terms
    return coeff


# ---------------------------------------------------------------------------
# Assembling actions from the rigidity pair
# ---------------------------------------------------------------------------


def assemble_action(diagram_or_grid, pair: RigidityPair,
                    slot_types: Optional[Sequence[BoxType]] = None) -> MultilinearMap:
    """Rebuild a diagram's multilinear map from identity, delta and eps.

    Works through a grid drawing (the diagram's witness, or a synthesized
    one): each slice becomes a tensor of elementary morphisms, with box items
    standing for the arguments.
    """
    rep = pair.eps.rep
    if isinstance(diagram_or_grid, GridPresentation):
        grid = diagram_or_grid
        from .grid import compile_grid_full
        full = compile_grid_full(grid)
        diagram = full.diagram
        name_to_slot = full.slot_names
    else:
        diagram = diagram_or_grid
        grid = diagram.witness if isinstance(diagram.witness, GridPresentation) \
            else synthesize_grid(diagram)
        from .grid import compile_grid_full
        name_to_slot = compile_grid_full(grid).slot_names
        if diagram.witness is None:
            # Synthesized names are b<slot> of the original diagram.
            name_to_slot = {name: int(name[1:]) for name in name_to_slot}

    sources = tuple(rep.space(BoxType(*b)) for b in diagram.inner)
    target = rep.space(diagram.outer)

    def rule(keys: tuple) -> FreeVector:
        args = {}
        for name, slot in name_to_slot.items():
            key = keys[slot - 1]
            bt = diagram.inner[slot - 1]
            args[name] = Morphism(rep, bt.lower, bt.upper,
                                  FreeVector.basis(rep.space(BoxType(*bt)), key))
        current = mor_identity(rep, diagram.outer.lower)
        width = diagram.outer.lower
        for row in grid.slices:
            layer = None
            for item in row:
                if item.kind == "id":
                    piece = mor_identity(rep, 1)
                elif item.kind == "cup":
                    piece = pair.delta
                elif item.kind == "cap":
                    piece = pair.eps
                else:
                    piece = args[item.name]
                layer = piece if layer is None else mor_tensor(layer, piece)
            if layer is None:
                layer = mor_identity(rep, 0)
            current = mor_compose(layer, current)
        # Free loops are part of the drawing (closed cup/cap circles), so the
        # rows above already multiplied them in.
        return current.vec

    return MultilinearMap(sources, target, rule)


def build_pi(diagram_or_grid, pair: RigidityPair) -> MultilinearMap:
    return assemble_action(diagram_or_grid, pair)


def check_assembly_agreement(rep: Representation, pair: RigidityPair,
                             diagrams: Sequence[Diagram]) -> CheckReport:
    """assemble_action vs the representation's native action, exactly."""
    import itertools
    report = CheckReport("assembled-vs-native")
    for diagram in diagrams:
        native = rep.action(diagram)
        built = assemble_action(diagram, pair)
        spaces = [rep.object_space(BoxType(*b)) for b in diagram.inner]
        for keys in itertools.product(*spaces):
            lhs = built.rule(tuple(keys))
            rhs = native.rule(tuple(keys))
            report.record({"diagram": str(diagram), "keys": str(keys)}, lhs, rhs)
    return report
