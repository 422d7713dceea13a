"""Seeded random grids and diagrams for the property-check suites."""

from __future__ import annotations

import random
from typing import Optional, Sequence

from .diagram import BoxType, Diagram
from .grid import GridPresentation, Item, compile_grid


def random_row(rng: random.Random, width: int, boxes: list[tuple[str, BoxType]],
               max_width: int) -> tuple[tuple[Item, ...], int]:
    """One random slice over `width` strands; may consume pending boxes."""
    items: list[Item] = []
    c = 0
    out_width = 0
    while c < width or (width == 0 and not items):
        remaining = width - c
        choices = ["id"] * 4 if remaining else []
        if out_width + remaining < max_width:
            choices += ["cup"] * 2
        if remaining >= 2:
            choices += ["cap"] * 2
        if boxes and boxes[0][1].lower <= remaining:
            choices += ["box"] * 3
        if not choices:
            choices = ["id"] if remaining else ["cup"]
        kind = rng.choice(choices)
        if kind == "box":
            name, shape = boxes.pop(0)
            items.append(Item("box", name, shape))
            c += shape.lower
            out_width += shape.upper
        elif kind == "id":
            items.append(Item("id"))
            c += 1
            out_width += 1
        elif kind == "cup":
            items.append(Item("cup"))
            out_width += 2
        else:
            items.append(Item("cap"))
            c += 2
        if width == 0 and items:
            break
    return tuple(items), out_width


def random_grid(rng: random.Random, *,
                bottom: Optional[int] = None,
                slices: int = 3,
                max_width: int = 6,
                box_types: Sequence[BoxType | tuple[int, int]] = ()) -> GridPresentation:
    """A random grid placing every requested box type exactly once."""
    boxes = [(f"b{i}", BoxType(*bt)) for i, bt in enumerate(box_types, start=1)]
    width = rng.randrange(0, max_width // 2 + 1) if bottom is None else bottom
    rows: list[tuple[Item, ...]] = []
    count = 0
    while boxes or count < slices:
        count += 1
        need = boxes[0][1].lower if boxes else 0
        if need > width:
            # Widen with cups until the next box fits.
            padding = [Item("cup")] * ((need - width + 1) // 2)
            rows.append(tuple([Item("id")] * width + padding))
            width += 2 * len(padding)
            continue
        row, width = random_row(rng, width, boxes, max_width)
        if row:
            rows.append(row)
        if count > slices + 20:
            break
    if not rows:
        rows = [(Item("cup"),), (Item("cap"),)]
    return GridPresentation(tuple(rows))


def random_diagram(rng: random.Random, **kwargs) -> Diagram:
    return compile_grid(random_grid(rng, **kwargs))


def random_plugging(rng: random.Random, *, slots: int = 2, max_width: int = 6,
                    part_boxes: int = 0) -> tuple[Diagram, list[Diagram]]:
    """A random host diagram with `slots` slots plus matching random parts."""
    parts = []
    types = []
    for _ in range(slots):
        inner = [(rng.randrange(0, 2), rng.randrange(0, 2)) for _ in range(part_boxes)]
        part = random_diagram(rng, slices=rng.randrange(1, 3),
                              max_width=max_width, box_types=inner)
        parts.append(part)
        types.append(part.outer)
    host = random_diagram(rng, slices=rng.randrange(2, 4),
                          max_width=max_width, box_types=types)
    return host, parts
