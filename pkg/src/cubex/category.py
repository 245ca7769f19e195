"""The categories extension classes live in.

``FinCategory`` is finite sets or finite algebras; ``ArrowCategory(base)``
has the arrows of ``base`` as objects and commutative squares as arrows.
Arrow categories nest, so squares of squares are arrows of
``ArrowCategory(ArrowCategory(FinCategory()))``.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from typing import Any

from cubex import core
from cubex.config import Caps, active_caps
from cubex.errors import DiagramError, ResourceLimitError
from cubex.types import Cone, FinMorphism, FinObject, SquareArrow


@dataclass(frozen=True)
class Pullback:
    """A chosen pullback of the cospan ``(f, g)``: ``f∘p0 = g∘p1``."""

    apex: Any
    p0: Any
    p1: Any
    cone: Cone | None = None
    parts: tuple[Pullback, Pullback] | None = None


class FinCategory:
    name = "fin"

    def compose(self, g: FinMorphism, f: FinMorphism) -> FinMorphism:
        return g.after(f)

    def identity(self, x: FinObject) -> FinMorphism:
        return core.identity(x)

    def dom(self, f: FinMorphism) -> FinObject:
        return f.dom

    def cod(self, f: FinMorphism) -> FinObject:
        return f.cod

    def is_iso(self, f: FinMorphism) -> bool:
        return core.is_iso(f)

    def pullback(self, f: FinMorphism, g: FinMorphism, caps: Caps | None = None) -> Pullback:
        cone = core.compute_pullback(f, g, caps=caps)
        return Pullback(apex=cone.apex, p0=cone.legs["p0"], p1=cone.legs["p1"], cone=cone)

    def induce(self, pb: Pullback, x0: FinMorphism, x1: FinMorphism) -> FinMorphism:
        """The map ``⟨x0, x1⟩`` into the pullback apex."""
        return core.mediate(pb.cone, x0.dom, {"p0": x0, "p1": x1})

    def iter_sections(self, f: FinMorphism, caps: Caps | None = None) -> Iterator[FinMorphism]:
        return core.iter_sections(f, caps=caps)

    def first_section(self, f: FinMorphism, caps: Caps | None = None) -> FinMorphism | None:
        return next(self.iter_sections(f, caps=caps), None)


class ArrowCategory:
    """Arrows of ``base`` and the commutative squares between them."""

    def __init__(self, base: FinCategory | ArrowCategory):
        self.base = base
        self.name = f"arr({base.name})"

    def compose(self, g: SquareArrow, f: SquareArrow) -> SquareArrow:
        return g.after(f)

    def identity(self, x) -> SquareArrow:
        b = self.base
        return SquareArrow.trusted(x, x, b.identity(b.dom(x)), b.identity(b.cod(x)))

    def dom(self, f: SquareArrow):
        return f.a

    def cod(self, f: SquareArrow):
        return f.b

    def is_iso(self, f: SquareArrow) -> bool:
        return self.base.is_iso(f.f1) and self.base.is_iso(f.f0)

    def pullback(self, f: SquareArrow, g: SquareArrow, caps: Caps | None = None) -> Pullback:
        """Levelwise pullback of two squares with a common codomain arrow."""
        if f.b != g.b:
            raise DiagramError("pullback needs a common codomain")
        b = self.base
        top = b.pullback(f.f1, g.f1, caps)
        bottom = b.pullback(f.f0, g.f0, caps)
        arrow = b.induce(bottom, b.compose(f.a, top.p0), b.compose(g.a, top.p1))
        p0 = SquareArrow.trusted(arrow, f.a, top.p0, bottom.p0)
        p1 = SquareArrow.trusted(arrow, g.a, top.p1, bottom.p1)
        return Pullback(apex=arrow, p0=p0, p1=p1, parts=(top, bottom))

    def induce(self, pb: Pullback, x0: SquareArrow, x1: SquareArrow) -> SquareArrow:
        top, bottom = pb.parts
        b = self.base
        f1 = b.induce(top, x0.f1, x1.f1)
        f0 = b.induce(bottom, x0.f0, x1.f0)
        return SquareArrow.trusted(x0.a, pb.apex, f1, f0)

    def iter_sections(self, f: SquareArrow, caps: Caps | None = None) -> Iterator[SquareArrow]:
        """Sections ``s: f.b -> f.a`` with ``f∘s = 1``, componentwise lexicographic."""
        caps = caps or active_caps()
        b = self.base
        bottoms = list(b.iter_sections(f.f0, caps))
        if not bottoms:
            return
        tried = 0
        for s1 in b.iter_sections(f.f1, caps):
            left = b.compose(f.a, s1)
            for s0 in bottoms:
                tried += 1
                if tried > caps.section_search_cap:
                    raise ResourceLimitError("section_search_cap", caps.section_search_cap, "square section search")
                if left == b.compose(s0, f.b):
                    yield SquareArrow.trusted(f.b, f.a, s1, s0)

    def first_section(self, f: SquareArrow, caps: Caps | None = None) -> SquareArrow | None:
        return next(self.iter_sections(f, caps), None)


def category_of(arrow) -> FinCategory | ArrowCategory:
    """The category an arrow naturally lives in, by nesting depth."""
    if isinstance(arrow, FinMorphism):
        return FinCategory()
    return ArrowCategory(category_of(arrow.a))
