"""Extension classes, double extensions and finite-universe axiom audits."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Sequence
from enum import Enum

from cubex import core
from cubex.category import ArrowCategory, FinCategory, Pullback
from cubex.config import Caps, active_caps
from cubex.errors import DiagramError, ResourceLimitError
from cubex.types import (
    AuditReport,
    AxiomFinding,
    AxiomStatus,
    FinMorphism,
    SquareArrow,
)

logger = logging.getLogger(__name__)


class ClassName(str, Enum):
    SURJECTIONS = "surjections"
    SPLIT_EPIS = "split-epis"
    ISOMORPHISMS = "isomorphisms"
    ALL = "all"
    SET_SPLIT = "set-split"


class ExtensionClass:
    """A named class ``E`` of arrows in ``category``."""

    def __init__(self, name: str, category, predicate: Callable[[object], bool], base: ExtensionClass | None = None):
        self.name = name
        self.category = category
        self.base = base
        self._predicate = predicate
        self._memo: dict = {}

    def contains(self, f) -> bool:
        hit = self._memo.get(f)
        if hit is None:
            hit = self._memo[f] = bool(self._predicate(f))
        return hit

    @property
    def depth(self) -> int:
        return 0 if self.base is None else self.base.depth + 1

    def __repr__(self) -> str:
        return f"ExtensionClass({self.name!r})"


def _set_split(f: FinMorphism) -> bool:
    fibers: list[list[int]] = [[] for _ in range(f.cod.size)]
    for x, y in enumerate(f.table):
        fibers[y].append(x)
    if any(not fib for fib in fibers):
        return False
    caps = active_caps()
    found = core.search_tables(
        f.cod, f.dom, fibers, structured=False, cap=caps.section_search_cap
    )
    return next(found, None) is not None


_PREDICATES: dict[ClassName, Callable[[FinMorphism], bool]] = {
    ClassName.SURJECTIONS: core.is_surjective,
    ClassName.SPLIT_EPIS: lambda f: core.is_split_epi(f) is not None,
    ClassName.ISOMORPHISMS: core.is_iso,
    ClassName.ALL: lambda f: True,
    ClassName.SET_SPLIT: _set_split,
}


def extension_class(name: str | ClassName) -> ExtensionClass:
    """Look up a base class by its CLI name."""
    if name == "all-morphisms":
        name = ClassName.ALL
    try:
        key = ClassName(name)
    except ValueError as exc:
        choices = ", ".join(c.value for c in ClassName)
        raise ValueError(f"Unknown extension class {name!r} (choose from {choices})") from exc
    return ExtensionClass(key.value, FinCategory(), _PREDICATES[key])


def member(e: ExtensionClass, f) -> bool:
    return e.contains(f)


# --- Double extensions ---


def comparison_to_pullback(category, s: SquareArrow, caps: Caps | None = None) -> tuple[Pullback, object]:
    """Pullback of ``b`` and ``f0`` and the induced ``⟨a, f1⟩ : dom a -> P``."""
    pb = category.pullback(s.f0, s.b, caps)
    return pb, category.induce(pb, s.a, s.f1)


def is_double_extension(e: ExtensionClass, s: SquareArrow) -> bool:
    """All four sides and the comparison to the pullback lie in ``e``."""
    if not all(e.contains(x) for x in (s.a, s.b, s.f1, s.f0)):
        return False
    _, comparison = comparison_to_pullback(e.category, s)
    return e.contains(comparison)


def lift_class(e: ExtensionClass) -> ExtensionClass:
    """``E¹``: the double extensions of ``e``, a class of squares."""
    return ExtensionClass(
        f"{e.name}^{e.depth + 1}",
        ArrowCategory(e.category),
        lambda s: is_double_extension(e, s),
        base=e,
    )


def transpose_square(s: SquareArrow) -> SquareArrow:
    """The same square read in the other direction."""
    return SquareArrow.trusted(s.f1, s.f0, s.a, s.b)


# --- (E5⁺) ---


def kernel_restriction(a: FinMorphism, b: FinMorphism, f: FinMorphism) -> FinMorphism:
    """The map ``k: K[a] -> K[b]`` that ``f`` restricts to."""
    ka, ia = core.compute_kernel(a)
    kb, ib = core.compute_kernel(b)
    where = {x: i for i, x in enumerate(ib.table)}
    table = []
    for x in ia.table:
        y = f.table[x]
        if y not in where:
            raise DiagramError("f does not map the kernel of a into the kernel of b")
        table.append(where[y])
    return FinMorphism.trusted(ka, kb, table)


def check_e5_plus(
    e: ExtensionClass,
    a: FinMorphism,
    b: FinMorphism,
    f: FinMorphism,
    k: FinMorphism | None = None,
) -> bool:
    """One instance of: ``k`` in ``e`` implies ``f`` in ``e``.

    ``a`` and ``b`` are the extensions of the two short exact rows and
    ``b∘f = a``.
    """
    if b.after(f) != a:
        raise DiagramError("the triangle b∘f = a does not commute")
    if not (e.contains(a) and e.contains(b)):
        raise DiagramError("a and b must be extensions")
    restricted = kernel_restriction(a, b, f)
    if k is not None and k != restricted:
        raise DiagramError("k is not the restriction of f to the kernels")
    return (not e.contains(restricted)) or e.contains(f)


# --- Audits ---


class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def spend(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.cap:
            raise ResourceLimitError("audit_instance_cap", self.cap, "axiom audit")


def _dedupe(arrows: Iterable) -> list:
    seen, out = set(), []
    for f in arrows:
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


def _finding(axiom: str, checked: int, witness: dict | None) -> AxiomFinding:
    if witness is not None:
        status = AxiomStatus.VIOLATED
    elif checked == 0:
        status = AxiomStatus.NOT_APPLICABLE
    else:
        status = AxiomStatus.VERIFIED
    return AxiomFinding(axiom=axiom, status=status, checked=checked, witness=witness)


def _payload(f) -> dict:
    return core.arrow_payload(f)


def audit_axioms(
    e: ExtensionClass,
    universe: Sequence,
    *,
    axioms: Sequence[str] = ("E1", "E2", "E3", "E4", "E5"),
    caps: Caps | None = None,
) -> AuditReport:
    """Check the axioms on every instance drawn from ``universe``.

    Verdicts hold on the universe only.  Pullback legs and composites the
    audit constructs are tested even when they fall outside the universe.
    """
    caps = caps or active_caps()
    cat = e.category
    arrows = _dedupe(universe)
    budget = _Budget(caps.audit_instance_cap)
    members = [f for f in arrows if e.contains(f)]
    by_cod: dict = {}
    by_dom: dict = {}
    for f in arrows:
        by_cod.setdefault(cat.cod(f), []).append(f)
        by_dom.setdefault(cat.dom(f), []).append(f)

    checks = {
        "E1": lambda: _audit_e1(e, arrows, budget),
        "E2": lambda: _audit_e2(e, members, by_cod, budget, caps),
        "E3": lambda: _audit_e3(e, members, budget),
        "E4": lambda: _audit_e4(e, arrows, by_dom, budget),
        "E5": lambda: _audit_e5(e, members, arrows, by_dom, budget, caps),
    }
    findings = [checks[ax]() for ax in sorted(axioms)]
    logger.info("audit of %s over %d arrows used %d instances", e.name, len(arrows), budget.used)
    return AuditReport(class_name=e.name, universe_size=len(arrows), findings=findings)


def _audit_e1(e: ExtensionClass, arrows: list, budget: _Budget) -> AxiomFinding:
    cat = e.category
    objects = _dedupe([cat.dom(f) for f in arrows] + [cat.cod(f) for f in arrows])
    candidates = [cat.identity(x) for x in objects] + [f for f in arrows if cat.is_iso(f)]
    checked = 0
    for f in candidates:
        budget.spend()
        checked += 1
        if not e.contains(f):
            return _finding("E1", checked, {"iso": _payload(f)})
    return _finding("E1", checked, None)


def _audit_e2(e: ExtensionClass, members: list, by_cod: dict, budget: _Budget, caps: Caps) -> AxiomFinding:
    cat = e.category
    checked = 0
    for f in members:
        for g in by_cod.get(cat.cod(f), []):
            budget.spend()
            checked += 1
            pb = cat.pullback(f, g, caps)
            if not e.contains(pb.p1):
                return _finding("E2", checked, {"f": _payload(f), "g": _payload(g), "pullback": _payload(pb.p1)})
    return _finding("E2", checked, None)


def _audit_e3(e: ExtensionClass, members: list, budget: _Budget) -> AxiomFinding:
    cat = e.category
    by_dom: dict = {}
    for g in members:
        by_dom.setdefault(cat.dom(g), []).append(g)
    checked = 0
    for f in members:
        for g in by_dom.get(cat.cod(f), []):
            budget.spend()
            checked += 1
            if not e.contains(cat.compose(g, f)):
                return _finding("E3", checked, {"f": _payload(f), "g": _payload(g)})
    return _finding("E3", checked, None)


def _audit_e4(e: ExtensionClass, arrows: list, by_dom: dict, budget: _Budget) -> AxiomFinding:
    cat = e.category
    checked = 0
    for f in arrows:
        for g in by_dom.get(cat.cod(f), []):
            if not e.contains(cat.compose(g, f)):
                continue
            budget.spend()
            checked += 1
            if not e.contains(g):
                return _finding("E4", checked, {"f": _payload(f), "g": _payload(g)})
    return _finding("E4", checked, None)


def _audit_e5(
    e: ExtensionClass,
    members: list,
    arrows: list,
    by_dom: dict,
    budget: _Budget,
    caps: Caps,
) -> AxiomFinding:
    """Split epimorphisms ``(f1, f0): a -> b`` between members."""
    cat = e.category
    squares = ArrowCategory(cat)
    split = {f: cat.first_section(f, caps) is not None for f in arrows}
    member_set = set(members)
    checked = 0
    for a in members:
        tops = [f for f in by_dom.get(cat.dom(a), []) if split[f]]
        bottoms = [f for f in by_dom.get(cat.cod(a), []) if split[f]]
        for f1 in tops:
            for f0 in bottoms:
                for b in by_dom.get(cat.cod(f1), []):
                    if b not in member_set or cat.cod(b) != cat.cod(f0):
                        continue
                    if cat.compose(b, f1) != cat.compose(f0, a):
                        continue
                    s = SquareArrow.trusted(a, b, f1, f0)
                    section = squares.first_section(s, caps)
                    if section is None:
                        continue
                    budget.spend()
                    checked += 1
                    if not is_double_extension(e, s):
                        _, comparison = comparison_to_pullback(cat, s, caps)
                        witness = {"square": _payload(s), "section": _payload(section)}
                        if isinstance(comparison, FinMorphism):
                            witness["comparison_image"] = core.image_size(comparison)
                            witness["pullback_size"] = comparison.cod.size
                        return _finding("E5", checked, witness)
    return _finding("E5", checked, None)
