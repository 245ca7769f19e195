"""Finite limits, kernels and table searches over finite carriers."""

from __future__ import annotations

import logging
from collections.abc import Iterator, Mapping, Sequence

from pydantic import ValidationError

from cubex.config import Caps, active_caps
from cubex.errors import DiagramError, ResourceLimitError, UnsupportedStructureError
from cubex.types import (
    Cone,
    Edge,
    FinDiagram,
    FinMorphism,
    FinObject,
    SquareArrow,
    Structure,
    row_index,
)

logger = logging.getLogger(__name__)


# --- Construction helpers ---


def make_object(labels, structure: Structure | None = None) -> FinObject:
    try:
        return FinObject(labels=tuple(labels), structure=structure)
    except ValidationError as exc:
        raise DiagramError(f"invalid object: {exc.errors()[0]['msg']}") from exc


def make_morphism(dom: FinObject, cod: FinObject, table) -> FinMorphism:
    try:
        return FinMorphism(dom=dom, cod=cod, table=tuple(table))
    except ValidationError as exc:
        raise DiagramError(f"invalid morphism: {exc.errors()[0]['msg']}") from exc


def make_square(a, b, f1, f0) -> SquareArrow:
    try:
        return SquareArrow(a=a, b=b, f1=f1, f0=f0)
    except ValidationError as exc:
        raise DiagramError(f"invalid square: {exc.errors()[0]['msg']}") from exc


def identity(x: FinObject) -> FinMorphism:
    return FinMorphism.trusted(x, x, range(x.size))


def compose(g: FinMorphism, f: FinMorphism) -> FinMorphism:
    """``g ∘ f``; raises ``CompositionError`` when ``cod f != dom g``."""
    return g.after(f)


def is_surjective(f: FinMorphism) -> bool:
    return len(set(f.table)) == f.cod.size


def is_injective(f: FinMorphism) -> bool:
    return len(set(f.table)) == f.dom.size


def is_iso(f: FinMorphism) -> bool:
    return f.dom.size == f.cod.size and is_surjective(f)


def constant_map(dom: FinObject, cod: FinObject, value: int = 0) -> FinMorphism:
    return FinMorphism.trusted(dom, cod, [value] * dom.size)


def image_size(f: FinMorphism) -> int:
    return len(set(f.table))


def arrow_payload(f) -> dict:
    """JSON-friendly description of a morphism or square, used in witnesses."""
    if isinstance(f, SquareArrow):
        return {
            "a": arrow_payload(f.a),
            "b": arrow_payload(f.b),
            "f1": arrow_payload(f.f1),
            "f0": arrow_payload(f.f0),
        }
    return {
        "dom": list(f.dom.labels),
        "cod": list(f.cod.labels),
        "table": list(f.table),
    }


# --- Limits ---


def _check_diagram(d: FinDiagram) -> None:
    for e in d.edges:
        if e.src not in d.nodes or e.dst not in d.nodes:
            raise DiagramError(f"edge {e.src}->{e.dst} references an unknown node")
        if e.morphism.dom != d.nodes[e.src] or e.morphism.cod != d.nodes[e.dst]:
            raise DiagramError(f"edge {e.src}->{e.dst} does not match its node objects")


def _search_order(nodes: list[str], edges: Sequence[Edge]) -> list[str]:
    """Greedy order: next node is the one most tied to already placed nodes."""
    placed: list[str] = []
    remaining = set(nodes)
    while remaining:
        def score(n: str) -> tuple:
            forced = any(e.dst == n and e.src in placed for e in edges)
            ties = sum(1 for e in edges if (e.src == n and e.dst in placed) or (e.dst == n and e.src in placed))
            return (not forced, -ties, n)

        best = min(remaining, key=score)
        placed.append(best)
        remaining.discard(best)
    return placed


def compute_limit(
    d: FinDiagram,
    *,
    visible: Sequence[str] | None = None,
    caps: Caps | None = None,
) -> Cone:
    """Limit of a finite diagram as compatible tuples.

    Apex elements are labelled by the tuple of their ``visible`` coordinates
    (every node, in node-id order, by default) and enumerated in
    lexicographic order of those coordinates.  The visible nodes must
    determine the rest.  A single visible node keeps its own labels.
    The apex gets the pointwise structure when every node shares a
    signature.
    """
    caps = caps or active_caps()
    _check_diagram(d)
    node_ids = sorted(d.nodes)
    if visible is None:
        visible = node_ids
    visible = tuple(visible)
    if not visible or any(v not in d.nodes for v in visible):
        raise DiagramError("visible nodes must be a non-empty subset of the diagram")
    pos = {n: i for i, n in enumerate(node_ids)}
    order = _search_order(node_ids, d.edges)

    incoming = {n: [e for e in d.edges if e.dst == n] for n in node_ids}
    outgoing = {n: [e for e in d.edges if e.src == n] for n in node_ids}
    fibers: dict[int, dict[int, list[int]]] = {}
    for k, e in enumerate(d.edges):
        fib: dict[int, list[int]] = {}
        for x, y in enumerate(e.morphism.table):
            fib.setdefault(y, []).append(x)
        fibers[k] = fib
    edge_id = {id(e): k for k, e in enumerate(d.edges)}

    value: dict[str, int] = {}
    found: list[tuple[int, ...]] = []

    def candidates(n: str) -> Sequence[int]:
        for e in incoming[n]:
            if e.src in value:
                return (e.morphism.table[value[e.src]],)
        for e in outgoing[n]:
            if e.dst in value:
                return fibers[edge_id[id(e)]].get(value[e.dst], ())
        return range(d.nodes[n].size)

    def consistent(n: str) -> bool:
        x = value[n]
        for e in outgoing[n]:
            if e.dst in value and e.morphism.table[x] != value[e.dst]:
                return False
        for e in incoming[n]:
            if e.src in value and e.morphism.table[value[e.src]] != x:
                return False
        return True

    def search(depth: int) -> None:
        if depth == len(order):
            found.append(tuple(value[n] for n in node_ids))
            if len(found) > caps.apex_cap:
                raise ResourceLimitError("apex_cap", caps.apex_cap, "limit apex")
            return
        n = order[depth]
        for x in candidates(n):
            value[n] = x
            if consistent(n):
                search(depth + 1)
            del value[n]

    search(0)
    vis_pos = [pos[v] for v in visible]
    found.sort(key=lambda t: (tuple(t[p] for p in vis_pos), t))
    keys = [tuple(t[p] for p in vis_pos) for t in found]
    if len(set(keys)) != len(keys):
        raise DiagramError("visible nodes do not determine the limit")
    if len(visible) == 1:
        obj = d.nodes[visible[0]]
        labels = [obj.labels[k[0]] for k in keys]
    else:
        labels = [
            "(" + ",".join(d.nodes[v].labels[x] for v, x in zip(visible, k)) + ")"
            for k in keys
        ]
    structure = _pointwise_structure([d.nodes[n] for n in node_ids], found)
    apex = FinObject.trusted(labels, structure)
    legs = {
        n: FinMorphism.trusted(apex, d.nodes[n], (t[pos[n]] for t in found))
        for n in node_ids
    }
    logger.debug("limit over %d nodes has %d elements", len(node_ids), len(found))
    return Cone(apex=apex, legs=legs, visible=visible)


def _pointwise_structure(objs: list[FinObject], tuples: list[tuple[int, ...]]) -> Structure | None:
    if not objs or any(o.structure is None for o in objs):
        return None
    first = objs[0].structure
    if any(o.structure.signature != first.signature for o in objs[1:]):
        return None
    theory = first.theory if all(o.structure.theory is first.theory for o in objs) else None
    index = {t: i for i, t in enumerate(tuples)}
    m = len(tuples)
    tables = []
    for j, op in enumerate(first.signature.ops):
        k = op.arity
        coord_tables = [o.structure.tables[j] for o in objs]
        sizes = [o.size for o in objs]
        table = []
        for r in range(m**k):
            args, q = [], r
            for _ in range(k):
                q, a = divmod(q, m)
                args.append(tuples[a])
            args.reverse()
            res = tuple(
                coord_tables[c][row_index([t[c] for t in args], sizes[c])]
                for c in range(len(objs))
            )
            if res not in index:
                raise DiagramError(f"limit is not closed under {op.name}")
            table.append(index[res])
        tables.append(tuple(table))
    return Structure.model_construct(signature=first.signature, tables=tuple(tables), theory=theory)


def mediate(cone: Cone, source: FinObject, maps: Mapping[str, FinMorphism]) -> FinMorphism:
    """Unique map ``source -> apex`` given maps into the visible nodes."""
    legs = [cone.legs[v] for v in cone.visible]
    for v in cone.visible:
        f = maps.get(v)
        if f is None:
            raise DiagramError(f"no map into node {v}")
        if f.dom != source:
            raise DiagramError(f"map into node {v} has the wrong domain")
    index = {tuple(leg.table[a] for leg in legs): a for a in range(cone.apex.size)}
    table = []
    for x in range(source.size):
        key = tuple(maps[v].table[x] for v in cone.visible)
        a = index.get(key)
        if a is None:
            raise DiagramError("maps do not form a cone over the diagram")
        table.append(a)
    return FinMorphism.trusted(source, cone.apex, table)


def compute_pullback(f: FinMorphism, g: FinMorphism, *, caps: Caps | None = None) -> Cone:
    """Pullback of ``f`` and ``g``; legs ``p0`` toward ``dom f``, ``p1`` toward ``dom g``."""
    if f.cod != g.cod:
        raise DiagramError("pullback needs a common codomain")
    d = FinDiagram(
        nodes={"p0": f.dom, "p1": g.dom, "z": f.cod},
        edges=(Edge(src="p0", dst="z", morphism=f), Edge(src="p1", dst="z", morphism=g)),
    )
    return compute_limit(d, visible=("p0", "p1"), caps=caps)


def kernel_pair(f: FinMorphism, *, caps: Caps | None = None) -> Cone:
    return compute_pullback(f, f, caps=caps)


def compute_kernel(f: FinMorphism) -> tuple[FinObject, FinMorphism]:
    """Kernel of ``f`` at the codomain's designated constant, with its inclusion."""
    if f.cod.structure is None or not f.cod.structure.signature.constants:
        raise UnsupportedStructureError("kernel needs a designated constant in the codomain")
    st = f.dom.structure
    if st is None or st.signature != f.cod.structure.signature:
        raise UnsupportedStructureError("kernel needs structured domain and codomain")
    point = f.cod.structure.tables[st.signature.constants[0]][0]
    members = [x for x in range(f.dom.size) if f.table[x] == point]
    where = {x: i for i, x in enumerate(members)}
    m, n = f.dom.size, len(members)
    tables = []
    for op, table in zip(st.signature.ops, st.tables):
        k = op.arity
        sub = []
        for r in range(n**k):
            args, q = [], r
            for _ in range(k):
                q, a = divmod(q, n)
                args.append(members[a])
            args.reverse()
            res = table[row_index(args, m)]
            if res not in where:
                raise UnsupportedStructureError(f"kernel is not closed under {op.name}")
            sub.append(where[res])
        tables.append(tuple(sub))
    structure = Structure.model_construct(signature=st.signature, tables=tuple(tables), theory=st.theory)
    obj = FinObject.trusted([f.dom.labels[x] for x in members], structure)
    return obj, FinMorphism.trusted(obj, f.dom, members)


# --- Table searches ---


def _op_constraints(dom: FinObject, cod: FinObject) -> list[list[tuple[tuple[int, ...], int, tuple[int, ...]]]]:
    """Homomorphism constraints bucketed by the last domain element they mention."""
    buckets: list[list] = [[] for _ in range(dom.size)]
    if dom.structure is None or cod.structure is None or dom.structure.signature != cod.structure.signature:
        return buckets
    m = dom.size
    for op, dt, ct in zip(dom.structure.signature.ops, dom.structure.tables, cod.structure.tables):
        k = op.arity
        for r in range(m**k):
            args, q = [], r
            for _ in range(k):
                q, a = divmod(q, m)
                args.append(a)
            args.reverse()
            res = dt[r]
            step = max([*args, res])
            buckets[step].append((tuple(args), res, ct))
    return buckets


def search_tables(
    dom: FinObject,
    cod: FinObject,
    candidates: Sequence[Sequence[int]],
    *,
    structured: bool = True,
    cap: int,
    cap_name: str = "section_search_cap",
) -> Iterator[tuple[int, ...]]:
    """Yield tables ``dom -> cod`` in lexicographic order.

    ``candidates[x]`` lists the allowed images of ``x``.  With ``structured``
    the tables must be homomorphisms.  Visiting more than ``cap`` partial
    tables raises ``ResourceLimitError``.
    """
    m = dom.size
    buckets = _op_constraints(dom, cod) if structured else [[] for _ in range(m)]
    n = cod.size
    table = [0] * m
    visited = 0

    def ok(step: int) -> bool:
        for args, res, ct in buckets[step]:
            if ct[row_index([table[a] for a in args], n)] != table[res]:
                return False
        return True

    def walk(x: int) -> Iterator[tuple[int, ...]]:
        nonlocal visited
        if x == m:
            yield tuple(table)
            return
        for y in candidates[x]:
            visited += 1
            if visited > cap:
                raise ResourceLimitError(cap_name, cap, "table search")
            table[x] = y
            if ok(x):
                yield from walk(x + 1)

    yield from walk(0)


def iter_sections(f: FinMorphism, *, caps: Caps | None = None) -> Iterator[FinMorphism]:
    """All homomorphic sections of ``f`` in lexicographic order."""
    caps = caps or active_caps()
    fibers: list[list[int]] = [[] for _ in range(f.cod.size)]
    for x, y in enumerate(f.table):
        fibers[y].append(x)
    if any(not fib for fib in fibers):
        return
    for t in search_tables(f.cod, f.dom, fibers, cap=caps.section_search_cap):
        yield FinMorphism.trusted(f.cod, f.dom, t)


def is_split_epi(f: FinMorphism, *, caps: Caps | None = None) -> FinMorphism | None:
    return next(iter_sections(f, caps=caps), None)


def iter_morphisms(
    x: FinObject,
    y: FinObject,
    *,
    structured: bool = True,
    caps: Caps | None = None,
) -> Iterator[FinMorphism]:
    """Every map (homomorphism by default) ``x -> y`` in lexicographic order."""
    caps = caps or active_caps()
    every = [range(y.size)] * x.size
    for t in search_tables(x, y, every, structured=structured, cap=caps.section_search_cap):
        yield FinMorphism.trusted(x, y, t)
