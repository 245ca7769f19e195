"""n-cubes, their arrow views and the two n-fold extension checkers.

A cube is stored by bitmask: vertex ``S`` is ``objects[mask(S)]`` and the
generator ``A_S -> A_{S - {i}}`` is ``maps[mask(S)][i]``.  Viewed as an
arrow, a cube points in the direction of its largest index.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence

from pydantic import ValidationError

from cubex import core
from cubex.classes import ExtensionClass
from cubex.config import Caps, active_caps
from cubex.errors import CommutativityError, DiagramError, ResourceLimitError
from cubex.types import (
    ArrowView,
    Cone,
    Cube,
    Edge,
    FinDiagram,
    FinMorphism,
    FinObject,
    SquareArrow,
    to_mask,
    to_subset,
)

logger = logging.getLogger(__name__)


def build_cube(
    dim: int,
    objects: Mapping,
    maps: Mapping,
    *,
    caps: Caps | None = None,
) -> Cube:
    """Validate and assemble a cube.

    ``objects`` maps subsets (iterables of indices or bitmasks) to objects;
    ``maps`` maps ``(subset, i)`` with ``i in subset`` to the generator
    ``A_subset -> A_{subset - {i}}``.
    """
    caps = caps or active_caps()
    if dim > caps.cube_dim_cap:
        raise ResourceLimitError("cube_dim_cap", caps.cube_dim_cap, f"cube of dimension {dim}")
    count = 1 << dim
    objs: list[FinObject | None] = [None] * count
    for key, obj in objects.items():
        m = to_mask(key)
        if m >= count:
            raise DiagramError(f"vertex {list(to_subset(m))} is outside a {dim}-cube")
        objs[m] = obj
    for m, obj in enumerate(objs):
        if obj is None:
            raise DiagramError(f"missing object at vertex {list(to_subset(m))}")
    rows: list[list[FinMorphism | None]] = [[None] * dim for _ in range(count)]
    for (key, i), f in maps.items():
        m = to_mask(key)
        if m >= count or not m >> i & 1:
            raise DiagramError(f"generator ({list(to_subset(m))}, {i}) does not fit the cube")
        rows[m][i] = f
    for m in range(count):
        for i in to_subset(m):
            if rows[m][i] is None:
                raise DiagramError(f"missing generator at vertex {list(to_subset(m))} direction {i}")
    try:
        cube = Cube(dim=dim, objects=tuple(objs), maps=tuple(tuple(r) for r in rows))
    except ValidationError as exc:
        raise DiagramError(f"invalid cube: {exc.errors()[0]['msg']}") from exc
    check_commutativity(cube)
    return cube


def check_commutativity(c: Cube) -> None:
    """Raise ``CommutativityError`` at the first non-commuting face ``(S, i, j)``."""
    n = c.dim
    for s in range(1 << n):
        free = [i for i in range(n) if not s >> i & 1]
        for x, i in enumerate(free):
            for j in free[x + 1:]:
                sij = s | 1 << i | 1 << j
                left = c.maps[s | 1 << i][i].after(c.maps[sij][j])
                right = c.maps[s | 1 << j][j].after(c.maps[sij][i])
                if left.table != right.table:
                    raise CommutativityError(to_subset(s), i, j)


def cube_from_morphism(f: FinMorphism) -> Cube:
    return Cube.model_construct(dim=1, objects=(f.cod, f.dom), maps=((None,), (f,)))


def cube_from_object(x: FinObject) -> Cube:
    return Cube.model_construct(dim=0, objects=(x,), maps=((),))


def cube_from_square(s: SquareArrow) -> Cube:
    """The 2-cube of a square ``(f1, f0): a -> b``.

    ``A_{0,1} = dom a``, ``A_{0} = dom b``, ``A_{1} = cod a``, ``A_∅ = cod b``;
    removing 1 is the horizontal direction.
    """
    objects = {(0, 1): s.a.dom, (0,): s.b.dom, (1,): s.a.cod, (): s.b.cod}
    maps = {
        ((0, 1), 1): s.f1,
        ((0, 1), 0): s.a,
        ((0,), 0): s.b,
        ((1,), 1): s.f0,
    }
    return build_cube(2, objects, maps)


def square_of(c: Cube) -> SquareArrow:
    if c.dim != 2:
        raise DiagramError("only 2-cubes are squares")
    return SquareArrow.trusted(c.maps[0b11][0], c.maps[0b01][0], c.maps[0b11][1], c.maps[0b10][1])


class Composites:
    """Memoized composites ``a^T_S`` of one cube."""

    def __init__(self, cube: Cube):
        self.cube = cube
        self._memo: dict[tuple[int, int], FinMorphism] = {}

    def __call__(self, t: int, s: int) -> FinMorphism:
        if s & ~t:
            raise DiagramError("composite needs S ⊆ T")
        if s == t:
            return core.identity(self.cube.objects[t])
        key = (t, s)
        hit = self._memo.get(key)
        if hit is None:
            i = to_subset(t & ~s)[0]
            first = self.cube.maps[t][i]
            hit = first if t & ~(1 << i) == s else self(t & ~(1 << i), s).after(first)
            self._memo[key] = hit
        return hit


def composite(c: Cube, t, s) -> FinMorphism:
    return Composites(c)(to_mask(t), to_mask(s))


# --- Arrow views ---


def _squeeze(mask: int, i: int) -> int:
    """Drop bit ``i`` and shift higher bits down."""
    low = mask & ((1 << i) - 1)
    return low | (mask >> (i + 1)) << i


def _expand(mask: int, i: int) -> int:
    """Inverse of ``_squeeze`` with bit ``i`` cleared."""
    low = mask & ((1 << i) - 1)
    return low | (mask >> i) << (i + 1)


def _sub_cube(c: Cube, i: int, with_i: bool) -> Cube:
    n = c.dim - 1
    bit = 1 << i if with_i else 0
    objects, maps = [], []
    for m in range(1 << n):
        full = _expand(m, i) | bit
        objects.append(c.objects[full])
        row = []
        for j in range(n):
            jj = j if j < i else j + 1
            row.append(c.maps[full][jj] if m >> j & 1 else None)
        maps.append(tuple(row))
    return Cube.model_construct(dim=n, objects=tuple(objects), maps=tuple(maps))


def arrow_view(c: Cube, i: int) -> ArrowView:
    if not 0 <= i < c.dim:
        raise DiagramError(f"direction {i} is outside a {c.dim}-cube")
    components = tuple(c.maps[_expand(m, i) | 1 << i][i] for m in range(1 << (c.dim - 1)))
    return ArrowView(
        direction=i,
        domain=_sub_cube(c, i, True),
        codomain=_sub_cube(c, i, False),
        components=components,
    )


def arrow_views(c: Cube) -> list[ArrowView]:
    """One view per direction; empty for a 0-cube."""
    return [arrow_view(c, i) for i in range(c.dim)]


def principal_view(c: Cube) -> ArrowView:
    """The view along the largest index."""
    if c.dim == 0:
        raise DiagramError("a 0-cube is not an arrow")
    return arrow_view(c, c.dim - 1)


def reassemble(view: ArrowView) -> Cube:
    """Glue a view back into the cube it came from."""
    n = view.domain.dim + 1
    i = view.direction
    if view.codomain.dim != n - 1 or len(view.components) != 1 << (n - 1):
        raise DiagramError("domain, codomain and components do not fit together")
    objects: list = [None] * (1 << n)
    rows: list = [[None] * n for _ in range(1 << n)]
    for m in range(1 << (n - 1)):
        lo = _expand(m, i)
        hi = lo | 1 << i
        objects[lo] = view.codomain.objects[m]
        objects[hi] = view.domain.objects[m]
        rows[hi][i] = view.components[m]
        for j in range(n - 1):
            if m >> j & 1:
                jj = j if j < i else j + 1
                rows[lo][jj] = view.codomain.maps[m][j]
                rows[hi][jj] = view.domain.maps[m][j]
    cube = Cube(dim=n, objects=tuple(objects), maps=tuple(tuple(r) for r in rows))
    check_commutativity(cube)
    return cube


# --- Limits over proper sub-shapes ---


def _node(mask: int) -> str:
    return "J" + "_".join(str(i) for i in to_subset(mask))


def _sub_diagram(c: Cube, top: int, reduced: bool) -> tuple[FinDiagram, list[int], list[int]]:
    size = bin(top).count("1")
    subs = [s for s in range(1 << c.dim) if s & ~top == 0 and s != top]
    if reduced:
        subs = [s for s in subs if bin(s).count("1") >= size - 2]
    upper = [s for s in subs if bin(s).count("1") == size - 1]
    nodes = {_node(s): c.objects[s] for s in subs}
    edges = []
    present = set(subs)
    for s in subs:
        for i in to_subset(s):
            t = s & ~(1 << i)
            if t in present:
                edges.append(Edge(src=_node(s), dst=_node(t), morphism=c.maps[s][i]))
    return FinDiagram(nodes=nodes, edges=tuple(edges)), subs, upper


def sublimit(c: Cube, subset, *, reduced: bool = True, caps: Caps | None = None) -> Cone:
    """``lim_{J ⊊ I} A_J``; ``reduced`` keeps only ``|J| >= |I| - 2``."""
    top = to_mask(subset)
    if top == 0:
        raise DiagramError("the empty subset has no proper sub-shape")
    diagram, _, upper = _sub_diagram(c, top, reduced)
    return core.compute_limit(diagram, visible=[_node(s) for s in upper], caps=caps)


def sublimit_comparison(
    c: Cube,
    subset,
    *,
    reduced: bool = True,
    caps: Caps | None = None,
    composites: Composites | None = None,
) -> tuple[Cone, FinMorphism]:
    """The limit below ``I`` and the induced comparison ``A_I -> lim``."""
    top = to_mask(subset)
    cone = sublimit(c, top, reduced=reduced, caps=caps)
    comp = composites or Composites(c)
    maps = {}
    for name in cone.visible:
        s = to_mask([int(x) for x in name[1:].split("_") if x])
        maps[name] = comp(top, s)
    return cone, core.mediate(cone, c.objects[top], maps)


def extension_failures(c: Cube, e: ExtensionClass, *, caps: Caps | None = None, first_only: bool = False) -> list[tuple[int, ...]]:
    """Nonempty subsets ``I`` whose comparison is not in ``e``, smallest first."""
    caps = caps or active_caps()
    comp = Composites(c)
    failures = []
    for top in sorted(range(1, 1 << c.dim), key=lambda m: (bin(m).count("1"), m)):
        _, f = sublimit_comparison(c, top, caps=caps, composites=comp)
        if not e.contains(f):
            failures.append(to_subset(top))
            if first_only:
                break
    return failures


def is_extension_limitwise(c: Cube, e: ExtensionClass, *, caps: Caps | None = None) -> bool:
    return not extension_failures(c, e, caps=caps, first_only=True)


def is_extension_inductive(c: Cube, e: ExtensionClass, *, caps: Caps | None = None) -> bool:
    """Recursive check: every codomain view is an extension and so is the top comparison."""
    caps = caps or active_caps()
    memo: dict[Cube, bool] = {}

    def check(cube: Cube) -> bool:
        if cube.dim == 0:
            return True
        if cube.dim == 1:
            return e.contains(cube.maps[1][0])
        hit = memo.get(cube)
        if hit is not None:
            return hit
        ok = all(check(v.codomain) for v in arrow_views(cube))
        if ok:
            _, f = sublimit_comparison(cube, (1 << cube.dim) - 1, reduced=False, caps=caps)
            ok = e.contains(f)
        memo[cube] = ok
        return ok

    return check(c)


def permute_cube(c: Cube, sigma: Sequence[int]) -> Cube:
    """Relabel directions: vertex ``S`` moves to ``sigma(S)``."""
    n = c.dim
    if sorted(sigma) != list(range(n)):
        raise DiagramError(f"{list(sigma)} is not a permutation of {n} directions")

    def move(mask: int) -> int:
        out = 0
        for i in to_subset(mask):
            out |= 1 << sigma[i]
        return out

    objects: list = [None] * (1 << n)
    rows: list = [[None] * n for _ in range(1 << n)]
    for m in range(1 << n):
        objects[move(m)] = c.objects[m]
        for i in to_subset(m):
            rows[move(m)][sigma[i]] = c.maps[m][i]
    return Cube.model_construct(dim=n, objects=tuple(objects), maps=tuple(tuple(r) for r in rows))
