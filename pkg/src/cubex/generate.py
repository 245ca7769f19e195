"""Seeded instance generation for the theorem suite.

Every generator takes a seed or a ``random.Random`` and is reproducible.
"""

from __future__ import annotations

import logging
import random
from functools import lru_cache
from itertools import product

from cubex import core
from cubex.algebra import cyclic_group, direct_product, plain_set, small_groups, trivial_group, unit
from cubex.classes import ExtensionClass, extension_class
from cubex.config import Caps, active_caps
from cubex.cubes import build_cube
from cubex.errors import DiagramError
from cubex.simplicial import (
    CHOOSERS,
    cech_nerve,
    make_simplicial,
    repoint_top,
    truncate,
    tv_resolution,
)
from cubex.types import (
    Cube,
    Edge,
    FinDiagram,
    FinMorphism,
    FinObject,
    Flavor,
    SquareArrow,
    TruncatedSimplicial,
    to_subset,
)

logger = logging.getLogger(__name__)


def _rng(seed: int | random.Random | None) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(active_caps().default_seed if seed is None else seed)


# --- Universes ---


def all_maps_universe(max_size: int) -> list[FinMorphism]:
    """Every map between the sets ``{0..n-1}``, ``1 <= n <= max_size``."""
    sets = [plain_set(n) for n in range(1, max_size + 1)]
    return [f for x in sets for y in sets for f in core.iter_morphisms(x, y, structured=False)]


@lru_cache(maxsize=8)
def _group_homs(max_order: int) -> tuple[FinMorphism, ...]:
    groups = list(small_groups(max_order).values())
    return tuple(f for x in groups for y in groups for f in core.iter_morphisms(x, y))


def group_hom_universe(max_order: int) -> list[FinMorphism]:
    """Every homomorphism between the listed groups of order ``<= max_order``."""
    return list(_group_homs(max_order))


def _surjections_into(max_order: int) -> dict[FinObject, list[FinMorphism]]:
    out: dict[FinObject, list[FinMorphism]] = {}
    for f in _group_homs(max_order):
        if core.is_surjective(f):
            out.setdefault(f.cod, []).append(f)
    return out


def squares_universe(universe, e: ExtensionClass | None = None) -> list[SquareArrow]:
    """Commuting squares whose four sides come from ``universe`` (and ``e``)."""
    arrows = [f for f in universe if e is None or e.contains(f)]
    by_dom: dict[FinObject, list[FinMorphism]] = {}
    for f in arrows:
        by_dom.setdefault(f.dom, []).append(f)
    out = []
    for a in arrows:
        for f1 in by_dom.get(a.dom, []):
            for b in by_dom.get(f1.cod, []):
                for f0 in by_dom.get(a.cod, []):
                    if f0.cod != b.cod:
                        continue
                    if b.after(f1).table == f0.after(a).table:
                        out.append(SquareArrow.trusted(a, b, f1, f0))
    logger.debug("%d squares over %d arrows", len(out), len(arrows))
    return out


# --- Cubes ---


def random_morphism(seed, dom: FinObject, cod: FinObject, *, structured: bool = False) -> FinMorphism:
    rng = _rng(seed)
    if structured:
        return rng.choice(list(core.iter_morphisms(dom, cod)))
    return FinMorphism.trusted(dom, cod, [rng.randrange(cod.size) for _ in range(dom.size)])


def _boundary_limit(objects: dict, maps: dict, s: int, caps: Caps):
    below = [j for j in range(s) if j & ~s == 0]
    nodes = {f"v{j}": objects[j] for j in below}
    edges = tuple(
        Edge(src=f"v{j}", dst=f"v{j & ~(1 << i)}", morphism=maps[(j, i)])
        for j in below
        for i in to_subset(j)
    )
    visible = [f"v{s & ~(1 << i)}" for i in to_subset(s)]
    return core.compute_limit(FinDiagram(nodes=nodes, edges=edges), visible=visible, caps=caps)


def _set_vertex(rng: random.Random, limit: FinObject, max_carrier: int) -> tuple[FinObject, list[int]]:
    if limit.size == 0:
        return plain_set([]), []
    if limit.size <= max_carrier and rng.random() < 0.5:
        size = rng.randint(limit.size, max_carrier)
        table = list(range(limit.size)) + [rng.randrange(limit.size) for _ in range(size - limit.size)]
        rng.shuffle(table)
    else:
        size = rng.randint(1, max_carrier)
        table = [rng.randrange(limit.size) for _ in range(size)]
    return plain_set(size), table


def _group_vertex(rng: random.Random, limit: FinObject) -> tuple[FinObject, list[int]]:
    kind = rng.choice(("iso", "thick", "point"))
    if kind == "thick" and limit.size * 2 <= 64:
        thick = direct_product(limit, cyclic_group(2))
        return thick, [i // 2 for i in range(thick.size)]
    if kind == "point":
        return trivial_group(), [unit(limit)]
    return limit, list(range(limit.size))


def random_cube(
    dim: int,
    max_carrier: int = 3,
    seed: int | random.Random | None = None,
    *,
    groups: bool = False,
    caps: Caps | None = None,
) -> Cube:
    """A commuting cube built bottom-up.

    Each vertex maps into the limit of the vertices below it, so the cube
    commutes by construction; about half the comparisons are surjective.
    """
    rng = _rng(seed)
    caps = caps or active_caps()
    if groups:
        objects = {0: rng.choice(list(small_groups(4).values()))}
    else:
        objects = {0: plain_set(rng.randint(1, max_carrier))}
    maps: dict[tuple[int, int], FinMorphism] = {}
    for s in sorted(range(1, 1 << dim), key=lambda m: (bin(m).count("1"), m)):
        cone = _boundary_limit(objects, maps, s, caps)
        if groups:
            obj, table = _group_vertex(rng, cone.apex)
        else:
            obj, table = _set_vertex(rng, cone.apex, max_carrier)
        comparison = FinMorphism.trusted(obj, cone.apex, table)
        objects[s] = obj
        for i in to_subset(s):
            maps[(s, i)] = cone.legs[f"v{s & ~(1 << i)}"].after(comparison)
    return build_cube(dim, objects, maps, caps=caps)


def exhaustive_two_cubes(max_carrier: int = 2) -> list[Cube]:
    """Every commuting square of finite sets with carriers ``1..max_carrier``."""
    sets = [plain_set(n) for n in range(1, max_carrier + 1)]

    def maps(x: FinObject, y: FinObject) -> list[FinMorphism]:
        return list(core.iter_morphisms(x, y, structured=False))

    out = []
    for bottom, left, right, top in product(sets, repeat=4):
        for b in maps(left, bottom):
            for f0 in maps(right, bottom):
                for a in maps(top, right):
                    for f1 in maps(top, left):
                        if b.after(f1).table != f0.after(a).table:
                            continue
                        out.append(build_cube(
                            2,
                            {(0, 1): top, (0,): left, (1,): right, (): bottom},
                            {((0, 1), 1): f1, ((0, 1), 0): a, ((0,), 0): b, ((1,), 1): f0},
                        ))
    return out


def random_set_square(seed, max_carrier: int = 3) -> SquareArrow:
    """A commuting square of finite sets with every side surjective."""
    rng = _rng(seed)
    while True:
        c = random_cube(2, max_carrier, rng)
        sides = (c.maps[0b11][0], c.maps[0b01][0], c.maps[0b11][1], c.maps[0b10][1])
        if all(core.is_surjective(f) for f in sides):
            return SquareArrow.trusted(*sides)


def random_group_square(seed, max_order: int = 4) -> SquareArrow:
    """A square of groups with every side surjective.

    The top corner is the pullback, a thickening of it, or (when both
    bottom maps agree) the diagonal.
    """
    rng = _rng(seed)
    surj = _surjections_into(max_order)
    base = rng.choice(sorted(surj, key=lambda g: (g.size, g.labels)))
    b = rng.choice(surj[base])
    f0 = rng.choice(surj[base])
    kinds = ["pullback", "thick"] + (["diagonal"] if b == f0 else [])
    kind = rng.choice(kinds)
    if kind == "diagonal":
        one = core.identity(b.dom)
        return SquareArrow.trusted(one, b, one, b)
    pb = core.compute_pullback(f0, b)
    a, f1 = pb.legs["p0"], pb.legs["p1"]
    if kind == "thick":
        thick = direct_product(pb.apex, cyclic_group(2))
        proj = FinMorphism.trusted(thick, pb.apex, [i // 2 for i in range(thick.size)])
        a, f1 = a.after(proj), f1.after(proj)
    return SquareArrow.trusted(a, b, f1, f0)


# --- Simplicial groups ---


def _product_map(f: FinMorphism, g: FinMorphism, dom: FinObject, cod: FinObject) -> FinMorphism:
    n, n_cod = g.dom.size, g.cod.size
    table = [f.table[i // n] * n_cod + g.table[i % n] for i in range(dom.size)]
    return FinMorphism.trusted(dom, cod, table)


def levelwise_product(s: TruncatedSimplicial, t: TruncatedSimplicial) -> TruncatedSimplicial:
    if s.level != t.level or not (s.augmented and t.augmented):
        raise DiagramError("levelwise products need augmented objects of the same level")
    flavors = [Flavor.SEMI, Flavor.QUASI, Flavor.FULL]
    flavor = flavors[min(flavors.index(s.flavor), flavors.index(t.flavor))]
    objs = {n: direct_product(s.obj(n), t.obj(n)) for n in range(-1, s.level + 1)}
    faces = [
        tuple(_product_map(f, g, objs[n], objs[n - 1]) for f, g in zip(s.faces[n], t.faces[n]))
        for n in range(s.level + 1)
    ]
    degeneracies = []
    if flavor is not Flavor.SEMI:
        degeneracies = [
            tuple(_product_map(f, g, objs[n], objs[n + 1]) for f, g in zip(s.degeneracies[n], t.degeneracies[n]))
            for n in range(s.level)
        ]
    contraction = None
    if s.contraction is not None and t.contraction is not None:
        contraction = [
            _product_map(f, g, objs[n - 1], objs[n])
            for n, (f, g) in enumerate(zip(s.contraction, t.contraction))
        ]
    return make_simplicial(flavor, [objs[n] for n in range(-1, s.level + 1)], faces, degeneracies, contraction, check=False)


def _nerve_level(f: FinMorphism, max_level: int, max_top: int) -> int:
    kernel = f.dom.size // max(f.cod.size, 1)
    level = 1
    while level < max_level and f.dom.size * kernel ** (level + 1) <= max_top:
        level += 1
    return level


def random_simplicial_group(
    seed,
    *,
    max_level: int = 3,
    max_order: int = 8,
    max_top: int = 64,
    caps: Caps | None = None,
) -> TruncatedSimplicial:
    """A truncated simplicial group: a Čech nerve, a TV resolution or a product of nerves."""
    rng = _rng(seed)
    kind = rng.choice(("cech", "tv", "product"))
    if kind == "tv":
        group = rng.choice(list(small_groups(max_order).values()))
        chooser = rng.choice(sorted(CHOOSERS))
        level = rng.randint(1, max_level if chooser == "identity" or group.size <= 2 else 1)
        return tv_resolution(group, extension_class("surjections"), CHOOSERS[chooser], level, caps=caps)
    surj = [f for fs in _surjections_into(max_order).values() for f in fs]
    if kind == "product":
        small = [f for f in surj if f.dom.size <= 4]
        f, g = rng.choice(small), rng.choice(small)
        level = min(_nerve_level(f, max_level, 8), _nerve_level(g, max_level, 8))
        return levelwise_product(cech_nerve(f, level, caps=caps), cech_nerve(g, level, caps=caps))
    f = rng.choice(surj)
    level = rng.randint(1, _nerve_level(f, max_level, max_top))
    return cech_nerve(f, level, caps=caps)


def random_contractible_group(seed, *, max_level: int = 3, max_order: int = 8, max_top: int = 64, caps: Caps | None = None) -> TruncatedSimplicial:
    """Čech nerve of a split quotient, with the contraction its section induces."""
    rng = _rng(seed)
    split = []
    for fs in _surjections_into(max_order).values():
        for f in fs:
            s = core.is_split_epi(f, caps=caps)
            if s is not None:
                split.append((f, s))
    f, s = rng.choice(split)
    level = rng.randint(1, _nerve_level(f, max_level, max_top))
    return cech_nerve(f, level, s, caps=caps)


# --- Mutations ---


def mutate_resolution(ss: TruncatedSimplicial, seed) -> tuple[TruncatedSimplicial, int]:
    """Truncate at a random level ``L`` and re-point one top simplex.

    The moved simplex has a boundary no other simplex shares, so the
    comparison at ``L`` stops being surjective.
    """
    rng = _rng(seed)
    levels = list(range(ss.level + 1))
    rng.shuffle(levels)
    for level in levels:
        cut = truncate(ss, level)
        faces = cut.faces[level]
        if not faces:
            continue
        boundary = [tuple(f.table[x] for f in faces) for x in range(cut.obj(level).size)]
        pairs = [
            (x, y)
            for x in range(len(boundary))
            for y in range(len(boundary))
            if boundary[x] != boundary[y] and boundary.count(boundary[x]) == 1
        ]
        if pairs:
            x, y = rng.choice(pairs)
            logger.debug("re-pointing simplex %d onto %d at level %d", x, y, level)
            return repoint_top(cut, x, y), level
    raise DiagramError("no top simplex can be re-pointed")
