"""Truncated augmented simplicial objects.

Levels run from ``-1`` to ``N``.  Kernels, horns, exactness and the Kan
property are all computed with the limit engine, so every verdict is bounded
by the truncation level and reported as such.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from itertools import combinations_with_replacement
from typing import NamedTuple

from pydantic import ValidationError

from cubex import core
from cubex.algebra import direct_product, one_point
from cubex.category import ArrowCategory, FinCategory
from cubex.classes import ExtensionClass, transpose_square
from cubex.config import Caps, active_caps
from cubex.cubes import build_cube, reassemble
from cubex.errors import DiagramError, ResourceLimitError, SimplicialIdentityError
from cubex.types import (
    ArrowView,
    ContractionResult,
    ContractionStatus,
    Cube,
    Edge,
    FinDiagram,
    FinMorphism,
    FinObject,
    Flavor,
    HornObject,
    KanEntry,
    KanReport,
    KernelObject,
    SquareArrow,
    SquareSimplicial,
    TruncatedSimplicial,
    Violation,
    to_subset,
)

logger = logging.getLogger(__name__)


def make_simplicial(
    flavor: Flavor | str,
    objects: Sequence[FinObject | None],
    faces: Sequence[Sequence[FinMorphism]],
    degeneracies: Sequence[Sequence[FinMorphism]] = (),
    contraction: Sequence[FinMorphism] | None = None,
    *,
    check: bool = True,
) -> TruncatedSimplicial:
    """Assemble a truncated object; ``objects[0]`` is ``A_{-1}`` or ``None``."""
    try:
        ss = TruncatedSimplicial(
            flavor=Flavor(flavor),
            level=len(objects) - 2,
            objects=tuple(objects),
            faces=tuple(tuple(row) for row in faces),
            degeneracies=tuple(tuple(row) for row in degeneracies),
            contraction=None if contraction is None else tuple(contraction),
        )
    except ValidationError as exc:
        raise DiagramError(f"invalid simplicial object: {exc.errors()[0]['msg']}") from exc
    if check:
        check_identities(ss)
    return ss


# --- Identities ---


def _violation(name: str, n: int, *indices: int) -> Violation:
    where = ", ".join(f"{k}={v}" for k, v in zip("ij", indices))
    sep = ", " if where else ""
    return Violation(
        identity=name,
        level=n,
        indices=tuple(indices),
        message=f"simplicial identity {name} at n={n}{sep}{where}",
    )


def _face_violations(ss: TruncatedSimplicial) -> list[Violation]:
    out = []
    start = 1 if ss.augmented else 2
    for n in range(start, ss.level + 1):
        for j in range(1, n + 1):
            for i in range(j):
                lhs = ss.face(n - 1, i).after(ss.face(n, j))
                rhs = ss.face(n - 1, j - 1).after(ss.face(n, i))
                if lhs.table != rhs.table:
                    out.append(_violation("∂_i∂_j = ∂_{j−1}∂_i", n, i, j))
    return out


def _degeneracy_violations(ss: TruncatedSimplicial) -> list[Violation]:
    out = []
    for n in range(ss.level):
        for j in range(n + 1):
            s = ss.degeneracy(n, j)
            for i in range(n + 2):
                lhs = ss.face(n + 1, i).after(s)
                if i < j:
                    name = "∂_iσ_j = σ_{j−1}∂_i"
                    rhs = ss.degeneracy(n - 1, j - 1).after(ss.face(n, i))
                elif i in (j, j + 1):
                    name = "∂_iσ_j = 1"
                    rhs = core.identity(ss.obj(n))
                else:
                    name = "∂_iσ_j = σ_j∂_{i−1}"
                    rhs = ss.degeneracy(n - 1, j).after(ss.face(n, i - 1))
                if lhs.table != rhs.table:
                    out.append(_violation(name, n + 1, i, j))
    return out


def _full_violations(ss: TruncatedSimplicial) -> list[Violation]:
    out = []
    for n in range(ss.level - 1):
        for j in range(n + 1):
            for i in range(j + 1):
                lhs = ss.degeneracy(n + 1, i).after(ss.degeneracy(n, j))
                rhs = ss.degeneracy(n + 1, j + 1).after(ss.degeneracy(n, i))
                if lhs.table != rhs.table:
                    out.append(_violation("σ_iσ_j = σ_{j+1}σ_i", n, i, j))
    return out


def _contraction_violations(ss: TruncatedSimplicial, contraction: Sequence[FinMorphism]) -> list[Violation]:
    out = []
    for n, s in enumerate(contraction):
        if ss.face(n, 0).after(s).table != tuple(range(ss.obj(n - 1).size)):
            out.append(_violation("∂_0σ_{−1} = 1", n))
        for i in range(1, n + 1):
            lhs = ss.face(n, i).after(s)
            rhs = contraction[n - 1].after(ss.face(n - 1, i - 1))
            if lhs.table != rhs.table:
                out.append(_violation("∂_iσ_{−1} = σ_{−1}∂_{i−1}", n, i))
    return out


def validate(ss: TruncatedSimplicial) -> list[Violation]:
    """Every identity the flavor and the contraction witness promise."""
    out = _face_violations(ss)
    if ss.flavor is not Flavor.SEMI:
        out += _degeneracy_violations(ss)
    if ss.flavor is Flavor.FULL:
        out += _full_violations(ss)
    if ss.contraction is not None:
        out += _contraction_violations(ss, ss.contraction)
    return out


def check_identities(ss: TruncatedSimplicial) -> None:
    violations = validate(ss)
    if violations:
        raise SimplicialIdentityError(violations)


def satisfies_full_identities(ss: TruncatedSimplicial) -> bool:
    """Whether the degeneracies of a quasi-simplicial object also commute."""
    if ss.flavor is Flavor.SEMI:
        return False
    return not _full_violations(ss)


# --- Examples ---


def constant_simplicial(
    x: FinObject,
    level: int,
    flavor: Flavor = Flavor.FULL,
    *,
    augmented: bool = True,
) -> TruncatedSimplicial:
    """Every ``A_n = x`` and every map the identity."""
    one = core.identity(x)
    faces = [((one,) if augmented else ())] + [(one,) * (n + 1) for n in range(1, level + 1)]
    degeneracies = [] if flavor is Flavor.SEMI else [(one,) * (n + 1) for n in range(level)]
    contraction = (one,) * (level + 1) if augmented else None
    return make_simplicial(
        flavor,
        [x if augmented else None] + [x] * (level + 1),
        faces,
        degeneracies,
        contraction,
        check=False,
    )


def ordinal_nerve(k: int, level: int) -> TruncatedSimplicial:
    """Nerve of the ordinal ``0 < 1 < ... < k-1``, without augmentation."""
    simplices = [list(combinations_with_replacement(range(k), n + 1)) for n in range(level + 1)]
    index = [{s: i for i, s in enumerate(level_n)} for level_n in simplices]
    objects = [FinObject(labels=tuple("".join(map(str, s)) for s in level_n)) for level_n in simplices]
    faces = [()]
    for n in range(1, level + 1):
        row = []
        for i in range(n + 1):
            table = [index[n - 1][s[:i] + s[i + 1:]] for s in simplices[n]]
            row.append(FinMorphism.trusted(objects[n], objects[n - 1], table))
        faces.append(tuple(row))
    degeneracies = []
    for n in range(level):
        row = []
        for i in range(n + 1):
            table = [index[n + 1][s[: i + 1] + s[i:]] for s in simplices[n]]
            row.append(FinMorphism.trusted(objects[n], objects[n + 1], table))
        degeneracies.append(tuple(row))
    return make_simplicial(Flavor.FULL, [None] + objects[: level + 1], faces, degeneracies)


def _fiber_power(f: FinMorphism, n: int, caps: Caps) -> tuple[FinObject, list[tuple[int, ...]]]:
    """``(n+1)``-fold fiber power of ``f`` and the coordinates of its elements."""
    if n == 0:
        return f.dom, [(x,) for x in range(f.dom.size)]
    names = [f"x{i}" for i in range(n + 1)]
    nodes = {name: f.dom for name in names}
    nodes["y"] = f.cod
    edges = tuple(Edge(src=name, dst="y", morphism=f) for name in names)
    cone = core.compute_limit(FinDiagram(nodes=nodes, edges=edges), visible=names, caps=caps)
    coords = list(zip(*(cone.legs[name].table for name in names)))
    return cone.apex, coords


def cech_nerve(
    f: FinMorphism,
    level: int,
    section: FinMorphism | None = None,
    *,
    caps: Caps | None = None,
) -> TruncatedSimplicial:
    """Fiber powers of ``f`` over its codomain, a full simplicial object.

    A section of ``f`` yields the contraction
    ``(x_0..x_{n-1}) -> (s f x_0, x_0, ..., x_{n-1})``.
    """
    caps = caps or active_caps()
    powers = [_fiber_power(f, n, caps) for n in range(level + 1)]
    index = [{c: i for i, c in enumerate(coords)} for _, coords in powers]
    objs = [obj for obj, _ in powers]

    def lookup(n: int, coords_list) -> list[int]:
        return [index[n][c] for c in coords_list]

    faces = [(f,)]
    for n in range(1, level + 1):
        coords = powers[n][1]
        faces.append(tuple(
            FinMorphism.trusted(objs[n], objs[n - 1], lookup(n - 1, [c[:i] + c[i + 1:] for c in coords]))
            for i in range(n + 1)
        ))
    degeneracies = []
    for n in range(level):
        coords = powers[n][1]
        degeneracies.append(tuple(
            FinMorphism.trusted(objs[n], objs[n + 1], lookup(n + 1, [c[: i + 1] + c[i:] for c in coords]))
            for i in range(n + 1)
        ))
    contraction = None
    if section is not None:
        if f.after(section).table != tuple(range(f.cod.size)):
            raise DiagramError("section does not split f")
        contraction = [section]
        for n in range(1, level + 1):
            coords = powers[n - 1][1]
            table = lookup(n, [(section.table[f.table[c[0]]],) + c for c in coords])
            contraction.append(FinMorphism.trusted(objs[n - 1], objs[n], table))
    return make_simplicial(Flavor.FULL, [f.cod] + objs, faces, degeneracies, contraction, check=False)


def canonical_augmentation(ss: TruncatedSimplicial) -> TruncatedSimplicial:
    """Augment over the one-point object of ``A_0``'s signature."""
    if ss.augmented:
        raise DiagramError("object is already augmented")
    a0 = ss.obj(0)
    st = a0.structure
    point = one_point(st.signature, st.theory) if st is not None else one_point()
    d0 = core.constant_map(a0, point)
    return make_simplicial(
        ss.flavor,
        (point,) + ss.objects[1:],
        ((d0,),) + ss.faces[1:],
        ss.degeneracies,
        None,
        check=False,
    )


def truncate(ss: TruncatedSimplicial, level: int) -> TruncatedSimplicial:
    if not 0 <= level <= ss.level:
        raise DiagramError(f"cannot truncate a level-{ss.level} object at level {level}")
    return make_simplicial(
        ss.flavor,
        ss.objects[: level + 2],
        ss.faces[: level + 1],
        ss.degeneracies[:level],
        None if ss.contraction is None else ss.contraction[: level + 1],
        check=False,
    )


def repoint_top(ss: TruncatedSimplicial, simplex: int, target: int) -> TruncatedSimplicial:
    """Give top simplex ``simplex`` the faces of ``target``.

    The result is a semi-simplicial object of underlying sets; every face
    identity survives since ``target``'s faces already satisfy them.
    """
    n_top = ss.level
    top = ss.obj(n_top)
    if not (0 <= simplex < top.size and 0 <= target < top.size):
        raise DiagramError(f"top level has {top.size} simplices")
    sets = [None if o is None else o.underlying() for o in ss.objects]

    def plain(f: FinMorphism, n: int) -> FinMorphism:
        return FinMorphism.trusted(sets[n + 1], sets[n], f.table)

    faces = [tuple(plain(f, n) for f in row) for n, row in enumerate(ss.faces)]
    moved = []
    for f in faces[n_top]:
        table = list(f.table)
        table[simplex] = table[target]
        moved.append(FinMorphism.trusted(f.dom, f.cod, table))
    faces[n_top] = tuple(moved)
    return make_simplicial(Flavor.SEMI, sets, faces)


# --- Kernels and exactness ---


def simplicial_kernel(ss: TruncatedSimplicial, n: int, *, caps: Caps | None = None) -> KernelObject:
    """``K_n``: families ``k_0..k_n`` in ``A_{n-1}`` with ``∂_i k_j = ∂_{j-1} k_i``."""
    if n == 0:
        if not ss.augmented:
            raise DiagramError("K_0 needs an augmentation")
        x = ss.obj(-1)
        return KernelObject(n=0, apex=x, legs=(core.identity(x),))
    if not 1 <= n <= ss.level + 1:
        raise DiagramError(f"K_{n} is outside levels 1..{ss.level + 1}")
    if n == 1 and not ss.augmented:
        raise DiagramError("K_1 needs an augmentation")
    faces = ss.faces[n - 1]
    below = ss.obj(n - 2)
    visible = [f"k{j}" for j in range(n + 1)]
    nodes = {name: ss.obj(n - 1) for name in visible}
    edges = []
    for j in range(n + 1):
        for i in range(j):
            rel = f"r{i}_{j}"
            nodes[rel] = below
            edges.append(Edge(src=f"k{j}", dst=rel, morphism=faces[i]))
            edges.append(Edge(src=f"k{i}", dst=rel, morphism=faces[j - 1]))
    cone = core.compute_limit(FinDiagram(nodes=nodes, edges=tuple(edges)), visible=visible, caps=caps)
    return KernelObject(n=n, apex=cone.apex, legs=tuple(cone.legs[v] for v in visible), cone=cone)


def kernel_comparison(
    ss: TruncatedSimplicial,
    n: int,
    *,
    kernel: KernelObject | None = None,
    caps: Caps | None = None,
) -> FinMorphism:
    """``⟨∂_0, ..., ∂_n⟩ : A_n -> K_n``."""
    if not 0 <= n <= ss.level:
        raise DiagramError(f"level {n} is outside 0..{ss.level}")
    if n == 0:
        if not ss.augmented:
            raise DiagramError("K_0 needs an augmentation")
        return ss.face(0, 0)
    kernel = kernel or simplicial_kernel(ss, n, caps=caps)
    maps = {f"k{j}": ss.face(n, j) for j in range(n + 1)}
    return core.mediate(kernel.cone, ss.obj(n), maps)


def is_exact_at(ss: TruncatedSimplicial, n: int, e: ExtensionClass, *, caps: Caps | None = None) -> bool:
    """Exactness at ``A_{n-1}``: the comparison ``A_n -> K_n`` lies in ``e``."""
    return e.contains(kernel_comparison(ss, n, caps=caps))


def exactness(ss: TruncatedSimplicial, e: ExtensionClass, *, caps: Caps | None = None) -> list[bool]:
    """Exactness at ``A_{n-1}`` for ``n = 0..N``."""
    return [is_exact_at(ss, n, e, caps=caps) for n in range(ss.level + 1)]


def first_inexact_level(ss: TruncatedSimplicial, e: ExtensionClass, *, caps: Caps | None = None) -> int | None:
    for n in range(ss.level + 1):
        if not is_exact_at(ss, n, e, caps=caps):
            return n
    return None


def is_resolution(ss: TruncatedSimplicial, e: ExtensionClass, *, caps: Caps | None = None) -> bool:
    """Exact at ``A_{-1}..A_{N-1}``; bounded by the truncation level."""
    if not ss.augmented:
        raise DiagramError("resolutions are augmented")
    return first_inexact_level(ss, e, caps=caps) is None


# --- Horns and the Kan property ---


def horn_object(ss: TruncatedSimplicial, n: int, k: int, *, caps: Caps | None = None) -> HornObject:
    if not (1 <= n <= ss.level and 0 <= k <= n):
        raise DiagramError(f"({n},{k})-horns need 1 <= n <= {ss.level} and 0 <= k <= n")
    if n == 1:
        a0 = ss.obj(0)
        return HornObject(n=1, k=k, apex=a0, legs={1 - k: core.identity(a0)})
    faces = ss.faces[n - 1]
    others = [i for i in range(n + 1) if i != k]
    visible = [f"a{i}" for i in others]
    nodes = {name: ss.obj(n - 1) for name in visible}
    edges = []
    for x, i in enumerate(others):
        for j in others[x + 1:]:
            rel = f"r{i}_{j}"
            nodes[rel] = ss.obj(n - 2)
            edges.append(Edge(src=f"a{j}", dst=rel, morphism=faces[i]))
            edges.append(Edge(src=f"a{i}", dst=rel, morphism=faces[j - 1]))
    cone = core.compute_limit(FinDiagram(nodes=nodes, edges=tuple(edges)), visible=visible, caps=caps)
    legs = {i: cone.legs[f"a{i}"] for i in others}
    return HornObject(n=n, k=k, apex=cone.apex, legs=legs, cone=cone)


def horn_comparison(
    ss: TruncatedSimplicial,
    n: int,
    k: int,
    *,
    horn: HornObject | None = None,
    caps: Caps | None = None,
) -> FinMorphism:
    """``A_n -> A(n,k)``; at ``n = 1`` the horn is ``A_0`` with the leg ``a_{1-k}`` and the comparison is ``∂_k``."""
    horn = horn or horn_object(ss, n, k, caps=caps)
    if n == 1:
        return ss.face(1, k)
    maps = {f"a{i}": ss.face(n, i) for i in horn.legs}
    return core.mediate(horn.cone, ss.obj(n), maps)


def kan_report(
    ss: TruncatedSimplicial,
    e: ExtensionClass,
    *,
    max_level: int | None = None,
    caps: Caps | None = None,
) -> KanReport:
    top = ss.level if max_level is None else min(max_level, ss.level)
    entries = []
    for n in range(1, top + 1):
        for k in range(n + 1):
            holds = e.contains(horn_comparison(ss, n, k, caps=caps))
            entries.append(KanEntry(n=n, k=k, holds=holds))
    return KanReport(entries=entries)


def is_kan(ss: TruncatedSimplicial, e: ExtensionClass, *, max_level: int | None = None, caps: Caps | None = None) -> bool:
    return kan_report(ss, e, max_level=max_level, caps=caps).holds


# --- Shift and contractions ---


def shift(ss: TruncatedSimplicial) -> tuple[TruncatedSimplicial, tuple[FinMorphism, ...]]:
    """``A⁻`` (drop ``A_{-1}`` and every ``∂_0``) and the levelwise ``∂_0 : A⁻ -> A``.

    For quasi and full objects ``σ_0`` is the contraction of ``A⁻``.
    """
    if ss.level < 1 or not ss.augmented:
        raise DiagramError("shift needs an augmented object of level at least 1")
    n_top = ss.level
    faces = tuple(ss.faces[m + 1][1:] for m in range(n_top))
    degeneracies = tuple(ss.degeneracies[m + 1][1:] for m in range(n_top - 1))
    contraction = None
    if ss.flavor is not Flavor.SEMI:
        contraction = tuple(ss.degeneracy(m, 0) for m in range(n_top))
    shifted = make_simplicial(ss.flavor, ss.objects[1:], faces, degeneracies, contraction, check=False)
    components = tuple(ss.face(m + 1, 0) for m in range(-1, n_top))
    return shifted, components


def _contraction_chains(ss: TruncatedSimplicial, n: int, prev: FinMorphism | None, caps: Caps):
    if n > ss.level:
        yield []
        return
    src, dst = ss.obj(n - 1), ss.obj(n)
    candidates = []
    for x in range(src.size):
        wanted = [x] + [prev.table[ss.face(n - 1, i - 1).table[x]] for i in range(1, n + 1)]
        candidates.append([
            y for y in range(dst.size)
            if all(ss.face(n, i).table[y] == wanted[i] for i in range(n + 1))
        ])
    tables = core.search_tables(
        src, dst, candidates, cap=caps.contraction_search_cap, cap_name="contraction_search_cap"
    )
    for table in tables:
        s = FinMorphism.trusted(src, dst, table)
        for rest in _contraction_chains(ss, n + 1, s, caps):
            yield [s] + rest


def is_contractible(ss: TruncatedSimplicial, *, caps: Caps | None = None) -> ContractionResult:
    """A valid stored witness, else the lexicographically first chain found by search."""
    caps = caps or active_caps()
    if not ss.augmented:
        return ContractionResult(status=ContractionStatus.ABSENT)
    if ss.contraction is not None and not _contraction_violations(ss, ss.contraction):
        return ContractionResult(status=ContractionStatus.FOUND, contraction=ss.contraction)
    try:
        chain = next(_contraction_chains(ss, 0, None, caps), None)
    except ResourceLimitError:
        logger.info("contraction search exceeded contraction_search_cap=%d", caps.contraction_search_cap)
        return ContractionResult(status=ContractionStatus.UNKNOWN)
    if chain is None:
        return ContractionResult(status=ContractionStatus.ABSENT)
    return ContractionResult(status=ContractionStatus.FOUND, contraction=tuple(chain))


# --- Truncations as cubes ---


def arr_n(ss: TruncatedSimplicial, n: int, *, caps: Caps | None = None) -> Cube:
    """The ``n``-cube with ``A_S = A_{|S|-1}``; removing ``i`` is the face at the rank of ``i`` in ``S``."""
    if not ss.augmented:
        raise DiagramError("arr_n needs an augmented object")
    if not 0 <= n <= ss.level + 1:
        raise DiagramError(f"arr_{n} needs 0 <= n <= {ss.level + 1}")
    objects = {}
    maps = {}
    for mask in range(1 << n):
        subset = to_subset(mask)
        objects[mask] = ss.obj(len(subset) - 1)
        for rank, i in enumerate(subset):
            maps[(mask, i)] = ss.face(len(subset) - 1, rank)
    return build_cube(n, objects, maps, caps=caps)


def arr_via_shift(ss: TruncatedSimplicial, n: int, *, caps: Caps | None = None) -> Cube:
    """``arr_n`` rebuilt from ``arr_{n-1}`` of ``∂ : A⁻ -> A`` along direction 0."""
    if n < 1:
        raise DiagramError("the shift reading needs n >= 1")
    shifted, components = shift(ss)
    domain = arr_n(shifted, n - 1, caps=caps)
    codomain = arr_n(ss, n - 1, caps=caps)
    comps = tuple(components[bin(m).count("1")] for m in range(1 << (n - 1)))
    return reassemble(ArrowView(direction=0, domain=domain, codomain=codomain, components=comps))


def shift_square_object(ss: TruncatedSimplicial) -> SquareSimplicial:
    shifted, components = shift(ss)
    faces = []
    for n in range(ss.level):
        row = []
        for i in range(n + 1):
            row.append(SquareArrow.trusted(
                components[n + 1], components[n], ss.face(n + 1, i + 1), ss.face(n, i)
            ))
        faces.append(tuple(row))
    return SquareSimplicial(objects=components, faces=tuple(faces))


def lifted_exactness(
    ss: TruncatedSimplicial,
    lifted: ExtensionClass,
    *,
    levels: int = 2,
    caps: Caps | None = None,
) -> list[bool]:
    """Exactness of ``∂ : A⁻ -> A`` as an object of arrows, at its two lowest levels."""
    sq = shift_square_object(ss)
    cat = lifted.category
    out = []
    if levels >= 1 and ss.level >= 1:
        out.append(lifted.contains(sq.faces[0][0]))
    if levels >= 2 and ss.level >= 2:
        face = sq.faces[0][0]
        pb = cat.pullback(face, face, caps)
        comparison = cat.induce(pb, sq.faces[1][0], sq.faces[1][1])
        out.append(lifted.contains(comparison))
    return out


# --- Tierney–Vogel construction ---


class Cover(NamedTuple):
    obj: FinObject
    proj: FinMorphism
    section: FinMorphism | None


Chooser = Callable[[FinObject, int], Cover]


def identity_cover(x: FinObject, level: int) -> Cover:
    one = core.identity(x)
    return Cover(x, one, one)


def base_square_cover(x: FinObject, level: int) -> Cover:
    """``X × X -> X`` split by the diagonal at level 0, identities above."""
    if level != 0:
        return identity_cover(x, level)
    square = direct_product(x, x)
    proj = FinMorphism.trusted(square, x, [i // x.size for i in range(square.size)])
    diagonal = FinMorphism.trusted(x, square, [i * x.size + i for i in range(x.size)])
    return Cover(square, proj, diagonal)


CHOOSERS: dict[str, Chooser] = {
    "identity": identity_cover,
    "base-square": base_square_cover,
}


def _degeneracy_into_kernel(ss: TruncatedSimplicial, kernel: KernelObject, n: int, i: int) -> FinMorphism:
    """``σ_i`` on ``A_{n-1}`` as a family into ``K_n``, from the identities."""
    src = ss.obj(n - 1)
    maps = {}
    for j in range(n + 1):
        if j < i:
            f = ss.degeneracy(n - 2, i - 1).after(ss.face(n - 1, j))
        elif j in (i, i + 1):
            f = core.identity(src)
        else:
            f = ss.degeneracy(n - 2, i).after(ss.face(n - 1, j - 1))
        maps[f"k{j}"] = f
    return core.mediate(kernel.cone, src, maps)


def _contraction_into_kernel(ss: TruncatedSimplicial, kernel: KernelObject, n: int) -> FinMorphism:
    src = ss.obj(n - 1)
    maps = {"k0": core.identity(src)}
    for j in range(1, n + 1):
        maps[f"k{j}"] = ss.contraction[n - 1].after(ss.face(n - 1, j - 1))
    return core.mediate(kernel.cone, src, maps)


def extend_by_kernels(
    ss: TruncatedSimplicial,
    level: int,
    chooser: Chooser = identity_cover,
    *,
    e: ExtensionClass | None = None,
    caps: Caps | None = None,
) -> TruncatedSimplicial:
    """Cover successive simplicial kernels up to ``level``.

    Degeneracies and the contraction, when present, are carried up through
    the chosen sections.
    """
    caps = caps or active_caps()
    with_degeneracies = ss.flavor is not Flavor.SEMI
    flavor = Flavor.QUASI if with_degeneracies else Flavor.SEMI
    cur = ss
    for n in range(ss.level + 1, level + 1):
        kernel = simplicial_kernel(cur, n, caps=caps)
        cover = chooser(kernel.apex, n)
        if e is not None and not e.contains(cover.proj):
            raise DiagramError(f"the cover of K_{n} is not in {e.name}")
        faces = tuple(leg.after(cover.proj) for leg in kernel.legs)
        degeneracies = cur.degeneracies
        contraction = cur.contraction
        if (with_degeneracies or contraction is not None) and cover.section is None:
            raise DiagramError(f"the cover of K_{n} has no section")
        if with_degeneracies:
            row = tuple(cover.section.after(_degeneracy_into_kernel(cur, kernel, n, i)) for i in range(n))
            degeneracies = degeneracies + (row,)
        if contraction is not None:
            contraction = contraction + (cover.section.after(_contraction_into_kernel(cur, kernel, n)),)
        cur = make_simplicial(
            flavor,
            cur.objects + (cover.obj,),
            cur.faces + (faces,),
            degeneracies,
            contraction,
            check=False,
        )
        logger.debug("level %d: |K_%d| = %d, |A_%d| = %d", n, n, kernel.apex.size, n, cover.obj.size)
    return cur


def tv_resolution(
    x: FinObject,
    e: ExtensionClass,
    chooser: Chooser = identity_cover,
    level: int = 2,
    *,
    caps: Caps | None = None,
) -> TruncatedSimplicial:
    """Cover ``x``, then alternately take simplicial kernels and cover them."""
    cover = chooser(x, 0)
    if not e.contains(cover.proj):
        raise DiagramError(f"the cover of the base object is not in {e.name}")
    contraction = None if cover.section is None else (cover.section,)
    start = make_simplicial(Flavor.QUASI, (x, cover.obj), ((cover.proj,),), (), contraction, check=False)
    return extend_by_kernels(start, level, chooser, e=e, caps=caps)


# --- The object built from a split epimorphism of split epimorphisms ---


def split_square_truncation(s: SquareArrow, *, caps: Caps | None = None) -> TruncatedSimplicial | None:
    """Contractible level-1 object ``A_1 ⇉ A_0 -> A_{-1}`` from a split square.

    ``s = (f, f') : a -> b``.  ``A_{-1} = cod b``, ``A_0 = dom a`` and
    ``A_1`` is the set of triples ``(z, x, y)`` with ``a z = a x``,
    ``f z = f y`` and ``∂_0 x = ∂_0 y``.  Returns ``None`` when the needed
    compatible sections do not exist.
    """
    caps = caps or active_caps()
    vertical = ArrowCategory(FinCategory()).first_section(transpose_square(s), caps)
    f0_section = core.is_split_epi(s.f0, caps=caps)
    if vertical is None or f0_section is None:
        return None
    a, f, fp = s.a, s.f1, s.f0
    a_bar = vertical.f1
    top = a.dom
    d0 = fp.after(a)
    nodes = {"p": top, "d0": top, "d1": top, "u": a.cod, "v": f.cod, "w": d0.cod}
    edges = (
        Edge(src="p", dst="u", morphism=a),
        Edge(src="d0", dst="u", morphism=a),
        Edge(src="p", dst="v", morphism=f),
        Edge(src="d1", dst="v", morphism=f),
        Edge(src="d0", dst="w", morphism=d0),
        Edge(src="d1", dst="w", morphism=d0),
    )
    cone = core.compute_limit(FinDiagram(nodes=nodes, edges=edges), visible=("p", "d0", "d1"), caps=caps)
    one = core.identity(top)
    sigma0 = core.mediate(cone, top, {"p": one, "d0": one, "d1": one})
    lower = a_bar.after(f0_section)
    upper = core.mediate(cone, top, {"p": a_bar.after(a), "d0": one, "d1": lower.after(d0)})
    return make_simplicial(
        Flavor.FULL,
        (d0.cod, top, cone.apex),
        ((d0,), (cone.legs["d0"], cone.legs["d1"])),
        ((sigma0,),),
        (lower, upper),
    )
