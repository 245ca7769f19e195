"""Named, replayable checks of the results on higher extensions.

Each check returns a ``TheoremReport``.  Results quantified over a whole
category are run over explicit generated universes; a verdict only ever
speaks for the universe and caps it was computed with.
"""

from __future__ import annotations

import asyncio
import hashlib
import json
import logging
import random
import time
from collections import Counter
from collections.abc import Callable, Iterable, Sequence

from pydantic import BaseModel

from cubex import core
from cubex.algebra import cyclic_group, inv, mul, plain_set, small_groups
from cubex.category import ArrowCategory, FinCategory
from cubex.classes import (
    ExtensionClass,
    audit_axioms,
    check_e5_plus,
    comparison_to_pullback,
    extension_class,
    is_double_extension,
    kernel_restriction,
    lift_class,
)
from cubex.config import Caps, active_caps, parallel_enabled, use_caps
from cubex.cubes import arrow_views, is_extension_inductive, is_extension_limitwise
from cubex.errors import ResourceLimitError, UnsupportedStructureError
from cubex.generate import (
    all_maps_universe,
    exhaustive_two_cubes,
    group_hom_universe,
    mutate_resolution,
    random_contractible_group,
    random_cube,
    random_group_square,
    random_set_square,
    random_simplicial_group,
    squares_universe,
)
from cubex.simplicial import (
    arr_n,
    arr_via_shift,
    base_square_cover,
    canonical_augmentation,
    cech_nerve,
    constant_simplicial,
    exactness,
    extend_by_kernels,
    first_inexact_level,
    identity_cover,
    is_contractible,
    is_exact_at,
    kan_report,
    lifted_exactness,
    ordinal_nerve,
    simplicial_kernel,
    split_square_truncation,
    tv_resolution,
)
from cubex.types import (
    AxiomStatus,
    ContractionStatus,
    Cube,
    FinMorphism,
    Flavor,
    SquareArrow,
    TheoremReport,
    TruncatedSimplicial,
    Verdict,
)

logger = logging.getLogger(__name__)

THEOREMS = {
    "dip-equivalence": "limitwise and inductive cube extension checks agree",
    "e5-equivalences": "right cancellation for double extensions, (E5), split squares and the kernel-pair criterion agree",
    "kernel-pair-lemma": "squares over kernel pairs are double extensions iff the square is",
    "axioms-go-up": "double extensions satisfy the axioms the base class satisfies",
    "kan-theorem": "simplicial objects are Kan when (E5) holds",
    "contractible-kan": "contractible Kan objects are resolutions",
    "maltsev-search": "search for a split epimorphism of split epimorphisms that is not a double extension",
    "e5-plus": "(E5+) on short exact rows, with explicit set-sections",
    "resolution-cubes": "resolutions are exactly the objects whose truncation cubes are extensions",
    "codomain-agreement": "arrow views of a truncation cube share their codomain",
    "truncation-square": "a truncation cube read along direction 0 is the shifted truncation",
    "kan-as-extension": "Kan up to n iff the domains of the next truncation cube are extensions",
    "resolution-lifted": "exactness of the shift arrow matches exactness one level up",
    "kernel-lemma": "exact up to n means the next simplicial kernel exists",
}

THEOREM_IDS = tuple(THEOREMS)

_MALTSEV_CLASSES = {"surjections", "set-split", "all"}


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, BaseModel):
            h.update(p.model_dump_json().encode())
        else:
            h.update(json.dumps(p, sort_keys=True).encode())
    return h.hexdigest()[:12]


def _report(theorem: str, instance: str, ok: bool, *, witness=None, reason=None, detail=None) -> TheoremReport:
    return TheoremReport(
        theorem=theorem,
        instance=instance,
        verdict=Verdict.HOLDS if ok else Verdict.VIOLATED,
        witness=None if ok else witness,
        reason=reason,
        detail=detail or {},
    )


def _skipped(theorem: str, instance: str, reason: str, detail=None) -> TheoremReport:
    return TheoremReport(theorem=theorem, instance=instance, verdict=Verdict.SKIPPED, reason=reason, detail=detail or {})


def aggregate(theorem: str, instance: str, reports: Sequence[TheoremReport]) -> TheoremReport:
    """Fold per-instance reports into one; the first violation wins."""
    counts = Counter(r.verdict for r in reports)
    detail = {"instances": len(reports)}
    detail.update({v.value: counts[v] for v in Verdict if counts[v]})
    bad = next((r for r in reports if r.verdict is Verdict.VIOLATED), None)
    if bad is not None:
        detail["first_violation"] = bad.instance
        detail.update({k: v for k, v in bad.detail.items() if k not in detail})
        return TheoremReport(
            theorem=theorem, instance=instance, verdict=Verdict.VIOLATED,
            witness=bad.witness, reason=bad.reason, detail=detail,
        )
    if counts[Verdict.HOLDS]:
        return TheoremReport(theorem=theorem, instance=instance, verdict=Verdict.HOLDS, detail=detail)
    if counts[Verdict.NONE_FOUND]:
        return TheoremReport(theorem=theorem, instance=instance, verdict=Verdict.NONE_FOUND, detail=detail)
    return _skipped(theorem, instance, "no instance met the hypotheses", detail)


def _ss_instance(ss: TruncatedSimplicial) -> str:
    return f"{ss.flavor.value}-simplicial:{_digest(ss)}"


def _cube_payload(c: Cube) -> dict:
    return {
        "dim": c.dim,
        "objects": [list(o.labels) for o in c.objects],
        "maps": [[None if f is None else list(f.table) for f in row] for row in c.maps],
    }


# --- Extensions and cubes ---


def check_dip_equivalence(c: Cube, e: ExtensionClass, *, caps: Caps | None = None) -> TheoremReport:
    """The limitwise and the inductive extension checks agree on ``c``."""
    lw = is_extension_limitwise(c, e, caps=caps)
    ind = is_extension_inductive(c, e, caps=caps)
    detail = {"dim": c.dim, "limitwise": lw, "inductive": ind}
    return _report(
        "dip-equivalence", f"cube:{_digest(c)}", lw == ind,
        witness={"cube": _cube_payload(c)}, reason="extension checks disagree", detail=detail,
    )


def double_split_sections(s: SquareArrow, *, caps: Caps | None = None) -> dict[str, FinMorphism] | None:
    """Sections making ``s`` a split epimorphism of split epimorphisms."""
    cat = FinCategory()
    for f0_bar in cat.iter_sections(s.f0, caps):
        for b_bar in cat.iter_sections(s.b, caps):
            for a_bar in cat.iter_sections(s.a, caps):
                if b_bar.after(s.f0).table != s.f1.after(a_bar).table:
                    continue
                for f1_bar in cat.iter_sections(s.f1, caps):
                    if s.a.after(f1_bar).table != f0_bar.after(s.b).table:
                        continue
                    if a_bar.after(f0_bar).table == f1_bar.after(b_bar).table:
                        return {"a": a_bar, "b": b_bar, "f1": f1_bar, "f0": f0_bar}
    return None


def _split_witness(s: SquareArrow, sections: dict[str, FinMorphism], caps: Caps | None) -> dict:
    _, comparison = comparison_to_pullback(FinCategory(), s, caps)
    return {
        "square": core.arrow_payload(s),
        "sections": {k: core.arrow_payload(v) for k, v in sections.items()},
        "comparison_image": core.image_size(comparison),
        "pullback_size": comparison.cod.size,
    }


def kernel_pair_squares(s: SquareArrow, *, caps: Caps | None = None) -> tuple[FinMorphism, SquareArrow, SquareArrow]:
    """``r : R[f1] -> R[f0]`` and the two squares it forms with the projections."""
    top = core.kernel_pair(s.f1, caps=caps)
    bottom = core.kernel_pair(s.f0, caps=caps)
    r = core.mediate(bottom, top.apex, {
        "p0": s.a.after(top.legs["p0"]),
        "p1": s.a.after(top.legs["p1"]),
    })
    left = tuple(SquareArrow.trusted(r, s.a, top.legs[p], bottom.legs[p]) for p in ("p0", "p1"))
    return r, left[0], left[1]


def check_kernel_pair_lemma(s: SquareArrow, e: ExtensionClass, *, caps: Caps | None = None) -> TheoremReport:
    """Either square over the kernel pairs is a double extension iff ``s`` is."""
    instance = f"square:{_digest(s)}"
    if not all(e.contains(f) for f in (s.a, s.b, s.f1, s.f0)):
        return _skipped("kernel-pair-lemma", instance, "a side of the square is not an extension")
    _, left0, left1 = kernel_pair_squares(s, caps=caps)
    l0, l1, right = (is_double_extension(e, x) for x in (left0, left1, s))
    detail = {"left0": l0, "left1": l1, "right": right}
    return _report(
        "kernel-pair-lemma", instance, l0 == l1 == right,
        witness={"square": core.arrow_payload(s)}, reason="kernel-pair squares disagree with the square", detail=detail,
    )


def check_e5_equivalences(e: ExtensionClass, universe: Sequence[FinMorphism], *, caps: Caps | None = None, label: str = "") -> TheoremReport:
    """Right cancellation for ``E¹``, (E5), double split squares and the kernel-pair criterion.

    The four conditions must agree; the verdict holds when all of them hold.
    """
    caps = caps or active_caps()
    instance = label or f"universe:{len(universe)}/{e.name}"
    base = audit_axioms(e, universe, caps=caps)
    failed = [ax for ax in ("E1", "E2", "E3", "E4") if base.status(ax) is AxiomStatus.VIOLATED]
    if failed:
        return _skipped("e5-equivalences", instance, f"{', '.join(failed)} fails on the base universe")
    squares = squares_universe(universe, e)
    split_witness = None
    for s in squares:
        sections = double_split_sections(s, caps=caps)
        if sections is not None and not is_double_extension(e, s):
            split_witness = _split_witness(s, sections, caps)
            break
    criterion_witness = None
    for s in squares:
        r, _, _ = kernel_pair_squares(s, caps=caps)
        if e.contains(r) != is_double_extension(e, s):
            criterion_witness = {"square": core.arrow_payload(s), "r": core.arrow_payload(r)}
            break
    conditions: dict[str, bool | None] = {
        "e5": base.status("E5") is not AxiomStatus.VIOLATED,
        "double_split": split_witness is None,
        "kernel_pair": criterion_witness is None,
    }
    try:
        lifted = audit_axioms(lift_class(e), squares, axioms=("E4",), caps=caps)
        conditions["lifted_e4"] = lifted.status("E4") is not AxiomStatus.VIOLATED
    except ResourceLimitError:
        conditions["lifted_e4"] = None
    detail = {"universe": len(universe), "squares": len(squares), "conditions": conditions}
    known = {v for v in conditions.values() if v is not None}
    if len(known) > 1:
        return TheoremReport(
            theorem="e5-equivalences", instance=instance, verdict=Verdict.VIOLATED,
            reason="the equivalent conditions disagree", detail=detail,
        )
    if known == {True}:
        return TheoremReport(theorem="e5-equivalences", instance=instance, verdict=Verdict.HOLDS, detail=detail)
    e5 = next((f for f in base.findings if f.axiom == "E5"), None)
    witness = split_witness or criterion_witness or (e5.witness if e5 else None)
    return TheoremReport(
        theorem="e5-equivalences", instance=instance, verdict=Verdict.VIOLATED,
        witness=witness, reason="(E5) fails on this universe", detail=detail,
    )


def check_axioms_go_up(
    e: ExtensionClass,
    universe: Sequence[FinMorphism],
    *,
    axioms: Sequence[str] = ("E1", "E2", "E3", "E4", "E5"),
    caps: Caps | None = None,
    label: str = "",
) -> TheoremReport:
    """Audit ``E¹`` on the squares of ``e``-members drawn from ``universe``."""
    caps = caps or active_caps()
    instance = label or f"universe:{len(universe)}/{e.name}"
    base_axioms = sorted(set(axioms) | {"E1", "E2", "E3", "E4"})
    base = audit_axioms(e, universe, axioms=base_axioms, caps=caps)
    failed = [ax for ax in base_axioms if base.status(ax) is AxiomStatus.VIOLATED]
    if failed:
        return _skipped("axioms-go-up", instance, f"{', '.join(failed)} fails on the base universe")
    squares = squares_universe(universe, e)
    lifted = audit_axioms(lift_class(e), squares, axioms=axioms, caps=caps)
    detail = {
        "squares": len(squares),
        "base": {f.axiom: f.status.value for f in base.findings},
        "lifted": {f.axiom: f.status.value for f in lifted.findings},
    }
    witness = {f.axiom: f.witness for f in lifted.findings if f.status is AxiomStatus.VIOLATED}
    return _report(
        "axioms-go-up", instance, not lifted.violated,
        witness=witness, reason=f"{', '.join(lifted.violated)} fails for the lifted class", detail=detail,
    )


# --- Simplicial results ---


def _maltsev_setting(ss: TruncatedSimplicial, e: ExtensionClass) -> bool:
    objs = ss.objects[1:]
    return e.name in _MALTSEV_CLASSES and all(o.is_group for o in objs)


def check_kan_theorem(ss: TruncatedSimplicial, e: ExtensionClass, *, caps: Caps | None = None) -> TheoremReport:
    """Quasi-simplicial objects are Kan when the setting satisfies (E5).

    Outside groups a non-Kan object is not a counterexample; it is reported
    as a generator of (E5) witnesses.
    """
    instance = _ss_instance(ss)
    if ss.flavor is Flavor.SEMI:
        return _skipped("kan-theorem", instance, "semi-simplicial objects carry no degeneracies")
    report = kan_report(ss, e, caps=caps)
    maltsev = _maltsev_setting(ss, e)
    detail = {
        "level": ss.level,
        "kan": report.holds,
        "maltsev_setting": maltsev,
        "failing": [list(h) for h in report.failing],
    }
    if report.holds or not maltsev:
        if not report.holds:
            detail["e5_witness_generator"] = True
        return TheoremReport(theorem="kan-theorem", instance=instance, verdict=Verdict.HOLDS, detail=detail)
    return TheoremReport(
        theorem="kan-theorem", instance=instance, verdict=Verdict.VIOLATED,
        witness={"horns": detail["failing"]}, reason="a simplicial group is not Kan", detail=detail,
    )


def check_contractible_kan(ss: TruncatedSimplicial, e: ExtensionClass, *, caps: Caps | None = None) -> TheoremReport:
    """Contractible and Kan implies resolution."""
    instance = _ss_instance(ss)
    if not ss.augmented:
        return _skipped("contractible-kan", instance, "object is not augmented")
    if not all(e.contains(f) for row in ss.faces for f in row):
        return _skipped("contractible-kan", instance, "a face is not an extension")
    contraction = is_contractible(ss, caps=caps)
    if contraction.status is not ContractionStatus.FOUND:
        return _skipped("contractible-kan", instance, f"contraction {contraction.status.value}")
    kan = kan_report(ss, e, caps=caps)
    if not kan.holds:
        return _skipped("contractible-kan", instance, "object is not Kan")
    level = first_inexact_level(ss, e, caps=caps)
    return _report(
        "contractible-kan", instance, level is None,
        witness={"first_inexact_level": level}, reason="contractible Kan object is not a resolution",
        detail={"level": ss.level},
    )


def check_resolution_cubes(ss: TruncatedSimplicial, e: ExtensionClass, *, caps: Caps | None = None) -> TheoremReport:
    """The first inexact level ``L`` and the first non-extension ``arr_n`` satisfy ``n = L + 1``."""
    caps = caps or active_caps()
    top = min(ss.level + 1, caps.cube_dim_cap)
    inexact = first_inexact_level(ss, e, caps=caps)
    expected = None if inexact is None or inexact + 1 > top else inexact + 1
    failing = None
    disagree = []
    for n in range(1, top + 1):
        c = arr_n(ss, n, caps=caps)
        lw = is_extension_limitwise(c, e, caps=caps)
        if lw != is_extension_inductive(c, e, caps=caps):
            disagree.append(n)
        if not lw and failing is None:
            failing = n
    detail = {"level": ss.level, "first_inexact_level": inexact, "first_non_extension": failing}
    if disagree:
        detail["checker_disagreement"] = disagree
    return _report(
        "resolution-cubes", _ss_instance(ss), failing == expected and not disagree,
        witness={"first_inexact_level": inexact, "first_non_extension": failing},
        reason="exactness and the truncation cubes disagree", detail=detail,
    )


def check_codomain_agreement(ss: TruncatedSimplicial, n: int, *, caps: Caps | None = None) -> TheoremReport:
    """All arrow views of ``arr_n`` have the same codomain."""
    views = arrow_views(arr_n(ss, n, caps=caps))
    cods = [v.codomain for v in views]
    bad = [v.direction for v in views if v.codomain != cods[0]]
    return _report(
        "codomain-agreement", f"{_ss_instance(ss)}/n={n}", not bad,
        witness={"directions": bad}, reason="arrow views have different codomains", detail={"n": n},
    )


def check_truncation_square(ss: TruncatedSimplicial, n: int, *, caps: Caps | None = None) -> TheoremReport:
    """``arr_{n+1}`` equals ``arr_n`` of the shift morphism read along direction 0."""
    direct = arr_n(ss, n + 1, caps=caps)
    via = arr_via_shift(ss, n + 1, caps=caps)
    return _report(
        "truncation-square", f"{_ss_instance(ss)}/n={n}", direct == via,
        witness={"n": n}, reason="the shifted reading differs", detail={"n": n},
    )


def check_kan_as_extension(ss: TruncatedSimplicial, e: ExtensionClass, n: int, *, caps: Caps | None = None) -> TheoremReport:
    """Kan up to level ``n`` iff every arrow-view domain of ``arr_{n+1}`` is an extension."""
    aug = ss if ss.augmented else canonical_augmentation(ss)
    kan = kan_report(aug, e, max_level=n, caps=caps).holds
    views = arrow_views(arr_n(aug, n + 1, caps=caps))
    ext = all(is_extension_limitwise(v.domain, e, caps=caps) for v in views)
    return _report(
        "kan-as-extension", f"{_ss_instance(ss)}/n={n}", kan == ext,
        witness={"kan": kan, "domains_extensions": ext}, reason="Kan property and cube domains disagree",
        detail={"n": n, "kan": kan},
    )


def check_resolution_lifted(ss: TruncatedSimplicial, e: ExtensionClass, *, caps: Caps | None = None) -> TheoremReport:
    """Exactness of ``∂ : A⁻ -> A`` for ``E¹`` matches exactness of ``A`` one level up."""
    instance = _ss_instance(ss)
    if not ss.augmented or ss.level < 1:
        return _skipped("resolution-lifted", instance, "needs an augmented object of level at least 1")
    lifted = lifted_exactness(ss, lift_class(e), levels=2, caps=caps)
    base = exactness(ss, e, caps=caps)
    rows = [all(lifted[: k + 1]) == all(base[: k + 2]) for k in range(len(lifted))]
    return _report(
        "resolution-lifted", instance, all(rows),
        witness={"lifted": lifted, "base": base}, reason="lifted exactness disagrees",
        detail={"lifted": lifted, "base": base},
    )


def check_kernel_lemma(ss: TruncatedSimplicial, e: ExtensionClass, n: int, *, caps: Caps | None = None) -> TheoremReport:
    """Exact up to level ``n`` means ``K_{n+1}`` can be computed."""
    instance = f"{_ss_instance(ss)}/n={n}"
    if n + 1 > ss.level + 1:
        return _skipped("kernel-lemma", instance, "K_{n+1} is above the truncation")
    if not all(is_exact_at(ss, k, e, caps=caps) for k in range(n + 1)):
        return _skipped("kernel-lemma", instance, f"not exact up to level {n}")
    try:
        kernel = simplicial_kernel(ss, n + 1, caps=caps)
    except ResourceLimitError as exc:
        return _skipped("kernel-lemma", instance, str(exc))
    return _report("kernel-lemma", instance, True, detail={"n": n, "kernel_size": kernel.apex.size})


# --- (E5) searches ---


def _trunc_check(s: SquareArrow, e: ExtensionClass, caps: Caps) -> dict:
    """Build the contractible object of ``s`` and see why it is not a resolution."""
    ss = split_square_truncation(s, caps=caps)
    if ss is None:
        return {"constructible": False}
    extended = extend_by_kernels(ss, 2, caps=caps)
    kan = kan_report(extended, e, caps=caps)
    return {
        "constructible": True,
        "sizes": [o.size for o in extended.objects],
        "exact": exactness(extended, e, caps=caps),
        "kan": kan.holds,
        "failing_horns": [list(h) for h in kan.failing],
    }


def search_maltsev_counterexample(
    kind: str = "sets",
    max_size: int = 3,
    *,
    e: ExtensionClass | None = None,
    caps: Caps | None = None,
) -> TheoremReport:
    """First split epimorphism of split epimorphisms that is not a double extension.

    Corners are enumerated smallest first (``B_0``, ``B_1``, ``A_0``,
    ``A_1``), maps in lexicographic table order.
    """
    caps = caps or active_caps()
    e = e or extension_class("surjections")
    if kind == "sets":
        objects = [plain_set(n) for n in range(1, max_size + 1)]
        structured = False
    elif kind == "groups":
        objects = list(small_groups(max_size).values())
        structured = True
    else:
        raise ValueError(f"Unknown search kind {kind!r} (choose from sets, groups)")
    instance = f"{kind}<={max_size}/{e.name}"
    cache: dict = {}

    def members(x, y) -> list[FinMorphism]:
        hit = cache.get((x, y))
        if hit is None:
            hit = cache[(x, y)] = [f for f in core.iter_morphisms(x, y, structured=structured, caps=caps) if e.contains(f)]
        return hit

    checked = 0
    for b0 in objects:
        for b1 in objects:
            for b in members(b1, b0):
                for a0 in objects:
                    for f0 in members(a0, b0):
                        for a1 in objects:
                            for a in members(a1, a0):
                                for f1 in members(a1, b1):
                                    if b.after(f1).table != f0.after(a).table:
                                        continue
                                    s = SquareArrow.trusted(a, b, f1, f0)
                                    sections = double_split_sections(s, caps=caps)
                                    if sections is None:
                                        continue
                                    checked += 1
                                    if is_double_extension(e, s):
                                        continue
                                    witness = _split_witness(s, sections, caps)
                                    witness["trunc"] = _trunc_check(s, e, caps)
                                    logger.info("counterexample after %d double split squares", checked)
                                    return TheoremReport(
                                        theorem="maltsev-search", instance=instance, verdict=Verdict.VIOLATED,
                                        witness=witness, reason="split epimorphism of split epimorphisms is not a double extension",
                                        detail={"checked": checked},
                                    )
    return TheoremReport(
        theorem="maltsev-search", instance=instance, verdict=Verdict.NONE_FOUND, detail={"checked": checked},
    )


def e5_plus_set_section(a: FinMorphism, b: FinMorphism, f: FinMorphism, u: FinMorphism, s: FinMorphism) -> FinMorphism:
    """Set-section of ``f`` from set-sections ``u`` of ``k`` and ``s`` of ``a``.

    ``β ↦ u(β·(t b β)⁻¹)·s(b β)`` with ``t = f∘s``.
    """
    _, ia = core.compute_kernel(a)
    _, ib = core.compute_kernel(b)
    where = {x: i for i, x in enumerate(ib.table)}
    t = [f.table[x] for x in s.table]
    top, middle = a.dom, b.dom
    table = []
    for beta in range(middle.size):
        kappa = mul(middle, beta, inv(middle, t[b.table[beta]]))
        alpha = ia.table[u.table[where[kappa]]]
        table.append(mul(top, alpha, s.table[b.table[beta]]))
    return FinMorphism.trusted(middle.underlying(), top.underlying(), table)


def _set_section(f: FinMorphism, caps: Caps) -> FinMorphism | None:
    fibers: list[list[int]] = [[] for _ in range(f.cod.size)]
    for x, y in enumerate(f.table):
        fibers[y].append(x)
    if any(not fib for fib in fibers):
        return None
    table = next(core.search_tables(f.cod, f.dom, fibers, structured=False, cap=caps.section_search_cap), None)
    return None if table is None else FinMorphism.trusted(f.cod.underlying(), f.dom.underlying(), table)


def check_e5_plus_suite(
    e: ExtensionClass,
    instances: Iterable[tuple[FinMorphism, FinMorphism, FinMorphism]],
    *,
    squares: Iterable[SquareArrow] = (),
    caps: Caps | None = None,
    label: str = "",
) -> TheoremReport:
    """(E5⁺) on each ``(a, b, f)`` and (E5) on split epimorphisms of extensions.

    For the set-split class the section of ``f`` is also built explicitly.
    """
    caps = caps or active_caps()
    instances = list(instances)
    checked = built = derived = 0
    for a, b, f in instances:
        if not all(x.is_group for x in (a.dom, a.cod, b.dom)):
            raise UnsupportedStructureError("(E5⁺) needs pointed objects")
        checked += 1
        if not check_e5_plus(e, a, b, f):
            return TheoremReport(
                theorem="e5-plus", instance=label, verdict=Verdict.VIOLATED,
                witness={"a": core.arrow_payload(a), "b": core.arrow_payload(b), "f": core.arrow_payload(f)},
                reason="k is an extension but f is not", detail={"checked": checked},
            )
        if e.name == "set-split":
            k = kernel_restriction(a, b, f)
            u, s = _set_section(k, caps), _set_section(a, caps)
            if u is not None and s is not None:
                section = e5_plus_set_section(a, b, f, u, s)
                built += 1
                if [f.table[x] for x in section.table] != list(range(b.dom.size)):
                    return TheoremReport(
                        theorem="e5-plus", instance=label, verdict=Verdict.VIOLATED,
                        witness={"f": core.arrow_payload(f), "section": list(section.table)},
                        reason="the explicit section does not split f", detail={"checked": checked},
                    )
    arrows = ArrowCategory(FinCategory())
    for sq in squares:
        if arrows.first_section(sq, caps) is None:
            continue
        derived += 1
        if not is_double_extension(e, sq):
            return TheoremReport(
                theorem="e5-plus", instance=label, verdict=Verdict.VIOLATED,
                witness={"square": core.arrow_payload(sq)},
                reason="split epimorphism of extensions is not a double extension", detail={"checked": checked},
            )
    return TheoremReport(
        theorem="e5-plus", instance=label, verdict=Verdict.HOLDS,
        detail={"checked": checked, "sections_built": built, "split_squares": derived},
    )


def e5_plus_instances(universe: Sequence[FinMorphism], e: ExtensionClass) -> list[tuple[FinMorphism, FinMorphism, FinMorphism]]:
    """Triples ``(a, b, f)`` with ``b∘f = a`` and ``a``, ``b`` in ``e``."""
    members = [f for f in universe if e.contains(f)]
    by_dom: dict = {}
    for f in universe:
        by_dom.setdefault(f.dom, []).append(f)
    out = []
    for a in members:
        for b in members:
            if b.cod != a.cod:
                continue
            for f in by_dom.get(a.dom, []):
                if f.cod == b.dom and b.after(f).table == a.table:
                    out.append((a, b, f))
    return out


# --- Suites ---

Suite = Callable[[int, Caps, bool], list[TheoremReport]]


def _suite_dip(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    e = extension_class("surjections")
    rng = random.Random(seed)
    samples = 100 if quick else 1000
    exhaustive = exhaustive_two_cubes(1 if quick else 2)
    randoms = [random_cube(rng.choice((2, 3)), 3, rng, caps=caps) for _ in range(samples)]
    groups = [random_cube(3, seed=rng, groups=True, caps=caps) for _ in range(2 if quick else 10)]
    return [
        aggregate("dip-equivalence", "exhaustive 2-cubes", [check_dip_equivalence(c, e, caps=caps) for c in exhaustive]),
        aggregate("dip-equivalence", f"random cubes seed={seed}", [check_dip_equivalence(c, e, caps=caps) for c in randoms]),
        aggregate("dip-equivalence", f"random group 3-cubes seed={seed}", [check_dip_equivalence(c, e, caps=caps) for c in groups]),
    ]


def _suite_e5_equivalences(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    surj = extension_class("surjections")
    out = [
        check_e5_equivalences(surj, group_hom_universe(3 if quick else 4), caps=caps, label="groups/surjections"),
        check_e5_equivalences(surj, all_maps_universe(3), caps=caps, label="sets<=3/surjections"),
        check_e5_equivalences(extension_class("all"), all_maps_universe(2), caps=caps, label="sets<=2/all"),
    ]
    return out


def _suite_kernel_pair(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    e = extension_class("surjections")
    rng = random.Random(seed)
    groups = [random_group_square(rng) for _ in range(10 if quick else 100)]
    sets = [random_set_square(rng) for _ in range(10 if quick else 50)]
    x = cyclic_group(4)
    one = core.identity(x)
    identity = SquareArrow.trusted(one, one, one, one)
    return [
        check_kernel_pair_lemma(identity, e, caps=caps).model_copy(update={"instance": "identity square"}),
        aggregate("kernel-pair-lemma", f"group squares seed={seed}", [check_kernel_pair_lemma(s, e, caps=caps) for s in groups]),
        aggregate("kernel-pair-lemma", f"set squares seed={seed}", [check_kernel_pair_lemma(s, e, caps=caps) for s in sets]),
    ]


def _suite_axioms_go_up(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    surj = extension_class("surjections")
    sets = all_maps_universe(2)
    return [
        check_axioms_go_up(surj, sets, axioms=("E1", "E2", "E3"), caps=caps, label="sets<=2/surjections"),
        check_axioms_go_up(surj, group_hom_universe(3 if quick else 4), caps=caps, label="groups/surjections"),
        check_axioms_go_up(extension_class("isomorphisms"), sets, caps=caps, label="sets<=2/isomorphisms"),
    ]


def _suite_kan(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    e = extension_class("surjections")
    rng = random.Random(seed)
    groups = [random_simplicial_group(rng, caps=caps) for _ in range(5 if quick else 50)]
    return [
        aggregate("kan-theorem", f"simplicial groups seed={seed}", [check_kan_theorem(ss, e, caps=caps) for ss in groups]),
        check_kan_theorem(ordinal_nerve(2, 2), e, caps=caps).model_copy(update={"instance": "ordinal nerve k=2"}),
        check_kan_theorem(constant_simplicial(cyclic_group(3), 2), e, caps=caps).model_copy(update={"instance": "constant Z3"}),
    ]


def _suite_contractible(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    e = extension_class("surjections")
    rng = random.Random(seed)
    groups = [random_contractible_group(rng, caps=caps) for _ in range(4 if quick else 20)]
    return [
        aggregate("contractible-kan", f"contractible groups seed={seed}", [check_contractible_kan(ss, e, caps=caps) for ss in groups]),
        check_contractible_kan(constant_simplicial(cyclic_group(2), 2), e, caps=caps).model_copy(update={"instance": "constant Z2"}),
    ]


def _suite_maltsev(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    return [
        search_maltsev_counterexample("sets", 3, caps=caps),
        search_maltsev_counterexample("sets", 1, caps=caps),
        search_maltsev_counterexample("groups", 3 if quick else 6, caps=caps),
    ]


def _suite_e5_plus(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    universe = group_hom_universe(3 if quick else 4)
    out = []
    for name in ("surjections", "set-split"):
        e = extension_class(name)
        squares = squares_universe(universe, e)
        out.append(check_e5_plus_suite(e, e5_plus_instances(universe, e), squares=squares, caps=caps, label=f"groups/{name}"))
    trivial = group_hom_universe(1)
    e = extension_class("surjections")
    out.append(check_e5_plus_suite(e, e5_plus_instances(trivial, e), caps=caps, label="trivial group"))
    return out


def _resolutions(caps: Caps, level: int) -> list[TruncatedSimplicial]:
    surj = extension_class("surjections")
    return [
        tv_resolution(plain_set(3), surj, level=level, caps=caps),
        tv_resolution(cyclic_group(2), surj, identity_cover, level, caps=caps),
        tv_resolution(cyclic_group(2), surj, base_square_cover, min(level, 2), caps=caps),
    ]


def _suite_resolution_cubes(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    e = extension_class("surjections")
    rng = random.Random(seed)
    bases = _resolutions(caps, 2 if quick else 3)
    mutated = [mutate_resolution(bases[i % len(bases)], rng)[0] for i in range(4 if quick else 20)]
    return [
        aggregate("resolution-cubes", "TV resolutions", [check_resolution_cubes(ss, e, caps=caps) for ss in bases]),
        aggregate("resolution-cubes", f"mutations seed={seed}", [check_resolution_cubes(ss, e, caps=caps) for ss in mutated]),
    ]


def _samples(seed: int, caps: Caps, quick: bool) -> list[TruncatedSimplicial]:
    rng = random.Random(seed)
    z4 = cyclic_group(4)
    quotient = FinMorphism.trusted(z4, cyclic_group(2), [x % 2 for x in range(4)])
    out = _resolutions(caps, 2 if quick else 3)
    out.append(cech_nerve(quotient, 2, caps=caps))
    out.append(canonical_augmentation(ordinal_nerve(2, 2)))
    out += [random_simplicial_group(rng, caps=caps) for _ in range(1 if quick else 3)]
    return out


def _suite_codomains(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    reports = [
        check_codomain_agreement(ss, n, caps=caps)
        for ss in _samples(seed, caps, quick)
        for n in range(1, min(4, ss.level + 1) + 1)
    ]
    return [aggregate("codomain-agreement", f"generated objects seed={seed}", reports)]


def _suite_truncation(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    reports = [
        check_truncation_square(ss, n, caps=caps)
        for ss in _samples(seed, caps, quick)
        if ss.level >= 1
        for n in range(1, min(3, ss.level) + 1)
    ]
    return [aggregate("truncation-square", f"generated objects seed={seed}", reports)]


def _suite_kan_extension(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    e = extension_class("surjections")
    reports = [
        check_kan_as_extension(ss, e, n, caps=caps)
        for ss in _samples(seed, caps, quick) + [ordinal_nerve(3, 2)]
        for n in range(1, min(3, ss.level) + 1)
    ]
    return [aggregate("kan-as-extension", f"generated objects seed={seed}", reports)]


def _suite_lifted(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    e = extension_class("surjections")
    rng = random.Random(seed)
    bases = _resolutions(caps, 2)
    mutated = [mutate_resolution(bases[i % 2], rng)[0] for i in range(4 if quick else 10)]
    reports = [check_resolution_lifted(ss, e, caps=caps) for ss in bases + mutated]
    return [aggregate("resolution-lifted", f"resolutions and mutations seed={seed}", reports)]


def _suite_kernel_lemma(seed: int, caps: Caps, quick: bool) -> list[TheoremReport]:
    e = extension_class("surjections")
    reports = [
        check_kernel_lemma(ss, e, n, caps=caps)
        for ss in _samples(seed, caps, quick)
        if ss.augmented
        for n in range(ss.level + 1)
    ]
    return [aggregate("kernel-lemma", f"generated objects seed={seed}", reports)]


SUITES: dict[str, Suite] = {
    "dip-equivalence": _suite_dip,
    "e5-equivalences": _suite_e5_equivalences,
    "kernel-pair-lemma": _suite_kernel_pair,
    "axioms-go-up": _suite_axioms_go_up,
    "kan-theorem": _suite_kan,
    "contractible-kan": _suite_contractible,
    "maltsev-search": _suite_maltsev,
    "e5-plus": _suite_e5_plus,
    "resolution-cubes": _suite_resolution_cubes,
    "codomain-agreement": _suite_codomains,
    "truncation-square": _suite_truncation,
    "kan-as-extension": _suite_kan_extension,
    "resolution-lifted": _suite_lifted,
    "kernel-lemma": _suite_kernel_lemma,
}


def run_theorem(theorem_id: str, seed: int | None = None, *, caps: Caps | None = None, quick: bool = False) -> list[TheoremReport]:
    """Run one theorem's generated instances; reports are sorted by instance."""
    caps = caps or active_caps()
    if theorem_id not in SUITES:
        raise ValueError(f"Unknown theorem {theorem_id!r} (see list-theorems)")
    seed = caps.default_seed if seed is None else seed
    start = time.perf_counter()
    with use_caps(caps):
        reports = SUITES[theorem_id](seed, caps, quick)
    elapsed = round(time.perf_counter() - start, 3)
    logger.info("%s finished in %.3fs", theorem_id, elapsed)
    reports = [r.model_copy(update={"wall_time": elapsed}) for r in reports]
    return sorted(reports, key=lambda r: r.instance)


async def run_suite(
    ids: Iterable[str] | None = None,
    seed: int | None = None,
    *,
    caps: Caps | None = None,
    quick: bool = False,
) -> list[TheoremReport]:
    """Run theorems concurrently; the merged order is theorem id, then instance."""
    caps = caps or active_caps()
    ids = list(ids or THEOREM_IDS)
    if parallel_enabled():
        batches = await asyncio.gather(
            *(asyncio.to_thread(run_theorem, i, seed, caps=caps, quick=quick) for i in ids)
        )
    else:
        batches = [run_theorem(i, seed, caps=caps, quick=quick) for i in ids]
    merged = [r for batch in batches for r in batch]
    return sorted(merged, key=lambda r: (r.theorem, r.instance))


def exit_code(reports: Iterable[TheoremReport]) -> int:
    """1 when any verdict is a violation, else 0."""
    return 1 if any(r.verdict is Verdict.VIOLATED for r in reports) else 0
