"""Tests for the named theorem checks and the suite runner."""

import pytest

from cubex.algebra import cyclic_group, plain_set
from cubex.category import FinCategory
from cubex.classes import comparison_to_pullback, extension_class, is_double_extension
from cubex.core import identity, image_size
from cubex.cubes import is_extension_limitwise, square_of
from cubex.errors import UnsupportedStructureError
from cubex.generate import all_maps_universe, group_hom_universe
from cubex.simplicial import (
    arr_n,
    cech_nerve,
    constant_simplicial,
    identity_cover,
    is_exact_at,
    ordinal_nerve,
    tv_resolution,
)
from cubex.theorems import (
    SUITES,
    THEOREM_IDS,
    THEOREMS,
    aggregate,
    check_axioms_go_up,
    check_codomain_agreement,
    check_contractible_kan,
    check_dip_equivalence,
    check_e5_equivalences,
    check_e5_plus_suite,
    check_kan_as_extension,
    check_kan_theorem,
    check_kernel_lemma,
    check_kernel_pair_lemma,
    check_resolution_cubes,
    check_resolution_lifted,
    check_truncation_square,
    double_split_sections,
    e5_plus_instances,
    e5_plus_set_section,
    exit_code,
    run_suite,
    run_theorem,
    search_maltsev_counterexample,
)
from cubex.types import FinMorphism, SquareArrow, TheoremReport, Verdict


@pytest.fixture
def quotient():
    return FinMorphism(dom=cyclic_group(4), cod=cyclic_group(2), table=(0, 1, 0, 1))


def _r(verdict, instance="i", **kw):
    return TheoremReport(theorem="t", instance=instance, verdict=verdict, **kw)


def test_every_theorem_has_a_suite():
    assert set(SUITES) == set(THEOREMS)
    assert len(THEOREM_IDS) == 14


def test_aggregate_first_violation_wins():
    reports = [
        _r(Verdict.HOLDS, "a"),
        _r(Verdict.VIOLATED, "b", witness={"x": 1}, reason="first"),
        _r(Verdict.VIOLATED, "c", reason="second"),
        _r(Verdict.SKIPPED, "d"),
    ]
    out = aggregate("t", "all", reports)
    assert out.verdict is Verdict.VIOLATED
    assert out.reason == "first"
    assert out.witness == {"x": 1}
    assert out.detail["first_violation"] == "b"
    assert out.detail["instances"] == 4
    assert out.detail["violated"] == 2


def test_aggregate_without_applicable_instances():
    assert aggregate("t", "x", [_r(Verdict.SKIPPED)]).verdict is Verdict.SKIPPED
    assert aggregate("t", "x", []).verdict is Verdict.SKIPPED
    assert aggregate("t", "x", [_r(Verdict.NONE_FOUND), _r(Verdict.SKIPPED)]).verdict is Verdict.NONE_FOUND


def test_exit_code():
    assert exit_code([_r(Verdict.HOLDS), _r(Verdict.SKIPPED), _r(Verdict.NONE_FOUND)]) == 0
    assert exit_code([_r(Verdict.HOLDS), _r(Verdict.VIOLATED)]) == 1
    assert exit_code([]) == 0


def test_dip_equivalence_on_the_counterexample(load_fixture, surj):
    report = check_dip_equivalence(load_fixture("square-bad.cx").cubes["S"], surj)
    assert report.verdict is Verdict.HOLDS
    assert report.detail == {"dim": 2, "limitwise": False, "inductive": False}
    assert report.instance.startswith("cube:")


def test_kernel_pair_lemma(load_fixture, surj):
    bad = square_of(load_fixture("square-bad.cx").cubes["S"])
    report = check_kernel_pair_lemma(bad, surj)
    assert report.verdict is Verdict.HOLDS
    assert report.detail["right"] is False
    good = square_of(load_fixture("square-pullback.cx").cubes["S"])
    assert check_kernel_pair_lemma(good, surj).detail["right"] is True


def test_kernel_pair_lemma_needs_extension_sides(load_fixture):
    s = square_of(load_fixture("square-bad.cx").cubes["S"])
    report = check_kernel_pair_lemma(s, extension_class("isomorphisms"))
    assert report.verdict is Verdict.SKIPPED


def test_maltsev_search_finds_the_set_counterexample():
    report = search_maltsev_counterexample("sets", 3)
    assert report.verdict is Verdict.VIOLATED
    w = report.witness
    assert w["comparison_image"] == 3
    assert w["pullback_size"] == 4
    assert w["square"]["a"]["table"] == [0, 0, 1]
    assert w["square"]["f1"]["table"] == [0, 1, 0]
    assert w["trunc"]["constructible"] is True


def test_maltsev_search_bounds():
    assert search_maltsev_counterexample("sets", 1).verdict is Verdict.NONE_FOUND
    assert search_maltsev_counterexample("groups", 3).verdict is Verdict.NONE_FOUND
    with pytest.raises(ValueError, match="Unknown search kind"):
        search_maltsev_counterexample("rings", 2)


@pytest.mark.slow
def test_maltsev_search_finds_nothing_in_groups_up_to_order_six():
    report = search_maltsev_counterexample("groups", 6)
    assert report.verdict is Verdict.NONE_FOUND
    assert report.instance == "groups<=6/surjections"
    assert report.detail["checked"] > 0


@pytest.mark.slow
def test_maltsev_suite_searches_groups_up_to_order_six():
    reports = {r.instance: r.verdict for r in run_theorem("maltsev-search")}
    assert reports == {
        "groups<=6/surjections": Verdict.NONE_FOUND,
        "sets<=1/surjections": Verdict.NONE_FOUND,
        "sets<=3/surjections": Verdict.VIOLATED,
    }


def test_e5_equivalences_hold_for_every_map():
    report = check_e5_equivalences(extension_class("all"), all_maps_universe(2), label="sets<=2/all")
    assert report.verdict is Verdict.HOLDS
    assert set(report.detail["conditions"].values()) == {True}


def test_e5_equivalences_hold_for_groups(surj):
    report = check_e5_equivalences(surj, group_hom_universe(3))
    assert report.verdict is Verdict.HOLDS


@pytest.mark.slow
def test_e5_equivalences_fail_for_sets(surj):
    report = check_e5_equivalences(surj, all_maps_universe(3))
    assert report.verdict is Verdict.VIOLATED
    assert report.detail["conditions"]["e5"] is False


def test_axioms_go_up(surj):
    report = check_axioms_go_up(surj, all_maps_universe(2), axioms=("E1", "E2", "E3"))
    assert report.verdict is Verdict.HOLDS
    assert set(report.detail["lifted"]) == {"E1", "E2", "E3"}


def test_axioms_go_up_needs_the_base_axioms():
    report = check_axioms_go_up(extension_class("isomorphisms"), all_maps_universe(2))
    assert report.verdict is Verdict.SKIPPED
    assert "E4" in report.reason


def test_kan_theorem(quotient, surj):
    assert check_kan_theorem(cech_nerve(quotient, 2), surj).verdict is Verdict.HOLDS
    report = check_kan_theorem(ordinal_nerve(2, 2), surj)
    assert report.verdict is Verdict.HOLDS
    assert report.detail["e5_witness_generator"] is True
    assert report.detail["maltsev_setting"] is False


def test_kan_theorem_skips_semi_objects(load_fixture, surj):
    ss = load_fixture("simplicial-semi.cx").simplicials["K"]
    assert check_kan_theorem(ss, surj).verdict is Verdict.SKIPPED


def test_contractible_kan(surj):
    assert check_contractible_kan(constant_simplicial(cyclic_group(2), 2), surj).verdict is Verdict.HOLDS
    assert check_contractible_kan(ordinal_nerve(2, 1), surj).verdict is Verdict.SKIPPED


def test_resolution_cubes(load_fixture, surj):
    ss = tv_resolution(plain_set(3), surj, level=2)
    report = check_resolution_cubes(ss, surj)
    assert report.verdict is Verdict.HOLDS
    assert report.detail["first_inexact_level"] is None
    mutated = load_fixture("mutated-resolution.cx").simplicials["M"]
    report = check_resolution_cubes(mutated, surj)
    assert report.verdict is Verdict.HOLDS
    assert report.detail["first_inexact_level"] == 1
    assert report.detail["first_non_extension"] == 2


def test_resolution_cubes_for_identity_covers_of_z2(surj):
    ss = tv_resolution(cyclic_group(2), surj, identity_cover, 3)
    report = check_resolution_cubes(ss, surj)
    assert report.verdict is Verdict.HOLDS
    assert report.detail["first_inexact_level"] is None
    assert report.detail["first_non_extension"] is None


def test_resolution_suite_covers_every_tv_resolution():
    reports = {r.instance: r for r in run_theorem("resolution-cubes", quick=True)}
    tv = reports["TV resolutions"]
    assert tv.verdict is Verdict.HOLDS
    assert tv.detail["instances"] == 3
    assert reports["mutations seed=7"].verdict is Verdict.HOLDS


def test_truncation_cube_checks(quotient):
    ss = cech_nerve(quotient, 2)
    assert check_codomain_agreement(ss, 2).verdict is Verdict.HOLDS
    assert check_truncation_square(ss, 1).verdict is Verdict.HOLDS


def test_kan_as_extension(surj):
    nerve = ordinal_nerve(2, 2)
    for n in (1, 2):
        assert check_kan_as_extension(nerve, surj, n).verdict is Verdict.HOLDS


def test_resolution_lifted(surj):
    ss = tv_resolution(plain_set(3), surj, level=2)
    assert check_resolution_lifted(ss, surj).verdict is Verdict.HOLDS
    assert check_resolution_lifted(constant_simplicial(plain_set(2), 0), surj).verdict is Verdict.SKIPPED


def test_kernel_lemma(quotient, surj):
    ss = cech_nerve(quotient, 1)
    report = check_kernel_lemma(ss, surj, 1)
    assert report.verdict is Verdict.HOLDS
    assert report.detail["kernel_size"] == 16
    assert check_kernel_lemma(ss, surj, 2).verdict is Verdict.SKIPPED


def test_e5_plus_on_small_groups():
    universe = group_hom_universe(3)
    for name in ("surjections", "set-split"):
        e = extension_class(name)
        report = check_e5_plus_suite(e, e5_plus_instances(universe, e), label=name)
        assert report.verdict is Verdict.HOLDS
        assert report.detail["checked"] > 0


def test_e5_plus_needs_pointed_objects(surj):
    f = FinMorphism(dom=plain_set(2), cod=plain_set(1), table=(0, 0))
    with pytest.raises(UnsupportedStructureError):
        check_e5_plus_suite(surj, [(f, f, FinMorphism(dom=plain_set(2), cod=plain_set(2), table=(0, 1)))])


def test_explicit_set_section(quotient):
    one = FinMorphism(dom=quotient.dom, cod=quotient.dom, table=(0, 1, 2, 3))
    k_section = FinMorphism.trusted(plain_set(2), plain_set(2), (0, 1))
    a_section = FinMorphism.trusted(plain_set(2), plain_set(4), (0, 1))
    section = e5_plus_set_section(quotient, quotient, one, k_section, a_section)
    assert section.table == (0, 1, 2, 3)


def test_run_theorem_is_reproducible():
    first = run_theorem("codomain-agreement", 3, quick=True)
    second = run_theorem("codomain-agreement", 3, quick=True)
    assert [r.record() for r in first] == [r.record() for r in second]
    assert all(r.wall_time is not None for r in first)
    assert all(r.verdict is Verdict.HOLDS for r in first)


def test_run_theorem_rejects_unknown_ids():
    with pytest.raises(ValueError, match="Unknown theorem"):
        run_theorem("nope")


@pytest.mark.asyncio
async def test_run_suite_orders_by_theorem():
    reports = await run_suite(["truncation-square", "codomain-agreement"], 7, quick=True)
    assert [r.theorem for r in reports] == sorted(r.theorem for r in reports)
    assert exit_code(reports) == 0


@pytest.mark.asyncio
async def test_run_suite_without_threads(monkeypatch):
    monkeypatch.setenv("CUBEX_PARALLEL", "0")
    reports = await run_suite(["kernel-lemma"], 7, quick=True)
    assert len(reports) == 1
    assert reports[0].verdict is Verdict.HOLDS


@pytest.mark.slow
@pytest.mark.parametrize("theorem", sorted(THEOREMS))
def test_quick_suites(theorem):
    reports = run_theorem(theorem, 7, quick=True)
    assert reports
    expected_violations = {"maltsev-search": {"sets<=3/surjections"}, "e5-equivalences": {"sets<=3/surjections"}}
    bad = {r.instance for r in reports if r.verdict is Verdict.VIOLATED}
    assert bad == expected_violations.get(theorem, set())


def _replay(payload: dict) -> FinMorphism:
    return FinMorphism(dom=plain_set(payload["dom"]), cod=plain_set(payload["cod"]), table=tuple(payload["table"]))


def test_counterexample_witness_replays(surj):
    report = search_maltsev_counterexample("sets", 3)
    assert report.verdict is Verdict.VIOLATED
    w = report.witness
    s = SquareArrow(**{k: _replay(v) for k, v in w["square"].items()})
    sections = {k: _replay(v) for k, v in w["sections"].items()}
    for side, section in sections.items():
        assert getattr(s, side).after(section) == identity(section.dom)
    assert double_split_sections(s) is not None
    assert not is_double_extension(surj, s)
    _, comparison = comparison_to_pullback(FinCategory(), s)
    assert image_size(comparison) == w["comparison_image"]
    assert comparison.cod.size == w["pullback_size"]


def test_resolution_witness_replays(load_fixture, surj):
    ss = load_fixture("mutated-resolution.cx").simplicials["M"]
    report = check_resolution_cubes(ss, surj)
    level = report.witness["first_inexact_level"]
    assert not is_exact_at(ss, level, surj)
    assert all(is_exact_at(ss, n, surj) for n in range(level))
    assert not is_extension_limitwise(arr_n(ss, report.witness["first_non_extension"]), surj)
