"""Tests for limits, kernels and table searches."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubex.algebra import cyclic_group, plain_set
from cubex.config import Caps
from cubex.core import (
    compose,
    compute_kernel,
    compute_limit,
    compute_pullback,
    identity,
    is_injective,
    is_iso,
    is_split_epi,
    is_surjective,
    iter_morphisms,
    iter_sections,
    kernel_pair,
    make_morphism,
    make_object,
    mediate,
)
from cubex.errors import CompositionError, DiagramError, ResourceLimitError, UnsupportedStructureError
from cubex.types import Edge, FinDiagram, FinMorphism


def _map(dom, cod, table):
    return FinMorphism(dom=dom, cod=cod, table=tuple(table))


def test_pullback_over_a_point_is_the_product():
    two, three, one = plain_set(2), plain_set(3), plain_set(1)
    cone = compute_pullback(_map(two, one, [0, 0]), _map(three, one, [0, 0, 0]))
    assert cone.apex.size == 6
    assert cone.apex.labels[:2] == ("(0,0)", "(0,1)")
    assert cone.leg("p0").table == (0, 0, 0, 1, 1, 1)
    assert cone.leg("p1").table == (0, 1, 2, 0, 1, 2)


def test_kernel_pair_size():
    f = _map(plain_set(3), plain_set(2), [0, 0, 1])
    assert kernel_pair(f).apex.size == 5


def test_pullback_needs_a_common_codomain():
    f = _map(plain_set(2), plain_set(2), [0, 1])
    g = _map(plain_set(2), plain_set(3), [0, 1])
    with pytest.raises(DiagramError, match="common codomain"):
        compute_pullback(f, g)


def test_apex_cap_is_enforced():
    one = plain_set(1)
    f = _map(plain_set(2), one, [0, 0])
    with pytest.raises(ResourceLimitError) as info:
        compute_pullback(f, f, caps=Caps(apex_cap=3))
    assert info.value.cap_name == "apex_cap"


def test_visible_nodes_must_determine_the_limit():
    two, one = plain_set(2), plain_set(1)
    d = FinDiagram(
        nodes={"a": two, "b": one},
        edges=(Edge(src="a", dst="b", morphism=_map(two, one, [0, 0])),),
    )
    with pytest.raises(DiagramError, match="do not determine"):
        compute_limit(d, visible=("b",))
    assert compute_limit(d, visible=("a",)).apex.labels == ("0", "1")


def test_limit_of_groups_is_a_group():
    z2 = cyclic_group(2)
    apex = compute_limit(FinDiagram(nodes={"x": z2, "y": z2})).apex
    assert apex.is_group
    assert apex.op("mul", 1, 2) == 3


def test_mediate():
    two, one = plain_set(2), plain_set(1)
    f = _map(two, one, [0, 0])
    cone = compute_pullback(f, f)
    diag = mediate(cone, two, {"p0": identity(two), "p1": identity(two)})
    assert diag.table == (0, 3)
    with pytest.raises(DiagramError, match="no map into node p1"):
        mediate(cone, two, {"p0": identity(two)})


def test_kernel_of_reduction_mod_two():
    z4, z2 = cyclic_group(4), cyclic_group(2)
    k, inc = compute_kernel(_map(z4, z2, [0, 1, 0, 1]))
    assert k.labels == ("0", "2")
    assert inc.table == (0, 2)
    assert k.op("mul", 1, 1) == 0


def test_kernel_needs_structure():
    f = _map(plain_set(2), plain_set(1), [0, 0])
    with pytest.raises(UnsupportedStructureError):
        compute_kernel(f)


def test_sections_in_lexicographic_order():
    f = _map(plain_set(3), plain_set(2), [0, 0, 1])
    assert [s.table for s in iter_sections(f)] == [(0, 2), (1, 2)]


def test_non_split_group_epimorphism():
    f = _map(cyclic_group(4), cyclic_group(2), [0, 1, 0, 1])
    assert is_surjective(f)
    assert is_split_epi(f) is None


def test_homomorphism_enumeration():
    homs = list(iter_morphisms(cyclic_group(2), cyclic_group(4)))
    assert [h.table for h in homs] == [(0, 0), (0, 2)]
    assert len(list(iter_morphisms(plain_set(2), plain_set(2)))) == 4


def test_search_cap_is_enforced():
    with pytest.raises(ResourceLimitError, match="section_search_cap"):
        list(iter_morphisms(plain_set(3), plain_set(3), caps=Caps(section_search_cap=2)))


def test_checked_constructors_raise_diagram_errors():
    with pytest.raises(DiagramError, match="invalid object"):
        make_object(["a", "a"])
    with pytest.raises(DiagramError, match="not a homomorphism"):
        make_morphism(cyclic_group(2), cyclic_group(3), [0, 1])


def test_compose_checks_types():
    f = _map(plain_set(2), plain_set(3), [0, 1])
    with pytest.raises(CompositionError):
        compose(f, f)


def test_predicates():
    f = _map(plain_set(2), plain_set(2), [1, 0])
    assert is_iso(f) and is_injective(f) and is_surjective(f)
    g = _map(plain_set(2), plain_set(3), [0, 1])
    assert is_injective(g) and not is_surjective(g)


tables = st.integers(1, 4).flatmap(
    lambda n: st.tuples(
        st.just(n),
        *[st.lists(st.integers(0, n - 1), min_size=n, max_size=n) for _ in range(3)],
    )
)


@given(tables)
def test_composition_is_associative(data):
    n, t1, t2, t3 = data
    x = plain_set(n)
    f, g, h = (_map(x, x, t) for t in (t1, t2, t3))
    assert compose(h, compose(g, f)) == compose(compose(h, g), f)
    assert compose(identity(x), f) == f == compose(f, identity(x))


@given(tables)
def test_pullback_legs_commute(data):
    n, t1, t2, _ = data
    x = plain_set(n)
    f, g = _map(x, x, t1), _map(x, x, t2)
    cone = compute_pullback(f, g)
    assert compose(f, cone.leg("p0")) == compose(g, cone.leg("p1"))
    expected = sum(1 for a in range(n) for b in range(n) if t1[a] == t2[b])
    assert cone.apex.size == expected


@settings(max_examples=30, deadline=None)
@given(tables)
def test_pullback_has_the_universal_property(data):
    n, t1, t2, _ = data
    x, t = plain_set(n), plain_set(2)
    f, g = _map(x, x, t1), _map(x, x, t2)
    cone = compute_pullback(f, g)
    cones = 0
    for u in iter_morphisms(t, x, structured=False):
        for v in iter_morphisms(t, x, structured=False):
            if compose(f, u) != compose(g, v):
                with pytest.raises(DiagramError, match="do not form a cone"):
                    mediate(cone, t, {"p0": u, "p1": v})
                continue
            cones += 1
            m = mediate(cone, t, {"p0": u, "p1": v})
            assert compose(cone.leg("p0"), m) == u
            assert compose(cone.leg("p1"), m) == v
    # mediators are unique: maps into the apex correspond one to one with cones
    assert cones == len(list(iter_morphisms(t, cone.apex, structured=False)))


@given(tables)
def test_kernel_pair_contains_the_diagonal(data):
    n, t1, _, _ = data
    x = plain_set(n)
    f = _map(x, x, t1)
    kp = kernel_pair(f)
    diagonal = mediate(kp, x, {"p0": identity(x), "p1": identity(x)})
    assert is_injective(diagonal)
    assert is_injective(f) == (kp.apex.size == x.size)
    assert is_injective(f) == is_surjective(diagonal)
