"""Tests for seeded instance generation."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubex.algebra import cyclic_group, plain_set
from cubex.core import is_surjective
from cubex.cubes import check_commutativity
from cubex.errors import DiagramError
from cubex.generate import (
    all_maps_universe,
    exhaustive_two_cubes,
    group_hom_universe,
    levelwise_product,
    mutate_resolution,
    random_contractible_group,
    random_cube,
    random_group_square,
    random_set_square,
    random_simplicial_group,
    squares_universe,
)
from cubex.simplicial import (
    cech_nerve,
    constant_simplicial,
    first_inexact_level,
    is_contractible,
    tv_resolution,
    validate,
)
from cubex.classes import extension_class
from cubex.types import ContractionStatus, FinMorphism, Flavor

seeds = st.integers(0, 10_000)
SURJ = extension_class("surjections")


def _quotient():
    return FinMorphism(dom=cyclic_group(4), cod=cyclic_group(2), table=(0, 1, 0, 1))


def test_universe_sizes():
    assert len(all_maps_universe(2)) == 8
    assert len(all_maps_universe(3)) == 56
    assert len(group_hom_universe(1)) == 1
    assert len(group_hom_universe(3)) == 12


def test_exhaustive_squares_commute():
    cubes = exhaustive_two_cubes(1)
    assert len(cubes) == 1
    squares = exhaustive_two_cubes(2)
    assert len(squares) > 16
    for c in squares:
        check_commutativity(c)


def test_squares_universe_filters_by_class(surj):
    universe = all_maps_universe(2)
    every = squares_universe(universe)
    members = squares_universe(universe, surj)
    assert len(members) < len(every)
    for s in members:
        assert all(is_surjective(f) for f in (s.a, s.b, s.f1, s.f0))


def test_generation_is_reproducible():
    assert random_cube(3, 3, 11) == random_cube(3, 3, 11)
    assert random_set_square(5) == random_set_square(5)
    assert random_simplicial_group(5) == random_simplicial_group(5)


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([1, 2, 3]))
def test_random_cubes_commute(seed, dim):
    c = random_cube(dim, 3, seed)
    assert c.dim == dim
    check_commutativity(c)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_random_group_cubes(seed):
    c = random_cube(3, seed=seed, groups=True)
    assert all(o.is_group for o in c.objects)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_random_squares_have_surjective_sides(seed):
    for s in (random_set_square(seed), random_group_square(seed)):
        assert all(is_surjective(f) for f in (s.a, s.b, s.f1, s.f0))
        assert s.b.after(s.f1).table == s.f0.after(s.a).table


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_random_simplicial_groups_are_valid(seed):
    ss = random_simplicial_group(seed)
    assert validate(ss) == []
    assert all(o.is_group for o in ss.objects)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_random_contractible_groups(seed):
    ss = random_contractible_group(seed)
    assert is_contractible(ss).status is ContractionStatus.FOUND


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_mutation_breaks_exactness_at_its_level(seed):
    base = tv_resolution(plain_set(3), SURJ, level=2)
    mutated, level = mutate_resolution(base, seed)
    assert mutated.flavor is Flavor.SEMI
    assert mutated.level == level
    assert first_inexact_level(mutated, SURJ) == level


def test_mutation_needs_a_movable_simplex():
    with pytest.raises(DiagramError):
        mutate_resolution(constant_simplicial(plain_set(1), 1), 0)


def test_levelwise_product():
    q = cech_nerve(_quotient(), 1)
    prod = levelwise_product(q, q)
    assert [o.size for o in prod.objects] == [4, 16, 64]
    assert validate(prod) == []
    with pytest.raises(DiagramError):
        levelwise_product(q, cech_nerve(_quotient(), 2))
