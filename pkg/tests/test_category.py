"""Tests for the finite category and its arrow categories."""

import pytest

from cubex.algebra import plain_set
from cubex.category import ArrowCategory, FinCategory, category_of
from cubex.errors import DiagramError
from cubex.types import FinMorphism, SquareArrow


def _map(dom, cod, table):
    return FinMorphism(dom=dom, cod=cod, table=tuple(table))


@pytest.fixture
def witness():
    """Split epimorphism of split epimorphisms with a non-surjective comparison."""
    p, x2, x3 = plain_set(1), plain_set(2), plain_set(3)
    return SquareArrow(
        a=_map(x3, x2, [0, 0, 1]),
        b=_map(x2, p, [0, 0]),
        f1=_map(x3, x2, [0, 1, 0]),
        f0=_map(x2, p, [0, 0]),
    )


def test_fin_pullback_and_induce():
    cat = FinCategory()
    x2, p = plain_set(2), plain_set(1)
    bang = _map(x2, p, [0, 0])
    pb = cat.pullback(bang, bang)
    assert pb.apex.size == 4
    diag = cat.induce(pb, cat.identity(x2), cat.identity(x2))
    assert diag.table == (0, 3)


def test_square_identity_and_iso():
    arrows = ArrowCategory(FinCategory())
    f = _map(plain_set(3), plain_set(2), [0, 1, 1])
    one = arrows.identity(f)
    assert arrows.is_iso(one)
    assert arrows.compose(one, one) == one
    assert arrows.name == "arr(fin)"


def test_square_pullback_is_levelwise(witness):
    arrows = ArrowCategory(FinCategory())
    pb = arrows.pullback(witness, witness)
    assert pb.apex.dom.size == 5
    assert pb.apex.cod.size == 4
    assert pb.p0.b == witness.a


def test_square_pullback_needs_common_codomain(witness):
    arrows = ArrowCategory(FinCategory())
    other = arrows.identity(witness.a)
    with pytest.raises(DiagramError):
        arrows.pullback(witness, other)


def test_square_sections(witness):
    arrows = ArrowCategory(FinCategory())
    sections = list(arrows.iter_sections(witness))
    assert [(s.f1.table, s.f0.table) for s in sections] == [((0, 1), (0,))]
    assert arrows.first_section(witness) == sections[0]


def test_category_of(witness):
    assert isinstance(category_of(witness.a), FinCategory)
    assert category_of(witness).name == "arr(fin)"
