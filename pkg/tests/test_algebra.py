"""Tests for the small group catalogue."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubex.algebra import (
    cyclic_group,
    direct_product,
    inv,
    mul,
    one_point,
    plain_set,
    small_groups,
    symmetric_group,
    trivial_group,
    unit,
)
from cubex.types import GROUP_SIGNATURE


def test_plain_set_from_size_or_labels():
    assert plain_set(3).labels == ("0", "1", "2")
    assert plain_set(["a", "b"]).labels == ("a", "b")
    assert plain_set(0).size == 0


def test_one_point():
    assert one_point().labels == ("*",)
    assert one_point().structure is None
    assert one_point(GROUP_SIGNATURE).is_group
    assert trivial_group().size == 1


def test_cyclic_group_needs_positive_order():
    with pytest.raises(ValueError):
        cyclic_group(0)


def test_symmetric_group_is_not_abelian():
    s3 = symmetric_group(3)
    assert s3.size == 6
    assert s3.labels[0] == "012"
    assert unit(s3) == 0
    assert any(mul(s3, x, y) != mul(s3, y, x) for x in range(6) for y in range(6))


def test_direct_product_labels():
    v4 = direct_product(cyclic_group(2), cyclic_group(2))
    assert v4.labels == ("(0,0)", "(0,1)", "(1,0)", "(1,1)")
    assert all(mul(v4, x, x) == unit(v4) for x in range(4))


def test_catalogue_order():
    assert list(small_groups(4)) == ["1", "Z2", "Z3", "Z4", "Z2xZ2"]
    groups = small_groups()
    assert len(groups) == 12
    assert [g.size for g in groups.values()] == sorted(g.size for g in groups.values())


@given(st.sampled_from(sorted(small_groups(8))), st.data())
def test_group_laws(name, data):
    g = small_groups(8)[name]
    x, y, z = (data.draw(st.integers(0, g.size - 1)) for _ in range(3))
    assert mul(g, mul(g, x, y), z) == mul(g, x, mul(g, y, z))
    assert mul(g, x, inv(g, x)) == unit(g)
    assert mul(g, unit(g), x) == x
