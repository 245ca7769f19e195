"""Constructors for the finite sets and groups used as objects."""

from __future__ import annotations

from itertools import permutations

from cubex.core import compute_limit
from cubex.types import (
    GROUP_SIGNATURE,
    FinDiagram,
    FinObject,
    Signature,
    Structure,
    Theory,
)


def plain_set(spec: int | list[str] | tuple[str, ...]) -> FinObject:
    """A bare finite set, from a size or from element labels."""
    if isinstance(spec, int):
        labels = [str(i) for i in range(spec)]
    else:
        labels = list(spec)
    return FinObject(labels=tuple(labels))


def one_point(signature: Signature | None = None, theory: Theory | None = None) -> FinObject:
    """Terminal object: a point, or the trivial algebra of ``signature``."""
    if signature is None:
        return FinObject(labels=("*",))
    if theory is None and signature == GROUP_SIGNATURE:
        theory = Theory.GROUP
    structure = Structure(
        signature=signature,
        tables=tuple((0,) for _ in signature.ops),
        theory=theory,
    )
    return FinObject(labels=("*",), structure=structure)


def group_from_tables(labels, mul, inv, unit: int) -> FinObject:
    structure = Structure(
        signature=GROUP_SIGNATURE,
        tables=(tuple(mul), tuple(inv), (unit,)),
        theory=Theory.GROUP,
    )
    return FinObject(labels=tuple(labels), structure=structure)


def cyclic_group(n: int) -> FinObject:
    if n < 1:
        raise ValueError("cyclic groups need order at least 1")
    mul = [(a + b) % n for a in range(n) for b in range(n)]
    inv = [(-a) % n for a in range(n)]
    return group_from_tables([str(i) for i in range(n)], mul, inv, 0)


def trivial_group() -> FinObject:
    return one_point(GROUP_SIGNATURE)


def direct_product(*factors: FinObject) -> FinObject:
    """Product with labels ``(g,h,...)`` and pointwise structure."""
    if not factors:
        raise ValueError("direct_product needs at least one factor")
    if len(factors) == 1:
        return factors[0]
    width = len(str(len(factors) - 1))
    nodes = {f"f{i:0{width}d}": g for i, g in enumerate(factors)}
    return compute_limit(FinDiagram(nodes=nodes)).apex


def symmetric_group(n: int = 3) -> FinObject:
    """Permutations of ``0..n-1`` in lexicographic order, labelled by their images."""
    perms = list(permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    mul = [index[tuple(p[q[i]] for i in range(n))] for p in perms for q in perms]
    inv = []
    for p in perms:
        q = [0] * n
        for i, pi in enumerate(p):
            q[pi] = i
        inv.append(index[tuple(q)])
    labels = ["".join(str(i) for i in p) for p in perms]
    return group_from_tables(labels, mul, inv, index[tuple(range(n))])


def mul(g: FinObject, x: int, y: int) -> int:
    return g.op("mul", x, y)


def inv(g: FinObject, x: int) -> int:
    return g.op("inv", x)


def unit(g: FinObject) -> int:
    return g.op("e")


def small_groups(max_order: int = 8) -> dict[str, FinObject]:
    """One group per listed isomorphism class, ordered by order then name.

    The non-abelian groups of order 8 are not included.
    """
    z = cyclic_group
    catalogue = [
        ("1", 1, trivial_group),
        ("Z2", 2, lambda: z(2)),
        ("Z3", 3, lambda: z(3)),
        ("Z4", 4, lambda: z(4)),
        ("Z2xZ2", 4, lambda: direct_product(z(2), z(2))),
        ("Z5", 5, lambda: z(5)),
        ("Z6", 6, lambda: z(6)),
        ("S3", 6, lambda: symmetric_group(3)),
        ("Z7", 7, lambda: z(7)),
        ("Z8", 8, lambda: z(8)),
        ("Z4xZ2", 8, lambda: direct_product(z(4), z(2))),
        ("Z2xZ2xZ2", 8, lambda: direct_product(z(2), z(2), z(2))),
    ]
    return {name: build() for name, order, build in catalogue if order <= max_order}
