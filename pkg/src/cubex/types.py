"""Pydantic models for finite objects, morphisms, cubes and simplicial objects."""

from __future__ import annotations

from enum import Enum
from typing import Any, Union

from pydantic import BaseModel, Field, model_validator

from cubex.errors import CompositionError

# --- Signatures and structure ---


class Theory(str, Enum):
    GROUP = "group"


class Operation(BaseModel):
    name: str
    arity: int = Field(ge=0)

    model_config = {"frozen": True}


class Signature(BaseModel):
    ops: tuple[Operation, ...] = ()

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _unique_names(self) -> Signature:
        names = [op.name for op in self.ops]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate operation names in {names}")
        return self

    def index(self, name: str) -> int:
        for i, op in enumerate(self.ops):
            if op.name == name:
                return i
        raise KeyError(name)

    @property
    def constants(self) -> tuple[int, ...]:
        return tuple(i for i, op in enumerate(self.ops) if op.arity == 0)


GROUP_SIGNATURE = Signature(
    ops=(
        Operation(name="mul", arity=2),
        Operation(name="inv", arity=1),
        Operation(name="e", arity=0),
    )
)


class Structure(BaseModel):
    """Operation tables, one flat row-major tuple per signature op."""

    signature: Signature
    tables: tuple[tuple[int, ...], ...]
    theory: Theory | None = None

    model_config = {"frozen": True}


def row_index(args: tuple[int, ...] | list[int], size: int) -> int:
    r = 0
    for a in args:
        r = r * size + a
    return r


# --- Objects and morphisms ---


class FinObject(BaseModel):
    """A finite carrier ``0..size-1`` with labels and optional structure."""

    labels: tuple[str, ...]
    structure: Structure | None = None

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check(self) -> FinObject:
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("element labels must be distinct")
        st = self.structure
        if st is None:
            return self
        m = len(self.labels)
        if len(st.tables) != len(st.signature.ops):
            raise ValueError("one table per operation is required")
        for op, table in zip(st.signature.ops, st.tables):
            if len(table) != m**op.arity:
                raise ValueError(f"table of {op.name}/{op.arity} must have {m**op.arity} entries")
            if any(not 0 <= v < m for v in table):
                raise ValueError(f"table of {op.name} leaves the carrier")
        if st.theory is Theory.GROUP:
            _check_group_axioms(self)
        return self

    @classmethod
    def trusted(cls, labels, structure: Structure | None = None) -> FinObject:
        """Skip validation for objects built by construction (limits, kernels)."""
        return cls.model_construct(labels=tuple(labels), structure=structure)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def is_group(self) -> bool:
        return self.structure is not None and self.structure.theory is Theory.GROUP

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def op(self, name: str, *args: int) -> int:
        if self.structure is None:
            raise KeyError(name)
        j = self.structure.signature.index(name)
        return self.structure.tables[j][row_index(args, self.size)]

    def underlying(self) -> FinObject:
        if self.structure is None:
            return self
        return FinObject.trusted(self.labels)


def _check_group_axioms(obj: FinObject) -> None:
    sig = obj.structure.signature
    if [(op.name, op.arity) for op in sig.ops] != [("mul", 2), ("inv", 1), ("e", 0)]:
        raise ValueError("group theory needs the signature mul/2, inv/1, e/0")
    mul, inv, unit = obj.structure.tables
    m = obj.size
    e = unit[0]
    for x in range(m):
        if mul[x * m + e] != x or mul[e * m + x] != x:
            raise ValueError(f"e is not neutral for {obj.labels[x]}")
        if mul[x * m + inv[x]] != e:
            raise ValueError(f"inv fails for {obj.labels[x]}")
        for y in range(m):
            xy = mul[x * m + y]
            for z in range(m):
                if mul[xy * m + z] != mul[x * m + mul[y * m + z]]:
                    raise ValueError("mul is not associative")


class FinMorphism(BaseModel):
    dom: FinObject
    cod: FinObject
    table: tuple[int, ...]

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check(self) -> FinMorphism:
        if len(self.table) != self.dom.size:
            raise ValueError(f"table has {len(self.table)} entries, domain has {self.dom.size}")
        if any(not 0 <= v < self.cod.size for v in self.table):
            raise ValueError("table leaves the codomain")
        bad = homomorphism_failure(self.dom, self.cod, self.table)
        if bad:
            raise ValueError(bad)
        return self

    @classmethod
    def trusted(cls, dom: FinObject, cod: FinObject, table) -> FinMorphism:
        return cls.model_construct(dom=dom, cod=cod, table=tuple(table))

    def __call__(self, x: int) -> int:
        return self.table[x]

    def after(self, f: FinMorphism) -> FinMorphism:
        """Composite ``self ∘ f``."""
        if f.cod is not self.dom and f.cod != self.dom:
            raise CompositionError("codomain of the first map is not the domain of the second")
        t = self.table
        return FinMorphism.trusted(f.dom, self.cod, (t[x] for x in f.table))


def homomorphism_failure(dom: FinObject, cod: FinObject, table) -> str | None:
    """Describe the first operation ``table`` fails to preserve, if any.

    Only maps between objects of the same signature must be homomorphisms;
    any other map is a plain function on carriers.
    """
    if dom.structure is None or cod.structure is None or dom.structure.signature != cod.structure.signature:
        return None
    m, n = dom.size, cod.size
    for op, dt, ct in zip(dom.structure.signature.ops, dom.structure.tables, cod.structure.tables):
        k = op.arity
        for r in range(m**k):
            args, q = [], r
            for _ in range(k):
                q, a = divmod(q, m)
                args.append(a)
            args.reverse()
            if table[dt[r]] != ct[row_index([table[a] for a in args], n)]:
                return f"not a homomorphism: {op.name} is not preserved"
    return None


class SquareArrow(BaseModel):
    """A commutative square viewed as an arrow ``a -> b`` in an arrow category.

    ``f1: dom a -> dom b`` and ``f0: cod a -> cod b`` with ``b∘f1 = f0∘a``.
    Components may themselves be squares.
    """

    a: Arrow
    b: Arrow
    f1: Arrow
    f0: Arrow

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check(self) -> SquareArrow:
        if self.f1.dom != self.a.dom or self.f1.cod != self.b.dom:
            raise ValueError("f1 must run from the domain of a to the domain of b")
        if self.f0.dom != self.a.cod or self.f0.cod != self.b.cod:
            raise ValueError("f0 must run from the codomain of a to the codomain of b")
        if self.b.after(self.f1) != self.f0.after(self.a):
            raise ValueError("square does not commute")
        return self

    @classmethod
    def trusted(cls, a: Arrow, b: Arrow, f1: Arrow, f0: Arrow) -> SquareArrow:
        return cls.model_construct(a=a, b=b, f1=f1, f0=f0)

    @property
    def dom(self) -> Arrow:
        return self.a

    @property
    def cod(self) -> Arrow:
        return self.b

    def after(self, f: SquareArrow) -> SquareArrow:
        if f.b != self.a:
            raise CompositionError("squares are not composable")
        return SquareArrow.trusted(f.a, self.b, self.f1.after(f.f1), self.f0.after(f.f0))


Arrow = Union[FinMorphism, SquareArrow]
SquareArrow.model_rebuild()


# --- Diagrams and limits ---


class Edge(BaseModel):
    src: str
    dst: str
    morphism: FinMorphism


class FinDiagram(BaseModel):
    nodes: dict[str, FinObject]
    edges: tuple[Edge, ...] = ()


class Cone(BaseModel):
    """A limit cone; ``visible`` legs determine apex elements."""

    apex: FinObject
    legs: dict[str, FinMorphism]
    visible: tuple[str, ...]

    def leg(self, name: str) -> FinMorphism:
        return self.legs[name]


# --- Cubes ---


class Cube(BaseModel):
    """An n-cube indexed by bitmasks of subsets of ``{0..n-1}``.

    ``maps[mask][i]`` is the generator ``A_mask -> A_{mask minus i}``; it is
    ``None`` when ``i`` is not in ``mask``.
    """

    dim: int = Field(ge=0)
    objects: tuple[FinObject, ...]
    maps: tuple[tuple[FinMorphism | None, ...], ...]

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _shape(self) -> Cube:
        count = 1 << self.dim
        if len(self.objects) != count or len(self.maps) != count:
            raise ValueError(f"a {self.dim}-cube needs {count} vertices")
        for mask in range(count):
            row = self.maps[mask]
            if len(row) != self.dim:
                raise ValueError("each vertex needs one slot per direction")
            for i in range(self.dim):
                f = row[i]
                if not mask >> i & 1:
                    if f is not None:
                        raise ValueError("generator given for an absent direction")
                    continue
                if f is None:
                    raise ValueError(f"missing generator at vertex {mask} direction {i}")
                if f.dom != self.objects[mask] or f.cod != self.objects[mask & ~(1 << i)]:
                    raise ValueError(f"generator at vertex {mask} direction {i} has the wrong type")
        return self

    def obj(self, subset) -> FinObject:
        return self.objects[to_mask(subset)]

    def generator(self, subset, i: int) -> FinMorphism:
        f = self.maps[to_mask(subset)][i]
        if f is None:
            raise KeyError((tuple(subset), i))
        return f


class ArrowView(BaseModel):
    """A cube seen as an arrow between two sub-cubes along ``direction``."""

    direction: int
    domain: Cube
    codomain: Cube
    components: tuple[FinMorphism, ...]


def to_mask(subset) -> int:
    if isinstance(subset, int):
        return subset
    m = 0
    for i in subset:
        m |= 1 << i
    return m


def to_subset(mask: int) -> tuple[int, ...]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


# --- Simplicial objects ---


class Flavor(str, Enum):
    SEMI = "semi"
    QUASI = "quasi"
    FULL = "full"


class TruncatedSimplicial(BaseModel):
    """Levels ``-1..level``; ``objects[n + 1]`` is ``A_n``.

    ``faces[n]`` holds ``∂_0..∂_n : A_n -> A_{n-1}`` (``faces[0]`` is empty
    without augmentation), ``degeneracies[n]`` holds
    ``σ_0..σ_n : A_n -> A_{n+1}`` and ``contraction[n]`` is
    ``σ_{-1} : A_{n-1} -> A_n``.
    """

    flavor: Flavor
    level: int = Field(ge=0)
    objects: tuple[FinObject | None, ...]
    faces: tuple[tuple[FinMorphism, ...], ...]
    degeneracies: tuple[tuple[FinMorphism, ...], ...] = ()
    contraction: tuple[FinMorphism, ...] | None = None

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _shape(self) -> TruncatedSimplicial:
        n_top = self.level
        if len(self.objects) != n_top + 2 or len(self.faces) != n_top + 1:
            raise ValueError("objects and faces must cover every level")
        if any(o is None for o in self.objects[1:]):
            raise ValueError("levels 0 and above need objects")
        aug = self.augmented
        for n in range(n_top + 1):
            expected = n + 1 if (n > 0 or aug) else 0
            if len(self.faces[n]) != expected:
                raise ValueError(f"level {n} needs {expected} face maps")
            for i, f in enumerate(self.faces[n]):
                if f.dom != self.obj(n) or f.cod != self.obj(n - 1):
                    raise ValueError(f"face ∂_{i} at level {n} has the wrong type")
        if self.flavor is Flavor.SEMI:
            if self.degeneracies:
                raise ValueError("semi-simplicial objects carry no degeneracies")
        else:
            if len(self.degeneracies) != n_top:
                raise ValueError("degeneracies are needed below the top level")
            for n, row in enumerate(self.degeneracies):
                if len(row) != n + 1:
                    raise ValueError(f"level {n} needs {n + 1} degeneracies")
                for i, s in enumerate(row):
                    if s.dom != self.obj(n) or s.cod != self.obj(n + 1):
                        raise ValueError(f"degeneracy σ_{i} at level {n} has the wrong type")
        if self.contraction is not None:
            if not aug or len(self.contraction) != n_top + 1:
                raise ValueError("a contraction needs augmentation and one map per level")
            for n, s in enumerate(self.contraction):
                if s.dom != self.obj(n - 1) or s.cod != self.obj(n):
                    raise ValueError(f"contraction at level {n} has the wrong type")
        return self

    @property
    def augmented(self) -> bool:
        return self.objects[0] is not None

    def obj(self, n: int) -> FinObject:
        o = self.objects[n + 1]
        if o is None:
            raise KeyError(n)
        return o

    def face(self, n: int, i: int) -> FinMorphism:
        return self.faces[n][i]

    def degeneracy(self, n: int, i: int) -> FinMorphism:
        return self.degeneracies[n][i]


class KernelObject(BaseModel):
    """``K_n`` with legs ``k_0..k_n`` into ``A_{n-1}``; ``K_0 = A_{-1}``."""

    n: int
    apex: FinObject
    legs: tuple[FinMorphism, ...]
    cone: Cone | None = None


class SquareSimplicial(BaseModel):
    """``∂: A⁻ -> A`` read as a semi-simplicial object of arrows.

    ``objects[n + 1]`` is ``∂_0 : A_{n+1} -> A_n`` and ``faces[n][i]`` is the
    square ``(∂_{i+1}, ∂_i)`` between consecutive arrows.
    """

    objects: tuple[FinMorphism, ...]
    faces: tuple[tuple[SquareArrow, ...], ...]


class HornObject(BaseModel):
    """``A(n,k)`` with legs ``a_i`` into ``A_{n-1}`` for ``i != k``."""

    n: int
    k: int
    apex: FinObject
    legs: dict[int, FinMorphism]
    cone: Cone | None = None


# --- Reports ---


class AxiomStatus(str, Enum):
    VERIFIED = "verified-on-universe"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not-applicable"


class AxiomFinding(BaseModel):
    axiom: str
    status: AxiomStatus
    checked: int = 0
    witness: dict[str, Any] | None = None


class AuditReport(BaseModel):
    class_name: str
    universe_size: int
    findings: list[AxiomFinding]

    def status(self, axiom: str) -> AxiomStatus:
        for f in self.findings:
            if f.axiom == axiom:
                return f.status
        raise KeyError(axiom)

    @property
    def violated(self) -> list[str]:
        return [f.axiom for f in self.findings if f.status is AxiomStatus.VIOLATED]


class Violation(BaseModel):
    identity: str
    level: int
    indices: tuple[int, ...]
    message: str


class KanEntry(BaseModel):
    n: int
    k: int
    holds: bool


class KanReport(BaseModel):
    entries: list[KanEntry]

    @property
    def holds(self) -> bool:
        return all(e.holds for e in self.entries)

    @property
    def failing(self) -> list[tuple[int, int]]:
        return [(e.n, e.k) for e in self.entries if not e.holds]


class ContractionStatus(str, Enum):
    FOUND = "found"
    ABSENT = "absent"
    UNKNOWN = "unknown"


class ContractionResult(BaseModel):
    status: ContractionStatus
    contraction: tuple[FinMorphism, ...] | None = None


class Verdict(str, Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    SKIPPED = "skipped"
    NONE_FOUND = "none-found-in-bounds"


class TheoremReport(BaseModel):
    theorem: str
    instance: str
    verdict: Verdict
    witness: dict[str, Any] | None = None
    reason: str | None = None
    detail: dict[str, Any] = Field(default_factory=dict)
    wall_time: float | None = None

    def record(self, *, timing: bool = False) -> dict[str, Any]:
        data = self.model_dump(mode="json", exclude_none=True)
        if not timing:
            data.pop("wall_time", None)
        return data


# --- Documents ---


class Document(BaseModel):
    """Everything a ``.cx`` file declares, keyed by name."""

    version: int = 1
    meta: dict[str, str] = Field(default_factory=dict)
    objects: dict[str, FinObject] = Field(default_factory=dict)
    morphisms: dict[str, FinMorphism] = Field(default_factory=dict)
    cubes: dict[str, Cube] = Field(default_factory=dict)
    simplicials: dict[str, TruncatedSimplicial] = Field(default_factory=dict)
