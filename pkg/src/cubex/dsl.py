"""The ``.cx`` text format: a lark grammar, a loader and a canonical writer.

A document starts with ``cubex-format 1`` and declares named objects,
morphisms, cubes and truncated simplicial objects::

    cubex-format 1
    meta source "hand written"
    object X = {"a", "b"}
    object Z2 = {"0", "1"} with group { mul/2 = [0, 1, 1, 0] inv/1 = [0, 1] e/0 = [0] }
    morphism f : X -> Z2 = [0, 1]
    cube C dim 1 { vertex {} = Z2 vertex {0} = X map {0} 0 = f }

Names must be declared before they are used.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from cubex import core
from cubex.cubes import build_cube
from cubex.errors import CubexError, CubexParseError, DiagramError
from cubex.simplicial import make_simplicial
from cubex.types import (
    Cube,
    Document,
    FinMorphism,
    FinObject,
    Flavor,
    Operation,
    Signature,
    Structure,
    Theory,
    TruncatedSimplicial,
    to_mask,
    to_subset,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

GRAMMAR = r"""
start: header decl*

header: "cubex-format" INT

?decl: meta_decl
     | object_decl
     | morphism_decl
     | cube_decl
     | simplicial_decl

meta_decl: "meta" NAME ESCAPED_STRING
object_decl: "object" NAME "=" obj
morphism_decl: "morphism" NAME ":" obj "->" obj "=" table
cube_decl: "cube" NAME "dim" INT "{" vertex* generator* "}"
vertex: "vertex" subset "=" obj
generator: "map" subset INT "=" mor
simplicial_decl: "simplicial" NAME FLAVOR "level" INT "{" level_obj* face* degeneracy* contraction* "}"
level_obj: "object" SIGNED_INT "=" obj
face: "face" INT INT "=" mor
degeneracy: "degeneracy" INT INT "=" mor
contraction: "contraction" INT "=" mor

obj: NAME                                          -> obj_ref
   | "{" [ESCAPED_STRING ("," ESCAPED_STRING)*] "}" structure?  -> obj_literal
structure: "with" [THEORY] "{" op_table* "}"
op_table: NAME "/" INT "=" table

mor: NAME   -> mor_ref
   | table  -> mor_table

table: "[" [INT ("," INT)*] "]"
subset: "{" [INT ("," INT)*] "}"

FLAVOR: "semi" | "quasi" | "full"
THEORY: "group"
NAME: /[A-Za-z_][A-Za-z0-9_.]*/

%import common.INT
%import common.SIGNED_INT
%import common.ESCAPED_STRING
%import common.WS
%import common.SH_COMMENT
%ignore WS
%ignore SH_COMMENT
"""

_parser = Lark(GRAMMAR, parser="lalr", propagate_positions=True, maybe_placeholders=True)


def _at(where) -> tuple[int | None, int | None]:
    if isinstance(where, Token):
        return where.line, where.column
    meta = getattr(where, "meta", where)
    if getattr(meta, "empty", True):
        return None, None
    return meta.line, meta.column


def _invariant(exc: CubexError, where) -> CubexParseError:
    line, column = _at(where)
    return CubexParseError(str(exc), line, column, reason="invariant")


def _string(token: Token) -> str:
    try:
        return json.loads(token)
    except json.JSONDecodeError as exc:
        raise CubexParseError(f"invalid string literal {str(token)}: {exc.msg}", *_at(token)) from exc


class _RawTable(tuple):
    """A morphism table whose domain and codomain come from its context."""


@v_args(inline=True)
class _Loader(Transformer):
    """Builds a ``Document`` declaration by declaration; references resolve eagerly."""

    def __init__(self):
        super().__init__()
        self.doc = Document()
        self.names: set[str] = set()

    # --- Leaves ---

    def table(self, *ints):
        return _RawTable(int(t) for t in ints if t is not None)

    def subset(self, *ints):
        items = [int(t) for t in ints if t is not None]
        if len(set(items)) != len(items):
            raise CubexParseError("repeated index in subset", *_at(ints[0]))
        return to_mask(items)

    def op_table(self, name, arity, table):
        return Operation(name=str(name), arity=int(arity)), tuple(table)

    @v_args(inline=False, meta=True)
    def structure(self, meta, children):
        theory, *ops = children
        try:
            return Structure(
                signature=Signature(ops=tuple(op for op, _ in ops)),
                tables=tuple(t for _, t in ops),
                theory=None if theory is None else Theory(str(theory)),
            )
        except ValueError as exc:
            raise _invariant(DiagramError(f"invalid structure: {exc}"), meta) from exc

    @v_args(inline=False, meta=True)
    def obj_literal(self, meta, children):
        structure = None
        if children and isinstance(children[-1], Structure):
            structure = children.pop()
        labels = [_string(s) for s in children if s is not None]
        try:
            return core.make_object(labels, structure)
        except DiagramError as exc:
            raise _invariant(exc, meta) from exc

    def _lookup(self, table: dict, kind: str, token: Token):
        found = table.get(str(token))
        if found is None:
            raise CubexParseError(f"unknown {kind} {str(token)!r}", *_at(token), reason="reference")
        return found

    def obj_ref(self, token):
        return self._lookup(self.doc.objects, "object", token)

    def mor_ref(self, token):
        return self._lookup(self.doc.morphisms, "morphism", token)

    def mor_table(self, table):
        return table

    def _morphism(self, f, dom: FinObject, cod: FinObject, where) -> FinMorphism:
        if isinstance(f, _RawTable):
            try:
                return core.make_morphism(dom, cod, f)
            except DiagramError as exc:
                raise _invariant(exc, where) from exc
        if f.dom != dom or f.cod != cod:
            raise _invariant(DiagramError("morphism does not fit its slot"), where)
        return f

    # --- Declarations ---

    def _claim(self, name: Token) -> str:
        key = str(name)
        if key in self.names:
            raise CubexParseError(f"duplicate name {key!r}", *_at(name), reason="invariant")
        self.names.add(key)
        return key

    def header(self, version):
        if int(version) != FORMAT_VERSION:
            raise CubexParseError(f"unsupported format version {version}", *_at(version))

    def meta_decl(self, key, value):
        self.doc.meta[str(key)] = _string(value)

    def object_decl(self, name, obj):
        self.doc.objects[self._claim(name)] = obj

    def morphism_decl(self, name, dom, cod, table):
        self.doc.morphisms[self._claim(name)] = self._morphism(table, dom, cod, name)

    def vertex(self, mask, obj):
        return "vertex", mask, obj

    @v_args(inline=False, meta=True)
    def generator(self, meta, children):
        mask, i, f = children
        return "map", mask, int(i), f, meta

    def cube_decl(self, name, dim, *entries):
        key = self._claim(name)
        objects = {mask: obj for kind, mask, obj in (e for e in entries if e[0] == "vertex")}
        maps = {}
        for _, mask, i, f, meta in (e for e in entries if e[0] == "map"):
            if mask not in objects or mask & ~(1 << i) not in objects or not mask >> i & 1:
                raise _invariant(DiagramError(f"map ({list(to_subset(mask))}, {i}) has no vertices"), meta)
            maps[(mask, i)] = self._morphism(f, objects[mask], objects[mask & ~(1 << i)], meta)
        try:
            self.doc.cubes[key] = build_cube(int(dim), objects, maps)
        except DiagramError as exc:
            raise _invariant(exc, name) from exc

    def level_obj(self, n, obj):
        return "object", (int(n),), obj, None

    @v_args(inline=False, meta=True)
    def face(self, meta, children):
        n, i, f = children
        return "face", (int(n), int(i)), f, meta

    @v_args(inline=False, meta=True)
    def degeneracy(self, meta, children):
        n, i, f = children
        return "degeneracy", (int(n), int(i)), f, meta

    @v_args(inline=False, meta=True)
    def contraction(self, meta, children):
        n, f = children
        return "contraction", (int(n),), f, meta

    def simplicial_decl(self, name, flavor, level, *entries):
        key = self._claim(name)
        top = int(level)
        objects: list[FinObject | None] = [None] * (top + 2)
        for kind, (n,), obj, _ in (e for e in entries if e[0] == "object"):
            if not -1 <= n <= top:
                raise _invariant(DiagramError(f"level {n} is outside 0..{top}"), name)
            objects[n + 1] = obj

        def obj_at(n: int, meta) -> FinObject:
            o = objects[n + 1] if -1 <= n <= top else None
            if o is None:
                raise _invariant(DiagramError(f"no object at level {n}"), meta)
            return o

        rows: dict[str, dict] = {"face": {}, "degeneracy": {}, "contraction": {}}
        for kind, idx, f, meta in entries:
            if kind == "face":
                n = idx[0]
                rows[kind][idx] = self._morphism(f, obj_at(n, meta), obj_at(n - 1, meta), meta)
            elif kind == "degeneracy":
                n = idx[0]
                rows[kind][idx] = self._morphism(f, obj_at(n, meta), obj_at(n + 1, meta), meta)
            elif kind == "contraction":
                n = idx[0]
                rows[kind][idx] = self._morphism(f, obj_at(n - 1, meta), obj_at(n, meta), meta)
        try:
            augmented = objects[0] is not None
            shape = [range(n + 1) if n or augmented else range(0) for n in range(top + 1)]
            faces = _rows(rows["face"], shape, "face ∂")
            degeneracies = ()
            if Flavor(str(flavor)) is not Flavor.SEMI:
                degeneracies = _rows(rows["degeneracy"], [range(n + 1) for n in range(top)], "degeneracy σ")
            contraction = None
            if rows["contraction"]:
                found = {(n, 0): f for (n,), f in rows["contraction"].items()}
                contraction = [row[0] for row in _rows(found, [range(1)] * (top + 1), "contraction σ")]
            self.doc.simplicials[key] = make_simplicial(str(flavor), objects, faces, degeneracies, contraction)
        except DiagramError as exc:
            raise _invariant(exc, name) from exc

    def start(self, *_):
        return self.doc


def _rows(found: dict, shape: list[range], what: str) -> list[list[FinMorphism]]:
    expected = {(n, i) for n, r in enumerate(shape) for i in r}
    extra = sorted(set(found) - expected)
    if extra:
        n, i = extra[0]
        raise DiagramError(f"unexpected {what}_{i} at level {n}")
    rows = []
    for n, r in enumerate(shape):
        row = []
        for i in r:
            if (n, i) not in found:
                raise DiagramError(f"missing {what}_{i} at level {n}")
            row.append(found[(n, i)])
        rows.append(row)
    return rows


def parse(text: str) -> Document:
    """Load a document; every invariant is checked at load time."""
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as exc:
        raise CubexParseError(f"syntax error: {exc.__class__.__name__}", exc.line, exc.column) from exc
    try:
        doc = _Loader().transform(tree)
    except VisitError as exc:
        orig = exc.orig_exc
        if isinstance(orig, CubexParseError):
            raise orig from None
        if isinstance(orig, CubexError):
            raise _invariant(orig, exc.obj) from orig
        raise
    logger.debug(
        "parsed %d objects, %d morphisms, %d cubes, %d simplicial objects",
        len(doc.objects), len(doc.morphisms), len(doc.cubes), len(doc.simplicials),
    )
    return doc


def load(path: str | Path) -> Document:
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data.count(b"\n", 0, exc.start) + 1
        column = exc.start - (data.rfind(b"\n", 0, exc.start) + 1) + 1
        raise CubexParseError("invalid UTF-8", line, column) from exc
    return parse(text)


# --- Canonical writer ---


def _ints(values) -> str:
    return "[" + ", ".join(str(v) for v in values) + "]"


def _subset(mask: int) -> str:
    return "{" + ", ".join(str(i) for i in to_subset(mask)) + "}"


def _literal(x: FinObject) -> str:
    out = "{" + ", ".join(json.dumps(label) for label in x.labels) + "}"
    st = x.structure
    if st is not None:
        theory = f" {st.theory.value}" if st.theory is not None else ""
        ops = " ".join(f"{op.name}/{op.arity} = {_ints(t)}" for op, t in zip(st.signature.ops, st.tables))
        out += f" with{theory} {{ {ops} }}" if ops else f" with{theory} {{ }}"
    return out


class _Writer:
    def __init__(self, doc: Document):
        self.doc = doc
        self.names: dict[FinObject, str] = {}
        for name in sorted(doc.objects, reverse=True):
            self.names[doc.objects[name]] = name

    def obj(self, x: FinObject) -> str:
        return self.names.get(x) or _literal(x)

    def lines(self) -> list[str]:
        doc = self.doc
        out = [f"cubex-format {FORMAT_VERSION}"]
        out += [f"meta {k} {json.dumps(v)}" for k, v in sorted(doc.meta.items())]
        out += [f"object {name} = {_literal(doc.objects[name])}" for name in sorted(doc.objects)]
        for name in sorted(doc.morphisms):
            f = doc.morphisms[name]
            out.append(f"morphism {name} : {self.obj(f.dom)} -> {self.obj(f.cod)} = {_ints(f.table)}")
        for name in sorted(doc.cubes):
            out += self.cube(name, doc.cubes[name])
        for name in sorted(doc.simplicials):
            out += self.simplicial(name, doc.simplicials[name])
        return out

    def cube(self, name: str, c: Cube) -> list[str]:
        order = sorted(range(1 << c.dim), key=lambda m: (bin(m).count("1"), to_subset(m)))
        out = [f"cube {name} dim {c.dim} {{"]
        out += [f"  vertex {_subset(m)} = {self.obj(c.objects[m])}" for m in order]
        for m in order:
            for i in to_subset(m):
                out.append(f"  map {_subset(m)} {i} = {_ints(c.maps[m][i].table)}")
        out.append("}")
        return out

    def simplicial(self, name: str, ss: TruncatedSimplicial) -> list[str]:
        out = [f"simplicial {name} {ss.flavor.value} level {ss.level} {{"]
        for n, o in enumerate(ss.objects):
            if o is not None:
                out.append(f"  object {n - 1} = {self.obj(o)}")
        for n, row in enumerate(ss.faces):
            out += [f"  face {n} {i} = {_ints(f.table)}" for i, f in enumerate(row)]
        for n, row in enumerate(ss.degeneracies):
            out += [f"  degeneracy {n} {i} = {_ints(s.table)}" for i, s in enumerate(row)]
        for n, s in enumerate(ss.contraction or ()):
            out.append(f"  contraction {n} = {_ints(s.table)}")
        out.append("}")
        return out


def serialize(doc: Document) -> str:
    """Canonical text: sorted declarations, sorted subsets, one blank-free block per name."""
    return "\n".join(_Writer(doc).lines()) + "\n"
