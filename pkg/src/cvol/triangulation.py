"""Ordered ideal triangulations: data model, JSON parser, edge classes, cusps.

Conventions
-----------
``gluings[t][f] = (u, perm)`` glues face ``f`` of tetrahedron ``t`` (the face
opposite vertex ``f``) to face ``perm[f]`` of tetrahedron ``u``; vertex ``v``
of ``t`` goes to vertex ``perm[v]`` of ``u``.

Tetrahedron edges are indexed ``0=(01), 1=(12), 2=(02), 3=(23), 4=(03),
5=(13)``.  Opposite edges ``e`` and ``e+3`` carry the same cross-ratio
parameter: ``z`` on ``(01),(23)``, ``z' = 1/(1-z)`` on ``(12),(03)`` and
``z'' = 1 - 1/z`` on ``(02),(13)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from typing import Any, Mapping, Sequence

from .errors import (
    CuspError,
    GluingError,
    OrderingError,
    OrientationError,
    ParseError,
)

EDGES: tuple[tuple[int, int], ...] = ((0, 1), (1, 2), (0, 2), (2, 3), (0, 3), (1, 3))
EDGE_INDEX: dict[tuple[int, int], int] = {}
for _i, (_a, _b) in enumerate(EDGES):
    EDGE_INDEX[(_a, _b)] = _i
    EDGE_INDEX[(_b, _a)] = _i

#: which cross-ratio parameter (0: z, 1: z', 2: z'') sits on each edge index
EDGE_PARAMETER = (0, 1, 2, 0, 1, 2)


def edge_parameter(a: int, b: int) -> int:
    return EDGE_PARAMETER[EDGE_INDEX[(a, b)]]


def permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def triangle_sides(vertex: int) -> tuple[tuple[int, int], ...]:
    """Oriented sides of the cusp triangle at ``vertex``.

    With corners ``j < k < l`` the sides are ``(j, l), (j, k), (k, l)``.
    Side 0 joins the first and last corner: placing it on ``[0, 1]`` puts
    the vertex-0 triangle of a simplex in the standard position ``[0, z, 1]``.
    """
    j, k, l = (v for v in range(4) if v != vertex)
    return ((j, l), (j, k), (k, l))


@dataclass(frozen=True)
class EdgeClass:
    """A 1-cell: the cyclic orbit of tetrahedron edges glued around it.

    ``incidences`` lists ``(tet, edge_index, direction)`` in cyclic order;
    ``direction`` is +1 when the orbit walk carries the orientation of the
    first incidence to the low-to-high orientation of that tetrahedron edge.
    It is always +1 for ordered triangulations.
    """

    index: int
    incidences: tuple[tuple[int, int, int], ...]

    @property
    def valence(self) -> int:
        return len(self.incidences)


@dataclass(frozen=True)
class CuspTriangle:
    """Intersection of a cusp cross-section with one corner of a tetrahedron."""

    tet: int
    vertex: int
    #: per corner (other vertex of the tetrahedron, increasing), the index
    #: 0/1/2 of the cross-ratio parameter of the edge it sits on
    corner_parameters: tuple[tuple[int, int], ...]
    #: per side (see :func:`triangle_sides`): ((tet, vertex), side index)
    neighbors: tuple[tuple[tuple[int, int], int], ...]

    @property
    def owner(self) -> tuple[int, int]:
        return (self.tet, self.vertex)

    @property
    def sides(self) -> tuple[tuple[int, int], ...]:
        return triangle_sides(self.vertex)


@dataclass(frozen=True)
class Cusp:
    index: int
    triangles: tuple[CuspTriangle, ...]
    vertex_count: int

    @property
    def euler_characteristic(self) -> int:
        f = len(self.triangles)
        return self.vertex_count - (3 * f) // 2 + f

    @property
    def is_torus(self) -> bool:
        return self.euler_characteristic == 0


@dataclass(frozen=True)
class CuspTerm:
    tet: int
    a: int
    b: int
    c: int


@dataclass(frozen=True)
class ShapeField:
    """Shapes as polynomials in a root ``x`` of an integer polynomial."""

    poly: tuple[int, ...]
    root: complex
    shape_exprs: tuple[tuple[int, ...], ...]


class Triangulation:
    """An ideal triangulation with vertex orderings and orientation signs.

    Construction validates the gluing structure.  With ``validate=True``
    (the default) it also checks ordering, orientation consistency and that
    every vertex link is the link of a non-trivial end.
    """

    def __init__(
        self,
        gluings: Sequence[Sequence[tuple[int, Sequence[int]]]],
        orientation_signs: Sequence[int],
        cusp_equations: Sequence[Sequence[CuspTerm]] = (),
        shapes: Sequence[complex] | None = None,
        shape_field: ShapeField | None = None,
        validate: bool = True,
    ):
        self.gluings = tuple(
            tuple((int(u), tuple(int(x) for x in perm)) for u, perm in row)
            for row in gluings
        )
        self.orientation_signs = tuple(int(e) for e in orientation_signs)
        self.cusp_equations = tuple(tuple(eq) for eq in cusp_equations)
        self.shapes = None if shapes is None else tuple(complex(s) for s in shapes)
        self.shape_field = shape_field
        self._check_structure()
        if validate:
            self.validate()

    @property
    def n_tetrahedra(self) -> int:
        return len(self.gluings)

    def __repr__(self):
        return f"Triangulation(n_tetrahedra={self.n_tetrahedra})"

    # -- validation ------------------------------------------------------

    def _check_structure(self) -> None:
        n = self.n_tetrahedra
        if n < 1:
            raise ParseError("need at least one tetrahedron", "gluings")
        if len(self.orientation_signs) != n:
            raise ParseError(
                f"expected {n} orientation signs, got {len(self.orientation_signs)}",
                "orientation_signs",
            )
        for t, e in enumerate(self.orientation_signs):
            if e not in (1, -1):
                raise ParseError(f"sign must be +1 or -1, got {e}", f"orientation_signs[{t}]")
        for t, row in enumerate(self.gluings):
            if len(row) != 4:
                raise ParseError(f"expected 4 faces, got {len(row)}", f"gluings[{t}]")
            for f, (u, perm) in enumerate(row):
                loc = f"gluings[{t}][{f}]"
                if not 0 <= u < n:
                    raise GluingError(f"target tetrahedron {u} out of range", loc)
                if sorted(perm) != [0, 1, 2, 3]:
                    raise GluingError(f"{list(perm)} is not a permutation of 0..3", loc)
                if u == t and perm[f] == f:
                    raise GluingError("face glued to itself", loc)
        for t, row in enumerate(self.gluings):
            for f, (u, perm) in enumerate(row):
                back_t, back = self.gluings[u][perm[f]]
                if back_t != t or any(back[perm[v]] != v for v in range(4)):
                    raise GluingError(
                        f"gluing is not involutive: reverse of face {perm[f]} of "
                        f"tetrahedron {u} does not return to face {f} of tetrahedron {t}",
                        f"gluings[{t}][{f}]",
                    )
        for k, eq in enumerate(self.cusp_equations):
            for term in eq:
                if not 0 <= term.tet < n:
                    raise ParseError(f"tetrahedron {term.tet} out of range", f"cusp_equations[{k}]")
        if self.shapes is not None and len(self.shapes) != n:
            raise ParseError(f"expected {n} shapes, got {len(self.shapes)}", "shapes")
        if self.shape_field is not None and len(self.shape_field.shape_exprs) != n:
            raise ParseError(
                f"expected {n} shape expressions, got {len(self.shape_field.shape_exprs)}",
                "shape_field.shape_exprs",
            )

    def validate(self) -> None:
        ok, bad = check_ordering(self)
        if not ok:
            t, f = bad[0]
            raise OrderingError(
                f"face pairing does not preserve the vertex order ({len(bad)} offending faces)",
                f"gluings[{t}][{f}]",
            )
        bad = orientation_violations(self)
        if bad:
            t, f = bad[0]
            raise OrientationError(
                "orientation signs disagree with the face pairing", f"gluings[{t}][{f}]"
            )
        for cusp in self.cusps:
            if cusp.euler_characteristic > 0:
                tri = cusp.triangles[0]
                raise CuspError(
                    f"vertex link has Euler characteristic {cusp.euler_characteristic}; "
                    "only ideal vertices with non-trivial ends are supported",
                    f"vertex {tri.vertex} of tetrahedron {tri.tet}",
                )

    # -- derived structures ---------------------------------------------

    @cached_property
    def edge_classes(self) -> tuple[EdgeClass, ...]:
        seen: set[tuple[int, int]] = set()
        classes = []
        for t in range(self.n_tetrahedra):
            for e, (a, b) in enumerate(EDGES):
                if (t, e) in seen:
                    continue
                c, d = (v for v in range(4) if v not in (a, b))
                incidences = []
                state = (t, a, b, c, d)
                while True:
                    tt, aa, bb, cc, dd = state
                    idx = EDGE_INDEX[(aa, bb)]
                    if (tt, idx) in seen:
                        raise GluingError(
                            "edge orbit revisits a tetrahedron edge out of order",
                            f"tetrahedron {tt} edge {idx}",
                        )
                    seen.add((tt, idx))
                    incidences.append((tt, idx, 1 if aa < bb else -1))
                    # leave through the face containing aa, bb, cc (opposite dd)
                    u, perm = self.gluings[tt][dd]
                    state = (u, perm[aa], perm[bb], perm[dd], perm[cc])
                    if state == (t, a, b, c, d):
                        break
                    if len(incidences) > 6 * self.n_tetrahedra:
                        raise GluingError("edge orbit does not close", f"tetrahedron {t}")
                classes.append(EdgeClass(len(classes), tuple(incidences)))
        return tuple(classes)

    @cached_property
    def edge_class_of(self) -> dict[tuple[int, int], int]:
        """``(tet, edge_index) -> edge class index``."""
        out = {}
        for ec in self.edge_classes:
            for t, e, _ in ec.incidences:
                out[(t, e)] = ec.index
        return out

    @cached_property
    def cusp_triangles(self) -> dict[tuple[int, int], CuspTriangle]:
        out = {}
        for t in range(self.n_tetrahedra):
            for v in range(4):
                corners = tuple((j, edge_parameter(v, j)) for j in range(4) if j != v)
                neighbors = []
                for a, b in triangle_sides(v):
                    c = next(x for x in range(4) if x not in (v, a, b))
                    u, perm = self.gluings[t][c]
                    target = (perm[a], perm[b])
                    side = _side_index(perm[v], target)
                    neighbors.append(((u, perm[v]), side))
                out[(t, v)] = CuspTriangle(t, v, corners, tuple(neighbors))
        return out

    @cached_property
    def cusps(self) -> tuple[Cusp, ...]:
        tris = self.cusp_triangles
        comp: dict[tuple[int, int], int] = {}
        groups: list[list[tuple[int, int]]] = []
        for key in sorted(tris):
            if key in comp:
                continue
            stack = [key]
            comp[key] = len(groups)
            group = []
            while stack:
                k = stack.pop()
                group.append(k)
                for nb, _ in tris[k].neighbors:
                    if nb not in comp:
                        comp[nb] = len(groups)
                        stack.append(nb)
            groups.append(sorted(group))

        # cusp vertices = classes of triangle corners under side identifications
        parent: dict[tuple[int, int, int], tuple[int, int, int]] = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (t, v), tri in tris.items():
            for (a, b), ((u, w), side) in zip(tri.sides, tri.neighbors):
                _, perm = self.gluings[t][next(x for x in range(4) if x not in (v, a, b))]
                for corner in (a, b):
                    ra, rb = find((t, v, corner)), find((u, w, perm[corner]))
                    parent[ra] = rb

        cusps = []
        for i, group in enumerate(groups):
            verts = {find((t, v, j)) for t, v in group for j in range(4) if j != v}
            cusps.append(Cusp(i, tuple(tris[k] for k in group), len(verts)))
        return tuple(cusps)

    @cached_property
    def cusp_of(self) -> dict[tuple[int, int], int]:
        return {tri.owner: c.index for c in self.cusps for tri in c.triangles}

    # -- serialisation --------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "tetrahedra": self.n_tetrahedra,
            "orientation_signs": list(self.orientation_signs),
            "gluings": [[[u, list(perm)] for u, perm in row] for row in self.gluings],
        }
        if self.cusp_equations:
            d["cusp_equations"] = [
                [{"tet": c.tet, "a": c.a, "b": c.b, "c": c.c} for c in eq]
                for eq in self.cusp_equations
            ]
        if self.shapes is not None:
            d["shapes"] = [[s.real, s.imag] for s in self.shapes]
        if self.shape_field is not None:
            sf = self.shape_field
            d["shape_field"] = {
                "poly": list(sf.poly),
                "root": [sf.root.real, sf.root.imag],
                "shape_exprs": [list(e) for e in sf.shape_exprs],
            }
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def replace(self, **changes) -> "Triangulation":
        kwargs = dict(
            gluings=self.gluings,
            orientation_signs=self.orientation_signs,
            cusp_equations=self.cusp_equations,
            shapes=self.shapes,
            shape_field=self.shape_field,
            validate=True,
        )
        kwargs.update(changes)
        return Triangulation(**kwargs)


def _side_index(vertex: int, side: tuple[int, int]) -> int:
    sides = triangle_sides(vertex)
    key = tuple(sorted(side))
    for i, s in enumerate(sides):
        if s == key:
            return i
    raise AssertionError(f"no side {side} at vertex {vertex}")


# -- checks usable on structurally valid triangulations -----------------


def check_ordering(t: Triangulation) -> tuple[bool, list[tuple[int, int]]]:
    """True iff every face pairing preserves the vertex order of the face.

    Returns ``(ok, offending)`` with ``offending`` a list of ``(tet, face)``.
    """
    bad = []
    for tet, row in enumerate(t.gluings):
        for f, (_, perm) in enumerate(row):
            verts = [v for v in range(4) if v != f]
            images = [perm[v] for v in verts]
            if images != sorted(images):
                bad.append((tet, f))
    return not bad, bad


def orientation_violations(t: Triangulation) -> list[tuple[int, int]]:
    eps = t.orientation_signs
    return [
        (tet, f)
        for tet, row in enumerate(t.gluings)
        for f, (u, perm) in enumerate(row)
        if eps[tet] * eps[u] * permutation_sign(perm) != -1
    ]


def edge_classes(t: Triangulation) -> list[EdgeClass]:
    return list(t.edge_classes)


def cusp_link(t: Triangulation) -> list[Cusp]:
    return list(t.cusps)


# -- parsing --------------------------------------------------------------


def _expect(cond: bool, msg: str, loc: str) -> None:
    if not cond:
        raise ParseError(msg, loc)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _complex_pair(x, loc: str) -> complex:
    _expect(
        isinstance(x, list) and len(x) == 2 and all(_is_number(v) for v in x),
        "expected [re, im]",
        loc,
    )
    return complex(x[0], x[1])


def _int_list(x, loc: str) -> tuple[int, ...]:
    _expect(isinstance(x, list) and all(_is_int(v) for v in x), "expected a list of integers", loc)
    return tuple(x)


def _parse_cusp_equation(row, loc: str) -> tuple[CuspTerm, ...]:
    # a row is a list of terms, optionally wrapped as [terms, 0]
    if isinstance(row, list) and len(row) == 2 and isinstance(row[0], list) and _is_int(row[1]):
        _expect(row[1] == 0, "log-form target must be 0", loc)
        row = row[0]
    _expect(isinstance(row, list), "expected a list of terms", loc)
    terms = []
    for j, term in enumerate(row):
        tloc = f"{loc}[{j}]"
        _expect(isinstance(term, dict), "expected an object", tloc)
        _expect(_is_int(term.get("tet")), "missing integer 'tet'", tloc)
        for key in ("a", "b", "c"):
            _expect(_is_int(term.get(key, 0)), f"'{key}' must be an integer", tloc)
        terms.append(CuspTerm(term["tet"], term.get("a", 0), term.get("b", 0), term.get("c", 0)))
    return tuple(terms)


def from_dict(data: Mapping[str, Any], validate: bool = True) -> Triangulation:
    """Build a :class:`Triangulation` from already-decoded JSON."""
    _expect(isinstance(data, Mapping), "top level must be an object", "$")
    for key in ("tetrahedra", "orientation_signs", "gluings"):
        _expect(key in data, f"missing required field '{key}'", "$")
    n = data["tetrahedra"]
    _expect(_is_int(n) and n >= 1, "must be a positive integer", "tetrahedra")
    signs = data["orientation_signs"]
    _expect(isinstance(signs, list) and all(_is_int(e) for e in signs), "expected integers", "orientation_signs")
    glu = data["gluings"]
    _expect(isinstance(glu, list) and len(glu) == n, f"expected {n} rows", "gluings")
    gluings = []
    for t, row in enumerate(glu):
        _expect(isinstance(row, list) and len(row) == 4, "expected 4 faces", f"gluings[{t}]")
        out_row = []
        for f, entry in enumerate(row):
            loc = f"gluings[{t}][{f}]"
            _expect(
                isinstance(entry, list) and len(entry) == 2 and _is_int(entry[0]),
                "expected [target_tet, [p0, p1, p2, p3]]",
                loc,
            )
            perm = entry[1]
            _expect(
                isinstance(perm, list) and len(perm) == 4 and all(_is_int(p) for p in perm),
                "expected a permutation [p0, p1, p2, p3]",
                loc,
            )
            out_row.append((entry[0], tuple(perm)))
        gluings.append(out_row)

    cusp_eqs = []
    if data.get("cusp_equations") is not None:
        rows = data["cusp_equations"]
        _expect(isinstance(rows, list), "expected a list of equations", "cusp_equations")
        cusp_eqs = [_parse_cusp_equation(r, f"cusp_equations[{k}]") for k, r in enumerate(rows)]

    shapes = None
    if data.get("shapes") is not None:
        _expect(isinstance(data["shapes"], list), "expected a list", "shapes")
        shapes = [_complex_pair(s, f"shapes[{i}]") for i, s in enumerate(data["shapes"])]

    field_ = None
    if data.get("shape_field") is not None:
        sf = data["shape_field"]
        _expect(isinstance(sf, dict), "expected an object", "shape_field")
        for key in ("poly", "root", "shape_exprs"):
            _expect(key in sf, f"missing '{key}'", "shape_field")
        poly = _int_list(sf["poly"], "shape_field.poly")
        _expect(len(poly) >= 2 and poly[-1] != 0, "polynomial must have positive degree", "shape_field.poly")
        exprs = sf["shape_exprs"]
        _expect(isinstance(exprs, list), "expected a list", "shape_field.shape_exprs")
        field_ = ShapeField(
            poly,
            _complex_pair(sf["root"], "shape_field.root"),
            tuple(_int_list(e, f"shape_field.shape_exprs[{i}]") for i, e in enumerate(exprs)),
        )

    return Triangulation(gluings, signs, cusp_eqs, shapes, field_, validate=validate)


def parse(json_text: str, validate: bool = True) -> Triangulation:
    """Parse the triangulation JSON format and validate it."""
    try:
        data = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from exc
    return from_dict(data, validate=validate)


def load(path, validate: bool = True) -> Triangulation:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), validate=validate)


# -- constructions ----------------------------------------------------------


def disjoint_union(*parts: Triangulation) -> Triangulation:
    gluings: list = []
    signs: list[int] = []
    eqs: list = []
    offset = 0
    for part in parts:
        for row in part.gluings:
            gluings.append([(u + offset, perm) for u, perm in row])
        signs.extend(part.orientation_signs)
        for eq in part.cusp_equations:
            eqs.append([CuspTerm(c.tet + offset, c.a, c.b, c.c) for c in eq])
        offset += part.n_tetrahedra
    shapes = None
    if all(p.shapes is not None for p in parts):
        shapes = [s for p in parts for s in p.shapes]
    return Triangulation(gluings, signs, eqs, shapes)


def relabel(t: Triangulation, order: Sequence[int], validate: bool = True) -> Triangulation:
    """Renumber tetrahedra: old tetrahedron ``order[i]`` becomes ``i``."""
    new_index = {old: new for new, old in enumerate(order)}
    gluings = [
        [(new_index[u], perm) for u, perm in t.gluings[old]] for old in order
    ]
    signs = [t.orientation_signs[old] for old in order]
    eqs = [[CuspTerm(new_index[c.tet], c.a, c.b, c.c) for c in eq] for eq in t.cusp_equations]
    shapes = None if t.shapes is None else [t.shapes[old] for old in order]
    field_ = None
    if t.shape_field is not None:
        sf = t.shape_field
        field_ = ShapeField(sf.poly, sf.root, tuple(sf.shape_exprs[old] for old in order))
    return Triangulation(gluings, signs, eqs, shapes, field_, validate=validate)


def reverse_orientation(t: Triangulation) -> Triangulation:
    """Same triangulation with every orientation sign flipped."""
    return t.replace(orientation_signs=[-e for e in t.orientation_signs])


def all_face_permutations(f: int, g: int) -> list[tuple[int, ...]]:
    """All permutations of 0..3 taking face ``f`` to face ``g``."""
    return [p for p in permutations(range(4)) if p[f] == g]
