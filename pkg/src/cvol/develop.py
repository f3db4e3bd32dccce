"""Cusp development, decorations, long-edge labels and flattenings.

Developing a cusp lays its triangles out in the plane one at a time.  The
layout assigns to every corner ``(i; jk)`` of every tetrahedron a short-edge
label ``alpha^i_jk``: the vector from corner ``j`` to corner ``k`` of the
cusp triangle at vertex ``i``.  Long edges ``ij`` then get

    c(g_ij) = exp(-Log(alpha^i_kj * alpha^j_ik) / 2),

and the log-parameters of a simplex are signed sums of four ``Log c`` values.
"""

from __future__ import annotations

import cmath
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .bloch import PreBlochElement
from .errors import CocycleError, CosetError, DegenerateSimplexError, HolonomyError
from .numerics import (
    INFINITY,
    Flattening,
    cross_ratio,
    cross_ratio_parameters,
    ext_complex,
    principal_log,
)
from .triangulation import (
    EDGES,
    Triangulation,
    edge_parameter,
    permutation_sign,
    triangle_sides,
)

#: relative tolerance for matching a re-visited cusp triangle
REVISIT_TOL = 1e-7
#: relative tolerance for agreement of corner products on one edge class
COCYCLE_TOL = 1e-9

Base = tuple[int, int, int]


def corner_ratio(shape: complex, i: int, j: int, k: int, l: int) -> complex:
    """``alpha^i_jk / alpha^i_jl`` for a simplex with cross-ratio ``shape``."""
    param = cross_ratio_parameters(shape)[edge_parameter(i, j)]
    return param if permutation_sign((i, j, k, l)) == 1 else 1 / param


@dataclass(frozen=True)
class Decoration:
    """Developed corner positions of every cusp triangle.

    ``positions[(t, i)]`` maps each corner ``j != i`` to a point of the plane.
    Triangles of one cusp share a single developing plane; different cusps
    are developed independently.
    """

    positions: Mapping[tuple[int, int], Mapping[int, complex]]
    bases: Mapping[int, Base]
    #: largest relative mismatch seen on re-visited sides
    holonomy_residual: float = 0.0

    def alpha(self, t: int, i: int, j: int, k: int) -> complex:
        pos = self.positions[(t, i)]
        return pos[k] - pos[j]

    def edge_vectors(self, t: int, i: int) -> tuple[complex, complex, complex]:
        """Side vectors of the cusp triangle, in :func:`triangle_sides` order."""
        return tuple(self.alpha(t, i, a, b) for a, b in triangle_sides(i))

    def to_json(self) -> list[dict]:
        out = []
        for (t, i), pos in sorted(self.positions.items()):
            out.append(
                {
                    "tet": t,
                    "vertex": i,
                    "corners": {str(j): [z.real, z.imag] for j, z in sorted(pos.items())},
                }
            )
        return out


def default_base(t: Triangulation, cusp: int) -> Base:
    tri = min(t.cusps[cusp].triangles, key=lambda x: x.owner)
    return (tri.tet, tri.vertex, 0)


def develop_cusp(
    t: Triangulation,
    shapes: Sequence[complex],
    cusp: int,
    base: Base | None = None,
    tol: float = REVISIT_TOL,
) -> tuple[dict[tuple[int, int], dict[int, complex]], float]:
    """Lay out one cusp, base side on the segment from 0 to 1.

    Returns ``(positions, worst_mismatch)``.  Raises :class:`HolonomyError`
    when a re-visited side disagrees with its first placement by more than
    ``tol`` relative to the triangle size, i.e. when the holonomy is not a
    translation.
    """
    shapes = [complex(z) for z in shapes]
    tris = t.cusp_triangles
    if base is None:
        base = default_base(t, cusp)
    bt, bv, bs = base
    if (bt, bv) not in tris or t.cusp_of[(bt, bv)] != cusp or not 0 <= bs < 3:
        raise ValueError(f"base {base} is not a side of a triangle of cusp {cusp}")

    positions: dict[tuple[int, int], dict[int, complex]] = {}

    def place(key, a, b, pa, pb):
        tet, i = key
        c = next(x for x in range(4) if x not in (i, a, b))
        pc = pa + (pb - pa) * corner_ratio(shapes[tet], i, a, c, b)
        positions[key] = {a: pa, b: pb, c: pc}

    a, b = triangle_sides(bv)[bs]
    place((bt, bv), a, b, 0j, 1 + 0j)
    worst = 0.0
    queue = deque([(bt, bv)])
    while queue:
        key = queue.popleft()
        tet, i = key
        pos = positions[key]
        size = max(abs(pos[x] - pos[y]) for x, y in triangle_sides(i))
        for (a, b), (nb, _) in zip(triangle_sides(i), tris[key].neighbors):
            c = next(x for x in range(4) if x not in (i, a, b))
            _, perm = t.gluings[tet][c]
            na, nb_ = perm[a], perm[b]
            if nb not in positions:
                place(nb, na, nb_, pos[a], pos[b])
                queue.append(nb)
                continue
            other = positions[nb]
            mismatch = abs((other[nb_] - other[na]) - (pos[b] - pos[a])) / size
            worst = max(worst, mismatch)
            if mismatch > tol:
                raise HolonomyError(
                    f"cusp {cusp} does not close up at tetrahedron {tet} vertex {i}: "
                    f"relative mismatch {mismatch:.3e}; shapes do not give parabolic holonomy",
                    mismatch,
                )
    return positions, worst


def develop(
    t: Triangulation,
    shapes: Sequence[complex],
    base: Base | Mapping[int, Base] | None = None,
    tol: float = REVISIT_TOL,
) -> Decoration:
    """Develop every cusp.

    ``base`` is a single ``(tet, vertex, side)``, which applies to the cusp
    containing it, or a mapping from cusp index to base.  Cusps without a
    base start from their lexicographically smallest triangle, side 0.
    """
    if base is None:
        bases: dict[int, Base] = {}
    elif isinstance(base, Mapping):
        bases = dict(base)
    else:
        base = tuple(int(x) for x in base)
        if (base[0], base[1]) not in t.cusp_of:
            raise ValueError(f"base {base} is not a cusp triangle side")
        bases = {t.cusp_of[(base[0], base[1])]: base}
    positions: dict = {}
    used = {}
    worst = 0.0
    for cusp in range(len(t.cusps)):
        b = bases.get(cusp) or default_base(t, cusp)
        pos, w = develop_cusp(t, shapes, cusp, b, tol)
        positions.update(pos)
        used[cusp] = b
        worst = max(worst, w)
    return Decoration(positions, used, worst)


# -- long edges ----------------------------------------------------------------


@dataclass(frozen=True)
class EdgeLogC:
    edge_class: int
    c: complex
    log_c: complex
    #: the corner product alpha^i_kj * alpha^j_ik, equal to c**-2
    product: complex
    #: largest relative disagreement between corner products of the class
    spread: float


def corner_product(dec: Decoration, tet: int, i: int, j: int, k: int | None = None) -> complex:
    if k is None:
        k = next(x for x in range(4) if x not in (i, j))
    return dec.alpha(tet, i, k, j) * dec.alpha(tet, j, i, k)


def edge_log_c(t: Triangulation, dec: Decoration, tol: float = COCYCLE_TOL) -> list[EdgeLogC]:
    """Long-edge entries ``c`` per edge class, checked across all corners."""
    out = []
    for ec in t.edge_classes:
        products = []
        for tet, e, _ in ec.incidences:
            i, j = EDGES[e]
            for k in range(4):
                if k not in (i, j):
                    products.append(corner_product(dec, tet, i, j, k))
        ref = products[0]
        spread = max(abs(p - ref) for p in products) / abs(ref)
        if spread > tol:
            raise CocycleError(
                f"corner products around edge class {ec.index} disagree "
                f"(relative spread {spread:.3e})"
            )
        c = cmath.exp(-0.5 * principal_log(ref))
        out.append(EdgeLogC(ec.index, c, principal_log(c), ref, spread))
    return out


def log_parameters_from_log_c(lc: Mapping[tuple[int, int], complex]) -> tuple[complex, complex, complex]:
    """Log-parameters of a simplex from ``Log c`` of its six edges."""
    w0 = lc[(0, 3)] + lc[(1, 2)] - lc[(0, 2)] - lc[(1, 3)]
    w1 = lc[(0, 2)] + lc[(1, 3)] - lc[(0, 1)] - lc[(2, 3)]
    w2 = lc[(0, 1)] + lc[(2, 3)] - lc[(0, 3)] - lc[(1, 2)]
    return w0, w1, w2


@dataclass(frozen=True)
class PsiResult:
    element: PreBlochElement
    flattenings: tuple[Flattening, ...]
    log_parameters: tuple[tuple[complex, complex, complex], ...]


def psi_flatten(
    t: Triangulation, shapes: Sequence[complex], log_c: Sequence[EdgeLogC], tol: float = 1e-6
) -> PsiResult:
    """Flatten every simplex from the edge-class ``Log c`` values.

    Raises :class:`FlatteningError` if some ``p`` or ``q`` is not integral
    within ``tol``.
    """
    by_class = {x.edge_class: x.log_c for x in log_c}
    flats, logs = [], []
    for tet in range(t.n_tetrahedra):
        lc = {EDGES[e]: by_class[t.edge_class_of[(tet, e)]] for e in range(6)}
        w = log_parameters_from_log_c(lc)
        flats.append(Flattening.from_log_parameters(w[0], w[1], z=shapes[tet], tol=tol))
        logs.append(w)
    element = PreBlochElement.of(flats, t.orientation_signs)
    return PsiResult(element, tuple(flats), tuple(logs))


# -- point configurations --------------------------------------------------------


def _inv(g: np.ndarray) -> np.ndarray:
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    det = a * d - b * c
    return np.array([[d, -b], [-c, a]], dtype=complex) / det


def normalize_cosets(g, h, tol: float = 1e-12) -> tuple[complex, complex, complex]:
    """Coset adjustments making ``g^-1 h`` counter-diagonal.

    With ``g^-1 h = [[a, b], [c, d]]`` returns ``(p, q, c)`` with ``p = a/c``
    and ``q = -d/c``; then ``(g u(p))^-1 h u(q) = [[0, -1/c], [c, 0]]`` where
    ``u(x) = [[1, x], [0, 1]]``.
    """
    g = np.asarray(g, dtype=complex)
    h = np.asarray(h, dtype=complex)
    m = _inv(g) @ h
    a, c, d = m[0, 0], m[1, 0], m[1, 1]
    scale = max(1.0, float(np.max(np.abs(m))))
    if abs(c) <= tol * scale:
        raise CosetError("the two decorations lie in the same Borel coset (c = 0)")
    return complex(a / c), complex(-d / c), complex(c)


def matrix_fixed_point(g) -> complex | type(INFINITY):
    """``g . infinity``."""
    g = np.asarray(g, dtype=complex)
    if g[1, 0] == 0:
        return INFINITY
    return complex(g[0, 0] / g[1, 0])


def standard_decoration(point, scale: complex = 1, shear: complex = 0) -> np.ndarray:
    """A unit-determinant matrix sending infinity to ``point``.

    ``scale`` and ``shear`` choose the element of the Borel subgroup applied
    on the right, i.e. the horosphere at the point.
    """
    point = ext_complex(point)
    if point is INFINITY:
        g = np.eye(2, dtype=complex)
    else:
        g = np.array([[point, -1], [1, 0]], dtype=complex)
    b = np.array([[scale, shear], [0, 1 / scale]], dtype=complex)
    return g @ b


@dataclass(frozen=True)
class TruncatedSimplex:
    """Labels of a decorated ideal simplex built from matrices.

    ``alpha[(i, j, k)]`` are short-edge labels, ``c[(i, j)]`` (``i < j``) the
    lower-left entries of ``g_i^-1 g_j``.
    """

    points: tuple
    alpha: Mapping[tuple[int, int, int], complex]
    c: Mapping[tuple[int, int], complex]
    flattening: Flattening | None


def psi_of_configuration(points: Sequence, matrices: Sequence | None = None) -> TruncatedSimplex:
    """Labels of the truncated simplex of a decorated point configuration.

    ``matrices[i]`` must send infinity to ``points[i]``; by default the
    :func:`standard_decoration` is used.  For four points the flattening
    is returned as well.
    """
    pts = tuple(ext_complex(p) for p in points)
    n = len(pts)
    if n < 2:
        raise ValueError("need at least two points")
    if matrices is None:
        matrices = [standard_decoration(p) for p in pts]
    gs = [np.asarray(g, dtype=complex) for g in matrices]
    if len(gs) != n:
        raise ValueError("need one decorating matrix per point")
    for i, (p, g) in enumerate(zip(pts, gs)):
        fp = matrix_fixed_point(g)
        if (fp is INFINITY) != (p is INFINITY) or (
            p is not INFINITY and abs(fp - p) > 1e-9 * max(1.0, abs(p))
        ):
            raise ValueError(f"matrix {i} does not send infinity to point {i}")
    for i in range(n):
        for j in range(i + 1, n):
            if pts[i] == pts[j]:
                raise DegenerateSimplexError(f"points {i} and {j} coincide")

    pmat: dict[tuple[int, int], complex] = {}
    cmat: dict[tuple[int, int], complex] = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                p, _, c = normalize_cosets(gs[i], gs[j])
                pmat[(i, j)] = p
                if i < j:
                    cmat[(i, j)] = c
    alpha = {
        (i, j, k): pmat[(i, k)] - pmat[(i, j)]
        for i in range(n)
        for j in range(n)
        for k in range(n)
        if len({i, j, k}) == 3
    }
    flat = None
    if n == 4:
        lc = {}
        for i, j in EDGES:
            k = next(x for x in range(4) if x not in (i, j))
            lc[(i, j)] = principal_log(cmath.exp(-0.5 * principal_log(alpha[(i, k, j)] * alpha[(j, i, k)])))
        w = log_parameters_from_log_c(lc)
        flat = Flattening.from_log_parameters(w[0], w[1], z=cross_ratio(*pts))
    return TruncatedSimplex(pts, alpha, cmat, flat)


def random_decorated_points(rng: np.random.Generator, n: int = 5) -> tuple[list[complex], list[np.ndarray]]:
    """``n`` random points with random horospheres (unit-determinant matrices)."""
    points = [complex(x, y) for x, y in rng.standard_normal((n, 2))]
    mats = []
    for p in points:
        scale = complex(*rng.standard_normal(2))
        while abs(scale) < 0.1:
            scale = complex(*rng.standard_normal(2))
        shear = complex(*rng.standard_normal(2))
        mats.append(standard_decoration(p, scale, shear))
    return points, mats


def five_term_flattenings(points: Sequence, matrices: Sequence) -> list[Flattening]:
    """Flattenings of the five faces of a decorated 4-simplex; face ``i`` omits point ``i``."""
    if len(points) != 5 or len(matrices) != 5:
        raise ValueError("need five points and five matrices")
    out = []
    for i in range(5):
        idx = [j for j in range(5) if j != i]
        sub = psi_of_configuration([points[j] for j in idx], [matrices[j] for j in idx])
        out.append(sub.flattening)
    return out
