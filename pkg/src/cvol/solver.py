"""Gluing equations and their numerical solution.

An equation is a product of cross-ratio parameters, with per-tetrahedron
integer exponents ``(a, b, c)`` of ``(z, z', z'')``, required to equal 1.
Using ``z' = 1/(1-z)`` and ``z'' = -(1-z)/z`` this becomes

    sum_t (a-c) Log z_t + (c-b) Log(1-z_t) + c*pi*i  in  2*pi*i*Z,

which is the form Newton's method works with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSolutionError,
    EquationError,
    FieldError,
    SolverError,
)
from .numerics import PI_I, SOLVER_TOL, cross_ratio_parameters, principal_log
from .triangulation import EDGE_PARAMETER, ShapeField, Triangulation

DEFAULT_SEED = complex(0.5, math.sqrt(3) / 2)
#: multiplicative residual accepted by :func:`verify_shapes`
ACCEPT_TOL = 1e-9
_DEGENERATE = 1e-8
_STALL = 1e-6


@dataclass(frozen=True)
class GluingEquation:
    """``prod_t z_t^a z_t'^b z_t''^c = target``; ``exponents[t] = (a, b, c)``.

    ``target`` is 1 for edge and cusp equations; other values are only
    useful for building deliberately inconsistent test data.
    """

    exponents: tuple[tuple[int, int, int], ...]
    kind: str = "edge"
    label: str = ""
    target: complex = 1

    @property
    def n_tetrahedra(self) -> int:
        return len(self.exponents)

    def degree(self) -> int:
        return sum(abs(a) + abs(b) + abs(c) for a, b, c in self.exponents)

    def rectangular(self) -> tuple[list[int], list[int], int]:
        """Exponents ``A, B`` of ``z, 1-z`` and the sign count ``sum c``."""
        A = [a - c for a, b, c in self.exponents]
        B = [c - b for a, b, c in self.exponents]
        return A, B, sum(c for _, _, c in self.exponents)

    def product(self, shapes: Sequence[complex]) -> complex:
        out = 1 + 0j
        for z, (a, b, c) in zip(shapes, self.exponents):
            params = cross_ratio_parameters(z)
            out *= params[0] ** a * params[1] ** b * params[2] ** c
        return out / self.target

    def log_form(self, shapes: Sequence[complex]) -> complex:
        A, B, C = self.rectangular()
        total = C * PI_I - principal_log(self.target)
        for z, a, b in zip(shapes, A, B):
            if a:
                total += a * principal_log(z)
            if b:
                total += b * principal_log(1 - z)
        return total

    def log_residual(self, shapes: Sequence[complex]) -> complex:
        """Log-form value reduced modulo ``2*pi*i``."""
        v = self.log_form(shapes)
        k = round(v.imag / (2 * math.pi))
        return v - 2 * k * PI_I


def edge_equations(t: Triangulation) -> list[GluingEquation]:
    """One equation per edge class; a corner contributes its parameter with exponent eps_t."""
    out = []
    for ec in t.edge_classes:
        exps = [[0, 0, 0] for _ in range(t.n_tetrahedra)]
        for tet, e, _ in ec.incidences:
            exps[tet][EDGE_PARAMETER[e]] += t.orientation_signs[tet]
        out.append(GluingEquation(tuple(map(tuple, exps)), "edge", f"edge {ec.index}"))
    return out


def cusp_equations(t: Triangulation) -> list[GluingEquation]:
    out = []
    for k, eq in enumerate(t.cusp_equations):
        exps = [[0, 0, 0] for _ in range(t.n_tetrahedra)]
        for term in eq:
            exps[term.tet][0] += term.a
            exps[term.tet][1] += term.b
            exps[term.tet][2] += term.c
        out.append(GluingEquation(tuple(map(tuple, exps)), "cusp", f"cusp {k}"))
    return out


def all_equations(t: Triangulation) -> list[GluingEquation]:
    return edge_equations(t) + cusp_equations(t)


def with_target(eq: GluingEquation, target: complex) -> GluingEquation:
    return GluingEquation(eq.exponents, eq.kind, eq.label, complex(target))


@dataclass(frozen=True)
class ShapeAssignment:
    z: tuple[complex, ...]
    residuals: tuple[float, ...] = ()
    iterations: int = 0
    method: str = "given"

    def __len__(self):
        return len(self.z)

    def __iter__(self):
        return iter(self.z)

    def __getitem__(self, i):
        return self.z[i]

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def conjugate(self) -> "ShapeAssignment":
        return ShapeAssignment(
            tuple(z.conjugate() for z in self.z), self.residuals, 0, self.method + "+conjugate"
        )


def _is_degenerate(z: complex, eps: float = _DEGENERATE) -> bool:
    return abs(z) < eps or abs(1 - z) < eps or abs(z) > 1 / eps


def _residual_vector(eqs, z) -> np.ndarray:
    return np.array([eq.log_residual(z) for eq in eqs], dtype=complex)


def _jacobian(rects, z) -> np.ndarray:
    # d/dz of A Log z + B Log(1-z)
    J = np.zeros((len(rects), len(z)), dtype=complex)
    for i, (A, B, _) in enumerate(rects):
        for j, zj in enumerate(z):
            J[i, j] = A[j] / zj - B[j] / (1 - zj)
    return J


def jacobian(equations: Sequence[GluingEquation], shapes: Sequence[complex]) -> np.ndarray:
    """Jacobian of the log-form equations with respect to ``Log z``."""
    z = list(shapes)
    J = _jacobian([eq.rectangular() for eq in equations], z)
    return J * np.array(z)[None, :]


def jacobian_rank(equations: Sequence[GluingEquation], shapes: Sequence[complex], tol: float = 1e-8) -> int:
    return int(np.linalg.matrix_rank(jacobian(equations, shapes), tol=tol))


def multiplicative_residuals(equations: Sequence[GluingEquation], shapes: Sequence[complex]) -> list[float]:
    return [abs(eq.product(shapes) - 1) for eq in equations]


def _newton(eqs, rects, z0, max_iter, tol):
    z = np.array(z0, dtype=complex)
    r = _residual_vector(eqs, z)
    norm = float(np.max(np.abs(r))) if len(r) else 0.0
    it = 0
    while norm >= tol and it < max_iter:
        it += 1
        J = _jacobian(rects, z)
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        lam = 1.0
        while True:
            trial = z + lam * step
            if not any(_is_degenerate(complex(x)) for x in trial):
                rt = _residual_vector(eqs, trial)
                nt = float(np.max(np.abs(rt)))
                if nt < norm or lam < 1e-6:
                    break
            elif lam < 1e-6:
                return z, norm, it
            lam *= 0.5
        z, r, norm = trial, rt, nt
    return z, norm, it


def solve(
    t: Triangulation,
    equations: Sequence[GluingEquation] | None = None,
    seed: Sequence[complex] | None = None,
    *,
    max_iter: int = 100,
    restarts: int = 10,
    tol: float = SOLVER_TOL,
) -> ShapeAssignment:
    """Solve the gluing equations by damped least-squares Newton iteration.

    Without a seed every shape starts at ``(1 + i sqrt 3)/2`` (its conjugate
    for tetrahedra with orientation sign -1).  If that does
    not converge, up to ``restarts`` further attempts start from the seed
    perturbed by a fixed pseudo-random sequence, so results are reproducible.
    """
    if equations is None:
        if not t.cusp_equations:
            raise SolverError("triangulation has no cusp equations; supply them in the input file")
        equations = all_equations(t)
    eqs = list(equations)
    rects = [eq.rectangular() for eq in eqs]
    n = t.n_tetrahedra
    if seed is None:
        # positively oriented in the manifold: conjugate seed where eps = -1
        base = np.array(
            [DEFAULT_SEED if e == 1 else DEFAULT_SEED.conjugate() for e in t.orientation_signs]
        )
    else:
        base = np.array(list(seed), dtype=complex)
    if len(base) != n:
        raise SolverError(f"seed has {len(base)} shapes, expected {n}")

    rng = np.random.default_rng(20240229)
    best = (math.inf, None)
    degenerate_hit = False
    for attempt in range(restarts + 1):
        if attempt == 0:
            z0 = base
        else:
            z0 = base + 0.5 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        z, norm, it = _newton(eqs, rects, z0, max_iter, tol)
        # a stall next to 0, 1 or infinity means the iteration was heading there
        near = _DEGENERATE if norm < tol else _STALL
        if any(_is_degenerate(complex(x), near) for x in z):
            degenerate_hit = True
            continue
        if norm < best[0]:
            best = (norm, z)
        if norm < tol:
            shapes = tuple(complex(x) for x in z)
            res = tuple(abs(eq.log_residual(shapes)) for eq in eqs)
            return ShapeAssignment(shapes, res, it, "newton" if attempt == 0 else f"newton-restart-{attempt}")
    if best[1] is None and degenerate_hit:
        raise DegenerateSolutionError("Newton iteration converged to a degenerate shape", None)
    raise SolverError(
        f"Newton iteration did not converge after {restarts} restarts", best[0]
    )


# -- number-field shapes -----------------------------------------------------


def _horner(coeffs_ascending: Sequence[int], x: complex) -> complex:
    out = 0j
    for c in reversed(coeffs_ascending):
        out = out * x + c
    return out


def refine_root(poly: Sequence[int], approx: complex) -> tuple[complex, list[complex]]:
    """Pick the root of ``poly`` nearest ``approx`` and polish it by Newton.

    Returns ``(root, all_roots)``.  Raises :class:`FieldError` when the
    approximation does not clearly single out one root.
    """
    coeffs = list(poly)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise FieldError("polynomial must have positive degree")
    roots = [complex(r) for r in np.roots(coeffs[::-1])]
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < 1e-8:
                raise FieldError("polynomial is not square-free")
    order = sorted(range(len(roots)), key=lambda i: abs(roots[i] - approx))
    x = roots[order[0]]
    if len(roots) > 1:
        d1, d2 = abs(x - approx), abs(roots[order[1]] - approx)
        if 2 * d1 >= d2:
            raise FieldError(
                f"root approximation {approx} is ambiguous between {x} and {roots[order[1]]}"
            )
    deriv = [k * c for k, c in enumerate(coeffs)][1:]
    for _ in range(50):
        f, df = _horner(coeffs, x), _horner(deriv, x)
        if df == 0:
            break
        dx = f / df
        x -= dx
        if abs(dx) <= 1e-17 * max(1.0, abs(x)):
            break
    # a real root stays real
    if abs(x.imag) < 1e-14 * max(1.0, abs(x)) and abs(approx.imag) < abs(x - approx) + 1e-6:
        x = complex(x.real, 0.0)
    return x, roots


def verify_shapes(
    equations: Sequence[GluingEquation], shapes: Sequence[complex], tol: float = ACCEPT_TOL
) -> list[float]:
    for z in shapes:
        if _is_degenerate(z):
            raise DegenerateSolutionError(f"degenerate shape {z}")
    res = multiplicative_residuals(equations, shapes)
    worst = max(res, default=0.0)
    if worst >= tol:
        raise EquationError(f"shapes violate the gluing equations (residual {worst:.3e})", worst)
    return res


def shapes_from_field(
    t: Triangulation, field: ShapeField | None = None, root: complex | int | None = None
) -> ShapeAssignment:
    """Evaluate exact shapes at a chosen root of the field polynomial.

    ``root`` is either an approximation of the root or an index into the
    roots ordered as returned by ``numpy.roots``; by default the field's own
    approximation is used.
    """
    field = field or t.shape_field
    if field is None:
        raise FieldError("triangulation has no shape_field")
    if len(field.shape_exprs) != t.n_tetrahedra:
        raise FieldError("need one shape expression per tetrahedron")
    if isinstance(root, int) and not isinstance(root, bool):
        _, roots = refine_root(field.poly, field.root)
        if not 0 <= root < len(roots):
            raise FieldError(f"root index {root} out of range")
        approx = roots[root]
    else:
        approx = field.root if root is None else complex(root)
    x, _ = refine_root(field.poly, approx)
    shapes = []
    for expr in field.shape_exprs:
        z = _horner(expr, x)
        if x.imag == 0.0:
            z = complex(z.real, 0.0)
        shapes.append(z)
    eqs = all_equations(t)
    res = verify_shapes(eqs, shapes)
    return ShapeAssignment(tuple(shapes), tuple(res), 0, "field")


def shapes_from_values(t: Triangulation, shapes: Sequence[complex], verify: bool = True) -> ShapeAssignment:
    shapes = tuple(complex(z) for z in shapes)
    if len(shapes) != t.n_tetrahedra:
        raise SolverError(f"got {len(shapes)} shapes, expected {t.n_tetrahedra}")
    res: tuple = ()
    if verify:
        res = tuple(verify_shapes(all_equations(t), shapes))
    return ShapeAssignment(shapes, res, 0, "given")
