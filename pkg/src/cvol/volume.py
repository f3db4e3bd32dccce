"""Complex volume of a triangulation with shapes, and the invariant suite."""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from . import triangulation as tri
from .bloch import (
    PreBlochElement,
    check_flattening_condition,
    check_transfer,
    lhat_sum,
)
from .develop import (
    Base,
    Decoration,
    EdgeLogC,
    develop,
    edge_log_c,
    five_term_flattenings,
    psi_flatten,
    random_decorated_points,
)
from .errors import CvolError, EquationError, InvariantError
from .numerics import (
    PI2,
    PI_I,
    Flattening,
    centered_mod_pi2,
    cross_ratio_parameters,
    distance_mod_pi2,
    lhat,
    principal_log,
)
from .solver import (
    ACCEPT_TOL,
    ShapeAssignment,
    all_equations,
    multiplicative_residuals,
    shapes_from_field,
    solve,
)
from .triangulation import EDGE_PARAMETER, Triangulation

#: tolerance for the invariant checks run inside the pipeline
INVARIANT_TOL = 1e-8


@dataclass(frozen=True)
class ComplexVolume:
    """``Vol + i CS`` with ``i (Vol + i CS) = raw`` modulo ``pi^2``.

    ``cs`` is the representative in ``(-pi^2/2, pi^2/2]``.
    """

    vol: float
    cs: float
    raw: complex

    @classmethod
    def from_raw(cls, raw: complex) -> "ComplexVolume":
        # adding 0.0 turns a negative zero into +0.0
        return cls(raw.imag + 0.0, centered_mod_pi2(-raw.real) + 0.0, raw)

    @property
    def cs_normalized(self) -> float:
        """``cs / (2 pi^2)`` reduced to ``[0, 1/2)``."""
        return (self.cs / (2 * PI2)) % 0.5

    def __str__(self):
        return f"{self.vol:.15f} + {self.cs:.15f} i"


@dataclass
class VolumeResult:
    triangulation: Triangulation
    shapes: tuple[complex, ...]
    volume: ComplexVolume
    element: PreBlochElement
    flattenings: tuple[Flattening, ...]
    log_parameters: tuple[tuple[complex, complex, complex], ...]
    decoration: Decoration
    log_c: list[EdgeLogC]
    diagnostics: dict[str, float] = field(default_factory=dict)

    @property
    def vol(self) -> float:
        return self.volume.vol

    @property
    def cs(self) -> float:
        return self.volume.cs

    def to_json(self) -> dict[str, Any]:
        return {
            "vol": self.volume.vol,
            "cs_mod_pi2": self.volume.cs,
            "flattenings": [
                {"z": [f.z.real, f.z.imag], "p": f.p, "q": f.q} for f in self.flattenings
            ],
            "residuals": dict(self.diagnostics),
        }


# -- individual invariant residuals --------------------------------------------


def alphacr_residual(t: Triangulation, shapes: Sequence[complex], dec: Decoration) -> float:
    """Worst relative deviation of the four corner ratios from the shape."""
    worst = 0.0
    for tet, z in enumerate(shapes):
        a = lambda i, j, k: dec.alpha(tet, i, j, k)  # noqa: E731
        ratios = (
            a(0, 1, 2) / a(0, 1, 3),
            a(1, 0, 3) / a(1, 0, 2),
            a(2, 3, 0) / a(2, 3, 1),
            a(3, 2, 1) / a(3, 2, 0),
        )
        worst = max(worst, max(abs(r - z) for r in ratios) / max(1.0, abs(z)))
    return worst


def sign_relation_residual(shapes: Sequence[complex], log_params) -> float:
    """Worst ``|exp(w_k) -+ param_k|`` over all simplices."""
    worst = 0.0
    for z, w in zip(shapes, log_params):
        for wk, param in zip(w, cross_ratio_parameters(z)):
            e = cmath.exp(wk)
            worst = max(worst, min(abs(e - param), abs(e + param)) / max(1.0, abs(param)))
    return worst


def integrality_residual(shapes: Sequence[complex], log_params) -> float:
    """Worst distance of ``p`` and ``q`` from integers before rounding."""
    worst = 0.0
    for z, (w0, w1, _) in zip(shapes, log_params):
        p = ((w0 - principal_log(z)) / PI_I)
        q = ((w1 + principal_log(1 - z)) / PI_I)
        for v in (p, q):
            worst = max(worst, abs(v - round(v.real)))
    return worst


def semi_strong_residual(t: Triangulation, log_params) -> float:
    """Worst ``|sum eps * w|`` around an edge class."""
    worst = 0.0
    for ec in t.edge_classes:
        total = sum(
            t.orientation_signs[tet] * log_params[tet][EDGE_PARAMETER[e]]
            for tet, e, _ in ec.incidences
        )
        worst = max(worst, abs(total))
    return worst


def _enforce(name: str, value: float, tol: float) -> None:
    if not value < tol:
        raise InvariantError(name, value, tol)


# -- pipeline ---------------------------------------------------------------------


def complex_volume(
    t: Triangulation,
    shapes: ShapeAssignment | Sequence[complex],
    base: Base | Mapping[int, Base] | None = None,
    tol: float = INVARIANT_TOL,
) -> VolumeResult:
    """Develop, flatten and sum ``L^`` over the fundamental class.

    Fails closed: shapes violating the gluing equations raise
    :class:`EquationError`, stage failures raise their own error class and any
    post-hoc invariant above ``tol`` raises :class:`InvariantError`.
    """
    z = tuple(complex(x) for x in shapes)
    if len(z) != t.n_tetrahedra:
        raise EquationError(f"got {len(z)} shapes for {t.n_tetrahedra} tetrahedra")
    gluing = max(multiplicative_residuals(all_equations(t), z), default=0.0)
    if not gluing < ACCEPT_TOL:
        raise EquationError(
            f"shapes violate the gluing equations (residual {gluing:.3e})", gluing
        )
    dec = develop(t, z, base)
    lc = edge_log_c(t, dec)
    psi = psi_flatten(t, z, lc)

    diag = {
        "gluing": gluing,
        "holonomy": dec.holonomy_residual,
        "alphacr": alphacr_residual(t, z, dec),
        "c_consistency": max((x.spread for x in lc), default=0.0),
        "sign_relations": sign_relation_residual(z, psi.log_parameters),
        "integrality": integrality_residual(z, psi.log_parameters),
        "semi_strong": semi_strong_residual(t, psi.log_parameters),
    }
    for name in ("alphacr", "c_consistency", "sign_relations", "integrality", "semi_strong"):
        _enforce(name, diag[name], tol)

    raw = lhat_sum(psi.element)
    return VolumeResult(
        t, z, ComplexVolume.from_raw(raw), psi.element, psi.flattenings,
        psi.log_parameters, dec, lc, diag,
    )


def conjugate_representation(result: VolumeResult) -> VolumeResult:
    """Re-run the pipeline on the complex-conjugate shapes."""
    return complex_volume(result.triangulation, [z.conjugate() for z in result.shapes])


def reverse_orientation(result: VolumeResult) -> VolumeResult:
    """Re-run the pipeline with every orientation sign flipped."""
    return complex_volume(tri.reverse_orientation(result.triangulation), result.shapes)


def default_shapes(t: Triangulation) -> ShapeAssignment:
    """Shapes from the field description if present, else from the given shapes, else Newton."""
    if t.shape_field is not None:
        return shapes_from_field(t)
    if t.shapes is not None:
        return solve(t, seed=t.shapes)
    return solve(t)


def base_sides(t: Triangulation, count: int) -> list[Base]:
    """``count`` distinct base sides spread over the first cusp."""
    sides = [
        (tr.tet, tr.vertex, s) for tr in t.cusps[0].triangles for s in range(3)
    ]
    if count >= len(sides):
        return sides
    step = len(sides) / count
    return [sides[int(k * step)] for k in range(count)]


def decoration_independence(
    t: Triangulation, shapes: Sequence[complex], bases: Sequence[Base]
) -> tuple[float, bool, list[VolumeResult]]:
    """Spread of ``L^`` sums over bases and whether some flattening changed."""
    results = [complex_volume(t, shapes, b) for b in bases]
    ref = results[0].volume.raw
    spread = 0.0
    for r in results[1:]:
        spread = max(spread, distance_mod_pi2(r.volume.raw.real, ref.real), abs(r.volume.raw.imag - ref.imag))
    pq = {tuple((f.p, f.q) for f in r.flattenings) for r in results}
    return spread, len(pq) > 1, results


def five_term_residuals(rng: np.random.Generator) -> tuple[float, float]:
    """One random decorated 5-point configuration.

    Returns the worst ten-equation residual and the distance of the
    alternating ``L^`` sum from ``pi^2 Z``.
    """
    points, mats = random_decorated_points(rng, 5)
    flats = five_term_flattenings(points, mats)
    _, res = check_flattening_condition(flats, points)
    total = sum((-1) ** i * lhat(f) for i, f in enumerate(flats))
    return max(res.values()), max(distance_mod_pi2(total.real, 0.0), abs(total.imag))


def transfer_residual(rng: np.random.Generator, samples: int) -> int:
    """Number of failing transfer-relation instances."""
    fails = 0
    for _ in range(samples):
        z = complex(*rng.standard_normal(2)) * 2
        p, q, p2, q2 = (int(x) for x in rng.integers(-4, 5, size=4))
        if not check_transfer(z, p, q, p2, q2):
            fails += 1
    return fails


# -- suite ----------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool | None
    residual: float | None = None
    tolerance: float | None = None
    detail: str = ""

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": "skipped" if self.passed is None else ("pass" if self.passed else "fail"),
            "residual": self.residual,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass
class SuiteReport:
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> CheckResult | None:
        return next((c for c in self.checks if c.passed is False), None)

    def to_json(self) -> dict[str, Any]:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def _coerce(data) -> tuple[Triangulation | None, CheckResult]:
    if isinstance(data, Triangulation):
        t = data
    else:
        try:
            if isinstance(data, str):
                t = tri.parse(data, validate=False)
            else:
                t = tri.from_dict(data, validate=False)
        except CvolError as exc:
            return None, CheckResult("structure", False, detail=f"{type(exc).__name__}: {exc}")
    return t, CheckResult("structure", True)


def run_invariant_suite(
    data: Triangulation | str | Mapping,
    shapes: Sequence[complex] | None = None,
    *,
    bases: int = 5,
    five_term_samples: int = 50,
    transfer_samples: int = 1000,
    rng_seed: int = 0,
    tol: float = INVARIANT_TOL,
) -> SuiteReport:
    """Run every invariant check and collect a pass/fail report.

    ``data`` is a triangulation, its JSON text or its decoded JSON.  Checks
    after the first failure that they depend on are reported as skipped.
    """
    checks: list[CheckResult] = []
    t, structure = _coerce(data)
    checks.append(structure)

    def skip(*names):
        for n in names:
            checks.append(CheckResult(n, None, detail="skipped after an earlier failure"))

    later = (
        "gluing", "holonomy", "alphacr", "c_consistency", "sign_relations",
        "integrality", "semi_strong", "decoration_independence",
    )
    if t is None:
        skip("ordering", "orientation", "cusps", *later)
    else:
        ok, bad = tri.check_ordering(t)
        checks.append(CheckResult("ordering", ok, float(len(bad)), 0.0, "" if ok else f"offending faces {bad}"))
        bad = tri.orientation_violations(t)
        checks.append(CheckResult("orientation", not bad, float(len(bad)), 0.0, "" if not bad else f"offending faces {bad}"))
        chis = [c.euler_characteristic for c in t.cusps]
        cusp_ok = all(x <= 0 for x in chis)
        checks.append(CheckResult("cusps", cusp_ok, None, None, f"euler characteristics {chis}"))
        if not all(c.passed for c in checks):
            skip(*later)
        else:
            _pipeline_checks(t, shapes, checks, bases, tol, skip)

    rng = np.random.default_rng(rng_seed)
    worst_ten, worst_sum = 0.0, 0.0
    for _ in range(five_term_samples):
        a, b = five_term_residuals(rng)
        worst_ten, worst_sum = max(worst_ten, a), max(worst_sum, b)
    checks.append(CheckResult("five_term_ten_equations", worst_ten < tol, worst_ten, tol, f"{five_term_samples} samples"))
    checks.append(CheckResult("five_term_lhat", worst_sum < tol, worst_sum, tol, f"{five_term_samples} samples"))
    fails = transfer_residual(rng, transfer_samples)
    checks.append(CheckResult("transfer", fails == 0, float(fails), 0.0, f"{transfer_samples} samples"))
    return SuiteReport(checks)


def _pipeline_checks(t, shapes, checks, n_bases, tol, skip):
    try:
        z = tuple(default_shapes(t)) if shapes is None else tuple(complex(x) for x in shapes)
    except CvolError as exc:
        checks.append(CheckResult("gluing", False, getattr(exc, "residual", None), ACCEPT_TOL, str(exc)))
        skip("holonomy", "alphacr", "c_consistency", "sign_relations", "integrality", "semi_strong", "decoration_independence")
        return
    gluing = max(multiplicative_residuals(all_equations(t), z), default=0.0)
    checks.append(CheckResult("gluing", gluing < ACCEPT_TOL, gluing, ACCEPT_TOL))
    if gluing >= ACCEPT_TOL:
        skip("holonomy", "alphacr", "c_consistency", "sign_relations", "integrality", "semi_strong", "decoration_independence")
        return
    try:
        result = complex_volume(t, z, tol=math.inf)
    except CvolError as exc:
        checks.append(CheckResult("pipeline", False, getattr(exc, "residual", None), tol, f"{type(exc).__name__}: {exc}"))
        skip("decoration_independence")
        return
    d = result.diagnostics
    checks.append(CheckResult("holonomy", d["holonomy"] < tol, d["holonomy"], tol))
    for name in ("alphacr", "c_consistency", "sign_relations", "integrality", "semi_strong"):
        checks.append(CheckResult(name, d[name] < tol, d[name], tol))
    try:
        spread, changed, _ = decoration_independence(t, z, base_sides(t, n_bases))
        checks.append(
            CheckResult(
                "decoration_independence", spread < tol, spread, tol,
                f"{n_bases} bases; individual flattenings {'differ' if changed else 'agree'}",
            )
        )
    except CvolError as exc:
        checks.append(CheckResult("decoration_independence", False, None, tol, str(exc)))


def report_json(report: SuiteReport) -> str:
    return json.dumps(report.to_json(), indent=2)
