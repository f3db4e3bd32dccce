"""Complex volumes of boundary-parabolic representations from ordered ideal triangulations."""

from importlib import resources

from .bloch import (
    PreBlochElement,
    WedgeElement,
    check_flattening_condition,
    check_transfer,
    lhat_sum,
    nu_hat,
)
from .develop import (
    Decoration,
    EdgeLogC,
    develop,
    develop_cusp,
    edge_log_c,
    normalize_cosets,
    psi_flatten,
    psi_of_configuration,
)
from .errors import *  # noqa: F401,F403
from .numerics import (
    INFINITY,
    Flattening,
    cross_ratio,
    cross_ratio_parameters,
    dilog,
    lhat,
    principal_log,
    rogers_L,
)
from .solver import (
    GluingEquation,
    ShapeAssignment,
    edge_equations,
    shapes_from_field,
    solve,
)
from .triangulation import (
    Triangulation,
    check_ordering,
    cusp_link,
    edge_classes,
    parse,
)
from .volume import (
    ComplexVolume,
    complex_volume,
    conjugate_representation,
    reverse_orientation,
    run_invariant_suite,
)

__version__ = "0.1.0"

FIXTURES = ("five_two", "figure_eight")


def fixture_path(name: str):
    """Path of a bundled triangulation file (``five_two`` or ``figure_eight``)."""
    if name not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    return resources.files(__name__) / "data" / f"{name}.json"


def load_fixture(name: str) -> Triangulation:
    return parse(fixture_path(name).read_text(encoding="utf-8"))
