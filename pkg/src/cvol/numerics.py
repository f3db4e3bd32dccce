"""Complex special functions on the principal logarithm branch.

Everything here works with binary64 complex numbers.  The logarithm branch is
fixed once and for all to the principal one, with imaginary part in
``(-pi, pi]``; every other function (dilogarithm, Rogers ``L``, the extended
``L``-hat) is defined relative to that choice.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

from .errors import DegenerateSimplexError, DomainError, FlatteningError

PI = math.pi
PI_I = complex(0.0, math.pi)
PI2 = math.pi * math.pi

#: tolerance used for invariant assertions
TOL = 1e-9
#: tolerance used for solver residuals
SOLVER_TOL = 1e-12


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("cvol.INFINITY")

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

ExtComplex = Union[complex, _Infinity]


def is_infinite(z) -> bool:
    return z is INFINITY


def ext_complex(z) -> ExtComplex:
    """Coerce ``z`` to an :data:`ExtComplex`, rejecting NaN."""
    if z is INFINITY:
        return z
    w = complex(z)
    if math.isnan(w.real) or math.isnan(w.imag):
        raise DomainError("NaN is not a point of the Riemann sphere")
    if math.isinf(w.real) or math.isinf(w.imag):
        raise DomainError("use INFINITY for the point at infinity, not a float inf")
    return w


def _clean(z: complex) -> complex:
    # negative zero in the imaginary part would put -1 on the wrong side of the cut
    if z.imag == 0.0:
        return complex(z.real, 0.0)
    return z


def principal_log(z) -> complex:
    """Principal logarithm, imaginary part in ``(-pi, pi]``."""
    if z is INFINITY:
        raise DomainError("log of infinity")
    z = complex(z)
    if z == 0:
        raise DomainError("log of zero")
    return cmath.log(_clean(z))


# Bernoulli numbers B_0..B_36 with B_1 = -1/2, used in the series
# Li2(z) = sum_n B_n u^(n+1)/(n+1)!,  u = -log(1-z).
_BERNOULLI = [
    1.0, -0.5, 1 / 6, 0.0, -1 / 30, 0.0, 1 / 42, 0.0, -1 / 30, 0.0, 5 / 66, 0.0,
    -691 / 2730, 0.0, 7 / 6, 0.0, -3617 / 510, 0.0, 43867 / 798, 0.0,
    -174611 / 330, 0.0, 854513 / 138, 0.0, -236364091 / 2730, 0.0,
    8553103 / 6, 0.0, -23749461029 / 870, 0.0, 8615841276005 / 14322, 0.0,
    -7709321041217 / 510, 0.0, 2577687858367 / 6, 0.0, -26315271553053477373 / 1919190,
]
_LI2_COEFFS = [b / math.factorial(n + 1) for n, b in enumerate(_BERNOULLI)]


def _li2_bernoulli(z: complex) -> complex:
    # valid for |z| <= 1, Re z <= 1/2, where |u| stays well inside radius 2*pi
    u = -principal_log(1 - z)
    u2 = u * u
    total = u + _LI2_COEFFS[1] * u2
    term = u
    for n in range(2, len(_LI2_COEFFS), 2):
        term = term * u2
        inc = _LI2_COEFFS[n] * term
        total += inc
        if abs(inc) < 1e-17 * abs(total):
            break
    return total


def _li2_series(z: complex) -> complex:
    # plain power series, used for |z| <= 1/2
    total = 0j
    zk = z
    for k in range(1, 200):
        inc = zk / (k * k)
        total += inc
        if abs(inc) < 1e-17 * max(abs(total), 1e-300):
            break
        zk *= z
    return total


def dilog(z) -> complex:
    """Principal dilogarithm ``Li2(z) = -int_0^z Log(1-t)/t dt``.

    The integral runs along the straight segment from 0 to ``z`` with the
    principal logarithm, so on the cut ``(1, inf)`` the value is the limit
    from below the real axis: ``Im Li2(x) = -pi log x`` for ``x > 1``.
    """
    if z is INFINITY:
        raise DomainError("dilogarithm at infinity")
    z = _clean(complex(z))
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2 / 6, 0.0)
    if abs(z) <= 0.5:
        return _li2_series(z)
    if abs(z) > 1:
        # inversion: Li2(z) + Li2(1/z) = -pi^2/6 - Log(-z)^2 / 2
        lm = principal_log(_clean(-z))
        return -PI2 / 6 - 0.5 * lm * lm - _reduced_dilog(_clean(1 / z))
    return _reduced_dilog(z)


def _reduced_dilog(z: complex) -> complex:
    # |z| <= 1 from here on
    if abs(z) <= 0.5:
        return _li2_series(z)
    if z.real > 0.5:
        # reflection: Li2(z) + Li2(1-z) = pi^2/6 - Log z Log(1-z)
        w = _clean(1 - z)
        if w == 0:
            return complex(PI2 / 6, 0.0)
        return PI2 / 6 - principal_log(z) * principal_log(w) - _li2_bernoulli(w)
    return _li2_bernoulli(z)


def _check_generic(z, what: str) -> complex:
    if z is INFINITY:
        raise DomainError(f"{what} is undefined at infinity")
    z = complex(z)
    if z == 0 or z == 1:
        raise DomainError(f"{what} is undefined at {z}")
    if math.isnan(z.real) or math.isnan(z.imag):
        raise DomainError(f"{what} got NaN")
    return _clean(z)


def rogers_L(z) -> complex:
    """Rogers dilogarithm ``L(z) = Li2(z) + Log(z) Log(1-z) / 2``."""
    z = _check_generic(z, "Rogers dilogarithm")
    return dilog(z) + 0.5 * principal_log(z) * principal_log(_clean(1 - z))


def cross_ratio_parameters(z) -> tuple[complex, complex, complex]:
    """Return ``(z, 1/(1-z), 1 - 1/z)``."""
    z = _check_generic(z, "cross-ratio parameters")
    return z, 1 / (1 - z), 1 - 1 / z


def cross_ratio(z0, z1, z2, z3) -> complex:
    """Cross-ratio ``(z0-z3)(z1-z2) / ((z0-z2)(z1-z3))`` on the Riemann sphere.

    At most one argument may be :data:`INFINITY`; the factors containing it
    cancel symbolically.
    """
    pts = [ext_complex(p) for p in (z0, z1, z2, z3)]
    for i in range(4):
        for j in range(i + 1, 4):
            a, b = pts[i], pts[j]
            if a is INFINITY and b is INFINITY:
                raise DegenerateSimplexError(f"points {i} and {j} coincide at infinity")
            if a is not INFINITY and b is not INFINITY and a == b:
                raise DegenerateSimplexError(f"points {i} and {j} coincide at {a}")
    a, b, c, d = pts
    if a is INFINITY:
        return (b - c) / (b - d)
    if b is INFINITY:
        return (a - d) / (a - c)
    if c is INFINITY:
        return (a - d) / (b - d)
    if d is INFINITY:
        return (b - c) / (a - c)
    return (a - d) * (b - c) / ((a - c) * (b - d))


@dataclass(frozen=True)
class Flattening:
    """A flattened ideal simplex ``[z; p, q]``.

    ``w0 = Log z + p*pi*i``, ``w1 = -Log(1-z) + q*pi*i`` and ``w2 = -w0 - w1``.
    Only ``w0`` and ``w1`` are stored, so the three log-parameters always sum
    to zero.
    """

    z: complex
    p: int
    q: int

    def __post_init__(self):
        z = _check_generic(self.z, "flattening")
        object.__setattr__(self, "z", z)
        if int(self.p) != self.p or int(self.q) != self.q:
            raise FlatteningError(f"p, q must be integers, got {self.p}, {self.q}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", int(self.q))

    @property
    def w0(self) -> complex:
        return principal_log(self.z) + self.p * PI_I

    @property
    def w1(self) -> complex:
        return -principal_log(1 - self.z) + self.q * PI_I

    @property
    def w2(self) -> complex:
        return -self.w0 - self.w1

    @property
    def log_parameters(self) -> tuple[complex, complex, complex]:
        w0, w1 = self.w0, self.w1
        return w0, w1, -w0 - w1

    @classmethod
    def from_log_parameters(cls, w0, w1, z=None, tol: float = 1e-6) -> "Flattening":
        """Recover ``[z; p, q]`` from log-parameters.

        If ``z`` is not given it is reconstructed from ``exp(w0) = +-z`` and
        ``exp(-w1) = +-(1-z)``.  Raises :class:`FlatteningError` if ``p`` or
        ``q`` is not integral within ``tol``.
        """
        w0, w1 = complex(w0), complex(w1)
        if z is None:
            z = _z_from_log_parameters(w0, w1, tol)
        z = _check_generic(z, "flattening")
        p_real = (w0 - principal_log(z)) / PI_I
        q_real = (w1 + principal_log(1 - z)) / PI_I
        p, q = round(p_real.real), round(q_real.real)
        if abs(p_real - p) > tol or abs(q_real - q) > tol:
            raise FlatteningError(
                f"log-parameters ({w0}, {w1}) are not a flattening of {z}: "
                f"p = {p_real}, q = {q_real}"
            )
        return cls(z, p, q)

    def conjugate(self) -> "Flattening":
        """Complex conjugate flattening ``[conj z; -p, -q]`` (off the real cuts)."""
        return Flattening(self.z.conjugate(), -self.p, -self.q)

    def residuals(self) -> dict[str, float]:
        """Deviation from each defining identity, for diagnostics."""
        w0, w1, w2 = self.log_parameters
        z = self.z
        return {
            "sum": abs(w0 + w1 + w2),
            "exp_w0": abs(cmath.exp(w0) - (-1) ** self.p * z),
            "exp_minus_w1": abs(cmath.exp(-w1) - (-1) ** self.q * (1 - z)),
        }

    def __iter__(self):
        return iter(self.log_parameters)


def _z_from_log_parameters(w0: complex, w1: complex, tol: float) -> complex:
    e0, e1 = cmath.exp(w0), cmath.exp(-w1)
    best = None
    for z in (e0, -e0):
        for target in (e1, -e1):
            err = abs((1 - z) - target)
            if best is None or err < best[0]:
                best = (err, z)
    if best[0] > tol * max(1.0, abs(e1)):
        raise FlatteningError(f"({w0}, {w1}) are not log-parameters of any simplex")
    z = best[1]
    # rounding noise from exp must not move a real shape across the cut
    if abs(z.imag) <= 1e-13 * abs(z):
        z = complex(z.real, 0.0)
    return z


def lhat(f: Flattening) -> complex:
    """Extended Rogers dilogarithm, meaningful modulo ``pi^2`` in the real part."""
    z = f.z
    return (
        rogers_L(z)
        + 0.5 * PI_I * (f.q * principal_log(z) + f.p * principal_log(1 - z))
        - PI2 / 6
    )


def reduce_mod_pi2(x: complex) -> complex:
    """Reduce the real part of ``x`` into ``[0, pi^2)``."""
    x = complex(x)
    r = math.fmod(x.real, PI2)
    if r < 0:
        r += PI2
    if r >= PI2:
        r -= PI2
    return complex(r, x.imag)


def centered_mod_pi2(x: float) -> float:
    """Representative of ``x`` modulo ``pi^2`` in ``(-pi^2/2, pi^2/2]``."""
    r = math.fmod(x, PI2)
    if r > PI2 / 2:
        r -= PI2
    elif r <= -PI2 / 2:
        r += PI2
    return r


def distance_mod_pi2(a: float, b: float) -> float:
    """Distance between two reals on the circle ``R / pi^2 Z``."""
    return abs(centered_mod_pi2(a - b))
