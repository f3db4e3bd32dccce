"""Formal sums of flattened simplices and the relations between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InconsistentInputError
from .numerics import (
    PI_I,
    TOL,
    Flattening,
    cross_ratio,
    lhat,
    principal_log,
    reduce_mod_pi2,
)

# The ten edge equations of the flattening condition for five points.
# Each entry is (sign, simplex index i, log-parameter index k) meaning
# sign * w_k^i, where simplex i omits point i.
TEN_EQUATIONS: dict[tuple[int, int], tuple[tuple[int, int, int], ...]] = {
    (0, 1): ((1, 2, 0), (-1, 3, 0), (1, 4, 0)),
    (1, 2): ((1, 0, 0), (-1, 3, 1), (1, 4, 1)),
    (2, 3): ((1, 0, 1), (-1, 1, 1), (1, 4, 0)),
    (3, 4): ((1, 0, 0), (-1, 1, 0), (1, 2, 0)),
    (4, 0): ((-1, 1, 1), (1, 2, 1), (-1, 3, 1)),
    (0, 2): ((-1, 1, 0), (-1, 3, 2), (1, 4, 2)),
    (1, 3): ((1, 0, 2), (1, 2, 1), (1, 4, 2)),
    (2, 4): ((1, 0, 2), (-1, 1, 2), (-1, 3, 0)),
    (3, 0): ((-1, 1, 2), (1, 2, 2), (1, 4, 1)),
    (4, 1): ((1, 0, 1), (1, 2, 2), (-1, 3, 2)),
}


def _same_flattening(a: Flattening, b: Flattening, tol: float) -> bool:
    return a.p == b.p and a.q == b.q and abs(a.z - b.z) <= tol * max(1.0, abs(a.z))


@dataclass
class PreBlochElement:
    """Integer combination of flattened simplices.

    Terms with (numerically) equal ``(z, p, q)`` are merged and zero
    coefficients dropped on construction.
    """

    terms: list[tuple[int, Flattening]] = field(default_factory=list)
    tol: float = TOL

    def __post_init__(self):
        merged: list[list] = []
        for coeff, flat in self.terms:
            if int(coeff) != coeff:
                raise ValueError(f"coefficient {coeff} is not an integer")
            for entry in merged:
                if _same_flattening(entry[1], flat, self.tol):
                    entry[0] += int(coeff)
                    break
            else:
                merged.append([int(coeff), flat])
        self.terms = [(c, f) for c, f in merged if c != 0]

    @classmethod
    def of(cls, flats: Iterable[Flattening], coefficients: Iterable[int] | None = None):
        flats = list(flats)
        if coefficients is None:
            coefficients = [1] * len(flats)
        return cls(list(zip(coefficients, flats)))

    def __add__(self, other: "PreBlochElement") -> "PreBlochElement":
        return PreBlochElement(self.terms + other.terms, self.tol)

    def __neg__(self) -> "PreBlochElement":
        return PreBlochElement([(-c, f) for c, f in self.terms], self.tol)

    def __sub__(self, other: "PreBlochElement") -> "PreBlochElement":
        return self + (-other)

    def __rmul__(self, k: int) -> "PreBlochElement":
        return PreBlochElement([(k * c, f) for c, f in self.terms], self.tol)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def flattenings(self) -> list[Flattening]:
        return [f for _, f in self.terms]


def _lex_less(a: complex, b: complex, tol: float) -> bool:
    if abs(a.real - b.real) > tol:
        return a.real < b.real
    return a.imag < b.imag - tol


def _canonical_atom(x: complex, tol: float) -> tuple[int, complex]:
    # choose the representative of {x, -x} that is lexicographically larger
    if _lex_less(x, -x, tol):
        return -1, -x
    return 1, x


@dataclass
class WedgeElement:
    """Element of ``C wedge C`` as a list of integer-weighted pairs.

    Zero-testing is a cancellation heuristic: pairs are matched within a
    tolerance, and no Z-linear relations among the entries are detected.
    """

    terms: list[tuple[int, tuple[complex, complex]]] = field(default_factory=list)
    tol: float = TOL

    def __post_init__(self):
        raw = self.terms
        self.terms = []
        for coeff, (x, y) in raw:
            self._add(coeff, complex(x), complex(y))

    def _add(self, coeff: int, x: complex, y: complex) -> None:
        tol = self.tol
        if coeff == 0 or abs(x) <= tol or abs(y) <= tol:
            return
        sx, x = _canonical_atom(x, tol)
        sy, y = _canonical_atom(y, tol)
        coeff *= sx * sy
        if abs(x - y) <= tol:
            return
        if _lex_less(y, x, tol):
            x, y, coeff = y, x, -coeff
        for i, (c, (a, b)) in enumerate(self.terms):
            if abs(a - x) <= tol and abs(b - y) <= tol:
                c += coeff
                if c == 0:
                    del self.terms[i]
                else:
                    self.terms[i] = (c, (a, b))
                return
        self.terms.append((coeff, (x, y)))

    def __add__(self, other: "WedgeElement") -> "WedgeElement":
        out = WedgeElement(list(self.terms), self.tol)
        for c, (x, y) in other.terms:
            out._add(c, x, y)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)


def nu_hat(e: PreBlochElement) -> WedgeElement:
    """``[z; p, q] -> w0 ^ w1``, expanded bilinearly.

    With ``A = Log z``, ``B = Log(1-z)`` and ``C = pi*i`` we have
    ``w0 ^ w1 = -A^B + q A^C + p B^C``; expanding over these atoms lets
    transfer-relation combinations cancel exactly.
    """
    out = WedgeElement(tol=e.tol)
    for coeff, f in e.terms:
        a = principal_log(f.z)
        b = principal_log(1 - f.z)
        out._add(-coeff, a, b)
        out._add(coeff * f.q, a, PI_I)
        out._add(coeff * f.p, b, PI_I)
    return out


def flattening_condition_residuals(
    flats: Sequence[Flattening | Sequence[complex]],
) -> dict[tuple[int, int], complex]:
    """Signed log-parameter sums for each of the ten edges of a 4-simplex."""
    if len(flats) != 5:
        raise ValueError(f"need 5 flattenings, got {len(flats)}")
    w = [tuple(f) for f in flats]
    return {
        edge: sum(sign * w[i][k] for sign, i, k in terms)
        for edge, terms in TEN_EQUATIONS.items()
    }


def check_flattening_condition(
    flats: Sequence[Flattening], points: Sequence, tol: float = 1e-8
) -> tuple[bool, dict[tuple[int, int], float]]:
    """Check the flattening condition for five flattened simplices.

    ``flats[i]`` must be a flattening of the simplex spanned by ``points``
    with point ``i`` omitted.  Returns ``(ok, residuals)`` where
    ``residuals`` maps each edge ``(i, j)`` to the absolute signed sum.
    """
    if len(points) != 5:
        raise ValueError(f"need 5 points, got {len(points)}")
    for i, f in enumerate(flats):
        sub = [p for j, p in enumerate(points) if j != i]
        z = cross_ratio(*sub)
        if abs(z - f.z) > 1e-8 * max(1.0, abs(z)):
            raise InconsistentInputError(
                f"flattening {i} has cross-ratio {f.z}, points give {z}"
            )
    res = {e: abs(v) for e, v in flattening_condition_residuals(flats).items()}
    return all(v < tol for v in res.values()), res


def _lhat_symbolic(z: complex, p: int, q: int) -> tuple[int, int, int]:
    # coefficients of (L(z) - pi^2/6, (pi i/2) Log z, (pi i/2) Log(1-z))
    return 1, q, p


def check_transfer(z, p: int, q: int, p2: int, q2: int, tol: float = 1e-9) -> bool:
    """Check ``L^[z;p,q] + L^[z;p',q'] = L^[z;p,q'] + L^[z;p',q]``.

    Both sides are compared as formal expressions in ``L(z)``, ``Log z`` and
    ``Log(1-z)`` (exact integer comparison) and then numerically.
    """
    lhs = [a + b for a, b in zip(_lhat_symbolic(z, p, q), _lhat_symbolic(z, p2, q2))]
    rhs = [a + b for a, b in zip(_lhat_symbolic(z, p, q2), _lhat_symbolic(z, p2, q))]
    if lhs != rhs:
        return False
    num_l = lhat(Flattening(z, p, q)) + lhat(Flattening(z, p2, q2))
    num_r = lhat(Flattening(z, p, q2)) + lhat(Flattening(z, p2, q))
    return abs(num_l - num_r) <= tol * max(1.0, abs(num_l))


def lhat_sum(e: PreBlochElement) -> complex:
    """``sum c * L^(f)`` with the real part reduced to ``[0, pi^2)``."""
    total = sum((c * lhat(f) for c, f in e.terms), 0j)
    return reduce_mod_pi2(total)
