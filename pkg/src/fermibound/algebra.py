"""Normal ordering of fermionic operator monomials.

A monomial is a product of creation/annihilation operators on lattice
modes, stored as a tuple of ``(site, dagger)`` factors with 1-based site
indices.  Canonical form puts all creation operators to the left of all
annihilation operators, with strictly increasing site indices inside each
group.  Rewriting uses only the canonical anti-commutation relations

    a_k a_l† = delta_kl - a_l† a_k,      a_k a_l = -a_l a_k  (k != l),

together with a_k a_k = a_k† a_k† = 0, so every monomial reduces to an
affine combination of canonical monomials with coefficients +/-1 plus a
real constant from the delta contractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

Factor = tuple[int, bool]
Monomial = tuple[Factor, ...]

MAX_ORDER = 4


class UnsupportedOrderError(ValueError):
    """Raised for operator monomials longer than the supported order."""


@dataclass
class MomentExpression:
    """Affine combination of canonical monomials plus a real constant."""

    terms: dict[Monomial, float] = field(default_factory=dict)
    constant: float = 0.0

    def __add__(self, other: "MomentExpression") -> "MomentExpression":
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            value = terms.get(key, 0.0) + coeff
            if value == 0.0:
                terms.pop(key, None)
            else:
                terms[key] = value
        return MomentExpression(terms, self.constant + other.constant)

    def __mul__(self, scalar: float) -> "MomentExpression":
        if scalar == 0:
            return MomentExpression()
        return MomentExpression(
            {key: scalar * coeff for key, coeff in self.terms.items()},
            scalar * self.constant,
        )

    __rmul__ = __mul__

    def __sub__(self, other: "MomentExpression") -> "MomentExpression":
        return self + (other * -1.0)

    def evaluate(self, values: Mapping[Monomial, complex]) -> complex:
        """Evaluate the expression given moment values for every key."""
        return self.constant + sum(c * values[k] for k, c in self.terms.items())

    def isclose(self, other: "MomentExpression", tol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        if abs(self.constant - other.constant) > tol:
            return False
        return all(
            abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) <= tol
            for k in keys
        )


def adjoint(monomial: Monomial) -> Monomial:
    """Hermitian adjoint: reverse factor order and flip daggers."""
    return tuple((site, not dag) for site, dag in reversed(monomial))


def translate(monomial: Monomial, shift: int, n_sites: int) -> Monomial:
    """Shift all site indices cyclically by `shift` on a ring of `n_sites`."""
    return tuple(((site - 1 + shift) % n_sites + 1, dag) for site, dag in monomial)


def is_canonical(monomial: Monomial) -> bool:
    """True if daggers come first and indices strictly increase per group."""
    daggers = [s for s, d in monomial if d]
    others = [s for s, d in monomial if not d]
    if tuple((s, True) for s in daggers) + tuple((s, False) for s in others) != monomial:
        return False
    ordered = all(a < b for a, b in zip(daggers, daggers[1:]))
    return ordered and all(a < b for a, b in zip(others, others[1:]))


def _normal_order(factors: Monomial) -> tuple[tuple[Monomial, float], ...]:
    """Reduce to signed canonical monomials; the empty key is the constant."""
    acc: dict[Monomial, float] = {}
    stack: list[tuple[Monomial, float]] = [(factors, 1.0)]
    while stack:
        term, coeff = stack.pop()
        for i in range(len(term) - 1):
            (s, sd), (t, td) = term[i], term[i + 1]
            if not sd and td:
                swapped = term[:i] + ((t, td), (s, sd)) + term[i + 2:]
                stack.append((swapped, -coeff))
                if s == t:
                    stack.append((term[:i] + term[i + 2:], coeff))
                break
            if sd == td and s == t:
                # repeated fermionic factor, the whole term vanishes
                break
            if sd == td and s > t:
                swapped = term[:i] + ((t, td), (s, sd)) + term[i + 2:]
                stack.append((swapped, -coeff))
                break
        else:
            acc[term] = acc.get(term, 0.0) + coeff
    return tuple((k, c) for k, c in acc.items() if c != 0.0)


def canonicalize(monomial: Monomial) -> MomentExpression:
    """Normal-order a monomial of up to four factors.

    Parameters
    ----------
    monomial : tuple of (site, dagger) pairs
        Operator product read left to right, sites 1-based.

    Returns
    -------
    MomentExpression
        Affine combination of canonical monomials equal to the input as
        an operator identity.
    """
    monomial = tuple((int(s), bool(d)) for s, d in monomial)
    if len(monomial) > MAX_ORDER:
        raise UnsupportedOrderError(
            f"monomial of length {len(monomial)} exceeds supported order {MAX_ORDER}"
        )
    if any(s < 1 for s, _ in monomial):
        raise ValueError("site indices must be positive")
    expr = MomentExpression()
    for key, coeff in _normal_order(monomial):
        if key == ():
            expr.constant += coeff
        else:
            expr.terms[key] = expr.terms.get(key, 0.0) + coeff
    return expr


def canonical_term(monomial: Monomial) -> tuple[Monomial | None, float]:
    """Canonicalize a monomial known to reduce to a single signed key.

    Returns ``(None, 0.0)`` when the monomial vanishes identically.
    Raises ``ValueError`` if contractions produce a longer expression.
    """
    expr = canonicalize(monomial)
    if expr.constant == 0.0 and not expr.terms:
        return None, 0.0
    if expr.constant == 0.0 and len(expr.terms) == 1:
        [(key, coeff)] = expr.terms.items()
        return key, coeff
    raise ValueError(f"monomial {monomial} does not reduce to a single key")


def key_signature(key: Monomial) -> tuple[int, int]:
    """(creation count, annihilation count) of a canonical key."""
    ups = sum(1 for _, d in key if d)
    return ups, len(key) - ups


def allowed_by_symmetry(key: Monomial, symmetry: str) -> bool:
    """Whether a canonical key can have a nonzero moment under a symmetry.

    ``"parity"`` keeps even-length keys only; ``"number"`` additionally
    requires equal creation and annihilation counts.
    """
    ups, downs = key_signature(key)
    if symmetry == "parity":
        return (ups + downs) % 2 == 0
    if symmetry == "number":
        return ups == downs
    raise ValueError(f"unknown symmetry {symmetry!r}")


def filter_symmetry(expr: MomentExpression, symmetry: str) -> MomentExpression:
    """Drop keys whose moments vanish under the given superselection rule."""
    kept = {
        key: coeff
        for key, coeff in expr.terms.items()
        if allowed_by_symmetry(key, symmetry)
    }
    return MomentExpression(kept, expr.constant)
