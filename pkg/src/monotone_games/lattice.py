"""Partial orders, finite lattices, and join/meet algebra.

Elements are plain numbers or tuples of numbers (possibly exact
``fractions.Fraction`` coordinates).  Product-order spaces compare
coordinatewise; explicit finite posets carry their own relation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

#: tolerance for comparing inexact (float) coordinates
FLOAT_TOL = 1e-12


def as_coords(x) -> tuple:
    """Normalize an element to a coordinate tuple."""
    if isinstance(x, tuple):
        return x
    if isinstance(x, (list, np.ndarray)):
        return tuple(x)
    return (x,)


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction, np.integer))


def product_leq(x, y, tol: float = FLOAT_TOL) -> bool:
    """Coordinatewise x <= y.  Exact coordinates compare exactly."""
    cx, cy = as_coords(x), as_coords(y)
    if len(cx) != len(cy):
        raise ValueError(f"dimension mismatch: {len(cx)} vs {len(cy)}")
    for a, b in zip(cx, cy):
        if _is_exact(a) and _is_exact(b):
            if a > b:
                return False
        elif a > b + tol:
            return False
    return True


def join(x, y, order: Optional[Callable] = None):
    """Least upper bound.

    Under the (default) product order this is the coordinatewise
    maximum; the result keeps the shape of the inputs (scalar in,
    scalar out).  Pass a ``FiniteLattice`` to look joins up in an
    explicit poset instead.
    """
    if isinstance(order, FiniteLattice):
        return order.join(x, y)
    cx, cy = as_coords(x), as_coords(y)
    if len(cx) != len(cy):
        raise ValueError(f"dimension mismatch: {len(cx)} vs {len(cy)}")
    out = tuple(a if _ge(a, b) else b for a, b in zip(cx, cy))
    return out if isinstance(x, tuple) else out[0] if len(out) == 1 else out


def meet(x, y, order: Optional[Callable] = None):
    """Greatest lower bound, dual of :func:`join`."""
    if isinstance(order, FiniteLattice):
        return order.meet(x, y)
    cx, cy = as_coords(x), as_coords(y)
    if len(cx) != len(cy):
        raise ValueError(f"dimension mismatch: {len(cx)} vs {len(cy)}")
    out = tuple(b if _ge(a, b) else a for a, b in zip(cx, cy))
    return out if isinstance(x, tuple) else out[0] if len(out) == 1 else out


def _ge(a, b) -> bool:
    if _is_exact(a) and _is_exact(b):
        return a >= b
    return a >= b - FLOAT_TOL


@dataclass(frozen=True)
class LatticeCheck:
    """Verdict of :func:`is_lattice` with a witness pair on failure."""

    ok: bool
    witness: Optional[tuple] = None
    reason: str = ""


def is_lattice(elements: Sequence, leq: Optional[Callable] = None) -> LatticeCheck:
    """Check that every pair of elements has a join and meet in the set.

    ``leq`` defaults to the coordinatewise product order.  Returns the
    first offending pair as a witness when the check fails.
    """
    elems = list(elements)
    cmp = leq if leq is not None else product_leq
    for x, y in itertools.combinations(elems, 2):
        for which, bound in (("join", _lub(x, y, elems, cmp)),
                             ("meet", _glb(x, y, elems, cmp))):
            if bound is None:
                return LatticeCheck(False, (x, y), f"no {which} for pair")
    return LatticeCheck(True)


def _lub(x, y, elems, cmp):
    uppers = [e for e in elems if cmp(x, e) and cmp(y, e)]
    for u in uppers:
        if all(cmp(u, v) for v in uppers):
            return u
    return None


def _glb(x, y, elems, cmp):
    lowers = [e for e in elems if cmp(e, x) and cmp(e, y)]
    for u in lowers:
        if all(cmp(v, u) for v in lowers):
            return u
    return None


class FiniteLattice:
    """Finite lattice with precomputed join/meet tables.

    Built either from a coordinatewise-ordered element set
    (:meth:`from_product_elements`) or from an explicit relation
    (:meth:`from_relation`).  Construction fails if the element set is
    not a lattice.
    """

    def __init__(self, elements: Sequence, leq: Callable):
        self.elements = [e if isinstance(e, tuple) else e for e in elements]
        self._index = {e: k for k, e in enumerate(self.elements)}
        self._leq = leq
        check = is_lattice(self.elements, leq)
        if not check.ok:
            raise ValueError(f"not a lattice: {check.reason}, witness {check.witness}")
        self._join = {}
        self._meet = {}
        for x, y in itertools.product(self.elements, repeat=2):
            self._join[(x, y)] = _lub(x, y, self.elements, leq)
            self._meet[(x, y)] = _glb(x, y, self.elements, leq)

    @classmethod
    def from_product_elements(cls, elements: Sequence) -> "FiniteLattice":
        return cls(elements, product_leq)

    @classmethod
    def from_relation(cls, elements: Sequence, pairs: Sequence[tuple]) -> "FiniteLattice":
        """Explicit relation given as the set of (lo, hi) related pairs.

        The reflexive-transitive closure is taken; antisymmetry is
        verified.
        """
        elems = list(elements)
        rel = {(e, e) for e in elems}
        rel.update((a, b) for a, b in pairs)
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
        for a, b in rel:
            if a != b and (b, a) in rel:
                raise ValueError(f"relation not antisymmetric: {a}, {b}")
        return cls(elems, lambda x, y: (x, y) in rel)

    def leq(self, x, y) -> bool:
        return self._leq(x, y)

    def join(self, x, y):
        self._require(x), self._require(y)
        return self._join[(x, y)]

    def meet(self, x, y):
        self._require(x), self._require(y)
        return self._meet[(x, y)]

    def _require(self, x):
        if x not in self._index:
            raise KeyError(f"{x!r} not an element of the lattice")

    @property
    def bottom(self):
        return self._fold(self._meet)

    @property
    def top(self):
        return self._fold(self._join)

    def _fold(self, table):
        acc = self.elements[0]
        for e in self.elements[1:]:
            acc = table[(acc, e)]
        return acc

    def is_chain(self) -> bool:
        return all(self._leq(x, y) or self._leq(y, x)
                   for x, y in itertools.combinations(self.elements, 2))

    def covers(self, x) -> list:
        """Elements immediately above x."""
        above = [e for e in self.elements if e != x and self._leq(x, e)]
        return [e for e in above
                if not any(f != e and self._leq(f, e) for f in above)]

    def maximal_chains(self) -> list[list]:
        """All maximal chains from bottom to top (each a sorted list)."""
        chains = []

        def extend(chain):
            nxt = self.covers(chain[-1])
            if not nxt:
                chains.append(chain)
            for e in nxt:
                extend(chain + [e])

        extend([self.bottom])
        return chains

    def sorted_elements(self) -> list:
        """Elements in a linear extension of the order."""
        remaining = list(self.elements)
        out = []
        while remaining:
            minimal = next(e for e in remaining
                           if not any(f != e and self._leq(f, e) for f in remaining))
            out.append(minimal)
            remaining.remove(minimal)
        return out

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


@dataclass(frozen=True)
class RenyOrderSpec:
    """Endogenous order on nonincreasing unit-bid vectors.

    ``alpha`` is the risk-adjustment coefficient u'(-m)/u'(m) - 1 of a
    concave utility; ``m`` the number of units.
    """

    m: int
    alpha: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.m < 1:
            raise ValueError("m must be a positive integer")


def reny_leq(t_lo, t_hi, spec: RenyOrderSpec, tol: float = FLOAT_TOL) -> bool:
    """True iff ``t_hi`` dominates ``t_lo`` in the risk-adjusted order.

    For vectors of length m with entries in [0,1], nonincreasing:
    the first coordinates compare directly and each later coordinate
    compares after subtracting alpha times the running prefix sum.
    """
    lo = np.asarray(t_lo, dtype=float)
    hi = np.asarray(t_hi, dtype=float)
    if lo.shape != (spec.m,) or hi.shape != (spec.m,):
        raise ValueError(f"type vectors must have length {spec.m}")
    for v in (lo, hi):
        if np.any(v < -tol) or np.any(v > 1 + tol):
            raise ValueError("entries must lie in [0, 1]")
        if np.any(np.diff(v) > tol):
            raise ValueError("type vector must be nonincreasing")
    if hi[0] < lo[0] - tol:
        return False
    prefix_hi = np.cumsum(hi)[:-1]
    prefix_lo = np.cumsum(lo)[:-1]
    lhs = hi[1:] - spec.alpha * prefix_hi
    rhs = lo[1:] - spec.alpha * prefix_lo
    return bool(np.all(lhs >= rhs - tol))
