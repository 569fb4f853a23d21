"""Grid-certified checkers for ordinal and cardinal payoff conditions.

Each checker quantifies over a finite grid and reports either
"holds-on-grid" or a failure with a re-evaluable witness.  The
quantifiers in the underlying definitions range over continua, so a
passing verdict is always grid-relative; witnesses, in contrast, are
conclusive.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .games import BayesGame, StepStrategy, interim_payoff_batch
from .lattice import FiniteLattice, join, meet, product_leq

#: margin for strict inequalities; weak inequalities allow the same slack
STRICT_TOL = 1e-9


@dataclass
class ConditionReport:
    """Verdict of a single condition check.

    ``witness`` carries the offending tuple and the inequality values on
    failure so the violation can be re-evaluated independently.
    """

    condition: str
    holds: bool
    witness: Optional[dict] = None
    grid: str = ""
    tol: float = STRICT_TOL
    notes: str = ""

    @property
    def verdict(self) -> str:
        return "holds-on-grid" if self.holds else "fails"

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "verdict": self.verdict,
            "witness": self.witness,
            "grid": self.grid,
            "tol": self.tol,
            "notes": self.notes,
        }


def _ordered_pairs(items: Sequence, leq: Callable) -> list[tuple]:
    """Strictly ordered comparable pairs (lo, hi)."""
    out = []
    for x, y in itertools.combinations(items, 2):
        if leq(x, y) and not leq(y, x):
            out.append((x, y))
        elif leq(y, x) and not leq(x, y):
            out.append((y, x))
    return out


def _leq_for(actions: Sequence, order: Optional[Callable]) -> Callable:
    if order is not None:
        return order
    if actions and isinstance(actions[0], tuple):
        return product_leq
    return lambda a, b: a <= b + 1e-12


def check_single_crossing(h: Callable, actions: Sequence, types: Sequence,
                          tol: float = STRICT_TOL,
                          action_order: Optional[Callable] = None) -> ConditionReport:
    """Single crossing of h(x, y) in (x, y).

    For every comparable x' > x and y' > y on the grid: a nonnegative
    (positive) difference at the low y stays nonnegative (positive) at
    the high y.
    """
    leq = _leq_for(actions, action_order)
    a_pairs = _ordered_pairs(actions, leq)
    t = sorted(types)
    grid = f"{len(actions)} actions x {len(t)} types"
    if len(a_pairs) == 0 or len(t) < 2:
        return ConditionReport("single-crossing", True, grid=grid, tol=tol,
                               notes="degenerate grid, vacuously true")
    for (x, xp) in a_pairs:
        diffs = np.array([h(xp, y) - h(x, y) for y in t])
        for ky, kyp in itertools.combinations(range(len(t)), 2):
            lo, hi = diffs[ky], diffs[kyp]
            if lo >= -tol and hi < -tol:
                return ConditionReport(
                    "single-crossing", False, grid=grid, tol=tol,
                    witness={"x": x, "x_hi": xp, "y": t[ky], "y_hi": t[kyp],
                             "diff_lo": float(lo), "diff_hi": float(hi),
                             "violated": "weak sign preservation"})
            if lo > tol and hi <= tol:
                return ConditionReport(
                    "single-crossing", False, grid=grid, tol=tol,
                    witness={"x": x, "x_hi": xp, "y": t[ky], "y_hi": t[kyp],
                             "diff_lo": float(lo), "diff_hi": float(hi),
                             "violated": "strict sign preservation"})
    return ConditionReport("single-crossing", True, grid=grid, tol=tol)


def check_increasing_differences(h: Callable, actions: Sequence, types: Sequence,
                                 tol: float = STRICT_TOL,
                                 action_order: Optional[Callable] = None) -> ConditionReport:
    """Increasing differences of h(x, y): the gain from raising x is
    weakly increasing in y over all comparable grid quadruples."""
    leq = _leq_for(actions, action_order)
    a_pairs = _ordered_pairs(actions, leq)
    t = sorted(types)
    grid = f"{len(actions)} actions x {len(t)} types"
    for (x, xp) in a_pairs:
        diffs = np.array([h(xp, y) - h(x, y) for y in t])
        for ky, kyp in itertools.combinations(range(len(t)), 2):
            if diffs[kyp] < diffs[ky] - tol:
                return ConditionReport(
                    "increasing-differences", False, grid=grid, tol=tol,
                    witness={"x": x, "x_hi": xp, "y": t[ky], "y_hi": t[kyp],
                             "diff_lo": float(diffs[ky]), "diff_hi": float(diffs[kyp]),
                             "violated": "difference decreased in y"})
    return ConditionReport("increasing-differences", True, grid=grid, tol=tol)


def check_supermodular(h: Callable, lattice: FiniteLattice,
                       tol: float = STRICT_TOL) -> ConditionReport:
    """h(x v x') + h(x ^ x') >= h(x) + h(x') over all pairs."""
    grid = f"lattice with {len(lattice)} elements"
    for x, xp in itertools.combinations(lattice.elements, 2):
        lhs = h(lattice.join(x, xp)) + h(lattice.meet(x, xp))
        rhs = h(x) + h(xp)
        if lhs < rhs - tol:
            return ConditionReport(
                "supermodularity", False, grid=grid, tol=tol,
                witness={"x": x, "x_other": xp,
                         "join": lattice.join(x, xp), "meet": lattice.meet(x, xp),
                         "lhs": float(lhs), "rhs": float(rhs)})
    return ConditionReport("supermodularity", True, grid=grid, tol=tol)


def check_quasi_supermodular(h: Callable, lattice: FiniteLattice,
                             tol: float = STRICT_TOL) -> ConditionReport:
    """Both quasi-supermodularity implications over all element pairs:
    h(x') >= (>) h(x ^ x')  implies  h(x v x') >= (>) h(x)."""
    grid = f"lattice with {len(lattice)} elements"
    for x, xp in itertools.permutations(lattice.elements, 2):
        v_xp = h(xp)
        v_meet = h(lattice.meet(x, xp))
        v_join = h(lattice.join(x, xp))
        v_x = h(x)
        if v_xp >= v_meet - tol and v_join < v_x - tol:
            return ConditionReport(
                "quasi-supermodularity", False, grid=grid, tol=tol,
                witness={"x": x, "x_other": xp, "h_other": float(v_xp),
                         "h_meet": float(v_meet), "h_join": float(v_join),
                         "h_x": float(v_x), "violated": "weak implication"})
        if v_xp > v_meet + tol and v_join <= v_x + tol:
            return ConditionReport(
                "quasi-supermodularity", False, grid=grid, tol=tol,
                witness={"x": x, "x_other": xp, "h_other": float(v_xp),
                         "h_meet": float(v_meet), "h_join": float(v_join),
                         "h_x": float(v_x), "violated": "strict implication"})
    return ConditionReport("quasi-supermodularity", True, grid=grid, tol=tol)


def check_affiliated(density: Callable, grid_points: Sequence,
                     tol: float = STRICT_TOL) -> ConditionReport:
    """Affiliation inequality f(t v t') f(t ^ t') >= f(t) f(t') on grid pairs.

    ``density`` takes an array of shape (n,) per point (or (n, ...)
    batched); ``grid_points`` is a sequence of type profiles.
    """
    pts = [tuple(p) for p in grid_points]
    grid = f"{len(pts)} type profiles"
    f = lambda p: float(np.asarray(density(np.asarray(p, dtype=float).reshape(-1, 1))).ravel()[0])
    vals = {p: f(p) for p in pts}
    for t, tp in itertools.combinations(pts, 2):
        hi = tuple(join(t, tp))
        lo = tuple(meet(t, tp))
        lhs = vals.get(hi, f(hi)) * vals.get(lo, f(lo))
        rhs = vals[t] * vals[tp]
        if lhs < rhs - tol:
            return ConditionReport(
                "affiliation", False, grid=grid, tol=tol,
                witness={"t": t, "t_other": tp, "lhs": float(lhs), "rhs": float(rhs)})
    return ConditionReport("affiliation", True, grid=grid, tol=tol)


# ---------------------------------------------------------------------------
# Interim-payoff assumption checks over families of opponent strategies
# ---------------------------------------------------------------------------


def cutoff_family(game: BayesGame, i: int, resolution: int = 9) -> list[dict]:
    """Monotone cutoff strategies for the opponents of player i.

    For each opponent, single-cutoff step strategies between every
    adjacent action pair along a maximal chain, with cutoffs on a
    uniform grid of the stated resolution.  This is the default family
    against which the interim-payoff assumptions are certified; the
    true quantifier ranges over all monotone strategies and is not
    enumerable.
    """
    per_opponent = []
    for j in range(game.n):
        if j == i:
            continue
        space = game.action_spaces[j]
        ts = game.type_spaces[j]
        cuts = np.linspace(ts.lo, ts.hi, resolution)
        strategies = []
        if space.lattice is not None:
            chains = space.lattice.maximal_chains()
        else:
            chains = [list(space.actions)] if space.is_finite else [[space.lo, space.hi]]
        for chain in chains:
            for a_lo, a_hi in zip(chain, chain[1:]):
                for c in cuts[1:-1]:
                    strategies.append(StepStrategy([ts.lo, float(c), ts.hi],
                                                   [a_lo, a_hi], space))
            for a in chain:
                strategies.append(StepStrategy.constant(ts.lo, ts.hi, a, space))
        per_opponent.append((j, strategies))
    out = []
    for combo in itertools.product(*[s for _, s in per_opponent]):
        out.append({j: s for (j, _), s in zip(per_opponent, combo)})
    return out


def check_interim_idc(game: BayesGame, i: int, family: Optional[list] = None,
                      type_grid: int = 9, tol: float = STRICT_TOL) -> ConditionReport:
    """Increasing differences of V_i(a_i, t_i) against a family of
    monotone opponent strategies (default: cutoff grids).  The report
    names the tested family; the quantifier over all monotone opponent
    profiles is not enumerable."""
    fam = family if family is not None else cutoff_family(game, i)
    ts = game.type_spaces[i]
    types = np.linspace(ts.lo, ts.hi, type_grid)
    actions = game.action_spaces[i].actions
    leq = game.action_spaces[i].leq
    for idx, others in enumerate(fam):
        vals = {a: interim_payoff_batch(game, i, a, types, others) for a in actions}
        h = lambda a, t: float(vals[a][int(np.searchsorted(types, t))])
        rep = check_increasing_differences(h, actions, list(types), tol, leq)
        if not rep.holds:
            rep.condition = "interim-increasing-differences"
            rep.notes = f"opponent profile #{idx} of tested cutoff family"
            rep.witness["opponents"] = {j: repr(s) for j, s in others.items()}
            return rep
    return ConditionReport("interim-increasing-differences", True,
                           grid=f"{len(fam)} opponent profiles x {type_grid} types",
                           tol=tol, notes="family: cutoff strategies on a uniform grid")


def check_interim_supermodular(game: BayesGame, i: int, family: Optional[list] = None,
                               type_grid: int = 5, tol: float = STRICT_TOL) -> ConditionReport:
    """Supermodularity of V_i in a_i against the tested opponent family."""
    space = game.action_spaces[i]
    if space.lattice is None:
        return ConditionReport("interim-supermodularity", True,
                               grid="chain action space", tol=tol,
                               notes="one-dimensional actions, trivially supermodular")
    fam = family if family is not None else cutoff_family(game, i)
    ts = game.type_spaces[i]
    types = np.linspace(ts.lo, ts.hi, type_grid)
    for idx, others in enumerate(fam):
        for t in types:
            vals = {a: float(interim_payoff_batch(game, i, a, [t], others)[0])
                    for a in space.actions}
            rep = check_supermodular(lambda a: vals[a], space.lattice, tol)
            if not rep.holds:
                rep.condition = "interim-supermodularity"
                rep.notes = f"opponent profile #{idx}, type {t}"
                rep.witness["opponents"] = {j: repr(s) for j, s in others.items()}
                rep.witness["type"] = float(t)
                return rep
    return ConditionReport("interim-supermodularity", True,
                           grid=f"{len(fam)} opponent profiles x {type_grid} types",
                           tol=tol, notes="family: cutoff strategies on a uniform grid")


def check_interim_quasi_supermodular(game: BayesGame, i: int,
                                     family: Optional[list] = None,
                                     type_grid: int = 5,
                                     tol: float = STRICT_TOL) -> ConditionReport:
    """Quasi-supermodularity of V_i in a_i against the tested family."""
    space = game.action_spaces[i]
    if space.lattice is None:
        return ConditionReport("interim-quasi-supermodularity", True,
                               grid="chain action space", tol=tol,
                               notes="one-dimensional actions, trivially quasi-supermodular")
    fam = family if family is not None else cutoff_family(game, i)
    ts = game.type_spaces[i]
    types = np.linspace(ts.lo, ts.hi, type_grid)
    for idx, others in enumerate(fam):
        for t in types:
            vals = {a: float(interim_payoff_batch(game, i, a, [t], others)[0])
                    for a in space.actions}
            rep = check_quasi_supermodular(lambda a: vals[a], space.lattice, tol)
            if not rep.holds:
                rep.condition = "interim-quasi-supermodularity"
                rep.notes = f"opponent profile #{idx}, type {t}"
                rep.witness["opponents"] = {j: repr(s) for j, s in others.items()}
                rep.witness["type"] = float(t)
                return rep
    return ConditionReport("interim-quasi-supermodularity", True,
                           grid=f"{len(fam)} opponent profiles x {type_grid} types",
                           tol=tol, notes="family: cutoff strategies on a uniform grid")


def check_interim_single_crossing(game: BayesGame, i: int,
                                  family: Optional[list] = None,
                                  type_grid: int = 9,
                                  tol: float = STRICT_TOL) -> ConditionReport:
    """Single crossing of V_i(a_i, t_i) against the tested family."""
    fam = family if family is not None else cutoff_family(game, i)
    ts = game.type_spaces[i]
    types = np.linspace(ts.lo, ts.hi, type_grid)
    actions = game.action_spaces[i].actions
    leq = game.action_spaces[i].leq
    for idx, others in enumerate(fam):
        vals = {a: interim_payoff_batch(game, i, a, types, others) for a in actions}
        h = lambda a, t: float(vals[a][int(np.searchsorted(types, t))])
        rep = check_single_crossing(h, actions, list(types), tol, leq)
        if not rep.holds:
            rep.condition = "interim-single-crossing"
            rep.notes = f"opponent profile #{idx} of tested cutoff family"
            rep.witness["opponents"] = {j: repr(s) for j, s in others.items()}
            return rep
    return ConditionReport("interim-single-crossing", True,
                           grid=f"{len(fam)} opponent profiles x {type_grid} types",
                           tol=tol, notes="family: cutoff strategies on a uniform grid")
