"""Bayesian game representation and interim payoff evaluation.

The central quantity is the interim payoff of player i at type t_i
against the other players' strategies, an integral over opponents'
types and action mixtures.  Everything downstream (condition checks,
equilibrium search, perfection certificates) consumes this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .lattice import FiniteLattice, product_leq

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def gl_nodes(lo: float, hi: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights mapped to [lo, hi]."""
    x, w = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


# ---------------------------------------------------------------------------
# Type spaces and densities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TypeSpace:
    """Box type space, one dimension per player in this toolkit's games."""

    lo: float = 0.0
    hi: float = 1.0
    order: str = "product"  # "product" | "reny"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("type box must have lo < hi")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, t) -> bool:
        return bool(np.all((np.asarray(t) >= self.lo - 1e-12)
                           & (np.asarray(t) <= self.hi + 1e-12)))


@dataclass
class Marginal:
    """One-dimensional marginal density on [lo, hi]."""

    lo: float
    hi: float
    pdf: Optional[Callable] = None  # None means uniform

    def density(self, t):
        t = np.asarray(t, dtype=float)
        if self.pdf is None:
            return np.full_like(t, 1.0 / (self.hi - self.lo))
        return np.asarray(self.pdf(t), dtype=float)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.pdf is None:
            return rng.uniform(self.lo, self.hi, size)
        # rejection sampling against the uniform envelope
        bound = float(np.max(self.density(np.linspace(self.lo, self.hi, 513)))) * 1.1
        out = np.empty(size)
        filled = 0
        while filled < size:
            cand = rng.uniform(self.lo, self.hi, size)
            acc = cand[rng.uniform(0, bound, size) < self.density(cand)]
            take = min(size - filled, acc.size)
            out[filled:filled + take] = acc[:take]
            filled += take
        return out


class JointDensity:
    """Joint density over the product type box.

    ``kind`` is one of ``independent-uniform``, ``independent`` (product
    of marginals) or ``general`` (arbitrary evaluator; conditionals are
    formed by dividing by the quadrature marginal).  Construction checks
    nonnegativity on a sample grid and total mass 1 within 1e-6.
    """

    def __init__(self, spaces: Sequence[TypeSpace], kind: str = "independent-uniform",
                 marginals: Optional[Sequence[Marginal]] = None,
                 pdf: Optional[Callable] = None, check_order: int = 24):
        self.spaces = list(spaces)
        self.n = len(self.spaces)
        self.kind = kind
        if kind == "independent-uniform":
            self.marginals = [Marginal(s.lo, s.hi) for s in self.spaces]
        elif kind == "independent":
            if marginals is None or len(marginals) != self.n:
                raise ValueError("independent density requires one marginal per player")
            self.marginals = list(marginals)
        elif kind == "general":
            if pdf is None:
                raise ValueError("general density requires an evaluator")
            self.marginals = None
            self._pdf = pdf
        else:
            raise ValueError(f"unknown density kind {kind!r}")
        self._validate(check_order)

    def _validate(self, order: int):
        axes = [gl_nodes(s.lo, s.hi, order) for s in self.spaces]
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        t = np.stack(grids)
        vals = self.density(t)
        if np.any(vals < -1e-12):
            raise ValueError("density is negative somewhere on the check grid")
        w = 1.0
        for k, (_, wk) in enumerate(axes):
            shape = [1] * self.n
            shape[k] = -1
            w = w * wk.reshape(shape)
        mass = float(np.sum(vals * w))
        if abs(mass - 1.0) > 1e-6:
            raise ValueError(f"density mass {mass:.8f} differs from 1 by more than 1e-6")

    def density(self, t: np.ndarray) -> np.ndarray:
        """Evaluate f at type profiles; t has shape (n, ...)."""
        t = np.asarray(t, dtype=float)
        if self.marginals is not None:
            out = np.ones(t.shape[1:])
            for j, m in enumerate(self.marginals):
                out = out * m.density(t[j])
            return out
        return np.asarray(self._pdf(t), dtype=float)

    def marginal_i(self, i: int, t_i) -> np.ndarray:
        t_i = np.asarray(t_i, dtype=float)
        if self.marginals is not None:
            return self.marginals[i].density(t_i)
        # quadrature over the other coordinates
        others = [j for j in range(self.n) if j != i]
        axes = [gl_nodes(self.spaces[j].lo, self.spaces[j].hi, 32) for j in others]
        flat = t_i.reshape(-1)
        out = np.empty(flat.shape)
        for idx, ti in enumerate(flat):
            grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
            t = np.empty((self.n,) + grids[0].shape)
            t[i] = ti
            for k, j in enumerate(others):
                t[j] = grids[k]
            vals = self._pdf(t)
            w = 1.0
            for k, (_, wk) in enumerate(axes):
                shape = [1] * len(others)
                shape[k] = -1
                w = w * wk.reshape(shape)
            out[idx] = np.sum(vals * w)
        return out.reshape(t_i.shape)

    def conditional_weight(self, i: int, t_i: float, t: np.ndarray) -> np.ndarray:
        """Conditional density of t_{-i} given t_i, evaluated at profiles t."""
        if self.marginals is not None:
            out = np.ones(t.shape[1:])
            for j in range(self.n):
                if j != i:
                    out = out * self.marginals[j].density(t[j])
            return out
        m = float(self.marginal_i(i, t_i))
        if m <= 0:
            raise ZeroDivisionError(f"conditional section at t_{i}={t_i} has zero mass")
        return self.density(t) / m

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draw full type profiles; returns an array of shape (n, size)."""
        if self.marginals is not None:
            out = np.empty((self.n, size))
            for j, m in enumerate(self.marginals):
                out[j] = m.sample(rng, size)
            return out
        probe = np.stack([np.random.default_rng(0).uniform(s.lo, s.hi, 4096)
                          for s in self.spaces])
        bound = float(np.max(self.density(probe))) * 1.2
        out = np.empty((self.n, size))
        filled = 0
        while filled < size:
            cand = np.stack([rng.uniform(s.lo, s.hi, size) for s in self.spaces])
            keep = rng.uniform(0, bound, size) < self.density(cand)
            take = min(size - filled, int(np.sum(keep)))
            out[:, filled:filled + take] = cand[:, keep][:, :take]
            filled += take
        return out

    def sample_conditional(self, i: int, t_i: float, size: int,
                           rng: np.random.Generator) -> np.ndarray:
        """Draw t_{-i} | t_i; returns array of shape (n, size) with row i fixed."""
        out = np.empty((self.n, size))
        out[i] = t_i
        if self.marginals is not None:
            for j in range(self.n):
                if j != i:
                    out[j] = self.marginals[j].sample(rng, size)
            return out
        # rejection sampling for general conditionals
        others = [j for j in range(self.n) if j != i]
        probe = np.empty((self.n, 4096))
        probe[i] = t_i
        rng_probe = np.random.default_rng(0)
        for j in others:
            probe[j] = rng_probe.uniform(self.spaces[j].lo, self.spaces[j].hi, 4096)
        bound = float(np.max(self.density(probe))) * 1.2
        if bound <= 0:
            raise ZeroDivisionError("degenerate conditional section")
        filled = 0
        while filled < size:
            cand = np.empty((self.n, size))
            cand[i] = t_i
            for j in others:
                cand[j] = rng.uniform(self.spaces[j].lo, self.spaces[j].hi, size)
            keep = rng.uniform(0, bound, size) < self.density(cand)
            take = min(size - filled, int(np.sum(keep)))
            out[:, filled:filled + take] = cand[:, keep][:, :take]
            filled += take
        return out


# ---------------------------------------------------------------------------
# Action spaces
# ---------------------------------------------------------------------------


@dataclass
class ActionSpace:
    """Finite chain/lattice, interval, or quit-plus-interval actions."""

    mode: str  # "finite" | "interval" | "quit-interval"
    actions: Optional[Sequence] = None          # finite mode
    lattice: Optional[FiniteLattice] = None     # finite mode, multi-d
    lo: float = 0.0                             # interval modes
    hi: float = 1.0
    quit_action: Optional[float] = None         # quit-interval mode

    def __post_init__(self):
        if self.mode == "finite":
            if self.lattice is None:
                if self.actions is None:
                    raise ValueError("finite mode needs actions")
                self.actions = list(self.actions)
                if all(np.isscalar(a) for a in self.actions):
                    self.actions = sorted(self.actions)
                else:
                    self.lattice = FiniteLattice.from_product_elements(self.actions)
                    self.actions = self.lattice.sorted_elements()
            else:
                self.actions = self.lattice.sorted_elements()
        elif self.mode == "interval":
            if not self.lo < self.hi:
                raise ValueError("interval needs lo < hi")
        elif self.mode == "quit-interval":
            if self.quit_action is None or self.quit_action >= 0:
                raise ValueError("quit action must be strictly negative")
        else:
            raise ValueError(f"unknown action mode {self.mode!r}")

    @classmethod
    def finite(cls, actions) -> "ActionSpace":
        return cls(mode="finite", actions=actions)

    @classmethod
    def interval(cls, lo: float, hi: float) -> "ActionSpace":
        return cls(mode="interval", lo=lo, hi=hi)

    @classmethod
    def quit_interval(cls, quit_action: float, hi: float) -> "ActionSpace":
        return cls(mode="quit-interval", lo=0.0, hi=hi, quit_action=quit_action)

    @property
    def is_finite(self) -> bool:
        return self.mode == "finite"

    def leq(self, a, b) -> bool:
        if self.lattice is not None:
            return self.lattice.leq(a, b)
        return a <= b + 1e-12

    def metric(self, a, b) -> float:
        """Metric on actions; lattice points use the Euclidean distance."""
        if isinstance(a, tuple) or isinstance(b, tuple):
            return float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float)))
        return abs(float(a) - float(b))

    def contains(self, a) -> bool:
        if self.mode == "finite":
            return a in self.actions
        if self.mode == "interval":
            return self.lo - 1e-12 <= a <= self.hi + 1e-12
        return a == self.quit_action or (0 - 1e-12 <= a <= self.hi + 1e-12)


# ---------------------------------------------------------------------------
# Strategies and mixtures
# ---------------------------------------------------------------------------


class StepStrategy:
    """Pure step strategy on a one-dimensional type interval.

    Cells are left-closed/right-open except the last, which is closed.
    ``actions[k]`` is played on [breakpoints[k], breakpoints[k+1]).
    Monotone iff the action sequence is weakly increasing in the action
    order.
    """

    def __init__(self, breakpoints: Sequence[float], actions: Sequence,
                 action_space: Optional[ActionSpace] = None):
        self.breakpoints = np.asarray(breakpoints, dtype=float)
        self.actions = list(actions)
        self.action_space = action_space
        if len(self.actions) != len(self.breakpoints) - 1:
            raise ValueError("need one action per cell")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def constant(cls, lo: float, hi: float, action,
                 action_space: Optional[ActionSpace] = None) -> "StepStrategy":
        return cls([lo, hi], [action], action_space)

    @property
    def lo(self) -> float:
        return float(self.breakpoints[0])

    @property
    def hi(self) -> float:
        return float(self.breakpoints[-1])

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < self.lo - 1e-12) or np.any(t_arr > self.hi + 1e-12):
            raise ValueError("type outside the strategy's domain")
        idx = np.searchsorted(self.breakpoints, t_arr, side="right") - 1
        idx = np.clip(idx, 0, len(self.actions) - 1)
        if np.isscalar(t) or t_arr.ndim == 0:
            return self.actions[int(idx)]
        return np.array([self.actions[int(k)] for k in np.ravel(idx)],
                        dtype=object).reshape(t_arr.shape)

    def cells(self) -> list[tuple[float, float, object]]:
        return [(float(self.breakpoints[k]), float(self.breakpoints[k + 1]), self.actions[k])
                for k in range(len(self.actions))]

    def is_increasing(self, leq: Optional[Callable] = None) -> bool:
        cmp = leq
        if cmp is None:
            cmp = self.action_space.leq if self.action_space is not None else \
                (lambda a, b: product_leq(a, b) if isinstance(a, tuple) else a <= b + 1e-12)
        return all(cmp(a, b) for a, b in zip(self.actions, self.actions[1:]))

    def simplified(self) -> "StepStrategy":
        """Merge adjacent cells that play the same action."""
        bps = [self.breakpoints[0]]
        acts = [self.actions[0]]
        for k in range(1, len(self.actions)):
            if self.actions[k] != acts[-1]:
                bps.append(self.breakpoints[k])
                acts.append(self.actions[k])
        bps.append(self.breakpoints[-1])
        return StepStrategy(bps, acts, self.action_space)

    def __repr__(self):
        cells = ", ".join(f"[{lo:.4g},{hi:.4g})->{a}" for lo, hi, a in self.cells())
        return f"StepStrategy({cells})"


@dataclass
class CellStrategy:
    """Pure strategy on a multi-dimensional type box, one action per cell.

    Cells are axis-aligned boxes given as (lo, hi) coordinate arrays.
    Evaluation only; the interim machinery works with one-dimensional
    per-player types.
    """

    cells: list  # list of (lo: array, hi: array, action)

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        for lo, hi, action in self.cells:
            if np.all(t >= np.asarray(lo) - 1e-12) and np.all(t < np.asarray(hi) + 1e-12):
                return action
        raise ValueError("type not covered by any cell")

    def is_increasing(self, type_leq: Callable, action_leq: Callable) -> bool:
        for (lo1, hi1, a1), (lo2, hi2, a2) in itertools.combinations(self.cells, 2):
            if type_leq(tuple(hi1), tuple(lo2)) and not action_leq(a1, a2):
                return False
            if type_leq(tuple(hi2), tuple(lo1)) and not action_leq(a2, a1):
                return False
        return True


class MixedAction:
    """Finitely many atoms plus optional uniform-on-interval components."""

    def __init__(self, atoms: Sequence[tuple] = (), uniforms: Sequence[tuple] = ()):
        self.atoms = [(a, float(w)) for a, w in atoms if w != 0.0]
        self.uniforms = [((float(lo), float(hi)), float(w)) for (lo, hi), w in uniforms
                         if w != 0.0]
        total = sum(w for _, w in self.atoms) + sum(w for _, w in self.uniforms)
        if any(w < 0 for _, w in self.atoms) or any(w < 0 for _, w in self.uniforms):
            raise ValueError("weights must be nonnegative")
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total!r}, not 1")
        # merge duplicate atoms
        merged: dict = {}
        for a, w in self.atoms:
            merged[a] = merged.get(a, 0.0) + w
        self.atoms = sorted(merged.items(), key=lambda kv: str(kv[0]))

    @classmethod
    def point(cls, action) -> "MixedAction":
        return cls(atoms=[(action, 1.0)])

    def mass_at(self, action) -> float:
        return sum(w for a, w in self.atoms if a == action)

    def is_completely_mixed_finite(self, actions: Sequence) -> bool:
        return all(self.mass_at(a) > 0 for a in actions)

    def sample(self, rng: np.random.Generator):
        u = rng.uniform()
        acc = 0.0
        for a, w in self.atoms:
            acc += w
            if u <= acc:
                return a
        for (lo, hi), w in self.uniforms:
            acc += w
            if u <= acc:
                return rng.uniform(lo, hi)
        return self.atoms[-1][0] if self.atoms else rng.uniform(*self.uniforms[-1][0])

    def __repr__(self):
        parts = [f"{w:.4g}*d({a})" for a, w in self.atoms]
        parts += [f"{w:.4g}*U[{lo:.4g},{hi:.4g}]" for (lo, hi), w in self.uniforms]
        return "MixedAction(" + " + ".join(parts) + ")"


class BehavioralStrategy:
    """Piecewise-constant map from a type partition to mixed actions."""

    def __init__(self, breakpoints: Sequence[float], mixtures: Sequence[MixedAction]):
        self.breakpoints = np.asarray(breakpoints, dtype=float)
        self.mixtures = list(mixtures)
        if len(self.mixtures) != len(self.breakpoints) - 1:
            raise ValueError("need one mixture per cell")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def from_pure(cls, s: StepStrategy) -> "BehavioralStrategy":
        return cls(s.breakpoints, [MixedAction.point(a) for a in s.actions])

    @property
    def lo(self) -> float:
        return float(self.breakpoints[0])

    @property
    def hi(self) -> float:
        return float(self.breakpoints[-1])

    def eval(self, t: float) -> MixedAction:
        idx = int(np.searchsorted(self.breakpoints, float(t), side="right") - 1)
        idx = min(max(idx, 0), len(self.mixtures) - 1)
        return self.mixtures[idx]

    def cells(self) -> list[tuple[float, float, MixedAction]]:
        return [(float(self.breakpoints[k]), float(self.breakpoints[k + 1]), self.mixtures[k])
                for k in range(len(self.mixtures))]

    def is_completely_mixed(self, space: ActionSpace) -> tuple[bool, Optional[tuple]]:
        """Positive mass on every open set; returns (ok, offending cell)."""
        for lo, hi, mix in self.cells():
            if space.is_finite:
                if not mix.is_completely_mixed_finite(space.actions):
                    return False, (lo, hi)
            else:
                has_uniform = any(w > 0 for _, w in mix.uniforms)
                ok = has_uniform
                if space.mode == "quit-interval":
                    ok = ok and mix.mass_at(space.quit_action) > 0
                if not ok:
                    return False, (lo, hi)
        return True, None


Strategy = Union[StepStrategy, BehavioralStrategy]


# ---------------------------------------------------------------------------
# The game
# ---------------------------------------------------------------------------


@dataclass
class BayesGame:
    """n-player Bayesian game with ordered types and lattice actions.

    ``payoff(i, actions, types)`` evaluates player i's ex-post payoff;
    ``types`` has shape (n, ...) and the result broadcasts over the
    trailing axes.  ``poly_degree`` (when set) declares the maximal
    polynomial degree of the payoff in each type variable, which makes
    cellwise Gauss-Legendre integration exact.
    """

    n: int
    type_spaces: list[TypeSpace]
    action_spaces: list[ActionSpace]
    density: JointDensity
    payoff: Callable
    smoothness: str = "continuous"  # "continuous" | "piecewise-with-ties"
    bound: float = np.inf
    poly_degree: Optional[int] = None
    name: str = ""

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two players")
        if len(self.type_spaces) != self.n or len(self.action_spaces) != self.n:
            raise ValueError("per-player space lists must have length n")

    def u(self, i: int, actions, types) -> np.ndarray:
        return np.asarray(self.payoff(i, tuple(actions), np.asarray(types, dtype=float)))

    def quad_order(self, override: Optional[int] = None) -> int:
        if override is not None:
            return override
        if self.poly_degree is not None:
            return max(4, (self.poly_degree + 2) // 2 + 1)
        return 32


def _opponent_cells(strategy: Strategy) -> list[tuple[float, float, list, list]]:
    """Cells as (lo, hi, [(action, weight)], [((alo, ahi), weight)])."""
    if isinstance(strategy, StepStrategy):
        return [(lo, hi, [(a, 1.0)], []) for lo, hi, a in strategy.cells()]
    if isinstance(strategy, BehavioralStrategy):
        return [(lo, hi, list(mix.atoms), list(mix.uniforms))
                for lo, hi, mix in strategy.cells()]
    raise TypeError(f"unsupported strategy type {type(strategy)!r}")


def interim_payoff_batch(game: BayesGame, i: int, a_i, t_vec,
                         others: dict, order: Optional[int] = None) -> np.ndarray:
    """Interim payoff of action a_i at each type in ``t_vec``.

    ``others`` maps opponent index -> strategy.  Opponent strategies are
    pure step functions or behavioral (cellwise mixed) strategies.  The
    integral over opponents' types is split at their strategy
    breakpoints and evaluated with tensor Gauss-Legendre quadrature,
    which is exact for declared-polynomial payoffs under independent
    densities.
    """
    t_vec = np.atleast_1d(np.asarray(t_vec, dtype=float))
    opp = sorted(j for j in others if j != i)
    if set(opp) != {j for j in range(game.n) if j != i}:
        raise ValueError("need a strategy for every opponent")
    q = game.quad_order(order)
    cells_per_opp = [_opponent_cells(others[j]) for j in opp]
    out = np.zeros(t_vec.shape)
    general = game.density.marginals is None
    if general:
        marg = np.asarray(game.density.marginal_i(i, t_vec), dtype=float)
        if np.any(marg <= 0):
            raise ZeroDivisionError("conditional section with zero mass")

    for combo in itertools.product(*cells_per_opp):
        # type-axis quadrature nodes for this cell combination
        axes = [gl_nodes(lo, hi, q) for lo, hi, _, _ in combo]
        # mixture expansion: atoms plus uniform action components
        comps_per_opp = []
        for (lo, hi, atoms, uniforms) in combo:
            comps = [("atom", a, w) for a, w in atoms]
            comps += [("uniform", rng_, w) for rng_, w in uniforms]
            comps_per_opp.append(comps)
        for choice in itertools.product(*comps_per_opp):
            weight = 1.0
            actions = [None] * game.n
            actions[i] = a_i
            extra_axes = []  # (opponent slot, lo, hi)
            for k, (kind, payload, w) in enumerate(choice):
                weight *= w
                if kind == "atom":
                    actions[opp[k]] = payload
                else:
                    extra_axes.append((opp[k], payload))
            if weight == 0.0:
                continue
            out += weight * _integrate_cell(game, i, actions, t_vec, opp, combo,
                                            axes, extra_axes, q, general)
    if general:
        out = out / marg
    return out


def _integrate_cell(game, i, actions, t_vec, opp, combo, axes, extra_axes, q, general):
    n_t = len(opp)
    n_u = len(extra_axes)
    T = t_vec.shape[0]
    # layout: axis 0 -> types batch, axes 1..n_t -> opponent types,
    # axes n_t+1.. -> uniform action components
    shape = (T,) + tuple(q for _ in range(n_t + n_u))
    types = np.empty((game.n,) + shape)
    types[i] = t_vec.reshape((T,) + (1,) * (n_t + n_u))
    w_total = np.ones(shape)
    for k, j in enumerate(opp):
        x, w = axes[k]
        ax_shape = [1] * (n_t + n_u + 1)
        ax_shape[k + 1] = q
        types[j] = x.reshape(ax_shape)
        w_total = w_total * w.reshape(ax_shape)
    act_arrays = list(actions)
    for k, (j, (alo, ahi)) in enumerate(extra_axes):
        x, w = gl_nodes(alo, ahi, q)
        ax_shape = [1] * (n_t + n_u + 1)
        ax_shape[n_t + 1 + k] = q
        act_arrays[j] = x.reshape(ax_shape)
        w_total = w_total * (w / (ahi - alo)).reshape(ax_shape)
    if general:
        w_total = w_total * game.density.density(types)
    else:
        for k, j in enumerate(opp):
            w_total = w_total * game.density.marginals[j].density(types[j])
    vals = game.u(i, act_arrays, types)
    return np.sum(vals * w_total, axis=tuple(range(1, n_t + n_u + 1)))


def interim_payoff(game: BayesGame, i: int, a_i, t_i: float, others: dict,
                   order: Optional[int] = None) -> float:
    """Interim payoff at a single type point."""
    if not game.type_spaces[i].contains(t_i):
        raise ValueError("type outside the type box")
    return float(interim_payoff_batch(game, i, a_i, [t_i], others, order)[0])


def interim_payoff_mixed(game: BayesGame, i: int, sigma: MixedAction, t_i,
                         others: dict, order: Optional[int] = None) -> float:
    """Expected interim payoff of a mixed action.

    The expectation exchanges the mixture summation with the opponent
    integration, so the result is the weight-sum of pure interim payoffs
    plus integrated uniform components.
    """
    total = 0.0
    for a, w in sigma.atoms:
        total += w * interim_payoff(game, i, a, t_i, others, order)
    for (alo, ahi), w in sigma.uniforms:
        x, wq = gl_nodes(alo, ahi, game.quad_order(order))
        vals = np.array([interim_payoff(game, i, float(b), t_i, others, order) for b in x])
        total += w * float(np.sum(vals * wq)) / (ahi - alo)
    return total


def mc_interim_oracle(game: BayesGame, i: int, a_i, t_i: float, others: dict,
                      samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of the interim payoff with standard error.

    Independent of the quadrature path: draws opponent types from the
    conditional density, realizes opponent mixtures, and averages the
    ex-post payoff.  Deterministic given the seed.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    t = game.density.sample_conditional(i, t_i, samples, rng)
    opp = [j for j in range(game.n) if j != i]
    drawn: dict[int, np.ndarray] = {}
    for j in opp:
        s = others[j]
        if isinstance(s, StepStrategy):
            drawn[j] = np.array([s.eval(float(tj)) for tj in t[j]], dtype=object)
        else:
            drawn[j] = np.array([s.eval(float(tj)).sample(rng) for tj in t[j]],
                                dtype=object)
    vals = np.empty(samples)
    numeric = all(np.isscalar(a) and not isinstance(a, tuple)
                  for j in opp for a in drawn[j][:1])
    if numeric:
        actions = [None] * game.n
        actions[i] = a_i
        for j in opp:
            actions[j] = drawn[j].astype(float)
        vals = game.u(i, actions, t)
    else:
        key = lambda k: tuple(drawn[j][k] for j in opp)
        groups: dict = {}
        for k in range(samples):
            groups.setdefault(key(k), []).append(k)
        for prof, idxs in groups.items():
            actions = [None] * game.n
            actions[i] = a_i
            for pos, j in enumerate(opp):
                actions[j] = prof[pos]
            vals[idxs] = game.u(i, actions, t[:, idxs])
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return mean, stderr


@dataclass
class GridMaximizer:
    """Approximate maximizer set over an interval action space."""

    maximizers: list[float]
    values: list[float]
    grid_step: float
    approximate: bool = True


def best_response_set(game: BayesGame, i: int, t_i: float, others: dict,
                      tol: float = 1e-9, grid: int = 129,
                      order: Optional[int] = None):
    """All actions within tol of the best interim payoff.

    Finite action spaces are maximized exactly.  Interval spaces are
    searched on a dyadic grid refined until the maximizer moves by less
    than tol; the result is flagged approximate.
    """
    space = game.action_spaces[i]
    if space.is_finite:
        vals = {a: interim_payoff(game, i, a, t_i, others, order)
                for a in space.actions}
        vmax = max(vals.values())
        return [a for a in space.actions if vals[a] >= vmax - tol]
    lo, hi = space.lo, space.hi
    pts = np.linspace(lo, hi, grid)
    step = pts[1] - pts[0]
    best = None
    while True:
        vals = np.array([interim_payoff(game, i, float(b), t_i, others, order)
                         for b in pts])
        k = int(np.argmax(vals))
        new_best = float(pts[k])
        if best is not None and abs(new_best - best) < tol:
            best = new_best
            break
        best = new_best
        if step < tol:
            break
        lo2, hi2 = max(lo, best - step), min(hi, best + step)
        pts = np.linspace(lo2, hi2, grid)
        step = pts[1] - pts[0]
    vmax = float(np.max(vals))
    maxers = [float(b) for b, v in zip(pts, vals) if v >= vmax - tol]
    return GridMaximizer(maximizers=maxers, values=[vmax] * len(maxers),
                         grid_step=float(step))
