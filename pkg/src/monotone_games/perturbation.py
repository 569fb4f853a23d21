"""Completely mixed action embeddings and perturbed games.

Two schemes: finite-action games spread 1/m of mass over the whole
action set (uniform by default, any strictly positive weights allowed);
quit-plus-interval auction actions split 1/m equally between a uniform
draw on [0, b_bar] and the quit atom.  Perturbed payoffs are the
expectation of the base payoff under the product of per-player
perturbed actions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .games import (ActionSpace, BayesGame, BehavioralStrategy, MixedAction,
                    StepStrategy, gl_nodes)

QUAD_ORDER = 16


@dataclass(frozen=True)
class PerturbationScheme:
    """Tremble specification: mode, level m, optional finite weights."""

    mode: str  # "finite-dense" | "auction-uniform-quit"
    m: int
    weights: Optional[tuple] = None  # finite mode; None means uniform

    def __post_init__(self):
        if self.m < 2 or int(self.m) != self.m:
            raise ValueError("perturbation level m must be an integer >= 2")
        if self.mode not in ("finite-dense", "auction-uniform-quit"):
            raise ValueError(f"unknown scheme mode {self.mode!r}")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if np.any(w <= 0) or abs(float(np.sum(w)) - 1.0) > 1e-12:
                raise ValueError("weights must be strictly positive and sum to 1")


def perturb_action_finite(a_i, actions: Sequence, m: int,
                          weights: Optional[Sequence[float]] = None) -> MixedAction:
    """Tremble on a finite action set.

    Keeps mass 1 - 1/m on the intended action and spreads 1/m over the
    whole set by the weight vector (uniform by default), so the total
    atom on the intended action is (1 - 1/m) + w(a_i)/m.
    """
    acts = list(actions)
    if a_i not in acts:
        raise ValueError(f"{a_i!r} is not in the action set")
    if weights is None:
        w = np.full(len(acts), 1.0 / len(acts))
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (len(acts),):
            raise ValueError("one weight per action required")
        if np.any(w < 0) or abs(float(np.sum(w)) - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
    atoms = [(a, w[k] / m) for k, a in enumerate(acts)]
    atoms.append((a_i, 1.0 - 1.0 / m))
    return MixedAction(atoms=atoms)


def perturb_action_auction(b_i, m: int, b_bar: float, quit_action: float) -> MixedAction:
    """Tremble on {Q} u [0, b_bar]: keep 1 - 1/m on the intended bid,
    put 1/(2m) on a uniform bid and 1/(2m) on quitting."""
    if not (b_i == quit_action or (0 - 1e-12 <= b_i <= b_bar + 1e-12)):
        raise ValueError(f"bid {b_i!r} outside {{Q}} u [0, {b_bar}]")
    atoms = [(b_i, 1.0 - 1.0 / m), (quit_action, 1.0 / (2.0 * m))]
    uniforms = [((0.0, b_bar), 1.0 / (2.0 * m))]
    return MixedAction(atoms=atoms, uniforms=uniforms)


def perturb_action(a, space: ActionSpace, scheme: PerturbationScheme) -> MixedAction:
    if scheme.mode == "finite-dense":
        return perturb_action_finite(a, space.actions, scheme.m, scheme.weights)
    return perturb_action_auction(a, scheme.m, space.hi, space.quit_action)


def embed_strategy(strategy: StepStrategy, space: ActionSpace,
                   scheme: PerturbationScheme) -> BehavioralStrategy:
    """Apply the action tremble cell by cell; the mixing weights do not
    depend on the type within a cell."""
    mixtures = [perturb_action(a, space, scheme) for a in strategy.actions]
    return BehavioralStrategy(strategy.breakpoints, mixtures)


@dataclass
class PerturbedGame:
    """Finite-action game with trembled payoffs u^m(a, t) = E u(a~, t)."""

    base: BayesGame
    scheme: PerturbationScheme

    def __post_init__(self):
        if self.scheme.mode != "finite-dense":
            raise ValueError("PerturbedGame wraps finite-action games; "
                             "auctions go through the expansion machinery")
        for sp in self.base.action_spaces:
            if not sp.is_finite:
                raise ValueError("all action spaces must be finite")
        self._combos_cache: dict = {}

    @property
    def m(self) -> int:
        return self.scheme.m

    def _combos(self, actions: tuple) -> list[tuple[float, tuple]]:
        """Weighted pure action profiles of the product tremble.

        Memoized per intended profile; step strategies hit finitely many
        of these in the solver's inner loops.
        """
        key = tuple(actions)
        if key not in self._combos_cache:
            per_player = []
            for j, a in enumerate(actions):
                mix = perturb_action(a, self.base.action_spaces[j], self.scheme)
                per_player.append(mix.atoms)
            combos = []
            for choice in itertools.product(*per_player):
                w = float(np.prod([c[1] for c in choice]))
                combos.append((w, tuple(c[0] for c in choice)))
            self._combos_cache[key] = combos
        return self._combos_cache[key]

    def payoff(self, i: int, actions, types) -> np.ndarray:
        types = np.asarray(types, dtype=float)
        out = np.zeros(types.shape[1:])
        for w, profile in self._combos(tuple(actions)):
            out = out + w * self.base.u(i, profile, types)
        return out

    def as_game(self) -> BayesGame:
        """View of the perturbed game as a plain Bayesian game."""
        return BayesGame(
            n=self.base.n,
            type_spaces=self.base.type_spaces,
            action_spaces=self.base.action_spaces,
            density=self.base.density,
            payoff=self.payoff,
            smoothness=self.base.smoothness,
            bound=self.base.bound,
            poly_degree=self.base.poly_degree,
            name=f"{self.base.name}^m={self.m}",
        )


def perturbed_payoff(pg: PerturbedGame, i: int, actions, types) -> float:
    """Pointwise trembled payoff u_i^m(a, t)."""
    return float(np.asarray(pg.payoff(i, actions, np.asarray(types, dtype=float)
                                      .reshape(len(actions), ))).ravel()[0])


# ---------------------------------------------------------------------------
# Auction trembles: partition expansion of the perturbed interim payoff
# ---------------------------------------------------------------------------


def opponent_partitions(opponents: Sequence[int]):
    """All (I1, I2, I3) splits: uniform trembles, quitters, strategy players."""
    opps = list(opponents)
    for r1 in range(len(opps) + 1):
        for i1 in itertools.combinations(opps, r1):
            rest = [j for j in opps if j not in i1]
            for r2 in range(len(rest) + 1):
                for i2 in itertools.combinations(rest, r2):
                    i3 = tuple(j for j in rest if j not in i2)
                    yield i1, i2, i3


@dataclass
class ExpansionTerm:
    uniform_players: tuple
    quit_players: tuple
    strategy_players: tuple
    weight: float
    integral: float

    @property
    def value(self) -> float:
        return self.weight * self.integral


def interim_vs_embedded(auction, i: int, b_i, v_i: float, others: dict,
                        m: int, order: int = QUAD_ORDER) -> float:
    """Interim payoff of bid b_i against tremble-embedded opponents.

    Expands the opponents' three-component mixtures into the partition
    sum: each opponent independently plays a uniform bid (weight 1/2m),
    quits (1/2m), or follows its strategy (1 - 1/m).
    """
    from .auctions import interim_vs_kinds

    opps = sorted(j for j in others if j != i)
    total = 0.0
    for i1, i2, i3 in opponent_partitions(opps):
        w = ((1.0 - 1.0 / m) ** len(i3)) * ((1.0 / (2.0 * m)) ** (len(i1) + len(i2)))
        kinds = {}
        for j in i1:
            kinds[j] = ("uniform", None)
        for j in i2:
            kinds[j] = ("quit", None)
        for j in i3:
            kinds[j] = ("strategy", others[j])
        total += w * interim_vs_kinds(auction, i, b_i, v_i, kinds, order=order)
    return total


def auction_residual(auction, i: int, v_i: float, others: dict, m: int,
                     order: int = QUAD_ORDER) -> float:
    """Own-tremble remainder: (1/2m) times the uniform-bid average of the
    interim payoff against embedded opponents.  Independent of the
    intended bid."""
    x, w = gl_nodes(0.0, float(auction.b_bar[i]), order)
    vals = np.array([interim_vs_embedded(auction, i, float(b), v_i, others, m, order)
                     for b in x])
    avg = float(np.sum(vals * w)) / float(auction.b_bar[i])
    return avg / (2.0 * m)


def auction_interim_expansion(auction, m: int, i: int, b_i, v_i: float,
                              others: dict, order: int = QUAD_ORDER,
                              include_residual: bool = True):
    """Perturbed-game interim payoff of player i with its term breakdown.

    Returns (value, terms, residual) where each term covers one
    partition of the opponents into uniform / quit / strategy players,
    weighted (1 - 1/m)^(|I3|+1) * (1/2m)^(|I1|+|I2|), and the residual
    collects the player's own uniform tremble.
    """
    if auction.n > 4:
        raise ValueError("partition expansion supported for up to 4 players")
    if m < 2:
        raise ValueError("m must be at least 2")
    from .auctions import interim_vs_kinds

    opps = sorted(j for j in others if j != i)
    terms = []
    for i1, i2, i3 in opponent_partitions(opps):
        w = ((1.0 - 1.0 / m) ** (len(i3) + 1)) * \
            ((1.0 / (2.0 * m)) ** (len(i1) + len(i2)))
        kinds = {}
        for j in i1:
            kinds[j] = ("uniform", None)
        for j in i2:
            kinds[j] = ("quit", None)
        for j in i3:
            kinds[j] = ("strategy", others[j])
        integral = interim_vs_kinds(auction, i, b_i, v_i, kinds, order=order)
        terms.append(ExpansionTerm(i1, i2, i3, w, integral))
    residual = auction_residual(auction, i, v_i, others, m, order) \
        if include_residual else 0.0
    value = sum(t.value for t in terms) + residual
    return value, terms, residual
