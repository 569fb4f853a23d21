"""Built-in scenario library.

Each scenario packages a game or auction together with its reference
strategy profiles and perturbation sequences, so condition checks,
solves, and verification runs can be reproduced by name from the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .auctions import GeneralizedAuction, build_first_price
from .games import (ActionSpace, BayesGame, BehavioralStrategy, JointDensity,
                    MixedAction, StepStrategy, TypeSpace)

#: positive root of 40 r^2 + 173 r - 31 = 0; breakpoint of player 2's
#: strategy in the non-monotone perfect profile of the exam-SCC scenario
R_BINARY = (-173.0 + math.sqrt(34889.0)) / 80.0


@dataclass
class Scenario:
    name: str
    kind: str  # "game" | "auction"
    game: Optional[BayesGame] = None
    auction: Optional[GeneralizedAuction] = None
    profiles: dict = field(default_factory=dict)
    sequences: dict = field(default_factory=dict)
    notes: str = ""


# ---------------------------------------------------------------------------
# Binary-action game where single crossing holds but increasing
# differences fails ("exam-SCC")
# ---------------------------------------------------------------------------


def _scc_payoff(i, actions, t):
    a1, a2 = actions
    t = np.asarray(t, dtype=float)
    if i == 0:
        if a1 == 1 and a2 == 1:
            return 2.5 - (4.0 / 3.0) * t[0]
        if a1 == 1 and a2 == 2:
            return 0.5 + 0.5 * t[1]
        if a1 == 2 and a2 == 1:
            return 55.0 / 24.0 - t[1] / 6.0 - (7.0 / 6.0) * t[0]
        return 2.0 + t[1] - (7.0 / 6.0) * t[0]
    table = {(1, 1): -1.0, (1, 2): 1.0, (2, 1): 7.0, (2, 2): -1.0}
    return np.full(t.shape[1:], table[(a1, a2)])


def exam_scc() -> Scenario:
    game = BayesGame(
        n=2,
        type_spaces=[TypeSpace(0.0, 1.0), TypeSpace(0.0, 1.0)],
        action_spaces=[ActionSpace.finite([1, 2]), ActionSpace.finite([1, 2])],
        density=JointDensity([TypeSpace(0.0, 1.0), TypeSpace(0.0, 1.0)]),
        payoff=_scc_payoff,
        bound=10.0,
        poly_degree=1,
        name="exam-SCC",
    )
    sp = game.action_spaces
    monotone_eq = [StepStrategy([0.0, 0.8, 1.0], [1, 2], sp[0]),
                   StepStrategy([0.0, 0.875, 1.0], [1, 2], sp[1])]
    r = R_BINARY
    perfect_eq = [StepStrategy([0.0, 0.2, 1.0], [2, 1], sp[0]),
                  StepStrategy([0.0, r, 1.0], [2, 1], sp[1])]

    def paper_sequence(k: int):
        if k <= 4:
            raise ValueError("sequence defined for k > 4")
        g1 = BehavioralStrategy(
            [0.0, 0.2, 1.0],
            [MixedAction([(1, 4.0 / k), (2, 1.0 - 4.0 / k)]),
             MixedAction([(1, 1.0 - 1.0 / k), (2, 1.0 / k)])])
        g2 = BehavioralStrategy(
            [0.0, r, 1.0],
            [MixedAction([(1, 1.0 / k), (2, 1.0 - 1.0 / k)]),
             MixedAction([(1, 1.0 - 1.0 / k), (2, 1.0 / k)])])
        return [g1, g2]

    return Scenario(
        name="exam-SCC", kind="game", game=game,
        profiles={"monotone": monotone_eq, "perfect": perfect_eq},
        sequences={"paper": paper_sequence},
        notes="single crossing holds, increasing differences fails; the "
              "unique monotone equilibrium is not perfect")


# ---------------------------------------------------------------------------
# Diamond-action game: quasi-supermodular but not supermodular ("exam-2")
# ---------------------------------------------------------------------------


def _exam2_payoff(i, actions, t):
    a1, a2 = actions
    t = np.asarray(t, dtype=float)
    if i == 1:
        hi = a1 == (1, 1)
        if a2 == 1:
            return np.full(t.shape[1:], 7.0 if hi else -1.0)
        return np.full(t.shape[1:], -1.0 if hi else 1.0)
    low = (t[0] <= 0.5)
    if a1 == (0, 0):
        vals_1 = np.full(t.shape[1:], 2.0)
        vals_2 = -0.5 * t[1]
    elif a1 == (0, 1):
        vals_1 = 41.0 / 24.0 + t[1] / 6.0
        vals_2 = 2.0 - t[1]
    elif a1 == (1, 0):
        vals_1 = np.where(low, -7.0, 7.0)
        vals_2 = vals_1
    else:
        vals_1 = np.where(low, -29.0 / 4.0, 27.0 / 4.0)
        vals_2 = np.where(low, -21.0 / 4.0, 35.0 / 4.0)
    vals_1 = np.broadcast_to(vals_1, t.shape[1:])
    vals_2 = np.broadcast_to(vals_2, t.shape[1:])
    return vals_1 if a2 == 1 else vals_2


def exam_2() -> Scenario:
    diamond = [(0, 0), (0, 1), (1, 0), (1, 1)]
    game = BayesGame(
        n=2,
        type_spaces=[TypeSpace(0.0, 1.0), TypeSpace(0.0, 1.0)],
        action_spaces=[ActionSpace.finite(diamond), ActionSpace.finite([1, 2])],
        density=JointDensity([TypeSpace(0.0, 1.0), TypeSpace(0.0, 1.0)]),
        payoff=_exam2_payoff,
        bound=10.0,
        poly_degree=1,
        name="exam-2",
    )
    sp = game.action_spaces
    monotone_eq = [
        StepStrategy([0.0, 0.5, 0.8, 1.0], [(0, 0), (1, 0), (1, 1)], sp[0]),
        StepStrategy([0.0, 0.875, 1.0], [1, 2], sp[1]),
    ]
    perfect_eq = [
        StepStrategy([0.0, 0.5, 0.8, 1.0], [(0, 1), (1, 0), (1, 1)], sp[0]),
        StepStrategy([0.0, 0.875, 1.0], [1, 2], sp[1]),
    ]

    def paper_sequence(k: int):
        if k <= 7:
            raise ValueError("sequence defined for k > 7")
        others = lambda played: [a for a in diamond if a != played]
        g1 = BehavioralStrategy(
            [0.0, 0.5, 0.8, 1.0],
            [MixedAction([(played, 1.0 - 9.0 / (4.0 * k))] +
                         [(a, 3.0 / (4.0 * k)) for a in others(played)])
             for played in [(0, 1), (1, 0)]] +
            [MixedAction([((1, 1), 1.0 - 3.0 / k)] +
                         [(a, 1.0 / k) for a in others((1, 1))])])
        g2 = BehavioralStrategy(
            [0.0, 0.875, 1.0],
            [MixedAction([(1, 1.0 - 1.0 / k), (2, 1.0 / k)]),
             MixedAction([(1, 7.0 / k), (2, 1.0 - 7.0 / k)])])
        return [g1, g2]

    return Scenario(
        name="exam-2", kind="game", game=game,
        profiles={"monotone": monotone_eq, "perfect": perfect_eq},
        sequences={"paper": paper_sequence},
        notes="increasing differences and quasi-supermodularity hold, "
              "supermodularity fails; the unique monotone equilibrium is "
              "not perfect")


# ---------------------------------------------------------------------------
# Binary supermodular coordination game ("exam-super")
# ---------------------------------------------------------------------------


def _super_payoff(i, actions, t):
    t = np.asarray(t, dtype=float)
    val = 1.0 if actions == (0, 0) else 0.0
    return np.full(t.shape[1:], val)


def exam_super() -> Scenario:
    game = BayesGame(
        n=2,
        type_spaces=[TypeSpace(0.0, 1.0), TypeSpace(0.0, 1.0)],
        action_spaces=[ActionSpace.finite([0, 1]), ActionSpace.finite([0, 1])],
        density=JointDensity([TypeSpace(0.0, 1.0), TypeSpace(0.0, 1.0)]),
        payoff=_super_payoff,
        bound=1.0,
        poly_degree=0,
        name="exam-super",
    )
    sp = game.action_spaces
    all_zero = [StepStrategy.constant(0.0, 1.0, 0, sp[0]),
                StepStrategy.constant(0.0, 1.0, 0, sp[1])]
    all_one = [StepStrategy.constant(0.0, 1.0, 1, sp[0]),
               StepStrategy.constant(0.0, 1.0, 1, sp[1])]

    def uniform_sequence(m: int):
        mix = MixedAction([(0, 1.0 - 1.0 / m), (1, 1.0 / m)])
        return [BehavioralStrategy([0.0, 1.0], [mix]) for _ in range(2)]

    return Scenario(
        name="exam-super", kind="game", game=game,
        profiles={"all-zero": all_zero, "all-one": all_one},
        sequences={"uniform": uniform_sequence},
        notes="supermodular game with two equilibria; only the all-zero "
              "profile is perfect")


# ---------------------------------------------------------------------------
# Discrete first-price auction with asymmetric supports ("exam-1st")
# ---------------------------------------------------------------------------

FIRST_PRICE_BIDS = list(range(9))


def _first_price_payoff(i, actions, t):
    """Ex-post payoff on the fixed bid grid; quit is not used here."""
    t = np.asarray(t, dtype=float)
    b_own = actions[i]
    b_opp = actions[1 - i]
    if b_own > b_opp:
        p = 1.0
    elif b_own == b_opp:
        p = 0.5
    else:
        p = 0.0
    return (t[i] - b_own) * p


def exam_1st_game() -> BayesGame:
    """The bid-grid auction as a plain Bayesian game on value boxes."""
    spaces = [TypeSpace(0.0, 5.0), TypeSpace(7.0, 8.0)]
    return BayesGame(
        n=2,
        type_spaces=spaces,
        action_spaces=[ActionSpace.finite(FIRST_PRICE_BIDS),
                       ActionSpace.finite(FIRST_PRICE_BIDS)],
        density=JointDensity(spaces),
        payoff=_first_price_payoff,
        smoothness="piecewise-with-ties",
        bound=8.0,
        poly_degree=1,
        name="exam-1st",
    )


def exam_1st() -> Scenario:
    game = exam_1st_game()
    sp = game.action_spaces
    perfect_eq = [StepStrategy([0.0, 1.5, 3.0, 5.0], [0, 1, 3], sp[0]),
                  StepStrategy.constant(7.0, 8.0, 3, sp[1])]
    trivial_eq = [StepStrategy.constant(0.0, 5.0, 5, sp[0]),
                  StepStrategy.constant(7.0, 8.0, 6, sp[1])]

    def paper_sequence(m: int):
        if m < 3:
            raise ValueError("sequence defined for m >= 3")

        def tremble(played):
            atoms = [(k, 1.0 / (8.0 * m)) for k in FIRST_PRICE_BIDS if k != played]
            atoms.append((played, 1.0 - 1.0 / m))
            return MixedAction(atoms)

        b1 = BehavioralStrategy([0.0, 1.5, 3.0, 5.0],
                                [tremble(0), tremble(1), tremble(3)])
        b2 = BehavioralStrategy([7.0, 8.0], [tremble(3)])
        return [b1, b2]

    auction = build_first_price(
        2, b_bar=[8.0, 8.0], quit_action=-1.0,
        value_lo=[0.0, 7.0], value_hi=[5.0, 8.0])

    return Scenario(
        name="exam-1st", kind="game", game=game, auction=auction,
        profiles={"perfect": perfect_eq, "trivial": trivial_eq},
        sequences={"paper": paper_sequence},
        notes="discrete first-price auction; the (5, 6) profile is a "
              "monotone equilibrium in weakly dominated bids")


# ---------------------------------------------------------------------------
# Symmetric second-price auction ("exam-2nd")
# ---------------------------------------------------------------------------


def _second_price_payoff(i, actions, t):
    t = np.asarray(t, dtype=float)
    b_own = actions[i]
    b_opp = actions[1 - i]
    if b_own > b_opp:
        return t[i] - b_opp
    if b_own == b_opp:
        return 0.5 * (t[i] - b_opp)
    return np.zeros(t.shape[1:])


def exam_2nd() -> Scenario:
    spaces = [TypeSpace(1.0, 2.0), TypeSpace(1.0, 2.0)]
    game = BayesGame(
        n=2,
        type_spaces=spaces,
        action_spaces=[ActionSpace.finite([0, 1, 2]), ActionSpace.finite([0, 1, 2])],
        density=JointDensity(spaces),
        payoff=_second_price_payoff,
        smoothness="piecewise-with-ties",
        bound=2.0,
        poly_degree=1,
        name="exam-2nd",
    )
    sp = game.action_spaces
    perfect_eq = [StepStrategy([1.0, 1.5, 2.0], [1, 2], sp[0]),
                  StepStrategy([1.0, 1.5, 2.0], [1, 2], sp[1])]
    trivial_eq = [StepStrategy.constant(1.0, 2.0, 0, sp[0]),
                  StepStrategy.constant(1.0, 2.0, 2, sp[1])]

    def paper_sequence(m: int):
        if m < 3:
            raise ValueError("sequence defined for m >= 3")
        low = MixedAction([(0, 1.0 / m), (1, 1.0 - 2.0 / m), (2, 1.0 / m)])
        high = MixedAction([(0, 1.0 / m), (1, 1.0 / m), (2, 1.0 - 2.0 / m)])
        s = BehavioralStrategy([1.0, 1.5, 2.0], [low, high])
        return [s, s]

    return Scenario(
        name="exam-2nd", kind="game", game=game,
        profiles={"perfect": perfect_eq, "trivial": trivial_eq},
        sequences={"paper": paper_sequence},
        notes="symmetric second-price auction; bidding the second step at "
              "3/2 is perfect, the (0, 2) profile plays a dominated bid")


# ---------------------------------------------------------------------------
# Continuum first-price auction for the double-limit procedure
# ---------------------------------------------------------------------------


def first_price_iid(n: int = 2) -> Scenario:
    auction = build_first_price(n, quit_action=-1.0)
    return Scenario(
        name="first-price-iid", kind="auction", auction=auction,
        notes="symmetric continuum first-price auction with iid uniform "
              "values; the limiting bid function is v (n-1)/n")


SCENARIOS: dict[str, Callable[[], Scenario]] = {
    "exam-SCC": exam_scc,
    "exam-2": exam_2,
    "exam-super": exam_super,
    "exam-1st": exam_1st,
    "exam-2nd": exam_2nd,
    "first-price-iid": first_price_iid,
}


def load_scenario(name: str) -> Scenario:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; available: {sorted(SCENARIOS)}")
    return SCENARIOS[name]()
