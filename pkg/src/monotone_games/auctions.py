"""Generalized auctions with a quit option and uniform tie-breaking.

A generalized auction specifies, per player, a winner payoff W_i(b_i, v),
a per-unit cost C_i(b_i), an entry fee Phi_i(b_i), and a common demand
D(b).  Bids live in {Q} u [0, b_bar_i] with Q < 0 meaning quit.  The
highest bid above Q wins, ties split uniformly:

    u_i(b, v) = (W_i(b_i, v) - C_i(b_i)) D(b) P_i(b) - Phi_i(b_i)

with P_i(Q, .) = 0 and Phi_i(Q) = 0.  First-price and all-pay auctions
and Bertrand price competition are instances.

Values are kept in unit coordinates internally (density on [0,1]^n);
per-player affine records map to the physical supports, so examples
with supports like [0,5] x [7,8] round-trip exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .conditions import ConditionReport
from .games import (JointDensity, StepStrategy, TypeSpace, gl_nodes)

TIE_TOL = 1e-12


@dataclass
class GeneralizedAuction:
    """Auction parameters; evaluators take physical values.

    ``W(i, b, v)`` must broadcast: b scalar or array, v of shape
    (n, ...).  ``D`` receives the full bid profile (quit entries keep
    the value Q).  ``density`` lives on the unit box; ``value_lo`` /
    ``value_hi`` record the affine map to physical values.
    """

    n: int
    b_bar: np.ndarray
    quit_action: float
    W: Callable
    C: Callable
    Phi: Callable
    D: Callable
    density: JointDensity
    value_lo: np.ndarray
    value_hi: np.ndarray
    private_values: bool = False
    d_constant: bool = False
    name: str = ""
    # reserved per-player demand slot; the common-D path is the only one
    # shipped, anything else is rejected (experimental)
    per_player_demand: Optional[Callable] = None

    def __post_init__(self):
        self.b_bar = np.asarray(self.b_bar, dtype=float)
        self.value_lo = np.asarray(self.value_lo, dtype=float)
        self.value_hi = np.asarray(self.value_hi, dtype=float)
        if self.quit_action >= 0:
            raise ValueError("quit action must be strictly negative")
        if np.any(self.b_bar <= 0):
            raise ValueError("bid caps must be positive")
        if self.per_player_demand is not None:
            raise NotImplementedError(
                "per-player demand is a reserved slot; only the common-D "
                "path is supported")

    @property
    def Q(self) -> float:
        return self.quit_action

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        shape = (self.n,) + (1,) * (u.ndim - 1)
        return self.value_lo.reshape(shape) + \
            (self.value_hi - self.value_lo).reshape(shape) * u

    def to_unit(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        shape = (self.n,) + (1,) * (v.ndim - 1)
        return (v - self.value_lo.reshape(shape)) / \
            (self.value_hi - self.value_lo).reshape(shape)

    def unit_of(self, i: int, v_i: float) -> float:
        return (float(v_i) - self.value_lo[i]) / (self.value_hi[i] - self.value_lo[i])

    def bid_space_contains(self, i: int, b) -> bool:
        return b == self.quit_action or (-TIE_TOL <= b <= self.b_bar[i] + TIE_TOL)


def ex_post_payoff(auction: GeneralizedAuction, bids, values) -> np.ndarray:
    """Expected payoff vector under the uniform tie lottery.

    ``bids`` and ``values`` (physical) have shape (n,) or (n, draws).
    Winners at the shared maximum above Q get P_i = 1/#winners.
    """
    b = np.asarray(bids, dtype=float)
    v = np.asarray(values, dtype=float)
    scalar = b.ndim == 1
    if scalar:
        b = b[:, None]
        v = v[:, None]
    for j in range(auction.n):
        bad = ~((b[j] == auction.Q) | ((b[j] >= -TIE_TOL) & (b[j] <= auction.b_bar[j] + TIE_TOL)))
        if np.any(bad):
            raise ValueError(f"bid out of range for player {j}")
    active = b > auction.Q
    neg = np.where(active, b, -np.inf)
    top = np.max(neg, axis=0)
    any_active = np.isfinite(top)
    winners = active & (np.abs(b - top) <= TIE_TOL) & any_active
    n_win = np.sum(winners, axis=0)
    d_vals = np.asarray(auction.D(b), dtype=float)
    out = np.zeros_like(b)
    for i in range(auction.n):
        share = np.where(winners[i], 1.0 / np.maximum(n_win, 1), 0.0)
        wi = np.asarray(auction.W(i, b[i], v), dtype=float)
        ci = np.asarray(auction.C(i, b[i]), dtype=float)
        fee = np.asarray(auction.Phi(i, b[i]), dtype=float)
        out[i] = np.where(active[i], (wi - ci) * d_vals * share - fee, 0.0)
    return out[:, 0] if scalar else out


# ---------------------------------------------------------------------------
# Interim payoffs against mixed opponent "kinds"
# ---------------------------------------------------------------------------
#
# kinds[j] is one of
#   ("strategy", StepStrategy)   monotone step strategy on [lo_j, hi_j]
#   ("bid", x)                   constant bid x (possibly Q)
#   ("quit", None)               always quits
#   ("uniform", None)            bid uniform on [0, b_bar_j], value-independent
#
# This is the workhorse behind the tremble partition expansion.


def _strategy_cells_unit(auction: GeneralizedAuction, j: int, s: StepStrategy):
    lo, hi = auction.value_lo[j], auction.value_hi[j]
    out = []
    for clo, chi, bid in s.cells():
        out.append(((clo - lo) / (hi - lo), (chi - lo) / (hi - lo), float(bid)))
    return out


def _d_win_factor(auction, i, b, fixed_profile, uniform_axes, order):
    """E over the uniform axes of D(b) restricted to the win box."""
    if not uniform_axes:
        prof = np.array(fixed_profile, dtype=float)
        return 1.0 if auction.d_constant else float(auction.D(prof.reshape(-1, 1))[0])
    if auction.d_constant:
        f = 1.0
        for j in uniform_axes:
            f *= max(0.0, min(b, auction.b_bar[j])) / auction.b_bar[j]
        return f
    axes = []
    for j in uniform_axes:
        top = min(b, auction.b_bar[j])
        if top <= 0:
            return 0.0
        axes.append((j,) + gl_nodes(0.0, top, order))
    grids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    prof = np.empty((auction.n,) + grids[0].shape)
    for j in range(auction.n):
        prof[j] = fixed_profile[j]
    w = np.ones(grids[0].shape)
    for k, (j, x, wk) in enumerate(axes):
        prof[j] = grids[k]
        shape = [1] * len(axes)
        shape[k] = -1
        w = w * wk.reshape(shape) / auction.b_bar[j]
    return float(np.sum(np.asarray(auction.D(prof)) * w))


def interim_vs_kinds(auction: GeneralizedAuction, i: int, b_i, v_i: float,
                     kinds: dict, order: int = 16) -> float:
    """Interim payoff of bid b_i at physical value v_i.

    Integrates over opponents' values (conditioned on v_i) and the
    uniform bid components.  Strategy opponents' bids are constant on
    their value cells, so the win region decomposes cell by cell;
    within a cell only the demand factor still depends on the uniform
    axes.
    """
    if b_i == auction.Q:
        return 0.0
    if not auction.bid_space_contains(i, b_i):
        raise ValueError("bid out of range")
    b_i = float(b_i)
    u_i = auction.unit_of(i, v_i)
    opps = sorted(j for j in kinds if j != i)
    strat_players, cell_lists = [], []
    fixed_kind_bids = {}
    uniform_axes = []
    for j in opps:
        kind, payload = kinds[j]
        if kind == "strategy":
            strat_players.append(j)
            cell_lists.append(_strategy_cells_unit(auction, j, payload))
        elif kind == "bid":
            fixed_kind_bids[j] = float(payload)
        elif kind == "quit":
            fixed_kind_bids[j] = auction.Q
        elif kind == "uniform":
            uniform_axes.append(j)
        else:
            raise ValueError(f"unknown opponent kind {kind!r}")

    fee = float(np.asarray(auction.Phi(i, b_i)).ravel()[0])
    independent = auction.density.marginals is not None
    interdependent = not auction.private_values
    total = 0.0
    for combo in itertools.product(*cell_lists) if cell_lists else [()]:
        fixed = dict(fixed_kind_bids)
        boxes = {}
        for j, (ulo, uhi, bid) in zip(strat_players, combo):
            fixed[j] = bid
            boxes[j] = (ulo, uhi)
        others_active = [bb for bb in fixed.values() if bb > auction.Q]
        top = max(others_active) if others_active else -np.inf
        lose = top > b_i + TIE_TOL
        tied = sum(1 for bb in others_active if abs(bb - b_i) <= TIE_TOL)
        # conditional mass of the cell box and E[(W - C) | box]
        mass, ew = _value_expectation(auction, i, b_i, u_i, boxes, order,
                                      independent, interdependent)
        if mass <= 0:
            continue
        if lose:
            total += -fee * mass
            continue
        prof = np.full(auction.n, auction.Q)
        prof[i] = b_i
        for j, bb in fixed.items():
            prof[j] = bb
        dfac = _d_win_factor(auction, i, b_i, prof, uniform_axes, order)
        total += ew * dfac / (1.0 + tied) - fee * mass
    return total


def _value_expectation(auction, i, b_i, u_i, boxes, order, independent,
                       interdependent):
    """(conditional mass of the box set, E[(W_i - C_i) 1{box}])."""
    c_val = float(np.asarray(auction.C(i, b_i)).ravel()[0])
    if independent and not interdependent:
        mass = 1.0
        for j, (ulo, uhi) in boxes.items():
            x, w = gl_nodes(max(ulo, 0.0), min(uhi, 1.0), order)
            mass *= float(np.sum(auction.density.marginals[j].density(x) * w)) \
                if uhi > ulo else 0.0
        v_phys = auction.value_lo[i] + (auction.value_hi[i] - auction.value_lo[i]) * u_i
        v = np.zeros((auction.n, 1))
        v[i, 0] = v_phys
        w_val = float(np.asarray(auction.W(i, b_i, v)).ravel()[0])
        return mass, (w_val - c_val) * mass
    # general: tensor quadrature over all opponents' unit coordinates,
    # restricted to the boxes of strategy players
    opps = [j for j in range(auction.n) if j != i]
    axes = []
    for j in opps:
        lo, hi = boxes.get(j, (0.0, 1.0))
        if hi <= lo:
            return 0.0, 0.0
        axes.append((j,) + gl_nodes(max(lo, 0.0), min(hi, 1.0), order))
    grids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    u = np.empty((auction.n,) + grids[0].shape)
    u[i] = u_i
    w_total = np.ones(grids[0].shape)
    for k, (j, x, wk) in enumerate(axes):
        u[j] = grids[k]
        shape = [1] * len(axes)
        shape[k] = -1
        w_total = w_total * wk.reshape(shape)
    w_total = w_total * auction.density.conditional_weight(i, u_i, u)
    v_phys = auction.from_unit(u)
    wvals = np.asarray(auction.W(i, b_i, v_phys), dtype=float)
    mass = float(np.sum(w_total))
    ew = float(np.sum((wvals - c_val) * w_total))
    return mass, ew


def interim_payoff_auction(auction: GeneralizedAuction, i: int, b_i, v_i: float,
                           others: dict, order: int = 16) -> float:
    """Unperturbed interim payoff against opponents' step strategies."""
    kinds = {j: ("strategy", s) for j, s in others.items() if j != i}
    return interim_vs_kinds(auction, i, b_i, v_i, kinds, order=order)


# ---------------------------------------------------------------------------
# Fast vectorized interim grid for two-player private-value auctions
# ---------------------------------------------------------------------------


def bid_distribution(auction: GeneralizedAuction, j: int,
                     strategy: StepStrategy, order: int = 16):
    """Unconditional bid distribution induced by a step strategy:
    (bids, masses) arrays, one entry per strategy cell."""
    cells = _strategy_cells_unit(auction, j, strategy)
    bids = np.array([c[2] for c in cells])
    masses = np.empty(len(cells))
    for c, (ulo, uhi, _) in enumerate(cells):
        x, w = gl_nodes(max(ulo, 0.0), min(uhi, 1.0), order)
        masses[c] = float(np.sum(auction.density.marginals[j].density(x) * w)) \
            if uhi > ulo else 0.0
    return bids, masses


def interim_grid_2p(auction: GeneralizedAuction, i: int, bids: np.ndarray,
                    v_grid: np.ndarray, opp,
                    m: Optional[int] = None, order: int = 16) -> np.ndarray:
    """Matrix of interim payoffs, rows = values, columns = bids.

    Private-value two-player fast path.  ``opp`` is either the
    opponent's step strategy or, for independent values, a pair
    (bids, masses) describing the opponent's bid distribution.  With
    ``m`` set, returns the perturbed-game payoff without the
    bid-independent residual (enough for best responses).  Quit columns
    evaluate to exactly zero.
    """
    if auction.n != 2 or not auction.private_values:
        raise ValueError("fast path requires two players and private values")
    j = 1 - i
    bids = np.asarray(bids, dtype=float)
    v_grid = np.asarray(v_grid, dtype=float)
    B, V = bids.size, v_grid.size
    is_q = bids == auction.Q
    independent = auction.density.marginals is not None
    u_grid = (v_grid - auction.value_lo[i]) / (auction.value_hi[i] - auction.value_lo[i])
    if isinstance(opp, StepStrategy):
        cells = _strategy_cells_unit(auction, j, opp)
        cbids = np.array([c[2] for c in cells])
        # conditional cell masses, shape (V, C)
        masses = np.empty((V, len(cells)))
        for c, (ulo, uhi, _) in enumerate(cells):
            x, w = gl_nodes(max(ulo, 0.0), min(uhi, 1.0), order)
            if independent:
                masses[:, c] = float(np.sum(
                    auction.density.marginals[j].density(x) * w))
            else:
                for k, ui in enumerate(u_grid):
                    u = np.zeros((2, x.size))
                    u[i] = ui
                    u[j] = x
                    masses[k, c] = float(np.sum(
                        auction.density.conditional_weight(i, ui, u) * w))
    else:
        if not independent:
            raise ValueError("bid-distribution opponents need independent values")
        cbids, probs = opp
        cbids = np.asarray(cbids, dtype=float)
        masses = np.broadcast_to(np.asarray(probs, dtype=float), (V, cbids.size))
    # winner payoff term (W - C)(b, v), shape (V, B)
    v = np.zeros((2, V, 1))
    v[i] = v_grid[:, None]
    wmat = np.asarray(auction.W(i, bids[None, :], v), dtype=float)
    wmat = np.broadcast_to(wmat, (V, B)).copy()
    cvec = np.asarray(auction.C(i, np.where(is_q, 0.0, bids)), dtype=float)
    fee = np.asarray(auction.Phi(i, np.where(is_q, 0.0, bids)), dtype=float)
    net = wmat - cvec[None, :]

    win = (bids[:, None] > cbids[None, :] + TIE_TOL)          # (B, C)
    tie = np.abs(bids[:, None] - cbids[None, :]) <= TIE_TOL
    if auction.d_constant:
        dmat = np.ones((B, cbids.size))
        dint = np.clip(np.where(is_q, 0.0, bids), 0.0, auction.b_bar[j]) / auction.b_bar[j]
        dq = np.ones(B)
    else:
        prof = np.empty((2, B, cbids.size))
        prof[i] = bids[:, None]
        prof[j] = cbids[None, :]
        dmat = np.asarray(auction.D(prof), dtype=float)
        dint = np.empty(B)
        for k, b in enumerate(bids):
            if b == auction.Q:
                dint[k] = 0.0
                continue
            top = min(b, auction.b_bar[j])
            if top <= 0:
                dint[k] = 0.0
                continue
            x, w = gl_nodes(0.0, top, order)
            pr = np.empty((2, x.size))
            pr[i] = b
            pr[j] = x
            dint[k] = float(np.sum(np.asarray(auction.D(pr)) * w)) / auction.b_bar[j]
        prof_q = np.empty((2, B))
        prof_q[i] = np.where(is_q, 0.0, bids)
        prof_q[j] = auction.Q
        dq = np.asarray(auction.D(prof_q), dtype=float)
    s_fac = win * dmat + 0.5 * tie * dmat                     # (B, C)
    v_strat = net * (masses @ s_fac.T) - fee[None, :]
    if m is None:
        out = v_strat
    else:
        v_unif = net * dint[None, :] - fee[None, :]
        v_quit = net * dq[None, :] - fee[None, :]
        lam = 1.0 - 1.0 / m
        out = lam * (lam * v_strat + (0.5 / m) * (v_unif + v_quit))
    out = np.where(is_q[None, :], 0.0, out)
    return out


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def _uniform_unit_density(n: int) -> JointDensity:
    return JointDensity([TypeSpace(0.0, 1.0) for _ in range(n)],
                        kind="independent-uniform")


def build_first_price(n: int, density: Optional[JointDensity] = None,
                      b_bar: Optional[Sequence[float]] = None,
                      quit_action: float = -1.0,
                      value_lo: Optional[Sequence[float]] = None,
                      value_hi: Optional[Sequence[float]] = None) -> GeneralizedAuction:
    """First-price auction: W_i = v_i, C_i = b_i, D = 1, Phi = 0."""
    value_lo = np.zeros(n) if value_lo is None else np.asarray(value_lo, float)
    value_hi = np.ones(n) if value_hi is None else np.asarray(value_hi, float)
    if b_bar is None:
        b_bar = value_hi.copy()
    return GeneralizedAuction(
        n=n, b_bar=np.asarray(b_bar, float), quit_action=quit_action,
        W=lambda i, b, v: np.broadcast_arrays(np.asarray(v)[i], np.asarray(b))[0],
        C=lambda i, b: np.asarray(b, dtype=float),
        Phi=lambda i, b: np.zeros_like(np.asarray(b, dtype=float)),
        D=lambda b: np.ones(np.asarray(b).shape[1:]),
        density=density if density is not None else _uniform_unit_density(n),
        value_lo=value_lo, value_hi=value_hi,
        private_values=True, d_constant=True, name="first-price")


def build_all_pay(n: int, w: Callable, density: Optional[JointDensity] = None,
                  b_bar: Optional[Sequence[float]] = None,
                  quit_action: float = -1.0,
                  value_lo: Optional[Sequence[float]] = None,
                  value_hi: Optional[Sequence[float]] = None,
                  private_values: bool = False,
                  validation_grid: int = 5) -> GeneralizedAuction:
    """All-pay auction: W_i = w_i, C_i = 0, D = 1, Phi_i = b_i.

    ``w(i, b, v)`` is the winner's prize.  Rejected with a witness if the
    prize fails positivity, monotonicity in values, increasing
    differences in (b, v), or strict decrease of w - b in b on the
    validation grid.
    """
    value_lo = np.zeros(n) if value_lo is None else np.asarray(value_lo, float)
    value_hi = np.ones(n) if value_hi is None else np.asarray(value_hi, float)
    if b_bar is None:
        b_bar = np.ones(n)
    rep = _validate_prize(w, n, np.asarray(b_bar, float), value_lo, value_hi,
                          validation_grid)
    if not rep.holds:
        raise ValueError(f"prize function rejected: {rep.witness}")
    return GeneralizedAuction(
        n=n, b_bar=np.asarray(b_bar, float), quit_action=quit_action,
        W=w,
        C=lambda i, b: np.zeros_like(np.asarray(b, dtype=float)),
        Phi=lambda i, b: np.asarray(b, dtype=float),
        D=lambda b: np.ones(np.asarray(b).shape[1:]),
        density=density if density is not None else _uniform_unit_density(n),
        value_lo=value_lo, value_hi=value_hi,
        private_values=private_values, d_constant=True, name="all-pay")


def _validate_prize(w, n, b_bar, value_lo, value_hi, grid) -> ConditionReport:
    bgrid = np.linspace(0.0, float(np.min(b_bar)), grid)
    vaxes = [np.linspace(value_lo[j], value_hi[j], grid) for j in range(n)]
    mesh = np.stack(np.meshgrid(*vaxes, indexing="ij"))
    for i in range(n):
        for bl, bh in itertools.combinations(bgrid, 2):
            d = np.asarray(w(i, bh, mesh)) - np.asarray(w(i, bl, mesh))
            # increasing differences: d increasing along every axis
            for ax in range(n):
                if np.any(np.diff(d, axis=ax) < -1e-9):
                    return ConditionReport(
                        "all-pay-prize", False,
                        witness={"item": "difference not increasing in values",
                                 "b_lo": float(bl), "b_hi": float(bh), "axis": ax})
            surplus_h = np.asarray(w(i, bh, mesh)) - bh
            surplus_l = np.asarray(w(i, bl, mesh)) - bl
            if np.any(surplus_h >= surplus_l - 1e-12):
                if np.any(surplus_h >= surplus_l):
                    return ConditionReport(
                        "all-pay-prize", False,
                        witness={"item": "w - b not strictly decreasing in b",
                                 "b_lo": float(bl), "b_hi": float(bh)})
        vals = np.asarray(w(i, bgrid[0], mesh))
        if np.any(vals <= 0):
            return ConditionReport("all-pay-prize", False,
                                   witness={"item": "prize not positive"})
    return ConditionReport("all-pay-prize", True, grid=f"{grid} points per axis")


def build_bertrand(n: int, demand: Callable, p_bar: Sequence[float],
                   density: Optional[JointDensity] = None,
                   quit_action: float = -1.0,
                   validation_grid: int = 9) -> GeneralizedAuction:
    """Bertrand competition with private costs, mapped into bid space.

    ``demand(p)`` is the market demand at the price profile p (shape
    (n, ...)).  Bids are b_i = p_bar_i - p_i and values v_i = 1 - c_i;
    quitting firms are treated as posting the cap price.  Rejected if
    p * demand is not increasing in the own price on the grid.
    """
    p_bar = np.asarray(p_bar, dtype=float)
    if np.any(p_bar < 1.0):
        raise ValueError("price caps must be at least 1")
    rep = _validate_inelastic(demand, n, p_bar, validation_grid)
    if not rep.holds:
        raise ValueError(f"demand rejected: {rep.witness}")

    def D(b):
        b = np.asarray(b, dtype=float)
        shape = (n,) + (1,) * (b.ndim - 1)
        prices = p_bar.reshape(shape) - np.where(b == quit_action, 0.0, b)
        return demand(prices)

    return GeneralizedAuction(
        n=n, b_bar=p_bar.copy(), quit_action=quit_action,
        W=lambda i, b, v: np.broadcast_arrays(
            p_bar[i] + np.asarray(v)[i] - 1.0, np.asarray(b))[0],
        C=lambda i, b: np.asarray(b, dtype=float),
        Phi=lambda i, b: np.zeros_like(np.asarray(b, dtype=float)),
        D=D,
        density=density if density is not None else _uniform_unit_density(n),
        value_lo=np.zeros(n), value_hi=np.ones(n),
        private_values=True, d_constant=False, name="bertrand")


def _validate_inelastic(demand, n, p_bar, grid) -> ConditionReport:
    for i in range(n):
        own = np.linspace(1e-6, p_bar[i], grid)
        for others in itertools.product(*[np.linspace(1e-6, p_bar[j], 3)
                                          for j in range(n) if j != i]):
            p = np.empty((n, own.size))
            p[i] = own
            for k, j in enumerate([j for j in range(n) if j != i]):
                p[j] = others[k]
            rev = own * np.asarray(demand(p), dtype=float)
            dvals = np.asarray(demand(p), dtype=float)
            if np.any(np.diff(rev) < -1e-9):
                return ConditionReport(
                    "bertrand-inelasticity", False,
                    witness={"item": "p * demand decreasing in own price",
                             "others": [float(x) for x in others],
                             "prices": own.tolist(), "revenue": rev.tolist()})
            if np.any(dvals < -1e-12):
                return ConditionReport("bertrand-inelasticity", False,
                                       witness={"item": "negative demand"})
    return ConditionReport("bertrand-inelasticity", True,
                           grid=f"{grid} own prices x 3 per opponent")


# ---------------------------------------------------------------------------
# Assumption checks
# ---------------------------------------------------------------------------


def validate_assumption3(auction: GeneralizedAuction, grid: int = 7) -> dict:
    """Grid checks of the six structural conditions on (W, C, Phi, D).

    Continuity is not certified numerically; the monotonicity, sign, and
    increasing-difference items each get their own verdict with a
    witness on failure.
    """
    n = auction.n
    reports: dict[str, ConditionReport] = {}
    baxes = [np.linspace(0.0, auction.b_bar[j], grid) for j in range(n)]
    vaxes = [np.linspace(auction.value_lo[j], auction.value_hi[j], grid)
             for j in range(n)]
    mesh = np.stack(np.meshgrid(*vaxes, indexing="ij"))

    # (1) W strictly increasing in v_i, increasing in v_-i, positive for v_i > 0
    item = ConditionReport("W-monotone", True, grid=f"{grid} per axis")
    for i in range(n):
        for b in baxes[i]:
            wv = np.asarray(auction.W(i, b, mesh), dtype=float)
            wv = np.broadcast_to(wv, mesh.shape[1:])
            if np.any(np.diff(wv, axis=i) <= 1e-12):
                item = ConditionReport(
                    "W-monotone", False, grid=f"{grid} per axis",
                    witness={"player": i, "bid": float(b),
                             "item": "W not strictly increasing in own value"})
                break
            for ax in range(n):
                if ax != i and np.any(np.diff(wv, axis=ax) < -1e-9):
                    item = ConditionReport(
                        "W-monotone", False, grid=f"{grid} per axis",
                        witness={"player": i, "bid": float(b), "axis": ax,
                                 "item": "W decreasing in an opponent value"})
                    break
            if not item.holds:
                break
        if not item.holds:
            break
    reports["1-W-monotone"] = item

    # (2) C, Phi increasing with zero at 0
    item = ConditionReport("costs-increasing", True, grid=f"{grid} bids")
    for i in range(n):
        c = np.asarray(auction.C(i, baxes[i]), dtype=float)
        f = np.asarray(auction.Phi(i, baxes[i]), dtype=float)
        if abs(c[0]) > 1e-12 or abs(f[0]) > 1e-12 or \
                np.any(np.diff(c) < -1e-9) or np.any(np.diff(f) < -1e-9):
            item = ConditionReport("costs-increasing", False,
                                   grid=f"{grid} bids",
                                   witness={"player": i, "C": c.tolist(),
                                            "Phi": f.tolist()})
            break
    reports["2-costs"] = item

    # (3) D positive and increasing in b
    item = ConditionReport("demand-positive-increasing", True, grid=f"{grid} per axis")
    bmesh = np.stack(np.meshgrid(*baxes, indexing="ij"))
    dv = np.asarray(auction.D(bmesh), dtype=float)
    dv = np.broadcast_to(dv, bmesh.shape[1:])
    if np.any(dv <= 0):
        item = ConditionReport("demand-positive-increasing", False,
                               grid=f"{grid} per axis",
                               witness={"item": "D not positive on grid"})
    else:
        for ax in range(n):
            if np.any(np.diff(dv, axis=ax) < -1e-9):
                item = ConditionReport(
                    "demand-positive-increasing", False, grid=f"{grid} per axis",
                    witness={"item": "D decreasing in a bid", "axis": ax})
                break
    reports["3-demand"] = item

    # (4) increasing differences of W in (b_i, v)
    item = ConditionReport("W-increasing-differences", True, grid=f"{grid} per axis")
    for i in range(n):
        for bl, bh in itertools.combinations(baxes[i], 2):
            d = np.asarray(auction.W(i, bh, mesh), dtype=float) - \
                np.asarray(auction.W(i, bl, mesh), dtype=float)
            d = np.broadcast_to(d, mesh.shape[1:])
            for ax in range(n):
                if np.any(np.diff(d, axis=ax) < -1e-9):
                    item = ConditionReport(
                        "W-increasing-differences", False, grid=f"{grid} per axis",
                        witness={"player": i, "b_lo": float(bl), "b_hi": float(bh),
                                 "axis": ax})
                    break
            if not item.holds:
                break
        if not item.holds:
            break
    reports["4-W-idc"] = item

    # (5) sign of W - C independent of opponents' values
    item = ConditionReport("sign-independence", True, grid=f"{grid} per axis")
    for i in range(n):
        for b in baxes[i]:
            wv = np.broadcast_to(np.asarray(auction.W(i, b, mesh), dtype=float),
                                 mesh.shape[1:])
            net = wv - float(np.asarray(auction.C(i, b)).ravel()[0])
            sign = np.where(net > 1e-9, 1, np.where(net < -1e-9, -1, 0))
            # collapse opponents' axes; the sign must be constant per own-value section
            sec_min = sign.copy()
            sec_max = sign.copy()
            for ax in range(n):
                if ax != i:
                    sec_min = np.min(sec_min, axis=ax, keepdims=True)
                    sec_max = np.max(sec_max, axis=ax, keepdims=True)
            if np.any((sec_min != sec_max) & ~((sec_min == 0) | (sec_max == 0))):
                bad = np.argwhere(sec_min != sec_max)
                item = ConditionReport(
                    "sign-independence", False, grid=f"{grid} per axis",
                    witness={"player": i, "bid": float(b),
                             "own_value_index": bad[0].tolist(),
                             "item": "sign of W - C varies with opponent values"})
                break
        if not item.holds:
            break
    reports["5-sign"] = item

    # (6) winner payoff strictly decreasing in the own bid
    item = ConditionReport("winner-payoff-decreasing", True, grid=f"{grid} per axis")
    for i in range(n):
        opp_choices = itertools.product(
            *[list(np.linspace(0.0, auction.b_bar[j], 3)) + [auction.Q]
              for j in range(n) if j != i])
        for others in opp_choices:
            prof = np.empty((n, baxes[i].size))
            prof[i] = baxes[i]
            for k, j in enumerate([j for j in range(n) if j != i]):
                prof[j] = others[k]
            dv = np.broadcast_to(np.asarray(auction.D(prof), dtype=float),
                                 (baxes[i].size,))
            corners = [mesh[(slice(None),) + (0,) * n],
                       mesh[(slice(None),) + (grid - 1,) * n]]
            for vprof in corners:
                v = np.repeat(vprof.reshape(n, 1), baxes[i].size, axis=1)
                wv = np.broadcast_to(np.asarray(auction.W(i, baxes[i], v), dtype=float),
                                     (baxes[i].size,))
                cv = np.asarray(auction.C(i, baxes[i]), dtype=float)
                fv = np.asarray(auction.Phi(i, baxes[i]), dtype=float)
                win = (wv - cv) * dv - fv
                if np.any(np.diff(win) >= -1e-12):
                    item = ConditionReport(
                        "winner-payoff-decreasing", False, grid=f"{grid} per axis",
                        witness={"player": i, "others": [float(x) for x in others],
                                 "winner_payoffs": win.tolist()})
                    break
            if not item.holds:
                break
        if not item.holds:
            break
    reports["6-winner-decreasing"] = item

    reports["all_hold"] = all(r.holds for k, r in reports.items()
                              if isinstance(r, ConditionReport))
    return reports


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------


@dataclass
class SimulationStats:
    draws: int
    revenue_mean: float
    revenue_ci: tuple[float, float]
    efficiency_rate: float
    tie_frequency: float
    payoff_means: list[float]
    no_winner_rate: float


def simulate(auction: GeneralizedAuction, profile: Sequence[StepStrategy],
             draws: int, seed: int) -> SimulationStats:
    """Monte Carlo play of a pure strategy profile.

    Ties are resolved by the seeded lottery, so realized payoffs are a
    sample from the tie distribution rather than its expectation.
    Deterministic given the seed.
    """
    if draws < 1:
        raise ValueError("need at least one draw")
    rng = np.random.default_rng(seed)
    u = auction.density.sample(draws, rng)
    v = auction.from_unit(u)
    b = np.empty((auction.n, draws))
    for i in range(auction.n):
        b[i] = np.array([float(profile[i].eval(float(x))) for x in v[i]])
    active = b > auction.Q
    neg = np.where(active, b, -np.inf)
    top = np.max(neg, axis=0)
    any_active = np.isfinite(top)
    tied = active & (np.abs(b - top) <= TIE_TOL)
    n_tied = np.sum(tied, axis=0)
    # seeded uniform lottery among tied winners
    pick = np.floor(rng.uniform(0.0, 1.0, draws) * np.maximum(n_tied, 1)).astype(int)
    winner = np.full(draws, -1)
    for s in range(draws):
        if any_active[s]:
            winner[s] = np.flatnonzero(tied[:, s])[min(pick[s], n_tied[s] - 1)]
    d_vals = np.asarray(auction.D(b), dtype=float)
    d_vals = np.broadcast_to(d_vals, (draws,))
    payoffs = np.zeros((auction.n, draws))
    revenue = np.zeros(draws)
    for i in range(auction.n):
        stay = active[i]
        wi = np.asarray(auction.W(i, b[i], v), dtype=float)
        ci = np.asarray(auction.C(i, b[i]), dtype=float)
        fee = np.asarray(auction.Phi(i, b[i]), dtype=float)
        wins = winner == i
        payoffs[i] = np.where(stay, np.where(wins, (wi - ci) * d_vals, 0.0) - fee, 0.0)
        revenue += np.where(wins, ci * d_vals, 0.0) + np.where(stay, fee, 0.0)
    vmax = np.max(v, axis=0)
    efficient = np.array([winner[s] >= 0 and v[winner[s], s] >= vmax[s] - TIE_TOL
                          for s in range(draws)])
    rmean = float(np.mean(revenue))
    rse = float(np.std(revenue, ddof=1) / np.sqrt(draws)) if draws > 1 else 0.0
    return SimulationStats(
        draws=draws,
        revenue_mean=rmean,
        revenue_ci=(rmean - 1.96 * rse, rmean + 1.96 * rse),
        efficiency_rate=float(np.mean(efficient)),
        tie_frequency=float(np.mean(n_tied >= 2)),
        payoff_means=[float(np.mean(payoffs[i])) for i in range(auction.n)],
        no_winner_rate=float(np.mean(~any_active)),
    )


def tie_probability(auction: GeneralizedAuction, profile: Sequence[StepStrategy],
                    order: int = 32) -> float:
    """Probability that two or more players share the highest bid above Q.

    Computed from the exact distribution of bids induced by the step
    profile (independent values; general densities integrate the joint).
    """
    cells = [_strategy_cells_unit(auction, j, profile[j]) for j in range(auction.n)]
    total = 0.0
    for combo in itertools.product(*cells):
        bids = np.array([c[2] for c in combo])
        active = bids > auction.Q
        if not np.any(active):
            continue
        top = np.max(bids[active])
        if np.sum(np.abs(bids[active] - top) <= TIE_TOL) < 2:
            continue
        if auction.density.marginals is not None:
            mass = 1.0
            for j, (ulo, uhi, _) in enumerate(combo):
                x, w = gl_nodes(max(ulo, 0.0), min(uhi, 1.0), order)
                mass *= float(np.sum(auction.density.marginals[j].density(x) * w))
        else:
            axes = [gl_nodes(max(ulo, 0.0), min(uhi, 1.0), order)
                    for (ulo, uhi, _) in combo]
            grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
            u = np.stack(grids)
            w_tot = np.ones(grids[0].shape)
            for k, (_, wk) in enumerate(axes):
                shape = [1] * auction.n
                shape[k] = -1
                w_tot = w_tot * wk.reshape(shape)
            mass = float(np.sum(auction.density.density(u) * w_tot))
        total += mass
    return total
