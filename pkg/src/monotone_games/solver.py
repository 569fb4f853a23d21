"""Equilibrium computation: monotone best-response iteration, refining
residual search, tremble schedules, and the auction double limit.

Best-response iteration settles games with strict incentives (and is
Tarski-monotone from extremal starts in supermodular games).  The
knife-edge mutual-indifference equilibria of the counterexample games
are unreachable by deterministic selections, so a coarse-to-fine scan
of monotone cutoff profiles minimizes the best-response residual
instead; both paths report the residual they actually achieved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .auctions import (GeneralizedAuction, interim_grid_2p, interim_vs_kinds,
                       tie_probability, validate_assumption3)
from .games import (ActionSpace, BayesGame, BehavioralStrategy, MixedAction,
                    StepStrategy, interim_payoff_batch)
from .perturbation import (PerturbationScheme, PerturbedGame, embed_strategy,
                           perturb_action_auction)
from .verification import (PerfectionCertificate, LevelRecord,
                           prohorov_distance, sample_types)


@dataclass
class SolveSettings:
    """Knobs for every solver entry point.

    ``cutoff_grid`` is the target resolution of cutoff coordinates;
    ``accept_residual`` is the best-response gap below which a profile
    counts as an equilibrium of the (possibly perturbed) game;
    ``m_schedule`` must be strictly increasing; auction bid grids are
    nested dyadic grids with per-player offsets so that distinct
    players never share a positive bid.
    """

    cutoff_grid: float = 2.0 ** -13
    tol: float = 1e-9
    accept_residual: float = 2e-3
    damping: float = 0.5
    max_iter: int = 120
    type_grid: int = 64
    residual_types: int = 17
    coarse: int = 9
    beam: int = 10
    refine_points: int = 5
    m_schedule: tuple = (4, 8, 16, 32, 64)
    bid_grid_schedule: tuple = (4, 5, 6, 7, 8)
    value_cells: int = 256
    quad_order: Optional[int] = None
    update: str = "jacobi"  # or "gauss-seidel"
    seed: int = 0

    def __post_init__(self):
        if list(self.m_schedule) != sorted(set(self.m_schedule)):
            raise ValueError("m schedule must be strictly increasing")


@dataclass
class BrDiagnostic:
    """Non-monotone raw best-response selection; evidence of a failing
    increasing-differences condition."""

    player: int
    type_lo: float
    type_hi: float
    action_lo: object
    action_hi: object

    def __str__(self):
        return (f"player {self.player}: selection {self.action_lo} at "
                f"t={self.type_lo:.6g} but {self.action_hi} at t={self.type_hi:.6g}")


@dataclass
class EquilibriumResult:
    profile: list
    residual: float
    converged: bool
    method: str
    iterations: int
    trace: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def cutoffs(self) -> list[list[float]]:
        return [list(np.asarray(s.breakpoints[1:-1], dtype=float))
                for s in self.profile]


# ---------------------------------------------------------------------------
# Best-response steps on finite-action games
# ---------------------------------------------------------------------------


def _max_selection(space: ActionSpace, br_actions: list):
    """Canonical monotone selection: the maximal element of the set."""
    if space.lattice is None:
        return br_actions[-1]  # actions kept sorted
    j = br_actions[0]
    for a in br_actions[1:]:
        j = space.lattice.join(j, a)
    if j in br_actions:
        return j
    # not a sublattice: fall back to some maximal element
    maximal = [a for a in br_actions
               if not any(b != a and space.lattice.leq(a, b) for b in br_actions)]
    return maximal[-1]


def monotone_br_step(game: BayesGame, i: int, others: dict,
                     type_grid: int = 64, tol: float = 1e-9,
                     order: Optional[int] = None):
    """Best response of player i as a step strategy on a midpoint grid.

    Selects the maximal element of the epsilon-best-response set at
    every grid midpoint.  Returns a BrDiagnostic instead of a strategy
    when the raw selection is not weakly increasing.
    """
    ts = game.type_spaces[i]
    space = game.action_spaces[i]
    edges = np.linspace(ts.lo, ts.hi, type_grid + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    vals = np.stack([interim_payoff_batch(game, i, a, mids, others, order)
                     for a in space.actions])
    vmax = np.max(vals, axis=0)
    chosen = []
    for k in range(len(mids)):
        br = [a for r, a in enumerate(space.actions) if vals[r, k] >= vmax[k] - tol]
        chosen.append(_max_selection(space, br))
    for k in range(len(mids) - 1):
        if not space.leq(chosen[k], chosen[k + 1]):
            return BrDiagnostic(i, float(mids[k]), float(mids[k + 1]),
                                chosen[k], chosen[k + 1])
    return StepStrategy(edges, chosen, space).simplified()


def _profile_distance(a: StepStrategy, b: StepStrategy, space: ActionSpace,
                      probes: np.ndarray) -> float:
    return max(space.metric(a.eval(float(t)), b.eval(float(t))) for t in probes)


def _extremal_profile(game: BayesGame, which: str) -> list[StepStrategy]:
    out = []
    for i in range(game.n):
        sp = game.action_spaces[i]
        ts = game.type_spaces[i]
        if sp.lattice is not None:
            a = sp.lattice.bottom if which == "low" else sp.lattice.top
        else:
            a = sp.actions[0] if which == "low" else sp.actions[-1]
        out.append(StepStrategy.constant(ts.lo, ts.hi, a, sp))
    return out


# ---------------------------------------------------------------------------
# Residuals over monotone cutoff profiles
# ---------------------------------------------------------------------------


def _chain_profiles(game: BayesGame):
    """Per-player maximal action chains; a monotone profile picks one
    chain per player plus a sorted cutoff vector along it."""
    chains = []
    for sp in game.action_spaces:
        if sp.lattice is not None:
            chains.append(sp.lattice.maximal_chains())
        else:
            chains.append([list(sp.actions)])
    return chains


def _strategy_from_cutoffs(chain: list, cuts: np.ndarray, ts, space) -> StepStrategy:
    cuts = np.sort(np.asarray(cuts, dtype=float))
    bps = [ts.lo]
    acts = []
    for k, a in enumerate(chain):
        hi = ts.hi if k == len(chain) - 1 else float(np.clip(cuts[k], ts.lo, ts.hi))
        if hi > bps[-1] + 1e-12:
            bps.append(hi)
            acts.append(a)
    if not acts:
        return StepStrategy.constant(ts.lo, ts.hi, chain[-1], space)
    bps[-1] = ts.hi
    return StepStrategy(bps, acts, space).simplified()


def profile_residual(game: BayesGame, profile: Sequence[StepStrategy],
                     residual_types: int = 17, order: Optional[int] = None,
                     pad: float = 1e-6) -> float:
    """Sup over sampled types of the best-response gap, all players.

    Types are a uniform grid plus every breakpoint offset inward on each
    side; for the piecewise-polynomial interim payoffs of interest the
    gap attains its sup arbitrarily close to a breakpoint or a grid
    point.
    """
    worst = 0.0
    for i in range(game.n):
        ts = game.type_spaces[i]
        pts = [np.linspace(ts.lo + 1e-9, ts.hi - 1e-9, residual_types)]
        inner = np.asarray(profile[i].breakpoints[1:-1], dtype=float)
        for b in inner:
            pts.append(np.asarray([b - pad, b + pad]))
        pts = np.unique(np.clip(np.concatenate(pts), ts.lo + 1e-12, ts.hi - 1e-12))
        if inner.size:
            # breakpoints themselves are null exception points
            on_break = np.min(np.abs(pts[:, None] - inner[None, :]), axis=1) < pad / 2
            pts = pts[~on_break]
        others = {j: profile[j] for j in range(game.n) if j != i}
        space = game.action_spaces[i]
        vals = np.stack([interim_payoff_batch(game, i, a, pts, others, order)
                         for a in space.actions])
        idx = [space.actions.index(profile[i].eval(float(t))) for t in pts]
        gap = np.max(vals, axis=0) - vals[idx, np.arange(len(pts))]
        worst = max(worst, float(np.max(gap)))
    return worst


def _profile_from_vec(game, chain_combo, n_cuts, vec):
    profile = []
    pos = 0
    for i, chain in enumerate(chain_combo):
        profile.append(_strategy_from_cutoffs(
            chain, vec[pos:pos + n_cuts[i]], game.type_spaces[i],
            game.action_spaces[i]))
        pos += n_cuts[i]
    return profile


def _residual_search(game: BayesGame, settings: SolveSettings,
                     order: Optional[int] = None):
    """Beamed coarse-to-fine scan over monotone cutoff profiles.

    A full coarse scan per action chain seeds a beam of candidate
    points; each beam point is refined by shrinking-box grids down to
    the target cutoff resolution.  The beam protects against the
    mutual-indifference landscapes whose coarse minimum sits in a
    neighboring shallow basin.
    """
    chains_per_player = _chain_profiles(game)
    trace = []
    candidates = []  # (residual, order index, chain_combo, n_cuts, vec)
    combos = list(itertools.product(*chains_per_player))
    for combo_idx, chain_combo in enumerate(combos):
        n_cuts = [len(c) - 1 for c in chain_combo]
        total = sum(n_cuts)
        if total > 6:
            raise ValueError("cutoff dimensionality too high for residual search")
        axes = []
        for i, k in enumerate(n_cuts):
            ts = game.type_spaces[i]
            axes.extend([np.linspace(ts.lo, ts.hi, settings.coarse)] * k)
        local_best = np.inf
        for point in (itertools.product(*axes) if total else [()]):
            vec = np.asarray(point, dtype=float)
            profile = _profile_from_vec(game, chain_combo, n_cuts, vec)
            r = profile_residual(game, profile, settings.residual_types, order)
            local_best = min(local_best, r)
            candidates.append((r, len(candidates), chain_combo, n_cuts, vec))
        trace.append({"chains": [str(c) for c in chain_combo],
                      "coarse_residual": local_best})
    candidates.sort(key=lambda c: (c[0], c[1]))
    # per-chain quotas keep the beam from filling with one chain's ties
    quota = max(1, settings.beam // max(len(combos), 1))
    chosen: list[int] = []
    used: dict[int, int] = {}
    for pos, cand in enumerate(candidates):
        cid = id(cand[2])
        if used.get(cid, 0) < quota:
            chosen.append(pos)
            used[cid] = used.get(cid, 0) + 1
    for pos in range(len(candidates)):
        if len(chosen) >= settings.beam:
            break
        if pos not in chosen:
            chosen.append(pos)
    beams = [candidates[pos] for pos in sorted(chosen)[:settings.beam]]

    best = (np.inf, None)
    for r0, _, chain_combo, n_cuts, vec in beams:
        total = sum(n_cuts)
        if total == 0:
            profile = _profile_from_vec(game, chain_combo, n_cuts, vec)
            if r0 < best[0]:
                best = (r0, profile)
            continue
        spans = []
        for i, k in enumerate(n_cuts):
            ts = game.type_spaces[i]
            spans.extend([(ts.lo, ts.hi)] * k)
        lo_all = np.array([s[0] for s in spans])
        hi_all = np.array([s[1] for s in spans])
        step0 = (hi_all - lo_all) / (settings.coarse - 1)
        centre = vec.copy()
        half = step0.astype(float).copy()
        local = (r0, _profile_from_vec(game, chain_combo, n_cuts, vec))
        edge_moves = 0
        while float(np.max(half)) > settings.cutoff_grid / 2.0:
            lo = np.maximum(lo_all, centre - half)
            hi = np.minimum(hi_all, centre + half)
            axes = [np.linspace(lo[d], hi[d], settings.refine_points)
                    for d in range(total)]
            moved = None
            for point in itertools.product(*axes):
                v = np.asarray(point, dtype=float)
                profile = _profile_from_vec(game, chain_combo, n_cuts, v)
                r = profile_residual(game, profile, settings.residual_types, order)
                if r < local[0] - 1e-15:
                    local = (r, profile)
                    moved = v
            if moved is not None:
                centre = moved
                on_edge = np.any((np.abs(moved - lo) < 1e-15) & (lo > lo_all)) or \
                    np.any((np.abs(moved - hi) < 1e-15) & (hi < hi_all))
                if on_edge and edge_moves < 24:
                    # chase an optimum outside the box before shrinking
                    edge_moves += 1
                    continue
            half = half / 2.0
        if local[0] < best[0]:
            best = (local[0], local[1])
    trace.append({"beam": len(beams), "refined_residual": best[0]})
    return best[1], best[0], trace


# ---------------------------------------------------------------------------
# Monotone equilibrium search
# ---------------------------------------------------------------------------


def find_monotone_equilibrium(game: BayesGame, settings: SolveSettings = None,
                              init: str = "extremal-low",
                              order: Optional[int] = None) -> EquilibriumResult:
    """Iterate monotone best responses; fall back to residual search.

    From extremal starts in games whose interim payoffs are supermodular
    the iteration is monotone and the two starts bracket the equilibrium
    set.  Mutual-indifference equilibria (where iteration cycles) are
    located by the coarse-to-fine residual scan instead.
    """
    settings = settings or SolveSettings()
    if init == "custom":
        raise ValueError("pass a profile via init_profile for custom starts")
    profile = _extremal_profile(game, "low" if init != "extremal-high" else "high")
    trace = []
    diagnostics = []
    seen = {}
    probes = [np.linspace(ts.lo + 1e-9, ts.hi - 1e-9, 33)
              for ts in game.type_spaces]
    n_iter = 0
    status = "running"
    for n_iter in range(1, settings.max_iter + 1):
        new_profile = list(profile)
        failed = False
        for i in range(game.n):
            others = {j: (profile[j] if settings.update == "jacobi"
                          else new_profile[j])
                      for j in range(game.n) if j != i}
            step = monotone_br_step(game, i, others, settings.type_grid,
                                    settings.tol, order)
            if isinstance(step, BrDiagnostic):
                diagnostics.append(step)
                failed = True
                break
            new_profile[i] = step
        if failed:
            status = "non-monotone-selection"
            break
        moves = [_profile_distance(profile[i], new_profile[i],
                                   game.action_spaces[i], probes[i])
                 for i in range(game.n)]
        trace.append({"iteration": n_iter, "move": max(moves)})
        key = tuple(tuple((tuple(s.breakpoints), tuple(map(str, s.actions))))
                    for s in new_profile)
        if max(moves) == 0.0:
            status = "fixed-point"
            profile = new_profile
            break
        if key in seen:
            status = "cycle"
            profile = new_profile
            break
        seen[key] = n_iter
        profile = new_profile
    else:
        status = "max-iterations"

    if status == "fixed-point":
        res = profile_residual(game, profile, settings.residual_types, order)
        return EquilibriumResult(profile=profile, residual=res,
                                 converged=res <= settings.accept_residual,
                                 method="br-iteration", iterations=n_iter,
                                 trace=trace, diagnostics=diagnostics)
    # knife-edge or failing case: residual scan over monotone profiles
    profile2, res2, scan_trace = _residual_search(game, settings, order)
    trace.append({"phase": "residual-search", "status_before": status,
                  "scan": scan_trace})
    return EquilibriumResult(profile=profile2, residual=res2,
                             converged=res2 <= settings.accept_residual,
                             method=f"residual-search (after {status})",
                             iterations=n_iter, trace=trace,
                             diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# Uniqueness scan
# ---------------------------------------------------------------------------


@dataclass
class UniquenessScan:
    zero_profiles: list
    minimal_cells: list
    grid_nodes: int
    cell_width: list
    residual_min: float

    @property
    def unique_minimal_cell(self) -> bool:
        return len(self.minimal_cells) == 1


def uniqueness_scan(game: BayesGame, grid: int = 65, tol: float = 1e-9,
                    settings: SolveSettings = None,
                    order: Optional[int] = None) -> UniquenessScan:
    """Exhaustive residual scan over cutoff tuples on a node grid.

    Supports up to two cutoff parameters per player.  Reports every
    tuple with residual below tol and the cells achieving the minimal
    residual.
    """
    settings = settings or SolveSettings()
    chains_per_player = _chain_profiles(game)
    for i, chains in enumerate(chains_per_player):
        if any(len(c) - 1 > 2 for c in chains):
            raise ValueError("dimensionality too high for the uniqueness scan")
    zeros = []
    minimal = []
    best = np.inf
    widths = []
    for chain_combo in itertools.product(*chains_per_player):
        n_cuts = [len(c) - 1 for c in chain_combo]
        axes = []
        for i, k in enumerate(n_cuts):
            ts = game.type_spaces[i]
            axes.extend([np.linspace(ts.lo, ts.hi, grid)] * k)
        widths = [float(a[1] - a[0]) for a in axes] or [0.0]
        for point in itertools.product(*axes) if axes else [()]:
            vec = np.asarray(point)
            profile = []
            pos = 0
            for i, chain in enumerate(chain_combo):
                profile.append(_strategy_from_cutoffs(
                    chain, vec[pos:pos + n_cuts[i]], game.type_spaces[i],
                    game.action_spaces[i]))
                pos += n_cuts[i]
            r = profile_residual(game, profile, settings.residual_types, order)
            entry = {"cutoffs": vec.tolist(),
                     "chains": [str(c) for c in chain_combo], "residual": r}
            if r < tol:
                zeros.append(entry)
            if r < best - 1e-12:
                best = r
                minimal = [entry]
            elif r <= best + 1e-12:
                minimal.append(entry)
    return UniquenessScan(zero_profiles=zeros, minimal_cells=minimal,
                          grid_nodes=grid, cell_width=widths, residual_min=best)


# ---------------------------------------------------------------------------
# Perfect monotone equilibrium via tremble schedules
# ---------------------------------------------------------------------------


@dataclass
class PerfectSolveReport:
    result: Optional[EquilibriumResult]
    certificate: Optional[PerfectionCertificate]
    converged: bool
    per_level: list
    reason: str = ""


def find_perfect_monotone_equilibrium(game: BayesGame,
                                      settings: SolveSettings = None,
                                      order: Optional[int] = None) -> PerfectSolveReport:
    """Solve trembled games along the m schedule and certify the limit.

    Follows the extremal-low solution of each trembled game (the
    extremal-high residual is recorded alongside).  Fails with full
    traces when some trembled game has no monotone equilibrium within
    tolerance or the solutions do not stabilize; non-existence itself is
    an analytic statement and is never claimed.
    """
    settings = settings or SolveSettings()
    per_level = []
    solutions = []
    probes = [np.linspace(ts.lo + 1e-9, ts.hi - 1e-9, 129)
              for ts in game.type_spaces]
    for m in settings.m_schedule:
        pg = PerturbedGame(game, PerturbationScheme("finite-dense", m))
        res = find_monotone_equilibrium(pg.as_game(), settings, order=order)
        record = {"m": m, "residual": res.residual, "converged": res.converged,
                  "method": res.method,
                  "cutoffs": res.cutoffs(),
                  "diagnostics": [str(d) for d in res.diagnostics]}
        per_level.append(record)
        solutions.append((m, res))
        if not res.converged:
            return PerfectSolveReport(
                result=res, certificate=None, converged=False,
                per_level=per_level,
                reason=f"trembled game at m={m} has no monotone equilibrium "
                       f"within residual {settings.accept_residual:g} "
                       f"(best {res.residual:.3g})")
    # stabilization of the solved profiles across the schedule
    moves = []
    for (m1, r1), (m2, r2) in zip(solutions, solutions[1:]):
        moves.append(max(
            _profile_distance(r1.profile[i], r2.profile[i],
                              game.action_spaces[i], probes[i])
            for i in range(game.n)))
    stab = [mv for mv in moves[-2:]]
    if len(stab) == 2 and any(mv > 0 for mv in stab):
        widths = [ts.hi - ts.lo for ts in game.type_spaces]
        # allow cutoff drift up to 10 grid steps between consecutive levels
        drift_cap = 10.0 * max(widths) / settings.type_grid
        drifts = []
        for (m1, r1), (m2, r2) in list(zip(solutions, solutions[1:]))[-2:]:
            drifts.append(_cutoff_drift(r1.profile, r2.profile))
        if any(d > drift_cap for d in drifts):
            return PerfectSolveReport(
                result=solutions[-1][1], certificate=None, converged=False,
                per_level=per_level,
                reason=f"trembled-game solutions did not stabilize: cutoff "
                       f"drifts {drifts} exceed {drift_cap:.3g}")
    limit = solutions[-1][1]

    def sequence(m: int):
        res = dict(solutions)[m]
        scheme = PerturbationScheme("finite-dense", m)
        return [embed_strategy(res.profile[i], game.action_spaces[i], scheme)
                for i in range(game.n)]

    from .verification import check_perfection
    cert = check_perfection(game, limit.profile, sequence,
                            levels=list(settings.m_schedule),
                            tol_br=max(settings.accept_residual, 1e-8),
                            order=order)
    return PerfectSolveReport(result=limit, certificate=cert,
                              converged=cert.certified, per_level=per_level,
                              reason="" if cert.certified else cert.reason)


def _cutoff_drift(p1: Sequence[StepStrategy], p2: Sequence[StepStrategy]) -> float:
    worst = 0.0
    for a, b in zip(p1, p2):
        c1 = list(np.asarray(a.breakpoints[1:-1]))
        c2 = list(np.asarray(b.breakpoints[1:-1]))
        if len(c1) != len(c2):
            return np.inf
        if c1:
            worst = max(worst, float(np.max(np.abs(np.asarray(c1) - np.asarray(c2)))))
    return worst


# ---------------------------------------------------------------------------
# Generalized auction double limit
# ---------------------------------------------------------------------------


def player_bid_grid(auction: GeneralizedAuction, i: int, k: int,
                    k_max: int) -> np.ndarray:
    """Nested dyadic bid grid with a per-player offset.

    The offset (i+1) * 2^-(k_max+3) keeps every positive grid bid of
    distinct players distinct at all levels, so cross-player ties can
    only happen at Q.
    """
    off = (i + 1) * 2.0 ** -(k_max + 3)
    step = 2.0 ** -k
    pts = np.arange(off, float(auction.b_bar[i]) + 1e-12, step)
    return np.concatenate([[auction.Q], pts])


@dataclass
class AuctionLevelRecord:
    m: int
    k: int
    iterations: int
    converged: bool
    move_from_previous: float
    tie_probability: float
    residual: float


@dataclass
class AuctionSolveReport:
    result: EquilibriumResult
    certificate: PerfectionCertificate
    converged: bool
    levels: list
    assumption3: dict
    reason: str = ""


def _auction_br_pass(auction, i, bids, cell_mids, opp, m, order):
    mat = interim_grid_2p(auction, i, bids, cell_mids, opp, m=m, order=order)
    return _select_max(bids, cell_mids, mat), mat


def _select_max(bids, cell_mids, mat):
    # max selection: highest bid among epsilon-ties
    best = np.max(mat, axis=1)
    sel = np.empty(len(cell_mids))
    for r in range(len(cell_mids)):
        ok = np.flatnonzero(mat[r] >= best[r] - 1e-12)
        sel[r] = bids[ok[-1]]
    return sel


def _bids_to_strategy(auction, i, edges, sel) -> StepStrategy:
    return StepStrategy(edges, list(sel)).simplified()


def solve_generalized_auction(auction: GeneralizedAuction,
                              settings: SolveSettings = None,
                              fixed_grids: Optional[list] = None,
                              order: int = 12) -> AuctionSolveReport:
    """Double-limit solve: bid grids refine (k), then trembles vanish (m).

    Two-player auctions only (the interim grid is vectorized for the
    private-value case).  Inner solves use the tremble-partition
    expansion of the perturbed interim payoff without its bid-invariant
    residual term.  Per level the report records the measured
    probability of tied winning bids above Q, which the offset grids
    keep at zero by construction; it must never increase along the
    schedule.
    """
    settings = settings or SolveSettings()
    if auction.n != 2:
        raise ValueError("the double-limit solver handles two players")
    a3 = validate_assumption3(auction)
    if not a3["all_hold"]:
        bad = [k for k, v in a3.items() if hasattr(v, "holds") and not v.holds]
        raise ValueError(f"auction fails structural validation: {bad}")
    scheme = "finite" if fixed_grids is not None else "auction"
    k_max = max(settings.bid_grid_schedule)
    v_cells = settings.value_cells
    edges = [np.linspace(auction.value_lo[i], auction.value_hi[i], v_cells + 1)
             for i in range(2)]
    mids = [0.5 * (e[:-1] + e[1:]) for e in edges]
    levels: list[AuctionLevelRecord] = []
    profiles_by_m = []
    for m in settings.m_schedule:
        prev_profile = profiles_by_m[-1][1] if profiles_by_m else None
        profile = prev_profile or [
            StepStrategy.constant(edges[i][0], edges[i][-1], auction.Q)
            for i in range(2)]
        for k in settings.bid_grid_schedule:
            grids = fixed_grids if fixed_grids is not None else \
                [player_bid_grid(auction, i, k, k_max) for i in range(2)]
            profile, iters, converged, residual = _solve_fixed_grid(
                auction, grids, edges, mids, m, settings, profile, order,
                scheme)
            move = _step_sup_distance(profiles_by_m[-1][1], profile, mids) \
                if profiles_by_m else np.inf
            tie = tie_probability(auction, profile)
            levels.append(AuctionLevelRecord(
                m=m, k=k, iterations=iters, converged=converged,
                move_from_previous=float(move), tie_probability=tie,
                residual=residual))
            if fixed_grids is not None:
                break
        profiles_by_m.append((m, profile))
    final_m, final_profile = profiles_by_m[-1]

    # stabilization in m: disagreement measure between consecutive levels
    reason = ""
    converged = True
    if len(profiles_by_m) >= 2:
        v_step = max(float(e[1] - e[0]) for e in edges)
        dis = [_disagreement_measure(pa, pb, mids)
               for (_, pa), (_, pb) in zip(profiles_by_m, profiles_by_m[1:])]
        if dis and dis[-1] > 20.0 * v_step:
            converged = False
            reason = (f"tremble-limit drift {dis[-1]:.4g} exceeds "
                      f"{20.0 * v_step:.4g}")
    if scheme == "auction":
        # ties can only vanish along refining offset grids; fixed shared
        # grids keep their equilibrium tie mass
        ties = [rec.tie_probability for rec in levels]
        if any(b > a + 1e-12 for a, b in zip(ties, ties[1:])):
            converged = False
            reason = (reason + "; " if reason else "") + \
                "tie probability increased along the schedule"

    cert = _auction_certificate(auction, profiles_by_m, final_profile, mids,
                                settings, order, scheme,
                                fixed_grids=fixed_grids)
    residual = levels[-1].residual
    result = EquilibriumResult(
        profile=final_profile, residual=residual,
        converged=converged and cert.certified,
        method="double-limit", iterations=sum(r.iterations for r in levels))
    return AuctionSolveReport(result=result, certificate=cert,
                              converged=converged and cert.certified,
                              levels=levels, assumption3=a3, reason=reason)


def _truthful_profile(auction, grids, edges, mids):
    """Bid-your-value on the grid (capped at the bid ceiling)."""
    out = []
    for i in range(2):
        vals = np.minimum(mids[i], auction.b_bar[i])
        sel = np.array([grids[i][np.argmin(np.abs(grids[i] - v))] for v in vals])
        out.append(_bids_to_strategy(auction, i, edges[i], sel))
    return out


def _finite_tremble_dist(auction, j, grid, strategy, m, order):
    """Opponent bid distribution under the finite tremble over the grid:
    intended bids keep 1 - 1/m, the rest spreads uniformly."""
    from .auctions import bid_distribution
    bids, masses = bid_distribution(auction, j, strategy, order)
    p = np.full(grid.size, 1.0 / (m * grid.size))
    for b, w in zip(bids, masses):
        k = int(np.argmin(np.abs(grid - b)))
        p[k] += (1.0 - 1.0 / m) * w
    return grid, p


def _level_br_matrix(auction, i, grids, mids, opp_strategy, m, order, scheme):
    """Perturbed interim payoff matrix of one level, scheme-aware."""
    if scheme == "finite":
        opp = _finite_tremble_dist(auction, 1 - i, grids[1 - i], opp_strategy,
                                   m, order)
        return interim_grid_2p(auction, i, grids[i], mids[i], opp, m=None,
                               order=order)
    return interim_grid_2p(auction, i, grids[i], mids[i], opp_strategy, m=m,
                           order=order)


def _solve_fixed_grid(auction, grids, edges, mids, m, settings, warm, order,
                      scheme="auction"):
    """Equilibrium of one trembled, bid-discretized game.

    Cold best-response dynamics in first-price-style games escalate and
    collapse (undercut cycles around large bid atoms), but the
    equilibrium itself is iteration-stable on fine grids.  Two starts
    are tried, the warm profile from the previous level and the best
    response to truthful bidding, and the best-response iterate with
    the smallest residual wins.
    """
    starts = [list(warm)]
    truthful = _truthful_profile(auction, grids, edges, mids)
    lvl1 = []
    for i in range(2):
        mat = _level_br_matrix(auction, i, grids, mids, truthful[1 - i], m,
                               order, scheme)
        lvl1.append(_bids_to_strategy(auction, i, edges[i],
                                      _select_max(grids[i], mids[i], mat)))
    starts.append(lvl1)
    best = (np.inf, starts[0], False)
    total_iters = 0
    for start in starts:
        profile = list(start)
        seen = set()
        for it in range(1, min(settings.max_iter, 40) + 1):
            total_iters += 1
            r = _auction_residual(auction, grids, mids, profile, m, order,
                                  scheme)
            if r < best[0]:
                best = (r, profile, False)
            if r == 0.0:
                best = (r, profile, True)
                break
            key = tuple(tuple(np.round(s.breakpoints, 12)) + tuple(s.actions)
                        for s in profile)
            if key in seen:
                break
            seen.add(key)
            new_profile = list(profile)
            for i in range(2):
                opp = new_profile[1 - i] if settings.update == "gauss-seidel" \
                    else profile[1 - i]
                mat = _level_br_matrix(auction, i, grids, mids, opp, m, order,
                                       scheme)
                new_profile[i] = _bids_to_strategy(
                    auction, i, edges[i], _select_max(grids[i], mids[i], mat))
            if _step_sup_distance(profile, new_profile, mids) == 0.0:
                best = (min(r, best[0]), profile, True)
                break
            profile = new_profile
        if best[0] == 0.0:
            break
    residual, profile, fixed = best
    converged = fixed or residual <= settings.accept_residual
    return profile, total_iters, converged, residual


def _auction_residual(auction, grids, mids, profile, m, order,
                      scheme="auction") -> float:
    worst = 0.0
    for i in range(2):
        mat = _level_br_matrix(auction, i, grids, mids, profile[1 - i], m,
                               order, scheme)
        played = np.array([float(profile[i].eval(float(v))) for v in mids[i]])
        idx = np.array([int(np.argmin(np.abs(grids[i] - b))) for b in played])
        gap = np.max(mat, axis=1) - mat[np.arange(len(mids[i])), idx]
        worst = max(worst, float(np.max(gap)))
    return worst


def _step_sup_distance(pa, pb, mids) -> float:
    worst = 0.0
    for a, b, ms in zip(pa, pb, mids):
        va = np.array([float(a.eval(float(t))) for t in ms])
        vb = np.array([float(b.eval(float(t))) for t in ms])
        worst = max(worst, float(np.max(np.abs(va - vb))))
    return worst


def _disagreement_measure(pa, pb, mids) -> float:
    total = 0.0
    for a, b, ms in zip(pa, pb, mids):
        va = np.array([float(a.eval(float(t))) for t in ms])
        vb = np.array([float(b.eval(float(t))) for t in ms])
        cell = (ms[-1] - ms[0]) / max(len(ms) - 1, 1)
        total = max(total, float(np.sum(np.abs(va - vb) > 1e-12)) * cell)
    return total


def _auction_certificate(auction, profiles_by_m, limit_profile, mids,
                         settings, order, scheme,
                         fixed_grids=None) -> PerfectionCertificate:
    """Per-m record: tremble distance to the limit atom and
    best-response distance of the limit profile against the embedded
    trembles, with breakpoint bands as in the finite-game certificate."""
    from .perturbation import perturb_action_finite

    records = []
    witness = None
    top_level = profiles_by_m[-1][0]
    for m, prof_m in profiles_by_m:
        rho_sup = 0.0
        rows = []
        for i in range(2):
            bps = list(np.asarray(limit_profile[i].breakpoints[1:-1]))
            stride = max(1, len(mids[i]) // 64)
            sample = mids[i][::stride]
            gaps = _embedded_br_gaps(auction, i, limit_profile[i], mids[i],
                                     prof_m[1 - i], m, order, scheme,
                                     fixed_grids)
            for t, val in zip(sample, gaps[::stride]):
                b_m = float(prof_m[i].eval(float(t)))
                if scheme == "finite":
                    mix = perturb_action_finite(b_m, list(fixed_grids[i]), m)
                else:
                    mix = perturb_action_auction(b_m, m,
                                                 float(auction.b_bar[i]),
                                                 auction.Q)
                b_lim = float(limit_profile[i].eval(float(t)))
                rho = prohorov_distance(mix, MixedAction.point(b_lim))
                rho_sup = max(rho_sup, rho)
                gap = min((abs(t - b) for b in bps), default=np.inf)
                rows.append((i, float(t), float(val), gap))
        failing = [r for r in rows if r[2] > 1e-8]
        band = max((r[3] for r in failing), default=0.0)
        if failing and (witness is None or m == top_level):
            worst = max(failing, key=lambda r: r[2])
            witness = (worst[0], worst[1])
        records.append(LevelRecord(
            level=m, rho_sup=rho_sup,
            br_dist_sup_all=max((r[2] for r in rows), default=0.0),
            br_dist_sup_clear=max((r[2] for r in rows if r[3] > band + 1e-15),
                                  default=0.0),
            failing_fraction=len(failing) / max(len(rows), 1),
            band_width=band))
    top = records[-1]
    v_width = max(auction.value_hi - auction.value_lo)
    cap = 32.0 * v_width / top_level
    certified = (top.rho_sup <= 8.0 / top_level + 0.25 and
                 top.br_dist_sup_clear <= max(settings.accept_residual, 1e-6) and
                 top.band_width <= cap)
    return PerfectionCertificate(
        levels=records, certified=certified,
        reason="" if certified else "top-level distances too large",
        witness_type=None if certified else witness,
        sample_spec=f"value-grid subsample; band cap {cap:.3g}")


def _embedded_br_gaps(auction, i, own_strategy, mids_i, opp_strategy, m,
                      order, scheme, fixed_grids):
    """Payoff gap of the played bids against the embedded opponent, per
    value-grid point, in the unperturbed game."""
    if scheme == "finite":
        grid = np.asarray(fixed_grids[i], dtype=float)
        bids, masses = _finite_tremble_dist(auction, 1 - i,
                                            np.asarray(fixed_grids[1 - i],
                                                       dtype=float),
                                            opp_strategy, m, order)
        mat = interim_grid_2p(auction, i, grid, mids_i, (bids, masses),
                              m=None, order=order)
    else:
        # candidate bids: a fine scan; opponent embedded via the
        # three-component tremble handled by the m-parameterized kernel
        grid = np.concatenate([[auction.Q],
                               np.linspace(0.0, float(auction.b_bar[i]), 129)])
        mat = interim_grid_2p(auction, i, grid, mids_i, opp_strategy, m=m,
                              order=order)
        mat = mat / (1.0 - 1.0 / m)  # undo the own-tremble scale
    played = np.array([float(own_strategy.eval(float(v))) for v in mids_i])
    idx = np.array([int(np.argmin(np.abs(grid - b))) for b in played])
    return np.max(mat, axis=1) - mat[np.arange(len(mids_i)), idx]
