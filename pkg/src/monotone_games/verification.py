"""Independent verification: equilibrium, perfection, dominance.

Everything here re-derives its verdicts from interim payoffs rather
than trusting solver output: best-response gaps for equilibrium,
Prohorov and best-response distances for perfection, linear programs
over the action simplex for dominance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .games import (ActionSpace, BayesGame, BehavioralStrategy, MixedAction,
                    StepStrategy, interim_payoff, interim_payoff_batch)

# ---------------------------------------------------------------------------
# Prohorov metric on finitely supported measures
# ---------------------------------------------------------------------------

#: supports up to this size are handled by exact subset enumeration
EXACT_SUPPORT_LIMIT = 16
#: uniform components are discretized to at most this many atoms
UNIFORM_DISCRETIZATION = 256


def _atomize(mu: MixedAction, max_atoms: int = UNIFORM_DISCRETIZATION):
    """Finite-support view: uniform parts become midpoint atom rows.

    Returns (points, masses, cluster_radius); the radius bounds the
    distance any mass moved during discretization.
    """
    pts, ws = [], []
    for a, w in mu.atoms:
        pts.append(a)
        ws.append(w)
    radius = 0.0
    n_unif = len(mu.uniforms)
    if n_unif:
        per = max(1, max_atoms // n_unif)
        for (lo, hi), w in mu.uniforms:
            edges = np.linspace(lo, hi, per + 1)
            mids = 0.5 * (edges[:-1] + edges[1:])
            radius = max(radius, float(edges[1] - edges[0]) / 2.0)
            for x in mids:
                pts.append(float(x))
                ws.append(w / per)
    return pts, np.asarray(ws, dtype=float), radius


def _point_metric(a, b, metric: Optional[Callable]) -> float:
    if metric is not None:
        return float(metric(a, b))
    if isinstance(a, tuple) or isinstance(b, tuple):
        return float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float)))
    return abs(float(a) - float(b))


def _merge_coincident(pts, ws, metric):
    out_p, out_w = [], []
    for p, w in zip(pts, ws):
        for k, q in enumerate(out_p):
            if _point_metric(p, q, metric) <= 1e-15:
                out_w[k] += w
                break
        else:
            out_p.append(p)
            out_w.append(w)
    return out_p, np.asarray(out_w)


def _one_sided_deficiency(w_a: np.ndarray, w_b: np.ndarray,
                          nbr: np.ndarray) -> float:
    """max over subsets B of the a-points of  a(B) - b(neighborhood(B)).

    Decomposes over connected components of the bipartite adjacency and
    enumerates subsets of the smaller side within each component, so it
    stays exact and fast for point-mass-vs-many comparisons.
    """
    n_a, n_b = nbr.shape
    total = 0.0
    # isolated a-points cost nothing to include
    isolated = ~np.any(nbr, axis=1)
    total += float(np.sum(w_a[isolated]))
    unseen_a = set(np.flatnonzero(~isolated))
    unseen_b = set(range(n_b))
    while unseen_a:
        # grow one bipartite component
        stack_a = {unseen_a.pop()}
        comp_a, comp_b = set(), set()
        while stack_a:
            a = stack_a.pop()
            comp_a.add(a)
            bs = set(np.flatnonzero(nbr[a])) & unseen_b
            for b in bs:
                unseen_b.discard(b)
                comp_b.add(b)
                for a2 in np.flatnonzero(nbr[:, b]):
                    if a2 in unseen_a:
                        unseen_a.discard(a2)
                        stack_a.add(a2)
        ca, cb = sorted(comp_a), sorted(comp_b)
        if min(len(ca), len(cb)) > 20:
            raise _ComponentTooLarge()
        best = 0.0
        if len(ca) <= len(cb):
            for bits in range(1, 2 ** len(ca)):
                chosen = [ca[k] for k in range(len(ca)) if bits >> k & 1]
                covered = np.any(nbr[chosen], axis=0)
                best = max(best, float(np.sum(w_a[chosen]) - np.sum(w_b[covered])))
        else:
            # enumerate covered b-sets; take every a-point fitting inside
            for bits in range(2 ** len(cb)):
                s = np.zeros(n_b, dtype=bool)
                for k in range(len(cb)):
                    if bits >> k & 1:
                        s[cb[k]] = True
                fits = [a for a in ca if not np.any(nbr[a] & ~s)]
                best = max(best, float(np.sum(w_a[fits]) - np.sum(w_b[s]))
                           if fits else -float(np.sum(w_b[s])))
        total += max(0.0, best)
    return total


class _ComponentTooLarge(Exception):
    pass


def _prohorov_exact(p_mu, w_mu, p_nu, w_nu, metric) -> float:
    """Exact value by candidate-threshold enumeration with subset checks.

    For thresholds d between consecutive pairwise distances, the maximal
    deficiency g(d) = max_B [nu(B) - mu(B enlarged by d)] (both
    directions) is piecewise constant; the metric is the smallest
    max(g(d_k), d_k) over threshold intervals.
    """
    dmat = np.array([[_point_metric(a, b, metric) for b in p_nu] for a in p_mu])
    thresholds = np.unique(np.concatenate([[0.0], dmat.ravel()]))

    def max_deficiency(dist):
        # neighborhoods at "distance <= dist": the closure of the open
        # enlargement just above the threshold
        close = dmat <= dist + 1e-15
        return max(_one_sided_deficiency(w_nu, w_mu, close.T),
                   _one_sided_deficiency(w_mu, w_nu, close))

    best = np.inf
    for k, d in enumerate(thresholds):
        g = max_deficiency(d)
        cand = max(g, float(d))
        # feasible only until the next threshold opens a larger neighborhood
        nxt = thresholds[k + 1] if k + 1 < len(thresholds) else np.inf
        if g <= nxt + 1e-15:
            best = min(best, cand)
        if cand <= d + 1e-15:
            # later intervals only raise the distance term
            break
    return best


def _cluster(pts, ws, metric, target: int):
    """Greedy nearest-pair merging down to the target support size."""
    pts = list(pts)
    ws = list(ws)
    radius = 0.0
    while len(pts) > target:
        best = None
        for a, b in itertools.combinations(range(len(pts)), 2):
            d = _point_metric(pts[a], pts[b], metric)
            if best is None or d < best[0]:
                best = (d, a, b)
        d, a, b = best
        w = ws[a] + ws[b]
        # merged point keeps the heavier location
        keep = pts[a] if ws[a] >= ws[b] else pts[b]
        radius = max(radius, d)
        pts[a], ws[a] = keep, w
        del pts[b], ws[b]
    return pts, np.asarray(ws), radius


def prohorov_bracket(mu: MixedAction, nu: MixedAction,
                     metric: Optional[Callable] = None) -> tuple[float, float]:
    """Certified lower/upper bracket of the Prohorov distance.

    Exact (equal endpoints) when both discretized supports have at most
    16 points; larger supports are clustered and the cluster radius
    widens the bracket on both sides.
    """
    p_mu, w_mu, r_mu = _atomize(mu)
    p_nu, w_nu, r_nu = _atomize(nu)
    p_mu, w_mu = _merge_coincident(p_mu, w_mu, metric)
    p_nu, w_nu = _merge_coincident(p_nu, w_nu, metric)
    slack = max(r_mu, r_nu)
    try:
        val = _prohorov_exact(p_mu, w_mu, p_nu, w_nu, metric)
        return max(0.0, val - slack), val + slack
    except _ComponentTooLarge:
        pass
    c_mu, cw_mu, ra = _cluster(p_mu, w_mu, metric, EXACT_SUPPORT_LIMIT)
    c_nu, cw_nu, rb = _cluster(p_nu, w_nu, metric, EXACT_SUPPORT_LIMIT)
    val = _prohorov_exact(c_mu, cw_mu, c_nu, cw_nu, metric)
    pad = slack + max(ra, rb)
    return max(0.0, val - pad), val + pad


def prohorov_distance(mu: MixedAction, nu: MixedAction,
                      metric: Optional[Callable] = None) -> float:
    """Prohorov distance between finitely-representable mixed actions.

    Exact on supports of at most 16 points; otherwise the certified
    upper bound of :func:`prohorov_bracket` (conservative for
    convergence certificates).  Uniform components are discretized to at
    most 256 atoms.
    """
    lo, hi = prohorov_bracket(mu, nu, metric)
    return hi


# ---------------------------------------------------------------------------
# Type sampling
# ---------------------------------------------------------------------------


def _vdc(n: int, base: int = 2) -> np.ndarray:
    """Van der Corput low-discrepancy sequence in (0, 1)."""
    out = np.empty(n)
    for k in range(n):
        x, denom, q = 0.0, 1.0, k + 1
        while q:
            denom *= base
            q, r = divmod(q, base)
            x += r / denom
        out[k] = x
    return out


def sample_types(lo: float, hi: float, breakpoints: Sequence[float],
                 count: int = 512, step: Optional[float] = None) -> np.ndarray:
    """Deterministic type sample: low-discrepancy points plus all
    strategy breakpoints offset by one grid step on each side.

    The breakpoints themselves are the explicit exception set of the
    almost-all quantifier and are filtered out.
    """
    pts = lo + (hi - lo) * _vdc(count)
    h = step if step is not None else (hi - lo) / count
    extra = []
    for b in breakpoints:
        extra.extend([b - h, b + h])
    pts = np.concatenate([pts, np.asarray(extra, dtype=float)])
    pts = np.unique(np.clip(pts, lo + 1e-12, hi - 1e-12))
    inner = np.asarray(list(breakpoints), dtype=float)
    if inner.size:
        on_break = np.min(np.abs(pts[:, None] - inner[None, :]), axis=1) < 1e-9
        pts = pts[~on_break]
    return pts


def _profile_breakpoints(profile, i) -> list[float]:
    s = profile[i]
    inner = list(np.asarray(s.breakpoints[1:-1], dtype=float))
    return inner


# ---------------------------------------------------------------------------
# Equilibrium check
# ---------------------------------------------------------------------------


@dataclass
class BneReport:
    gaps: list[float]
    worst_types: list[float]
    tol: float
    is_epsilon_bne: bool
    type_counts: list[int]

    def to_dict(self) -> dict:
        return {"gaps": self.gaps, "worst_types": self.worst_types,
                "tol": self.tol, "is_epsilon_bne": self.is_epsilon_bne}


def check_bne(game: BayesGame, profile: Sequence, type_sample: int = 128,
              tol: float = 1e-8, order: Optional[int] = None) -> BneReport:
    """Best-response gap of each player over a deterministic type sample.

    The profile is an epsilon-equilibrium iff every sampled gap is at
    most tol.  Breakpoint types themselves are excluded (almost-all
    semantics); their one-step neighborhoods are included.
    """
    gaps, worst, counts = [], [], []
    for i in range(game.n):
        ts = game.type_spaces[i]
        pts = sample_types(ts.lo, ts.hi, _profile_breakpoints(profile, i),
                           count=type_sample)
        others = {j: profile[j] for j in range(game.n) if j != i}
        actions = game.action_spaces[i].actions
        vals = np.stack([interim_payoff_batch(game, i, a, pts, others, order)
                         for a in actions])
        played = np.array([actions.index(profile[i].eval(float(t))) for t in pts])
        gap = np.max(vals, axis=0) - vals[played, np.arange(len(pts))]
        k = int(np.argmax(gap))
        gaps.append(float(gap[k]))
        worst.append(float(pts[k]))
        counts.append(len(pts))
    return BneReport(gaps=gaps, worst_types=worst, tol=tol,
                     is_epsilon_bne=all(g <= tol for g in gaps),
                     type_counts=counts)


# ---------------------------------------------------------------------------
# Perfection certificate
# ---------------------------------------------------------------------------


@dataclass
class LevelRecord:
    level: int
    rho_sup: float
    br_dist_sup_all: float
    br_dist_sup_clear: float
    failing_fraction: float
    band_width: float


@dataclass
class PerfectionCertificate:
    """Per-level Prohorov and best-response distances over a type sample.

    The failing set of condition (2) is allowed to concentrate on
    shrinking neighborhoods of the profile's breakpoints (the almost-all
    pointwise limit); ``band_width`` records the widest such
    neighborhood per level and must shrink toward the top level.
    """

    levels: list[LevelRecord]
    certified: bool
    reason: str = ""
    witness_type: Optional[tuple] = None  # (player, type)
    sample_spec: str = ""

    def to_dict(self) -> dict:
        return {
            "levels": [vars(r) for r in self.levels],
            "certified": self.certified,
            "reason": self.reason,
            "witness_type": self.witness_type,
            "sample_spec": self.sample_spec,
        }


def check_perfection(game: BayesGame, profile: Sequence,
                     sequence: Callable[[int], Sequence[BehavioralStrategy]],
                     levels: Sequence[int], type_sample: int = 64,
                     tol_rho: Callable[[int], float] = lambda lvl: 8.0 / lvl,
                     tol_br: float = 1e-8,
                     band_cap: Optional[float] = None,
                     order: Optional[int] = None) -> PerfectionCertificate:
    """Certify a profile as perfect along a completely mixed sequence.

    Per level: (1) the Prohorov distance from the level's mixture to the
    profile's action atom, sup over sampled types, must be at most
    tol_rho(level); (2) the action-space distance from the played action
    to the best-response set against the level's opponents must be at
    most tol_br, except on a breakpoint neighborhood whose width shrinks
    to band_cap (default: action-space diameter / top level) at the top
    level.  Sequences that are not completely mixed fail hard.
    """
    levels = sorted(levels)
    records: list[LevelRecord] = []
    witness = None
    reason = ""
    samples = {}
    for i in range(game.n):
        ts = game.type_spaces[i]
        samples[i] = sample_types(ts.lo, ts.hi, _profile_breakpoints(profile, i),
                                  count=type_sample)
    diam = max(_action_diameter(sp) for sp in game.action_spaces)
    cap = band_cap if band_cap is not None else \
        max(ts.hi - ts.lo for ts in game.type_spaces) * 16.0 / levels[-1]

    for lvl in levels:
        mixed_profile = sequence(lvl)
        for i in range(game.n):
            ok, cell = mixed_profile[i].is_completely_mixed(game.action_spaces[i])
            if not ok:
                raise ValueError(
                    f"sequence not completely mixed at level {lvl}: player {i}, "
                    f"cell {cell}")
        rho_sup = 0.0
        rows = []  # (player, type, br distance, breakpoint gap)
        for i in range(game.n):
            space = game.action_spaces[i]
            others = {j: mixed_profile[j] for j in range(game.n) if j != i}
            bps = _profile_breakpoints(profile, i)
            pts = samples[i]
            vals = np.stack([interim_payoff_batch(game, i, a, pts, others, order)
                             for a in space.actions])
            vmax = np.max(vals, axis=0)
            for k, t in enumerate(pts):
                played = profile[i].eval(float(t))
                rho = prohorov_distance(mixed_profile[i].eval(float(t)),
                                        MixedAction.point(played),
                                        metric=space.metric)
                rho_sup = max(rho_sup, rho)
                br = [a for m_, a in enumerate(space.actions)
                      if vals[m_, k] >= vmax[k] - 1e-9]
                d = min(space.metric(played, a) for a in br)
                gap = min((abs(t - b) for b in bps), default=np.inf)
                rows.append((i, float(t), d, gap))
        failing = [r for r in rows if r[2] > tol_br]
        band = max((r[3] for r in failing), default=0.0)
        if failing and (witness is None or lvl == levels[-1]):
            worst = max(failing, key=lambda r: r[2])
            witness = (worst[0], worst[1])
        dist_all = max((r[2] for r in rows), default=0.0)
        dist_clear = max((r[2] for r in rows if r[3] > band + 1e-15), default=0.0)
        records.append(LevelRecord(
            level=lvl, rho_sup=rho_sup, br_dist_sup_all=dist_all,
            br_dist_sup_clear=dist_clear,
            failing_fraction=len(failing) / max(len(rows), 1), band_width=band))

    top = records[-1]
    certified = True
    if top.rho_sup > tol_rho(top.level):
        certified, reason = False, (
            f"mixture distance {top.rho_sup:.3g} exceeds "
            f"{tol_rho(top.level):.3g} at level {top.level}")
    elif top.br_dist_sup_clear > tol_br:
        certified, reason = False, (
            f"best-response distance {top.br_dist_sup_clear:.3g} persists "
            f"away from breakpoints at level {top.level}")
    elif top.band_width > cap:
        certified, reason = False, (
            f"failing band {top.band_width:.3g} wider than cap {cap:.3g} "
            f"at level {top.level}")
    if certified:
        witness = None
    return PerfectionCertificate(
        levels=records, certified=certified, reason=reason,
        witness_type=witness,
        sample_spec=f"{type_sample} low-discrepancy points per player plus "
                    f"breakpoint neighborhoods; band cap {cap:.3g}")


def _action_diameter(space: ActionSpace) -> float:
    if space.is_finite:
        return max(space.metric(a, b)
                   for a in space.actions for b in space.actions)
    lo = space.quit_action if space.mode == "quit-interval" else space.lo
    return space.hi - lo


# ---------------------------------------------------------------------------
# Dominance and admissibility
# ---------------------------------------------------------------------------


@dataclass
class DominanceVerdict:
    action: object
    type_point: float
    verdict: str  # strictly-dominated | weakly-dominated | undominated-on-family
    dominating_mixture: Optional[MixedAction] = None
    strict_witness: Optional[dict] = None
    family: str = ""

    def to_dict(self) -> dict:
        return {"action": self.action, "type": self.type_point,
                "verdict": self.verdict,
                "dominating_mixture": repr(self.dominating_mixture),
                "strict_witness": self.strict_witness, "family": self.family}


def constant_profile_family(game: BayesGame, i: int,
                            grid: int = 9) -> list[dict]:
    """All constant pure opponent profiles (interval actions gridded)."""
    per = []
    for j in range(game.n):
        if j == i:
            continue
        sp = game.action_spaces[j]
        ts = game.type_spaces[j]
        if sp.is_finite:
            acts = sp.actions
        else:
            lo = sp.quit_action if sp.mode == "quit-interval" else sp.lo
            acts = list(np.linspace(max(lo, sp.lo), sp.hi, grid))
            if sp.mode == "quit-interval":
                acts = [sp.quit_action] + acts
        per.append((j, [StepStrategy.constant(ts.lo, ts.hi, a, sp) for a in acts]))
    out = []
    for combo in itertools.product(*[s for _, s in per]):
        out.append({j: s for (j, _), s in zip(per, combo)})
    return out


def dominance_audit(game: BayesGame, i: int, a_i, t_i: float,
                    family: Optional[list] = None, tol: float = 1e-9,
                    order: Optional[int] = None) -> DominanceVerdict:
    """Search for a dominating mixture against a family of opponent profiles.

    Pure dominators are preferred as witnesses; otherwise a linear
    program maximizes the total payoff slack over the action simplex.
    The verdict is relative to the tested family and labeled so.
    """
    space = game.action_spaces[i]
    if not space.is_finite:
        raise ValueError("dominance audit requires finite action spaces")
    fam = family if family is not None else constant_profile_family(game, i)
    fam_desc = f"{len(fam)} constant pure opponent profiles"
    actions = space.actions
    k_target = actions.index(a_i)
    # payoff matrix: rows actions, columns opponent profiles
    vmat = np.empty((len(actions), len(fam)))
    for c, others in enumerate(fam):
        for r, a in enumerate(actions):
            vmat[r, c] = interim_payoff(game, i, a, t_i, others, order)
    base = vmat[k_target]

    # pure dominators first: clean witnesses
    for r, a in enumerate(actions):
        if r == k_target:
            continue
        diff = vmat[r] - base
        if np.all(diff >= -tol):
            if np.all(diff > tol):
                return DominanceVerdict(a_i, t_i, "strictly-dominated",
                                        MixedAction.point(a), None, fam_desc)
            if np.any(diff > tol):
                c = int(np.argmax(diff))
                return DominanceVerdict(
                    a_i, t_i, "weakly-dominated", MixedAction.point(a),
                    {"profile_index": c, "margin": float(diff[c])}, fam_desc)

    # LP: maximize total slack subject to per-profile weak dominance
    n_a = len(actions)
    c_obj = -np.sum(vmat, axis=1)  # maximize sum_c sigma . v[:, c]
    a_ub = -vmat.T                 # sigma . v[:, c] >= base[c]
    b_ub = -base
    a_eq = np.ones((1, n_a))
    b_eq = np.array([1.0])
    res = linprog(c_obj, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=[(0, None)] * n_a, method="highs")
    if res.status == 0 and res.x is not None:
        sigma = np.clip(res.x, 0.0, None)
        sigma = sigma / np.sum(sigma)
        slack = vmat.T @ sigma - base
        if np.all(slack >= -tol) and np.any(slack > tol):
            mix = MixedAction([(a, float(w)) for a, w in zip(actions, sigma)
                               if w > 1e-12])
            c = int(np.argmax(slack))
            verdict = "strictly-dominated" if np.all(slack > tol) else "weakly-dominated"
            return DominanceVerdict(a_i, t_i, verdict, mix,
                                    {"profile_index": c, "margin": float(slack[c])},
                                    fam_desc)
    elif res.status not in (0, 2):
        raise RuntimeError(f"dominance LP anomaly: status {res.status}")
    return DominanceVerdict(a_i, t_i, "undominated-on-family", None, None, fam_desc)


@dataclass
class AdmissibilityReport:
    admissible: bool
    violations: list  # (player, type, DominanceVerdict)
    family: str
    checked_types: int

    def to_dict(self) -> dict:
        return {"admissible": self.admissible,
                "violations": [(i, t, v.to_dict()) for i, t, v in self.violations],
                "family": self.family, "checked_types": self.checked_types}


def check_admissibility(game: BayesGame, profile: Sequence,
                        type_sample: int = 16,
                        family_grid: int = 9) -> AdmissibilityReport:
    """Audit every sampled type's played action for weak dominance."""
    violations = []
    checked = 0
    fam_desc = ""
    for i in range(game.n):
        ts = game.type_spaces[i]
        pts = sample_types(ts.lo, ts.hi, _profile_breakpoints(profile, i),
                           count=type_sample)
        fam = constant_profile_family(game, i, grid=family_grid)
        for t in pts:
            a = profile[i].eval(float(t))
            verdict = dominance_audit(game, i, a, float(t), family=fam)
            fam_desc = verdict.family
            checked += 1
            if verdict.verdict != "undominated-on-family":
                violations.append((i, float(t), verdict))
    return AdmissibilityReport(admissible=not violations, violations=violations,
                               family=fam_desc, checked_types=checked)
