"""Golden-scenario reproduction: every built-in scenario is re-run and
compared against its pinned values, one pass/fail row per check."""

from __future__ import annotations

import numpy as np

from .conditions import (check_interim_idc, check_interim_quasi_supermodular,
                         check_interim_single_crossing,
                         check_interim_supermodular)
from .games import interim_payoff
from .scenarios import R_BINARY, load_scenario
from .solver import SolveSettings, find_monotone_equilibrium, \
    find_perfect_monotone_equilibrium
from .verification import check_admissibility, check_bne, check_perfection, \
    dominance_audit

#: pinned values; every entry is re-derived by the checks below
GOLDEN = {
    "exam-SCC": {
        "monotone_cutoffs": (0.8, 0.875),
        "scc_holds": True,
        "idc_holds": False,
        "perfect_profile_root": R_BINARY,
    },
    "exam-2": {
        "cutoffs": (0.5, 0.8, 0.875),
        "idc_holds": True,
        "qsm_holds": True,
        "sm_holds": False,
    },
    "exam-super": {
        "equilibria": 2,
        "perfect": "all-zero",
        "inadmissible": "all-one",
    },
    "exam-1st": {
        "bne_gap": 1e-10,
        "dominated_bid": 5,
    },
    "exam-2nd": {
        "interim_bid1": lambda v: (v - 1.0) / 4.0,
        "interim_bid2": lambda v: (v - 1.0) / 2.0 + (v - 2.0) / 4.0,
        "dominated_bid": 0,
    },
}


def _row(scenario, check, expected, got, ok):
    return {"scenario": scenario, "check": check, "expected": str(expected),
            "got": str(got), "pass": bool(ok)}


def _reproduce_exam_scc(golden):
    rows = []
    sc = load_scenario("exam-SCC")
    g = sc.game
    scc = check_interim_single_crossing(g, 0)
    rows.append(_row("exam-SCC", "single-crossing", golden["scc_holds"],
                     scc.holds, scc.holds == golden["scc_holds"]))
    idc = check_interim_idc(g, 0)
    rows.append(_row("exam-SCC", "increasing-differences", golden["idc_holds"],
                     idc.holds, idc.holds == golden["idc_holds"]))
    res = find_monotone_equilibrium(g, SolveSettings(cutoff_grid=2.0 ** -12))
    cut = (res.cutoffs()[0][0], res.cutoffs()[1][0])
    ok = all(abs(a - b) < 1e-3 for a, b in zip(cut, golden["monotone_cutoffs"]))
    rows.append(_row("exam-SCC", "monotone-equilibrium-cutoffs",
                     golden["monotone_cutoffs"], cut, ok))
    bne = check_bne(g, sc.profiles["perfect"], type_sample=64, tol=1e-8)
    rows.append(_row("exam-SCC", "reference-perfect-profile-bne", "gap<=1e-8",
                     max(bne.gaps), bne.is_epsilon_bne))
    r = golden["perfect_profile_root"]
    resid = -31.0 / 120.0 + (173.0 / 120.0) * r + r * r / 3.0
    rows.append(_row("exam-SCC", "quadratic-root", 0.0, resid,
                     abs(resid) < 1e-12))
    rep = find_perfect_monotone_equilibrium(g, SolveSettings(m_schedule=(4, 8, 16)))
    rows.append(_row("exam-SCC", "no-perfect-monotone-equilibrium",
                     "non-convergence", rep.converged, not rep.converged))
    return rows


def _reproduce_exam_2(golden):
    rows = []
    sc = load_scenario("exam-2")
    g = sc.game
    idc = check_interim_idc(g, 0)
    rows.append(_row("exam-2", "increasing-differences", golden["idc_holds"],
                     idc.holds, idc.holds == golden["idc_holds"]))
    qsm = check_interim_quasi_supermodular(g, 0)
    rows.append(_row("exam-2", "quasi-supermodularity", golden["qsm_holds"],
                     qsm.holds, qsm.holds == golden["qsm_holds"]))
    sm = check_interim_supermodular(g, 0)
    rows.append(_row("exam-2", "supermodularity", golden["sm_holds"],
                     sm.holds, sm.holds == golden["sm_holds"]))
    res = find_monotone_equilibrium(g, SolveSettings(cutoff_grid=2.0 ** -12))
    cut = tuple(res.cutoffs()[0]) + tuple(res.cutoffs()[1])
    ok = len(cut) == 3 and all(abs(a - b) < 1e-3
                               for a, b in zip(cut, golden["cutoffs"]))
    rows.append(_row("exam-2", "monotone-equilibrium-cutoffs",
                     golden["cutoffs"], cut, ok))
    return rows


def _reproduce_exam_super(golden):
    rows = []
    sc = load_scenario("exam-super")
    g = sc.game
    lo = find_monotone_equilibrium(g, init="extremal-low")
    hi = find_monotone_equilibrium(g, init="extremal-high")
    acts = {tuple(s.actions[0] for s in res.profile) for res in (lo, hi)}
    rows.append(_row("exam-super", "two-extremal-equilibria",
                     golden["equilibria"], len(acts), len(acts) == 2))
    cert = check_perfection(g, sc.profiles["all-zero"],
                            sc.sequences["uniform"], levels=[4, 16, 64, 256])
    rows.append(_row("exam-super", "all-zero-perfect", True, cert.certified,
                     cert.certified))
    adm = check_admissibility(g, sc.profiles["all-one"], type_sample=4)
    rows.append(_row("exam-super", "all-one-inadmissible", False,
                     adm.admissible, not adm.admissible))
    return rows


def _reproduce_exam_1st(golden):
    rows = []
    sc = load_scenario("exam-1st")
    g = sc.game
    bne = check_bne(g, sc.profiles["perfect"], type_sample=64, tol=golden["bne_gap"])
    rows.append(_row("exam-1st", "reference-profile-bne",
                     f"gap<={golden['bne_gap']}", max(bne.gaps),
                     bne.is_epsilon_bne))
    trivial = check_bne(g, sc.profiles["trivial"], type_sample=64, tol=1e-10)
    rows.append(_row("exam-1st", "trivial-profile-bne", "gap<=1e-10",
                     max(trivial.gaps), trivial.is_epsilon_bne))
    verdict = dominance_audit(g, 0, golden["dominated_bid"], 2.0)
    rows.append(_row("exam-1st", "bid-5-weakly-dominated", "weakly-dominated",
                     verdict.verdict, verdict.verdict == "weakly-dominated"))
    cert = check_perfection(g, sc.profiles["perfect"], sc.sequences["paper"],
                            levels=[8, 32, 128, 512], type_sample=48)
    rows.append(_row("exam-1st", "reference-profile-perfect", True,
                     cert.certified, cert.certified))
    return rows


def _reproduce_exam_2nd(golden):
    rows = []
    sc = load_scenario("exam-2nd")
    g = sc.game
    prof = sc.profiles["perfect"]
    ok1 = ok2 = True
    for v in (1.1, 1.5, 1.9):
        v1 = interim_payoff(g, 0, 1, v, {1: prof[1]})
        v2 = interim_payoff(g, 0, 2, v, {1: prof[1]})
        ok1 &= abs(v1 - golden["interim_bid1"](v)) < 1e-10
        ok2 &= abs(v2 - golden["interim_bid2"](v)) < 1e-10
    rows.append(_row("exam-2nd", "interim-closed-forms", "match to 1e-10",
                     (ok1, ok2), ok1 and ok2))
    cert = check_perfection(g, prof, sc.sequences["paper"],
                            levels=[3, 9, 27, 81], type_sample=48)
    rows.append(_row("exam-2nd", "reference-profile-perfect", True,
                     cert.certified, cert.certified))
    verdict = dominance_audit(g, 0, golden["dominated_bid"], 1.4)
    rows.append(_row("exam-2nd", "bid-0-weakly-dominated", "weakly-dominated",
                     verdict.verdict, verdict.verdict == "weakly-dominated"))
    trivial = check_bne(g, sc.profiles["trivial"], type_sample=64, tol=1e-10)
    rows.append(_row("exam-2nd", "trivial-profile-bne", "gap<=1e-10",
                     max(trivial.gaps), trivial.is_epsilon_bne))
    return rows


_RUNNERS = {
    "exam-SCC": _reproduce_exam_scc,
    "exam-2": _reproduce_exam_2,
    "exam-super": _reproduce_exam_super,
    "exam-1st": _reproduce_exam_1st,
    "exam-2nd": _reproduce_exam_2nd,
}


def run_reproduction(only: str = None, quiet: bool = False):
    rows = []
    names = [only] if only else list(_RUNNERS)
    for name in names:
        rows.extend(_RUNNERS[name](GOLDEN[name]))
    all_ok = all(r["pass"] for r in rows)
    if not quiet:
        width = max(len(r["check"]) for r in rows) + 2
        for r in rows:
            mark = "PASS" if r["pass"] else "FAIL"
            print(f"[{mark}] {r['scenario']:<11} {r['check']:<{width}} "
                  f"expected={r['expected']} got={r['got']}")
        print(f"{'all checks passed' if all_ok else 'MISMATCHES FOUND'}")
    return rows, all_ok
