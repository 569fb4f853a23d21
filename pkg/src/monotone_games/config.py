"""Config-file ingestion: JSON with a published schema.

Payoff functions come from a registry of named forms (polynomial payoff
tables and auction builders) rather than arbitrary code, so runs are
reproducible from data.  Unknown keys are rejected.
"""

from __future__ import annotations

import json
from typing import Optional

import jsonschema
import numpy as np

from .auctions import (GeneralizedAuction, build_all_pay, build_bertrand,
                       build_first_price)
from .games import (ActionSpace, BayesGame, JointDensity, Marginal,
                    StepStrategy, TypeSpace)
from .scenarios import Scenario, load_scenario
from .solver import SolveSettings

_POLY = {
    "type": "object",
    "properties": {
        "coeffs": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [{"type": "number"},
                                {"type": "array", "items": {"type": "integer"}}],
                "minItems": 2, "maxItems": 2,
            },
        },
    },
    "required": ["coeffs"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": 1},
        "seed": {"type": "integer"},
        "out": {"type": "string"},
        "scenario": {"type": "string"},
        "game": {
            "type": "object",
            "properties": {
                "players": {"type": "integer", "minimum": 2},
                "type_bounds": {"type": "array",
                                "items": {"type": "array",
                                          "items": {"type": "number"},
                                          "minItems": 2, "maxItems": 2}},
                "density": {
                    "type": "object",
                    "properties": {
                        "kind": {"enum": ["independent-uniform",
                                          "independent-polynomial",
                                          "general-polynomial"]},
                        "marginals": {"type": "array", "items": _POLY},
                        "pdf": _POLY,
                    },
                    "required": ["kind"],
                    "additionalProperties": False,
                },
                "actions": {"type": "array"},
                "payoffs": {
                    "type": "object",
                    "properties": {
                        "form": {"const": "table"},
                        "entries": {"type": "array"},
                    },
                    "required": ["form", "entries"],
                    "additionalProperties": False,
                },
                "bound": {"type": "number"},
            },
            "required": ["players", "type_bounds", "density", "actions",
                         "payoffs"],
            "additionalProperties": False,
        },
        "auction": {
            "type": "object",
            "properties": {
                "builder": {"enum": ["first-price", "all-pay", "bertrand"]},
                "players": {"type": "integer", "minimum": 2},
                "b_bar": {"type": "array", "items": {"type": "number"}},
                "p_bar": {"type": "array", "items": {"type": "number"}},
                "quit": {"type": "number"},
                "value_lo": {"type": "array", "items": {"type": "number"}},
                "value_hi": {"type": "array", "items": {"type": "number"}},
                "prize": _POLY,
                "demand": _POLY,
            },
            "required": ["builder", "players"],
            "additionalProperties": False,
        },
        "solver": {
            "type": "object",
            "properties": {
                "cutoff_grid": {"type": "number"},
                "tol": {"type": "number"},
                "accept_residual": {"type": "number"},
                "damping": {"type": "number"},
                "max_iter": {"type": "integer"},
                "type_grid": {"type": "integer"},
                "m_schedule": {"type": "array", "items": {"type": "integer"}},
                "bid_grid_schedule": {"type": "array",
                                      "items": {"type": "integer"}},
                "value_cells": {"type": "integer"},
                "update": {"enum": ["jacobi", "gauss-seidel"]},
                "seed": {"type": "integer"},
            },
            "additionalProperties": False,
        },
        "verify": {
            "type": "object",
            "properties": {
                "type_samples": {"type": "integer"},
                "tol_br": {"type": "number"},
                "levels": {"type": "array", "items": {"type": "integer"}},
                "profile": {"type": "string"},
                "sequence": {"type": "string"},
            },
            "additionalProperties": False,
        },
        "conditions": {
            "type": "object",
            "properties": {
                "checks": {"type": "array",
                           "items": {"enum": ["single-crossing",
                                              "increasing-differences",
                                              "supermodularity",
                                              "quasi-supermodularity",
                                              "affiliation"]}},
                "cutoff_grid": {"type": "integer"},
                "tol": {"type": "number"},
            },
            "additionalProperties": False,
        },
        "profile": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "breakpoints": {"type": "array", "items": {"type": "number"}},
                    "actions": {"type": "array"},
                },
                "required": ["breakpoints", "actions"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["schema"],
    "additionalProperties": False,
}


class ConfigError(Exception):
    pass


def _poly_eval(coeffs):
    """Closure over polynomial terms sum_k c_k * prod_j t_j^e_kj."""
    terms = [(float(c), tuple(int(e) for e in exps)) for c, exps in coeffs]

    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape[1:])
        for c, exps in terms:
            mono = np.full(t.shape[1:], c)
            for j, e in enumerate(exps):
                if e:
                    mono = mono * t[j] ** e
            out = out + mono
        return out

    return f, max((sum(e) for _, e in terms), default=0)


def _action_key(a):
    return tuple(a) if isinstance(a, list) else a


def build_game(spec: dict) -> BayesGame:
    n = spec["players"]
    bounds = spec["type_bounds"]
    if len(bounds) != n:
        raise ConfigError("one type box per player required")
    spaces = [TypeSpace(float(lo), float(hi)) for lo, hi in bounds]
    dens = spec["density"]
    if dens["kind"] == "independent-uniform":
        density = JointDensity(spaces)
    elif dens["kind"] == "independent-polynomial":
        margs = []
        for j, p in enumerate(dens["marginals"]):
            f, _ = _poly_eval(p["coeffs"])
            margs.append(Marginal(spaces[j].lo, spaces[j].hi,
                                  pdf=lambda t, f=f: f(t[None, ...])))
        density = JointDensity(spaces, kind="independent", marginals=margs)
    else:
        f, _ = _poly_eval(dens["pdf"]["coeffs"])
        density = JointDensity(spaces, kind="general", pdf=f)
    actions = [[_action_key(a) for a in acts] for acts in spec["actions"]]
    action_spaces = [ActionSpace.finite(acts) for acts in actions]
    entries = spec["payoffs"]["entries"]
    if len(entries) != n:
        raise ConfigError("one payoff table per player required")
    tables = []
    degree = 0
    for ent in entries:
        table = {}
        for row in ent:
            prof = tuple(_action_key(a) for a in row["profile"])
            f, deg = _poly_eval(row["poly"]["coeffs"])
            degree = max(degree, deg)
            table[prof] = f
        tables.append(table)

    def payoff(i, acts, t):
        return tables[i][tuple(acts)](t)

    return BayesGame(n=n, type_spaces=spaces, action_spaces=action_spaces,
                     density=density, payoff=payoff,
                     bound=float(spec.get("bound", np.inf)),
                     poly_degree=degree, name="config-game")


def build_auction(spec: dict) -> GeneralizedAuction:
    n = spec["players"]
    builder = spec["builder"]
    if builder == "first-price":
        return build_first_price(
            n,
            b_bar=spec.get("b_bar"),
            quit_action=float(spec.get("quit", -1.0)),
            value_lo=spec.get("value_lo"), value_hi=spec.get("value_hi"))
    if builder == "all-pay":
        # prize polynomial in (b, v_1, ..., v_n): exponent index 0 is the bid
        f, _ = _poly_eval(spec["prize"]["coeffs"])

        def w(i, b, v):
            v = np.asarray(v, dtype=float)
            b_arr = np.broadcast_to(np.asarray(b, dtype=float), v.shape[1:])
            stacked = np.concatenate([b_arr[None, ...], v], axis=0)
            return f(stacked)

        return build_all_pay(n, w, b_bar=spec.get("b_bar"),
                             quit_action=float(spec.get("quit", -1.0)),
                             value_lo=spec.get("value_lo"),
                             value_hi=spec.get("value_hi"))
    f, _ = _poly_eval(spec["demand"]["coeffs"])

    def demand(p):
        return f(np.asarray(p, dtype=float))

    return build_bertrand(n, demand, p_bar=spec["p_bar"],
                          quit_action=float(spec.get("quit", -1.0)))


class RunConfig:
    """Validated run configuration."""

    def __init__(self, data: dict):
        try:
            jsonschema.validate(data, CONFIG_SCHEMA)
        except jsonschema.ValidationError as e:
            raise ConfigError(f"config rejected: {e.message}") from e
        self.data = data
        self.seed = int(data.get("seed", 0))
        self.out = data.get("out")
        self.scenario: Optional[Scenario] = None
        self.game: Optional[BayesGame] = None
        self.auction: Optional[GeneralizedAuction] = None
        if "scenario" in data:
            self.scenario = load_scenario(data["scenario"])
            self.game = self.scenario.game
            self.auction = self.scenario.auction
        if "game" in data:
            self.game = build_game(data["game"])
        if "auction" in data:
            self.auction = build_auction(data["auction"])
        if self.game is None and self.auction is None:
            raise ConfigError("config needs a scenario, game, or auction")

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise ConfigError(f"invalid JSON: {e}") from e
        return cls(data)

    def solve_settings(self, **overrides) -> SolveSettings:
        body = dict(self.data.get("solver", {}))
        if "m_schedule" in body:
            body["m_schedule"] = tuple(body["m_schedule"])
        if "bid_grid_schedule" in body:
            body["bid_grid_schedule"] = tuple(body["bid_grid_schedule"])
        body.setdefault("seed", self.seed)
        body.update(overrides)
        return SolveSettings(**body)

    def profile(self, game=None):
        if "profile" not in self.data:
            return None
        game = game or self.game
        out = []
        for i, s in enumerate(self.data["profile"]):
            acts = [_action_key(a) for a in s["actions"]]
            space = game.action_spaces[i] if game is not None else None
            out.append(StepStrategy(s["breakpoints"], acts, space))
        return out
