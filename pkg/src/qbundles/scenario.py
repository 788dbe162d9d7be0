"""Declarative scenario files: parsing, validation and lazy construction.

A scenario is a JSON object.  Rationals are integers or ``"p/q"``
strings, matrices are row-major arrays and charts are numbered from 0.
See ``docs/scenarios.md`` for the schema with examples.
"""

from __future__ import annotations

import json
from functools import cached_property
from importlib import resources
from pathlib import Path

import jsonschema

from .algebra import (
    Algebra,
    AlgebraCovering,
    check_algebra,
    function_algebra,
    matrix_algebra,
    square_zero_algebra,
    truncated_polynomial_algebra,
    upper_triangular_algebra,
)
from .dga import universal_calculi
from .errors import InvalidData, QBundleError
from .hopf import (
    HopfAlgebra,
    comodule_from_columns,
    cyclic_group_table,
    function_hopf_algebra,
    group_algebra,
    grouplike_comodule,
    regular_left_comodule,
    sweedler_hopf,
    trivial_comodule,
)
from .linalg import Subspace, scalar, vector

RATIONAL = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*-?\d+)?\s*$"}]}
VECTOR = {"type": "array", "items": RATIONAL}
MATRIX = {"type": "array", "items": VECTOR}
TERM = {"type": "array", "prefixItems": [RATIONAL, VECTOR, VECTOR], "minItems": 3, "maxItems": 3}
FORM = {"type": "array", "items": TERM}
PAIR_KEY = r"^\d+-\d+$"

SCHEMA = {
    "type": "object",
    "required": ["name", "base", "pipeline"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "base": {
            "type": "object",
            "oneOf": [
                {"required": ["function_algebra"]},
                {"required": ["named"]},
                {"required": ["structure", "unit"]},
            ],
            "properties": {
                "function_algebra": {"type": "integer", "minimum": 1},
                "named": {"enum": ["upper_triangular", "square_zero", "truncated_polynomial", "matrix"]},
                "param": {"type": "integer", "minimum": 1},
                "structure": {"type": "array", "items": MATRIX},
                "unit": VECTOR,
            },
            "additionalProperties": False,
        },
        "covering": {"type": "array", "items": MATRIX, "minItems": 1},
        "submodules": {"type": "array", "items": MATRIX},
        "hopf": {
            "type": "object",
            "properties": {
                "cyclic_group": {"type": "integer", "minimum": 1},
                "group_table": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                "dual_of_group_table": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                "sweedler": {"const": True},
            },
            "minProperties": 1,
            "maxProperties": 1,
            "additionalProperties": False,
        },
        "comodule": {
            "type": "object",
            "properties": {
                "grouplike": {"type": "integer", "minimum": 0},
                "regular": {"const": True},
                "trivial": {"type": "integer", "minimum": 0},
                "coaction_columns": MATRIX,
            },
            "minProperties": 1,
            "maxProperties": 1,
            "additionalProperties": False,
        },
        "tau": {"type": "object", "patternProperties": {PAIR_KEY: MATRIX}, "additionalProperties": False},
        "transitions": {
            "type": "object",
            "required": ["fibre_dim"],
            "properties": {
                "fibre_dim": {"type": "integer", "minimum": 0},
                "functions": {"type": "object", "patternProperties": {PAIR_KEY: {"type": "array", "items": MATRIX}},
                              "additionalProperties": False},
            },
            "additionalProperties": False,
        },
        "calculi": {
            "type": "object",
            "required": ["universal"],
            "properties": {"universal": {"type": "integer", "minimum": 0, "maximum": 3}},
            "additionalProperties": False,
        },
        "gauges": {"type": "array", "items": {"type": "array", "items": FORM}},
        "connection_forms": {"type": "array", "items": {"type": "array", "items": {"type": "array", "items": FORM}}},
        "pipeline": {
            "type": "array",
            "minItems": 1,
            "items": {
                "oneOf": [
                    {"type": "string"},
                    {
                        "type": "object",
                        "required": ["step"],
                        "properties": {"step": {"type": "string"}, "expect": {"type": "object"}},
                        "additionalProperties": False,
                    },
                ]
            },
        },
    },
}


class ScenarioError(QBundleError):
    """The scenario file cannot be parsed or fails validation."""


def _pair(key: str) -> tuple[int, int]:
    i, j = key.split("-")
    return int(i), int(j)


class Scenario:
    """Validated scenario data with lazily built mathematical objects."""

    def __init__(self, data: dict, source: str = "<memory>"):
        try:
            jsonschema.validate(data, SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ScenarioError(f"{source}: invalid scenario at {where}: {exc.message}") from None
        self.data = data
        self.source = source
        self.name = data["name"]
        self.pipeline = [s if isinstance(s, dict) else {"step": s} for s in data["pipeline"]]
        from .checks import CATALOG

        unknown = [s["step"] for s in self.pipeline if s["step"] not in CATALOG]
        if unknown:
            raise ScenarioError(f"{source}: unknown pipeline steps: {', '.join(unknown)}")
        for s in self.pipeline:
            missing = CATALOG[s["step"]].missing(data)
            if missing:
                raise ScenarioError(f"{source}: step {s['step']} needs {'; '.join(missing)}")
        try:
            self.build_sections()
        except ZeroDivisionError:
            raise ScenarioError(f"{source}: a rational has zero denominator") from None
        except ValueError as exc:  # includes QBundleError
            raise ScenarioError(f"{source}: inconsistent scenario: {exc}") from None

    def build_sections(self):
        """Construct every declared section so bad references and dimensions surface before any step runs."""
        d = self.data
        self.base
        if "covering" in d:
            self.covering
        if "covering" in d or "submodules" in d:
            self.submodules
        if "hopf" in d:
            self.hopf
        if "comodule" in d:
            self.comodule
        if "tau" in d:
            self.principal
        if "transitions" in d or ("tau" in d and "comodule" in d):
            self.transitions
        if "calculi" in d:
            self.calculi
            if "gauges" in d:
                self.gauges
            if "connection_forms" in d or ("gauges" in d and "comodule" in d):
                self.local_connections

    @classmethod
    def load(cls, path: str | Path) -> Scenario:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ScenarioError(f"{path}: cannot read file ({exc.strerror})") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
        return cls(data, path.name)

    def require(self, *keys: str):
        missing = [k for k in keys if k not in self.data]
        if missing:
            raise InvalidData(f"scenario lacks section(s): {', '.join(missing)}")

    # constructions

    @cached_property
    def base(self) -> Algebra:
        section = self.data["base"]
        if "function_algebra" in section:
            return function_algebra(section["function_algebra"])
        if "named" in section:
            name, param = section["named"], section.get("param", 2)
            if name == "upper_triangular":
                return upper_triangular_algebra()
            if name == "square_zero":
                return square_zero_algebra(param)
            if name == "truncated_polynomial":
                return truncated_polynomial_algebra(param)
            return matrix_algebra(param)
        n = len(section["structure"])
        table = [[vector(section["structure"][i][j]) for j in range(n)] for i in range(n)]
        alg = Algebra.from_table(table, vector(section["unit"]), name=self.name)
        report = check_algebra(alg)
        if report:
            raise InvalidData("base structure constants are not a unital associative algebra", report)
        return alg

    @cached_property
    def covering(self) -> AlgebraCovering:
        self.require("covering")
        n = self.base.dim
        for gens in self.data["covering"]:
            if any(len(v) != n for v in gens):
                raise InvalidData(f"covering vectors must have length {n}")
        return AlgebraCovering(self.base, [Subspace(n, [vector(v) for v in gens]) for gens in self.data["covering"]])

    @cached_property
    def submodules(self) -> list[Subspace]:
        """Submodules of the regular module; defaults to the covering ideals."""
        n = self.base.dim
        if "submodules" in self.data:
            if any(len(v) != n for gens in self.data["submodules"] for v in gens):
                raise InvalidData(f"submodule vectors must have length {n}")
            return [Subspace(n, [vector(v) for v in gens]) for gens in self.data["submodules"]]
        return [j.space for j in self.covering.ideals]

    @cached_property
    def hopf(self) -> HopfAlgebra:
        self.require("hopf")
        section = self.data["hopf"]
        if "cyclic_group" in section:
            return group_algebra(cyclic_group_table(section["cyclic_group"]))
        if "group_table" in section:
            return group_algebra(section["group_table"])
        if "dual_of_group_table" in section:
            return function_hopf_algebra(section["dual_of_group_table"])
        return sweedler_hopf()

    @cached_property
    def comodule(self):
        self.require("comodule")
        section = self.data["comodule"]
        h = self.hopf
        if "grouplike" in section:
            return grouplike_comodule(h, section["grouplike"])
        if "regular" in section:
            return regular_left_comodule(h)
        if "trivial" in section:
            return trivial_comodule(h, section["trivial"])
        cols = [vector(c) for c in section["coaction_columns"]]
        return comodule_from_columns(h, len(cols), cols)

    @cached_property
    def principal(self):
        from .associated import PrincipalLocalData

        self.require("tau")
        tau = {}
        for key, cols in self.data["tau"].items():
            i, j = _pair(key)
            self._check_pair(i, j)
            tau[(i, j)] = [vector(c) for c in cols]
        return PrincipalLocalData(self.hopf, self.covering, tau)

    def _check_pair(self, i: int, j: int):
        n = len(self.covering)
        if not (0 <= i < n and 0 <= j < n and i != j):
            raise InvalidData(f"chart pair ({i}, {j}) does not exist")

    @cached_property
    def transitions(self):
        from .associated import transitions_from_tau
        from .qvb import TransitionMaps

        if "transitions" in self.data:
            section = self.data["transitions"]
            r = section["fibre_dim"]
            funcs = section.get("functions")
            if not funcs:
                return TransitionMaps.identity(self.covering, r)
            g = {}
            for key, mat in funcs.items():
                i, j = _pair(key)
                self._check_pair(i, j)
                g[(i, j)] = mat
            return TransitionMaps.from_functions(self.covering, r, g)
        if "tau" in self.data and "comodule" in self.data:
            return transitions_from_tau(self.principal, self.comodule)
        raise InvalidData("scenario needs either transitions or tau with a comodule")

    @cached_property
    def calculi(self):
        self.require("calculi")
        return universal_calculi(self.covering, self.data["calculi"]["universal"])

    def form(self, chart: int, terms) -> tuple:
        """``sum coef * a0 d(a1)`` in the calculus of ``chart``."""
        cal = self.calculi.charts[chart]
        n0 = len(list(cal.indices(0)))
        out = [scalar(0)] * cal.dim
        for coef, a0, a1 in terms:
            if len(a0) != n0 or len(a1) != n0:
                raise InvalidData(f"form terms on chart {chart} need vectors of length {n0}")
            pad = lambda v: tuple(vector(v)) + (scalar(0),) * (cal.dim - n0)  # noqa: E731
            prod = cal.mul(pad(a0), cal.diff(pad(a1)))
            c = scalar(coef)
            out = [x + c * y for x, y in zip(out, prod)]
        return tuple(out)

    @cached_property
    def gauges(self):
        from .associated import GaugePotential

        self.require("gauges")
        specs = self.data["gauges"]
        if len(specs) != len(self.covering):
            raise InvalidData("need one gauge potential per chart")
        out = []
        for i, values in enumerate(specs):
            if len(values) != self.hopf.dim:
                raise InvalidData(f"gauge potential {i} needs one form per Hopf basis element")
            out.append(GaugePotential(i, self.calculi.charts[i], self.hopf, [self.form(i, v) for v in values]))
        return out

    @cached_property
    def local_connections(self):
        from .associated import gauge_local_connection
        from .connection import LocalConnection

        if "gauges" in self.data:
            return [gauge_local_connection(g, self.comodule) for g in self.gauges]
        self.require("connection_forms")
        specs = self.data["connection_forms"]
        if len(specs) != len(self.covering):
            raise InvalidData("need one connection form per chart")
        return [LocalConnection(i, self.calculi.charts[i], len(rows), [[self.form(i, t) for t in row] for row in rows])
                for i, rows in enumerate(specs)]


def bundled_dir():
    return resources.files("qbundles") / "scenarios"


def bundled_scenarios() -> list[str]:
    return sorted(p.name[:-5] for p in bundled_dir().iterdir()
                  if p.name.endswith(".json") and p.name != "manifest.json")


def resolve(name_or_path: str) -> Path:
    """A file path, or the name of a bundled scenario."""
    p = Path(name_or_path)
    if p.exists() or p.suffix == ".json":
        return p
    candidate = bundled_dir() / f"{name_or_path}.json"
    return Path(str(candidate))
