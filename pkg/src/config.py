# -*- coding: utf-8 -*-
"""
Run configuration: one JSON document per run with sections polytope,
fibration | weights, potential, test_function, solver, scan, output and
scenario. Numbers may be ints, floats or rational strings ("1/2"); floats
are read as the exact rational of their decimal text.
"""
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from errors import ConfigError
from geometry import AffineFunc, LabelledPolytope, build_polytope, interval, standard_simplex, unit_cube
from numbers_util import jsonable, parse_number
from polynomials import PolynomialFunc
from stability import CreaseFunction, PLMax
from weights import FUTAKI_SIGNS, FibrationData, FibrationFactor

PRESETS = ("interval", "simplex", "cube")


def _number(value: Any, path: str):
    try:
        return parse_number(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ConfigError(path, f"not a number ({e})", value)


def _numbers(values: Any, path: str) -> List[Any]:
    if not isinstance(values, (list, tuple)):
        raise ConfigError(path, "expected a list", values)
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(values)]


def _table(table: Any, path: str) -> Dict[str, Any]:
    if not isinstance(table, dict):
        raise ConfigError(path, "expected a coefficient table {\"a,b\": coeff}", table)
    return {str(k): _number(v, f"{path}.{k}") for k, v in table.items()}


def _section(data: Dict[str, Any], key: str) -> Dict[str, Any]:
    value = data.get(key) or {}
    if not isinstance(value, dict):
        raise ConfigError(key, "expected an object", value)
    return value


@dataclass
class PolytopeConfig:
    normals: Optional[List[List[int]]] = None
    offsets: Optional[List[Any]] = None
    preset: Optional[str] = None
    dim: int = 2
    alpha: Any = 0
    beta: Any = 1

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "polytope") -> "PolytopeConfig":
        if "preset" in data:
            preset = data["preset"]
            if preset not in PRESETS:
                raise ConfigError(f"{path}.preset", f"must be one of {PRESETS}", preset)
            return cls(preset=preset, dim=int(data.get("dim", 1 if preset == "interval" else 2)),
                       alpha=_number(data.get("alpha", 0), f"{path}.alpha"),
                       beta=_number(data.get("beta", 1), f"{path}.beta"))
        if "normals" not in data or "offsets" not in data:
            raise ConfigError(path, "needs 'normals' and 'offsets' or a 'preset'")
        normals = data["normals"]
        if not isinstance(normals, list) or not all(isinstance(n, list) for n in normals):
            raise ConfigError(f"{path}.normals", "expected a list of integer vectors", normals)
        for i, n in enumerate(normals):
            if not all(isinstance(a, int) and not isinstance(a, bool) for a in n):
                raise ConfigError(f"{path}.normals[{i}]", "entries must be integers", n)
        return cls(normals=[list(n) for n in normals], offsets=_numbers(data["offsets"], f"{path}.offsets"),
                   dim=len(normals[0]) if normals else 0)

    def to_dict(self) -> Dict[str, Any]:
        if self.preset is not None:
            return jsonable({"preset": self.preset, "dim": self.dim, "alpha": self.alpha, "beta": self.beta})
        return jsonable({"normals": self.normals, "offsets": self.offsets})

    def build(self) -> LabelledPolytope:
        if self.preset == "interval":
            return interval(self.alpha, self.beta)
        if self.preset == "simplex":
            return standard_simplex(self.dim)
        if self.preset == "cube":
            return unit_cube(self.dim)
        return build_polytope(self.normals, self.offsets)


@dataclass
class FactorConfig:
    p: List[int]
    c: Any = 1
    d: int = 1
    scal: Any = 0

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str) -> "FactorConfig":
        if "p" not in data:
            raise ConfigError(f"{path}.p", "is required")
        p = data["p"]
        if not isinstance(p, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in p):
            raise ConfigError(f"{path}.p", "must be a list of integers", p)
        d = data.get("d", 1)
        if not isinstance(d, int) or d < 1:
            raise ConfigError(f"{path}.d", "must be a positive integer", d)
        return cls(p=list(p), c=_number(data.get("c", 1), f"{path}.c"), d=d,
                   scal=_number(data.get("scal", 0), f"{path}.scal"))

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({"p": self.p, "c": self.c, "d": self.d, "scal": self.scal})

    def build(self) -> FibrationFactor:
        return FibrationFactor(tuple(self.p), self.c, self.d, self.scal)


@dataclass
class FibrationConfig:
    factors: List[FactorConfig] = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "fibration") -> "FibrationConfig":
        factors = data.get("factors", [])
        if not isinstance(factors, list):
            raise ConfigError(f"{path}.factors", "expected a list", factors)
        return cls([FactorConfig.from_dict(f, f"{path}.factors[{i}]") for i, f in enumerate(factors)])

    def to_dict(self) -> Dict[str, Any]:
        return {"factors": [f.to_dict() for f in self.factors]}

    def build(self) -> FibrationData:
        return FibrationData(tuple(f.build() for f in self.factors))


@dataclass
class WeightsConfig:
    v: Dict[str, Any]
    w: Dict[str, Any]

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "weights") -> "WeightsConfig":
        for key in ("v", "w"):
            if key not in data:
                raise ConfigError(f"{path}.{key}", "is required")
        return cls(v=_table(data["v"], f"{path}.v"), w=_table(data["w"], f"{path}.w"))

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({"v": self.v, "w": self.w})

    def build(self, dim: int):
        return PolynomialFunc.from_table(self.v, dim), PolynomialFunc.from_table(self.w, dim)


@dataclass
class PotentialConfig:
    type: str = "guillemin"
    coeffs: Dict[str, Any] = field(default_factory=dict)
    direction: Optional[Dict[str, Any]] = None
    ts: List[Any] = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "potential") -> "PotentialConfig":
        kind = data.get("type", "guillemin")
        if kind not in ("guillemin", "poly"):
            raise ConfigError(f"{path}.type", "must be 'guillemin' or 'poly'", kind)
        coeffs = _table(data.get("coeffs", {}), f"{path}.coeffs")
        direction = _table(data["direction"], f"{path}.direction") if data.get("direction") else None
        return cls(kind, coeffs, direction, _numbers(data.get("ts", []), f"{path}.ts"))

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({"type": self.type, "coeffs": self.coeffs, "direction": self.direction, "ts": self.ts})


@dataclass
class TestFunctionConfig:
    __test__ = False

    type: str = "crease"
    h: List[Any] = field(default_factory=list)
    c: Any = 0
    coeffs: Dict[str, Any] = field(default_factory=dict)
    pieces: List[Dict[str, Any]] = field(default_factory=list)
    x0: Optional[List[Any]] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "test_function") -> "TestFunctionConfig":
        kind = data.get("type", "crease")
        if kind not in ("crease", "poly", "affine", "plmax"):
            raise ConfigError(f"{path}.type", "must be one of crease, poly, affine, plmax", kind)
        pieces = []
        for i, piece in enumerate(data.get("pieces", [])):
            pieces.append({"normal": _numbers(piece.get("normal", []), f"{path}.pieces[{i}].normal"),
                           "offset": _number(piece.get("offset", 0), f"{path}.pieces[{i}].offset")})
        if kind == "plmax" and not pieces:
            raise ConfigError(f"{path}.pieces", "a plmax test function needs at least one piece")
        x0 = _numbers(data["x0"], f"{path}.x0") if data.get("x0") is not None else None
        return cls(kind, _numbers(data.get("h", []), f"{path}.h"), _number(data.get("c", 0), f"{path}.c"),
                   _table(data.get("coeffs", {}), f"{path}.coeffs"), pieces, x0)

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({"type": self.type, "h": self.h, "c": self.c, "coeffs": self.coeffs,
                         "pieces": self.pieces, "x0": self.x0})

    def build(self, dim: int):
        if self.type == "crease":
            if len(self.h) != dim:
                raise ConfigError("test_function.h", f"needs {dim} entries", self.h)
            return CreaseFunction(tuple(self.h), self.c)
        if self.type == "poly":
            return PolynomialFunc.from_table(self.coeffs, dim)
        pieces = tuple(AffineFunc(tuple(p["normal"]), p["offset"]) for p in self.pieces)
        if self.type == "affine":
            return pieces[0] if pieces else AffineFunc(tuple(self.h), -self.c)
        return PLMax(pieces)


@dataclass
class SolverConfig:
    grid_points: Optional[int] = None
    degree: Optional[int] = None
    degree_slack: int = 6
    tol: float = 1e-9
    affine_tol: float = 1e-8
    futaki_sign: str = "consistent"
    ascent_iterations: int = 50
    eig_grid: int = 41

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "solver") -> "SolverConfig":
        cfg = cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})
        cfg.validate(path)
        return cfg

    def validate(self, path: str = "solver") -> None:
        if self.grid_points is not None and (not isinstance(self.grid_points, int) or self.grid_points < 16):
            raise ConfigError(f"{path}.grid_points", "must be >= 16", self.grid_points)
        if self.degree is not None and (not isinstance(self.degree, int) or self.degree < 0):
            raise ConfigError(f"{path}.degree", "must be a non-negative integer or null", self.degree)
        if not isinstance(self.degree_slack, int) or self.degree_slack < 0:
            raise ConfigError(f"{path}.degree_slack", "must be a non-negative integer", self.degree_slack)
        for name in ("tol", "affine_tol"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or value <= 0:
                raise ConfigError(f"{path}.{name}", "must be positive", value)
        if self.futaki_sign not in FUTAKI_SIGNS:
            raise ConfigError(f"{path}.futaki_sign", f"must be one of {FUTAKI_SIGNS}", self.futaki_sign)
        if not isinstance(self.ascent_iterations, int) or self.ascent_iterations < 0:
            raise ConfigError(f"{path}.ascent_iterations", "must be a non-negative integer", self.ascent_iterations)
        if not isinstance(self.eig_grid, int) or self.eig_grid < 16:
            raise ConfigError(f"{path}.eig_grid", "must be >= 16", self.eig_grid)

    def grid_for(self, dim: int) -> int:
        return self.grid_points or (256 if dim == 1 else 128)

    def to_dict(self) -> Dict[str, Any]:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class ScanConfig:
    directions: int = 36
    offsets: int = 41
    refine: bool = True

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "scan") -> "ScanConfig":
        cfg = cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})
        for name in ("directions", "offsets"):
            value = getattr(cfg, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{path}.{name}", "must be a positive integer", value)
        if not isinstance(cfg.refine, bool):
            raise ConfigError(f"{path}.refine", "must be true or false", cfg.refine)
        return cfg

    def to_dict(self) -> Dict[str, Any]:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class OutputConfig:
    dir: str = "outputs"
    csv: bool = True

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "output") -> "OutputConfig":
        cfg = cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})
        if not isinstance(cfg.dir, str) or not cfg.dir:
            raise ConfigError(f"{path}.dir", "must be a non-empty path", cfg.dir)
        return cfg

    def to_dict(self) -> Dict[str, Any]:
        return {"dir": self.dir, "csv": self.csv}


@dataclass
class ScenarioConfig:
    fiber: PolytopeConfig
    factors: List[FactorConfig]
    sweep: List[List[Any]]
    genus: Optional[int] = None
    area: Any = 1

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "scenario") -> "ScenarioConfig":
        if "fiber" not in data:
            raise ConfigError(f"{path}.fiber", "is required")
        factors = [FactorConfig.from_dict(f, f"{path}.factors[{i}]") for i, f in enumerate(data.get("factors", []))]
        if not factors:
            raise ConfigError(f"{path}.factors", "needs at least one base factor")
        sweep = []
        for i, point in enumerate(data.get("sweep", [])):
            values = point if isinstance(point, list) else [point]
            if len(values) != len(factors):
                raise ConfigError(f"{path}.sweep[{i}]", f"needs {len(factors)} class parameters", point)
            sweep.append(_numbers(values, f"{path}.sweep[{i}]"))
        if not sweep:
            raise ConfigError(f"{path}.sweep", "needs at least one class")
        genus = data.get("genus")
        if genus is not None and (not isinstance(genus, int) or genus < 0):
            raise ConfigError(f"{path}.genus", "must be a non-negative integer", genus)
        area = _number(data.get("area", 1), f"{path}.area")
        if area <= 0:
            raise ConfigError(f"{path}.area", "must be positive", area)
        return cls(PolytopeConfig.from_dict(data["fiber"], f"{path}.fiber"), factors, sweep, genus, area)

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({"fiber": self.fiber.to_dict(), "factors": [f.to_dict() for f in self.factors],
                         "sweep": self.sweep, "genus": self.genus, "area": self.area})

    def fibration(self) -> FibrationData:
        return FibrationData(tuple(f.build() for f in self.factors))


@dataclass
class RunConfig:
    name: str = "run"
    description: str = ""
    polytope: Optional[PolytopeConfig] = None
    fibration: Optional[FibrationConfig] = None
    weights: Optional[WeightsConfig] = None
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    test_function: Optional[TestFunctionConfig] = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    scenario: Optional[ScenarioConfig] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        if data.get("fibration") is not None and data.get("weights") is not None:
            raise ConfigError("weights", "give either 'fibration' or 'weights', not both")
        return cls(
            name=str(data.get("name", "run")),
            description=str(data.get("description", "")),
            polytope=PolytopeConfig.from_dict(_section(data, "polytope")) if data.get("polytope") else None,
            fibration=FibrationConfig.from_dict(_section(data, "fibration")) if data.get("fibration") is not None else None,
            weights=WeightsConfig.from_dict(_section(data, "weights")) if data.get("weights") is not None else None,
            potential=PotentialConfig.from_dict(_section(data, "potential")),
            test_function=TestFunctionConfig.from_dict(_section(data, "test_function")) if data.get("test_function") else None,
            solver=SolverConfig.from_dict(_section(data, "solver")),
            scan=ScanConfig.from_dict(_section(data, "scan")),
            output=OutputConfig.from_dict(_section(data, "output")),
            scenario=ScenarioConfig.from_dict(_section(data, "scenario")) if data.get("scenario") else None,
        )

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"name": self.name, "description": self.description}
        for key in ("polytope", "fibration", "weights", "test_function", "scenario"):
            section = getattr(self, key)
            if section is not None:
                out[key] = section.to_dict()
        out["potential"] = self.potential.to_dict()
        out["solver"] = self.solver.to_dict()
        out["scan"] = self.scan.to_dict()
        out["output"] = self.output.to_dict()
        return out

    def require_polytope(self) -> PolytopeConfig:
        if self.polytope is None:
            raise ConfigError("polytope", "is required for this command")
        return self.polytope

    def require_weights(self) -> None:
        if self.fibration is None and self.weights is None:
            raise ConfigError("fibration", "one of 'fibration' or 'weights' is required for this command")


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError("<root>", f"invalid JSON in {path}: {e}")
    return RunConfig.from_dict(data)


def save_config(cfg: RunConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cfg.to_dict(), fh, indent=2)
