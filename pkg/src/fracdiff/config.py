"""Run configuration: a small YAML document with strict validation.

Layout (all sections optional except ``mode``):

    mode: direct | inverse-space | inverse-time | mlf | dn-apply | reduce
          | laplace-check | verify-all
    problem:
      epsilon: 0.5
      zetas: [1.0, 0.6]
      final_time: 1.0
      phis: [{profile: bump, scale: 0.2}]
      source: {type: space_only, profile: sin, scale: 1.0}
      # separable sources add: amplitude: one_plus_t | constant | linear
    mlf: {beta: 1.0, zeta: 1.0, z: 1.0}          # mlf mode only
    operator: {mu: 2.0, s_samples: [1, 2, 5]}    # dn-apply / laplace-check
    numerics: {k_max: 32, n_time: 512, grid_gamma: 2.0, tol: 1.0e-10, seed: 0}
    output: {directory: out, format: csv}

Unknown keys anywhere are rejected; every violated invariant is reported,
not just the first.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
import yaml

from .errors import ParseError, ValidationError

MODES = (
    "mlf",
    "dn-apply",
    "reduce",
    "laplace-check",
    "direct",
    "inverse-space",
    "inverse-time",
    "verify-all",
)

SPACE_PROFILES = ("sin", "sin2", "bump", "bump2", "cubic_bump")
TIME_AMPLITUDES = ("constant", "linear", "one_plus_t")
_INVERSE_MODES = ("inverse-space", "inverse-time")


def space_profile(name: str, scale: float = 1.0):
    """Named analytic space shapes available to configuration files."""
    if name == "sin":
        return lambda x: scale * np.sin(x)
    if name == "sin2":
        return lambda x: scale * np.sin(2.0 * x)
    if name == "bump":
        return lambda x: scale * x * (math.pi - x)
    if name == "bump2":
        return lambda x: scale * (x * (math.pi - x)) ** 2
    if name == "cubic_bump":
        return lambda x: scale * (x * (math.pi - x)) ** 3
    raise ValidationError([f"unknown space profile {name!r}"])


def time_amplitude(name: str, t: np.ndarray, scale: float = 1.0) -> np.ndarray:
    if name == "constant":
        return scale * np.ones_like(t)
    if name == "linear":
        return scale * t
    if name == "one_plus_t":
        return scale * (1.0 + t)
    raise ValidationError([f"unknown time amplitude {name!r}"])


@dataclass
class ProblemConfig:
    epsilon: float = 0.0
    zetas: tuple = (1.0, 0.5)
    final_time: float = 1.0
    phis: tuple = ()
    source: dict | None = None


@dataclass
class NumericsConfig:
    k_max: int = 32
    n_time: int = 512
    grid_gamma: float = 2.0
    tol: float = 1e-10
    seed: int = 0


@dataclass
class OutputConfig:
    directory: str = "out"
    format: str = "csv"


@dataclass
class RunConfig:
    mode: str
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    mlf: dict = field(default_factory=dict)
    operator: dict = field(default_factory=dict)

    def to_document(self) -> str:
        payload = {
            "mode": self.mode,
            "problem": {
                "epsilon": self.problem.epsilon,
                "zetas": list(self.problem.zetas),
                "final_time": self.problem.final_time,
                "phis": [dict(p) for p in self.problem.phis],
                "source": dict(self.problem.source) if self.problem.source else None,
            },
            "numerics": asdict(self.numerics),
            "output": asdict(self.output),
            "mlf": dict(self.mlf),
            "operator": dict(self.operator),
        }
        return yaml.safe_dump(payload, sort_keys=True)


def _expect_mapping(raw, where, errors):
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        errors.append(f"{where} must be a mapping")
        return {}
    return raw


def _reject_unknown(raw: dict, allowed, where, errors):
    for key in raw:
        if key not in allowed:
            errors.append(f"unknown key {where}.{key}")


def parse_config(text: str) -> RunConfig:
    """Parse and validate one configuration document."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed configuration: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("configuration must be a mapping at the top level")

    errors: list[str] = []
    _reject_unknown(raw, {"mode", "problem", "numerics", "output", "mlf", "operator"}, "", errors)

    mode = raw.get("mode")
    if mode not in MODES:
        errors.append(f"mode must be one of {MODES}, got {mode!r}")

    praw = _expect_mapping(raw.get("problem"), "problem", errors)
    _reject_unknown(
        praw, {"epsilon", "zetas", "final_time", "phis", "source"}, "problem", errors
    )
    epsilon = float(praw.get("epsilon", 0.0))
    if not abs(epsilon) < 1.0:
        errors.append(f"|epsilon| < 1 violated: epsilon={epsilon}")
    zetas = tuple(float(z) for z in praw.get("zetas", (1.0, 0.5)))
    if len(zetas) < 2:
        errors.append("zetas needs at least two stage orders")
    for j, z in enumerate(zetas):
        if not 0.0 < z <= 1.0:
            errors.append(f"zeta_{j}={z} outside (0, 1]")
    rho_m = sum(zetas) - 1.0
    if rho_m <= 0.0:
        errors.append(f"total order sum(zetas)-1 = {rho_m} must be positive")
    if mode in _INVERSE_MODES and not 0.0 < rho_m < 1.0:
        errors.append(
            f"inverse modes require 0 < total order < 1; schedule gives {rho_m}"
        )
    final_time = float(praw.get("final_time", 1.0))
    if final_time <= 0.0:
        errors.append(f"final_time must be positive, got {final_time}")

    phis = []
    for i, entry in enumerate(praw.get("phis", []) or []):
        entry = _expect_mapping(entry, f"problem.phis[{i}]", errors)
        _reject_unknown(entry, {"profile", "scale"}, f"problem.phis[{i}]", errors)
        prof = entry.get("profile")
        if prof not in SPACE_PROFILES:
            errors.append(
                f"problem.phis[{i}].profile must be one of {SPACE_PROFILES}, got {prof!r}"
            )
        phis.append({"profile": prof, "scale": float(entry.get("scale", 1.0))})
    if len(phis) > max(len(zetas) - 1, 0):
        errors.append(f"{len(phis)} initial functions but m={len(zetas) - 1}")

    source = praw.get("source")
    if source is not None:
        source = _expect_mapping(source, "problem.source", errors)
        _reject_unknown(
            source, {"type", "profile", "scale", "amplitude"}, "problem.source", errors
        )
        stype = source.get("type")
        if stype not in ("space_only", "separable"):
            errors.append(
                f"problem.source.type must be space_only or separable, got {stype!r}"
            )
        if source.get("profile") not in SPACE_PROFILES:
            errors.append(
                f"problem.source.profile must be one of {SPACE_PROFILES}"
            )
        if stype == "separable":
            if source.get("amplitude") not in TIME_AMPLITUDES:
                errors.append(
                    f"problem.source.amplitude must be one of {TIME_AMPLITUDES}"
                )
        source = {
            "type": stype,
            "profile": source.get("profile"),
            "scale": float(source.get("scale", 1.0)),
            **(
                {"amplitude": source.get("amplitude")}
                if stype == "separable"
                else {}
            ),
        }

    nraw = _expect_mapping(raw.get("numerics"), "numerics", errors)
    _reject_unknown(
        nraw, {"k_max", "n_time", "grid_gamma", "tol", "seed"}, "numerics", errors
    )
    numerics = NumericsConfig(
        k_max=int(nraw.get("k_max", 32)),
        n_time=int(nraw.get("n_time", 512)),
        grid_gamma=float(nraw.get("grid_gamma", 2.0)),
        tol=float(nraw.get("tol", 1e-10)),
        seed=int(nraw.get("seed", 0)),
    )
    if numerics.k_max < 1:
        errors.append(f"k_max must be >= 1, got {numerics.k_max}")
    if numerics.n_time < 8:
        errors.append(f"n_time must be >= 8, got {numerics.n_time}")
    if numerics.grid_gamma < 1.0:
        errors.append(f"grid_gamma must be >= 1, got {numerics.grid_gamma}")
    if not 0.0 < numerics.tol <= 1e-2:
        errors.append(f"tol must lie in (0, 1e-2], got {numerics.tol}")

    oraw = _expect_mapping(raw.get("output"), "output", errors)
    _reject_unknown(oraw, {"directory", "format"}, "output", errors)
    output = OutputConfig(
        directory=str(oraw.get("directory", "out")),
        format=str(oraw.get("format", "csv")),
    )
    if output.format not in ("csv", "json"):
        errors.append(f"output.format must be csv or json, got {output.format!r}")

    mlf = _expect_mapping(raw.get("mlf"), "mlf", errors)
    _reject_unknown(mlf, {"beta", "zeta", "z"}, "mlf", errors)
    if mode == "mlf":
        if "beta" not in mlf or float(mlf.get("beta", 0.0)) <= 0:
            errors.append("mlf mode needs mlf.beta > 0")
    mlf = {k: float(v) for k, v in mlf.items()}

    op = _expect_mapping(raw.get("operator"), "operator", errors)
    _reject_unknown(op, {"mu", "s_samples"}, "operator", errors)
    operator = {}
    if "mu" in op:
        operator["mu"] = float(op["mu"])
    if "s_samples" in op:
        operator["s_samples"] = [float(s) for s in op["s_samples"]]
        if any(s <= 0 for s in operator["s_samples"]):
            errors.append("operator.s_samples must be positive")

    if errors:
        raise ValidationError(errors)
    return RunConfig(
        mode=mode,
        problem=ProblemConfig(
            epsilon=epsilon,
            zetas=zetas,
            final_time=final_time,
            phis=tuple(phis),
            source=source,
        ),
        numerics=numerics,
        output=output,
        mlf=mlf,
        operator=operator,
    )
