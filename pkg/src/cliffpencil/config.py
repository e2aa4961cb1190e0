"""Experiment configuration: TOML ingestion, validation, and presets.

A configuration is a single TOML document (key/value pairs with nested
tables); outputs echo it as canonical JSON for diffable provenance.  The
rank/dimension pairing is validated against the maximal pencil rank the
target dimension supports, with one documented exception: dim_v = 1 with
rank 1 is admitted as the classical scalar target, where the operator is
the plain time derivative (no complex structure exists in dimension one).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

import numpy as np

from .clifford import PencilError, radon_hurwitz_max_rank

__all__ = ["ExperimentConfig", "presets", "preset_names", "config_from_toml",
           "config_to_toml"]

_CHECKS = ("pipeline", "su2-pointwise")
_POLICIES = ("auto", "explicit")


@dataclass
class ExperimentConfig:
    name: str
    rank: int
    dim_v: int
    frame: list
    hamiltonian: list = dc_field(default_factory=list)   # term records
    lattice: list = None                                  # d x d basis or None
    check: str = "pipeline"
    su2_weights: list = None
    truncation_policy: str = "auto"
    q_max: float = 0.25
    truncation_N: float = None
    cutoff: int = 8
    fiber_tol: float = 1e-12
    fiber_max_iter: int = 200
    refine_tol: float = 1e-12
    accept_tol: float = 1e-10
    newton_max_iter: int = 80
    starts: int = 64
    seed: int = 2024
    fiber_radius: float = 0.05

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.check not in _CHECKS:
            raise PencilError(f"unknown check kind {self.check!r}")
        if self.check == "su2-pointwise":
            if self.su2_weights is None or len(self.su2_weights) != 3:
                raise PencilError("su2-pointwise check needs three weights")
            return
        if self.rank < 1 or self.dim_v < 1:
            raise PencilError("rank and dim_v must be positive")
        scalar_case = self.dim_v == 1 and self.rank == 1
        if not scalar_case and radon_hurwitz_max_rank(self.dim_v) < self.rank:
            raise PencilError(
                f"dimension {self.dim_v} admits pencils of rank at most "
                f"{radon_hurwitz_max_rank(self.dim_v)}, requested {self.rank}")
        frame = np.asarray(self.frame, dtype=float)
        if frame.shape != (self.rank, self.rank):
            raise PencilError("frame must be an r x r matrix")
        if self.truncation_policy not in _POLICIES:
            raise PencilError(f"unknown truncation policy {self.truncation_policy!r}")
        if self.truncation_policy == "explicit" and self.truncation_N is None:
            raise PencilError("explicit truncation needs a threshold N")
        if self.lattice is not None:
            lat = np.asarray(self.lattice, dtype=float)
            if lat.shape != (self.dim_v, self.dim_v):
                raise PencilError("lattice basis must be d x d")
        for rec in self.hamiltonian:
            if len(rec["m"]) != self.rank or len(rec["n"]) != self.dim_v:
                raise PencilError("Hamiltonian term modes must match (rank, dim_v)")
        if self.cutoff < 1:
            raise PencilError("working cutoff must be at least 1")

    # -- canonical JSON echo ---------------------------------------------------

    def to_json_dict(self) -> dict:
        doc = {
            "name": self.name,
            "check": self.check,
            "rank": self.rank,
            "dim_v": self.dim_v,
            "frame": [[float(v) for v in row] for row in np.atleast_2d(self.frame)],
            "lattice": None if self.lattice is None else
                [[float(v) for v in row] for row in self.lattice],
            "hamiltonian": [
                {"m": [int(c) for c in rec["m"]], "n": [int(c) for c in rec["n"]],
                 "cos": float(rec.get("cos", 0.0)), "sin": float(rec.get("sin", 0.0))}
                for rec in self.hamiltonian
            ],
            "truncation": {
                "policy": self.truncation_policy,
                "q_max": self.q_max,
                "N": self.truncation_N,
                "cutoff": self.cutoff,
            },
            "solver": {
                "fiber_tol": self.fiber_tol,
                "fiber_max_iter": self.fiber_max_iter,
                "refine_tol": self.refine_tol,
                "accept_tol": self.accept_tol,
                "newton_max_iter": self.newton_max_iter,
            },
            "search": {
                "starts": self.starts,
                "seed": self.seed,
                "fiber_radius": self.fiber_radius,
            },
        }
        if self.check == "su2-pointwise":
            doc["su2_weights"] = [float(w) for w in (self.su2_weights or [])]
        return doc


# ---------------------------------------------------------------------------
# TOML in / out
# ---------------------------------------------------------------------------

def config_from_toml(text: str) -> ExperimentConfig:
    doc = tomllib.loads(text)
    problem = doc.get("problem", {})
    trunc = doc.get("truncation", {})
    solver = doc.get("solver", {})
    search = doc.get("search", {})
    ham = doc.get("hamiltonian", {})
    terms = ham.get("terms", []) if isinstance(ham, dict) else []
    return ExperimentConfig(
        name=doc.get("name", "custom"),
        check=doc.get("check", "pipeline"),
        rank=int(problem.get("rank", 1)),
        dim_v=int(problem.get("dim_v", 2)),
        frame=problem.get("frame", [[1.0]]),
        lattice=problem.get("lattice"),
        su2_weights=problem.get("su2_weights"),
        hamiltonian=terms,
        truncation_policy=trunc.get("policy", "auto"),
        q_max=float(trunc.get("q_max", 0.25)),
        truncation_N=(None if trunc.get("N") is None else float(trunc["N"])),
        cutoff=int(trunc.get("cutoff", 8)),
        fiber_tol=float(solver.get("fiber_tol", 1e-12)),
        fiber_max_iter=int(solver.get("fiber_max_iter", 200)),
        refine_tol=float(solver.get("refine_tol", 1e-12)),
        accept_tol=float(solver.get("accept_tol", 1e-10)),
        newton_max_iter=int(solver.get("newton_max_iter", 80)),
        starts=int(search.get("starts", 64)),
        seed=int(search.get("seed", 2024)),
        fiber_radius=float(search.get("fiber_radius", 0.05)),
    )


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot emit {type(v)} to TOML")


def config_to_toml(cfg: ExperimentConfig) -> str:
    lines = [f"name = {_toml_value(cfg.name)}", f"check = {_toml_value(cfg.check)}", ""]
    lines.append("[problem]")
    lines.append(f"rank = {cfg.rank}")
    lines.append(f"dim_v = {cfg.dim_v}")
    lines.append(f"frame = {_toml_value([[float(v) for v in row] for row in np.atleast_2d(cfg.frame)])}")
    if cfg.lattice is not None:
        lines.append(f"lattice = {_toml_value([[float(v) for v in row] for row in cfg.lattice])}")
    if cfg.su2_weights is not None:
        lines.append(f"su2_weights = {_toml_value([float(w) for w in cfg.su2_weights])}")
    lines.append("")
    for rec in cfg.hamiltonian:
        lines.append("[[hamiltonian.terms]]")
        lines.append(f"m = {_toml_value([int(c) for c in rec['m']])}")
        lines.append(f"n = {_toml_value([int(c) for c in rec['n']])}")
        lines.append(f"cos = {_toml_value(float(rec.get('cos', 0.0)))}")
        lines.append(f"sin = {_toml_value(float(rec.get('sin', 0.0)))}")
        lines.append("")
    lines.append("[truncation]")
    lines.append(f"policy = {_toml_value(cfg.truncation_policy)}")
    lines.append(f"q_max = {_toml_value(cfg.q_max)}")
    if cfg.truncation_N is not None:
        lines.append(f"N = {_toml_value(cfg.truncation_N)}")
    lines.append(f"cutoff = {cfg.cutoff}")
    lines.append("")
    lines.append("[solver]")
    lines.append(f"fiber_tol = {_toml_value(cfg.fiber_tol)}")
    lines.append(f"fiber_max_iter = {cfg.fiber_max_iter}")
    lines.append(f"refine_tol = {_toml_value(cfg.refine_tol)}")
    lines.append(f"accept_tol = {_toml_value(cfg.accept_tol)}")
    lines.append(f"newton_max_iter = {cfg.newton_max_iter}")
    lines.append("")
    lines.append("[search]")
    lines.append(f"starts = {cfg.starts}")
    lines.append(f"seed = {cfg.seed}")
    lines.append(f"fiber_radius = {_toml_value(cfg.fiber_radius)}")
    lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def presets() -> dict:
    """The shipped experiment corpus."""
    out = {}
    out["classical-T2"] = ExperimentConfig(
        name="classical-T2", rank=1, dim_v=2, frame=[[1.0]],
        hamiltonian=[
            {"m": [0], "n": [1, 0], "cos": 0.1, "sin": 0.0},
            {"m": [0], "n": [0, 1], "cos": 0.1, "sin": 0.0},
        ],
        truncation_policy="auto", q_max=0.25, cutoff=24,
        starts=64, seed=2024,
    )
    out["hyperkahler-T4"] = ExperimentConfig(
        name="hyperkahler-T4", rank=3, dim_v=4,
        frame=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        hamiltonian=[
            {"m": [0, 0, 0], "n": [1, 0, 0, 0], "cos": 0.05, "sin": 0.0},
            {"m": [0, 0, 0], "n": [0, 1, 0, 0], "cos": 0.05, "sin": 0.0},
            {"m": [0, 0, 0], "n": [0, 0, 1, 0], "cos": 0.05, "sin": 0.0},
            {"m": [0, 0, 0], "n": [0, 0, 0, 1], "cos": 0.05, "sin": 0.0},
        ],
        # explicit threshold keeps the reduced space small; the contraction
        # bound is then q ~ 0.56 < 1 (measured rate ~ 0.14)
        truncation_policy="explicit", truncation_N=13.0, cutoff=6,
        starts=144, seed=2024, fiber_radius=0.02,
    )
    out["degenerate-T1"] = ExperimentConfig(
        name="degenerate-T1", rank=1, dim_v=1, frame=[[1.0]],
        hamiltonian=[
            {"m": [0], "n": [1], "cos": 0.0, "sin": 0.1},
            {"m": [0], "n": [2], "cos": 0.0, "sin": -0.05},
        ],
        truncation_policy="auto", q_max=0.25, cutoff=32,
        starts=48, seed=2024,
    )
    out["timedep-T2"] = ExperimentConfig(
        name="timedep-T2", rank=1, dim_v=2, frame=[[1.0]],
        hamiltonian=[
            {"m": [1], "n": [1, 0], "cos": 0.025, "sin": 0.0},
            {"m": [1], "n": [-1, 0], "cos": 0.025, "sin": 0.0},
        ],
        truncation_policy="auto", q_max=0.25, cutoff=12,
        starts=200, seed=2024,
    )
    out["su2-counterexample"] = ExperimentConfig(
        name="su2-counterexample", rank=3, dim_v=4,
        frame=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        check="su2-pointwise", su2_weights=[2.0, -1.0, -1.0],
    )
    return out


def preset_names() -> list:
    return sorted(presets().keys())
