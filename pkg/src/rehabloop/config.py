"""Application configuration: one JSON document covering the session plan,
controller, scoring, affect thresholds, patient profile, and network ports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .affect import AffectThresholds
from .assist import AssistConfig, AssistLevel, HandleDynamicsConfig
from .coach import SessionPlan
from .errors import InputError, SpecificationError
from .patient import PatientProfile
from .scoring import ScoringConfig
from .trajectory import PathKind, TrajectorySpec

DEFAULT_UDP_PORT = 47810
DEFAULT_TCP_PORT = 47811


@dataclass(frozen=True)
class AppConfig:
    plan: SessionPlan
    scoring: ScoringConfig = field(default_factory=ScoringConfig)
    thresholds: AffectThresholds = field(default_factory=AffectThresholds)
    profile: PatientProfile = field(default_factory=PatientProfile)
    dynamics: HandleDynamicsConfig = field(default_factory=HandleDynamicsConfig)
    model_path: str | None = None
    udp_port: int = DEFAULT_UDP_PORT
    tcp_port: int = DEFAULT_TCP_PORT
    seed: int = 0

    def __post_init__(self) -> None:
        if self.udp_port == self.tcp_port:
            raise SpecificationError("udp_port and tcp_port must be distinct")

    def to_dict(self) -> dict:
        d = {
            "exercise": self.plan.exercise.to_dict(),
            "assist": _assist_to_dict(self.plan.assist),
            "sessions": self.plan.sessions,
            "per_session_duration_s": self.plan.per_session_duration_s,
            "baseline_duration_s": self.plan.baseline_duration_s,
            "scoring": {
                "w_err": self.scoring.w_err,
                "w_dist": self.scoring.w_dist,
                "w_time": self.scoring.w_time,
            },
            "thresholds": self.thresholds.to_dict(),
            "profile": self.profile.to_dict(),
            "dynamics": {
                "mass": self.dynamics.mass,
                "damping": self.dynamics.damping,
                "dt": self.dynamics.dt,
            },
            "udp_port": self.udp_port,
            "tcp_port": self.tcp_port,
            "seed": self.seed,
        }
        if self.model_path is not None:
            d["model_path"] = self.model_path
        return d

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path | None = None) -> "AppConfig":
        exercise = TrajectorySpec.from_dict(d.get("exercise", {"kind": "circle"}))
        assist = _assist_from_dict(d.get("assist", {"level": "medium"}))
        plan = SessionPlan(
            exercise=exercise,
            assist=assist,
            sessions=int(d.get("sessions", 3)),
            per_session_duration_s=float(d.get("per_session_duration_s", 240.0)),
            baseline_duration_s=float(d.get("baseline_duration_s", 300.0)),
        )
        sc = d.get("scoring", {})
        dyn = d.get("dynamics", {})
        model_path = d.get("model_path")
        if model_path is not None:
            resolved = Path(model_path)
            if base_dir is not None and not resolved.is_absolute():
                resolved = base_dir / resolved
            if not resolved.exists():
                raise InputError(f"model file not found: {resolved}")
            model_path = str(resolved)
        return cls(
            plan=plan,
            scoring=ScoringConfig(**sc) if sc else ScoringConfig(),
            thresholds=AffectThresholds.from_dict(d.get("thresholds", {})),
            profile=PatientProfile.from_dict(d.get("profile", {})),
            dynamics=HandleDynamicsConfig(
                mass=float(dyn.get("mass", 1.0)),
                damping=float(dyn.get("damping", 5.0)),
                dt=float(dyn.get("dt", 0.01)),
            ),
            model_path=model_path,
            udp_port=int(d.get("udp_port", DEFAULT_UDP_PORT)),
            tcp_port=int(d.get("tcp_port", DEFAULT_TCP_PORT)),
            seed=int(d.get("seed", 0)),
        )


def _assist_to_dict(a: AssistConfig) -> dict:
    level = a.level
    if level is not None:
        return {"level": level.value}
    return {"stiffness": a.stiffness, "deadband": a.deadband, "force_cap": a.force_cap}


def _assist_from_dict(d: dict) -> AssistConfig:
    if "level" in d:
        return AssistConfig.from_level(AssistLevel(d["level"]))
    return AssistConfig(
        stiffness=float(d["stiffness"]),
        deadband=float(d["deadband"]),
        force_cap=float(d.get("force_cap", 20.0)),
    )


def default_config() -> AppConfig:
    return AppConfig(
        plan=SessionPlan(
            exercise=TrajectorySpec(kind=PathKind.CIRCLE),
            assist=AssistConfig.from_level(AssistLevel.MEDIUM),
        )
    )


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise InputError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"bad config file {path}: {exc}") from exc
    return AppConfig.from_dict(doc, base_dir=path.parent)


def save_config(cfg: AppConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
