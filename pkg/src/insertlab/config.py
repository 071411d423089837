"""Global configuration: workspace, cameras, noise, tolerances, training knobs.

A single JSON file can override any field (nested via dotted or nested dicts);
everything downstream takes a Config rather than reading globals.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field


@dataclass
class SacConfig:
    learning_rate: float = 1e-3
    discount: float = 0.99
    replay_capacity: int = 10_000
    latent_dim: int = 50
    conv_filters: tuple = (8, 16, 32, 64)
    conv_strides: tuple = (2, 2, 2, 2)
    conv_kernel: int = 3
    hidden_units: tuple = (128,)
    target_tau: float = 0.005
    target_interval: int = 2
    actor_interval: int = 2
    updates_per_step: int = 10
    batch_size: int = 128
    init_updates: int = 1000
    log_std_bounds: tuple = (-5.0, 2.0)
    # target entropy = -action_dim (standard heuristic)
    target_entropy: float = -2.0
    init_alpha: float = 0.1


@dataclass
class Config:
    # workspace & kinematics
    workspace: float = 1.0
    dt: float = 0.1
    v_max: float = 0.05
    ee_radius: float = 0.01
    contact_stiffness: float = 50.0
    wrench_scale: float = 0.25

    # socket geometry
    hole_depth: float = 0.02
    required_depth_frac: float = 0.75

    # cameras
    external_size: int = 128
    wrist_size: int = 64
    wrist_fov: float = 0.10
    camera_jitter: float = 0.01
    calibration_noise: float = 0.01

    # scene discovery / encoder
    bg_threshold: float = 0.10
    bg_shift_tolerance_px: int = 2
    min_component_area: int = 12
    presence_area_scale: float = 8.0
    embed_dim: int = 32
    patch_size: int = 16

    # planning
    grid_resolution: float = 0.01
    safety_margin: float = 0.01
    rrt_step: float = 0.02
    rrt_max_iterations: int = 20_000
    rrt_goal_tolerance: float = 0.01
    shortcut_attempts: int = 200
    standoff: float = 0.06

    # skill / episodes
    rl_start_height: float = 0.0375
    limited_lateral: float = 0.005
    limited_height: tuple = (0.03, 0.045)
    horizon: int = 100
    obstacle_sense_noise: float = 0.002

    # transition network data collection
    transition_trajectories: int = 100
    transition_steps: int = 15
    transition_offset_bound: float = 0.05

    sac: SacConfig = field(default_factory=SacConfig)

    @property
    def inflation(self) -> float:
        return self.ee_radius + self.safety_margin

    @property
    def wrist_scale(self) -> float:
        """Pixels per meter in the wrist camera."""
        return self.wrist_size / self.wrist_fov

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2)

    @classmethod
    def from_json(cls, path) -> "Config":
        with open(path) as fh:
            raw = json.load(fh)
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "Config":
        kwargs = dict(raw)
        sac_raw = kwargs.pop("sac", None)
        cfg = cls(**{k: _tupled(v) for k, v in kwargs.items()})
        if sac_raw:
            cfg.sac = SacConfig(**{k: _tupled(v) for k, v in sac_raw.items()})
        return cfg


def _tupled(v):
    return tuple(v) if isinstance(v, list) else v
