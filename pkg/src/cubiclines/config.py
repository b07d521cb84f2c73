"""Shared tolerance and iteration settings for the numeric layer.

Everything numeric in the package reads its knobs from one
ExperimentConfig value so that reports can embed the exact settings a
run used and tests can tighten or relax them in one place.
"""

from dataclasses import dataclass, asdict, replace


@dataclass(frozen=True)
class ExperimentConfig:
    # Newton refinement
    tol_newton: float = 1e-12
    max_newton_iters: int = 50

    # acceptance thresholds for verified output
    tol_residual: float = 1e-10
    tol_containment: float = 1e-8

    # solution bookkeeping
    tol_dedup: float = 1e-6
    tol_cluster: float = 1e-6

    # path tracking
    min_step: float = 1e-8
    tol_collision: float = 1e-8
    cap_loops: int = 200
    stable_window: int = 25

    # numeric rank / type classification
    tol_type_second: float = 1e-6
    tol_type_first: float = 1e-3

    # numeric tangency of planes along a line
    tol_tangent: float = 1e-6

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **kwargs)

    def to_json(self) -> dict:
        return asdict(self)


DEFAULT_CONFIG = ExperimentConfig()
