"""Central numerical tolerances.

Every solver reads its thresholds from a :class:`Tolerances` record so a
whole run can be tightened or loosened in one place (``--tol-profile``).
"""
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    singular: float = 1e-9          # collar around the two droplet singular points
    boundary: float = 1e-12         # "on the curve" test for cardioid / circle
    slit_value: float = 1e-9        # two circumcircle maxima count as tied
    slit_angle: float = 1e-6        # ... when this far apart in angle
    newton_theta: float = 1e-14
    newton_steps: int = 30
    grid_samples: int = 512
    cycle: float = 1e-9             # periodic-point residual
    neutral_band: float = 1e-8      # |lambda| within this of 1 counts as neutral
    center_residual: float = 1e-10
    parabolic: float = 1e-8         # |lambda - 1| target for parabolic solvers
    contour_radius: float = 1e-3
    contour_agree: float = 1e-7
    contour_nodes: int = 2048
    koenigs_rel: float = 1e-10
    landing_cluster: float = 1e-4
    ray_gap: float = 1e-7           # target Cauchy gap for ray tracing
    side: float = 1e-12             # triangle side membership
    vertex: float = 1e-12


PROFILES = {
    "default": Tolerances(),
    "fast": Tolerances(grid_samples=512, contour_nodes=2048, ray_gap=1e-6),
    "strict": Tolerances(ray_gap=1e-9, koenigs_rel=1e-12, center_residual=1e-12),
}

DEFAULT = PROFILES["default"]


def profile(name: str) -> Tolerances:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown tolerance profile {name!r}; choose from {sorted(PROFILES)}") from None


def with_overrides(tol: Tolerances, **kw) -> Tolerances:
    return replace(tol, **kw)
