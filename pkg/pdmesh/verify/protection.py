"""Protection versus thickness and regularity on protected meshes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pdmesh.analysis.functionals import BoundCheckResult, regularity_bound_check, thickness_bound_check
from pdmesh.core.coxeter import CoxeterSpec, coxeter_protection_trend, generate_coxeter
from pdmesh.core.delaunay import protection_report
from pdmesh.core.mesh import SimplicialMesh, net_parameters
from pdmesh.core.quality import QualityReport, quality_report
from pdmesh.utils.logging_utils import get_logger
from pdmesh.utils.parallel import parallel_map

__all__ = [
    "PROTECTION_FLOOR",
    "ProtectionRecord",
    "protection_thickness_check",
    "protection_sweep",
    "protection_trend",
]

_LOGGER = get_logger("Protection")

# relative to the longest edge
PROTECTION_FLOOR = 1e-12


@dataclass(frozen=True)
class ProtectionRecord:
    dim: int
    delta: float
    h: float
    epsilon: float
    checks: Tuple[BoundCheckResult, BoundCheckResult]

    @property
    def delta_over_h(self) -> float:
        return self.delta / self.h

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "delta": self.delta,
            "h": self.h,
            "epsilon": self.epsilon,
            "delta_over_h": self.delta_over_h,
            "checks": [check.to_dict() for check in self.checks],
        }


def _measure(m: SimplicialMesh, report: Optional[QualityReport]) -> Tuple[QualityReport, float, float]:
    quality = report if report is not None else quality_report(m)
    delta = protection_report(m).delta
    if delta <= PROTECTION_FLOOR * quality.h:
        delta = 0.0
    epsilon = net_parameters(m.points, m).epsilon
    return quality, delta, epsilon


def protection_thickness_check(
    m: SimplicialMesh,
    *,
    report: Optional[QualityReport] = None,
) -> Tuple[BoundCheckResult, BoundCheckResult]:
    """Lower thickness bound and upper regularity bound from the measured δ and ε."""

    quality, delta, epsilon = _measure(m, report)
    return thickness_bound_check(quality, delta, epsilon), regularity_bound_check(quality, delta, epsilon)


def _record(dim: int, side: float, scale: float) -> ProtectionRecord:
    mesh = generate_coxeter(CoxeterSpec.cube(dim, side, scale=scale))
    quality, delta, epsilon = _measure(mesh, None)
    checks = (thickness_bound_check(quality, delta, epsilon), regularity_bound_check(quality, delta, epsilon))
    _LOGGER.info("Coxeter d=%d: %d cells, delta=%.6g, epsilon=%.6g", dim, mesh.n_cells, delta, epsilon)
    return ProtectionRecord(dim=dim, delta=delta, h=quality.h, epsilon=epsilon, checks=checks)


def protection_sweep(dims: Sequence[int], *, side: float = 3.0, scale: float = 1.0) -> List[ProtectionRecord]:
    """Both remarks on a Coxeter patch filling the cube [0, side]^d, one record per dimension."""

    return parallel_map(lambda dim: _record(int(dim), side, scale), list(dims))


def protection_trend(dims: Sequence[int], *, scale: float = 1.0) -> Tuple[List[Dict[str, float]], bool]:
    """Interior Ã_d protection per dimension and whether δ/h is non-increasing in d."""

    rows = coxeter_protection_trend(sorted(int(d) for d in dims), scale=scale)
    ratios = [row["delta_over_h"] for row in rows]
    monotone = all(later <= earlier * (1.0 + 1e-12) for earlier, later in zip(ratios, ratios[1:]))
    return rows, monotone
