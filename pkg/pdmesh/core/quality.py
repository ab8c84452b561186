"""Per-element and mesh-wide quality quantities.

Element quantities: diameter Δ(K), insphere diameter ρ(K), thickness Ξ(K),
regularity σ(K) = Δ/ρ, min-containment radius R_min, Θ(K) (volume-weighted sum of
squared edge lengths) and Υ(K) (RMS edge sum over Δ). Mesh aggregates follow the
usual min/max/sum reductions, with ties in argmin/argmax resolved by the lowest
cell index.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from pdmesh.errors import DegenerateSimplexError, QualityError
from pdmesh.utils.logging_utils import get_logger
from pdmesh.utils.parallel import parallel_map

from .geometry import (
    Simplex,
    altitudes,
    diameter,
    edge_vectors,
    insphere_diameter,
    is_degenerate,
    min_containment_ball,
    simplex_volume,
)
from .mesh import SimplicialMesh

__all__ = [
    "ElementMetrics",
    "QualityReport",
    "element_metrics",
    "quality_report",
    "theta_upper_bound",
    "ELEMENT_FIELDS",
]

_LOGGER = get_logger("Quality")

ELEMENT_FIELDS = ("delta", "rho", "xi", "sigma", "r_min", "theta_local", "upsilon", "volume")


@dataclass(frozen=True)
class ElementMetrics:
    delta: float
    rho: float
    xi: float
    sigma: float
    r_min: float
    theta_local: float
    upsilon: float
    volume: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def element_metrics(s: Simplex) -> ElementMetrics:
    """Quality quantities of one non-degenerate simplex."""

    if is_degenerate(s):
        raise DegenerateSimplexError("quality metrics are undefined on a degenerate simplex")
    dim = s.dim
    delta = diameter(s)
    volume = simplex_volume(s)
    rho = insphere_diameter(s)
    squared = float(np.sum(edge_vectors(s) ** 2))
    return ElementMetrics(
        delta=delta,
        rho=rho,
        xi=float(altitudes(s).min()) / (dim * delta),
        sigma=delta / rho,
        r_min=min_containment_ball(s).radius,
        theta_local=squared * volume,
        upsilon=math.sqrt(squared) / delta,
        volume=volume,
    )


@dataclass(frozen=True)
class QualityReport:
    """Mesh-wide aggregates; Θ is the unscaled volume-weighted edge sum."""

    dim: int
    card: int
    h: float
    min_delta: float
    c_delta: float
    c_xi: float
    c_sigma: float
    c_upsilon: float
    theta: float
    theta_rescaled: float
    r_max: float
    worst_xi_cell: int
    worst_sigma_cell: int
    per_element: Tuple[ElementMetrics, ...]
    length_scale: str = "delta"

    def summary(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "card": self.card,
            "h": self.h,
            "min_delta": self.min_delta,
            "C_Delta": self.c_delta,
            "C_Xi": self.c_xi,
            "C_sigma": self.c_sigma,
            "C_Upsilon": self.c_upsilon,
            "Theta": self.theta,
            "Theta_rescaled": self.theta_rescaled,
            "R_max": self.r_max,
            "worst_xi_cell": self.worst_xi_cell,
            "worst_sigma_cell": self.worst_sigma_cell,
            "length_scale": self.length_scale,
            "note": "Theta is unscaled; Theta_rescaled = Theta / ((d+1)(d+2))",
        }

    def to_dict(self, *, include_elements: bool = True) -> Dict[str, Any]:
        payload = self.summary()
        if include_elements:
            payload["elements"] = [dict(cell=index, **metrics.to_dict()) for index, metrics in enumerate(self.per_element)]
        return payload

    def csv_rows(self) -> List[Dict[str, Any]]:
        """One row per element (cell order) followed by a summary row."""

        rows: List[Dict[str, Any]] = []
        for index, metrics in enumerate(self.per_element):
            rows.append({"row": "element", "cell": index, **metrics.to_dict()})
        rows.append(
            {
                "row": "summary",
                "cell": self.card,
                "delta": self.h,
                "rho": None,
                "xi": self.c_xi,
                "sigma": self.c_sigma,
                "r_min": self.r_max,
                "theta_local": self.theta,
                "upsilon": self.c_upsilon,
                "volume": float(sum(m.volume for m in self.per_element)),
            }
        )
        return rows


def quality_report(m: SimplicialMesh, *, workers: Optional[int] = None) -> QualityReport:
    """Aggregate element metrics over every cell of *m*."""

    if m.n_cells == 0:
        raise QualityError("quality report of an empty mesh")
    metrics = tuple(parallel_map(lambda index: element_metrics(m.simplex(index)), range(m.n_cells), workers=workers))

    deltas = np.array([e.delta for e in metrics])
    xis = np.array([e.xi for e in metrics])
    sigmas = np.array([e.sigma for e in metrics])
    thetas = np.array([e.theta_local for e in metrics])
    dim = m.dim
    theta = float(np.sum(thetas))
    report = QualityReport(
        dim=dim,
        card=m.n_cells,
        h=float(deltas.max()),
        min_delta=float(deltas.min()),
        c_delta=float(deltas.max() / deltas.min()),
        c_xi=float(xis.min()),
        c_sigma=float(sigmas.max()),
        c_upsilon=float(max(e.upsilon for e in metrics)),
        theta=theta,
        theta_rescaled=theta / ((dim + 1) * (dim + 2)),
        r_max=float(max(e.r_min for e in metrics)),
        worst_xi_cell=int(np.argmin(xis)),
        worst_sigma_cell=int(np.argmax(sigmas)),
        per_element=metrics,
    )
    _LOGGER.debug("Quality report: h=%.6g C_Xi=%.6g C_sigma=%.6g Theta=%.6g", report.h, report.c_xi, report.c_sigma, theta)
    return report


def theta_upper_bound(report: QualityReport, d: Optional[int] = None) -> float:
    """Θ <= 2^{d+1} (d+1) / (d-1)! * R_max^{d+2} * card."""

    dim = report.dim if d is None else int(d)
    if dim < 2:
        raise QualityError("the Theta upper bound needs d >= 2")
    return 2.0 ** (dim + 1) * (dim + 1) / math.factorial(dim - 1) * report.r_max ** (dim + 2) * report.card
