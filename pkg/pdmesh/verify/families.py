"""Seeded mesh families used by the sweeps and convergence studies."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from itertools import product
from typing import Any, Callable, Dict, List

import numpy as np
from scipy.stats import special_ortho_group

from pdmesh.core.coxeter import CoxeterSpec, generate_coxeter, kuhn_offsets
from pdmesh.core.delaunay import delaunay_triangulate
from pdmesh.core.mesh import PointSet, SimplicialMesh
from pdmesh.errors import ExperimentError
from pdmesh.utils.logging_utils import get_logger

__all__ = [
    "MeshFamily",
    "RandomDelaunayFamily",
    "StructuredGridFamily",
    "CoxeterFamily",
    "SliverFamily",
    "register_family",
    "make_family",
    "list_families",
    "structured_grid",
    "sliver_gadget",
]

_LOGGER = get_logger("Families")


class MeshFamily(ABC):
    """A family of meshes indexed by a refinement level and a seed."""

    name: str = ""

    @abstractmethod
    def build(self, dim: int, level: int, seed: int) -> SimplicialMesh:
        """Return the member of the family for (*dim*, *level*, *seed*)."""

    def describe(self) -> Dict[str, Any]:
        return {"family": self.name}


def structured_grid(dim: int, n: int) -> SimplicialMesh:
    """Kuhn subdivision of [0, 1]^d with *n* cubes per axis (d! simplices per cube)."""

    if n < 1:
        raise ExperimentError(f"grid resolution must be positive, got {n}")
    shape = (n + 1,) * dim
    coords = np.indices(shape).reshape(dim, -1).T / float(n)
    bases = np.indices((n,) * dim).reshape(dim, -1).T
    offsets = kuhn_offsets(dim)
    verts = bases[:, None, None, :] + offsets[None, :, :, :]
    flat = verts.reshape(-1, dim)
    cells = np.ravel_multi_index(tuple(flat.T), shape).reshape(-1, dim + 1)
    return SimplicialMesh(coords, cells)


def sliver_gadget(dim: int, thickness: float) -> SimplicialMesh:
    """Near-co-spherical gadget whose worst cell has thickness close to *thickness*.

    d = 2: four points on the unit circle, one flat triangle.
    d = 3: the classical four-point sliver on a great circle plus a cap vertex.
    """

    if not 0.0 < thickness < 0.1:
        raise ExperimentError(f"sliver thickness must lie in (0, 0.1), got {thickness}")
    if dim == 2:
        phi = math.asin(4.0 * thickness)
        coords = [[-1.0, 0.0], [1.0, 0.0], [-math.cos(phi), math.sin(phi)], [0.0, -1.0]]
        return SimplicialMesh(coords, [[0, 1, 2], [0, 1, 3]])
    if dim == 3:
        t = 1.5 * thickness
        coords = [[1.0, 0.0, t], [-1.0, 0.0, t], [0.0, 1.0, -t], [0.0, -1.0, -t], [0.0, 0.5, 2.0]]
        return SimplicialMesh(coords, [[0, 1, 2, 3], [0, 1, 2, 4]])
    raise ExperimentError(f"sliver gadgets exist for d = 2 and d = 3, got d = {dim}")


class RandomDelaunayFamily(MeshFamily):
    """Box corners plus *level* uniform points in [0, 1]^d, Delaunay triangulated."""

    name = "random-delaunay"

    def build(self, dim: int, level: int, seed: int) -> SimplicialMesh:
        rng = np.random.default_rng(seed)
        corners = np.array(list(product((0.0, 1.0), repeat=dim)))
        points = np.vstack([corners, rng.random((int(level), dim))])
        return delaunay_triangulate(PointSet(points))


class StructuredGridFamily(MeshFamily):
    name = "structured-grid"

    def build(self, dim: int, level: int, seed: int) -> SimplicialMesh:
        return structured_grid(dim, int(level))


class CoxeterFamily(MeshFamily):
    """Ã_d cells inside a seeded shift of [0, 1]^d at lattice scale 1/level."""

    name = "coxeter"

    def build(self, dim: int, level: int, seed: int) -> SimplicialMesh:
        scale = 1.0 / float(level)
        shift = np.random.default_rng(seed).random(dim) * scale
        box = tuple((float(s), float(s) + 1.0) for s in shift)
        return generate_coxeter(CoxeterSpec(dim=dim, scale=scale, box=box))


class SliverFamily(MeshFamily):
    """Sliver gadgets under a seeded rotation; *level* is ignored."""

    name = "sliver"

    def __init__(self, thickness: float = 1e-3) -> None:
        self.thickness = float(thickness)

    def build(self, dim: int, level: int, seed: int) -> SimplicialMesh:
        gadget = sliver_gadget(dim, self.thickness)
        rotation = special_ortho_group.rvs(dim, random_state=seed)
        return gadget.transformed(rotation)

    def describe(self) -> Dict[str, Any]:
        return {"family": self.name, "thickness": self.thickness}


_FAMILIES: Dict[str, Callable[..., MeshFamily]] = {}


def register_family(name: str, factory: Callable[..., MeshFamily]) -> None:
    if name in _FAMILIES:
        raise ExperimentError(f"mesh family '{name}' is already registered")
    _FAMILIES[name] = factory


def list_families() -> List[str]:
    return sorted(_FAMILIES)


def make_family(name: str, **params: Any) -> MeshFamily:
    try:
        factory = _FAMILIES[name]
    except KeyError as exc:
        raise ExperimentError(f"unknown mesh family '{name}' (known: {', '.join(list_families())})") from exc
    return factory(**params)


for _family in (RandomDelaunayFamily, StructuredGridFamily, CoxeterFamily, SliverFamily):
    register_family(_family.name, _family)
