"""pdmesh: quality, protection and a-priori error bounds on simplicial meshes."""

from .errors import PdmeshError

__version__ = "0.1.0"

__all__ = ["PdmeshError", "__version__"]
