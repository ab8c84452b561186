"""Analytic scalar and vector fields addressed by registry name.

Scalar fields evaluate value (n,), gradient (n, d) and Hessian (n, d, d).
Vector fields evaluate value (n, m) and Jacobian (n, m, d) through
``gradient``; their ``hessian`` is unavailable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from pdmesh.errors import DimensionMismatchError, FieldError
from pdmesh.utils.logging_utils import get_logger

from .reference import lattice_indices

__all__ = [
    "AnalyticField",
    "FieldFactory",
    "make_field",
    "register_field",
    "list_fields",
    "random_polynomial",
    "polynomial_field",
    "gradient_field",
    "fields_from_specs",
]

_LOGGER = get_logger("Fields")

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class AnalyticField:
    name: str
    dim: int
    value_fn: Evaluator
    gradient_fn: Evaluator
    hessian_fn: Optional[Evaluator] = None
    components: int = 0
    params: Mapping[str, Any] = field(default_factory=dict)
    polynomial_degree: Optional[int] = None

    @property
    def is_vector(self) -> bool:
        return self.components > 0

    def _points(self, x: np.ndarray) -> np.ndarray:
        arr = np.atleast_2d(np.asarray(x, dtype=float))
        if arr.shape[-1] != self.dim:
            raise DimensionMismatchError(f"field '{self.name}' lives in R^{self.dim}, got points in R^{arr.shape[-1]}")
        return arr

    def value(self, x: np.ndarray) -> np.ndarray:
        return self.value_fn(self._points(x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.gradient_fn(self._points(x))

    def hessian(self, x: np.ndarray) -> np.ndarray:
        if self.hessian_fn is None:
            raise FieldError(f"field '{self.name}' has no second derivative")
        return self.hessian_fn(self._points(x))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.value(x)

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name, "dim": self.dim, "params": dict(self.params), "vector": self.is_vector}


FieldFactory = Callable[..., AnalyticField]

_REGISTRY: Dict[str, FieldFactory] = {}


def register_field(name: str, factory: FieldFactory) -> None:
    if name in _REGISTRY:
        raise FieldError(f"field '{name}' is already registered")
    _REGISTRY[name] = factory


def list_fields() -> List[str]:
    return sorted(_REGISTRY)


def make_field(name: str, dim: int, **params: Any) -> AnalyticField:
    """Instantiate registered field *name* in R^dim."""

    try:
        factory = _REGISTRY[name]
    except KeyError as exc:
        raise FieldError(f"unknown field '{name}' (known: {', '.join(list_fields())})") from exc
    if dim < 1:
        raise FieldError(f"field dimension must be >= 1, got {dim}")
    try:
        return factory(dim, **params)
    except TypeError as exc:
        raise FieldError(f"bad parameters for field '{name}': {exc}") from exc


# ---------------------------------------------------------------------------
# polynomials


def _power(x: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    return np.prod(x ** np.maximum(exponent, 0)[None, :], axis=1)


def polynomial_field(dim: int, terms: Sequence[Tuple[float, Sequence[int]]], *, name: str = "polynomial") -> AnalyticField:
    """Σ c x^α from ``(c, α)`` pairs."""

    parsed: List[Tuple[float, np.ndarray]] = []
    for coefficient, exponent in terms:
        alpha = np.asarray(exponent, dtype=np.int64)
        if alpha.shape != (dim,) or np.any(alpha < 0):
            raise FieldError(f"polynomial exponent {list(exponent)} does not fit R^{dim}")
        parsed.append((float(coefficient), alpha))

    def value(x: np.ndarray) -> np.ndarray:
        out = np.zeros(len(x))
        for c, alpha in parsed:
            out += c * _power(x, alpha)
        return out

    def gradient(x: np.ndarray) -> np.ndarray:
        out = np.zeros((len(x), dim))
        for c, alpha in parsed:
            for i in range(dim):
                if alpha[i]:
                    lowered = alpha.copy()
                    lowered[i] -= 1
                    out[:, i] += c * alpha[i] * _power(x, lowered)
        return out

    def hessian(x: np.ndarray) -> np.ndarray:
        out = np.zeros((len(x), dim, dim))
        for c, alpha in parsed:
            for i in range(dim):
                for j in range(dim):
                    lowered = alpha.copy()
                    factor = lowered[i]
                    lowered[i] -= 1
                    factor *= lowered[j]
                    lowered[j] -= 1
                    if factor > 0:
                        out[:, i, j] += c * factor * _power(x, lowered)
        return out

    degree = max((int(alpha.sum()) for c, alpha in parsed if c != 0.0), default=0)
    params = {"terms": [[c, alpha.tolist()] for c, alpha in parsed]}
    return AnalyticField(name, dim, value, gradient, hessian, params=params, polynomial_degree=degree)


def _polynomial(dim: int, terms: Sequence[Sequence[Any]] = ()) -> AnalyticField:
    if not terms:
        raise FieldError("polynomial needs at least one [coefficient, exponents] term")
    return polynomial_field(dim, [(term[0], term[1]) for term in terms])


def random_polynomial(dim: int, degree: int, *, seed: int = 0, scale: float = 1.0) -> AnalyticField:
    """Polynomial with every monomial of degree <= *degree* and seeded N(0, scale²) coefficients."""

    rng = np.random.default_rng(seed)
    monomials = lattice_indices(dim, degree)
    coefficients = rng.normal(0.0, scale, size=len(monomials))
    field_ = polynomial_field(dim, list(zip(coefficients, monomials)), name="random-polynomial")
    return AnalyticField(
        field_.name,
        dim,
        field_.value_fn,
        field_.gradient_fn,
        field_.hessian_fn,
        params={"degree": degree, "seed": seed, "scale": scale},
        polynomial_degree=degree,
    )


def _quadratic(dim: int, a: Optional[Sequence[float]] = None, b: float = 0.0) -> AnalyticField:
    """|x|² + a·x + b."""

    shift = np.zeros(dim) if a is None else np.asarray(a, dtype=float)
    if shift.shape != (dim,):
        raise FieldError(f"quadratic: 'a' needs {dim} entries")

    def value(x: np.ndarray) -> np.ndarray:
        return np.einsum("nd,nd->n", x, x) + x @ shift + b

    def gradient(x: np.ndarray) -> np.ndarray:
        return 2.0 * x + shift

    def hessian(x: np.ndarray) -> np.ndarray:
        return np.broadcast_to(2.0 * np.eye(dim), (len(x), dim, dim)).copy()

    return AnalyticField("quadratic", dim, value, gradient, hessian, params={"a": shift.tolist(), "b": b}, polynomial_degree=2)


def _affine(dim: int, a: Optional[Sequence[float]] = None, b: float = 0.0) -> AnalyticField:
    """a·x + b (a defaults to the all-ones vector)."""

    slope = np.ones(dim) if a is None else np.asarray(a, dtype=float)
    if slope.shape != (dim,):
        raise FieldError(f"affine: 'a' needs {dim} entries")
    return AnalyticField(
        "affine",
        dim,
        lambda x: x @ slope + b,
        lambda x: np.broadcast_to(slope, (len(x), dim)).copy(),
        lambda x: np.zeros((len(x), dim, dim)),
        params={"a": slope.tolist(), "b": b},
        polynomial_degree=1,
    )


def _constant(dim: int, value: Any = 1.0) -> AnalyticField:
    """Constant scalar, or constant vector when *value* is a list."""

    if isinstance(value, (list, tuple)):
        vec = np.asarray(value, dtype=float)
        m = len(vec)
        return AnalyticField(
            "constant",
            dim,
            lambda x: np.broadcast_to(vec, (len(x), m)).copy(),
            lambda x: np.zeros((len(x), m, dim)),
            components=m,
            params={"value": vec.tolist()},
            polynomial_degree=0,
        )
    c = float(value)
    return AnalyticField(
        "constant",
        dim,
        lambda x: np.full(len(x), c),
        lambda x: np.zeros((len(x), dim)),
        lambda x: np.zeros((len(x), dim, dim)),
        params={"value": c},
        polynomial_degree=0,
    )


def _trig_product(dim: int, frequency: float = 1.0) -> AnalyticField:
    """Π_i sin(k π x_i)."""

    k = float(frequency) * math.pi

    def value(x: np.ndarray) -> np.ndarray:
        return np.prod(np.sin(k * x), axis=1)

    def gradient(x: np.ndarray) -> np.ndarray:
        s, c = np.sin(k * x), np.cos(k * x)
        out = np.empty_like(x)
        for i in range(dim):
            others = np.prod(np.delete(s, i, axis=1), axis=1) if dim > 1 else 1.0
            out[:, i] = k * c[:, i] * others
        return out

    def hessian(x: np.ndarray) -> np.ndarray:
        s, c = np.sin(k * x), np.cos(k * x)
        out = np.empty((len(x), dim, dim))
        for i in range(dim):
            for j in range(dim):
                factors = np.where(np.isin(np.arange(dim), [i, j]), 1.0, s)
                rest = np.prod(factors, axis=1)
                if i == j:
                    out[:, i, i] = -k * k * s[:, i] * rest
                else:
                    out[:, i, j] = k * k * c[:, i] * c[:, j] * rest
        return out

    return AnalyticField("trig-product", dim, value, gradient, hessian, params={"frequency": frequency})


def _gaussian_bump(dim: int, center: Optional[Sequence[float]] = None, width: float = 0.25) -> AnalyticField:
    """exp(-|x - c|² / (2 w²))."""

    c = np.full(dim, 0.5) if center is None else np.asarray(center, dtype=float)
    if c.shape != (dim,) or not width > 0.0:
        raise FieldError("gaussian-bump needs a centre in R^d and a positive width")
    inv = 1.0 / (width * width)

    def value(x: np.ndarray) -> np.ndarray:
        r = x - c
        return np.exp(-0.5 * inv * np.einsum("nd,nd->n", r, r))

    def gradient(x: np.ndarray) -> np.ndarray:
        return -inv * (x - c) * value(x)[:, None]

    def hessian(x: np.ndarray) -> np.ndarray:
        r = x - c
        g = value(x)[:, None, None]
        return g * (inv * inv * np.einsum("ni,nj->nij", r, r) - inv * np.eye(dim)[None])

    return AnalyticField("gaussian-bump", dim, value, gradient, hessian, params={"center": c.tolist(), "width": width})


# ---------------------------------------------------------------------------
# vector fields


def _rotation(dim: int) -> AnalyticField:
    """(-x_2, x_1, -x_4, x_3, ...); an odd trailing coordinate maps to 0."""

    if dim < 2:
        raise FieldError("rotation needs d >= 2")
    jac = np.zeros((dim, dim))
    for i in range(0, dim - 1, 2):
        jac[i, i + 1] = -1.0
        jac[i + 1, i] = 1.0
    return AnalyticField(
        "rotation",
        dim,
        lambda x: x @ jac.T,
        lambda x: np.broadcast_to(jac, (len(x), dim, dim)).copy(),
        components=dim,
        polynomial_degree=1,
    )


def _sine_cosine(dim: int) -> AnalyticField:
    """(sin πx_1, cos πx_2, sin πx_3, ...)."""

    odd = np.arange(dim) % 2 == 1

    def value(x: np.ndarray) -> np.ndarray:
        return np.where(odd[None, :], np.cos(math.pi * x), np.sin(math.pi * x))

    def jacobian(x: np.ndarray) -> np.ndarray:
        diag = math.pi * np.where(odd[None, :], -np.sin(math.pi * x), np.cos(math.pi * x))
        out = np.zeros((len(x), dim, dim))
        idx = np.arange(dim)
        out[:, idx, idx] = diag
        return out

    return AnalyticField("sine-cosine", dim, value, jacobian, components=dim)


def gradient_field(base: AnalyticField) -> AnalyticField:
    """Vector field ∇v of a scalar field v (its Jacobian is the Hessian of v)."""

    if base.is_vector:
        raise FieldError("gradient-of needs a scalar field")
    degree = None if base.polynomial_degree is None else max(base.polynomial_degree - 1, 0)
    return AnalyticField(
        f"gradient-of({base.name})",
        base.dim,
        base.gradient_fn,
        base.hessian,
        components=base.dim,
        params={"field": base.name, "params": dict(base.params)},
        polynomial_degree=degree,
    )


def _gradient_of(dim: int, field: str = "quadratic", params: Optional[Mapping[str, Any]] = None) -> AnalyticField:
    return gradient_field(make_field(field, dim, **dict(params or {})))


for _name, _factory in (
    ("polynomial", _polynomial),
    ("quadratic", _quadratic),
    ("affine", _affine),
    ("constant", _constant),
    ("trig-product", _trig_product),
    ("gaussian-bump", _gaussian_bump),
    ("rotation", _rotation),
    ("sine-cosine", _sine_cosine),
    ("gradient-of", _gradient_of),
):
    register_field(_name, _factory)


def fields_from_specs(dim: int, specs: Iterable[Mapping[str, Any]]) -> List[AnalyticField]:
    """Build fields from ``{"name": ..., "params": {...}}`` records."""

    return [make_field(spec["name"], dim, **dict(spec.get("params", {}))) for spec in specs]
