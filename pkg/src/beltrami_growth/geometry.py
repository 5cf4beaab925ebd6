"""Plane geometry primitives and deterministic polar quadrature.

Points of the plane are plain Python/numpy complex numbers ``x + 1j*y``.
Radial integrals use a composite Gauss-Legendre rule on panels that are
log-uniform by default, because the integrands of interest vary on the
scale of the shells ``e**k <= |z| < e**(k+1)``. Panels are always split at
declared breakpoints so kinks and jumps of piecewise profiles sit on panel
edges, where a Gauss rule does not sample them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EvaluationError

__all__ = [
    "PlanePoint",
    "as_point",
    "Disk",
    "Circle",
    "Annulus",
    "QuadratureSpec",
    "ScalarField",
    "area_disk",
    "radial_rule",
    "integrate_1d",
    "integrate_radial",
    "integrate_field",
    "extremum_on_circle",
]

PlanePoint = complex


def as_point(p) -> complex:
    """Coerce ``complex``, a real number or an ``(x, y)`` pair to a finite plane point."""
    if isinstance(p, (tuple, list)):
        x, y = p
        z = complex(float(x), float(y))
    else:
        z = complex(p)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"plane point must be finite, got {p!r}")
    return z


def _positive_radius(r) -> float:
    r = float(r)
    if not (math.isfinite(r) and r > 0):
        raise ValueError(f"radius must be finite and > 0, got {r!r}")
    return r


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "radius", _positive_radius(self.radius))

    @property
    def area(self) -> float:
        return area_disk(self)


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "radius", _positive_radius(self.radius))


@dataclass(frozen=True)
class Annulus:
    """Open ring ``r_inner < |z - center| < r_outer``."""

    center: complex
    r_inner: float
    r_outer: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        r1, r2 = _positive_radius(self.r_inner), _positive_radius(self.r_outer)
        if not r1 < r2:
            raise ValueError(f"annulus needs r_inner < r_outer, got ({r1}, {r2})")
        object.__setattr__(self, "r_inner", r1)
        object.__setattr__(self, "r_outer", r2)


@dataclass(frozen=True)
class QuadratureSpec:
    """Resolution of the composite polar rule.

    ``radial_panels`` panels of ``nodes_per_panel`` Gauss-Legendre nodes are
    laid on every smooth segment of the radial interval; ``angular_nodes``
    equispaced angles (periodic trapezoid rule) are used on the 2-D path.
    """

    radial_panels: int = 64
    nodes_per_panel: int = 5
    angular_nodes: int = 256
    panel_spacing: str = "log-uniform"

    def __post_init__(self):
        for name in ("radial_panels", "nodes_per_panel", "angular_nodes"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.panel_spacing not in ("uniform", "log-uniform"):
            raise ValueError(f"panel_spacing must be 'uniform' or 'log-uniform', got {self.panel_spacing!r}")

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        return QuadratureSpec(self.radial_panels * factor, self.nodes_per_panel,
                              self.angular_nodes, self.panel_spacing)


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class ScalarField:
    """Real function on the plane, vectorised over complex arrays.

    If ``center`` is set the field is radially symmetric about it and
    ``radial`` gives its profile as a function of the distance to ``center``;
    quadrature then reduces to one dimension. ``breakpoints`` lists radii
    (about ``center``) where the profile is not smooth.
    """

    func: Callable[[np.ndarray], np.ndarray] | None = None
    center: complex | None = None
    radial: Callable[[np.ndarray], np.ndarray] | None = None
    breakpoints: tuple[float, ...] = ()
    integrable_near_center: bool = True
    name: str = ""

    def __post_init__(self):
        if self.center is not None:
            object.__setattr__(self, "center", as_point(self.center))
            if self.radial is None:
                raise ValueError("a radially symmetric field needs a radial profile")
        if self.func is None:
            if self.radial is None:
                raise ValueError("field needs func or (center, radial)")
            c, prof = self.center, self.radial
            object.__setattr__(self, "func", lambda z: prof(np.abs(np.asarray(z) - c)))
        object.__setattr__(self, "breakpoints", tuple(sorted(float(b) for b in self.breakpoints)))

    def __call__(self, z):
        return self.func(np.asarray(z, dtype=complex))

    def is_radial_about(self, z0) -> bool:
        return self.center is not None and abs(self.center - as_point(z0)) <= 1e-14 * max(1.0, abs(z0))

    def _map(self, op, name):
        rad = (lambda r, p=self.radial: op(p(r))) if self.radial is not None else None
        return ScalarField(lambda z, f=self.func: op(f(z)), self.center, rad,
                           self.breakpoints, self.integrable_near_center, name)

    def __add__(self, c):
        c = float(c)
        return self._map(lambda v: v + c, f"{self.name}+{c:g}")

    __radd__ = __add__

    def __mul__(self, c):
        c = float(c)
        return self._map(lambda v: c * v, f"{c:g}*{self.name}")

    __rmul__ = __mul__


def area_disk(d: Disk) -> float:
    return math.pi * d.radius ** 2


def _gauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panel_edges(a: float, b: float, panels: int, spacing: str) -> np.ndarray:
    if spacing == "log-uniform" and a > 0:
        return np.geomspace(a, b, panels + 1)
    return np.linspace(a, b, panels + 1)


def radial_rule(a: float, b: float, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                breakpoints: Sequence[float] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_a^b g(r) dr``.

    The interval is cut at every breakpoint strictly inside ``(a, b)``; each
    segment receives ``spec.radial_panels`` panels. A segment starting at 0
    always uses uniform panels.
    """
    if not (0 <= a < b and math.isfinite(b)):
        raise ValueError(f"radial interval must satisfy 0 <= a < b < inf, got ({a}, {b})")
    cuts = [a] + sorted(float(p) for p in breakpoints if a < p < b) + [b]
    x, w = _gauss(spec.nodes_per_panel)
    nodes, weights = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi - lo <= 1e-15 * hi:
            continue
        edges = _panel_edges(lo, hi, spec.radial_panels, spec.panel_spacing)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes.append((mid[:, None] + half[:, None] * x[None, :]).ravel())
        weights.append((half[:, None] * w[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def _checked(values, nodes, what):
    values = np.asarray(values, dtype=float)
    if values.shape != np.shape(nodes):
        values = np.broadcast_to(values, np.shape(nodes))
    bad = ~np.isfinite(values)
    if bad.any():
        node = np.asarray(nodes).ravel()[np.argmax(bad.ravel())]
        raise EvaluationError(f"{what} is not finite at node {node!r}", node=node)
    return values


def integrate_1d(g: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                 breakpoints: Sequence[float] = ()) -> float:
    """Composite Gauss-Legendre approximation of ``int_a^b g(t) dt``."""
    r, w = radial_rule(a, b, spec, breakpoints)
    return float(np.dot(w, _checked(g(r), r, "integrand")))


def _radial_integral(g, a, b, spec, breakpoints):
    r, w = radial_rule(a, b, spec, breakpoints)
    vals = _checked(g(r), r, "integrand")
    return 2.0 * math.pi * float(np.dot(w, vals * r))


def integrate_radial(g: Callable, a: Annulus, q: QuadratureSpec = DEFAULT_QUADRATURE,
                     breakpoints: Sequence[float] = ()) -> float:
    """``2*pi * int g(r) r dr`` over the radii of the annulus."""
    return _radial_integral(g, a.r_inner, a.r_outer, q, breakpoints)


def _region_radii(region):
    if isinstance(region, Disk):
        return 0.0, region.radius
    if isinstance(region, Annulus):
        return region.r_inner, region.r_outer
    raise TypeError(f"region must be a Disk or an Annulus, got {type(region).__name__}")


def integrate_field(phi: ScalarField, region, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Integral of ``phi`` over a disk or annulus.

    Uses the 1-D radial rule when ``phi`` is radial about the region's
    center, otherwise the polar product rule (radial Gauss x angular
    trapezoid).
    """
    a, b = _region_radii(region)
    if phi.is_radial_about(region.center):
        return _radial_integral(phi.radial, a, b, q, phi.breakpoints)
    r, w = radial_rule(a, b, q)
    theta = 2.0 * math.pi * np.arange(q.angular_nodes) / q.angular_nodes
    z = region.center + r[:, None] * np.exp(1j * theta)[None, :]
    vals = _checked(phi(z), z, "field")
    ring_means = vals.mean(axis=1)
    return 2.0 * math.pi * float(np.dot(w, ring_means * r))


def extremum_on_circle(h, c: Circle, angular_nodes: int = 256, kind: str = "min") -> float:
    """Min or max of ``h`` on a circle.

    Exact when ``h`` is a :class:`ScalarField` radial about the circle's
    center; otherwise the extremum over ``angular_nodes`` equispaced samples,
    which bounds the true max from below and the true min from above.
    """
    if kind not in ("min", "max"):
        raise ValueError(f"kind must be 'min' or 'max', got {kind!r}")
    if isinstance(h, ScalarField) and h.is_radial_about(c.center):
        v = float(np.asarray(h.radial(np.array([c.radius])))[0])
        if not math.isfinite(v):
            raise EvaluationError(f"function is not finite on the circle of radius {c.radius}", node=c.radius)
        return v
    if angular_nodes < 1:
        raise ValueError("angular_nodes must be >= 1")
    theta = 2.0 * math.pi * np.arange(angular_nodes) / angular_nodes
    z = c.center + c.radius * np.exp(1j * theta)
    vals = _checked(h(z), z, "function")
    return float(vals.min() if kind == "min" else vals.max())
