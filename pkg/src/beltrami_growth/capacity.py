"""Ring condensers: analytic modulus, grid Dirichlet-energy capacity, bounds.

The grid solver works on nodes ``x_i = c - r_A + i h`` of a uniform
Cartesian grid over the bounding square of the outer disk. On the Courant
triangulation of that grid (each cell cut along one diagonal) the P1
stiffness matrix is exactly the 5-point Laplacian, so the discrete energy
``sum over grid edges (u_i - u_j)**2`` is the true Dirichlet integral of the
piecewise-linear interpolant.

Two node classifications are offered:

``conforming`` (default)
    A node is pinned to 1 if it belongs to a triangle meeting the closed
    inner disk, and pinned to 0 if it belongs to a triangle not contained in
    the open outer disk. The interpolant is then admissible for the
    condenser, so every discrete energy is an upper bound for the capacity
    and estimates decrease towards it under refinement.
``cell-center``
    Nodes are pinned by plain membership of the node itself. More accurate
    at a given resolution but not admissible; estimates approach the
    capacity from below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError
from .geometry import Disk, area_disk, as_point

__all__ = [
    "RingCondenser",
    "GridSpec",
    "CapacityEstimate",
    "CapacityReport",
    "ShlykReport",
    "annulus_ring_modulus",
    "capacity_dirichlet",
    "capacity_lower_bound",
    "capacity_convergence",
    "shlyk_consistency",
    "condenser_image",
    "grid_mask",
    "write_mask",
]


@dataclass(frozen=True)
class RingCondenser:
    """Outer open disk ``A`` and inner closed disk ``C`` with ``C`` inside ``A``."""

    outer: Disk
    inner: Disk

    def __post_init__(self):
        if not self.inner.radius < self.outer.radius:
            raise ValueError("inner disk must be smaller than the outer disk")
        if abs(self.outer.center - self.inner.center) + self.inner.radius >= self.outer.radius:
            raise ValueError("closure of the inner disk must lie inside the outer disk")

    @classmethod
    def concentric(cls, r_inner: float, r_outer: float, center=0j) -> "RingCondenser":
        return cls(Disk(center, r_outer), Disk(center, r_inner))

    @property
    def is_concentric(self) -> bool:
        return abs(self.outer.center - self.inner.center) <= 1e-14 * self.outer.radius

    @property
    def gap(self) -> float:
        """Narrowest width of ``A \\ C``."""
        return self.outer.radius - abs(self.outer.center - self.inner.center) - self.inner.radius


@dataclass(frozen=True)
class GridSpec:
    cells_per_axis: int = 512
    solver_tolerance: float = 1e-8
    max_iterations: int = 20000
    scheme: str = "conforming"

    def __post_init__(self):
        if int(self.cells_per_axis) != self.cells_per_axis or self.cells_per_axis < 16:
            raise ValueError(f"cells_per_axis must be an integer >= 16, got {self.cells_per_axis!r}")
        if not self.solver_tolerance > 0:
            raise ValueError("solver_tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.scheme not in ("conforming", "cell-center"):
            raise ValueError(f"scheme must be 'conforming' or 'cell-center', got {self.scheme!r}")

    def with_cells(self, n: int) -> "GridSpec":
        return GridSpec(n, self.solver_tolerance, self.max_iterations, self.scheme)


@dataclass(frozen=True)
class CapacityEstimate:
    value: float
    grid: GridSpec
    residual: float
    analytic_baseline: float | None
    iterations: int
    unknowns: int


def annulus_ring_modulus(r1: float, r2: float) -> float:
    """``2 pi / log(r2/r1)``: modulus of the curves joining the boundary circles of a round ring."""
    r1, r2 = float(r1), float(r2)
    if not (0 < r1 < r2 and math.isfinite(r2)):
        raise ValueError(f"ring radii must satisfy 0 < r1 < r2 < inf, got ({r1}, {r2})")
    return 2 * math.pi / math.log(r2 / r1)


def capacity_lower_bound(area_A: float, area_C: float) -> float:
    """``4 pi / log(m(A)/m(C))``."""
    if not (0 < area_C < area_A):
        raise ValueError(f"need 0 < m(C) < m(A), got m(C)={area_C}, m(A)={area_A}")
    return 4 * math.pi / math.log(area_A / area_C)


def _segment_distance(p, a, b):
    d = b - a
    t = np.clip(((p - a) * np.conj(d)).real / np.abs(d) ** 2, 0.0, 1.0)
    return np.abs(p - a - t * d)


def _triangle_distance(p, a, b, c):
    """Distance from point ``p`` to the closed triangles ``abc`` (arrays of vertices)."""
    d = np.minimum(np.minimum(_segment_distance(p, a, b), _segment_distance(p, b, c)),
                   _segment_distance(p, c, a))

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    s1, s2, s3 = cross(b - a, p - a), cross(c - b, p - b), cross(a - c, p - c)
    inside = ((s1 >= 0) & (s2 >= 0) & (s3 >= 0)) | ((s1 <= 0) & (s2 <= 0) & (s3 <= 0))
    return np.where(inside, 0.0, d)


def _classify(e: RingCondenser, g: GridSpec):
    """Node positions and boolean masks (pinned-to-one, pinned-to-zero)."""
    n = g.cells_per_axis
    rA, cA = e.outer.radius, e.outer.center
    rC, cC = e.inner.radius, e.inner.center
    h = 2 * rA / n
    x = -rA + h * np.arange(n + 1)
    Z = cA + x[:, None] + 1j * x[None, :]
    if g.scheme == "cell-center":
        one = np.abs(Z - cC) <= rC
        zero = np.abs(Z - cA) >= rA
        return Z, h, one, zero & ~one
    in_A = np.abs(Z - cA) < rA
    one = np.zeros(Z.shape, bool)
    zero = np.zeros(Z.shape, bool)
    corners = {(0, 0): Z[:-1, :-1], (1, 0): Z[1:, :-1], (1, 1): Z[1:, 1:], (0, 1): Z[:-1, 1:]}
    for tri in (((0, 0), (1, 0), (1, 1)), ((0, 0), (0, 1), (1, 1))):
        a, b, c = (corners[v] for v in tri)
        meets_C = _triangle_distance(cC, a, b, c) <= rC
        inside_A = np.ones(meets_C.shape, bool)
        for i, j in tri:
            inside_A &= in_A[i:n + i, j:n + j]
        for i, j in tri:
            one[i:n + i, j:n + j] |= meets_C
            zero[i:n + i, j:n + j] |= ~inside_A
    if np.any(one & zero):
        raise ValueError("grid too coarse: a node is pinned to both 0 and 1")
    return Z, h, one, zero


def grid_mask(e: RingCondenser, g: GridSpec) -> str:
    """Plain-text bitmap of node classes: ``1`` pinned to one, ``0`` pinned to zero, ``.`` free.

    Row ``i`` lists the nodes with x-index ``i``.
    """
    _, _, one, zero = _classify(e, g)
    chars = np.full(one.shape, ".", dtype="<U1")
    chars[one] = "1"
    chars[zero] = "0"
    return "\n".join("".join(row) for row in chars) + "\n"


def write_mask(path, e: RingCondenser, g: GridSpec) -> None:
    with open(path, "w") as fh:
        fh.write(grid_mask(e, g))


def _laplacian(free, values):
    """5-point system ``L u = b`` on the free nodes; pinned nodes move to the right side."""
    idx = -np.ones(free.shape, dtype=np.int64)
    m = int(free.sum())
    idx[free] = np.arange(m)
    F = np.pad(free, 1)
    I = np.pad(idx, 1, constant_values=-1)
    V = np.pad(values, 1)
    rows, cols = [], []
    b = np.zeros(m)
    diag = np.zeros(m)
    ni, nj = free.shape
    me = idx[free]
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        sl = (slice(1 + di, ni + 1 + di), slice(1 + dj, nj + 1 + dj))
        nb_free, nb_idx, nb_val = F[sl], I[sl], V[sl]
        diag[me] += 1.0
        both = free & nb_free
        rows.append(idx[both])
        cols.append(nb_idx[both])
        pinned = free & ~nb_free
        np.add.at(b, idx[pinned], nb_val[pinned])
    r = np.concatenate(rows + [np.arange(m)])
    c = np.concatenate(cols + [np.arange(m)])
    data = np.concatenate([-np.ones(len(r) - m), diag])
    return sp.csr_matrix((data, (r, c)), shape=(m, m)), b, diag


def capacity_dirichlet(e: RingCondenser, g: GridSpec = GridSpec()) -> CapacityEstimate:
    """Discrete Dirichlet-energy capacity of a ring condenser.

    Solves the 5-point system by Jacobi-preconditioned conjugate gradients
    to relative residual ``g.solver_tolerance``.
    """
    h_min = 2 * e.outer.radius / g.cells_per_axis
    if e.gap < 8 * h_min:
        raise ValueError(f"under-resolved condenser: gap {e.gap:.4g} spans fewer than 8 cells of width {h_min:.4g}")
    _, _, one, zero = _classify(e, g)
    free = ~one & ~zero
    values = one.astype(float)
    L, b, diag = _laplacian(free, values)
    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    u, info = spla.cg(L, b, rtol=g.solver_tolerance, atol=0.0, maxiter=g.max_iterations,
                      M=sp.diags(1.0 / diag), callback=count)
    bnorm = float(np.linalg.norm(b))
    residual = float(np.linalg.norm(b - L @ u) / bnorm) if bnorm > 0 else 0.0
    if info != 0 or residual > g.solver_tolerance * 1.01:
        raise CapacityError(f"conjugate gradients stopped after {iterations} iterations "
                            f"with relative residual {residual:.3e}", residual=residual)
    full = values.copy()
    full[free] = u
    energy = float(np.sum(np.diff(full, axis=0) ** 2) + np.sum(np.diff(full, axis=1) ** 2))
    baseline = annulus_ring_modulus(e.inner.radius, e.outer.radius) if e.is_concentric else None
    return CapacityEstimate(energy, g, residual, baseline, iterations, int(free.sum()))


@dataclass
class CapacityReport:
    """Grid estimates of one condenser at several resolutions."""

    condenser: RingCondenser
    estimates: list
    lower_bound: float
    baseline: float | None

    csv_columns = ("r_C", "r_A", "cells", "estimate", "baseline", "lower_bound", "residual")

    def rows(self):
        base = math.nan if self.baseline is None else self.baseline
        return [(self.condenser.inner.radius, self.condenser.outer.radius, est.grid.cells_per_axis,
                 est.value, base, self.lower_bound, est.residual) for est in self.estimates]

    @property
    def cells(self):
        return [est.grid.cells_per_axis for est in self.estimates]

    @property
    def values(self):
        return [est.value for est in self.estimates]

    def converges_monotonically(self) -> bool:
        """Distance to the analytic value shrinks at every refinement (concentric rings only)."""
        if self.baseline is None:
            return True
        gaps = [abs(v - self.baseline) for v in self.values]
        return all(b < a for a, b in zip(gaps, gaps[1:]))

    def respects_lower_bound(self, slack: float = 0.02) -> bool:
        return all(v >= self.lower_bound - slack * v for v in self.values)


def capacity_convergence(e: RingCondenser, cells: Sequence[int], g: GridSpec = GridSpec()) -> CapacityReport:
    ests = [capacity_dirichlet(e, g.with_cells(int(n))) for n in sorted(cells)]
    lb = capacity_lower_bound(area_disk(e.outer), area_disk(e.inner))
    base = annulus_ring_modulus(e.inner.radius, e.outer.radius) if e.is_concentric else None
    return CapacityReport(e, ests, lb, base)


@dataclass(frozen=True)
class ShlykReport:
    estimate: CapacityEstimate
    modulus: float

    @property
    def relative_gap(self) -> float:
        return abs(self.estimate.value - self.modulus) / self.modulus


def shlyk_consistency(e: RingCondenser, g: GridSpec = GridSpec()) -> ShlykReport:
    """Grid capacity against the analytic modulus of the joining curve family."""
    if not e.is_concentric:
        raise ValueError("capacity/modulus comparison needs a concentric round condenser")
    return ShlykReport(capacity_dirichlet(e, g), annulus_ring_modulus(e.inner.radius, e.outer.radius))


def condenser_image(e: RingCondenser, f) -> RingCondenser:
    """Image of a concentric ring condenser under a radial map centred with it."""
    if not e.is_concentric:
        raise ValueError("only concentric condensers have closed-form radial images")
    if abs(as_point(f.center) - e.outer.center) > 1e-14 * max(1.0, e.outer.radius):
        raise ValueError("condenser must be concentric with the map")
    rC = float(f.rho(e.inner.radius))
    rA = float(f.rho(e.outer.radius))
    return RingCondenser.concentric(rC, rA, f.center)
