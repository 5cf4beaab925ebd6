"""Global finite mean oscillation: disk means, dispersion, and the weighted
shell-integral estimate ``int phi / (|z-z0| log|z-z0|)^2 <= C log log R``.

The supremum defining the maximal dispersion runs over the continuum
``R > e**e``; here it is always a maximum over a finite grid, i.e. a lower
estimate. Reports carry the grid they were computed on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .geometry import (DEFAULT_QUADRATURE, Annulus, Disk, QuadratureSpec, ScalarField,
                       as_point, integrate_field, radial_rule)

__all__ = [
    "E_E",
    "REL_SLACK",
    "constant_field",
    "log_plus_field",
    "abs_field",
    "two_level_field",
    "named_field",
    "default_dispersion_grid",
    "exponent_grid",
    "DispersionReport",
    "GrowthConstant",
    "GFMOEvidence",
    "Lemma2Report",
    "ShellReport",
    "mean_over_disk",
    "mean_abs_deviation_from",
    "mean_deviation",
    "dispersion_sup",
    "gfmo_evidence",
    "growth_constant",
    "lemma2_lhs",
    "lemma2_check",
    "lemma2_shell_decomposition",
]

E_E = math.exp(math.e)
# tolerance for comparisons where one side comes from quadrature
REL_SLACK = 1e-6
_C_DELTA = math.pi / 6 * (24 + math.pi ** 2) * math.e ** 2
_C_MEAN = math.pi / 6 * 2 * math.pi ** 2


def constant_field(c: float, center=0j) -> ScalarField:
    c = float(c)
    return ScalarField(center=center, radial=lambda r: np.full(np.shape(r), c), name=f"const:{c:g}")


def log_plus_field(center=0j) -> ScalarField:
    """``log+ |z - center| = max(log|z - center|, 0)``."""
    return ScalarField(center=center, radial=lambda r: np.log(np.maximum(np.asarray(r, dtype=float), 1.0)),
                       breakpoints=(1.0,), name="logplus")


def abs_field(center=0j) -> ScalarField:
    return ScalarField(center=center, radial=lambda r: np.asarray(r, dtype=float) * 1.0, name="abs")


def two_level_field(a: float, b: float, radius: float, center=0j) -> ScalarField:
    """``a`` on the open disk of the given radius, ``b`` outside it."""
    return ScalarField(center=center,
                       radial=lambda r: np.where(np.asarray(r) < radius, float(a), float(b)),
                       breakpoints=(radius,), name=f"two-level:{a:g}:{b:g}")


def named_field(spec: str, center=0j) -> ScalarField:
    """``const:Q``, ``logplus`` or ``abs``."""
    s = spec.strip()
    if s.startswith("const:"):
        Q = float(s.split(":", 1)[1])
        if not (math.isfinite(Q) and Q >= 0):
            raise ValueError(f"constant field needs a finite Q >= 0, got {Q!r}")
        return constant_field(Q, center)
    if s == "logplus":
        return log_plus_field(center)
    if s == "abs":
        return abs_field(center)
    raise ValueError(f"unknown field {spec!r}; expected const:Q, logplus or abs")


def exponent_grid(start: float, end: float, count: int) -> np.ndarray:
    """Radii ``e**t`` for ``count`` equispaced exponents ``t`` in ``[start, end]``."""
    if count < 1 or not (start <= end):
        raise ValueError(f"bad exponent grid {start}:{end}:{count}")
    return np.exp(np.linspace(start, end, int(count)))


def default_dispersion_grid() -> np.ndarray:
    """``e**(e + 0.01 + k/2)``, ``k = 0..12``."""
    return np.exp(math.e + 0.01 + 0.5 * np.arange(13))


def _validate_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise ValueError("radius grid is empty")
    if np.any(~np.isfinite(g)) or np.any(g <= E_E):
        raise ValueError(f"every grid radius must be finite and > e**e = {E_E:.6f}")
    return g


def mean_over_disk(phi: ScalarField, z0, R: float, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    R = float(R)
    return integrate_field(phi, Disk(z0, R), q) / (math.pi * R * R)


def _crossings(profile, level, a, b, q, breakpoints):
    """Radii in ``(a, b)`` where the radial profile crosses ``level``."""
    r, _ = radial_rule(a, b, q, breakpoints)
    v = np.asarray(profile(r), dtype=float) - level
    tol = 1e-12 * max(1.0, abs(level))
    sig = np.where(np.abs(v) > tol, np.sign(v), 0.0)
    idx = np.nonzero(sig[:-1] * sig[1:] < 0)[0]
    roots = []
    for i in idx:
        lo, hi = r[i], r[i + 1]
        if any(lo <= bp <= hi for bp in breakpoints):
            # a jump or kink sits between the nodes; it is already a panel edge
            continue
        roots.append(brentq(lambda t: float(profile(np.array([t]))[0]) - level, lo, hi, xtol=1e-15 * hi))
    return roots


def mean_abs_deviation_from(phi: ScalarField, z0, R: float, level: float,
                            q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """``(1/|B|) int_B |phi - level|`` over ``B = B(z0, R)``."""
    R, level = float(R), float(level)
    z0 = as_point(z0)
    if phi.is_radial_about(z0):
        extra = _crossings(phi.radial, level, 0.0, R, q, phi.breakpoints)
        dev = ScalarField(center=z0, radial=lambda r: np.abs(phi.radial(r) - level),
                          breakpoints=phi.breakpoints + tuple(extra))
    else:
        dev = ScalarField(lambda z: np.abs(phi(z) - level))
    return integrate_field(dev, Disk(z0, R), q) / (math.pi * R * R)


def mean_deviation(phi: ScalarField, z0, R: float, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Normalised ``L1`` oscillation of ``phi`` about its own mean over ``B(z0, R)``."""
    return mean_abs_deviation_from(phi, z0, R, mean_over_disk(phi, z0, R, q), q)


def _bounded_on_grid(values, rtol=0.05) -> bool:
    """Heuristic: the tail half of the grid does not exceed the head half by more than ``rtol``."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return True
    head = v[: (v.size + 1) // 2].max()
    tail = v[v.size // 2:].max()
    return bool(tail <= (1 + rtol) * head + 1e-12 * max(1.0, abs(head)))


@dataclass
class DispersionReport:
    center: complex
    radius_grid: np.ndarray
    mean_values: np.ndarray
    mean_deviations: np.ndarray
    delta_inf_hat: float
    phi_0: float
    stabilizing: bool
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE
    # the grid maximum never exceeds the true supremum
    lower_estimate: bool = True

    csv_columns = ("R", "mean", "deviation")

    def rows(self):
        return [(R, m, d) for R, m, d in zip(self.radius_grid, self.mean_values, self.mean_deviations)]


def dispersion_sup(phi: ScalarField, z0, grid: Sequence[float] | None = None,
                   q: QuadratureSpec = DEFAULT_QUADRATURE) -> DispersionReport:
    g = _validate_grid(default_dispersion_grid() if grid is None else grid)
    means = np.array([mean_over_disk(phi, z0, R, q) for R in g])
    devs = np.array([mean_abs_deviation_from(phi, z0, R, m, q) for R, m in zip(g, means)])
    if not (np.all(np.isfinite(means)) and np.all(np.isfinite(devs))):
        raise ArithmeticError("non-finite disk mean or deviation")
    return DispersionReport(
        center=as_point(z0), radius_grid=g, mean_values=means, mean_deviations=devs,
        delta_inf_hat=float(devs.max()), phi_0=mean_over_disk(phi, z0, math.e, q),
        stabilizing=_bounded_on_grid(devs), quadrature=q)


@dataclass
class GFMOEvidence:
    """Three sufficient conditions for GFMO, sampled on a grid.

    ``oscillation`` is the defining quantity (deviation from the disk mean),
    ``about_center_value`` the deviation from ``phi(z0)``, and ``mean_abs`` the
    plain mean of ``|phi|``. Each flag says whether the sampled values look
    bounded; this is evidence only.
    """

    radius_grid: np.ndarray
    oscillation: np.ndarray
    about_center_value: np.ndarray
    mean_abs: np.ndarray
    oscillation_bounded: bool
    about_center_value_bounded: bool
    mean_abs_bounded: bool


def gfmo_evidence(phi: ScalarField, z0, grid: Sequence[float] | None = None,
                  q: QuadratureSpec = DEFAULT_QUADRATURE) -> GFMOEvidence:
    rep = dispersion_sup(phi, z0, grid, q)
    g = rep.radius_grid
    at_center = float(np.asarray(phi(np.array([as_point(z0)])))[0])
    about = np.array([mean_abs_deviation_from(phi, z0, R, at_center, q) for R in g])
    mabs = np.array([mean_abs_deviation_from(phi, z0, R, 0.0, q) for R in g])
    return GFMOEvidence(g, rep.mean_deviations, about, mabs,
                        rep.stabilizing, _bounded_on_grid(about), _bounded_on_grid(mabs))


@dataclass(frozen=True)
class GrowthConstant:
    value: float
    delta_component: float
    mean_component: float
    delta: float
    phi0: float

    @property
    def degenerate(self) -> bool:
        return self.value == 0

    @property
    def exponent(self) -> float:
        """``2 pi / C``, the power of ``log R`` in the growth bound."""
        return math.inf if self.value == 0 else 2 * math.pi / self.value

    def inflated(self, factor: float) -> "GrowthConstant":
        return GrowthConstant(self.value * factor, self.delta_component * factor,
                              self.mean_component * factor, self.delta, self.phi0)


def growth_constant(delta: float, phi0: float) -> GrowthConstant:
    """``C = (pi/6) ((24 + pi^2) e^2 delta + 2 pi^2 phi0)``."""
    delta, phi0 = float(delta), float(phi0)
    if not (math.isfinite(delta) and math.isfinite(phi0)) or delta < 0 or phi0 < 0:
        raise ValueError(f"growth constant needs finite nonnegative inputs, got ({delta}, {phi0})")
    dc, mc = _C_DELTA * delta, _C_MEAN * phi0
    return GrowthConstant(dc + mc, dc, mc, delta, phi0)


def _log_weight(r):
    r = np.asarray(r, dtype=float)
    return 1.0 / (r * np.log(r)) ** 2


def _weighted(phi: ScalarField, z0, weight) -> ScalarField:
    z0 = as_point(z0)
    if phi.is_radial_about(z0):
        return ScalarField(center=z0, radial=lambda r: phi.radial(r) * weight(r), breakpoints=phi.breakpoints)
    return ScalarField(lambda z: phi(z) * weight(np.abs(z - z0)))


def lemma2_lhs(phi: ScalarField, z0, R: float, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """``int phi(z) dxdy / (|z-z0| log|z-z0|)^2`` over the ring ``e < |z-z0| < R``."""
    R = float(R)
    if not R > E_E:
        raise ValueError(f"R must exceed e**e = {E_E:.6f}, got {R}")
    return integrate_field(_weighted(phi, z0, _log_weight), Annulus(z0, math.e, R), q)


@dataclass
class Lemma2Report:
    center: complex
    radius_grid: np.ndarray
    mean_values: np.ndarray
    mean_deviations: np.ndarray
    lhs: np.ndarray
    bound: np.ndarray
    margin: np.ndarray
    passed: np.ndarray
    constant: GrowthConstant
    dispersion: DispersionReport

    csv_columns = ("R", "mean", "deviation", "lhs", "bound", "margin", "pass")

    @property
    def all_pass(self) -> bool:
        return bool(np.all(self.passed))

    def rows(self):
        return [(R, m, d, l, b, mg, int(p)) for R, m, d, l, b, mg, p in
                zip(self.radius_grid, self.mean_values, self.mean_deviations,
                    self.lhs, self.bound, self.margin, self.passed)]

    def failures(self):
        return [f"shell-integral bound at R={R:.6g}: lhs={l:.6g} > bound={b:.6g}"
                for R, l, b, p in zip(self.radius_grid, self.lhs, self.bound, self.passed) if not p]


def lemma2_check(phi: ScalarField, z0, grid: Sequence[float], q: QuadratureSpec = DEFAULT_QUADRATURE,
                 dispersion: DispersionReport | None = None) -> Lemma2Report:
    """Check ``lhs(R) <= C log log R`` on every grid radius.

    ``C`` is built from the maximal dispersion estimated on the union of the
    default dispersion grid and ``grid`` (or from ``dispersion`` if given),
    and from the mean over ``B(z0, e)``.
    """
    g = _validate_grid(grid)
    if dispersion is None:
        dispersion = dispersion_sup(phi, z0, np.union1d(default_dispersion_grid(), g), q)
    C = growth_constant(dispersion.delta_inf_hat, dispersion.phi_0)
    means = np.array([mean_over_disk(phi, z0, R, q) for R in g])
    devs = np.array([mean_abs_deviation_from(phi, z0, R, m, q) for R, m in zip(g, means)])
    lhs = np.array([lemma2_lhs(phi, z0, R, q) for R in g])
    bound = C.value * np.log(np.log(g))
    margin = bound - lhs
    passed = lhs <= bound * (1 + REL_SLACK)
    return Lemma2Report(as_point(z0), g, means, devs, lhs, bound, margin, passed, C, dispersion)


@dataclass
class ShellReport:
    """Quantities from splitting ``e < |z-z0| < R`` into shells ``e^k <= |z-z0| < e^(k+1)``.

    Index ``k`` runs over ``1..N`` for per-shell arrays; ``shell_means[j]`` and
    ``shell_deviations[j]`` belong to the disk of radius ``e^(j+1)``,
    ``j = 0..N``.
    """

    R: float
    N: int
    delta: float
    shell_means: np.ndarray
    shell_deviations: np.ndarray
    s1_terms: np.ndarray
    s2_terms: np.ndarray
    alpha_integrals: np.ndarray
    inverse_square_integrals: np.ndarray
    lhs: float
    checks: dict = field(default_factory=dict)

    @property
    def S1(self) -> float:
        return float(self.s1_terms.sum())

    @property
    def S2(self) -> float:
        return float(self.s2_terms.sum())

    @property
    def all_pass(self) -> bool:
        return all(self.checks.values())


def lemma2_shell_decomposition(phi: ScalarField, z0, R: float, q: QuadratureSpec = DEFAULT_QUADRATURE,
                               delta: float | None = None) -> ShellReport:
    """Recompute the shell bookkeeping behind the estimate and check each step.

    ``delta`` defaults to the largest deviation over the disks ``B(z0, e^k)``,
    ``k = 2..N+1``, which is what each individual step actually uses.
    """
    R = float(R)
    if not R > E_E:
        raise ValueError(f"R must exceed e**e = {E_E:.6f}, got {R}")
    z0 = as_point(z0)
    N = int(math.floor(math.log(R)))
    if math.exp(N + 1) <= R:  # guard rounding of log at exact powers of e
        N += 1
    ks = np.arange(1, N + 1)
    radii = np.exp(np.arange(1, N + 2))
    means = np.array([mean_over_disk(phi, z0, r, q) for r in radii])
    devs = np.array([mean_abs_deviation_from(phi, z0, r, m, q) for r, m in zip(radii, means)])
    if delta is None:
        delta = float(devs[1:].max())
    slack = 1 + REL_SLACK

    s1, s2, alpha, inv_sq = [], [], [], []
    one = ScalarField(center=z0, radial=lambda r: np.ones(np.shape(r)))
    for k in ks:
        ring = Annulus(z0, math.e ** k, math.e ** (k + 1))
        nxt = means[k]  # mean over B(z0, e^(k+1))
        s1.append(integrate_field(_weighted(phi + (-nxt), z0, _log_weight), ring, q))
        a_k = integrate_field(_weighted(one, z0, _log_weight), ring, q)
        alpha.append(a_k)
        s2.append(nxt * a_k)
        inv_sq.append(integrate_field(_weighted(one, z0, lambda r: 1.0 / np.asarray(r) ** 2), ring, q))
    s1, s2, alpha, inv_sq = map(np.array, (s1, s2, alpha, inv_sq))
    lhs = lemma2_lhs(phi, z0, R, q)
    e2 = math.e ** 2
    inv_k2 = 1.0 / ks ** 2
    jumps = np.abs(np.diff(means))  # |phi_{k-1} - phi_k|, k = 2..N+1
    checks = {
        "lhs <= |S1| + S2": lhs <= (abs(s1.sum()) + s2.sum()) * slack,
        "shell |S1_k| <= pi e^2 dev_{k+1} / k^2": bool(np.all(np.abs(s1) <= math.pi * e2 * devs[1:] * inv_k2 * slack + 1e-14)),
        "|S1| <= pi e^2 delta sum 1/k^2": abs(s1.sum()) <= math.pi * e2 * delta * inv_k2.sum() * slack + 1e-14,
        "pi e^2 delta sum 1/k^2 <= pi^3 e^2 delta / 6": inv_k2.sum() <= math.pi ** 2 / 6,
        "int_Ak alpha <= 2 pi / k^2": bool(np.all(alpha <= 2 * math.pi * inv_k2 * slack)),
        "int_Ak |z|^-2 = 2 pi": bool(np.allclose(inv_sq, 2 * math.pi, rtol=REL_SLACK, atol=0)),
        "|phi_{k-1} - phi_k| <= e^2 dev_k": bool(np.all(jumps <= e2 * devs[1:] * slack + 1e-14)),
        "|phi_{k-1} - phi_k| <= e^2 delta": bool(np.all(jumps <= e2 * delta * slack + 1e-14)),
        "sum_{k<=N} 1/k < 1 + log log R": float(np.sum(1.0 / ks)) < 1 + math.log(math.log(R)),
    }
    return ShellReport(R, N, float(delta), means, devs, s1, s2, alpha, inv_sq, lhs, checks)
