"""Beltrami coefficients, dilatation quotients and radial stretchings.

A radial stretching ``f(z) = z0 + rho(r) * (z - z0) / r`` with ``r = |z - z0|``
solves ``f_zbar = mu(z) f_z`` for

    mu(z) = e^{2i theta} * (r rho'(r) - rho(r)) / (r rho'(r) + rho(r)),

so its coefficient, dilatation quotient, circle extrema and annulus images
are all available in closed form. These maps are the ground truth for the
rest of the package.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import BreakpointError, DegeneratePointError, DegenerateProfileError
from .geometry import Annulus, ScalarField, as_point

__all__ = [
    "RadialProfile",
    "RadialMap",
    "BeltramiCoefficient",
    "DilatationField",
    "dilatation_from_mu",
    "mu_from_radial_map",
    "dilatation_from_radial_map",
    "dilatation_field",
    "wirtinger_fd",
    "wirtinger_exact",
    "beltrami_residual",
    "sample_points",
    "identity_map",
    "power_map",
    "log_map",
    "load_profile_table",
    "fixture",
    "check_monotone",
]


@dataclass(frozen=True)
class RadialProfile:
    rho: Callable[[np.ndarray], np.ndarray]
    rho_prime: Callable[[np.ndarray], np.ndarray]
    breakpoints: tuple[float, ...] = ()
    name: str = ""
    essential_dilatation: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(sorted(float(b) for b in self.breakpoints)))
        if float(np.asarray(self.rho(np.array([0.0])))[0]) != 0.0:
            raise ValueError(f"profile {self.name!r} must satisfy rho(0) = 0")


@dataclass(frozen=True)
class RadialMap:
    """Homeomorphism ``z -> center + rho(|z-center|) (z-center)/|z-center|``."""

    profile: RadialProfile
    center: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))

    @property
    def name(self) -> str:
        return self.profile.name

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        w = z - self.center
        r = np.abs(w)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(r > 0, self.profile.rho(r) * w / np.where(r > 0, r, 1.0), 0.0)
        return self.center + out

    def rho(self, r):
        return self.profile.rho(np.asarray(r, dtype=float))

    def rho_prime(self, r):
        return self.profile.rho_prime(np.asarray(r, dtype=float))

    def translated(self, center) -> "RadialMap":
        return RadialMap(self.profile, center)

    def scaled(self, c: float) -> "RadialMap":
        """The map ``z0 + c (f(z) - z0)``; same dilatation, image rings scaled by ``c``."""
        if not c > 0:
            raise ValueError("scale factor must be > 0")
        p = self.profile
        prof = RadialProfile(lambda r: c * p.rho(r), lambda r: c * p.rho_prime(r),
                             p.breakpoints, f"{c:g}*{p.name}", p.essential_dilatation)
        return RadialMap(prof, self.center)

    def modulus_field(self) -> ScalarField:
        """``|f(z) - f(center)|`` as a field radial about the center."""
        return ScalarField(center=self.center, radial=self.profile.rho,
                           breakpoints=self.profile.breakpoints, name=f"|{self.name}|")


@dataclass(frozen=True)
class BeltramiCoefficient:
    """Pointwise complex coefficient ``mu``; ``essential_bound`` is None when sup|mu| = 1."""

    func: Callable[[np.ndarray], np.ndarray]
    essential_bound: float | None = None

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        mu = np.asarray(self.func(z), dtype=complex)
        mod = np.abs(mu)
        bad = ~(mod < 1)
        if bad.any():
            i = np.argmax(np.broadcast_to(bad, mu.shape).ravel())
            zz = np.broadcast_to(z, mu.shape).ravel()[i]
            raise DegeneratePointError(complex(zz), float(mod.ravel()[i]))
        return mu


class DilatationField(ScalarField):
    """A :class:`ScalarField` whose values are dilatation quotients (``>= 1``)."""

    def __call__(self, z):
        vals = super().__call__(z)
        if np.any(vals < 1 - 1e-12):
            raise ValueError("dilatation quotient below 1")
        return vals


def _modulus(mu, z):
    return np.abs(mu(z) if callable(mu) else np.asarray(mu, dtype=complex))


def dilatation_from_mu(mu, z=None):
    """``(1 + |mu|) / (1 - |mu|)`` for a coefficient (evaluated at ``z``) or a raw value."""
    m = _modulus(mu, z)
    bad = ~(m < 1)
    if np.any(bad):
        raise DegeneratePointError(z, float(np.max(m)))
    out = (1 + m) / (1 - m)
    return float(out) if np.ndim(out) == 0 else out


def _polar(m: RadialMap, z):
    z = np.asarray(z, dtype=complex)
    w = z - m.center
    r = np.abs(w)
    if np.any(r == 0):
        raise ValueError("Beltrami data of a radial map are undefined at its center")
    if m.profile.breakpoints and np.any(np.isin(r, m.profile.breakpoints)):
        raise BreakpointError("evaluation radius is a breakpoint of the profile")
    return w, r


def _stretch_terms(m: RadialMap, r):
    rp = r * m.profile.rho_prime(r)
    rho = m.profile.rho(r)
    return rp, rho


def mu_from_radial_map(m: RadialMap) -> BeltramiCoefficient:
    def mu(z):
        w, r = _polar(m, z)
        rp, rho = _stretch_terms(m, r)
        den = rp + rho
        if np.any(den == 0):
            raise DegenerateProfileError(f"r rho' + rho vanishes for profile {m.name!r}")
        return (w / np.conj(w)) * (rp - rho) / den

    K = m.profile.essential_dilatation
    bound = None if math.isinf(K) else (K - 1) / (K + 1)
    return BeltramiCoefficient(mu, bound)


def dilatation_from_radial_map(m: RadialMap, r):
    """``max(r rho'/rho, rho/(r rho'))`` at radius ``r`` (scalar or array)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radius must be > 0")
    rp, rho = _stretch_terms(m, r)
    if np.any(rp + rho == 0):
        raise DegenerateProfileError(f"r rho' + rho vanishes for profile {m.name!r}")
    s = rp / rho
    out = np.maximum(s, 1.0 / s)
    return float(out) if out.ndim == 0 else out


def dilatation_field(m: RadialMap) -> DilatationField:
    def radial(r):
        r = np.asarray(r, dtype=float)
        # the value at the center itself is taken as the limit, sampled at r = 1e-9
        safe = np.where(r > 0, r, 1e-9)
        rp, rho = _stretch_terms(m, safe)
        s = rp / rho
        return np.maximum(s, 1.0 / s)

    return DilatationField(center=m.center, radial=radial, breakpoints=m.profile.breakpoints,
                           name=f"K[{m.name}]")


def wirtinger_fd(m: RadialMap, z, h: float = 1e-5) -> tuple[complex, complex]:
    """Central-difference ``(f_z, f_zbar)`` at ``z`` with step ``h``."""
    if not h > 0:
        raise ValueError("step must be > 0")
    z = as_point(z)
    r = abs(z - m.center)
    if r <= 2 * h:
        raise BreakpointError(f"stencil at z={z} reaches the center of the map")
    for b in m.profile.breakpoints:
        if abs(r - b) < 2 * h:
            raise BreakpointError(f"stencil at z={z} (r={r}) straddles breakpoint r={b}")
    pts = np.array([z + h, z - h, z + 1j * h, z - 1j * h])
    f = m(pts)
    fx = (f[0] - f[1]) / (2 * h)
    fy = (f[2] - f[3]) / (2 * h)
    return complex((fx - 1j * fy) / 2), complex((fx + 1j * fy) / 2)


def wirtinger_exact(m: RadialMap, z) -> tuple[complex, complex]:
    w, r = _polar(m, as_point(z))
    rho, rhop = float(m.rho(r)), float(m.rho_prime(r))
    f_z = 0.5 * (rhop + rho / r)
    f_zbar = 0.5 * (rhop - rho / r) * (w / np.conj(w))
    return complex(f_z), complex(f_zbar)


def beltrami_residual(m: RadialMap, mu, sample: Sequence[complex], h: float = 1e-5) -> float:
    """``max |f_zbar - mu(z) f_z|`` over the sample points, derivatives by central differences."""
    worst = 0.0
    for z in sample:
        f_z, f_zbar = wirtinger_fd(m, z, h)
        mz = complex(np.asarray(mu(np.asarray([z], dtype=complex))).ravel()[0]) if callable(mu) else complex(mu)
        worst = max(worst, abs(f_zbar - mz * f_z))
    return worst


def sample_points(region: Annulus, n: int, seed: int = 0, avoid: Sequence[float] = (),
                  margin: float = 0.0) -> np.ndarray:
    """``n`` area-uniform pseudo-random points of an annulus, keeping ``margin`` away from the radii in ``avoid``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        u = rng.uniform(region.r_inner ** 2, region.r_outer ** 2)
        r = math.sqrt(u)
        t = rng.uniform(0.0, 2 * math.pi)
        if any(abs(r - b) < margin for b in avoid):
            continue
        out.append(region.center + r * complex(math.cos(t), math.sin(t)))
    return np.array(out)


def identity_map(center=0j) -> RadialMap:
    prof = RadialProfile(lambda r: np.asarray(r, dtype=float) * 1.0,
                         lambda r: np.ones_like(np.asarray(r, dtype=float)),
                         name="identity", essential_dilatation=1.0)
    return RadialMap(prof, center)


def power_map(K: float, center=0j) -> RadialMap:
    """``rho(r) = r**(1/K)``: constant dilatation ``K``."""
    K = float(K)
    if not (math.isfinite(K) and K >= 1):
        raise ValueError(f"power map needs a finite K >= 1, got {K!r}")
    if K == 1:
        return identity_map(center)
    a = 1.0 / K

    def rho(r):
        return np.power(np.asarray(r, dtype=float), a)

    def rho_prime(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return a * np.power(r, a - 1.0)

    return RadialMap(RadialProfile(rho, rho_prime, name=f"power:{K:g}", essential_dilatation=K), center)


def log_map(center=0j) -> RadialMap:
    """Identity inside the unit disk, ``rho(r) = 1 + log r`` outside.

    Dilatation is ``1`` for ``r < 1`` and ``1 + log r`` for ``r >= 1``, so it is
    unbounded but has bounded mean oscillation at infinity. ``r = 1`` is a kink.
    """

    def rho(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= 1.0, r, 1.0 + np.log(np.maximum(r, 1.0)))

    def rho_prime(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < 1.0, 1.0, 1.0 / np.maximum(r, 1.0))

    return RadialMap(RadialProfile(rho, rho_prime, breakpoints=(1.0,), name="log"), center)


def check_monotone(profile: RadialProfile, r_max: float, n: int = 4096) -> bool:
    """``rho`` strictly increasing on a dense log grid of ``(0, r_max]``."""
    r = np.concatenate([[0.0], np.geomspace(r_max * 1e-6, r_max, n)])
    v = profile.rho(r)
    return bool(np.all(np.isfinite(v)) and np.all(np.diff(v) > 0))


def load_profile_table(path, center=0j) -> RadialMap:
    """Radial map from a CSV table with columns ``r, rho, rho_prime``.

    Between rows the profile is the cubic Hermite interpolant of the given
    values and slopes. Outside the table it continues as ``c * r**s`` with
    ``s = r rho'/rho`` matched at the end rows, i.e. with the end rows'
    dilatation held constant. Rows must have ``r > 0``, except an optional
    ``(0, 0, *)`` row which is ignored.
    """
    path = os.fspath(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"r", "rho", "rho_prime"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: profile table lacks column(s) {sorted(missing)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append((float(row["r"]), float(row["rho"]), float(row["rho_prime"])))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric entry") from exc
    data = np.array([t for t in rows if t[0] != 0.0])
    if len(data) < 2:
        raise ValueError(f"{path}: need at least two rows with r > 0")
    r, rho, drho = data.T
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: non-finite entries")
    if r[0] <= 0 or np.any(np.diff(r) <= 0):
        raise ValueError(f"{path}: r must be positive and strictly increasing")
    if np.any(rho <= 0) or np.any(np.diff(rho) <= 0) or np.any(drho <= 0):
        raise ValueError(f"{path}: rho must be positive and strictly increasing with rho_prime > 0")
    spline = CubicHermiteSpline(r, rho, drho, extrapolate=False)
    dspline = spline.derivative()
    s_lo, s_hi = r[0] * drho[0] / rho[0], r[-1] * drho[-1] / rho[-1]

    def rho_f(x):
        x = np.asarray(x, dtype=float)
        lo = rho[0] * np.power(np.maximum(x, 0.0) / r[0], s_lo)
        hi = rho[-1] * np.power(np.maximum(x, r[-1]) / r[-1], s_hi)
        mid = spline(np.clip(x, r[0], r[-1]))
        return np.where(x < r[0], lo, np.where(x > r[-1], hi, mid))

    def rho_prime_f(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lo = s_lo * rho[0] / r[0] * np.power(np.maximum(x, 0.0) / r[0], s_lo - 1.0)
        hi = s_hi * rho[-1] / r[-1] * np.power(np.maximum(x, r[-1]) / r[-1], s_hi - 1.0)
        mid = dspline(np.clip(x, r[0], r[-1]))
        return np.where(x < r[0], lo, np.where(x > r[-1], hi, mid))

    name = os.path.splitext(os.path.basename(path))[0]
    prof = RadialProfile(rho_f, rho_prime_f, breakpoints=tuple(r), name=name)
    if not check_monotone(prof, 4 * r[-1]):
        raise ValueError(f"{path}: interpolated profile is not strictly increasing")
    return RadialMap(prof, center)


def fixture(name: str, center=0j) -> RadialMap:
    """Map by name: ``identity``, ``power:K``, ``log``, or a path to a profile table."""
    key = name.strip()
    if key == "identity":
        return identity_map(center)
    if key == "log":
        return log_map(center)
    if key.startswith("power:"):
        try:
            K = float(key.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad power fixture {name!r}; expected power:K") from None
        return power_map(K, center)
    if os.path.exists(key):
        return load_profile_table(key, center)
    raise ValueError(f"unknown fixture {name!r}; expected identity, power:K, log or a table path")
