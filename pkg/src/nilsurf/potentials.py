"""Potential data (rho0, Q0) driving the zero-curvature system.

A potential pairs a holomorphic polynomial Q0 with a positive conformal
density rho0.  Admissible pairs satisfy the integrability condition

    (log rho0)_zz̄ = rho0/8 - 2|Q0|^2/rho0,        (Q0)_z̄ = 0,

which is exactly what makes the associated connection forms flat, hence
integrable to frames.  Three rho0 sources are supported:

  * constant  -- rho0 = c > 0 with closed-form derivatives;
  * liouville -- rho0 = 16/(1-|z|^2)^2 on the unit disk, the closed-form
                 solution of the Q0 = 0 specialization;
  * solved    -- a numerical solve of the integrability equation on a
                 rectangle (see the pde module), evaluated by bilinear
                 interpolation in u = log rho0.

Derivative convention, used throughout the package:

    d/dz = (d/dx - i d/dy)/2,   d/dz̄ = (d/dx + i d/dy)/2,
    d2/dz dz̄ = Laplacian/4.

Q0 is restricted to polynomials in z (degree <= 8), which guarantees exact
holomorphy and cheap evaluation at arbitrary integration sample points.
"""

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError, PotentialDataError

MAX_Q0_DEGREE = 8


def _as_coeffs(q0_coeffs):
    c = np.atleast_1d(np.asarray(q0_coeffs, dtype=complex))
    if c.ndim != 1:
        raise PotentialDataError("Q0 coefficients must be a flat sequence")
    if c.size > MAX_Q0_DEGREE + 1:
        raise PotentialDataError(
            f"Q0 degree {c.size - 1} exceeds the supported maximum "
            f"{MAX_Q0_DEGREE}"
        )
    if c.size == 0:
        c = np.zeros(1, dtype=complex)
    return c


class _ConstantSource:
    """rho0 = value everywhere."""

    name = "constant"
    analytic = True

    def __init__(self, value):
        value = float(value)
        if not (value > 0.0 and np.isfinite(value)):
            raise PotentialDataError(f"constant rho0 must be positive, got {value}")
        self.value = value

    def rho0(self, z):
        return np.full(np.shape(z), self.value, dtype=float)

    def dlog_dz(self, z):
        return np.zeros(np.shape(z), dtype=complex)

    def log_zzbar(self, z):
        return np.zeros(np.shape(z), dtype=float)

    def describe(self):
        return {"source": "constant", "value": self.value}


class _LiouvilleSource:
    """rho0 = 16/(1-|z|^2)^2 on |z| < 1 (closed-form Liouville solution)."""

    name = "liouville"
    analytic = True

    def _guard(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) >= 1.0):
            raise DomainError("liouville density only defined on |z| < 1")
        return z

    def rho0(self, z):
        z = self._guard(z)
        return 16.0 / (1.0 - np.abs(z) ** 2) ** 2

    def dlog_dz(self, z):
        z = self._guard(z)
        return 2.0 * np.conj(z) / (1.0 - np.abs(z) ** 2)

    def log_zzbar(self, z):
        z = self._guard(z)
        return 2.0 / (1.0 - np.abs(z) ** 2) ** 2

    def describe(self):
        return {"source": "liouville"}


class _SolvedSource:
    """rho0 = exp(u) with u solved on a rectangle and interpolated.

    Stores the solver axes, the u field, its first-derivative field
    (central differences inside, one-sided second-order at the edges), and
    the solver's final residual field.  Evaluation is bilinear in each
    stored field; working in u = log rho0 makes positivity structural, so
    the corrupted-solve check reduces to finiteness of the stored data.
    """

    name = "solved"
    analytic = False

    def __init__(self, x, y, u, residual_field=None):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.u = np.asarray(u, dtype=float)
        if self.u.shape != (self.y.size, self.x.size):
            raise PotentialDataError(
                f"solved grid shape {self.u.shape} does not match axes "
                f"({self.y.size}, {self.x.size})"
            )
        if not np.all(np.isfinite(self.u)):
            raise PotentialDataError("solved field contains non-finite values")
        hx = self.x[1] - self.x[0]
        hy = self.y[1] - self.y[0]
        uy, ux = np.gradient(self.u, hy, hx, edge_order=2)
        self._dlog = 0.5 * (ux - 1j * uy)
        if residual_field is None:
            residual_field = np.zeros_like(self.u)
        self.residual_field = np.asarray(residual_field, dtype=float)

    def _interp(self, field, z):
        z = np.asarray(z, dtype=complex)
        eps = 1e-12
        xr, yr = z.real, z.imag
        if (
            np.any(xr < self.x[0] - eps)
            or np.any(xr > self.x[-1] + eps)
            or np.any(yr < self.y[0] - eps)
            or np.any(yr > self.y[-1] + eps)
        ):
            raise DomainError("evaluation point outside the solved rectangle")
        hx = self.x[1] - self.x[0]
        hy = self.y[1] - self.y[0]
        fx = (xr - self.x[0]) / hx
        fy = (yr - self.y[0]) / hy
        ix = np.clip(np.floor(fx).astype(int), 0, self.x.size - 2)
        iy = np.clip(np.floor(fy).astype(int), 0, self.y.size - 2)
        tx = fx - ix
        ty = fy - iy
        v00 = field[iy, ix]
        v01 = field[iy, ix + 1]
        v10 = field[iy + 1, ix]
        v11 = field[iy + 1, ix + 1]
        return (1 - ty) * ((1 - tx) * v00 + tx * v01) + ty * (
            (1 - tx) * v10 + tx * v11
        )

    def rho0(self, z):
        return np.exp(self._interp(self.u, z)).real

    def dlog_dz(self, z):
        return self._interp(self._dlog, z)

    def nearest_residual(self, z):
        """Stored discrete solve residual at the nearest interior node."""
        z = np.asarray(z, dtype=complex)
        hx = self.x[1] - self.x[0]
        hy = self.y[1] - self.y[0]
        ix = np.clip(
            np.rint((z.real - self.x[0]) / hx).astype(int), 1, self.x.size - 2
        )
        iy = np.clip(
            np.rint((z.imag - self.y[0]) / hy).astype(int), 1, self.y.size - 2
        )
        return self.residual_field[iy, ix]

    def describe(self):
        return {
            "source": "solved",
            "nx": int(self.x.size),
            "ny": int(self.y.size),
            "max_residual": float(np.max(np.abs(self.residual_field))),
        }


class Potential:
    """Pair (rho0 source, Q0 polynomial) with derivative evaluation.

    Build instances through the classmethods `constant`, `liouville`, and
    `solved`.  All evaluators are vectorized over complex arrays z.
    """

    def __init__(self, source, q0_coeffs):
        self.source = source
        self.q0_coeffs = _as_coeffs(q0_coeffs)
        if source.name == "liouville" and np.any(self.q0_coeffs != 0):
            raise PotentialDataError(
                "the liouville closed form solves the Q0 = 0 equation; "
                "nonzero Q0 requires a solved source"
            )

    @classmethod
    def constant(cls, rho0_value, q0_coeffs=(0.25,)):
        return cls(_ConstantSource(rho0_value), q0_coeffs)

    @classmethod
    def liouville(cls):
        return cls(_LiouvilleSource(), (0.0,))

    @classmethod
    def solved(cls, solution, q0_coeffs):
        """Build from a pde.SolveResult (or anything with x, y, u fields)."""
        residual = getattr(solution, "residual_field", None)
        src = _SolvedSource(solution.x, solution.y, solution.u, residual)
        return cls(src, q0_coeffs)

    @property
    def analytic(self):
        """True when rho0 has closed-form values and derivatives."""
        return self.source.analytic

    def q0(self, z):
        """Value of the holomorphic polynomial Q0 at z."""
        z = np.asarray(z, dtype=complex)
        return np.asarray(npoly.polyval(z, self.q0_coeffs), dtype=complex)

    def rho0(self, z):
        """Value of rho0 at z (positive real)."""
        return self.source.rho0(z)

    def dlog_rho0_dz(self, z):
        """(log rho0)_z at z."""
        return self.source.dlog_dz(z)

    def integrability_residual(self, z):
        """Residual pair of the admissibility conditions at z.

        Returns (first, second) with
          first  = (log rho0)_zz̄ - rho0/8 + 2|Q0|^2/rho0,
          second = (Q0)_z̄,
        both identically zero for admissible data.  Q0 is polynomial in z,
        so the second component is exactly zero by construction.  For a
        solved source the first component reports the stored discrete solve
        residual at the nearest interior solver node, which is what the
        Newton solve actually certifies.
        """
        z = np.asarray(z, dtype=complex)
        second = np.zeros(z.shape, dtype=complex)
        if self.source.analytic:
            first = (
                self.source.log_zzbar(z)
                - self.rho0(z) / 8.0
                + 2.0 * np.abs(self.q0(z)) ** 2 / self.rho0(z)
            )
        else:
            first = self.source.nearest_residual(z)
        return np.asarray(first, dtype=complex), second

    def describe(self):
        """JSON-ready summary used by reports."""
        return {
            "rho0": self.source.describe(),
            "q0_coefficients": [[float(c.real), float(c.imag)] for c in self.q0_coeffs],
        }
