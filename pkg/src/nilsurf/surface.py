"""Surface assembly from integrated frames (the immersion formula).

Given the frame triple (Psi, dPsi/dt, d2Psi/dt2) produced by the frame
module, the surface in the ambient matrix model is assembled in two
stages, following the Sym-Bobenko recipe adapted to the Heisenberg group:

  1. the auxiliary map
         fhat = -2 Psi_t Psi^-1 + 2 Psi S Psi^-1,       S = DIAG_IMAG,
     whose derivative in the family parameter t is obtained by the product
     rule (no extra integration needed);

  2. the immersion matrix
         f = -1/2 diag(S d(fhat)/dt) + offdiag(fhat),

i.e. the horizontal part is read directly from fhat while the vertical
(diagonal) part comes from the t-derivative.  In the matrix model the
point coordinates appear as

    x1 + i x2 = f[0, 1],    x3 = Re f[0, 0],

and fhat itself stores a companion height Im fhat[0, 0] whose z-derivative
reproduces the vertical frame coefficient of f_z — one of the cross-checks
the residual suite exercises.

At the base point z = 0 the triple is (identity, 0, 0) exactly, hence
fhat(0) = 2 S and f(0) = 0: every generated surface passes through the
origin with no roundoff.
"""

from dataclasses import dataclass

import numpy as np

from . import mat2
from .errors import ShapeViolation
from .frame import integrate_grid


def fhat_from_frame(psi, psi_t):
    """Auxiliary matrix map fhat = -2 psi_t psi^-1 + 2 psi S psi^-1."""
    pinv = mat2.inv(psi)
    return -2.0 * (psi_t @ pinv) + 2.0 * (psi @ mat2.DIAG_IMAG @ pinv)


def dfhat_dt_from_frame(psi, psi_t, psi_tt):
    """t-derivative of fhat by the product rule on its defining formula."""
    pinv = mat2.inv(psi)
    a = psi_t @ pinv
    return (
        -2.0 * (psi_tt @ pinv)
        + 2.0 * (a @ a)
        + 2.0 * (psi_t @ mat2.DIAG_IMAG @ pinv)
        - 2.0 * (psi @ mat2.DIAG_IMAG @ pinv @ a)
    )


def ft_from_fhat(fhat, dfhat_dt):
    """Immersion matrix from fhat and its t-derivative.

    Diagonal part: -1/2 of the diagonal of S @ dfhat_dt (the vertical
    coordinate); off-diagonal part: copied from fhat (the horizontal
    coordinates).
    """
    sd = mat2.DIAG_IMAG @ dfhat_dt
    return -0.5 * mat2.diagonal_part(sd) + mat2.offdiagonal_part(fhat)


@dataclass
class SurfaceGrid:
    """A generated surface sampled over a rectangular parameter grid.

    Attributes:
      x, y        parameter-grid axes (1-D)
      t           family parameter
      F           horizontal coordinate x1 + i x2, shape (len(y), len(x))
      height      vertical coordinate x3 (real, same shape)
      aux_height  companion height Im fhat[0, 0] (real, same shape)
      fhat        auxiliary matrix field, shape (ny, nx, 2, 2)
      det_deviation    max |det psi - 1| of the generating frames
      shape_deviation  worst deviation of the immersion matrices from the
                       point-model shape (fhat deviation measured against
                       its own shape class, which has imaginary diagonal)
    """

    x: np.ndarray
    y: np.ndarray
    t: float
    F: np.ndarray
    height: np.ndarray
    aux_height: np.ndarray = None
    fhat: np.ndarray = None
    det_deviation: float = 0.0
    shape_deviation: float = 0.0
    substeps: int = 1

    @property
    def z_nodes(self):
        return self.x[None, :] + 1j * self.y[:, None]

    @property
    def spacing(self):
        return float(self.x[1] - self.x[0]), float(self.y[1] - self.y[0])

    def coords(self):
        """Point coordinates as a real array of shape (ny, nx, 3)."""
        out = np.empty(self.F.shape + (3,), dtype=float)
        out[..., 0] = self.F.real
        out[..., 1] = self.F.imag
        out[..., 2] = self.height
        return out


def _fhat_shape_deviation(fhat):
    """Deviation of fhat from its model shape.

    fhat matrices carry a purely imaginary, trace-free diagonal and
    conjugate off-diagonal entries: [[i s, w], [conj(w), -i s]] with s
    real.  Measures the max of |Re fhat11|, |fhat11 + fhat22| and
    |fhat21 - conj(fhat12)|.
    """
    d1 = np.abs(fhat[..., 0, 0].real)
    d2 = np.abs(fhat[..., 0, 0] + fhat[..., 1, 1])
    d3 = np.abs(fhat[..., 1, 0] - np.conj(fhat[..., 0, 1]))
    return np.maximum(np.maximum(d1, d2), d3)


def surface_from_frame(frame_field, shape_tol=1e-6):
    """Assemble a SurfaceGrid from an integrated FrameField.

    Verifies that both matrix fields stay within shape_tol of their model
    shapes (raising ShapeViolation otherwise, via the coordinate
    extraction) before reading off coordinates.
    """
    fhat = fhat_from_frame(frame_field.psi, frame_field.psi_t)
    dfh = dfhat_dt_from_frame(
        frame_field.psi, frame_field.psi_t, frame_field.psi_tt
    )
    ft = ft_from_fhat(fhat, dfh)
    fhat_dev = float(np.max(_fhat_shape_deviation(fhat)))
    if fhat_dev > shape_tol:
        raise ShapeViolation(
            f"auxiliary matrix field deviates from its model shape by "
            f"{fhat_dev:.3e} (tolerance {shape_tol:.1e})"
        )
    coords = mat2.matrix_to_point(ft, tol=shape_tol)
    shape_dev = max(
        fhat_dev,
        float(np.max(mat2.matrix_shape_deviation(ft))),
    )
    return SurfaceGrid(
        x=frame_field.x,
        y=frame_field.y,
        t=frame_field.t,
        F=coords[..., 0] + 1j * coords[..., 1],
        height=coords[..., 2],
        aux_height=fhat[..., 0, 0].imag.copy(),
        fhat=fhat,
        det_deviation=frame_field.det_deviation(),
        shape_deviation=shape_dev,
    )


def generate_surface(
    potential, x, y, t, substeps=1, shape_tol=1e-6, check_flatness=True
):
    """Integrate frames and assemble the surface at one parameter value."""
    field = integrate_grid(
        potential, x, y, t, substeps=substeps, check_flatness=check_flatness
    )
    surf = surface_from_frame(field, shape_tol=shape_tol)
    surf.substeps = substeps
    return surf


def sweep_family(potential, x, y, t_values, substeps=1, shape_tol=1e-6):
    """Generate the associated family at each parameter in t_values.

    All members share the potential and grid; each is an independent
    integration.  Returns a list of SurfaceGrid in the given order.
    """
    surfaces = []
    check = True
    for t in t_values:
        surfaces.append(
            generate_surface(
                potential,
                x,
                y,
                t,
                substeps=substeps,
                shape_tol=shape_tol,
                check_flatness=check,
            )
        )
        check = False  # admissibility is t-independent; gate once
    return surfaces
