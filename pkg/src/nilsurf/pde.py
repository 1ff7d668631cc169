"""Newton solver for the integrability equation in u = log rho0.

Admissible densities satisfy the elliptic equation

    Laplacian(u)/4 - exp(u)/8 + 2|Q0|^2 exp(-u) = 0

on a rectangle, here discretized with the standard 5-point Laplacian on a
uniform grid with square cells and Dirichlet boundary values in u.  The
substitution u = log rho0 makes positivity of the recovered density
structural and the equation's zeroth-order part monotone in u, so damped
Newton iteration converges globally for the boundary data of interest.

Each Newton step solves the symmetric positive definite system

    (-Laplacian/4 + diag(exp(u)/8 + 2|Q0|^2 exp(-u))) delta = residual

by conjugate gradients, followed by a step-halving line search on the
max-norm of the nonlinear residual.  The initial guess is the discrete
harmonic extension of the boundary values (one linear solve), which puts
the iterate in the Newton basin for all tested data.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .errors import DomainError, LinearSolveFailure, MaxIterExceeded

CG_RTOL = 1e-12
CG_MAXITER = 40000
MIN_LINESEARCH_STEP = 1e-12


@dataclass
class SolveResult:
    """Converged solve of the integrability equation.

    Attributes:
      x, y             grid axes (1-D, uniform, square cells)
      u                solved field log rho0, shape (len(y), len(x))
      residual_field   discrete residual of the final iterate (same shape)
      residual_history max-norm residual after each Newton step, starting
                       with the harmonic-extension initial guess
      newton_iterations  number of Newton updates taken
      cg_iterations    conjugate-gradient iteration counts, one per linear
                       solve (initial guess first)
    """

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    residual_field: np.ndarray
    residual_history: list = field(default_factory=list)
    newton_iterations: int = 0
    cg_iterations: list = field(default_factory=list)

    @property
    def final_residual(self):
        return float(np.max(np.abs(self.residual_field)))

    @property
    def spacing(self):
        return float(self.x[1] - self.x[0])


def liouville_exact(z):
    """Closed-form density 16/(1-|z|^2)^2 on the unit disk.

    Raises DomainError outside |z| < 1.  Used as the regression target for
    the solver: with Q0 = 0 and boundary data sampled from this density the
    solve must reproduce it to discretization accuracy.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("liouville density only defined on |z| < 1")
    return 16.0 / (1.0 - np.abs(z) ** 2) ** 2


def _check_axes(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3 or y.size < 3:
        raise DomainError("solver grid needs at least 3 nodes per axis")
    hx = np.diff(x)
    hy = np.diff(y)
    h = hx[0]
    if not (
        np.allclose(hx, h, rtol=1e-12, atol=0)
        and np.allclose(hy, h, rtol=1e-12, atol=0)
    ):
        raise DomainError("solver grid must be uniform with square cells")
    return x, y, float(h)


def pde_residual(u, q0_abs_sq, h):
    """Discrete residual field of the integrability equation.

    Interior nodes carry Laplacian(u)/4 - exp(u)/8 + 2|Q0|^2 exp(-u) with
    the 5-point Laplacian at spacing h; boundary nodes are zero (Dirichlet
    rows are satisfied identically).
    """
    u = np.asarray(u, dtype=float)
    r = np.zeros_like(u)
    lap = (
        u[1:-1, 2:]
        + u[1:-1, :-2]
        + u[2:, 1:-1]
        + u[:-2, 1:-1]
        - 4.0 * u[1:-1, 1:-1]
    ) / h**2
    ui = u[1:-1, 1:-1]
    r[1:-1, 1:-1] = lap / 4.0 - np.exp(ui) / 8.0 + 2.0 * q0_abs_sq[1:-1, 1:-1] * np.exp(-ui)
    return r


def _neg_quarter_laplacian(nx, ny, h):
    """Sparse matrix of -Laplacian/4 on interior nodes, Dirichlet boundary."""
    n, m = nx - 2, ny - 2
    ex = np.ones(n)
    ey = np.ones(m)
    tx = sp.diags([-ex[:-1], 2.0 * ex, -ex[:-1]], [-1, 0, 1], (n, n))
    ty = sp.diags([-ey[:-1], 2.0 * ey, -ey[:-1]], [-1, 0, 1], (m, m))
    return ((sp.kron(sp.eye(m), tx) + sp.kron(ty, sp.eye(n))) / (4.0 * h * h)).tocsr()


def _cg_solve(matrix, rhs, context):
    sol, info = cg(matrix, rhs, rtol=CG_RTOL, atol=0.0, maxiter=CG_MAXITER)
    if info != 0:
        raise LinearSolveFailure(
            f"conjugate gradients failed during {context} (info={info})"
        )
    return sol


def _boundary_rhs(bc, h):
    """Right-hand side coupling Dirichlet edge values into -Laplacian/4."""
    ny, nx = bc.shape
    rhs = np.zeros((ny - 2, nx - 2))
    s = 4.0 * h * h
    rhs[:, 0] += bc[1:-1, 0] / s
    rhs[:, -1] += bc[1:-1, -1] / s
    rhs[0, :] += bc[0, 1:-1] / s
    rhs[-1, :] += bc[-1, 1:-1] / s
    return rhs


def harmonic_extension(bc, h):
    """Discrete harmonic interior fill of the boundary values in bc.

    bc is a full (ny, nx) array whose edge rows/columns hold the Dirichlet
    data; interior entries are ignored.  Returns a full field agreeing with
    bc on the boundary and discretely harmonic inside.
    """
    bc = np.asarray(bc, dtype=float)
    ny, nx = bc.shape
    a0 = _neg_quarter_laplacian(nx, ny, h)
    u = bc.copy()
    u[1:-1, 1:-1] = _cg_solve(
        a0, _boundary_rhs(bc, h).ravel(), "harmonic extension"
    ).reshape(ny - 2, nx - 2)
    return u


def newton_solve(q0_values, bc, x, y, tol=1e-10, max_iter=50):
    """Solve the integrability equation for u = log rho0.

    Arguments:
      q0_values  complex Q0 samples on the full grid, shape (ny, nx)
      bc         Dirichlet data for u: scalar or full (ny, nx) array whose
                 edges are used (interior ignored)
      x, y       uniform axes with square cells
      tol        convergence threshold on the residual max-norm
      max_iter   Newton iteration cap

    Returns a SolveResult.  Raises MaxIterExceeded when the iteration cap
    is hit or the line search stagnates, LinearSolveFailure when a
    conjugate-gradient solve does not converge.
    """
    x, y, h = _check_axes(x, y)
    nx, ny = x.size, y.size
    q0_values = np.asarray(q0_values)
    if q0_values.shape != (ny, nx):
        raise DomainError(
            f"Q0 sample shape {q0_values.shape} does not match grid ({ny}, {nx})"
        )
    q2 = np.abs(q0_values) ** 2
    if np.isscalar(bc) or np.ndim(bc) == 0:
        bc = np.full((ny, nx), float(bc))
    else:
        bc = np.asarray(bc, dtype=float)
        if bc.shape != (ny, nx):
            raise DomainError(
                f"boundary data shape {bc.shape} does not match grid ({ny}, {nx})"
            )

    cg_counter = []

    def counting_cg(matrix, rhs, context):
        calls = [0]

        def cb(_):
            calls[0] += 1

        sol, info = cg(
            matrix, rhs, rtol=CG_RTOL, atol=0.0, maxiter=CG_MAXITER, callback=cb
        )
        if info != 0:
            raise LinearSolveFailure(
                f"conjugate gradients failed during {context} (info={info})"
            )
        cg_counter.append(calls[0])
        return sol

    a0 = _neg_quarter_laplacian(nx, ny, h)
    u = bc.copy()
    u[1:-1, 1:-1] = counting_cg(
        a0, _boundary_rhs(bc, h).ravel(), "harmonic extension"
    ).reshape(ny - 2, nx - 2)

    history = []
    for iteration in range(max_iter + 1):
        r = pde_residual(u, q2, h)
        rnorm = float(np.max(np.abs(r)))
        history.append(rnorm)
        if rnorm <= tol:
            return SolveResult(
                x=x,
                y=y,
                u=u,
                residual_field=r,
                residual_history=history,
                newton_iterations=iteration,
                cg_iterations=cg_counter,
            )
        if iteration == max_iter:
            break
        ui = u[1:-1, 1:-1]
        c = np.exp(ui) / 8.0 + 2.0 * q2[1:-1, 1:-1] * np.exp(-ui)
        matrix = a0 + sp.diags(c.ravel())
        delta = counting_cg(
            matrix, r[1:-1, 1:-1].ravel(), f"newton step {iteration + 1}"
        ).reshape(ny - 2, nx - 2)
        step = 1.0
        while True:
            trial = u.copy()
            trial[1:-1, 1:-1] += step * delta
            if np.max(np.abs(pde_residual(trial, q2, h))) < rnorm:
                break
            step *= 0.5
            if step < MIN_LINESEARCH_STEP:
                raise MaxIterExceeded(
                    iterations=iteration,
                    residual=rnorm,
                    tol=tol,
                    message="line search stagnated; residual no longer decreasing",
                )
        u = trial

    raise MaxIterExceeded(iterations=max_iter, residual=history[-1], tol=tol)
