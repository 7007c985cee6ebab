"""Linear and HSBC/MSA boundary-integral solves for induced surface charge.

Linear problem:

    (I + eps_hat (-I/2 + K)) sigma = eps_hat sum_i q_i dG/dn

Nonlinear problem: the same with a pointwise term h(E_n) sigma added on the
left, h = alpha sqrt|E_n| and E_n = 4 pi (sum_i q_i dG/dn - K sigma). It is
solved by Picard iteration: freeze h, solve the linear system, update h.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator, gmres

from ..units import UnitSystem
from .mesh import ChargeSet, SurfaceMesh
from .operators import NEAR_FACTOR, assemble_K, potential_matrix, source_normal_derivative

__all__ = [
    "BemError",
    "PanelSystem",
    "Solution",
    "apply_K",
    "normal_field",
    "solve_linear",
    "solve_nonlinear",
    "reaction_energy",
]

log = logging.getLogger(__name__)

DIRECT_LIMIT = 4000


class BemError(RuntimeError):
    """Linear solver breakdown or outer-loop stagnation."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")
        self.iterations = iterations
        self.residual = residual


@dataclass(eq=False)
class PanelSystem:
    """Mesh, charges and dielectric data for one boundary-integral problem."""

    mesh: SurfaceMesh
    charges: ChargeSet
    eps_in: float = 1.0
    eps_out: float = 80.0
    alpha: float = 0.0
    units: UnitSystem | None = None
    near_factor: float = NEAR_FACTOR
    check_inside: bool = True
    sigma: np.ndarray | None = field(default=None, repr=False)
    E_n: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.eps_in < 1.0:
            raise ValueError(f"eps_in must be >= 1, got {self.eps_in}")
        if self.eps_out < self.eps_in:
            raise ValueError("need eps_out >= eps_in")
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if self.units is None:
            self.units = UnitSystem(eps_in=self.eps_in)
        elif self.units.eps_in != self.eps_in:
            raise ValueError("units.eps_in disagrees with eps_in")
        if self.check_inside and not np.all(self.mesh.contains(self.charges.positions)):
            raise ValueError("every charge must lie strictly inside the surface")
        self._K = None
        self._dGdn = None

    def __len__(self) -> int:
        return len(self.mesh)

    @property
    def eps_hat(self) -> float:
        return (self.eps_out - self.eps_in) / self.eps_out

    @property
    def K(self) -> np.ndarray:
        if self._K is None:
            self._K = assemble_K(self.mesh, self.near_factor)
        return self._K

    @property
    def dGdn(self) -> np.ndarray:
        """sum_i q_i dG/dn at panel centroids."""
        if self._dGdn is None:
            self._dGdn = source_normal_derivative(self.mesh, self.charges)
        return self._dGdn

    @property
    def rhs(self) -> np.ndarray:
        return self.eps_hat * self.dGdn

    def linear_matrix(self) -> np.ndarray:
        n = len(self)
        M = self.eps_hat * self.K
        M[np.diag_indices(n)] += 1.0 - 0.5 * self.eps_hat
        return M

    def with_charges(self, charges: ChargeSet) -> "PanelSystem":
        """Same mesh and operator, new charges (K is shared, not recomputed)."""
        other = PanelSystem(self.mesh, charges, self.eps_in, self.eps_out, self.alpha,
                            self.units, self.near_factor, self.check_inside)
        other._K = self._K
        return other


@dataclass(frozen=True)
class Solution:
    sigma: np.ndarray
    E_n: np.ndarray
    h: np.ndarray
    iterations: int
    residual: float
    inner_iterations: int = 0


def apply_K(system: PanelSystem, sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (len(system),):
        raise ValueError(f"sigma must have length {len(system)}")
    return system.K @ sigma


def normal_field(system: PanelSystem, sigma) -> np.ndarray:
    """Per-panel E_n, scaled so that a bare charge q gives q / r^2."""
    return 4.0 * np.pi * (system.dGdn - apply_K(system, sigma))


def _relative_residual(M, diag, sigma, b) -> float:
    r = M @ sigma + diag * sigma - b
    nb = np.linalg.norm(b)
    return float(np.linalg.norm(r) / nb) if nb > 0 else float(np.linalg.norm(r))


def _solve(M: np.ndarray, diag: np.ndarray, b: np.ndarray, method: str,
           tol: float, x0=None) -> tuple[np.ndarray, int]:
    n = len(b)
    if method == "auto":
        method = "direct" if n <= DIRECT_LIMIT else "gmres"
    if method == "direct":
        A = M.copy()
        A[np.diag_indices(n)] += diag
        return scipy.linalg.lu_solve(scipy.linalg.lu_factor(A, check_finite=False), b,
                                     check_finite=False), 1
    if method != "gmres":
        raise ValueError(f"unknown linear solver {method!r}")
    d = M.diagonal() + diag
    op = LinearOperator((n, n), matvec=lambda x: M @ x + diag * x, dtype=float)
    pre = LinearOperator((n, n), matvec=lambda x: x / d, dtype=float)
    count = [0]

    def cb(_):
        count[0] += 1

    x, info = gmres(op, b, x0=x0, rtol=tol, atol=0.0, restart=min(n, 200),
                    maxiter=max(50, n // 10), M=pre, callback=cb,
                    callback_type="pr_norm")
    if info != 0:
        raise BemError("GMRES did not converge", count[0], _relative_residual(M, diag, x, b))
    return x, count[0]


def solve_linear(system: PanelSystem, method: str = "auto", tol: float = 1e-10) -> Solution:
    """Solve the linear boundary-integral equation for sigma."""
    M = system.linear_matrix()
    b = system.rhs
    zero = np.zeros(len(system))
    if not np.any(b):
        sigma = zero.copy()
        it = 0
    else:
        sigma, it = _solve(M, zero, b, method, tol * 1e-2)
    res = _relative_residual(M, zero, sigma, b)
    if res > tol:
        raise BemError("linear solve missed its tolerance", it, res)
    E = normal_field(system, sigma)
    system.sigma, system.E_n = sigma, E
    return Solution(sigma, E, zero, 1, res, it)


def solve_nonlinear(system: PanelSystem, method: str = "auto", tol: float = 1e-8,
                    max_outer: int = 50, relax: float = 0.5) -> Solution:
    """Picard iteration for the HSBC/MSA boundary-integral equation.

    h is under-relaxed by ``relax`` once the residual stops decreasing.
    With alpha = 0 the result is the linear solution.
    """
    lin = solve_linear(system, method, tol=min(tol, 1e-10))
    if system.alpha == 0.0 or not np.any(system.rhs):
        return lin
    M = system.linear_matrix()
    b = system.rhs
    sigma = lin.sigma
    h = system.alpha * np.sqrt(np.abs(normal_field(system, sigma)))
    res_prev = np.inf
    damp = 1.0
    inner = lin.inner_iterations
    for outer in range(1, max_outer + 1):
        sigma, it = _solve(M, h, b, method, tol * 1e-3, x0=sigma)
        inner += it
        h_new = system.alpha * np.sqrt(np.abs(normal_field(system, sigma)))
        res = _relative_residual(M, h_new, sigma, b)
        log.debug("picard %d: residual %.3e", outer, res)
        if res <= tol:
            h = h_new
            break
        if res >= res_prev:
            damp = relax
        h = h + damp * (h_new - h)
        res_prev = res
    else:
        raise BemError("Picard iteration stagnated", max_outer, res)
    E = normal_field(system, sigma)
    system.sigma, system.E_n = sigma, E
    return Solution(sigma, E, h, outer, res, inner)


def reaction_energy(system: PanelSystem, sigma) -> float:
    """Linear-response solvation energy 1/2 sum_i q_i phi_reac(r_i), kJ/mol."""
    sigma = np.asarray(sigma, dtype=float)
    P = potential_matrix(system.mesh, system.charges.positions, system.near_factor)
    phi = P @ sigma
    return float(system.units.energy_per_potential * (system.charges.charges @ phi))
