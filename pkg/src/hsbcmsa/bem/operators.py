"""Collocation operators for piecewise-constant charge on flat triangles.

Kernels use G(r, r') = 1 / (4 pi |r - r'|). ``K`` is the normal electric
field operator at panel centroids,

    (K sigma)_j = sum_k sigma_k int_k (c_j - r') . n_j / (4 pi |c_j - r'|^3) dA',

so that constant sigma on a sphere is an eigenfunction with eigenvalue 1/2.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .mesh import ChargeSet, SurfaceMesh

__all__ = [
    "triangle_rule",
    "assemble_K",
    "source_normal_derivative",
    "potential_matrix",
]

NEAR_FACTOR = 2.0
_BLOCK = 256


@lru_cache(maxsize=None)
def triangle_rule(order: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed Gauss-Legendre rule on the reference triangle.

    Returns barycentric coordinates (order**2, 3) and weights summing to 1.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    u = np.repeat(x, order)
    v = np.tile(x, order) * (1.0 - u)
    wt = 2.0 * np.repeat(w, order) * np.tile(w, order) * (1.0 - u)
    bary = np.stack([1.0 - u - v, u, v], axis=1)
    bary.setflags(write=False)
    wt.setflags(write=False)
    return bary, wt


def _panel_points(mesh: SurfaceMesh, order: int) -> tuple[np.ndarray, np.ndarray]:
    bary, wt = triangle_rule(order)
    return np.einsum("qi,kid->kqd", bary, mesh.vertices[mesh.triangles]), wt


def assemble_K(mesh: SurfaceMesh, near_factor: float = NEAR_FACTOR,
               self_term: str = "gauss", order: int = 4) -> np.ndarray:
    """Dense K matrix, rows are targets and columns are source panels.

    Source panels closer than ``near_factor`` times their diameter to the
    target centroid use the ``order**2``-point rule, the rest a one-point
    centroid rule. The field of a flat panel at its own centroid is in-plane,
    so the self term is zero for a flat surface. With ``self_term="gauss"``
    (default) the diagonal instead restores the discrete flux identity
    sum_j A_j K_jk = A_k / 2, the exact statement that half the flux of a
    surface charge leaves through a closed surface; this supplies the
    curvature contribution the flat panels miss and makes the discrete
    system satisfy Gauss's law.
    """
    if self_term not in ("gauss", "zero"):
        raise ValueError(f"unknown self_term {self_term!r}")
    C, A, N = mesh.centroids, mesh.areas, mesh.normals
    n = len(mesh)
    diam = mesh.diameters
    pts, wt = _panel_points(mesh, order)
    K = np.empty((n, n))
    for start in range(0, n, _BLOCK):
        rows = slice(start, min(start + _BLOCK, n))
        d = C[rows, None, :] - C[None, :, :]
        r = np.linalg.norm(d, axis=2)
        idx = np.arange(rows.start, rows.stop)
        r[idx - start, idx] = 1.0
        blk = np.einsum("jkd,jd->jk", d, N[rows]) / (4.0 * np.pi * r**3) * A[None, :]
        blk[idx - start, idx] = 0.0
        near = r < near_factor * diam[None, :]
        near[idx - start, idx] = False
        j, k = np.nonzero(near)
        if len(j):
            dd = C[j + start][:, None, :] - pts[k]
            rr = np.linalg.norm(dd, axis=2)
            kern = np.einsum("pqd,pd->pq", dd, N[j + start]) / (4.0 * np.pi * rr**3)
            blk[j, k] = (kern * wt).sum(axis=1) * A[k]
        K[rows] = blk
    if self_term == "gauss":
        K[np.diag_indices(n)] = 0.5 - (A[:, None] * K).sum(axis=0) / A
    return K


def source_normal_derivative(mesh: SurfaceMesh, charges: ChargeSet) -> np.ndarray:
    """sum_i q_i dG/dn(c_j; r_i) at every panel centroid."""
    d = mesh.centroids[:, None, :] - charges.positions[None, :, :]
    r = np.linalg.norm(d, axis=2)
    dn = -np.einsum("jid,jd->ji", d, mesh.normals) / (4.0 * np.pi * r**3)
    return dn @ charges.charges


def potential_matrix(mesh: SurfaceMesh, points, near_factor: float = NEAR_FACTOR,
                     order: int = 4) -> np.ndarray:
    """P[i, k] = int_k G(x_i, r') dA' for evaluation points x_i off the surface."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    C, A = mesh.centroids, mesh.areas
    d = np.linalg.norm(x[:, None, :] - C[None, :, :], axis=2)
    P = A[None, :] / (4.0 * np.pi * d)
    near = d < near_factor * mesh.diameters[None, :]
    i, k = np.nonzero(near)
    if len(i):
        pts, wt = _panel_points(mesh, order)
        rr = np.linalg.norm(x[i][:, None, :] - pts[k], axis=2)
        P[i, k] = (wt / (4.0 * np.pi * rr)).sum(axis=1) * A[k]
    return P
