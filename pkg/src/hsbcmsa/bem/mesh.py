"""Triangulated surfaces, OFF input/output and point-charge files."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "MeshFormatError",
    "SurfaceMesh",
    "ChargeSet",
    "icosphere",
    "read_off",
    "write_off",
    "read_charges",
    "write_charges",
]

log = logging.getLogger(__name__)


class MeshFormatError(ValueError):
    """Malformed mesh or charge file."""


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    """Flat-triangle surface. Vertices in angstrom, faces oriented outward."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        t = np.ascontiguousarray(self.triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"vertices must have shape (n, 3), got {v.shape}")
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValueError(f"triangles must have shape (m, 3), got {t.shape}")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise ValueError("triangle index out of range")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        if np.any(self.areas <= 0):
            raise ValueError("mesh has degenerate (zero-area) triangles")

    def __len__(self) -> int:
        return len(self.triangles)

    @cached_property
    def _corners(self) -> np.ndarray:
        return self.vertices[self.triangles]

    @cached_property
    def _cross(self) -> np.ndarray:
        a, b, c = self._corners[:, 0], self._corners[:, 1], self._corners[:, 2]
        return np.cross(b - a, c - a)

    @cached_property
    def areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self._cross, axis=1)

    @cached_property
    def normals(self) -> np.ndarray:
        return self._cross / (2.0 * self.areas[:, None])

    @cached_property
    def centroids(self) -> np.ndarray:
        return self._corners.mean(axis=1)

    @cached_property
    def diameters(self) -> np.ndarray:
        """Longest edge of each panel."""
        c = self._corners
        edges = np.stack([c[:, 1] - c[:, 0], c[:, 2] - c[:, 1], c[:, 0] - c[:, 2]], axis=1)
        return np.linalg.norm(edges, axis=2).max(axis=1)

    @property
    def total_area(self) -> float:
        return float(self.areas.sum())

    def closure_defect(self) -> float:
        """|sum of area-weighted normals| / total area; zero for closed meshes."""
        return float(np.linalg.norm((self.areas[:, None] * self.normals).sum(0)) / self.total_area)

    def is_closed(self, tol: float = 1e-8) -> bool:
        return self.closure_defect() <= tol

    def signed_volume(self) -> float:
        c = self._corners
        return float(np.einsum("ij,ij->i", c[:, 0], np.cross(c[:, 1], c[:, 2])).sum() / 6.0)

    def winding_number(self, points) -> np.ndarray:
        """Solid-angle winding number of each point (1 inside, 0 outside)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty(len(pts))
        c = self._corners
        for i, p in enumerate(pts):
            a, b, d = c[:, 0] - p, c[:, 1] - p, c[:, 2] - p
            la, lb, ld = (np.linalg.norm(x, axis=1) for x in (a, b, d))
            num = np.einsum("ij,ij->i", a, np.cross(b, d))
            den = (la * lb * ld + np.einsum("ij,ij->i", a, b) * ld
                   + np.einsum("ij,ij->i", a, d) * lb + np.einsum("ij,ij->i", b, d) * la)
            out[i] = 2.0 * np.arctan2(num, den).sum() / (4.0 * np.pi)
        return out

    def contains(self, points) -> np.ndarray:
        return self.winding_number(points) > 0.5

    def scaled(self, factor: float) -> "SurfaceMesh":
        return SurfaceMesh(self.vertices * factor, self.triangles)


_ICO_FACES = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
])


def icosphere(R: float, subdivisions: int, center=(0.0, 0.0, 0.0)) -> SurfaceMesh:
    """Sphere of radius R from a recursively subdivided icosahedron.

    Each subdivision splits every triangle in four and projects the new
    vertices onto the sphere: 20 * 4**subdivisions panels.
    """
    if not 0 <= subdivisions <= 7:
        raise ValueError(f"subdivisions must be in [0, 7], got {subdivisions}")
    if not R > 0:
        raise ValueError(f"radius must be positive, got {R}")
    t = (1.0 + 5.0**0.5) / 2.0
    verts = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    faces = _ICO_FACES.copy()
    for _ in range(subdivisions):
        edges = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
        edges.sort(axis=1)
        uniq, inverse = np.unique(edges, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        mids = verts[uniq[:, 0]] + verts[uniq[:, 1]]
        mids /= np.linalg.norm(mids, axis=1)[:, None]
        mid_idx = len(verts) + inverse.reshape(3, -1).T  # columns: ab, bc, ca
        verts = np.concatenate([verts, mids])
        a, b, c = faces.T
        ab, bc, ca = mid_idx.T
        faces = np.concatenate([
            np.stack([a, ab, ca], 1),
            np.stack([b, bc, ab], 1),
            np.stack([c, ca, bc], 1),
            np.stack([ab, bc, ca], 1),
        ])
    return SurfaceMesh(verts * R + np.asarray(center, dtype=float), faces)


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def read_off(path: str | Path) -> SurfaceMesh:
    """Read an ASCII OFF file of triangles.

    A mesh with negative signed volume is flipped so that normals point out.
    """
    path = Path(path)
    lines = list(_data_lines(path.read_text(encoding="utf-8")))
    if not lines or not lines[0][1].startswith("OFF"):
        raise MeshFormatError(f"{path}: missing OFF header")
    head = lines[0][1][3:].split()
    body = lines[1:]
    if not head:
        if not body:
            raise MeshFormatError(f"{path}: missing element counts")
        (lineno, text), body = body[0], body[1:]
        head = text.split()
    try:
        nv, nf = int(head[0]), int(head[1])
    except (ValueError, IndexError):
        raise MeshFormatError(f"{path}: bad element counts {head!r}") from None
    if len(body) < nv + nf:
        raise MeshFormatError(
            f"{path}: expected {nv} vertices and {nf} faces, file has {len(body)} data lines"
        )
    verts = np.empty((nv, 3))
    for i in range(nv):
        lineno, text = body[i]
        parts = text.split()
        try:
            verts[i] = [float(x) for x in parts[:3]]
        except ValueError:
            raise MeshFormatError(f"{path}: line {lineno}: bad vertex {text!r}") from None
        if len(parts) < 3:
            raise MeshFormatError(f"{path}: line {lineno}: vertex needs 3 coordinates")
    faces = np.empty((nf, 3), dtype=np.int64)
    for i in range(nf):
        lineno, text = body[nv + i]
        try:
            parts = [int(x) for x in text.split()]
        except ValueError:
            raise MeshFormatError(f"{path}: line {lineno}: bad face {text!r}") from None
        if len(parts) < 4 or parts[0] != 3:
            raise MeshFormatError(f"{path}: line {lineno}: only triangles are supported")
        if min(parts[1:4]) < 0 or max(parts[1:4]) >= nv:
            raise MeshFormatError(f"{path}: line {lineno}: vertex index out of range")
        faces[i] = parts[1:4]
    try:
        mesh = SurfaceMesh(verts, faces)
    except ValueError as exc:
        raise MeshFormatError(f"{path}: {exc}") from exc
    if mesh.signed_volume() < 0:
        log.warning("%s: faces oriented inward; flipping", path)
        mesh = SurfaceMesh(verts, faces[:, ::-1])
    return mesh


def write_off(mesh: SurfaceMesh, path: str | Path) -> None:
    lines = ["OFF", f"{len(mesh.vertices)} {len(mesh.triangles)} 0"]
    lines += [" ".join(repr(float(x)) for x in v) for v in mesh.vertices]
    lines += ["3 " + " ".join(str(int(i)) for i in f) for f in mesh.triangles]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True, eq=False)
class ChargeSet:
    """Point charges: positions in angstrom, charges in units of e0."""

    positions: np.ndarray
    charges: np.ndarray = field(default=None)

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        q = np.atleast_1d(np.asarray(self.charges, dtype=float))
        if pos.shape[1] != 3 or len(pos) != len(q):
            raise ValueError("need one (x, y, z) position per charge")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "charges", q)

    def __len__(self) -> int:
        return len(self.charges)

    def scaled_charges(self, factor: float) -> "ChargeSet":
        return ChargeSet(self.positions, self.charges * factor)


def read_charges(path: str | Path) -> ChargeSet:
    """Read ``x y z q`` lines (angstrom, e0). ``#`` starts a comment."""
    path = Path(path)
    rows = []
    for lineno, text in _data_lines(path.read_text(encoding="utf-8")):
        parts = text.replace(",", " ").split()
        if len(parts) != 4:
            raise MeshFormatError(f"{path}: line {lineno}: expected 'x y z q'")
        try:
            rows.append([float(x) for x in parts])
        except ValueError:
            raise MeshFormatError(f"{path}: line {lineno}: bad number in {text!r}") from None
    if not rows:
        raise MeshFormatError(f"{path}: no charges")
    arr = np.array(rows)
    return ChargeSet(arr[:, :3], arr[:, 3])


def write_charges(charges: ChargeSet, path: str | Path) -> None:
    lines = [" ".join(repr(float(x)) for x in (*p, q))
             for p, q in zip(charges.positions, charges.charges)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
