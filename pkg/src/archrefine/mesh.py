"""Plain-text polygon meshes (Wavefront-style ``v``/``f`` records)."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray  # (n, 3) float
    faces: np.ndarray  # (m, k) int, 0-based

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def to_text(self, comments=()) -> str:
        lines = [f"# {c}" for c in comments]
        lines += [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in self.vertices]
        lines += ["f " + " ".join(str(int(i) + 1) for i in face) for face in self.faces]
        return "\n".join(lines) + "\n"

    def write(self, path, comments=()) -> Path:
        path = Path(path)
        path.write_text(self.to_text(comments), encoding="utf-8")
        return path


def parse_mesh(text: str) -> Mesh:
    """Read back the text produced by :meth:`Mesh.to_text`."""
    verts, faces = [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(p) for p in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(p) - 1 for p in parts[1:]])
    return Mesh(np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=int))


def grid_quads(nx: int, ny: int) -> np.ndarray:
    """Quad connectivity of an ``nx`` by ``ny`` vertex grid stored row-major in x."""
    idx = np.arange(nx * ny).reshape(ny, nx)
    a = idx[:-1, :-1].ravel()
    b = idx[:-1, 1:].ravel()
    c = idx[1:, 1:].ravel()
    d = idx[1:, :-1].ravel()
    return np.stack([a, b, c, d], axis=1)
