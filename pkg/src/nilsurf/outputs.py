"""File formats: OBJ-style meshes, CSV surface/solution tables, JSON reports.

All writers produce deterministic, platform-independent bytes: fixed "\n"
newlines, explicit float formatting, sorted JSON keys, no timestamps.
Identical inputs give bitwise-identical files, which the test suite pins.

Formats:
  * Mesh: plain OBJ-style text; one "v x1 x2 x3" line per grid node in
    row-major order (12 significant digits, negative zero normalized), then
    "f i j k" lines with 1-based vertex indices, two triangles per grid
    cell with consistent winding.
  * Surface CSV (for `check`): header x,y,F_re,F_im,h then one row per
    node, row-major, full double precision.
  * Solution CSV (from `solve-gauss`): header x,y,u, same layout.
  * Report: JSON with sorted keys; schema documented in the README.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import SchemaError
from .surface import SurfaceGrid


@dataclass
class MeshSummary:
    """What export_obj wrote: path and element counts."""

    path: str
    vertex_count: int
    face_count: int


def _fmt12(value):
    """12-significant-digit decimal with canonical zero."""
    value = float(value) + 0.0  # normalize -0.0
    return f"{value:.12g}"


def _fmt_full(value):
    """Shortest representation that round-trips a double exactly."""
    return repr(float(value) + 0.0)


def export_obj(surface, path):
    """Write a surface grid as an OBJ-style triangle mesh.

    Vertices appear in row-major node order; each grid cell contributes
    two triangles wound consistently (counterclockwise as seen from the
    +x3 side of the parameter grid).  Returns a MeshSummary; a 9x9 grid
    yields 81 vertices and 128 faces.
    """
    coords = surface.coords()
    ny, nx = coords.shape[:2]
    lines = []
    for j in range(ny):
        for i in range(nx):
            p = coords[j, i]
            lines.append(f"v {_fmt12(p[0])} {_fmt12(p[1])} {_fmt12(p[2])}")
    for j in range(ny - 1):
        for i in range(nx - 1):
            v00 = j * nx + i + 1
            v01 = v00 + 1
            v10 = v00 + nx
            v11 = v10 + 1
            lines.append(f"f {v00} {v01} {v11}")
            lines.append(f"f {v00} {v11} {v10}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return MeshSummary(
        path=str(path),
        vertex_count=nx * ny,
        face_count=2 * (nx - 1) * (ny - 1),
    )


def read_obj(path):
    """Read back an OBJ-style mesh written by export_obj.

    Returns (vertices, faces) with vertices an (n, 3) float array and
    faces an (m, 3) int array of 0-based indices.
    """
    vertices = []
    faces = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                vertices.append([float(v) for v in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(v) - 1 for v in parts[1:4]])
    return np.asarray(vertices, dtype=float), np.asarray(faces, dtype=int)


def write_surface_csv(surface, path):
    """Write a surface as the CSV table consumed by `check`."""
    coords = surface.coords()
    x = np.asarray(surface.x, dtype=float)
    y = np.asarray(surface.y, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y,F_re,F_im,h\n")
        for j in range(y.size):
            for i in range(x.size):
                fh.write(
                    f"{_fmt_full(x[i])},{_fmt_full(y[j])},"
                    f"{_fmt_full(coords[j, i, 0])},{_fmt_full(coords[j, i, 1])},"
                    f"{_fmt_full(coords[j, i, 2])}\n"
                )


def read_surface_csv(path):
    """Read an external surface table (header x,y,F_re,F_im,h) into a grid.

    The rows must cover a complete rectangular grid (any order); raises
    SchemaError for a bad header, non-numeric data, or incomplete grids.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(str(path), "empty CSV file") from None
        header = [col.strip() for col in header]
        if header != ["x", "y", "F_re", "F_im", "h"]:
            raise SchemaError(
                str(path),
                f"expected header x,y,F_re,F_im,h; got {','.join(header)}",
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise SchemaError(str(path), f"line {lineno}: expected 5 columns")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise SchemaError(
                    str(path), f"line {lineno}: non-numeric value"
                ) from None
    if not rows:
        raise SchemaError(str(path), "no data rows")
    data = np.asarray(rows, dtype=float)
    x = np.unique(data[:, 0])
    y = np.unique(data[:, 1])
    if x.size * y.size != data.shape[0]:
        raise SchemaError(
            str(path),
            f"rows do not form a complete {y.size} x {x.size} grid "
            f"({data.shape[0]} rows)",
        )
    f_grid = np.full((y.size, x.size), np.nan, dtype=complex)
    h_grid = np.full((y.size, x.size), np.nan, dtype=float)
    ix = np.searchsorted(x, data[:, 0])
    iy = np.searchsorted(y, data[:, 1])
    f_grid[iy, ix] = data[:, 2] + 1j * data[:, 3]
    h_grid[iy, ix] = data[:, 4]
    if np.any(np.isnan(h_grid)):
        raise SchemaError(str(path), "duplicate rows leave grid nodes unfilled")
    return SurfaceGrid(x=x, y=y, t=0.0, F=f_grid, height=h_grid)


def write_solution_csv(result, path):
    """Write a solved density grid as CSV (header x,y,u), row-major."""
    x = np.asarray(result.x, dtype=float)
    y = np.asarray(result.y, dtype=float)
    u = np.asarray(result.u, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y,u\n")
        for j in range(y.size):
            for i in range(x.size):
                fh.write(
                    f"{_fmt_full(x[i])},{_fmt_full(y[j])},{_fmt_full(u[j, i])}\n"
                )


def write_json(obj, path):
    """Dump a JSON document with sorted keys and a trailing newline."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
