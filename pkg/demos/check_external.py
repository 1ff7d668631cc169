"""Vet externally produced surface data with the residual checker.

The `check` entry point consumes a plain CSV (header x,y,F_re,F_im,h:
grid coordinates plus the three immersion coordinates, F complex in the
horizontal plane and h the vertical height) and needs no knowledge of
how the surface was made.  Two hand-built planes make the point:

  * the vertical plane (x, 0, y) is an exactly-minimal, exactly-conformal
    immersion — every computable residual is zero on a dyadic grid and
    the checker passes it;
  * the horizontal plane (x, y, 0) is minimal-looking but not conformal
    in these coordinates, the residual suite says exactly how (the
    conformality defect grows like |z|^2 / 16), and the checker rejects
    it with exit code 4.
"""

import os

import numpy as np

from nilsurf.outputs import write_surface_csv
from nilsurf.pipeline import run_check
from nilsurf.surface import SurfaceGrid

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

n = 17
axis = np.arange(-(n // 2), n // 2 + 1) * 0.125
x2d, y2d = np.meshgrid(axis, axis)

vertical = SurfaceGrid(
    x=axis, y=axis, t=0.0, F=x2d.astype(complex), height=y2d.copy()
)
horizontal = SurfaceGrid(
    x=axis, y=axis, t=0.0, F=x2d + 1j * y2d, height=np.zeros_like(x2d)
)

vertical_csv = os.path.join(OUT, "vertical_plane.csv")
horizontal_csv = os.path.join(OUT, "horizontal_plane.csv")
write_surface_csv(vertical, vertical_csv)
write_surface_csv(horizontal, horizontal_csv)

print("=== vertical plane (should pass) ===")
code, _ = run_check(
    vertical_csv, report_path=os.path.join(OUT, "vertical_check.json")
)
print(f"exit code: {code}\n")

print("=== horizontal plane (should be rejected) ===")
code, report = run_check(horizontal_csv)
print(f"exit code: {code}")
for failure in report["failures"]:
    print(f"  over threshold: {failure['residual']} = "
          f"{failure['value']:.3e} > {failure['threshold']:.3e}")

print("\n(the same checks are available as: nilsurf check <csv> "
      "[--report out.json])")
