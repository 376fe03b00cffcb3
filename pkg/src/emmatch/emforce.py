"""Simulated magnetic forces between two edge currents.

Every element of the first current feels the field of every element of the
second.  For elements with tangents T1, T2, planar separation d = (dx, dy)
and vertical separation h (the first current floats h pixels above the
second), the field contribution of the second element at the first is

    B = (T2 x r) / |r|^3          with r = (dx, dy, h),

and the force on the first element is strength * T1 x B.  Expanded:

    Bz = t2x * dy - t2y * dx,  Bx = t2y * h,  By = -t2x * h
    F  = (t1y * Bz, -t1x * Bz, t1x * By - t1y * Bx) / |r|^3 * strength

Only the z component of B moves points in the image plane; the x and y
components feed the (unused by matching) z force.  Pairs closer than min_r
are skipped to avoid the singularity at zero separation.

Summation always runs in element storage order, so repeated evaluations
are bit-identical.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .edgecurrent import CurrentElement, EdgeCurrent, EmptyCurrentError


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class ForceParams:
    """Physics constants for force evaluation.

    strength is the overall force scale (it absorbs all physical unit
    constants); height_px separates the two current planes vertically;
    pairs closer than min_r contribute exactly zero.
    """

    strength: float = 1.0
    height_px: float = 0.0
    min_r: float = 1e-9

    def __post_init__(self):
        if self.strength <= 0.0:
            raise ValueError(f"strength must be positive, got {self.strength}")
        if self.height_px < 0.0:
            raise ValueError(f"height_px must be nonnegative, got {self.height_px}")
        if self.min_r <= 0.0:
            raise ValueError(f"min_r must be positive, got {self.min_r}")


@dataclass(frozen=True, eq=False)
class ForceMap:
    """Planar total force for every integer shift of the first current.

    Cell (x, y) holds the in-plane force at shift (x - ox, y - oy); the
    origin cell (ox, oy) is the zero-shift configuration.
    """

    width: int
    height: int
    ox: int
    oy: int
    fx: np.ndarray  # (height, width) float64
    fy: np.ndarray

    def __post_init__(self):
        for name in ("fx", "fy"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (self.height, self.width):
                raise ValueError(f"{name} shape {arr.shape} does not match "
                                 f"({self.height}, {self.width})")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def origin(self) -> tuple[int, int]:
        return (self.ox, self.oy)

    def cell(self, x: int, y: int) -> Vec2:
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise ValueError(f"cell ({x}, {y}) outside {self.width}x{self.height} map")
        return Vec2(float(self.fx[y, x]), float(self.fy[y, x]))


def pair_force(t1: CurrentElement, t2: CurrentElement, shift1: Vec2,
               params: ForceParams = ForceParams()) -> Vec3:
    """Force of a single element t2 on a single element t1 shifted by shift1."""
    dx = (t1.x + shift1.x) - t2.x
    dy = (t1.y + shift1.y) - t2.y
    h = params.height_px
    r2 = dx * dx + dy * dy + h * h
    if r2 < params.min_r * params.min_r:
        return Vec3(0.0, 0.0, 0.0)
    r3 = r2 * math.sqrt(r2)
    bz = t2.tx * dy - t2.ty * dx
    bx = t2.ty * h
    by = -t2.tx * h
    a = params.strength
    return Vec3((t1.ty * bz) / r3 * a,
                (-(t1.tx * bz)) / r3 * a,
                (t1.tx * by - t1.ty * bx) / r3 * a)


def _pair_geometry(c2: EdgeCurrent, px: float, py: float, params: ForceParams):
    """Planar offsets, z-field numerators and guarded cubed distances to c2."""
    dx = px - c2._xf
    dy = py - c2._yf
    h = params.height_px
    r2 = dx * dx + dy * dy + h * h
    close = r2 < params.min_r * params.min_r
    r3 = r2 * np.sqrt(r2)
    if close.any():
        r3 = np.where(close, 1.0, r3)  # placeholder, the term is zeroed below
    bz = c2.tx * dy - c2.ty * dx
    return bz, r3, close


def _element_sums(ex: float, ey: float, etx: float, ety: float, c2: EdgeCurrent,
                  sx: float, sy: float, params: ForceParams) -> tuple[float, float, float]:
    """Force sums of c2 on one element, without the strength factor."""
    bz, r3, close = _pair_geometry(c2, ex + sx, ey + sy, params)
    h = params.height_px
    fx = (ety * bz) / r3
    fy = (-(etx * bz)) / r3
    # Bx = t2y * h, By = -t2x * h
    fz = (etx * (-(c2.tx) * h) - ety * (c2.ty * h)) / r3
    if close.any():
        fx = np.where(close, 0.0, fx)
        fy = np.where(close, 0.0, fy)
        fz = np.where(close, 0.0, fz)
    return float(np.sum(fx)), float(np.sum(fy)), float(np.sum(fz))


def force_on_element(t1: CurrentElement, c2: EdgeCurrent, shift1: Vec2,
                     params: ForceParams = ForceParams()) -> Vec3:
    """Total force of current c2 on one element t1 shifted by shift1.

    Equals the sum of pair_force over c2 in storage order.
    """
    if len(c2) == 0:
        return Vec3(0.0, 0.0, 0.0)
    fx, fy, fz = _element_sums(t1.x, t1.y, t1.tx, t1.ty, c2,
                               shift1.x, shift1.y, params)
    a = params.strength
    return Vec3(fx * a, fy * a, fz * a)


def bz_at(c2: EdgeCurrent, px: float, py: float,
          params: ForceParams = ForceParams()) -> float:
    """Vertical field component of current c2 at planar point (px, py).

    The query point sits height_px above the current plane.  The in-plane
    force on an element T1 there is (t1y, -t1x) times this value.
    """
    if len(c2) == 0:
        return 0.0
    bz, r3, close = _pair_geometry(c2, px, py, params)
    term = bz / r3
    if close.any():
        term = np.where(close, 0.0, term)
    return float(np.sum(term)) * params.strength


def total_force(c1: EdgeCurrent, c2: EdgeCurrent, shift1: Vec2,
                params: ForceParams = ForceParams()) -> Vec3:
    """Whole-current force of c2 on c1 with c1 translated by shift1.

    Accumulates element contributions over c1 in storage order.  The
    strength factor multiplies the final sums once, so changing it scales
    the result without disturbing its direction, even where the components
    nearly cancel.
    """
    fx = fy = fz = 0.0
    for i in range(len(c1)):
        el = c1.element(i)
        sx, sy, sz = _element_sums(el.x, el.y, el.tx, el.ty, c2,
                                   shift1.x, shift1.y, params)
        fx += sx
        fy += sy
        fz += sz
    a = params.strength
    return Vec3(fx * a, fy * a, fz * a)


def force_map(c1: EdgeCurrent, c2: EdgeCurrent,
              params: ForceParams = ForceParams(),
              workers: int = 1) -> ForceMap:
    """Evaluate the planar total force at every integer shift of c1.

    The grid covers x in [0, W) and y in [0, H) for the source dimensions
    W x H of c2; cell (x, y) maps to shift (x - ox, y - oy) with the origin
    at (W // 2, H // 2).  Cells are independent; workers > 1 evaluates rows
    concurrently with identical results.
    """
    if len(c1) == 0 or len(c2) == 0:
        raise EmptyCurrentError("force_map requires two non-empty currents")
    w, h = c2.width, c2.height
    ox, oy = w // 2, h // 2
    fx = np.empty((h, w), dtype=np.float64)
    fy = np.empty((h, w), dtype=np.float64)

    def fill_row(y: int) -> None:
        for x in range(w):
            f = total_force(c1, c2, Vec2(float(x - ox), float(y - oy)), params)
            fx[y, x] = f.x
            fy[y, x] = f.y

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_row, range(h)))
    else:
        for y in range(h):
            fill_row(y)
    return ForceMap(w, h, ox, oy, fx, fy)


def _bz_lattice(c2: EdgeCurrent, x_min: int, y_min: int, wl: int, hl: int,
                params: ForceParams) -> np.ndarray:
    """Unscaled vertical field of c2 on an integer lattice, chunked by rows."""
    n = max(1, len(c2))
    h = params.height_px
    min_r2 = params.min_r * params.min_r
    xs = (x_min + np.arange(wl, dtype=np.float64))[:, None]
    out = np.empty((hl, wl), dtype=np.float64)
    rows_per_chunk = max(1, int(4_000_000 // (wl * n)) or 1)
    for y0 in range(0, hl, rows_per_chunk):
        y1 = min(hl, y0 + rows_per_chunk)
        pys = (y_min + np.arange(y0, y1, dtype=np.float64))[:, None, None]
        dx = xs[None, :, :] - c2._xf[None, None, :]
        dy = pys - c2._yf[None, None, :]
        r2 = dx * dx + dy * dy + h * h
        close = r2 < min_r2
        r3 = r2 * np.sqrt(r2)
        if close.any():
            r3 = np.where(close, 1.0, r3)
        term = (c2.tx * dy - c2.ty * dx) / r3
        if close.any():
            term = np.where(close, 0.0, term)
        out[y0:y1] = np.sum(term, axis=2)
    return out


def force_map_fast(c1: EdgeCurrent, c2: EdgeCurrent,
                   params: ForceParams = ForceParams()) -> ForceMap:
    """force_map through a precomputed field lattice.

    Since map shifts and element positions are integers, every shifted c1
    element lands on a small integer lattice.  The vertical field of c2 is
    evaluated once per lattice point (cost lattice_size * len(c2)), then each
    map cell reduces to len(c1) lattice lookups instead of a fresh double
    sum.  Cells match the naive map up to floating-point regrouping.
    """
    if len(c1) == 0 or len(c2) == 0:
        raise EmptyCurrentError("force_map_fast requires two non-empty currents")
    w, h = c2.width, c2.height
    ox, oy = w // 2, h // 2
    x_min = int(c1.xs.min()) + (0 - ox)
    x_max = int(c1.xs.max()) + (w - 1 - ox)
    y_min = int(c1.ys.min()) + (0 - oy)
    y_max = int(c1.ys.max()) + (h - 1 - oy)
    wl = x_max - x_min + 1
    hl = y_max - y_min + 1
    lattice = _bz_lattice(c2, x_min, y_min, wl, hl, params)

    fx = np.zeros((h, w), dtype=np.float64)
    fy = np.zeros((h, w), dtype=np.float64)
    for i in range(len(c1)):
        # Window of lattice values this element sees across all map shifts.
        x0 = int(c1.xs[i]) - ox - x_min
        y0 = int(c1.ys[i]) - oy - y_min
        win = lattice[y0:y0 + h, x0:x0 + w]
        fx += float(c1.ty[i]) * win
        fy += (-float(c1.tx[i])) * win
    # Strength scales the final sums once, as in total_force.
    return ForceMap(w, h, ox, oy, fx * params.strength, fy * params.strength)


def force_map_tsv(fmap: ForceMap) -> str:
    """Tab-separated map dump, one row per cell in row-major order."""
    lines = ["x\ty\tfx\tfy"]
    for y in range(fmap.height):
        for x in range(fmap.width):
            lines.append(f"{x}\t{y}\t{float(fmap.fx[y, x])!r}\t{float(fmap.fy[y, x])!r}")
    return "\n".join(lines) + "\n"
