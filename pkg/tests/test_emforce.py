import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emmatch import (CurrentElement, EdgeCurrent, EmptyCurrentError, ForceMap,
                     ForceParams, Vec2, bz_at, force_map, force_map_fast,
                     force_map_tsv, force_on_element, pair_force, total_force)
from conftest import random_current

T_EAST = CurrentElement(0, 0, 1.0, 0.0)


def single(x, y, tx, ty, w=8, h=8):
    return EdgeCurrent(w, h, np.array([x]), np.array([y]),
                       np.array([tx]), np.array([ty]))


def empty_current(w=8, h=8):
    z = np.array([], dtype=np.int64)
    return EdgeCurrent(w, h, z, z, np.array([]), np.array([]))


def test_force_params_validation():
    with pytest.raises(ValueError):
        ForceParams(strength=0.0)
    with pytest.raises(ValueError):
        ForceParams(height_px=-1.0)
    with pytest.raises(ValueError):
        ForceParams(min_r=0.0)
    p = ForceParams()
    assert (p.strength, p.height_px, p.min_r) == (1.0, 0.0, 1e-9)


def test_stacked_parallel_elements_attract_vertically():
    f = pair_force(T_EAST, T_EAST, Vec2(0.0, 0.0), ForceParams(height_px=2.0))
    assert (f.x, f.y, f.z) == (0.0, 0.0, -0.25)


def test_parallel_elements_attract_in_plane():
    t2 = CurrentElement(0, 2, 1.0, 0.0)
    f = pair_force(T_EAST, t2, Vec2(0.0, 0.0))
    assert (f.x, f.y, f.z) == (0.0, 0.25, 0.0)  # pulled toward t2 at +y


def test_antiparallel_elements_repel_in_plane():
    t2 = CurrentElement(0, 2, -1.0, 0.0)
    f = pair_force(T_EAST, t2, Vec2(0.0, 0.0))
    assert (f.x, f.y, f.z) == (0.0, -0.25, 0.0)  # pushed away from t2


def test_side_by_side_parallel_wires_attract():
    t1 = CurrentElement(0, 0, 0.0, 1.0)
    t2 = CurrentElement(3, 0, 0.0, 1.0)
    f = pair_force(t1, t2, Vec2(0.0, 0.0))
    assert (f.x, f.y, f.z) == (3.0 / 27.0, 0.0, 0.0)


def test_planar_force_falls_off_as_inverse_square():
    near = pair_force(T_EAST, CurrentElement(0, 2, 1.0, 0.0), Vec2(0.0, 0.0))
    far = pair_force(T_EAST, CurrentElement(0, 4, 1.0, 0.0), Vec2(0.0, 0.0))
    assert near.y == 0.25 and far.y == 0.0625
    assert near.y / far.y == 4.0


def test_coincident_elements_contribute_exactly_zero():
    f = pair_force(T_EAST, T_EAST, Vec2(0.0, 0.0))
    assert (f.x, f.y, f.z) == (0.0, 0.0, 0.0)


def test_min_r_cutoff_is_strict():
    params = ForceParams(min_r=2.0)
    at_cut = pair_force(T_EAST, CurrentElement(0, 2, 1.0, 0.0), Vec2(0.0, 0.0), params)
    assert at_cut.y == 0.25  # r == min_r still contributes
    inside = pair_force(T_EAST, CurrentElement(0, 1, 1.0, 0.0), Vec2(0.0, 0.0), params)
    assert (inside.x, inside.y, inside.z) == (0.0, 0.0, 0.0)


def test_strength_scales_pair_force_exactly():
    t2 = CurrentElement(2, 3, -0.7, 1.9)
    base = pair_force(T_EAST, t2, Vec2(1.0, -1.0), ForceParams(height_px=1.5))
    double = pair_force(T_EAST, t2, Vec2(1.0, -1.0),
                        ForceParams(strength=2.0, height_px=1.5))
    assert (double.x, double.y, double.z) == (2 * base.x, 2 * base.y, 2 * base.z)


def test_shift_moves_the_first_element():
    t1 = CurrentElement(5, 3, 0.4, -0.2)
    t2 = CurrentElement(1, -2, -0.9, 0.6)
    moved = pair_force(t1, t2, Vec2(-5.0, -3.0))
    fixed = pair_force(CurrentElement(0, 0, 0.4, -0.2), t2, Vec2(0.0, 0.0))
    assert (moved.x, moved.y, moved.z) == (fixed.x, fixed.y, fixed.z)


def test_height_weakens_planar_pull():
    t2 = CurrentElement(0, 2, 1.0, 0.0)
    flat = pair_force(T_EAST, t2, Vec2(0.0, 0.0), ForceParams(height_px=0.0))
    lifted = pair_force(T_EAST, t2, Vec2(0.0, 0.0), ForceParams(height_px=8.0))
    assert 0.0 < lifted.y < flat.y
    assert lifted.z < 0.0  # planes still pull toward each other


def test_force_on_single_element_matches_pair_force():
    c2 = single(4, 1, -0.3, 2.0)
    params = ForceParams(strength=3.0, height_px=1.0)
    got = force_on_element(T_EAST, c2, Vec2(2.0, -1.0), params)
    want = pair_force(T_EAST, c2.element(0), Vec2(2.0, -1.0), params)
    assert (got.x, got.y, got.z) == (want.x, want.y, want.z)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_force_on_element_sums_pairs(seed):
    rng = np.random.default_rng(seed)
    c2 = random_current(rng)
    params = ForceParams(height_px=float(rng.uniform(0.0, 4.0)))
    el = CurrentElement(2, 3, float(rng.uniform(-5, 5)), float(rng.uniform(-5, 5)))
    shift = Vec2(1.0, -2.0)
    got = force_on_element(el, c2, shift, params)
    fx = fy = fz = 0.0
    scale = 0.0
    for j in range(len(c2)):
        f = pair_force(el, c2.element(j), shift, params)
        fx += f.x
        fy += f.y
        fz += f.z
        scale += abs(f.x) + abs(f.y) + abs(f.z)
    tol = 1e-12 * max(scale, 1e-30)
    assert abs(got.x - fx) <= tol
    assert abs(got.y - fy) <= tol
    assert abs(got.z - fz) <= tol


def test_total_force_accumulates_element_forces_exactly():
    rng = np.random.default_rng(7)
    c1 = random_current(rng)
    c2 = random_current(rng)
    params = ForceParams(height_px=2.0)
    shift = Vec2(3.0, -1.0)
    total = total_force(c1, c2, shift, params)
    fx = fy = fz = 0.0
    for i in range(len(c1)):
        f = force_on_element(c1.element(i), c2, shift, params)
        fx += f.x
        fy += f.y
        fz += f.z
    assert (total.x, total.y, total.z) == (fx, fy, fz)


def test_bz_at_drives_planar_force():
    rng = np.random.default_rng(11)
    c2 = random_current(rng)
    params = ForceParams(strength=2.5, height_px=1.0)
    el = CurrentElement(5, 9, 1.7, -0.4)
    shift = Vec2(-2.0, 4.0)
    f = force_on_element(el, c2, shift, params)
    b = bz_at(c2, el.x + shift.x, el.y + shift.y, params)
    assert math.isclose(f.x, el.ty * b, rel_tol=1e-12)
    assert math.isclose(f.y, -el.tx * b, rel_tol=1e-12)


def test_empty_second_current_gives_zero():
    c2 = empty_current()
    f = force_on_element(T_EAST, c2, Vec2(0.0, 0.0))
    assert (f.x, f.y, f.z) == (0.0, 0.0, 0.0)
    assert bz_at(c2, 1.0, 2.0) == 0.0
    t = total_force(empty_current(), single(1, 1, 1.0, 0.0), Vec2(0.0, 0.0))
    assert (t.x, t.y, t.z) == (0.0, 0.0, 0.0)


def test_force_map_rejects_empty_currents():
    with pytest.raises(EmptyCurrentError):
        force_map(empty_current(), single(1, 1, 1.0, 0.0))
    with pytest.raises(EmptyCurrentError):
        force_map_fast(single(1, 1, 1.0, 0.0), empty_current())


def test_map_grid_comes_from_second_current():
    rng = np.random.default_rng(3)
    c1 = random_current(rng, width=16, height=16)
    c2 = random_current(rng, width=24, height=20)
    fmap = force_map(c1, c2)
    assert (fmap.width, fmap.height) == (24, 20)
    assert fmap.origin == (12, 10)


def test_map_cells_hold_total_force():
    rng = np.random.default_rng(5)
    c1 = random_current(rng, width=10, height=10, n=8)
    c2 = random_current(rng, width=10, height=10, n=8)
    params = ForceParams(height_px=1.0)
    fmap = force_map(c1, c2, params)
    for x, y in [(0, 0), (5, 5), (9, 3), (2, 9)]:
        want = total_force(c1, c2, Vec2(float(x - 5), float(y - 5)), params)
        got = fmap.cell(x, y)
        assert (got.x, got.y) == (want.x, want.y)


def test_workers_do_not_change_results():
    rng = np.random.default_rng(13)
    c1 = random_current(rng)
    c2 = random_current(rng)
    one = force_map(c1, c2, workers=1)
    four = force_map(c1, c2, workers=4)
    assert np.array_equal(one.fx, four.fx)
    assert np.array_equal(one.fy, four.fy)


def test_fast_map_matches_naive_map():
    rng = np.random.default_rng(17)
    c1 = random_current(rng)
    c2 = random_current(rng)
    params = ForceParams(strength=2.0, height_px=3.0)
    naive = force_map(c1, c2, params)
    fast = force_map_fast(c1, c2, params)
    assert (fast.width, fast.height, fast.origin) == (naive.width, naive.height, naive.origin)
    scale = max(float(np.abs(naive.fx).max()), float(np.abs(naive.fy).max()))
    assert float(np.abs(fast.fx - naive.fx).max()) <= 1e-9 * scale
    assert float(np.abs(fast.fy - naive.fy).max()) <= 1e-9 * scale


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=15, deadline=None)
def test_strength_scales_whole_maps(seed):
    rng = np.random.default_rng(seed)
    c1 = random_current(rng, n=6)
    c2 = random_current(rng, n=6)
    base = force_map_fast(c1, c2, ForceParams(strength=1.0))
    scaled = force_map_fast(c1, c2, ForceParams(strength=4.0))
    assert np.array_equal(scaled.fx, 4.0 * base.fx)
    assert np.array_equal(scaled.fy, 4.0 * base.fy)


def test_force_map_cell_bounds():
    rng = np.random.default_rng(19)
    fmap = force_map_fast(random_current(rng), random_current(rng))
    with pytest.raises(ValueError):
        fmap.cell(-1, 0)
    with pytest.raises(ValueError):
        fmap.cell(0, 16)


def test_force_map_shape_validation():
    with pytest.raises(ValueError):
        ForceMap(4, 4, 2, 2, np.zeros((4, 3)), np.zeros((4, 4)))


def test_force_map_tsv_layout():
    rng = np.random.default_rng(23)
    fmap = force_map_fast(random_current(rng, n=5), random_current(rng, n=5))
    lines = force_map_tsv(fmap).splitlines()
    assert lines[0] == "x\ty\tfx\tfy"
    assert len(lines) == 1 + fmap.width * fmap.height
    x, y, fx, fy = lines[1].split("\t")
    assert (int(x), int(y)) == (0, 0)
    assert float(fx) == fmap.cell(0, 0).x
    assert float(fy) == fmap.cell(0, 0).y
    # row-major: second row of output is the next cell to the east
    assert lines[2].split("\t")[:2] == ["1", "0"]
