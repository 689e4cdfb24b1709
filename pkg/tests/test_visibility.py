import math

import numpy as np
import pytest

from archrefine.visibility import (
    CORNERS, FACADES, Footprint, VisibilityError, _against_sky, classify_vantage,
    corner_against_sky, vantage_map,
)

FP = Footprint()


def brute_against_sky(fp, viewer, corner, n_rays):
    """Cast every ray one by one against every occluder (platform coordinates)."""
    ex, ey = fp.to_centered(*viewer)
    ex, ey = float(ex), float(ey)
    cx, cy = fp.corner_center(corner)
    dist = math.hypot(cx - ex, cy - ey)
    half = math.asin(min(fp.corner_column_radius / dist, 1.0))
    phi0 = math.atan2(cy - ey, cx - ex)
    discs = []
    boxes = []
    if fp.model == "solid":
        boxes.append((-fp.a / 2, fp.a / 2, -fp.b / 2, fp.b / 2))
    else:
        pts, radii, labels = fp.columns()
        discs = [(p, r) for p, r, lab in zip(pts, radii, labels) if lab != corner]
        if fp.core() is not None:
            boxes.append(fp.core())
    for phi in np.linspace(phi0 - half, phi0 + half, n_rays):
        dx, dy = math.cos(phi), math.sin(phi)
        for (px, py), r in discs:
            wx, wy = px - ex, py - ey
            b = wx * dx + wy * dy
            disc = b * b - (wx * wx + wy * wy - r * r)
            if disc >= 0 and b + math.sqrt(disc) > 0:
                return False
        for x0, x1, y0, y1 in boxes:
            t_lo, t_hi = 0.0, math.inf
            for o, d, lo, hi in ((ex, dx, x0, x1), (ey, dy, y0, y1)):
                if abs(d) < 1e-300:
                    if not lo <= o <= hi:
                        t_lo, t_hi = 1.0, 0.0
                    continue
                ta, tb = sorted(((lo - o) / d, (hi - o) / d))
                t_lo, t_hi = max(t_lo, ta), min(t_hi, tb)
            if t_lo <= t_hi:
                return False
    return True


def random_viewers(n, seed, fp=FP, reach=120.0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x, y = rng.uniform(-reach, fp.a + reach), rng.uniform(-reach, fp.b + reach)
        if not fp.inside(x, y):
            out.append((float(x), float(y)))
    return out


@pytest.mark.parametrize("corner", CORNERS)
def test_interval_test_matches_ray_casting(corner):
    for v in random_viewers(150, seed=CORNERS.index(corner)):
        assert corner_against_sky(FP, v, corner, 64) == brute_against_sky(FP, v, corner, 64), v


def test_ray_casting_near_the_platform():
    # close viewers, where sight lines graze columns and the core
    rng = np.random.default_rng(9)
    for _ in range(300):
        side = rng.integers(4)
        t = rng.uniform(-5, 1)
        if side == 0:
            v = (rng.uniform(-5, FP.a + 5), t - 0.01)
        elif side == 1:
            v = (rng.uniform(-5, FP.a + 5), FP.b - t + 0.01)
        elif side == 2:
            v = (t - 0.01, rng.uniform(-5, FP.b + 5))
        else:
            v = (FP.a - t + 0.01, rng.uniform(-5, FP.b + 5))
        if FP.inside(*v):
            continue
        for c in CORNERS:
            assert corner_against_sky(FP, v, c, 64) == brute_against_sky(FP, v, c, 64), (v, c)


def test_solid_model_against_ray_casting():
    solid = Footprint(model="solid")
    for v in random_viewers(60, seed=4, fp=solid):
        for c in CORNERS:
            assert corner_against_sky(solid, v, c, 32) == brute_against_sky(solid, v, c, 32)
            assert not corner_against_sky(solid, v, c, 32)


def test_far_on_the_supporting_diagonal_sees_sky():
    # the 45 degree line that touches the building only at the corner; sight
    # lines along it pass beside the platform into open ground
    for c in CORNERS:
        sx = 1 if c[0] == "N" else -1
        sy = 1 if c[1] == "W" else -1
        px, py = (FP.a if sx > 0 else 0.0), (FP.b if sy > 0 else 0.0)
        for t in (100.0, -100.0):
            v = (px + t * sx, py - t * sy)
            assert corner_against_sky(FP, v, c, 4096), (c, v)
            assert brute_against_sky(FP, v, c, 4096)


def test_far_on_the_outward_diagonal_is_backed_by_the_core():
    # straight out along the bisector the inner block sits behind the corner
    assert not corner_against_sky(FP, (-100.0, -100.0), "SE", 4096)
    assert not brute_against_sky(FP, (-100.0, -100.0), "SE", 4096)


def test_close_perpendicular_viewer_loses_far_corners():
    v = (FP.a / 2, -5.0)  # on the east facade's axis, 5 m out
    for c in FACADES["west"]:
        assert not corner_against_sky(FP, v, c, 4096)
        assert not brute_against_sky(FP, v, c, 4096)


def test_square_footprint_diagonal_symmetry():
    sq = Footprint(a=40, b=40, n_short=10, n_long=10)
    swap = {"SE": "SE", "NW": "NW", "NE": "SW", "SW": "NE"}
    for x, y in random_viewers(80, seed=5, fp=sq):
        for c in CORNERS:
            assert corner_against_sky(sq, (x, y), c) == corner_against_sky(sq, (y, x), swap[c])


def test_mirror_across_facade_bisector():
    for x, y in random_viewers(80, seed=6):
        a = classify_vantage(FP, (x, y), "east")
        b = classify_vantage(FP, (FP.a - x, y), "east")
        assert a.code == b.code
        if a.code == 2:
            assert all(flag for _, flag in a.corners)


def test_more_rays_only_add_obstructions():
    # linspace with 2n - 1 points contains every point of the n-point sampling
    X, Y = np.meshgrid(np.linspace(-160, 160, 81), np.linspace(-160, 160, 81))
    keep = ~FP.inside(X, Y, centered=True)
    for c in CORNERS:
        coarse = _against_sky(FP, X[keep], Y[keep], c, 33)
        fine = _against_sky(FP, X[keep], Y[keep], c, 65)
        assert not np.any(fine & ~coarse)


def test_viewer_errors():
    with pytest.raises(VisibilityError):
        corner_against_sky(FP, (10.0, 10.0), "SE")
    overhang = Footprint(column_inset=0.5)
    with pytest.raises(VisibilityError, match="inside a column"):
        corner_against_sky(overhang, (-0.2, 0.5), "SE")
    with pytest.raises(VisibilityError):
        corner_against_sky(FP, (-10.0, -10.0), "SE", n_rays=1)
    with pytest.raises(VisibilityError):
        corner_against_sky(FP, (-10.0, -10.0), "XX")
    with pytest.raises(VisibilityError):
        Footprint(a=0)


@pytest.fixture(scope="module")
def default_map():
    return vantage_map(FP)


def test_map_shape_and_csv(default_map, tmp_path):
    m = default_map
    assert m.corners["SE"].shape == (300, 300)
    path = m.to_csv("east", tmp_path / "e.csv")
    rows = path.read_text().strip().splitlines()
    assert len(rows) == 300 and len(rows[0].split(",")) == 300
    assert set("".join(rows).replace(",", "")) <= {"0", "1", "2"}
    assert not np.any(m.codes("east")[m.mask])


def test_map_dihedral_symmetry(default_map):
    c = default_map.corners
    # rows follow y, columns follow x
    assert np.array_equal(c["SE"][:, ::-1], c["NE"])
    assert np.array_equal(c["SE"][::-1, :], c["SW"])
    assert np.array_equal(c["SE"][::-1, ::-1], c["NW"])
    assert np.array_equal(default_map.both("east")[::-1, :], default_map.both("west"))
    assert np.array_equal(default_map.both("south")[:, ::-1], default_map.both("north"))
    assert default_map.area("east") == default_map.area("west")


def test_both_regions_exist_and_are_disjoint(default_map):
    regions = {f: default_map.both(f) for f in FACADES}
    assert all(r.any() for r in regions.values())
    names = list(regions)
    for i, f in enumerate(names):
        for g in names[i + 1:]:
            assert not np.any(regions[f] & regions[g]), (f, g)


def test_cell_coarsening_is_stable(default_map):
    fine = vantage_map(FP, cell=0.5)
    for f in ("east", "south"):
        a1, a2 = default_map.area(f), fine.area(f)
        assert abs(a1 - a2) / a2 < 0.05, (f, a1, a2)


def test_smaller_corner_columns_see_more_sky():
    areas = [vantage_map(Footprint(corner_column_radius=r), cell=2.0).area("east") for r in (0.9735, 0.5, 0.2)]
    assert areas[0] < areas[1] < areas[2]
