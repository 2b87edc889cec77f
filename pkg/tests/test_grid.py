import numpy as np
import pytest

from owf import GrayImage, PixelCoord, WindowSpec, mirror_read, window_pixels
from owf.grid import mirror_pad, reflect_index, reflect_indices


@pytest.fixture
def img4():
    return GrayImage(np.arange(16, dtype=float).reshape(4, 4))


def test_interior_reads_are_identity(img4):
    for i in range(4):
        for j in range(4):
            assert mirror_read(img4, PixelCoord(i, j)) == img4.values[i, j]


def test_mirror_across_row_border(img4):
    assert mirror_read(img4, PixelCoord(-1, 2)) == img4.values[1, 2]


def test_mirror_at_corner_per_axis(img4):
    assert mirror_read(img4, PixelCoord(-2, -1)) == img4.values[2, 1]


def test_mirror_high_side(img4):
    assert mirror_read(img4, PixelCoord(4, 0)) == img4.values[2, 0]
    assert mirror_read(img4, PixelCoord(5, 5)) == img4.values[1, 1]


def test_mirror_double_reflection_symmetry(img4):
    for k in range(1, 4):
        assert mirror_read(img4, PixelCoord(-k, 0)) == mirror_read(img4, PixelCoord(k, 0))
        assert mirror_read(img4, PixelCoord(0, 3 + k)) == mirror_read(img4, PixelCoord(0, 3 - k))


def test_mirror_rejects_excess_beyond_one_reflection(img4):
    with pytest.raises(ValueError):
        mirror_read(img4, PixelCoord(-4, 0))
    with pytest.raises(ValueError):
        mirror_read(img4, PixelCoord(0, 7))


def test_window_radius_zero():
    assert window_pixels(WindowSpec(PixelCoord(5, 5), 0)) == [PixelCoord(5, 5)]


def test_window_radius_one_row_major():
    coords = window_pixels(WindowSpec(PixelCoord(0, 0), 1))
    assert len(coords) == 9
    assert coords[0] == PixelCoord(-1, -1)
    assert coords[-1] == PixelCoord(1, 1)
    expected = [PixelCoord(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1)]
    assert coords == expected


def test_window_default_search_size():
    # radius 6 gives the 13x13 default search window
    coords = window_pixels(WindowSpec(PixelCoord(0, 0), 6))
    assert len(coords) == 169


def test_window_enumeration_stable():
    spec = WindowSpec(PixelCoord(3, -2), 2)
    assert window_pixels(spec) == window_pixels(spec)
    assert len(window_pixels(spec)) == 25


def test_window_negative_radius_rejected():
    with pytest.raises(ValueError):
        WindowSpec(PixelCoord(0, 0), -1)


def test_mirror_pad_matches_mirror_read():
    rng = np.random.default_rng(3)
    img = GrayImage(rng.uniform(0, 255, size=(5, 7)))
    pad = 4
    padded = mirror_pad(img, pad)
    for i in range(-pad, img.height + pad):
        for j in range(-pad, img.width + pad):
            assert padded[i + pad, j + pad] == mirror_read(img, PixelCoord(i, j))


def test_mirror_pad_rejects_oversized_pad():
    img = GrayImage(np.zeros((4, 6)))
    with pytest.raises(ValueError):
        mirror_pad(img, 4)


def test_reflect_indices_matches_scalar():
    idx = np.arange(-7, 15)
    out = reflect_indices(idx, 8)
    assert list(out) == [reflect_index(int(i), 8) for i in idx]


def test_image_validation():
    with pytest.raises(ValueError):
        GrayImage(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        GrayImage(np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError):
        GrayImage(np.array([[1.0, np.inf]]))
    with pytest.raises(ValueError):
        GrayImage(np.zeros(5))


def test_image_is_immutable():
    img = GrayImage(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        img.values[0, 0] = 1.0


def test_image_copies_its_input():
    src = np.zeros((2, 2))
    img = GrayImage(src)
    src[0, 0] = 99.0
    assert img.values[0, 0] == 0.0
