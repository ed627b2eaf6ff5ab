#!/usr/bin/env python3
"""Regenerate the bundled 512x512 grayscale test scene.

The scene is fully deterministic (fixed PCG64 seed) and mixes the content
classes the codecs care about: smooth gradients and hills (low-frequency
energy), hard-edged buildings with window grids, fences and a bare tree
(localized broadband edges), scattered strong speckle patches (block-sparse
high-frequency energy), and fine film grain (sub-threshold coefficient
dust). Writes src/sparsecast/data/scene512.pgm.
"""

import math
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from sparsecast.image import Frame, save_frame

SIZE = 512
SEED = 20260809
GRAIN = 1.2
SPECKLE_AMP = 80.0
SPECKLE_COVERAGE = 0.16
BASE_CONTRAST = 0.62


def make_scene() -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(SEED))
    yy, xx = np.mgrid[0:SIZE, 0:SIZE].astype(np.float64) / SIZE

    # sky with a soft diagonal shading and a sun disc
    img = 205.0 - 70.0 * yy + 8.0 * np.cos(2.6 * (xx + 0.4 * yy))
    sun = ((xx - 0.78) ** 2 + (yy - 0.20) ** 2) < 0.006
    img[sun] = 246.0

    # two hill silhouettes with slowly varying fills
    ridge1 = (
        0.38
        + 0.06 * np.sin(2 * np.pi * 1.7 * xx)
        + 0.03 * np.sin(2 * np.pi * 4.3 * xx + 1.0)
    )
    hills1 = yy > ridge1
    img[hills1] = 120.0 + 20.0 * np.sin(2 * np.pi * 0.9 * xx[hills1]) - 20.0 * yy[hills1]
    ridge2 = 0.58 + 0.05 * np.sin(2 * np.pi * 2.9 * xx + 2.2)
    hills2 = yy > ridge2
    img[hills2] = 95.0 + 14.0 * np.cos(2 * np.pi * 1.3 * xx[hills2]) - 30.0 * (yy[hills2] - 0.58)

    # furrowed field in the foreground
    field = yy > 0.74
    img[field] = 70.0 + 12.0 * np.sin(2 * np.pi * (14 * xx[field] + 22 * yy[field]))

    def rect(x0, x1, y0, y1, value):
        img[int(y0 * SIZE) : int(y1 * SIZE), int(x0 * SIZE) : int(x1 * SIZE)] = value

    # three buildings
    rect(0.08, 0.20, 0.47, 0.74, 52.0)
    rect(0.23, 0.31, 0.53, 0.74, 68.0)
    rect(0.34, 0.42, 0.50, 0.74, 60.0)

    # photographic softness for everything painted so far
    img = gaussian_filter(img, 1.0)

    # coarse vegetation texture on the far hills
    tex = gaussian_filter(rng.standard_normal((SIZE, SIZE)), 1.1)
    tex *= 4.0 / tex.std()
    img[hills1] += tex[hills1]

    # keep block-level brightness spread moderate
    img = 128.0 + BASE_CONTRAST * (img - 128.0)

    # crisp overlays go in after the blur: window grids
    for wy in np.arange(0.50, 0.72, 0.035):
        for wx in np.arange(0.095, 0.19, 0.024):
            rect(wx, wx + 0.012, wy, wy + 0.018, 185.0)
    for wy in np.arange(0.56, 0.72, 0.04):
        for wx in np.arange(0.24, 0.30, 0.02):
            rect(wx, wx + 0.010, wy, wy + 0.015, 170.0)
    for wy in np.arange(0.53, 0.72, 0.045):
        for wx in np.arange(0.35, 0.41, 0.022):
            rect(wx, wx + 0.011, wy, wy + 0.016, 178.0)

    # double fence with rails
    for fy in (0.78, 0.88):
        for fx in np.arange(0.02, 0.99, 0.018):
            x0 = int(fx * SIZE)
            img[int(fy * SIZE) : int((fy + 0.05) * SIZE), x0 : x0 + 2] = 28.0
        img[int((fy + 0.012) * SIZE) : int((fy + 0.012) * SIZE) + 2,
            int(0.02 * SIZE) : int(0.99 * SIZE)] = 25.0
        img[int((fy + 0.04) * SIZE) : int((fy + 0.04) * SIZE) + 2,
            int(0.02 * SIZE) : int(0.99 * SIZE)] = 25.0

    # bare tree: trunk and a few branches
    tx = 0.60
    img[int(0.28 * SIZE) : int(0.47 * SIZE), int(tx * SIZE) : int(tx * SIZE) + 4] = 35.0
    for ang, ln in [(0.6, 90), (-0.7, 80), (1.2, 70), (-1.3, 60), (0.25, 75), (-0.3, 70)]:
        bx, by = int(tx * SIZE) + 2, int(0.33 * SIZE)
        for t in range(ln):
            px = bx + int(t * math.cos(ang))
            py = by - int(t * abs(math.sin(ang)) + 0.15 * t)
            if 2 <= px < SIZE - 2 and 2 <= py < SIZE - 2:
                img[py : py + 2, px : px + 2] = 40.0

    # birds / glints in the sky
    for _ in range(110):
        sx, sy = rng.integers(8, SIZE - 8), rng.integers(8, int(0.36 * SIZE))
        img[sy : sy + 2, sx - 1 : sx + 1] = 238.0

    # strong speckle patches on scattered blocks below the first ridge:
    # block-sparse broadband energy, the content class that separates
    # coefficient-level thresholding from whole-group discarding
    bs = 16
    nb = SIZE // bs
    block_mask = rng.random((nb, nb)) < SPECKLE_COVERAGE
    bidx = np.arange(SIZE) // bs
    pix_mask = block_mask[bidx[:, None], bidx[None, :]]
    pix_mask &= yy > (ridge1 - 0.12)
    speckle = rng.uniform(-SPECKLE_AMP, SPECKLE_AMP, (SIZE, SIZE))
    img = np.where(pix_mask, img + speckle, img)

    # fine film grain everywhere
    img += GRAIN * rng.standard_normal((SIZE, SIZE))
    return np.clip(np.rint(img), 0, 255)


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "src" / "sparsecast" / "data" / "scene512.pgm"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_frame(Frame(make_scene()), out)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
