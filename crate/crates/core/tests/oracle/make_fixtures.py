"""Writes the 512x512 grayscale test images from scikit-image's sample data.

Run: python3 make_fixtures.py <output dir>
"""
import sys
from pathlib import Path

import numpy as np
from skimage import color, data


def write_pgm(path, img):
    img = np.ascontiguousarray(img, dtype=np.uint8)
    h, w = img.shape
    path.write_bytes(b"P5\n%d %d\n255\n" % (w, h) + img.tobytes())


out = Path(sys.argv[1])
write_pgm(out / "camera.pgm", data.camera())
write_pgm(out / "moon.pgm", data.moon())
write_pgm(out / "astronaut.pgm", np.round(color.rgb2gray(data.astronaut()) * 255))
