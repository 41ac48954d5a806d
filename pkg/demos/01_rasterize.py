"""From a photographed-style garage image to a binary occupancy raster.

Builds a small synthetic grayscale image (white floor, dark painted parking
blocks), then walks through loading, grayscale conversion and thresholding.

Run:  python3 demos/01_rasterize.py
"""
import numpy as np

from garagemap import RasterGrid, binarize, load_image, resize_nearest, save_image

# A 24x24 "photo": bright floor with three dark 4x3 parking blocks.
pixels = np.full((24, 24), 230, dtype=np.uint8)
for c0 in (2, 9, 16):
    pixels[3:7, c0:c0 + 3] = 40
image = RasterGrid(24, 24, 1, pixels)

# Round-trip through the PGM codec, as the CLI does with real files.
data = save_image(image)
print(f"encoded PGM: {len(data)} bytes, header {data[:12]!r}")
image = load_image(data)

# Thresholding: dark pixels (paint) become occupied cells.
bits = binarize(image, threshold=128)
print(f"occupied cells: {int(bits.bits.sum())} of {bits.width * bits.height}")

for row in bits.bits:
    print("".join("#" if v else "." for v in row))

# Nearest-neighbor resize is available when source images are oversized.
small = resize_nearest(image, 12, 12)
print(f"resized {image.width}x{image.height} -> {small.width}x{small.height}")
