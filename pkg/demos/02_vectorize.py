"""From a binary raster to classified vector elements.

Labels connected regions, traces their contours and classifies each one as
a ParkingSpace (rectangular), Obstacle (anything else occupied) or Pathway
(free floor).

Run:  python3 demos/02_vectorize.py
"""
import numpy as np

from garagemap import BitGrid, extract_elements

bits = np.zeros((14, 18), dtype=np.uint8)
bits[2:5, 2:6] = 1     # rectangular block: a parking space
bits[2:5, 8:12] = 1    # another one
bits[8:12, 5:11] = 1   # plus-shaped pillar: an obstacle
bits[8:10, 5:7] = 0
bits[8:10, 9:11] = 0
bits[10:12, 5:7] = 0
bits[10:12, 9:11] = 0

for row in bits:
    print("".join("#" if v else "." for v in row))

elements = extract_elements(BitGrid(18, 14, bits))
for el in elements:
    print(f"\nelement {el.id}: {el.kind}")
    print(f"  anchor  {el.anchor}")
    print(f"  polygon {el.geometry}")
    if el.corners:
        print(f"  corners {el.corners}")
