"""Raster image containers, Netpbm (PGM/PPM) I/O, grayscale, binarization, resizing."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError

__all__ = [
    "RasterGrid",
    "BitGrid",
    "load_image",
    "save_image",
    "to_grayscale",
    "binarize",
    "resize_nearest",
]


@dataclass
class RasterGrid:
    """A rectangular pixel array, gray (1 channel) or RGB (3 channels).

    Pixels are uint8 in 0..255, row-major with the origin at the top-left:
    shape (height, width) for gray, (height, width, 3) for RGB.
    """

    width: int
    height: int
    channels: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be >= 1")
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        expected = (self.height, self.width) if self.channels == 1 else (self.height, self.width, 3)
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != expected:
            raise ValueError(f"pixel array shape {self.pixels.shape} != {expected}")


@dataclass
class BitGrid:
    """Binary occupancy grid: 0 = free, 1 = occupied. Row-major uint8 array."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be >= 1")
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        if self.bits.shape != (self.height, self.width):
            raise ValueError(f"bit array shape {self.bits.shape} != {(self.height, self.width)}")
        if self.bits.size and self.bits.max() > 1:
            raise ValueError("bit values must be 0 or 1")


class _NetpbmReader:
    """Tokenizer over Netpbm header bytes; tracks offsets for error reporting."""

    _WS = b" \t\r\n\x0b\x0c"

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip_ws_and_comments(self):
        data = self.data
        n = len(data)
        while self.pos < n:
            ch = data[self.pos : self.pos + 1]
            if ch in (b"#",):
                nl = data.find(b"\n", self.pos)
                self.pos = n if nl < 0 else nl + 1
            elif ch in self._WS:
                self.pos += 1
            else:
                return

    def token(self) -> bytes:
        self._skip_ws_and_comments()
        if self.pos >= len(self.data):
            raise FormatError("truncated header", offset=self.pos)
        start = self.pos
        data = self.data
        while self.pos < len(data) and data[self.pos : self.pos + 1] not in self._WS:
            if data[self.pos : self.pos + 1] == b"#":
                break
            self.pos += 1
        return data[start : self.pos]

    def int_token(self, what: str) -> int:
        start_pos = self.pos
        tok = self.token()
        try:
            return int(tok)
        except ValueError:
            raise FormatError(f"expected integer for {what}, got {tok!r}", offset=start_pos) from None


def load_image(data: bytes, fmt: str | None = None) -> RasterGrid:
    """Decode PGM (gray) or PPM (RGB) bytes, ASCII or binary, maxval 255.

    `fmt`, when given, must be "PGM" or "PPM" and is checked against the
    file's magic number. Comments (#) are allowed in headers.
    """
    rdr = _NetpbmReader(data)
    magic = rdr.token()
    kinds = {b"P2": ("PGM", 1, False), b"P5": ("PGM", 1, True),
             b"P3": ("PPM", 3, False), b"P6": ("PPM", 3, True)}
    if magic not in kinds:
        raise FormatError(f"unsupported magic {magic!r}", offset=0)
    kind, channels, binary = kinds[magic]
    if fmt is not None and fmt.upper() != kind:
        raise FormatError(f"expected {fmt.upper()} but file is {kind}", offset=0)

    width = rdr.int_token("width")
    height = rdr.int_token("height")
    if width < 1 or height < 1:
        raise FormatError(f"bad dimensions {width}x{height}", offset=rdr.pos)
    maxval_pos = rdr.pos
    maxval = rdr.int_token("maxval")
    if maxval != 255:
        raise FormatError(f"maxval must be 255, got {maxval}", offset=maxval_pos)

    count = width * height * channels
    if binary:
        # Exactly one whitespace byte separates the header from the raster.
        rdr.pos += 1
        raw = data[rdr.pos : rdr.pos + count]
        if len(raw) < count:
            raise FormatError("truncated pixel data", offset=rdr.pos + len(raw))
        flat = np.frombuffer(raw, dtype=np.uint8, count=count)
    else:
        values = np.empty(count, dtype=np.uint8)
        for i in range(count):
            pos = rdr.pos
            try:
                v = rdr.int_token("pixel")
            except FormatError:
                raise FormatError(f"truncated pixel data: expected {count} samples, got {i}",
                                  offset=pos) from None
            if not 0 <= v <= 255:
                raise FormatError(f"pixel value {v} out of range", offset=pos)
            values[i] = v
        flat = values

    shape = (height, width) if channels == 1 else (height, width, 3)
    return RasterGrid(width, height, channels, flat.reshape(shape))


def save_image(img: RasterGrid, binary: bool = True) -> bytes:
    """Encode a RasterGrid as PGM (gray) or PPM (RGB) bytes, maxval 255."""
    if binary:
        magic = b"P5" if img.channels == 1 else b"P6"
        header = magic + b"\n%d %d\n255\n" % (img.width, img.height)
        return header + img.pixels.tobytes()
    magic = b"P2" if img.channels == 1 else b"P3"
    lines = [magic.decode(), f"{img.width} {img.height}", "255"]
    flat = img.pixels.reshape(img.height, -1)
    for row in flat:
        lines.append(" ".join(str(int(v)) for v in row))
    return ("\n".join(lines) + "\n").encode()


def to_grayscale(img: RasterGrid) -> RasterGrid:
    """Rec.601 luma: gray = round_half_up(0.299 R + 0.587 G + 0.114 B).

    Gray input is returned unchanged (documented no-op).
    """
    if img.channels == 1:
        return img
    rgb = img.pixels.astype(np.float64)
    gray = np.floor(0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2] + 0.5)
    gray = np.clip(gray, 0, 255).astype(np.uint8)
    return RasterGrid(img.width, img.height, 1, gray)


def binarize(img: RasterGrid, threshold: int) -> BitGrid:
    """Dark ink is occupied: bit = 1 where pixel < threshold (strict), else 0."""
    if img.channels != 1:
        raise ValueError("binarize expects a grayscale image")
    bits = (img.pixels < threshold).astype(np.uint8)
    return BitGrid(img.width, img.height, bits)


def resize_nearest(img: RasterGrid, new_width: int, new_height: int) -> RasterGrid:
    """Nearest-neighbor resize: source index = floor(dst_index * src / dst) per axis."""
    if new_width < 1 or new_height < 1:
        raise ValueError("target dimensions must be >= 1")
    rows = (np.arange(new_height) * img.height) // new_height
    cols = (np.arange(new_width) * img.width) // new_width
    pixels = img.pixels[np.ix_(rows, cols)]
    return RasterGrid(new_width, new_height, img.channels, pixels)
