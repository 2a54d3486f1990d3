"""PGM (P2/P5) image files and mask rendering.

PGM is the primary on-disk format: dependency-free and bit-exact in tests.
Only maxval 255 is supported.  Writing quantizes by round-half-away-from-
zero and clamps to [0, 255], so a roundtrip of an 8-bit-valued image is
exact.  Masks render black (0) = damaged, white (255) = kept.  A minimal
8-bit grayscale PNG writer is included for mask figures.
"""

import struct
import zlib

import numpy as np

from .core import as_image, as_mask


class PgmParseError(ValueError):
    """Malformed PGM input; message carries the byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def quantize(img):
    """Round half away from zero, clamp to [0, 255], return uint8."""
    img = np.asarray(img, dtype=np.float64)
    rounded = np.sign(img) * np.floor(np.abs(img) + 0.5)
    return np.clip(rounded, 0, 255).astype(np.uint8)


class _Scanner:
    """Tokenizer over raw PGM bytes that tracks offsets and skips comments."""

    def __init__(self, data):
        self.data = data
        self.pos = 0

    def _skip_filler(self):
        while self.pos < len(self.data):
            c = self.data[self.pos:self.pos + 1]
            if c == b"#":
                nl = self.data.find(b"\n", self.pos)
                self.pos = len(self.data) if nl < 0 else nl + 1
            elif c.isspace():
                self.pos += 1
            else:
                return

    def token(self, what):
        self._skip_filler()
        if self.pos >= len(self.data):
            raise PgmParseError(f"unexpected end of file while reading {what}", self.pos)
        start = self.pos
        while self.pos < len(self.data) and not self.data[self.pos:self.pos + 1].isspace():
            self.pos += 1
        return self.data[start:self.pos], start

    def int_token(self, what):
        tok, start = self.token(what)
        try:
            return int(tok), start
        except ValueError:
            raise PgmParseError(f"expected integer for {what}, got {tok!r}", start) from None


def read_pgm(path):
    """Read a P2 or P5 PGM file (maxval 255) as a float64 image."""
    with open(path, "rb") as fh:
        data = fh.read()
    sc = _Scanner(data)
    magic, off = sc.token("magic number")
    if magic not in (b"P2", b"P5"):
        raise PgmParseError(f"unsupported magic {magic!r}, expected P2 or P5", off)
    width, off_w = sc.int_token("width")
    height, off_h = sc.int_token("height")
    if width < 1:
        raise PgmParseError(f"width must be positive, got {width}", off_w)
    if height < 1:
        raise PgmParseError(f"height must be positive, got {height}", off_h)
    maxval, off_m = sc.int_token("maxval")
    if maxval != 255:
        raise PgmParseError(f"only maxval 255 is supported, got {maxval}", off_m)
    n = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the payload
        if sc.pos >= len(data) or not data[sc.pos:sc.pos + 1].isspace():
            raise PgmParseError("missing whitespace before binary payload", sc.pos)
        start = sc.pos + 1
        if len(data) - start < n:
            raise PgmParseError(
                f"truncated P5 payload: need {n} bytes, have {len(data) - start}",
                len(data))
        pixels = np.frombuffer(data[start:start + n], dtype=np.uint8)
    else:
        vals = np.empty(n, dtype=np.uint8)
        for k in range(n):
            v, off_v = sc.int_token(f"pixel {k}")
            if not 0 <= v <= 255:
                raise PgmParseError(f"pixel value {v} out of range [0, 255]", off_v)
            vals[k] = v
        pixels = vals
    return pixels.reshape(height, width).astype(np.float64)


def write_pgm(img, path, mode="P5"):
    """Write an image as PGM, quantizing to 8 bits first."""
    if mode not in ("P2", "P5"):
        raise ValueError(f"mode must be 'P2' or 'P5', got {mode!r}")
    img = as_image(img)
    q = quantize(img)
    h, w = q.shape
    header = f"{mode}\n{w} {h}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        if mode == "P5":
            fh.write(q.tobytes())
        else:
            for row in q:
                fh.write(" ".join(str(int(v)) for v in row).encode("ascii"))
                fh.write(b"\n")


def write_mask_pgm(mask, path, mode="P5"):
    """Render a mask as PGM: black = damaged (bit 0), white = kept (bit 1)."""
    mask = as_mask(mask)
    write_pgm(mask.astype(np.float64) * 255.0, path, mode=mode)


def read_mask_pgm(path):
    """Read a mask rendered by write_mask_pgm (>= 128 counts as kept)."""
    img = read_pgm(path)
    return (img >= 128).astype(np.uint8)


def _png_chunk(tag, payload):
    chunk = tag + payload
    return struct.pack(">I", len(payload)) + chunk + struct.pack(
        ">I", zlib.crc32(chunk) & 0xFFFFFFFF)


def write_mask_png(mask, path):
    """Render a mask as an 8-bit grayscale non-interlaced PNG."""
    mask = as_mask(mask)
    h, w = mask.shape
    gray = (mask * np.uint8(255))
    raw = b"".join(b"\x00" + gray[i].tobytes() for i in range(h))
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)
    with open(path, "wb") as fh:
        fh.write(b"\x89PNG\r\n\x1a\n")
        fh.write(_png_chunk(b"IHDR", ihdr))
        fh.write(_png_chunk(b"IDAT", zlib.compress(raw, 9)))
        fh.write(_png_chunk(b"IEND", b""))
