"""Minimal 8-bit PNG writer and reader.

Writes truecolour (RGB) images with filter type 0 on every row and a fixed
zlib level, so the output bytes depend on the pixels only. Reads 8-bit
greyscale, RGB and RGBA non-interlaced streams with any filter type.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

SIGNATURE = b"\x89PNG\r\n\x1a\n"
COMPRESSION_LEVEL = 9

_CHANNELS = {0: 1, 2: 3, 6: 4}


class PNGError(ValueError):
    pass


def _chunk(kind: bytes, data: bytes) -> bytes:
    crc = zlib.crc32(data, zlib.crc32(kind)) & 0xFFFFFFFF
    return struct.pack(">I", len(data)) + kind + data + struct.pack(">I", crc)


def encode(pixels: np.ndarray) -> bytes:
    """Encode an ``(height, width, 3)`` uint8 array."""
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise PNGError(f"expected (h, w, 3) pixels, got shape {pixels.shape}")
    height, width = pixels.shape[:2]
    if width == 0 or height == 0:
        raise PNGError("PNG cannot hold an empty image")
    raw = np.zeros((height, width * 3 + 1), dtype=np.uint8)
    raw[:, 1:] = pixels.reshape(height, width * 3)
    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return b"".join([
        SIGNATURE,
        _chunk(b"IHDR", header),
        _chunk(b"IDAT", zlib.compress(raw.tobytes(), COMPRESSION_LEVEL)),
        _chunk(b"IEND", b""),
    ])


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    return b if pb <= pc else c


def _unfilter(data: bytes, width: int, height: int, bpp: int) -> np.ndarray:
    stride = width * bpp
    if len(data) != height * (stride + 1):
        raise PNGError(f"decompressed size {len(data)} != expected {height * (stride + 1)}")
    out = np.zeros((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.int64)
    for y in range(height):
        ftype = data[y * (stride + 1)]
        line = np.frombuffer(data, np.uint8, stride, y * (stride + 1) + 1).astype(np.int64)
        if ftype == 0:
            cur = line
        elif ftype == 2:
            cur = (line + prev) & 0xFF
        elif ftype in (1, 3, 4):
            # left-dependent filters need a sequential pass
            cur = line.copy()
            for i in range(stride):
                a = int(cur[i - bpp]) if i >= bpp else 0
                if ftype == 1:
                    pred = a
                elif ftype == 3:
                    pred = (a + int(prev[i])) >> 1
                else:
                    c = int(prev[i - bpp]) if i >= bpp else 0
                    pred = _paeth(a, int(prev[i]), c)
                cur[i] = (cur[i] + pred) & 0xFF
        else:
            raise PNGError(f"unknown filter type {ftype} on row {y}")
        out[y] = cur
        prev = cur
    return out


def decode(blob: bytes) -> np.ndarray:
    """Decode a PNG stream to an ``(height, width, 3)`` uint8 array."""
    if not blob.startswith(SIGNATURE):
        raise PNGError("missing PNG signature")
    pos = len(SIGNATURE)
    header = None
    idat = []
    seen_end = False
    while pos < len(blob):
        if pos + 8 > len(blob):
            raise PNGError(f"truncated chunk header at byte {pos}")
        length, kind = struct.unpack(">I4s", blob[pos:pos + 8])
        end = pos + 12 + length
        if end > len(blob):
            raise PNGError(f"truncated {kind!r} chunk at byte {pos}")
        data = blob[pos + 8:pos + 8 + length]
        (crc,) = struct.unpack(">I", blob[end - 4:end])
        if zlib.crc32(data, zlib.crc32(kind)) & 0xFFFFFFFF != crc:
            raise PNGError(f"CRC mismatch in {kind!r} chunk at byte {pos}")
        if kind == b"IHDR":
            header = struct.unpack(">IIBBBBB", data)
        elif kind == b"IDAT":
            idat.append(data)
        elif kind == b"IEND":
            seen_end = True
            break
        elif not kind[0] & 0x20:
            raise PNGError(f"unsupported critical chunk {kind!r}")
        pos = end
    if header is None:
        raise PNGError("missing IHDR chunk")
    if not seen_end:
        raise PNGError("missing IEND chunk")
    width, height, depth, ctype, comp, filt, interlace = header
    if depth != 8 or ctype not in _CHANNELS or comp or filt or interlace:
        raise PNGError(f"unsupported PNG format: depth={depth} colour type={ctype} interlace={interlace}")
    try:
        raw = zlib.decompress(b"".join(idat))
    except zlib.error as exc:
        raise PNGError(f"corrupt image data: {exc}") from None
    ch = _CHANNELS[ctype]
    rows = _unfilter(raw, width, height, ch).reshape(height, width, ch)
    if ch == 1:
        return np.repeat(rows, 3, axis=2)
    return np.ascontiguousarray(rows[:, :, :3])
