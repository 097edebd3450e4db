# -*- coding: utf-8 -*-
"""
PGM Image Adapter

Grayscale PGM images (ASCII P2 and binary P5) through OpenCV for the 8 and
16 bit depths. Other maxval values (12-bit 4095, 10-bit 1023, ...) are read
and written directly so the header and the pixel counts survive a round trip.
Pixels are mapped to [0, 1] on read and clamped, rescaled and rounded on
write. An image of h rows and w columns becomes the lattice (h, w): the row
index is the fast coordinate of the column-major signal.
"""

import logging
from pathlib import Path
from typing import List, Tuple

import cv2
import numpy as np

from adapters.base_adapter import AdapterError, BaseSignalAdapter, ParseError, PathLike, SignalData
from core.graph_model import LatticeSpec


logger = logging.getLogger(__name__)

MAGIC_ASCII = "P2"
MAGIC_BINARY = "P5"
# depths OpenCV writes natively
OPENCV_MAXVALS = (255, 65535)


def _scan_header(head: bytes) -> Tuple[List[bytes], int]:
    """First four header tokens and the offset of the pixel data"""
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < 4 and pos < len(head):
        ch = head[pos:pos + 1]
        if ch == b"#":
            end = head.find(b"\n", pos)
            pos = len(head) if end < 0 else end + 1
        elif ch.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(head) and not head[pos:pos + 1].isspace() and head[pos:pos + 1] != b"#":
                pos += 1
            tokens.append(head[start:pos])
    # a single whitespace byte separates maxval from the raster
    return tokens, pos + 1


def _parse_header(path: PathLike, head: bytes) -> Tuple[str, int, int, int, int]:
    tokens, offset = _scan_header(head)
    if len(tokens) < 4:
        raise ParseError(f"{path}: truncated PGM header")

    magic = tokens[0].decode("ascii", errors="replace")
    if magic not in (MAGIC_ASCII, MAGIC_BINARY):
        raise ParseError(f"{path}: not a grayscale PGM (magic '{magic}')")
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError as e:
        raise ParseError(f"{path}: malformed PGM header") from e
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ParseError(f"{path}: invalid PGM dimensions or maxval")
    return magic, width, height, maxval, offset


def _read_bytes(path: PathLike) -> bytes:
    try:
        with open(path, "rb") as handle:
            return handle.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e


def read_pgm_header(path: PathLike) -> Tuple[str, int, int, int]:
    """(magic, width, height, maxval) from a PGM header"""
    magic, width, height, maxval, _ = _parse_header(path, _read_bytes(path))
    return magic, width, height, maxval


def _decode_raster(path: PathLike, body: bytes, magic: str, height: int, width: int, maxval: int) -> np.ndarray:
    count = height * width
    if magic == MAGIC_BINARY:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        if len(body) < count * dtype.itemsize:
            raise ParseError(f"{path}: raster has {len(body)} bytes, expected {count * dtype.itemsize}")
        pixels = np.frombuffer(body, dtype=dtype, count=count)
    else:
        text = b" ".join(line.split(b"#", 1)[0] for line in body.split(b"\n"))
        try:
            pixels = np.array([int(t) for t in text.split()], dtype=np.int64)
        except ValueError as e:
            raise ParseError(f"{path}: non-integer pixel in ASCII raster") from e
        if pixels.size < count:
            raise ParseError(f"{path}: raster has {pixels.size} pixels, expected {count}")
        pixels = pixels[:count]
    if np.any(pixels > maxval):
        raise ParseError(f"{path}: pixel value above maxval {maxval}")
    return pixels.reshape(height, width)


def _encode(pixels: np.ndarray, magic: str, maxval: int) -> bytes:
    height, width = pixels.shape
    header = f"{magic}\n{width} {height}\n{maxval}\n".encode("ascii")
    if magic == MAGIC_BINARY:
        dtype = ">u2" if maxval > 255 else np.uint8
        return header + pixels.astype(dtype).tobytes()
    rows = "\n".join(" ".join(str(int(v)) for v in row) for row in pixels)
    return header + rows.encode("ascii") + b"\n"


class PgmAdapter(BaseSignalAdapter):
    """P2 / P5 images; config 'binary' forces the output flavour"""

    extensions = (".pgm",)

    def _validate_config(self) -> None:
        binary = self.config.get('binary')
        if binary is not None and not isinstance(binary, bool):
            raise AdapterError("PGM option 'binary' must be a boolean")

    def read(self, path: PathLike) -> SignalData:
        raw = _read_bytes(path)
        magic, width, height, maxval, offset = _parse_header(path, raw)
        if maxval in OPENCV_MAXVALS:
            image = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
            if image is None or image.ndim != 2:
                raise ParseError(f"{path}: OpenCV could not decode the image")
            if image.shape != (height, width):
                raise ParseError(f"{path}: header says {height}x{width}, decoded {image.shape}")
        else:
            image = _decode_raster(path, raw[offset:], magic, height, width, maxval)

        values = image.astype(np.float64) / maxval
        logger.debug(f"read {height}x{width} PGM ({magic}, maxval {maxval}) from {path}")
        return SignalData(values=values.ravel(order="F"),
                          lattice=LatticeSpec(height, width),
                          meta={'format': 'pgm', 'binary': magic == MAGIC_BINARY, 'maxval': maxval})

    def write(self, path: PathLike, data: SignalData) -> None:
        if data.lattice is None or len(data.lattice.dims) != 2:
            raise AdapterError("writing a PGM needs a two-dimensional lattice")
        height, width = data.lattice.dims
        maxval = data.meta.get('maxval', 255)
        if not isinstance(maxval, (int, np.integer)) or not 0 < maxval < 65536:
            raise AdapterError(f"PGM maxval must be an integer in 1..65535, got {maxval!r}")
        maxval = int(maxval)

        image = np.clip(np.asarray(data.values, dtype=np.float64), 0.0, 1.0).reshape((height, width), order="F")
        pixels = np.rint(image * maxval)

        binary = self.config.get('binary', data.meta.get('binary', True))
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        if maxval in OPENCV_MAXVALS:
            dtype = np.uint16 if maxval > 255 else np.uint8
            if not cv2.imwrite(str(path), pixels.astype(dtype), [cv2.IMWRITE_PXM_BINARY, 1 if binary else 0]):
                raise AdapterError(f"OpenCV failed to write {path}")
        else:
            try:
                Path(path).write_bytes(_encode(pixels.astype(np.int64), MAGIC_BINARY if binary else MAGIC_ASCII,
                                               maxval))
            except OSError as e:
                raise AdapterError(f"cannot write {path}: {e}") from e
        logger.debug(f"wrote {height}x{width} PGM (maxval {maxval}) to {path}")
