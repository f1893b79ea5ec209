"""Binary formats: Netpbm images, spectrum files and model dumps.

Netpbm support covers binary P5 (gray) and P6 (RGB) with maxval up to 65535.
Pixels are returned as float64 on the 0-255 scale; 8-bit quantization only
happens in :func:`write_pnm`.
"""

from __future__ import annotations

import json
import re
import struct
from pathlib import Path

import numpy as np

from .spectral import Spectrum

SPECTRUM_MAGIC = b"FFLS"
SPECTRUM_VERSION = 1
_SPECTRUM_HEADER = struct.Struct("<4sHIIHB")

MODEL_MAGIC = b"FFLM"
MODEL_VERSION = 1


class FormatError(ValueError):
    """Malformed or unsupported file contents."""


_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*(\S+)")


def _header_tokens(data, count):
    pos = 2
    values = []
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise FormatError("truncated Netpbm header")
        try:
            values.append(int(m.group(1)))
        except ValueError:
            raise FormatError(f"bad Netpbm header field {m.group(1)!r}") from None
        pos = m.end()
    # exactly one whitespace byte separates the header from the raster
    return values, pos + 1


def read_pnm(path) -> np.ndarray:
    """Read a binary PGM/PPM into an ``(H, W, C)`` float array on 0-255."""
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"{path}: not a binary PGM/PPM (magic {magic!r})")
    channels = 1 if magic == b"P5" else 3
    (width, height, maxval), start = _header_tokens(data, 3)
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise FormatError(f"{path}: invalid header {width}x{height} maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height * channels
    raster = data[start : start + count * dtype.itemsize]
    if len(raster) != count * dtype.itemsize:
        raise FormatError(f"{path}: raster truncated")
    pixels = np.frombuffer(raster, dtype=dtype).astype(np.float64).reshape(height, width, channels)
    if maxval != 255:
        pixels = pixels * (255.0 / maxval)
    return pixels


def quantize(image) -> np.ndarray:
    """Round and clip 0-255 floats to uint8."""
    return np.clip(np.rint(np.asarray(image, dtype=np.float64)), 0, 255).astype(np.uint8)


def write_pnm(path, image) -> None:
    """Write ``(H, W)``, ``(H, W, 1)`` or ``(H, W, 3)`` 0-255 data as P5/P6."""
    arr = np.asarray(image)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise FormatError(f"cannot write shape {arr.shape} as PGM/PPM")
    height, width, channels = arr.shape
    magic = b"P5" if channels == 1 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (width, height)
    Path(path).write_bytes(header + quantize(arr).tobytes())


def write_spectrum(path, spectrum: Spectrum) -> None:
    """Serialize to the FFLS container (float32 real/imag pairs, little-endian)."""
    h, w, c = spectrum.shape
    header = _SPECTRUM_HEADER.pack(SPECTRUM_MAGIC, SPECTRUM_VERSION, h, w, c, int(spectrum.orthonormalized))
    payload = np.empty((h, w, c, 2), dtype="<f4")
    payload[..., 0] = spectrum.values.real
    payload[..., 1] = spectrum.values.imag
    Path(path).write_bytes(header + payload.tobytes())


def read_spectrum(path) -> Spectrum:
    data = Path(path).read_bytes()
    if len(data) < _SPECTRUM_HEADER.size:
        raise FormatError(f"{path}: too short for a spectrum header")
    magic, version, h, w, c, ortho = _SPECTRUM_HEADER.unpack_from(data)
    if magic != SPECTRUM_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != SPECTRUM_VERSION:
        raise FormatError(f"{path}: unsupported spectrum version {version}")
    payload = data[_SPECTRUM_HEADER.size :]
    if len(payload) != 8 * h * w * c:
        raise FormatError(f"{path}: payload has {len(payload)} bytes, header implies {8 * h * w * c}")
    pairs = np.frombuffer(payload, dtype="<f4").reshape(h, w, c, 2)
    return Spectrum(pairs[..., 0] + 1j * pairs[..., 1].astype(np.float64), orthonormalized=bool(ortho))


def write_model(path, arrays: dict, meta: dict | None = None) -> None:
    """Versioned float32 container: magic, u16 version, u32 header length,
    JSON header, then the arrays back to back in header order."""
    entries = []
    blobs = []
    offset = 0
    for name, arr in arrays.items():
        blob = np.ascontiguousarray(arr, dtype="<f4").tobytes()
        entries.append({"name": name, "shape": list(np.shape(arr)), "offset": offset, "nbytes": len(blob)})
        blobs.append(blob)
        offset += len(blob)
    header = json.dumps({"arrays": entries, "meta": meta or {}}, sort_keys=True, separators=(",", ":")).encode()
    prefix = MODEL_MAGIC + struct.pack("<HI", MODEL_VERSION, len(header))
    Path(path).write_bytes(prefix + header + b"".join(blobs))


def read_model(path):
    """Return ``(arrays, meta)`` from a model container."""
    data = Path(path).read_bytes()
    if data[:4] != MODEL_MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r}")
    version, hlen = struct.unpack_from("<HI", data, 4)
    if version != MODEL_VERSION:
        raise FormatError(f"{path}: unsupported model version {version}")
    header = json.loads(data[10 : 10 + hlen])
    body = data[10 + hlen :]
    arrays = {}
    for entry in header["arrays"]:
        chunk = body[entry["offset"] : entry["offset"] + entry["nbytes"]]
        arrays[entry["name"]] = np.frombuffer(chunk, dtype="<f4").reshape(entry["shape"]).copy()
    return arrays, header["meta"]
