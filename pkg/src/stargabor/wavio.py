"""Minimal RIFF/WAVE reader and writer for mono 16-bit PCM.

Only the format this package produces and consumes is supported; other
layouts raise rather than being silently resampled or mixed down.
Samples map to float64 in [-1, 1) by dividing by 32768, and the writer
rounds back with clipping, so quantized data round-trips exactly.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import CorruptHeader, UnsupportedFormat


def load_wav(path: str):
    """Read a mono PCM16 file; returns (samples as float64, sample_rate)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptHeader(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos:pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + size]
        if len(body) < size:
            raise CorruptHeader(f"{path}: chunk {cid!r} truncated")
        if cid == b"fmt ":
            if size < 16:
                raise CorruptHeader(f"{path}: fmt chunk too small")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word aligned

    if fmt is None or payload is None:
        raise CorruptHeader(f"{path}: missing fmt or data chunk")
    audio_format, channels, sample_rate, _rate, _align, bits = fmt
    if audio_format != 1:
        raise UnsupportedFormat(f"{path}: compressed format {audio_format}")
    if channels != 1:
        raise UnsupportedFormat(f"{path}: {channels} channels, need mono")
    if bits != 16:
        raise UnsupportedFormat(f"{path}: {bits}-bit samples, need 16")

    samples = np.frombuffer(payload[:len(payload) // 2 * 2], dtype="<i2")
    return samples.astype(np.float64) / 32768.0, int(sample_rate)


def write_wav(path: str, x: np.ndarray, sample_rate: int) -> None:
    """Write float samples as mono PCM16, rounding and clipping to range."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise UnsupportedFormat("only mono vectors are written")
    q = np.clip(np.rint(x * 32768.0), -32768, 32767).astype("<i2")
    body = q.tobytes()
    with open(path, "wb") as fh:
        fh.write(b"RIFF")
        fh.write(struct.pack("<I", 36 + len(body)))
        fh.write(b"WAVE")
        fh.write(b"fmt ")
        fh.write(struct.pack("<IHHIIHH", 16, 1, 1, sample_rate,
                             sample_rate * 2, 2, 16))
        fh.write(b"data")
        fh.write(struct.pack("<I", len(body)))
        fh.write(body)
