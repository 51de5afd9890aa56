"""Small helpers for the binary file formats.

All integers are little-endian.  Strings are a u32 byte length followed by
UTF-8 bytes.  Each format starts with a 4-byte magic tag; readers check it
before touching anything else.
"""

from __future__ import annotations

import struct
from typing import BinaryIO

from .errors import FormatError


def write_u8(fh: BinaryIO, value: int) -> None:
    fh.write(struct.pack("<B", value))


def write_u32(fh: BinaryIO, value: int) -> None:
    fh.write(struct.pack("<I", value))


def write_u64(fh: BinaryIO, value: int) -> None:
    fh.write(struct.pack("<Q", value))


def write_f64(fh: BinaryIO, value: float) -> None:
    fh.write(struct.pack("<d", value))


def write_str(fh: BinaryIO, value: str) -> None:
    data = value.encode("utf-8")
    write_u32(fh, len(data))
    fh.write(data)


def write_bytes(fh: BinaryIO, value: bytes) -> None:
    write_u32(fh, len(value))
    fh.write(value)


def _read_exact(fh: BinaryIO, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise FormatError(f"truncated file: wanted {n} bytes, got {len(data)}")
    return data


def read_u8(fh: BinaryIO) -> int:
    return struct.unpack("<B", _read_exact(fh, 1))[0]


def read_u32(fh: BinaryIO) -> int:
    return struct.unpack("<I", _read_exact(fh, 4))[0]


def read_u64(fh: BinaryIO) -> int:
    return struct.unpack("<Q", _read_exact(fh, 8))[0]


def read_f64(fh: BinaryIO) -> float:
    return struct.unpack("<d", _read_exact(fh, 8))[0]


def read_str(fh: BinaryIO) -> str:
    return _read_exact(fh, read_u32(fh)).decode("utf-8")


def read_bytes(fh: BinaryIO) -> bytes:
    return _read_exact(fh, read_u32(fh))


def check_magic(fh: BinaryIO, magic: bytes, what: str) -> None:
    """Read and verify a 4-byte magic tag; raise before any state is built."""
    got = fh.read(len(magic))
    if got != magic:
        raise FormatError(f"not a {what} file: bad magic {got!r}, expected {magic!r}")
