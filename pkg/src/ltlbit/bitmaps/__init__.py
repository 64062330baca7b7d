"""Bitmap backends: one logical contract, three physical representations."""

from .base import BitCursor, Bitmap, LengthMismatchError, append_runs
from .raw import RawBitmap
from .rle import RleBitmap
from .roaring import RoaringBitmap

BACKENDS = {
    RawBitmap.backend_name: RawBitmap,
    RleBitmap.backend_name: RleBitmap,
    RoaringBitmap.backend_name: RoaringBitmap,
}


def make_empty(backend: str) -> Bitmap:
    """Fresh zero-length bitmap for a backend name (raw | rle64 | roaring)."""
    try:
        cls = BACKENDS[backend]
    except KeyError:
        raise ValueError(
            f"unknown backend {backend!r}; expected one of {sorted(BACKENDS)}"
        ) from None
    return cls()


def from_string(text: str, backend: str = "raw") -> Bitmap:
    """Build a bitmap from its debug rendering, e.g. ``"0110"``."""
    bad = set(text) - {"0", "1"}
    if bad:
        raise ValueError(f"bitmap string may only contain 0/1, got {bad}")
    return BACKENDS[backend].from_bits(int(c) for c in text)


__all__ = [
    "BACKENDS",
    "BitCursor",
    "Bitmap",
    "LengthMismatchError",
    "RawBitmap",
    "RleBitmap",
    "RoaringBitmap",
    "append_runs",
    "from_string",
    "make_empty",
]
