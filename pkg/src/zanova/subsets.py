"""Bitmask encoding of variable subsets.

A subset of the input dimensions is stored as an integer mask with bit i
set (0-based) when dimension i belongs to the subset. Enumeration is by
ascending mask value; report labels are 1-based and comma separated, so
the subset {dims 0, 2} prints as "1,3".
"""
from __future__ import annotations

from typing import Iterable


def subset_mask(subset, d: int) -> int:
    """Normalize ``subset`` to a bitmask.

    Accepts an integer mask, an iterable of 0-based dimension indices, or
    a 1-based label string such as "1,3".
    """
    if isinstance(subset, str):
        return parse_subset_label(subset, d)
    try:
        mask = int(subset)
    except TypeError:
        mask = 0
        for i in subset:
            i = int(i)
            if not 0 <= i < d:
                raise ValueError(f"dimension index {i} out of range for d={d}")
            mask |= 1 << i
        return mask
    if not 0 <= mask < (1 << d):
        raise ValueError(f"subset mask {mask} out of range for d={d}")
    return mask


def subset_dims(mask: int) -> tuple[int, ...]:
    """0-based dimension indices contained in ``mask``, ascending."""
    dims = []
    i = 0
    while mask:
        if mask & 1:
            dims.append(i)
        mask >>= 1
        i += 1
    return tuple(dims)


def subset_label(mask: int) -> str:
    """1-based comma-separated label, e.g. mask 0b101 -> "1,3"."""
    return ",".join(str(i + 1) for i in subset_dims(mask))


def parse_subset_label(label: str, d: int) -> int:
    parts = [p.strip() for p in label.split(",")]
    if not parts or any(not p for p in parts):
        raise ValueError(f"malformed subset label {label!r}")
    mask = 0
    for p in parts:
        try:
            i = int(p)
        except ValueError:
            raise ValueError(f"malformed subset label {label!r}") from None
        if not 1 <= i <= d:
            raise ValueError(f"subset label {label!r} names dimension {i}, valid range 1..{d}")
        bit = 1 << (i - 1)
        if mask & bit:
            raise ValueError(f"subset label {label!r} repeats dimension {i}")
        mask |= bit
    return mask


def all_subsets(d: int, max_order: int | None = None) -> list[int]:
    """Nonempty subset masks in ascending mask order, capped by cardinality."""
    masks = range(1, 1 << d)
    if max_order is None:
        return list(masks)
    return [m for m in masks if m.bit_count() <= max_order]


def report_order(masks: Iterable[int]) -> list[int]:
    """Masks sorted the way tables read: by cardinality, then mask value."""
    return sorted(masks, key=lambda m: (m.bit_count(), m))
