"""r-ary digit expansions and the basis partitions built on them.

Digits are most-significant first: ``a = sum(r**(m-1-j) * a_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass


class OutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class DigitProfile:
    r: int
    m: int

    def __post_init__(self):
        if self.r < 2 or self.m < 1:
            raise OutOfRange(f"need r >= 2 and m >= 1, got r={self.r}, m={self.m}")

    @property
    def ell(self) -> int:
        return self.r ** self.m

    def _check_index(self, a: int) -> None:
        if not 0 <= a < self.ell:
            raise OutOfRange(f"index {a} outside [0, {self.ell})")

    def _check_coord(self, i: int, t: int | None = None) -> None:
        if not 0 <= i < self.m:
            raise OutOfRange(f"digit position {i} outside [0, {self.m})")
        if t is not None and not 0 <= t < self.r:
            raise OutOfRange(f"digit value {t} outside [0, {self.r})")


def digits(a: int, profile: DigitProfile) -> tuple[int, ...]:
    profile._check_index(a)
    out = [0] * profile.m
    for j in range(profile.m - 1, -1, -1):
        a, out[j] = divmod(a, profile.r)
    return tuple(out)


def compose(ds: tuple[int, ...] | list[int], profile: DigitProfile) -> int:
    if len(ds) != profile.m or any(not 0 <= d < profile.r for d in ds):
        raise OutOfRange(f"bad digit vector {ds!r}")
    a = 0
    for d in ds:
        a = a * profile.r + d
    return a


def digit(a: int, i: int, profile: DigitProfile) -> int:
    """The single digit ``a_i``."""
    profile._check_index(a)
    profile._check_coord(i)
    return (a // profile.r ** (profile.m - 1 - i)) % profile.r


def v_indices(i: int, t: int, profile: DigitProfile) -> list[int]:
    """Ascending indices ``a`` with ``a_i == t``."""
    profile._check_coord(i, t)
    return [a for a in range(profile.ell) if digit(a, i, profile) == t]


def digit_replace(a: int, i: int, t: int, profile: DigitProfile) -> int:
    profile._check_coord(i, t)
    weight = profile.r ** (profile.m - 1 - i)
    return a + (t - digit(a, i, profile)) * weight
