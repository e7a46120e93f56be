"""Signed base-2 logarithmic scalars for values far outside the float range."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class LogScalar:
    sign: int
    log2mag: float = 0.0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.sign == 0:
            object.__setattr__(self, "log2mag", -math.inf)
        elif math.isnan(self.log2mag):
            raise ValueError("log2mag is NaN")

    @classmethod
    def zero(cls) -> LogScalar:
        return cls(0)

    @classmethod
    def from_log2(cls, log2mag: float, sign: int = 1) -> LogScalar:
        if log2mag == -math.inf:
            return cls(0)
        return cls(sign, log2mag)

    @classmethod
    def from_value(cls, x) -> LogScalar:
        """Accepts floats and arbitrarily large Python integers."""
        if x == 0:
            return cls(0)
        sign = 1 if x > 0 else -1
        return cls(sign, math.log2(abs(x)))

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.pow(2.0, self.log2mag)
        except OverflowError:
            return self.sign * math.inf

    __float__ = to_float

    def __neg__(self) -> LogScalar:
        return LogScalar(-self.sign, self.log2mag)

    def __mul__(self, other: LogScalar) -> LogScalar:
        if self.sign == 0 or other.sign == 0:
            return LogScalar(0)
        return LogScalar(self.sign * other.sign, self.log2mag + other.log2mag)

    def __truediv__(self, other: LogScalar) -> LogScalar:
        if other.sign == 0:
            raise ZeroDivisionError("LogScalar division by zero")
        if self.sign == 0:
            return LogScalar(0)
        return LogScalar(self.sign * other.sign, self.log2mag - other.log2mag)

    def __add__(self, other: LogScalar) -> LogScalar:
        return log_sum([self, other])

    def __sub__(self, other: LogScalar) -> LogScalar:
        return log_sum([self, -other])

    def _key(self):
        if self.sign == 0:
            return (0, 0.0)
        return (self.sign, self.sign * self.log2mag)

    def __lt__(self, other: LogScalar) -> bool:
        return self._key() < other._key()

    def __le__(self, other: LogScalar) -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: LogScalar) -> bool:
        return self._key() > other._key()

    def __ge__(self, other: LogScalar) -> bool:
        return self._key() >= other._key()


def log_sum(terms: Iterable[LogScalar]) -> LogScalar:
    """Sum after aligning exponents to the largest magnitude; compensated via fsum."""
    terms = [t for t in terms if t.sign != 0]
    if not terms:
        return LogScalar(0)
    top = max(t.log2mag for t in terms)
    if top == math.inf:
        signs = {t.sign for t in terms if t.log2mag == math.inf}
        if len(signs) > 1:
            raise ValueError("inf - inf in LogScalar sum")
        return LogScalar(signs.pop(), math.inf)
    total = math.fsum(t.sign * math.pow(2.0, t.log2mag - top) for t in terms)
    if total == 0:
        return LogScalar(0)
    return LogScalar(1 if total > 0 else -1, top + math.log2(abs(total)))


def log2_sum(log2_values: Iterable[float]) -> float:
    """log2 of a sum of positive terms given by their log2; ``-inf`` for an empty sum."""
    vals = [x for x in log2_values if x != -math.inf]
    if not vals:
        return -math.inf
    top = max(vals)
    if top == math.inf:
        return math.inf
    return top + math.log2(math.fsum(math.pow(2.0, x - top) for x in vals))
