"""Distances and the closed-form constants of fading metrics.

Every bound is computed from the doubling parameters (A, C) of a
:class:`MetricSpec`, never from dimension-specific geometry, so the same code
serves the plane, the line and higher-dimensional Euclidean spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DomainError, FadingViolation, ValidationError

# Density of the hexagonal disc packing, pi*sqrt(3)/6 rounded.
PLANE_PACKING_CONSTANT = 0.907


@dataclass(frozen=True)
class MetricSpec:
    dim: int
    packing_constant: Optional[float] = None
    kind: str = "euclidean"

    def __post_init__(self):
        if self.kind != "euclidean":
            raise ValidationError(f"unsupported metric kind {self.kind!r}")
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValidationError(f"metric dim must be a positive integer, got {self.dim!r}")
        if self.packing_constant is None:
            if self.dim != 2:
                raise ValidationError(f"packing constant C is required for dim={self.dim}")
            object.__setattr__(self, "packing_constant", PLANE_PACKING_CONSTANT)
        if not self.packing_constant > 0:
            raise ValidationError("packing constant C must be positive")

    @property
    def assouad_dim(self) -> int:
        return self.dim

    @property
    def C(self) -> float:
        return float(self.packing_constant)


@dataclass(frozen=True)
class FadingParams:
    alpha: float
    metric: MetricSpec

    def __post_init__(self):
        if not self.alpha > self.metric.dim:
            raise FadingViolation(
                f"path-loss exponent alpha={self.alpha} must exceed the doubling "
                f"dimension {self.metric.dim}"
            )


def distance(p: Sequence[float], q: Sequence[float], m: Optional[MetricSpec] = None) -> float:
    if len(p) != len(q):
        raise ValidationError(f"dimension mismatch: {len(p)} vs {len(q)}")
    if m is not None and len(p) != m.dim:
        raise ValidationError(f"points have {len(p)} coordinates, metric has dim {m.dim}")
    if len(p) == 1:
        # exact for big integers on the line
        return float(abs(p[0] - q[0]))
    return math.hypot(*(a - b for a, b in zip(p, q)))


def zeta(x: float) -> float:
    """Riemann zeta function for real ``x > 1``.

    A direct partial sum up to ``T - 1`` plus the Euler-Maclaurin tail
    ``T^(1-x)/(x-1) + T^-x/2 + x T^(-x-1)/12 - x(x+1)(x+2) T^(-x-3)/720``.
    With ``T = 1000`` the remainder is below ``1e-20`` for every ``x > 1``.
    """
    if not x > 1:
        raise DomainError(f"zeta is defined for x > 1 only, got {x}")
    T = 1000
    head = math.fsum(t ** -x for t in range(1, T))
    tail = (
        T ** (1 - x) / (x - 1)
        + 0.5 * T ** -x
        + x * T ** (-x - 1) / 12
        - x * (x + 1) * (x + 2) * T ** (-x - 3) / 720
    )
    return head + tail


def c_prime(f: FadingParams) -> float:
    A = f.metric.dim
    if not f.alpha > A:
        raise FadingViolation(f"alpha={f.alpha} must exceed A={A}")
    return f.alpha * f.metric.C * 4**A * zeta(f.alpha + 1 - A)


def z1(p: float, f: FadingParams) -> float:
    """Sufficient sender separation (in units of link length) for a p-signal set."""
    if not p > 0:
        raise DomainError(f"z1 requires p > 0, got {p}")
    return 4 * (p * c_prime(f)) ** (1 / f.alpha)


def z2(p: float, alpha: float) -> float:
    """Necessary sender separation of any p-signal set of nearly-equilength links."""
    if not p > 0:
        raise DomainError(f"z2 requires p > 0, got {p}")
    return p ** (1 / alpha) - 1


def packing_bound(a: float, b: float, metric: MetricSpec) -> float:
    """Max size of a ``U_b``-independent set inside a closed ``U_a`` neighbourhood."""
    if not (b > 0 and a > 0):
        raise DomainError("packing radii must be positive")
    return metric.C * (1 + 2 * a / b) ** metric.dim


def equilength_ratio_bound(p_suff: float, p_nec: float, f: FadingParams) -> float:
    zn = z2(p_nec, f.alpha)
    if zn <= 0:
        raise DomainError(f"degenerate bound: z2({p_nec}) = {zn} <= 0")
    return packing_bound(z1(p_suff, f), zn, f.metric)
