"""Links, instances, oblivious power assignments and SINR feasibility.

Link sets are passed around as sequences of *indices* into
``Instance.links``; link ids only matter for serialization.

Two numeric paths exist.  ``precision="float"`` works with numpy arrays of
coordinates.  ``precision="log2"`` keeps coordinates as exact Python
integers on a line and evaluates every affectance through base-2 logarithms,
which is what the doubly-exponential lower-bound instances need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ColocationError, ValidationError
from .logscalar import LogScalar, log2_sum
from .metricspace import FadingParams, distance

UNI = "uni"
BI = "bi"
MODES = (UNI, BI)
PRECISIONS = ("float", "log2")


@dataclass(frozen=True)
class Link:
    id: int
    sender: tuple
    receiver: tuple
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "sender", tuple(self.sender))
        object.__setattr__(self, "receiver", tuple(self.receiver))
        if self.weight < 0:
            raise ValidationError(f"link {self.id}: weight must be nonnegative")
        if len(self.sender) != len(self.receiver):
            raise ValidationError(f"link {self.id}: sender/receiver dimension mismatch")
        if all(a == b for a, b in zip(self.sender, self.receiver)):
            raise ValidationError(f"link {self.id}: sender equals receiver")

    @property
    def length(self) -> float:
        return distance(self.sender, self.receiver)

    @property
    def log2_length(self) -> float:
        return _log2_dist(self.sender, self.receiver)


def _log2_dist(p, q) -> float:
    if len(p) == 1:
        d = abs(p[0] - q[0])
        return math.log2(d) if d else -math.inf
    d = math.hypot(*(a - b for a, b in zip(p, q)))
    return math.log2(d) if d else -math.inf


def directed_distance(v: Link, w: Link, mode: str = UNI) -> float:
    """Distance from link ``v`` to link ``w``; ``d(s_v, r_w)`` or the closest endpoints."""
    if v is w or v == w:
        return v.length
    if mode == UNI:
        return distance(v.sender, w.receiver)
    if mode == BI:
        return min(
            distance(v.sender, w.sender),
            distance(v.sender, w.receiver),
            distance(v.receiver, w.sender),
            distance(v.receiver, w.receiver),
        )
    raise ValidationError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class PowerAssignment:
    """Oblivious power ``P(l) = scale * l**gamma * (lg l)**delta``."""

    gamma: float = 0.0
    delta: float = 0.0
    scale: float = 1.0
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if not self.scale > 0:
            raise ValidationError("power scale must be positive")

    @classmethod
    def uniform(cls, scale: float = 1.0) -> PowerAssignment:
        return cls(0.0, 0.0, scale, name="uniform")

    @classmethod
    def linear(cls, alpha: float) -> PowerAssignment:
        return cls(float(alpha), 0.0, name="linear")

    @classmethod
    def mean(cls, alpha: float) -> PowerAssignment:
        return cls(alpha / 2, 0.0, name="mean")

    @classmethod
    def psi(cls, alpha: float) -> PowerAssignment:
        return cls(float(alpha), -1.0, name="psi")

    @classmethod
    def log_power(cls) -> PowerAssignment:
        return cls(0.0, 1.0, name="log")

    @classmethod
    def parse(cls, spec: str, alpha: float) -> PowerAssignment:
        """``uniform``, ``linear``, ``mean``, ``psi``, ``log`` or ``custom:gamma,delta``."""
        named = {
            "uniform": lambda: cls.uniform(),
            "linear": lambda: cls.linear(alpha),
            "mean": lambda: cls.mean(alpha),
            "psi": lambda: cls.psi(alpha),
            "log": lambda: cls.log_power(),
        }
        if spec in named:
            return named[spec]()
        if spec.startswith("custom:"):
            try:
                g, d = (float(x) for x in spec[len("custom:"):].split(","))
            except ValueError:
                raise ValidationError(f"bad custom power {spec!r}, expected custom:gamma,delta")
            return cls(g, d)
        raise ValidationError(f"unknown power assignment {spec!r}")

    def log2_power(self, log2_len):
        """log2 of the power for the given log2 lengths (scalar or array)."""
        log2_len = np.asarray(log2_len, dtype=float)
        out = math.log2(self.scale) + self.gamma * log2_len
        if self.delta != 0:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = out + self.delta * np.log2(log2_len)
        return out

    def power(self, length: float) -> float:
        p = self.scale * length**self.gamma
        if self.delta != 0:
            p *= math.log2(length) ** self.delta
        return p

    def validate_for(self, inst: Instance) -> None:
        if self.delta != 0 and len(inst.links) and np.min(inst.log2_lengths) <= 0:
            raise ValidationError(
                "power with a (lg l)**delta factor needs every link length > 1"
            )

    def to_dict(self) -> dict:
        return {"name": self.name, "gamma": self.gamma, "delta": self.delta, "scale": self.scale}


@dataclass(frozen=True)
class Instance:
    fading: FadingParams
    beta: float
    links: tuple
    noise: float = 0.0
    mode: str = UNI
    precision: str = "float"
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(self.links))
        if not self.beta > 0:
            raise ValidationError("beta must be positive")
        if self.noise < 0:
            raise ValidationError("noise must be nonnegative")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.precision not in PRECISIONS:
            raise ValidationError(f"precision must be one of {PRECISIONS}")
        dim = self.fading.metric.dim
        ids = set()
        for link in self.links:
            if link.id in ids:
                raise ValidationError(f"duplicate link id {link.id}")
            ids.add(link.id)
            if len(link.sender) != dim:
                raise ValidationError(f"link {link.id}: expected {dim} coordinates")
        if self.precision == "log2":
            if dim != 1:
                raise ValidationError("log2 precision requires a 1-dimensional metric")
            for link in self.links:
                if not all(isinstance(c, int) for c in link.sender + link.receiver):
                    raise ValidationError(
                        f"link {link.id}: log2 precision requires exact integer coordinates"
                    )

    @property
    def n(self) -> int:
        return len(self.links)

    @property
    def alpha(self) -> float:
        return self.fading.alpha

    @property
    def metric(self):
        return self.fading.metric

    def replace(self, **changes) -> Instance:
        from dataclasses import replace

        return replace(self, **changes)

    def subinstance(self, indices: Sequence[int]) -> Instance:
        return self.replace(links=tuple(self.links[i] for i in indices))

    # numeric caches -------------------------------------------------------

    def _cached(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def log2_lengths(self) -> np.ndarray:
        return self._cached(
            "log2_lengths", lambda: np.array([l.log2_length for l in self.links], dtype=float)
        )

    @property
    def lengths(self) -> np.ndarray:
        """Float lengths; ``inf`` where a log2-precision length overflows."""
        def build():
            with np.errstate(over="ignore"):
                return np.exp2(self.log2_lengths) if self.precision == "log2" else np.array(
                    [l.length for l in self.links], dtype=float
                )
        return self._cached("lengths", build)

    @property
    def senders(self) -> np.ndarray:
        return self._cached(
            "senders", lambda: np.array([l.sender for l in self.links], dtype=float).reshape(self.n, -1)
        )

    @property
    def receivers(self) -> np.ndarray:
        return self._cached(
            "receivers",
            lambda: np.array([l.receiver for l in self.links], dtype=float).reshape(self.n, -1),
        )

    @property
    def delta_ratio(self) -> float:
        """Ratio of the longest to the shortest link length, as log2."""
        if not self.links:
            return 0.0
        return float(self.log2_lengths.max() - self.log2_lengths.min())

    def distance_matrix(self) -> np.ndarray:
        """``D[w, v] = d_wv`` (mode aware); the diagonal holds link lengths."""
        if self.precision == "log2":
            return self._cached("dist", lambda: np.exp2(self.log2_distance_matrix()))
        return self._cached("dist", self._float_distances)

    def _float_distances(self) -> np.ndarray:
        S, R = self.senders, self.receivers

        def pair(X, Y):
            return np.linalg.norm(X[:, None, :] - Y[None, :, :], axis=-1)

        D = pair(S, R)
        if self.mode == BI:
            D = np.minimum.reduce([D, pair(S, S), pair(R, R), pair(R, S)])
        np.fill_diagonal(D, self.lengths)
        return D

    def log2_distance_matrix(self) -> np.ndarray:
        def build():
            if self.precision == "float":
                with np.errstate(divide="ignore"):
                    return np.log2(self._float_distances())
            n = self.n
            s = [l.sender[0] for l in self.links]
            r = [l.receiver[0] for l in self.links]
            out = np.empty((n, n))
            for w in range(n):
                for v in range(n):
                    if w == v:
                        out[w, v] = self.log2_lengths[v]
                        continue
                    if self.mode == UNI:
                        d = abs(s[w] - r[v])
                    else:
                        d = min(abs(s[w] - s[v]), abs(s[w] - r[v]), abs(r[w] - s[v]), abs(r[w] - r[v]))
                    out[w, v] = math.log2(d) if d else -math.inf
            return out

        return self._cached("log2dist", build)

    def log2_affectance_matrix(self, power: PowerAssignment) -> np.ndarray:
        """``LA[w, v] = log2 a_w(v)``; ``-inf`` on the diagonal, ``+inf`` at zero distance."""
        def build():
            power.validate_for(self)
            lp = power.log2_power(self.log2_lengths)
            ll = self.log2_lengths
            LD = self.log2_distance_matrix()
            with np.errstate(invalid="ignore"):
                LA = lp[:, None] - lp[None, :] + self.alpha * (ll[None, :] - LD)
            np.fill_diagonal(LA, -np.inf)
            return LA

        return self._cached(("log2aff", power), build)

    def affectance_matrix(self, power: PowerAssignment) -> np.ndarray:
        """``A[w, v] = a_w(v)`` as floats, zero diagonal, ``inf`` at zero distance."""
        def build():
            if self.precision == "log2":
                with np.errstate(over="ignore"):
                    A = np.exp2(self.log2_affectance_matrix(power))
                np.fill_diagonal(A, 0.0)
                return A
            power.validate_for(self)
            P = np.array([power.power(x) for x in self.lengths])
            D = self.distance_matrix()
            with np.errstate(divide="ignore"):
                A = (P[:, None] / P[None, :]) * (self.lengths[None, :] / D) ** self.alpha
            np.fill_diagonal(A, 0.0)
            return A

        return self._cached(("aff", power), build)


def _require_distinct(w: int, v: int):
    if w == v:
        raise ValidationError("affectance of a link on itself is undefined")


def log2_affectance_pair(w: int, v: int, P: PowerAssignment, inst: Instance) -> float:
    _require_distinct(w, v)
    la = inst.log2_affectance_matrix(P)[w, v]
    if la == math.inf:
        raise ColocationError(f"links {inst.links[w].id} and {inst.links[v].id} touch")
    return float(la)


def affectance_pair(w: int, v: int, P: PowerAssignment, inst: Instance) -> float:
    """Affectance ``a_w(v) = (P_w/P_v) (l_v/d_wv)^alpha`` of link ``w`` on link ``v``."""
    la = log2_affectance_pair(w, v, P, inst)
    if inst.precision == "log2":
        return LogScalar.from_log2(la).to_float()
    return float(inst.affectance_matrix(P)[w, v])


def affectance_set_log(S: Iterable[int], v: int, P: PowerAssignment, inst: Instance) -> LogScalar:
    return LogScalar.from_log2(
        log2_sum(log2_affectance_pair(w, v, P, inst) for w in S if w != v)
    )


def affectance_set(S: Iterable[int], v: int, P: PowerAssignment, inst: Instance) -> float:
    S = [w for w in S if w != v]
    if inst.precision == "log2":
        return affectance_set_log(S, v, P, inst).to_float()
    for w in S:
        log2_affectance_pair(w, v, P, inst)  # raises on colocation
    return math.fsum(inst.affectance_matrix(P)[w, v] for w in S)


def affectance_totals(S: Sequence[int], P: PowerAssignment, inst: Instance) -> np.ndarray:
    """Total affectance on each member of ``S`` from the rest of ``S``.

    Float precision returns plain affectances; log2 precision returns their
    base-2 logarithms. Zero distances count as infinite affectance.
    """
    S = list(S)
    if inst.precision == "log2":
        LA = inst.log2_affectance_matrix(P)
        return np.array([log2_sum(LA[w, v] for w in S if w != v) for v in S])
    A = inst.affectance_matrix(P)
    return A[np.ix_(S, S)].sum(axis=0)


def max_affectance(S: Sequence[int], P: PowerAssignment, inst: Instance) -> float:
    """Largest total affectance over members of ``S`` as a float (0 for |S| <= 1)."""
    S = list(S)
    if len(S) <= 1:
        return 0.0
    tot = affectance_totals(S, P, inst)
    if inst.precision == "log2":
        return LogScalar.from_log2(float(tot.max())).to_float()
    return float(tot.max())


def is_p_signal(S: Sequence[int], P: PowerAssignment, p: float, inst: Instance) -> bool:
    """Every link of ``S`` suffers affectance at most ``1/p`` from the others."""
    S = list(S)
    if len(S) <= 1:
        return True
    tot = affectance_totals(S, P, inst)
    if inst.precision == "log2":
        return bool(np.all(tot <= -math.log2(p)))
    return bool(np.all(tot <= 1.0 / p))


def is_sinr_feasible(S: Sequence[int], P: PowerAssignment, inst: Instance) -> bool:
    """Direct SINR test: ``(P_v/l_v^a) / (sum_w P_w/d_wv^a + N) >= beta`` for all v."""
    S = list(S)
    alpha = inst.alpha
    if inst.precision == "log2":
        LD = inst.log2_distance_matrix()
        lp = P.log2_power(inst.log2_lengths)
        log_noise = math.log2(inst.noise) if inst.noise > 0 else -math.inf
        for v in S:
            signal = lp[v] - alpha * inst.log2_lengths[v]
            terms = [lp[w] - alpha * LD[w, v] for w in S if w != v]
            denom = log2_sum(terms + [log_noise])
            if denom == -math.inf:
                continue
            if signal < math.log2(inst.beta) + denom:
                return False
        return True
    P.validate_for(inst)
    D = inst.distance_matrix()
    powers = {v: P.power(inst.lengths[v]) for v in S}
    for v in S:
        signal = powers[v] / inst.lengths[v] ** alpha
        interference = 0.0
        for w in S:
            if w == v:
                continue
            if D[w, v] == 0:
                return False
            interference += powers[w] / D[w, v] ** alpha
        if signal < inst.beta * (interference + inst.noise):
            return False
    return True


def gain_ratio_matrix(S: Sequence[int], inst: Instance) -> np.ndarray:
    """``F[i, j] = (l_v / d_wv)^alpha`` for ``v = S[i]``, ``w = S[j]``; zero diagonal."""
    S = list(S)
    D = inst.distance_matrix()
    L = inst.lengths
    with np.errstate(divide="ignore"):
        F = (L[S][:, None] / D[np.ix_(S, S)].T) ** inst.alpha
    np.fill_diagonal(F, 0.0)
    return F


def spectral_radius(M: np.ndarray) -> float:
    if M.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def pc_radius(S: Sequence[int], inst: Instance, p: Optional[float] = None) -> float:
    """Spectral radius of ``p * F`` for the link set ``S`` (``p`` defaults to beta)."""
    S = list(S)
    p = inst.beta if p is None else p
    if len(S) <= 1:
        return 0.0
    if inst.precision == "log2":
        return _pc_radius_log2(S, inst, p)
    F = gain_ratio_matrix(S, inst)
    if not np.all(np.isfinite(F)):
        return math.inf
    return p * spectral_radius(F)


def _pc_radius_log2(S, inst, p) -> float:
    import mpmath

    LD = inst.log2_distance_matrix()
    ll = inst.log2_lengths
    with mpmath.workdps(30):
        m = len(S)
        M = mpmath.matrix(m, m)
        for i, v in enumerate(S):
            for j, w in enumerate(S):
                if i == j:
                    continue
                if LD[w, v] == -math.inf:
                    return math.inf
                M[i, j] = mpmath.mpf(p) * mpmath.power(2, inst.alpha * (mpmath.mpf(ll[v]) - mpmath.mpf(LD[w, v])))
        rho = max(abs(e) for e in mpmath.eig(M, left=False, right=False))
        return float(rho) if rho < mpmath.mpf(2) ** 1000 else math.inf


def pc_feasible(S: Sequence[int], inst: Instance, p: Optional[float] = None) -> bool:
    """Some positive power vector makes ``S`` a p-signal set (noise ignored).

    Equivalent to the Perron root of ``p * F`` being strictly below 1.
    """
    return pc_radius(S, inst, p) < 1.0


def check_beta_assumption(inst: Instance) -> bool:
    """Whether beta >= 3^alpha, the regime in which the proven ratios apply."""
    return inst.beta >= 3**inst.alpha
