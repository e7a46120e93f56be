"""Instance generators and the JSON instance/result formats."""

from __future__ import annotations

import hashlib
import json
import sys
from contextlib import contextmanager
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .errors import FadingViolation, ParseError, ValidationError
from .metricspace import FadingParams, MetricSpec
from .sinrcore import BI, MODES, UNI, Instance, Link, PowerAssignment, max_affectance

FLOAT_EXACT = 2**53
KINDS = ("random", "equilength", "grid", "lowerbound")


@dataclass(frozen=True)
class GenSpec:
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown generator kind {self.kind!r}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")

    def build(self) -> Instance:
        p = dict(self.params)
        if self.kind in ("random", "equilength"):
            p.setdefault("seed", self.seed)
        fn = {"random": gen_random, "equilength": gen_equilength, "grid": gen_grid,
              "lowerbound": gen_lowerbound}[self.kind]
        return fn(**p)


def _fading(alpha: float, dim: int, C: Optional[float]) -> FadingParams:
    return FadingParams(alpha, MetricSpec(dim, C))


def gen_random(
    n: int,
    side: float,
    len_min: float,
    len_max: float,
    seed: int,
    *,
    alpha: float = 3.0,
    beta: float = 1.0,
    noise: float = 0.0,
    mode: str = UNI,
    C: Optional[float] = None,
    weights: bool = False,
) -> Instance:
    """Senders uniform in ``[0, side]^2``; receivers at a uniform angle and length."""
    if n < 0:
        raise ValidationError("n must be nonnegative")
    if not (0 < len_min <= len_max and side > 0):
        raise ValidationError("need 0 < len_min <= len_max and side > 0")
    rng = np.random.default_rng(seed)
    senders = rng.uniform(0.0, side, size=(n, 2))
    angles = rng.uniform(0.0, 2 * math.pi, size=n)
    lengths = rng.uniform(len_min, len_max, size=n)
    w = rng.uniform(0.0, 10.0, size=n) if weights else np.ones(n)
    links = []
    for i in range(n):
        s = senders[i]
        r = s + lengths[i] * np.array([math.cos(angles[i]), math.sin(angles[i])])
        links.append(Link(i, (float(s[0]), float(s[1])), (float(r[0]), float(r[1])), float(w[i])))
    return Instance(_fading(alpha, 2, C), beta, tuple(links), noise, mode)


def gen_equilength(n: int, side: float, d: float, seed: int, **kw) -> Instance:
    """Random links with lengths in ``[d, 1.99 d]`` (nearly-equilength)."""
    return gen_random(n, side, d, 1.99 * d, seed, **kw)


def gen_grid(m: int, q: float, *, alpha: float = 3.0, beta: float = 1.0, mode: str = UNI,
             C: Optional[float] = None) -> Instance:
    """``m x m`` unit links pointing up, senders on the lattice ``q * Z^2``."""
    if m < 1 or not q > 0:
        raise ValidationError("need m >= 1 and q > 0")
    links = []
    for i in range(m):
        for j in range(m):
            x, y = float(i * q), float(j * q)
            links.append(Link(i * m + j, (x, y), (x, y + 1.0)))
    return Instance(_fading(alpha, 2, C), beta, tuple(links), 0.0, mode)


def grid_max_affectance(inst: Instance) -> float:
    """Largest total affectance under uniform power over the whole instance."""
    return max_affectance(range(inst.n), PowerAssignment.uniform(), inst)


LOWERBOUND_VARIANTS = ("forward", "reversed", "combined")


def lowerbound_lengths(n: int, t: int, c1: int) -> List[int]:
    """``[l_0, l_1, ..., l_n]`` with ``l_i = 2^(t^(i+c1))``."""
    return [1 << (t ** (i + c1)) for i in range(n + 1)]


def _lowerbound_points(n: int, t: int, c1: int):
    ells = lowerbound_lengths(n, t, c1)
    prefix = []
    acc = 0
    for x in ells:
        acc += x
        prefix.append(acc)
    # (sender, receiver) for links 1..n
    return [(-(ells[i] - prefix[i - 1]), prefix[i - 1]) for i in range(1, n + 1)]


def gen_lowerbound(
    n: int,
    t: int = 4,
    c1: int = 0,
    alpha: float = 2.0,
    variant: str = "forward",
    *,
    beta: float = 1.0,
    precision: Optional[str] = None,
    C: float = 1.0,
) -> Instance:
    """Collinear instance on which one oblivious power family needs n slots.

    Link ``i`` has length ``2^(t^(i+c1))``, receiver at ``a_(i-1)`` and sender
    at ``-(l_i - a_(i-1))`` where ``a_i`` are prefix sums of the lengths.
    ``reversed`` swaps every sender and receiver; ``combined`` places a
    forward and a reversed copy ``2^(t^(n+c1+1))`` apart.
    """
    if t < 4:
        raise ValidationError("t must be at least 4")
    if n < 1:
        raise ValidationError("n must be at least 1")
    if c1 < 0 or int(c1) != c1:
        raise ValidationError("c1 must be a nonnegative integer")
    if variant not in LOWERBOUND_VARIANTS:
        raise ValidationError(f"variant must be one of {LOWERBOUND_VARIANTS}")
    pts = _lowerbound_points(n, t, c1)
    pairs = []
    if variant in ("forward", "combined"):
        pairs += pts
    if variant == "reversed":
        pairs += [(r, s) for s, r in pts]
    if variant == "combined":
        shift = 1 << (t ** (n + c1 + 1))
        pairs += [(r + shift, s + shift) for s, r in pts]
    biggest = max(max(abs(s), abs(r)) for s, r in pairs)
    if precision is None:
        precision = "float" if biggest <= FLOAT_EXACT else "log2"
    if precision == "float":
        if biggest > FLOAT_EXACT:
            raise ValidationError("coordinates are not exactly representable as floats; use log2")
        pairs = [(float(s), float(r)) for s, r in pairs]
    links = tuple(Link(i + 1, (s,), (r,)) for i, (s, r) in enumerate(pairs))
    return Instance(FadingParams(alpha, MetricSpec(1, C)), beta, links, 0.0, UNI, precision)


# -- JSON instance format ----------------------------------------------------

_TOP_FIELDS = {"alpha", "beta", "noise", "mode", "metric", "precision", "links"}
_LINK_FIELDS = {"id", "s", "r", "weight"}


def _line_of(text: str, needle: str) -> Optional[int]:
    pos = text.find(needle)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def _number(value, fld, text):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {value!r}", field=fld, line=_line_of(text, f'"{fld}"'))
    return value


def _coord(value, precision, fld, text):
    if precision == "log2":
        if isinstance(value, str):
            try:
                with _unbounded_int_digits():
                    return int(value)
            except ValueError:
                pass
        elif isinstance(value, int) and not isinstance(value, bool):
            return value
        raise ParseError(f"log2 coordinates must be decimal integers, got {value!r}", field=fld,
                         line=_line_of(text, str(value)))
    return float(_number(value, fld, text))


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno)
    if not isinstance(doc, dict):
        raise ParseError("instance must be a JSON object")
    extra = set(doc) - _TOP_FIELDS
    if extra:
        f = sorted(extra)[0]
        raise ParseError("unknown field", field=f, line=_line_of(text, f'"{f}"'))
    missing = {"alpha", "beta", "metric", "links"} - set(doc)
    if missing:
        raise ParseError("missing required field", field=sorted(missing)[0])
    alpha = _number(doc["alpha"], "alpha", text)
    beta = _number(doc["beta"], "beta", text)
    noise = _number(doc.get("noise", 0.0), "noise", text)
    mode = doc.get("mode", UNI)
    if mode not in MODES:
        raise ParseError(f"mode must be one of {MODES}", field="mode", line=_line_of(text, '"mode"'))
    precision = doc.get("precision", "float")
    if precision not in ("float", "log2"):
        raise ParseError("precision must be 'float' or 'log2'", field="precision")
    metric = doc["metric"]
    if not isinstance(metric, dict) or set(metric) - {"dim", "C"} or "dim" not in metric:
        raise ParseError("metric must be {dim, C}", field="metric", line=_line_of(text, '"metric"'))
    dim = metric["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int):
        raise ParseError("dim must be an integer", field="metric.dim")
    try:
        fading = FadingParams(alpha, MetricSpec(dim, metric.get("C")))
    except FadingViolation as e:
        raise ParseError(f"fading violation: {e}", field="alpha", line=_line_of(text, '"alpha"'))
    except ValidationError as e:
        raise ParseError(str(e), field="metric")
    if not isinstance(doc["links"], list):
        raise ParseError("links must be an array", field="links")
    links = []
    for k, item in enumerate(doc["links"]):
        where = f"links[{k}]"
        if not isinstance(item, dict):
            raise ParseError("link must be an object", field=where)
        extra = set(item) - _LINK_FIELDS
        if extra:
            raise ParseError("unknown field", field=f"{where}.{sorted(extra)[0]}")
        for req in ("id", "s", "r"):
            if req not in item:
                raise ParseError("missing required field", field=f"{where}.{req}")
        if isinstance(item["id"], bool) or not isinstance(item["id"], int):
            raise ParseError("id must be an integer", field=f"{where}.id")
        pts = []
        for end in ("s", "r"):
            raw = item[end]
            if not isinstance(raw, list) or len(raw) != dim:
                raise ParseError(f"expected {dim} coordinates", field=f"{where}.{end}",
                                 line=_line_of(text, f'"id": {item["id"]}'))
            pts.append(tuple(_coord(c, precision, f"{where}.{end}", text) for c in raw))
        weight = _number(item.get("weight", 1.0), f"{where}.weight", text)
        try:
            links.append(Link(item["id"], pts[0], pts[1], float(weight)))
        except ValidationError as e:
            raise ParseError(str(e), field=where)
    try:
        return Instance(fading, float(beta), tuple(links), float(noise), mode, precision)
    except ValidationError as e:
        raise ParseError(str(e), field="links")


@contextmanager
def _unbounded_int_digits():
    """Lift the interpreter's int/str conversion cap for huge exact coordinates."""
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        yield
        return
    old = get()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def _coord_out(c, precision):
    if precision != "log2":
        return float(c)
    with _unbounded_int_digits():
        return str(c)


def instance_to_dict(inst: Instance) -> dict:
    return {
        "alpha": inst.alpha,
        "beta": inst.beta,
        "noise": inst.noise,
        "mode": inst.mode,
        "metric": {"dim": inst.metric.dim, "C": inst.metric.C},
        "precision": inst.precision,
        "links": [
            {
                "id": l.id,
                "s": [_coord_out(c, inst.precision) for c in l.sender],
                "r": [_coord_out(c, inst.precision) for c in l.receiver],
                "weight": l.weight,
            }
            for l in inst.links
        ],
    }


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1) + "\n"


def instance_digest(inst: Instance) -> str:
    canon = json.dumps(instance_to_dict(inst), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# -- results --------------------------------------------------------------------


def schedule_to_dict(sched, inst: Instance) -> dict:
    ids = [l.id for l in inst.links]
    return {
        "algorithm": sched.algorithm,
        "params": sched.params,
        "p_certified": sched.p_certified,
        "power": sched.power.to_dict(),
        "mode": sched.mode,
        "slots": [[ids[i] for i in slot] for slot in sched.slots],
        "diagnostics": sched.diagnostics,
    }


def capacity_to_dict(res, inst: Instance) -> dict:
    ids = [l.id for l in inst.links]
    chosen = [ids[i] for i in res.chosen]
    return {
        "algorithm": res.algorithm,
        "params": res.params,
        "p_certified": inst.beta,
        "power": res.power.to_dict(),
        "mode": inst.mode,
        "slots": [chosen] if chosen else [],
        "total_weight": res.total_weight,
        "diagnostics": {},
    }


def parse_result(text: str, inst: Instance) -> dict:
    """Read a schedule/capacity document; slots are returned as link *indices*."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno)
    if not isinstance(doc, dict) or "slots" not in doc:
        raise ParseError("result must be an object with 'slots'", field="slots")
    index = {l.id: i for i, l in enumerate(inst.links)}
    slots = []
    for k, slot in enumerate(doc["slots"]):
        if not isinstance(slot, list):
            raise ParseError("slot must be an array of link ids", field=f"slots[{k}]")
        try:
            slots.append([index[x] for x in slot])
        except (KeyError, TypeError):
            raise ParseError("unknown link id", field=f"slots[{k}]")
    power = None
    if "power" in doc:
        pw = doc["power"]
        try:
            power = PowerAssignment(float(pw["gamma"]), float(pw["delta"]), float(pw.get("scale", 1.0)),
                                    name=pw.get("name", "custom"))
        except (KeyError, TypeError, ValueError, ValidationError):
            raise ParseError("bad power assignment", field="power")
    p = doc.get("p_certified")
    if p is not None:
        p = float(_number(p, "p_certified", text))
    return {"slots": slots, "power": power, "p_certified": p, "mode": doc.get("mode")}
