"""Scalar function catalog with certified shape flags, plus scalar oracles
for the midpoint/endpoint convexity sandwich and the four-point sums
property.

Flags are verified numerically at construction time (sampled chord and
monotonicity tests); catalog entries are hand-audited, the sampling guards
regressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainViolation, PreconditionViolation

INF = math.inf

# Box used when sampling flags on unbounded domains.
_SAMPLE_SPAN = 6.0


@dataclass(frozen=True)
class ScalarFn:
    """Named scalar function with domain and certified shape flags.

    ``monotone`` records monotonicity on the whole domain; ``monotone_pos``
    records it on domain `intersect` [0, inf), which is the hypothesis the
    positive-cone results actually use (e.g. t^2 on R is nondecreasing only
    there). ``zero_value`` is f(0) when 0 is in the domain, else None.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float] = (0.0, INF)
    convex: bool = False
    concave: bool = False
    monotone: Optional[str] = None       # 'nondecreasing' | 'nonincreasing' | None
    monotone_pos: Optional[str] = None
    zero_value: Optional[float] = None

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"empty domain [{lo}, {hi}]")
        if not (self.convex or self.concave):
            raise ValueError(f"'{self.name}' must be flagged convex or concave")

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=np.float64))

    # -- hypothesis helpers used by the checkers ---------------------------

    def defined_on(self, lo: float, hi: float, tol: float = 0.0) -> bool:
        return self.domain[0] - tol <= lo and hi <= self.domain[1] + tol

    def zero_nonneg(self) -> bool:
        return self.zero_value is not None and self.zero_value >= -1e-12

    def zero_nonpos(self) -> bool:
        return self.zero_value is not None and self.zero_value <= 1e-12

    def nonneg_on(self, lo: float, hi: float, samples: int = 257) -> bool:
        """Sampled nonnegativity check on [lo, hi] within the domain."""
        lo = max(lo, self.domain[0])
        hi = min(hi, self.domain[1])
        if not np.isfinite(hi):
            hi = lo + _SAMPLE_SPAN
        if hi < lo:
            return True
        grid = np.linspace(lo, hi, samples)
        return bool(np.min(self(grid)) >= -1e-12)


def _sample_points(domain, rng, size):
    lo, hi = domain
    a = lo if np.isfinite(lo) else -_SAMPLE_SPAN
    b = hi if np.isfinite(hi) else (max(a, 0.0) + _SAMPLE_SPAN)
    return rng.uniform(a, b, size=size)


def verify_flags(f: ScalarFn, trials: int = 200, seed: int = 20240117) -> None:
    """Sampled verification of the declared flags; raises on contradiction.

    Chord test on random ordered triples for convexity/concavity and an
    ordered-pair test for monotonicity, with small relative slack for
    floating point.
    """
    rng = np.random.default_rng(seed)
    pts = np.sort(_sample_points(f.domain, rng, (trials, 3)), axis=1)
    t1, t2, t3 = pts[:, 0], pts[:, 1], pts[:, 2]
    ok = (t3 - t1) > 1e-9
    t1, t2, t3 = t1[ok], t2[ok], t3[ok]
    w = (t2 - t1) / (t3 - t1)
    chord = (1.0 - w) * f(t1) + w * f(t3)
    mid = f(t2)
    tol = 1e-12 * (1.0 + np.abs(f(t1)) + np.abs(f(t3)))
    if f.convex and np.any(mid > chord + tol):
        raise ValueError(f"'{f.name}' flagged convex but chord test fails")
    if f.concave and np.any(mid < chord - tol):
        raise ValueError(f"'{f.name}' flagged concave but chord test fails")

    pairs = np.sort(_sample_points(f.domain, rng, (trials, 2)), axis=1)
    lo_v, hi_v = f(pairs[:, 0]), f(pairs[:, 1])
    ptol = 1e-12 * (1.0 + np.abs(lo_v) + np.abs(hi_v))
    if f.monotone == "nondecreasing" and np.any(hi_v < lo_v - ptol):
        raise ValueError(f"'{f.name}' flagged nondecreasing but decreases")
    if f.monotone == "nonincreasing" and np.any(hi_v > lo_v + ptol):
        raise ValueError(f"'{f.name}' flagged nonincreasing but increases")
    if f.monotone_pos is not None:
        a = max(f.domain[0], 0.0)
        b = f.domain[1] if np.isfinite(f.domain[1]) else a + _SAMPLE_SPAN
        pairs = np.sort(rng.uniform(a, b, (trials, 2)), axis=1)
        lo_v, hi_v = f(pairs[:, 0]), f(pairs[:, 1])
        ptol = 1e-12 * (1.0 + np.abs(lo_v) + np.abs(hi_v))
        if f.monotone_pos == "nondecreasing" and np.any(hi_v < lo_v - ptol):
            raise ValueError(f"'{f.name}' not nondecreasing on t >= 0")
        if f.monotone_pos == "nonincreasing" and np.any(hi_v > lo_v + ptol):
            raise ValueError(f"'{f.name}' not nonincreasing on t >= 0")
    if f.zero_value is not None:
        got = float(f(0.0))
        if abs(got - f.zero_value) > 1e-12:
            raise ValueError(f"'{f.name}' zero_value {f.zero_value} != f(0) {got}")


def _entry(name, fn, domain, convex=False, concave=False, monotone=None,
           monotone_pos="same", zero=None) -> ScalarFn:
    if monotone_pos == "same":
        monotone_pos = monotone
    f = ScalarFn(name=name, fn=fn, domain=domain, convex=convex,
                 concave=concave, monotone=monotone,
                 monotone_pos=monotone_pos, zero_value=zero)
    verify_flags(f)
    return f


def piecewise_linear(slopes, breaks, value_at_first_break=0.0, kind="convex",
                     name="pwl") -> ScalarFn:
    """Continuous piecewise-linear function on R from sorted breakpoints.

    ``slopes`` has one more entry than ``breaks``. Sorted nondecreasing
    slopes give a convex function, nonincreasing a concave one.
    """
    slopes = np.asarray(slopes, dtype=np.float64)
    breaks = np.asarray(breaks, dtype=np.float64)
    if slopes.size != breaks.size + 1:
        raise ValueError("need len(slopes) == len(breaks) + 1")
    diffs = np.diff(slopes)
    if kind == "convex" and np.any(diffs < 0):
        raise ValueError("convex pwl needs nondecreasing slopes")
    if kind == "concave" and np.any(diffs > 0):
        raise ValueError("concave pwl needs nonincreasing slopes")
    # Knot values by integrating the slopes from the first breakpoint.
    knot_vals = [value_at_first_break]
    for i in range(1, breaks.size):
        knot_vals.append(knot_vals[-1] + slopes[i] * (breaks[i] - breaks[i - 1]))
    knot_vals = np.asarray(knot_vals)

    def evaluate(t):
        t = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(breaks, t, side="right")
        anchor = np.clip(idx - 1, 0, breaks.size - 1)
        base = knot_vals[anchor] + slopes[idx] * (t - breaks[anchor])
        # Left of the first break the anchor slope differs:
        left = knot_vals[0] + slopes[0] * (t - breaks[0])
        return np.where(idx == 0, left, base)

    zero = float(evaluate(0.0))
    mono = None
    if np.all(slopes >= 0):
        mono = "nondecreasing"
    elif np.all(slopes <= 0):
        mono = "nonincreasing"
    pos_slopes = slopes[np.searchsorted(breaks, 0.0, side="right"):]
    mono_pos = None
    if np.all(pos_slopes >= 0):
        mono_pos = "nondecreasing"
    elif np.all(pos_slopes <= 0):
        mono_pos = "nonincreasing"
    f = ScalarFn(name=name, fn=evaluate, domain=(-INF, INF),
                 convex=(kind == "convex"), concave=(kind == "concave"),
                 monotone=mono, monotone_pos=mono_pos, zero_value=zero)
    verify_flags(f)
    return f


def random_piecewise_linear(kind: str, n_breaks: int,
                            rng: np.random.Generator, name=None) -> ScalarFn:
    """Random continuous pwl function with ``n_breaks`` breakpoints."""
    breaks = np.sort(rng.uniform(-2.0, 2.0, n_breaks))
    slopes = np.sort(rng.uniform(-2.0, 2.0, n_breaks + 1))
    if kind == "concave":
        slopes = slopes[::-1]
    return piecewise_linear(slopes, breaks, value_at_first_break=rng.uniform(-1, 1),
                            kind=kind, name=name or f"random_pwl_{kind}")


def catalog() -> list[ScalarFn]:
    """The built-in function catalog. Deterministic and immutable."""
    entries = [
        # concave, nondecreasing on [0, inf), f(0) = 0
        _entry("pow025", lambda t: t ** 0.25, (0.0, INF),
               concave=True, monotone="nondecreasing", zero=0.0),
        _entry("sqrt", np.sqrt, (0.0, INF),
               concave=True, monotone="nondecreasing", zero=0.0),
        _entry("pow09", lambda t: t ** 0.9, (0.0, INF),
               concave=True, monotone="nondecreasing", zero=0.0),
        _entry("log1p", np.log1p, (0.0, INF),
               concave=True, monotone="nondecreasing", zero=0.0),
        _entry("saturate", lambda t: t / (1.0 + t), (0.0, INF),
               concave=True, monotone="nondecreasing", zero=0.0),
        _entry("min1", lambda t: np.minimum(t, 1.0), (0.0, INF),
               concave=True, monotone="nondecreasing", zero=0.0),
        # convex, nondecreasing on [0, inf), g(0) = 0
        _entry("pow15", lambda t: t ** 1.5, (0.0, INF),
               convex=True, monotone="nondecreasing", zero=0.0),
        _entry("pow2", np.square, (0.0, INF),
               convex=True, monotone="nondecreasing", zero=0.0),
        _entry("pow3", lambda t: t ** 3, (0.0, INF),
               convex=True, monotone="nondecreasing", zero=0.0),
        _entry("expm1", np.expm1, (-INF, INF),
               convex=True, monotone="nondecreasing", zero=0.0),
        _entry("relu", lambda t: np.maximum(t - 0.5, 0.0), (-INF, INF),
               convex=True, monotone="nondecreasing", zero=0.0),
        # convex on all of R, monotone only on the nonnegative half-line
        _entry("abs", np.abs, (-INF, INF),
               convex=True, monotone=None, monotone_pos="nondecreasing", zero=0.0),
        _entry("square", np.square, (-INF, INF),
               convex=True, monotone=None, monotone_pos="nondecreasing", zero=0.0),
        piecewise_linear([0.0, 0.0, 0.7, 1.8], [-1.5, 0.25, 1.0],
                         value_at_first_break=0.0, kind="convex", name="hinge3"),
        # affine: both convex and concave
        ScalarFn(name="identity", fn=lambda t: np.asarray(t, dtype=np.float64),
                 domain=(-INF, INF), convex=True, concave=True,
                 monotone="nondecreasing", monotone_pos="nondecreasing",
                 zero_value=0.0),
    ]
    return entries


_CATALOG_BY_NAME: dict[str, ScalarFn] = {f.name: f for f in catalog()}


def lookup(name: str) -> ScalarFn:
    try:
        return _CATALOG_BY_NAME[name]
    except KeyError:
        raise KeyError(
            f"unknown function '{name}'; known: {sorted(_CATALOG_BY_NAME)}"
        ) from None


def catalog_names() -> list[str]:
    return sorted(_CATALOG_BY_NAME)


# ---------------------------------------------------------------------------
# Scalar oracles


def _require_in_domain(f: ScalarFn, *points):
    lo, hi = f.domain
    for t in points:
        if t < lo - 1e-12 or t > hi + 1e-12:
            raise DomainViolation(
                f"point {t} outside domain [{lo}, {hi}] of '{f.name}'",
                offending=(t,),
            )


def scalar_hh(f: ScalarFn, a: float, b: float, nodes: int = 32):
    """Midpoint / segment-average / endpoint-average triple for convex f.

    Returns (lhs, mid, rhs) with lhs = f((a+b)/2),
    mid = integral of f((1-x)a + xb) over x in [0,1] (Gauss-Legendre),
    rhs = (f(a) + f(b))/2. For convex f, lhs <= mid <= rhs.
    """
    from .quadrature import gauss_legendre  # local import avoids a cycle

    if not f.convex:
        raise PreconditionViolation(f"'{f.name}' is not flagged convex")
    _require_in_domain(f, a, b)
    lhs = float(f((a + b) / 2.0))
    rule = gauss_legendre(nodes)
    mid = float(np.dot(rule.weights, f((1.0 - rule.nodes) * a + rule.nodes * b)))
    rhs = float((f(a) + f(b)) / 2.0)
    return lhs, mid, rhs


def scalar_sums_property(f: ScalarFn, a: float, b: float, x: float) -> float:
    """Slack of f(a) + f(b) - f((1-x)a + xb) - f(xa + (1-x)b).

    Nonnegative for convex f, nonpositive for concave f.
    """
    if not (0.0 < x < 1.0):
        raise PreconditionViolation(f"x = {x} not in (0, 1)")
    _require_in_domain(f, a, b)
    return float(f(a) + f(b) - f((1 - x) * a + x * b) - f(x * a + (1 - x) * b))


def scalar_four_point(f: ScalarFn, p: float, s: float, t: float, q: float) -> float:
    """Slack of f(p) + f(q) - f(s) - f(t) for p <= s <= t <= q, p+q = s+t.

    Nonnegative for convex f. PreconditionViolation if the four points do
    not interlace or the sums differ.
    """
    if not (p <= s + 1e-12 and s <= t + 1e-12 and t <= q + 1e-12):
        raise PreconditionViolation(f"need p <= s <= t <= q, got {(p, s, t, q)}")
    if abs((p + q) - (s + t)) > 1e-12 * (1.0 + abs(p) + abs(q)):
        raise PreconditionViolation(f"need p + q = s + t, got {p + q} vs {s + t}")
    if not f.convex:
        raise PreconditionViolation(f"'{f.name}' is not flagged convex")
    _require_in_domain(f, p, s, t, q)
    return float(f(p) + f(q) - f(s) - f(t))
