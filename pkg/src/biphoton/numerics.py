"""Deterministic quadrature and scalar-search utilities.

All integrators are built on a vectorized 15-point Gauss-Kronrod panel rule
with adaptive bisection.  Integrands must accept a 1-D ``numpy`` array of
abscissas and return an array of the same shape; every routine here is
deterministic (fixed evaluation and accumulation order), so repeated runs
produce bit-identical results.

Error control: a panel's error is estimated as |K15 - G7|.  The adaptive
loop refines the worst panel until the summed error estimate drops below

    max(min(rel_tol * |I|, abs_tol), roundoff_floor)

i.e. the *tighter* of the relative and absolute targets, guarded by a
floor proportional to machine epsilon times the L1 estimate so that
roundoff-limited integrals terminate cleanly instead of subdividing
forever.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "QuadSpec",
    "GridSpec",
    "QuadResult",
    "QuadratureError",
    "NonUnimodalError",
    "integrate_1d",
    "integrate_2d_nested",
    "cosine_breakpoints",
    "Extremum",
    "scan_extrema",
    "maximize_scalar",
]


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and depth limits shared by all quadrature calls."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-15
    max_depth: int = 48
    truncation_eps: float = 1e-12

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.truncation_eps > 0):
            raise ValueError("tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


@dataclass(frozen=True)
class GridSpec:
    """Uniform 1-D evaluation grid."""

    lo: float
    hi: float
    n: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("grid bounds must be finite")
        if self.hi <= self.lo:
            raise ValueError(f"grid needs hi > lo, got [{self.lo!r}, {self.hi!r}]")
        if self.n < 2:
            raise ValueError("grid needs at least 2 points")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float


class QuadratureError(RuntimeError):
    """Adaptive refinement exhausted max_depth before reaching tolerance.

    Carries the best estimate so callers can decide whether to accept it.
    """

    def __init__(self, message: str, best: QuadResult):
        super().__init__(f"{message} (best estimate {best.value!r} +- {best.error!r})")
        self.best = best


class NonUnimodalError(RuntimeError):
    """The bracket handed to maximize_scalar does not contain a single peak."""


# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-node layout, ascending; Gauss nodes sit at the odd indices
_NODES = np.concatenate([-_XGK[:7], _XGK[7:8], _XGK[6::-1]])
_WK15 = np.concatenate([_WGK[:7], _WGK[7:8], _WGK[6::-1]])
_WG7 = np.zeros(15)
_WG7[1:14:2] = np.concatenate([_WG[:3], _WG[3:4], _WG[2::-1]])

_EPS = float(np.finfo(float).eps)


def _panel(f: Callable[[np.ndarray], np.ndarray], a: float, b: float):
    """One K15/G7 evaluation on [a, b]: returns (k15, err, resabs)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _NODES
    y = np.asarray(f(x), dtype=float)
    k15 = half * float(np.dot(_WK15, y))
    g7 = half * float(np.dot(_WG7, y))
    resabs = abs(half) * float(np.dot(_WK15, np.abs(y)))
    return k15, abs(k15 - g7), resabs


def _initial_segments(a: float, b: float, breakpoints: Iterable[float]) -> list[tuple[float, float]]:
    cuts = sorted({float(t) for t in breakpoints if a < t < b})
    edges = [a, *cuts, b]
    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadSpec = QuadSpec(),
    breakpoints: Sequence[float] = (),
) -> QuadResult:
    """Adaptive Gauss-Kronrod integral of ``f`` over [a, b].

    ``breakpoints`` pre-split the interval (useful when the caller knows
    where the integrand is localised or oscillatory); they do not otherwise
    change the estimate.  Raises :class:`QuadratureError` if the tolerance
    cannot be met within ``spec.max_depth`` bisections of any panel.
    """
    if a == b:
        return QuadResult(0.0, 0.0)
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0

    # heap entries: (-err, tie-break counter, a, b, value, err, resabs, depth)
    heap: list[tuple] = []
    counter = 0
    for lo, hi in _initial_segments(a, b, breakpoints):
        val, err, resabs = _panel(f, lo, hi)
        heap.append((-err, counter, lo, hi, val, err, resabs, 0))
        counter += 1
    heapq.heapify(heap)

    while True:
        total = math.fsum(item[4] for item in heap)
        total_err = math.fsum(item[5] for item in heap)
        total_resabs = math.fsum(item[6] for item in heap)
        target = min(spec.rel_tol * abs(total), spec.abs_tol) if total != 0.0 else spec.abs_tol
        floor = 100.0 * _EPS * total_resabs
        if total_err <= max(target, floor):
            return QuadResult(sign * total, total_err)

        neg_err, _, lo, hi, val, err, resabs, depth = heapq.heappop(heap)
        if depth >= spec.max_depth or (hi - lo) <= 2.0 * _EPS * max(abs(lo), abs(hi)):
            raise QuadratureError(
                f"quadrature stalled on [{lo!r}, {hi!r}] at depth {depth}",
                QuadResult(sign * total, total_err),
            )
        mid_point = 0.5 * (lo + hi)
        for seg in ((lo, mid_point), (mid_point, hi)):
            val, err, resabs = _panel(f, *seg)
            heapq.heappush(heap, (-err, counter, seg[0], seg[1], val, err, resabs, depth + 1))
            counter += 1


def integrate_2d_nested(
    f: Callable[[float, np.ndarray], np.ndarray],
    outer: tuple[float, float],
    inner,
    spec: QuadSpec = QuadSpec(),
    outer_breakpoints: Sequence[float] = (),
    inner_breakpoints: Callable[[float], Sequence[float]] | None = None,
) -> QuadResult:
    """Nested double integral: outer variable adaptive, inner per outer node.

    ``f(t, u)`` receives a scalar outer abscissa ``t`` and an array of inner
    abscissas ``u``.  ``inner`` is either a fixed ``(lo, hi)`` pair or a
    callable ``t -> (lo, hi)``; the caller is expected to have truncated the
    inner range to where the integrand is non-negligible.  The inner pass
    runs at a tenfold tighter relative tolerance so its noise stays below
    the outer error estimate; the reported error adds both contributions.
    """
    lo_out, hi_out = outer
    if lo_out == hi_out:
        return QuadResult(0.0, 0.0)
    inner_bounds = inner if callable(inner) else (lambda _t, _pair=inner: _pair)
    inner_spec = QuadSpec(
        rel_tol=0.1 * spec.rel_tol,
        abs_tol=spec.abs_tol,
        max_depth=spec.max_depth,
        truncation_eps=spec.truncation_eps,
    )
    worst_inner = [0.0]

    def outer_integrand(ts: np.ndarray) -> np.ndarray:
        out = np.empty(ts.shape, dtype=float)
        for i, t in enumerate(ts):
            u_lo, u_hi = inner_bounds(float(t))
            cuts = inner_breakpoints(float(t)) if inner_breakpoints is not None else ()
            res = integrate_1d(
                lambda u, _t=float(t): f(_t, u), u_lo, u_hi, inner_spec, breakpoints=cuts
            )
            if res.error > worst_inner[0]:
                worst_inner[0] = res.error
            out[i] = res.value
        return out

    outer_res = integrate_1d(outer_integrand, lo_out, hi_out, spec, breakpoints=outer_breakpoints)
    total_err = outer_res.error + abs(hi_out - lo_out) * worst_inner[0]
    return QuadResult(outer_res.value, total_err)


def cosine_breakpoints(
    rate: float, a: float, b: float, threshold: float = 10.0 * math.pi, cap: int = 4096
) -> tuple[float, ...]:
    """Half-period cuts for an integrand oscillating like cos(rate * t).

    Returns an empty tuple when ``|rate| * (b - a)`` is below ``threshold``
    (the adaptive rule handles mild oscillation on its own).  The number of
    cuts is capped; beyond the cap the spacing grows accordingly.
    """
    rate = abs(rate)
    width = b - a
    if rate <= 0.0 or width <= 0.0 or rate * width <= threshold:
        return ()
    n = int(math.ceil(rate * width / math.pi))
    n = min(n, cap)
    edges = np.linspace(a, b, n + 1)[1:-1]
    return tuple(edges.tolist())


@dataclass(frozen=True)
class Extremum:
    x: float
    value: float
    kind: str  # "min" | "max" | "plateau"


def _golden_minimize(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Golden-section minimum of a unimodal scalar function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    while (hi - lo) > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def scan_extrema(f, grid: GridSpec) -> list[Extremum]:
    """Interior extrema of ``f`` on a uniform grid, refined by golden section.

    ``f`` may be vectorized (array -> array) or scalar.  A strict slope sign
    change between neighbouring grid intervals marks a candidate, which is
    then refined to ``1e-4 * grid.step``.  Runs of exactly equal values
    flanked by opposite slopes are reported with kind ``"plateau"`` at the
    run centre and are not refined.  Boundary extrema are not reported.
    """
    xs = grid.points()
    ys = np.asarray(f(xs), dtype=float)
    if ys.shape != xs.shape:
        ys = np.array([float(f(float(x))) for x in xs], dtype=float)

    def f_scalar(x: float) -> float:
        val = f(np.asarray([x]))
        arr = np.asarray(val, dtype=float)
        return float(arr.reshape(-1)[0])

    signs = np.sign(np.diff(ys))
    tol = 1e-4 * grid.step
    found: list[Extremum] = []
    i = 0
    while i < len(signs) - 1:
        left = signs[i]
        if left == 0.0:
            i += 1
            continue
        j = i + 1
        while j < len(signs) and signs[j] == 0.0:
            j += 1
        if j >= len(signs):
            break
        right = signs[j]
        if right == left:
            i = j
            continue
        if j > i + 1:
            # flat run between opposite slopes: report its centre as a plateau
            centre = 0.5 * (xs[i + 1] + xs[j])
            found.append(Extremum(float(centre), float(ys[i + 1]), "plateau"))
            i = j
            continue
        lo, hi = float(xs[i]), float(xs[i + 2])
        if left > 0.0 > right:
            x_star = _golden_minimize(lambda x: -f_scalar(x), lo, hi, tol)
            found.append(Extremum(x_star, f_scalar(x_star), "max"))
        else:
            x_star = _golden_minimize(f_scalar, lo, hi, tol)
            found.append(Extremum(x_star, f_scalar(x_star), "min"))
        i = j
    return found


def maximize_scalar(
    f: Callable[[float], float], a: float, b: float, tol: float
) -> tuple[float, float]:
    """Golden-section maximum of a unimodal ``f`` on [a, b].

    Raises :class:`NonUnimodalError` when the initial interior probes both
    fall below both endpoint values, which indicates the bracket holds a
    valley (or multiple peaks) rather than a single maximum; the caller
    should re-bracket, e.g. from a denser scan.
    """
    if not b > a:
        raise ValueError("need b > a")
    if tol <= 0:
        raise ValueError("tol must be positive")
    fa, fb = f(a), f(b)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    if max(fc, fd) < min(fa, fb):
        raise NonUnimodalError(
            "interior samples fall below both bracket ends; re-bracket the peak"
        )
    lo, hi = a, b
    while (hi - lo) > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    x_star = 0.5 * (lo + hi)
    return x_star, f(x_star)
