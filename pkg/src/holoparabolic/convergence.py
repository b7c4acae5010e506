"""
Classification of improper integrals ``int_{R_start}^{inf} f(R) dR``.

The integral is split into doubling windows ``[R_start 2^k, R_start 2^(k+1)]``.
A power-law tail ``R^-p`` gives window integrals in exact geometric ratio
``2^(1-p)``; an exponential tail gives windows whose logarithms fall
linearly in the window start.  Both models are fitted to the last four
windows and the better fit is used to extrapolate the tail.

Verdicts
--------
Convergent
    Every ratio between consecutive windows among the last four is at most
    0.95.  The value is the windowed sum plus the extrapolated tail; the
    reported error is half the extrapolated tail plus the quadrature error.
Divergent
    Over the last four windows the ratios stay at or above 0.95 and every
    window adds at least 1% to the running partial sum; or the windows are
    better fitted by a power ``(log R)^-q`` with ``q <= 1``, i.e. they shrink
    no faster than ``1/k`` (integrands like ``1/(R log R)``).
Inconclusive
    Anything else, including quadrature failures.

Numerical classification is undecidable in general: tails decaying like
``R^-p`` with ``p`` below about 1.07 look divergent over eight windows.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .errors import HoloParabolicError

__all__ = ["TailProbe", "ConvergenceStatus", "ConvergenceVerdict", "classify_integral"]

RATIO_CONVERGENT = 0.95
GROWTH_DIVERGENT = 0.01
FIT_WINDOWS = 4


@dataclass(frozen=True)
class TailProbe:
    """Settings for probing an integral towards infinity."""

    R_start: float = 1.0
    window_doublings: int = 8
    quad_tol: float = 1e-10
    fit_classes: tuple = ("power-law", "exponential")

    def __post_init__(self):
        if not self.R_start > 0:
            raise ValueError("R_start must be positive")
        if self.window_doublings < 4:
            raise ValueError("window_doublings must be at least 4")
        unknown = set(self.fit_classes) - {"power-law", "exponential"}
        if unknown or not self.fit_classes:
            raise ValueError(f"unknown fit classes {sorted(unknown)}")

    @property
    def R_end(self):
        return self.R_start * 2.0**self.window_doublings

    def edges(self):
        return self.R_start * 2.0 ** np.arange(self.window_doublings + 1)

    def replace(self, **changes):
        fields = {k: getattr(self, k) for k in ("R_start", "window_doublings", "quad_tol", "fit_classes")}
        fields.update(changes)
        return TailProbe(**fields)


class ConvergenceStatus(str, enum.Enum):
    CONVERGENT = "Convergent"
    DIVERGENT = "Divergent"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class ConvergenceVerdict:
    status: ConvergenceStatus
    value: float = None
    error: float = None
    evidence: dict = field(default_factory=dict)

    @property
    def convergent(self):
        return self.status is ConvergenceStatus.CONVERGENT

    @property
    def divergent(self):
        return self.status is ConvergenceStatus.DIVERGENT

    def to_dict(self):
        return {"status": self.status.value, "value": self.value, "error": self.error,
                "evidence": self.evidence}


def _fit(xs, logs):
    """Least-squares line through (xs, logs); returns slope, intercept, SSE."""
    A = np.vstack([xs, np.ones_like(xs)]).T
    coef, *_ = np.linalg.lstsq(A, logs, rcond=None)
    resid = logs - A @ coef
    return float(coef[0]), float(coef[1]), float(resid @ resid)


def _tail_model(windows, starts, probe):
    """Fit the tail models to the last windows.

    Returns ``(model, exponent, tail)`` where ``exponent`` is the power ``p``
    of ``R^-p`` or the rate ``lambda`` of ``exp(-lambda R)``.
    """
    w = windows[-FIT_WINDOWS:]
    s = starts[-FIT_WINDOWS:]
    pos = w > 0
    if pos.sum() < 2 or not pos[-1]:
        # trailing windows underflowed: nothing measurable is left
        return "exponential", math.inf, 0.0
    k = np.arange(len(w))[pos].astype(float)
    logs = np.log(w[pos])
    fits = {}
    if "power-law" in probe.fit_classes:
        fits["power-law"] = _fit(k, logs)
    if "exponential" in probe.fit_classes:
        fits["exponential"] = _fit(s[pos], logs)
    model = next(iter(fits))
    if len(fits) == 2:
        sse_pow, sse_exp = fits["power-law"][2], fits["exponential"][2]
        # the geometric extrapolation is exact for R^-p, so it wins near-ties
        model = "exponential" if sse_exp < 0.5 * sse_pow and sse_pow > 1e-20 else "power-law"
    slope = fits[model][0]
    last = w[-1]
    if model == "power-law":
        ratio = math.exp(slope)
        exponent = 1.0 - math.log2(ratio)
        tail = last * ratio / (1.0 - ratio) if ratio < 1 else math.inf
    else:
        exponent = -slope
        tail = last * math.exp(-exponent * s[-1]) if exponent > 0 else math.inf
    return model, exponent, tail


def _slow_decay(windows, edges):
    """Detect windows shrinking like a power of ``log R`` (integrand ``1/(R log^q R)``).

    Returns ``(q, tail)`` when that model fits the last windows better than a
    geometric sequence, else ``None``.  Windows with ``q <= 1`` decay no faster
    than ``1/k`` and their sum diverges.
    """
    w = windows[-FIT_WINDOWS:]
    mids = np.sqrt(edges[:-1] * edges[1:])[-FIT_WINDOWS:]
    if np.any(w <= 0) or mids[0] <= math.e:
        return None
    logs = np.log(w)
    slope_l, _, sse_log = _fit(np.log(np.log(mids)), logs)
    _, _, sse_geo = _fit(np.arange(len(w), dtype=float), logs)
    if not (sse_log < 0.5 * sse_geo and sse_geo > 1e-20):
        return None
    q = -slope_l
    if q <= 1:
        return q, math.inf
    # window ~ C ln2 (ln R)^-q, tail = C (ln R_end)^(1-q) / (q-1)
    c = w[-1] * math.log(mids[-1]) ** q / math.log(2.0)
    return q, c * math.log(edges[-1]) ** (1.0 - q) / (q - 1.0)


def classify_integral(f, probe=TailProbe()):
    """Classify ``int_{R_start}^inf f(R) dR`` as convergent, divergent or inconclusive.

    Parameters
    ----------
    f : callable
        Integrand, evaluated on numpy arrays; a :class:`ScalarFunction` works.
        It must be positive and continuous on ``[R_start, inf)``.
    probe : TailProbe

    Returns
    -------
    ConvergenceVerdict
    """
    edges = probe.edges()
    windows = np.empty(len(edges) - 1)
    qerr = 0.0
    try:
        for i in range(len(windows)):
            res = quadrature.integrate(f, edges[i], edges[i + 1], epsrel=probe.quad_tol)
            windows[i] = res.value
            qerr += res.error
    except (HoloParabolicError, FloatingPointError) as exc:
        return ConvergenceVerdict(ConvergenceStatus.INCONCLUSIVE,
                                  evidence={"diagnostic": f"{type(exc).__name__}: {exc}",
                                            "windows": windows[:i].tolist()})
    partial = np.cumsum(windows)
    evidence = {"edges": edges.tolist(), "windows": windows.tolist(), "partial_sums": partial.tolist()}
    if np.any(windows < 0):
        evidence["diagnostic"] = "integrand is not positive"
        return ConvergenceVerdict(ConvergenceStatus.INCONCLUSIVE, evidence=evidence)

    last = windows[-FIT_WINDOWS:]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(last[:-1] > 0, last[1:] / last[:-1], np.where(last[1:] > 0, np.inf, 0.0))
        growth = windows[1:] / partial[:-1]
    growth = growth[-FIT_WINDOWS:]
    evidence["ratios"] = ratios.tolist()
    evidence["growth"] = growth.tolist()

    model, exponent, tail = _tail_model(windows, edges[:-1], probe)
    slow = _slow_decay(windows, edges)
    if slow is not None:
        model, (exponent, tail) = "log-power", slow
    evidence["tail_model"] = model
    evidence["tail_exponent"] = exponent

    if model == "log-power" and exponent <= 1:
        evidence["diagnostic"] = "windows decay no faster than 1/k"
        return ConvergenceVerdict(ConvergenceStatus.DIVERGENT, evidence=evidence)
    if np.all(ratios <= RATIO_CONVERGENT):
        value = float(partial[-1] + tail)
        evidence["tail_estimate"] = tail
        return ConvergenceVerdict(ConvergenceStatus.CONVERGENT, value, 0.5 * tail + qerr, evidence)
    if np.all(ratios >= RATIO_CONVERGENT) and np.all(growth >= GROWTH_DIVERGENT):
        return ConvergenceVerdict(ConvergenceStatus.DIVERGENT, evidence=evidence)
    evidence["diagnostic"] = "window ratios neither decay geometrically nor keep the sum growing"
    evidence.pop("tail_exponent")
    return ConvergenceVerdict(ConvergenceStatus.INCONCLUSIVE, evidence=evidence)
