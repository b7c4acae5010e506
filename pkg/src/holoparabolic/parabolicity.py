"""
Transience criteria built on the entropy bound, and the capacity oracle.

Each criterion returns a :class:`CriterionReport` listing its hypotheses with
their outcome and a conclusion:

``Transient`` / ``NonParabolic``
    every hypothesis passed and the volume condition converged.
``ViolationDetected``
    the entropy bound itself fails; the report names the radius.
``NotApplicable``
    some hypothesis failed or could not be decided, so the criterion is silent.

The capacity oracle is independent of the criteria: a model manifold is
non-parabolic exactly when ``int^inf sigma^(1-n)`` is finite.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .convergence import ConvergenceStatus, ConvergenceVerdict, TailProbe, classify_integral
from .entropy_bound import (
    ConstantDensity,
    RadialDistribution,
    check_bound,
    entropy_l1_condition,
    find_violation,
)
from .errors import DomainError, EstimatorInconclusive, NonFiniteError, SearchBudgetExceeded
from .model_manifold import check_ricci_decay, check_volume_comparison, ricci_range

__all__ = [
    "TailProbe",
    "ConvergenceStatus",
    "ConvergenceVerdict",
    "classify_integral",
    "Conclusion",
    "Hypothesis",
    "CriterionReport",
    "CapacityVerdict",
    "capacity_oracle",
    "saturating_entropy",
    "criterion_thm31",
    "criterion_thm32",
    "criterion_thm33",
    "corollary35_report",
]

RICCI_TOL = 1e-10
R_BUDGET = 1e8


class Conclusion(str, enum.Enum):
    TRANSIENT = "Transient"
    NON_PARABOLIC = "NonParabolic"
    VIOLATION = "ViolationDetected"
    NOT_APPLICABLE = "NotApplicable"


@dataclass
class Hypothesis:
    """One named check.  ``passed`` is None when the check could not be decided."""

    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class CriterionReport:
    criterion: str
    hypotheses: list
    conclusion: Conclusion
    violation_radius: float = None
    notes: list = field(default_factory=list)

    def hypothesis(self, name):
        for h in self.hypotheses:
            if h.name == name:
                return h
        raise KeyError(name)

    @property
    def all_passed(self):
        return all(h.passed for h in self.hypotheses)

    def to_dict(self):
        return {"criterion": self.criterion, "conclusion": self.conclusion.value,
                "violation_radius": self.violation_radius,
                "hypotheses": [h.to_dict() for h in self.hypotheses], "notes": list(self.notes)}


def _verdict_hypothesis(name, verdict):
    passed = {ConvergenceStatus.CONVERGENT: True, ConvergenceStatus.DIVERGENT: False}.get(verdict.status)
    return Hypothesis(name, passed, verdict.to_dict())


# -- capacity ---------------------------------------------------------------

class CapacityStatus(str, enum.Enum):
    PARABOLIC = "Parabolic"
    NON_PARABOLIC = "NonParabolic"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class CapacityVerdict:
    status: CapacityStatus
    tail: float = None
    verdict: ConvergenceVerdict = None

    @property
    def parabolic(self):
        return self.status is CapacityStatus.PARABOLIC

    def to_dict(self):
        return {"status": self.status.value, "tail": self.tail, "integral": self.verdict.to_dict()}


def capacity_oracle(m, a=1.0, probe=None):
    """Classify ``int_a^inf sigma(s)^(1-n) ds``; finite means non-parabolic.

    The tail is the value of that integral when it converges.
    """
    if not 0 < a < m.r_max:
        raise DomainError(f"a = {a} outside (0, {m.r_max})")
    if np.isfinite(m.r_max):
        raise DomainError("the capacity test needs a complete model (r_max = inf)")
    probe = (probe or TailProbe()).replace(R_start=a)
    n = m.n

    def integrand(s):
        with np.errstate(over="ignore", divide="ignore"):
            return m.sigma(s) ** (1.0 - n)

    verdict = classify_integral(integrand, probe)
    status = {ConvergenceStatus.CONVERGENT: CapacityStatus.NON_PARABOLIC,
              ConvergenceStatus.DIVERGENT: CapacityStatus.PARABOLIC}.get(verdict.status,
                                                                        CapacityStatus.INCONCLUSIVE)
    return CapacityVerdict(status, verdict.value, verdict)


def saturating_entropy(m):
    """Entropy distribution ``S(R) = Area(dB_R)/4``, saturating the bound."""
    return RadialDistribution(m.omega / 4.0 * m.sigma ** (m.n - 1))


# -- shared checks ------------------------------------------------------------

def _ricci_hypothesis(m, R_hi, evidence=None):
    if evidence is not None:
        return Hypothesis("ricci_nonneg", bool(evidence), {"source": "supplied evidence"})
    hi = min(R_hi, 0.999 * m.r_max)
    grid = np.geomspace(1e-3, hi, 200)
    worst_r, worst = None, np.inf
    checked, truncated = 0, False
    for r in grid:
        try:
            rr = ricci_range(m, r)
        except NonFiniteError:
            truncated = True
            break
        checked, hi = checked + 1, float(r)
        if rr.ric_min < worst:
            worst_r, worst = float(r), float(rr.ric_min)
    detail = {"source": "eigenvalue grid", "points": checked, "r_max_checked": float(hi),
              "worst_r": worst_r, "worst_ric_min": worst}
    if truncated:
        detail["truncated_for_overflow"] = True
    return Hypothesis("ricci_nonneg", checked > 0 and worst >= -RICCI_TOL, detail)


def _bound_hypothesis(spec, m, R_lo, R_hi):
    R_hi = min(R_hi, 0.999 * m.r_max)
    truncated = False
    while True:
        try:
            rep = check_bound(spec, m, R_lo, R_hi)
            break
        except NonFiniteError:
            # fast-growing profiles overflow before the probe range ends
            if R_hi / 2 <= R_lo:
                raise
            R_hi, truncated = R_hi / 2, True
    detail = {"range": [float(R_lo), float(rep.radius_grid[-1])], "first_violation": rep.first_violation,
              "bracketed": rep.bracketed, "min_margin": float(np.min(rep.margin))}
    if truncated:
        detail["truncated_for_overflow"] = True
    return Hypothesis("entropy_bound", rep.holds, detail), rep


def _r_over_volume(m):
    def integrand(R):
        R = np.asarray(R, dtype=float)
        order = np.argsort(R)
        vols = np.empty_like(R)
        vols[order] = m.volumes(R[order])
        return R / vols

    return integrand


def _inverse_area(m):
    def integrand(R):
        with np.errstate(over="ignore", divide="ignore"):
            return 1.0 / m.area(R)

    return integrand


# -- criteria ---------------------------------------------------------------

def criterion_thm31(m, sigma0, ricci_nonneg=None, probe=TailProbe(), bound_range=None,
                    R_budget=R_BUDGET):
    """Transience from a constant entropy-density floor ``sigma0`` and ``Ric >= 0``.

    Hypotheses: nonnegative Ricci curvature (from ``ricci_nonneg`` evidence
    when supplied, else an eigenvalue grid); the bound for density
    ``sigma0`` on ``bound_range`` (default ``[R_start/1024, R_end]`` of the
    probe); convergence of ``int R dR / Vol(B_R)``.

    When the bound holds on the range, Ricci is nonnegative, but the volume
    integral does not converge, the bound has to fail further out; the
    search for that radius continues up to ``R_budget``.
    """
    spec = ConstantDensity(sigma0)
    R_lo, R_hi = bound_range or (probe.R_start / 1024.0, probe.R_end)
    ricci = _ricci_hypothesis(m, R_hi, ricci_nonneg)
    bound, rep = _bound_hypothesis(spec, m, R_lo, R_hi)
    volume = _verdict_hypothesis("volume_growth", classify_integral(_r_over_volume(m), probe))
    report = CriterionReport("thm31", [ricci, bound, volume], Conclusion.NOT_APPLICABLE)

    if not bound.passed:
        report.conclusion = Conclusion.VIOLATION
        report.violation_radius = rep.first_violation
        return report
    if not ricci.passed:
        return report
    if volume.passed:
        report.conclusion = Conclusion.TRANSIENT
        return report
    if volume.passed is False:
        try:
            R_star = find_violation(spec, m, R_from=R_hi, R_budget=R_budget)
        except SearchBudgetExceeded as exc:
            report.notes.append(f"volume integral diverges but {exc}")
            return report
        bound.passed = False
        bound.detail["first_violation"] = R_star
        bound.detail["found_by"] = "outward search beyond the range"
        report.conclusion = Conclusion.VIOLATION
        report.violation_radius = R_star
    return report


def criterion_thm32(m, S, C1, C2, probe=TailProbe(), ricci_grid=None, volcomp_grid=None,
                    samples=20_000, seed=0):
    """Non-parabolicity from an entropy distribution with ``1/S`` integrable.

    Besides the bound and ``1/S in L^1``, needs Ricci decay ``Ric >= -C1/r^2``
    and the volume comparison with constant ``C2``.  The derived conditions
    ``1/Area in L^1`` and ``R/Vol in L^1`` are classified and reported too.
    """
    if isinstance(S, ConstantDensity):
        raise TypeError("criterion_thm32 needs a radial entropy distribution")
    R_hi = min(probe.R_end, 0.999 * m.r_max)
    if ricci_grid is None:
        ricci_grid = np.geomspace(1e-2, R_hi, 200)
    if volcomp_grid is None:
        volcomp_grid = [R for R in (0.5, 1.0, 2.0, 4.0, 8.0) if 1.5 * R < m.r_max]

    hyps = [_verdict_hypothesis("entropy_l1", entropy_l1_condition(S, probe))]
    hyps.append(_bound_hypothesis(S, m, probe.R_start, R_hi)[0])
    decay = check_ricci_decay(m, C1, ricci_grid)
    hyps.append(Hypothesis("ricci_decay", decay.ok,
                           {"C1": decay.C1, "checked": decay.checked, "violations": decay.violations[:5]}))
    try:
        vc = check_volume_comparison(m, C2, volcomp_grid, samples=samples, seed=seed)
        hyps.append(Hypothesis("volume_comparison", vc.ok, {"C2": vc.C2, "rows": vc.rows}))
    except EstimatorInconclusive as exc:
        hyps.append(Hypothesis("volume_comparison", None, {"C2": float(C2), "diagnostic": str(exc)}))
    hyps.append(_verdict_hypothesis("inverse_area_l1", classify_integral(_inverse_area(m), probe)))
    hyps.append(_verdict_hypothesis("volume_growth", classify_integral(_r_over_volume(m), probe)))
    report = CriterionReport("thm32", hyps, Conclusion.NOT_APPLICABLE)
    if report.all_passed:
        report.conclusion = Conclusion.NON_PARABOLIC
    return report


def criterion_thm33(m, S, probe=TailProbe()):
    """Transience of a model manifold from the bound and ``1/S in L^1``,
    through ``1/Area in L^1``."""
    if isinstance(S, ConstantDensity):
        raise TypeError("criterion_thm33 needs a radial entropy distribution")
    R_hi = min(probe.R_end, 0.999 * m.r_max)
    hyps = [
        _verdict_hypothesis("entropy_l1", entropy_l1_condition(S, probe)),
        _bound_hypothesis(S, m, probe.R_start, R_hi)[0],
        _verdict_hypothesis("inverse_area_l1", classify_integral(_inverse_area(m), probe)),
    ]
    report = CriterionReport("thm33", hyps, Conclusion.NOT_APPLICABLE)
    if report.all_passed:
        report.conclusion = Conclusion.TRANSIENT
    return report


def corollary35_report(m, sigma0, probe=TailProbe(), R_from=1e-3, R_budget=R_BUDGET, ricci_nonneg=None):
    """Radius where the bound with density ``sigma0`` fails on a parabolic model with ``Ric >= 0``.

    Raises
    ------
    SearchBudgetExceeded
        If no violation is found below ``R_budget``.
    """
    ricci = _ricci_hypothesis(m, probe.R_end, ricci_nonneg)
    cap = capacity_oracle(m, probe.R_start, probe)
    parabolic = Hypothesis("parabolic", {CapacityStatus.PARABOLIC: True,
                                         CapacityStatus.NON_PARABOLIC: False}.get(cap.status),
                           cap.to_dict())
    report = CriterionReport("cor35", [ricci, parabolic], Conclusion.NOT_APPLICABLE)
    if not report.all_passed:
        if parabolic.passed is False:
            report.notes.append("capacity oracle says non-parabolic; the corollary does not apply")
        return report
    report.violation_radius = find_violation(ConstantDensity(sigma0), m, R_from, R_budget)
    report.conclusion = Conclusion.VIOLATION
    return report
