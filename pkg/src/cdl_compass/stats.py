"""Assumption checks: distribution, linearity, independence, and direction tests.

Every test returns a :class:`TestReport` holding the statistic, the
p-value, the significance level, and the decision, with the invariant
``decision == Reject  iff  p_value < alpha`` enforced at construction.
Reports serialize to plain JSON-compatible mappings and may nest advisory
sub-reports that carry extra diagnostics without affecting the decision.

Tests provided:

* one-sample Kolmogorov–Smirnov against an arbitrary CDF (exact small-n
  p-values, asymptotic beyond n = 35);
* Jarque–Bera normality (moment-based, chi-square with 2 df);
* CUSUM-of-recursive-residuals linearity check with drifting boundaries
  and an analytic boundary-crossing p-value;
* rank-correlation residual independence with a permutation p-value,
  sensitive to both signed and magnitude dependence;
* additive-noise direction finding built from local-polynomial smoothing
  plus the residual independence check in both directions;
* Gaussian conditional-independence testing via partial correlation and
  the Fisher z transform.

Also here: the mapping from knowledge tags to testability tiers (which
levels of a claimed state need empirical support, which cannot get any).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.signal import savgol_filter
from scipy.special import kolmogorov, ndtr
from scipy.stats import chi2, kstwo, rankdata

from .lattice import ParametricTag, StructuralTag


class Decision(enum.Enum):
    REJECT_NULL = "reject_null"
    FAIL_TO_REJECT = "fail_to_reject"

    @property
    def label(self) -> str:
        return self.value

    @classmethod
    def from_label(cls, label: str) -> "Decision":
        for member in cls:
            if member.value == label:
                return member
        raise ValueError(f"unknown decision {label!r}")


_DETAIL_TYPES = (float, int, str, bool)


def _tag_from_label(label: str) -> StructuralTag | ParametricTag:
    # Structural and parametric labels are disjoint, so one string suffices.
    for kind in (StructuralTag, ParametricTag):
        try:
            return kind.from_label(label)
        except ValueError:
            continue
    raise ValueError(f"unknown knowledge level {label!r}")


@dataclass(frozen=True)
class TestReport:
    """Outcome of one hypothesis test.

    ``decision`` is redundant with ``p_value < alpha`` and is checked to
    agree at construction, so a report can never carry a contradictory
    verdict.  ``bears_on`` names the knowledge level the test gives
    evidence about (e.g. a conditional-independence test bears on the
    plausible structural level).  ``details`` holds test-specific
    scalars; ``sub_reports`` holds advisory nested reports (their
    decisions do not feed back into this one).
    """

    test: str
    statistic: float
    p_value: float
    alpha: float
    decision: Decision
    bears_on: StructuralTag | ParametricTag | None = None
    details: Mapping[str, float | int | str | bool] = field(default_factory=dict)
    sub_reports: tuple["TestReport", ...] = ()

    def __post_init__(self) -> None:
        if not self.test:
            raise ValueError("a report needs a test name")
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p-value {self.p_value!r} outside [0, 1]")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha {self.alpha!r} outside (0, 1)")
        expected = Decision.REJECT_NULL if self.p_value < self.alpha else Decision.FAIL_TO_REJECT
        if self.decision is not expected:
            raise ValueError(
                f"decision {self.decision.label} contradicts p={self.p_value!r} "
                f"at alpha={self.alpha!r}"
            )
        if self.bears_on is not None and not isinstance(
            self.bears_on, (StructuralTag, ParametricTag)
        ):
            raise TypeError(f"bears_on must be a knowledge tag, got {self.bears_on!r}")
        for key, value in self.details.items():
            if not isinstance(value, _DETAIL_TYPES):
                raise ValueError(f"detail {key!r} has non-scalar value {value!r}")
        object.__setattr__(self, "details", dict(self.details))

    @classmethod
    def from_p(
        cls,
        test: str,
        statistic: float,
        p_value: float,
        alpha: float,
        bears_on: StructuralTag | ParametricTag | None = None,
        details: Mapping[str, float | int | str | bool] | None = None,
        sub_reports: Sequence["TestReport"] = (),
    ) -> "TestReport":
        """Build a report with the decision derived from p and alpha."""
        p_value = min(1.0, max(0.0, float(p_value)))
        decision = Decision.REJECT_NULL if p_value < alpha else Decision.FAIL_TO_REJECT
        return cls(
            test=test,
            statistic=float(statistic),
            p_value=p_value,
            alpha=float(alpha),
            decision=decision,
            bears_on=bears_on,
            details=dict(details or {}),
            sub_reports=tuple(sub_reports),
        )

    def to_mapping(self) -> dict:
        out: dict = {
            "test": self.test,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "decision": self.decision.label,
            "bears_on": None if self.bears_on is None else self.bears_on.label,
        }
        if self.details:
            out["details"] = dict(self.details)
        if self.sub_reports:
            out["sub_reports"] = [r.to_mapping() for r in self.sub_reports]
        return out

    @classmethod
    def from_mapping(cls, data: Mapping) -> "TestReport":
        raw_tag = data.get("bears_on")
        return cls(
            test=data["test"],
            statistic=float(data["statistic"]),
            p_value=float(data["p_value"]),
            alpha=float(data["alpha"]),
            decision=Decision.from_label(data["decision"]),
            bears_on=None if raw_tag is None else _tag_from_label(raw_tag),
            details=dict(data.get("details", {})),
            sub_reports=tuple(
                cls.from_mapping(sub) for sub in data.get("sub_reports", ())
            ),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TestReport):
            return NotImplemented
        return self.to_mapping() == other.to_mapping()


def _as_vector(values: Sequence[float], name: str, minimum: int = 1) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a one-dimensional sequence")
    if arr.shape[0] < minimum:
        raise ValueError(f"{name} needs at least {minimum} values, got {arr.shape[0]}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


# ---------------------------------------------------------------------------
# Kolmogorov–Smirnov

_KS_EXACT_LIMIT = 35


def gaussian_cdf(mu: float = 0.0, sigma: float = 1.0) -> Callable[[float], float]:
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    return lambda v: float(ndtr((v - mu) / sigma))


def uniform_cdf(low: float = 0.0, high: float = 1.0) -> Callable[[float], float]:
    if not low < high:
        raise ValueError(f"need low < high, got [{low!r}, {high!r}]")
    return lambda v: min(1.0, max(0.0, (v - low) / (high - low)))


def ks_test(
    values: Sequence[float],
    cdf: Callable[[float], float],
    alpha: float = 0.05,
) -> TestReport:
    """One-sample two-sided Kolmogorov–Smirnov test against ``cdf``.

    D is the sup distance between the empirical CDF and the reference,
    computed at the sample points from both sides.  The p-value uses the
    exact finite-n distribution for n below 35 and the asymptotic
    Kolmogorov law above.
    """
    xs = np.sort(_as_vector(values, "values"))
    n = xs.shape[0]
    f = np.asarray([float(cdf(v)) for v in xs])
    if ((f < 0.0) | (f > 1.0)).any():
        raise ValueError("cdf returned a value outside [0, 1]")
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    d = float(max(upper.max(), lower.max(), 0.0))
    if n < _KS_EXACT_LIMIT:
        p = float(kstwo.sf(d, n))
    else:
        p = float(kolmogorov(math.sqrt(n) * d))
    return TestReport.from_p(
        "ks", d, p, alpha, bears_on=ParametricTag.NOISE_MODEL, details={"n": int(n)}
    )


# ---------------------------------------------------------------------------
# Jarque–Bera


def jarque_bera_test(values: Sequence[float], alpha: float = 0.05) -> TestReport:
    """Moment-based normality test.

    Central moments use the 1/n convention; the statistic is
    ``n/6 * (S^2 + (K - 3)^2 / 4)`` against a chi-square with 2 degrees of
    freedom.  Constant samples have no defined shape and are rejected as
    input.
    """
    xs = _as_vector(values, "values", minimum=3)
    n = xs.shape[0]
    centered = xs - xs.mean()
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        raise ValueError("sample variance is zero; skewness and kurtosis undefined")
    skew = float(np.mean(centered**3)) / m2**1.5
    kurt = float(np.mean(centered**4)) / m2**2
    jb = n / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)
    p = float(chi2.sf(jb, 2))
    return TestReport.from_p(
        "jarque_bera",
        jb,
        p,
        alpha,
        bears_on=ParametricTag.NOISE_MODEL,
        details={"n": int(n), "skewness": skew, "kurtosis": kurt},
    )


# ---------------------------------------------------------------------------
# CUSUM linearity


def cusum_crossing_probability(coefficient: float) -> float:
    """Probability that |W| crosses the drifting boundary at this coefficient.

    The boundary grows linearly from the coefficient at the start of the
    sequence to three times it at the end; the crossing probability for a
    Brownian path is ``2 * (1 - Phi(3c) + exp(-4c^2) * Phi(c))``, clipped
    to [0, 1].
    """
    if coefficient < 0.0:
        raise ValueError(f"coefficient must be non-negative, got {coefficient!r}")
    return min(1.0, max(0.0, _crossing_raw(coefficient)))


def _crossing_raw(c: float) -> float:
    return 2.0 * (1.0 - float(ndtr(3.0 * c)) + math.exp(-4.0 * c * c) * float(ndtr(c)))


def cusum_critical_coefficient(alpha: float) -> float:
    """Boundary coefficient whose crossing probability equals ``alpha``.

    Solved numerically; reproduces the classical tabled values 0.850,
    0.948, and 1.143 at the 10%, 5%, and 1% levels.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha {alpha!r} outside (0, 1)")
    return float(brentq(lambda c: _crossing_raw(c) - alpha, 1e-12, 20.0))


def recursive_residuals(x: Sequence[float], y: Sequence[float]) -> np.ndarray:
    """Standardized one-step-ahead prediction errors of a straight-line fit.

    Points are taken in order of increasing x (stable over ties).  The
    initial window holds the first two points, extended while its x values
    are all tied so the slope stays identifiable; each later point
    contributes ``(y - prediction) / sqrt(1 + leverage)``.  Under a true
    linear model with iid Gaussian noise the outputs are iid normal.
    """
    xv = _as_vector(x, "x", minimum=3)
    yv = _as_vector(y, "y", minimum=3)
    if xv.shape != yv.shape:
        raise ValueError("x and y must have equal length")
    order = np.argsort(xv, kind="stable")
    xs, ys = xv[order], yv[order]
    n = xs.shape[0]
    j = 2
    while j < n and xs[j - 1] == xs[0]:
        j += 1
    if xs[j - 1] == xs[0]:
        raise ValueError("x has no variation; a line cannot be fit")
    design = np.column_stack([np.ones(j), xs[:j]])
    xtx_inv = np.linalg.inv(design.T @ design)
    beta = xtx_inv @ design.T @ ys[:j]
    out = np.empty(n - j)
    for idx, r in enumerate(range(j, n)):
        row = np.array([1.0, xs[r]])
        spread = 1.0 + float(row @ xtx_inv @ row)
        err = float(ys[r] - row @ beta)
        out[idx] = err / math.sqrt(spread)
        gain = (xtx_inv @ row) / spread
        beta = beta + gain * err
        xtx_inv = xtx_inv - np.outer(gain, row @ xtx_inv)
    return out


def cusum_linearity_test(
    x: Sequence[float],
    y: Sequence[float],
    alpha: float = 0.05,
) -> TestReport:
    """Structural-stability check of a straight-line fit of y on x.

    The cumulative sum of standardized recursive residuals is compared
    against boundaries that drift outward along the sequence (the classic
    0.948 * sqrt(R) family at the 5% level, rescaled per alpha); curvature
    in the true relationship makes the recursive residuals trend and the
    cumulative sum escape.  The statistic is the largest boundary-relative
    excursion, the p-value its crossing probability.  A perfectly linear
    noise-free sample yields statistic 0 and no rejection.

    An advisory Kolmogorov–Smirnov sub-report checks the standardized
    residuals against the standard normal; it flags distributional
    surprises but does not enter the decision.  Needs at least five
    points with at least two distinct x values.
    """
    if len(x) < 5:
        raise ValueError(f"need at least 5 points for a stability check, got {len(x)}")
    w = recursive_residuals(x, y)
    big_r = w.shape[0]
    if big_r < 2:
        raise ValueError("too few recursive residuals to form a path")
    sigma = math.sqrt(float(np.sum(w**2)) / big_r)
    details: dict[str, float | int | str | bool] = {
        "n_residuals": int(big_r),
        "sigma": sigma,
        "critical_value": cusum_critical_coefficient(alpha) * math.sqrt(big_r),
    }
    if sigma == 0.0:
        return TestReport.from_p(
            "cusum", 0.0, 1.0, alpha, bears_on=ParametricTag.PARAMETRIC, details=details
        )
    path = np.cumsum(w) / sigma
    rr = np.arange(1, big_r + 1)
    excursion = np.abs(path) / (1.0 + 2.0 * rr / big_r)
    statistic = float(excursion.max())
    p = cusum_crossing_probability(statistic / math.sqrt(big_r))
    advisory = ks_test(w / sigma, gaussian_cdf(), alpha)
    return TestReport.from_p(
        "cusum",
        statistic,
        p,
        alpha,
        bears_on=ParametricTag.PARAMETRIC,
        details=details,
        sub_reports=(advisory,),
    )


# ---------------------------------------------------------------------------
# Smoothing


def savitzky_golay_smooth(
    values: Sequence[float], window: int, degree: int
) -> np.ndarray:
    """Local least-squares polynomial smoothing over a sliding window.

    The window must be odd, longer than the degree, and no longer than the
    input; edges are handled by evaluating the edge window's polynomial.
    """
    arr = _as_vector(values, "values")
    if window % 2 == 0 or window < 3:
        raise ValueError(f"window must be odd and at least 3, got {window}")
    if degree < 0 or degree >= window:
        raise ValueError(f"degree {degree} incompatible with window {window}")
    if window > arr.shape[0]:
        raise ValueError(f"window {window} exceeds series length {arr.shape[0]}")
    return savgol_filter(arr, window, degree, mode="interp")


# ---------------------------------------------------------------------------
# Residual independence


def _centered_ranks(values: np.ndarray) -> np.ndarray:
    ranks = rankdata(values)
    return ranks - ranks.mean()


def _rank_correlation(a: np.ndarray, b: np.ndarray) -> float:
    # a, b centered rank vectors; a constant vector correlates with nothing
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b / (na * nb))


def residual_independence_test(
    x: Sequence[float],
    residuals: Sequence[float],
    alpha: float = 0.05,
    n_permutations: int = 999,
    seed: int = 0,
) -> TestReport:
    """Permutation test of independence between an input and fit residuals.

    The statistic is the larger of two absolute Spearman correlations:
    input against residuals (signed dependence) and input against absolute
    residuals (scale dependence).  The null distribution comes from
    permuting the residual vector; the reported p is
    ``(1 + #{permuted >= observed}) / (1 + n_permutations)``.  Needs at
    least 20 points for the permutation null to carry any resolution.
    """
    xv = _as_vector(x, "x", minimum=20)
    rv = _as_vector(residuals, "residuals", minimum=20)
    if xv.shape != rv.shape:
        raise ValueError("x and residuals must have equal length")
    if n_permutations < 1:
        raise ValueError(f"n_permutations must be positive, got {n_permutations}")
    n = xv.shape[0]
    xr = _centered_ranks(xv)
    sr = _centered_ranks(rv)
    ar = _centered_ranks(np.abs(rv))
    observed = max(abs(_rank_correlation(xr, sr)), abs(_rank_correlation(xr, ar)))
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(n_permutations):
        perm = rng.permutation(n)
        stat = max(
            abs(_rank_correlation(xr, sr[perm])),
            abs(_rank_correlation(xr, ar[perm])),
        )
        if stat >= observed:
            hits += 1
    p = (1 + hits) / (1 + n_permutations)
    return TestReport.from_p(
        "residual_independence",
        observed,
        p,
        alpha,
        bears_on=ParametricTag.NOISE_MODEL,
        details={"n": int(n), "n_permutations": int(n_permutations)},
    )


# ---------------------------------------------------------------------------
# Additive-noise direction finding


class CausalDirection(enum.Enum):
    X_TO_Y = "x_to_y"
    Y_TO_X = "y_to_x"
    INCONCLUSIVE = "inconclusive"

    @property
    def label(self) -> str:
        return self.value


@dataclass(frozen=True)
class AnmResult:
    direction: CausalDirection
    forward: TestReport
    backward: TestReport


def _anm_window(n: int) -> int:
    w = max(5, n // 10)
    return w if w % 2 == 1 else w + 1


def _anm_residual_report(
    cause: np.ndarray, effect: np.ndarray, alpha: float, seed: int
) -> TestReport:
    order = np.argsort(cause, kind="stable")
    cs, es = cause[order], effect[order]
    fitted = savitzky_golay_smooth(es, _anm_window(cs.shape[0]), 3)
    return residual_independence_test(cs, es - fitted, alpha=alpha, seed=seed)


def anm_direction(
    x: Sequence[float],
    y: Sequence[float],
    alpha: float = 0.05,
    seed: int = 0,
) -> AnmResult:
    """Pairwise causal direction via the additive-noise asymmetry.

    Each direction is scored by smoothing the putative effect against the
    putative cause (local cubic fit over a window of about a tenth of the
    sample) and testing the residuals for independence from the cause.  A
    direction is declared only when its own residuals pass and the reverse
    direction's residuals are rejected; anything else is inconclusive.
    Needs at least 50 points for the smoother to have anything to work
    with.
    """
    xv = _as_vector(x, "x", minimum=50)
    yv = _as_vector(y, "y", minimum=50)
    if xv.shape != yv.shape:
        raise ValueError("x and y must have equal length")
    forward = _anm_residual_report(xv, yv, alpha, seed)
    backward = _anm_residual_report(yv, xv, alpha, seed)
    fwd_ok = forward.decision is Decision.FAIL_TO_REJECT
    bwd_ok = backward.decision is Decision.FAIL_TO_REJECT
    if fwd_ok and not bwd_ok:
        direction = CausalDirection.X_TO_Y
    elif bwd_ok and not fwd_ok:
        direction = CausalDirection.Y_TO_X
    else:
        direction = CausalDirection.INCONCLUSIVE
    return AnmResult(direction, forward, backward)


# ---------------------------------------------------------------------------
# Gaussian conditional independence


def partial_correlation(
    data: Mapping[str, Sequence[float]] | "object",
    x: str,
    y: str,
    given: Sequence[str] = (),
) -> float:
    """Partial correlation of x and y given a conditioning set.

    Computed from the inverse of the correlation matrix over the involved
    variables; collinear or constant inputs are rejected.
    """
    columns = _columns(data, (x, y, *given))
    with np.errstate(invalid="ignore", divide="ignore"):
        matrix = np.corrcoef(np.vstack(columns))
    if not np.isfinite(matrix).all():
        raise ValueError("correlation undefined: a variable is constant")
    try:
        precision = np.linalg.inv(matrix)
    except np.linalg.LinAlgError:
        if abs(abs(matrix[0, 1]) - 1.0) <= 4.0 * np.finfo(float).eps:
            # x and y exactly collinear: the partial correlation is +-1 even
            # though the matrix cannot be inverted.
            return math.copysign(1.0, float(matrix[0, 1]))
        raise ValueError("correlation matrix is singular; variables are collinear") from None
    rho = -precision[0, 1] / math.sqrt(precision[0, 0] * precision[1, 1])
    return float(min(1.0, max(-1.0, rho)))


def _columns(data, names: Sequence[str]) -> list[np.ndarray]:
    if len(set(names)) != len(names):
        raise ValueError(f"variables must be distinct, got {list(names)}")
    if hasattr(data, "column"):
        vecs = [np.asarray(data.column(name), dtype=float) for name in names]
    else:
        vecs = []
        for name in names:
            if name not in data:
                raise ValueError(f"unknown variable {name!r}")
            vecs.append(np.asarray(data[name], dtype=float))
    length = {v.shape[0] for v in vecs}
    if len(length) != 1:
        raise ValueError("variables have unequal lengths")
    return vecs


def partial_correlation_ci_test(
    data,
    x: str,
    y: str,
    given: Sequence[str] = (),
    alpha: float = 0.05,
) -> TestReport:
    """Fisher-z test of zero partial correlation (Gaussian CI test).

    Rejecting means the data show conditional dependence between x and y
    given the conditioning set.  Needs ``n > |given| + 3`` samples.
    """
    given = tuple(given)
    rho = partial_correlation(data, x, y, given)
    n = _columns(data, (x,))[0].shape[0]
    dof = n - len(given) - 3
    if dof <= 0:
        raise ValueError(
            f"need more than {len(given) + 3} samples for {len(given)} conditioners, got {n}"
        )
    if abs(rho) >= 1.0:
        p = 0.0
        z = math.inf
    else:
        z = abs(math.atanh(rho)) * math.sqrt(dof)
        p = 2.0 * (1.0 - float(ndtr(z)))
    return TestReport.from_p(
        "partial_correlation",
        rho,
        p,
        alpha,
        bears_on=StructuralTag.PLAUSIBLE,
        details={"n": int(n), "given": ",".join(given), "z": float(z)},
    )


# ---------------------------------------------------------------------------
# Testability tiers


class TestabilityTier(enum.Enum):
    NO_TESTS_NEEDED = "no_tests_needed"
    TESTABLE = "testable"
    UNTESTABLE = "untestable"

    @property
    def label(self) -> str:
        return self.value


_STRUCTURAL_TIERS = {
    StructuralTag.UNKNOWN: TestabilityTier.NO_TESTS_NEEDED,
    StructuralTag.PLAUSIBLE: TestabilityTier.TESTABLE,
    StructuralTag.CAUSAL: TestabilityTier.UNTESTABLE,
}

_PARAMETRIC_TIERS = {
    ParametricTag.NONPARAMETRIC: TestabilityTier.NO_TESTS_NEEDED,
    ParametricTag.NOISE_MODEL: TestabilityTier.TESTABLE,
    ParametricTag.PARAMETRIC: TestabilityTier.TESTABLE,
    ParametricTag.FULLY_KNOWN: TestabilityTier.UNTESTABLE,
}


def testability_tier(tag: StructuralTag | ParametricTag) -> TestabilityTier:
    """How much empirical support a claimed knowledge level admits.

    Bottom levels claim nothing and need no tests; mid levels carry
    falsifiable implications (independence constraints, noise shape,
    functional form); top levels assert more than observational data can
    confirm.
    """
    if isinstance(tag, StructuralTag):
        return _STRUCTURAL_TIERS[tag]
    if isinstance(tag, ParametricTag):
        return _PARAMETRIC_TIERS[tag]
    raise TypeError(f"expected a structural or parametric tag, got {tag!r}")


__all__ = [
    "AnmResult",
    "CausalDirection",
    "Decision",
    "TestReport",
    "TestabilityTier",
    "anm_direction",
    "cusum_critical_coefficient",
    "cusum_crossing_probability",
    "cusum_linearity_test",
    "gaussian_cdf",
    "jarque_bera_test",
    "ks_test",
    "partial_correlation",
    "partial_correlation_ci_test",
    "recursive_residuals",
    "residual_independence_test",
    "savitzky_golay_smooth",
    "testability_tier",
    "uniform_cdf",
]
