"""Families used in the simulation study.

Each family has a sampler, its exact quadratic ``q`` and exact central
moments, plus brute-force checks of the defining integral (continuous) or
summation (discrete) identity.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate, special, stats

from .errors import InvalidSpec, NumericError
from .estimators import QParams
from .moments import Case, MomentSet, Sample

# name -> (ordered parameter names, defaults, case)
FAMILIES = {
    "normal": (("mu", "sigma2"), {"mu": 0.0, "sigma2": 1.0}, Case.CONTINUOUS),
    "uniform01": ((), {}, Case.CONTINUOUS),
    "beta": (("a", "b"), {}, Case.CONTINUOUS),
    "gamma": (("a", "theta"), {"theta": 1.0}, Case.CONTINUOUS),
    "exponential": (("theta",), {"theta": 1.0}, Case.CONTINUOUS),
    "poisson": (("lambda",), {}, Case.DISCRETE),
    "binomial": (("N", "p"), {}, Case.DISCRETE),
    "negbinomial": (("r", "p"), {}, Case.DISCRETE),
}
_ALIASES = {"lam": "lambda"}


@dataclass(frozen=True)
class FamilySpec:
    """A distribution family with validated parameters.

    >>> FamilySpec.parse("beta:a=5,b=5").params
    {'a': 5.0, 'b': 5.0}
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}; known: {sorted(FAMILIES)}")
        names, defaults, _ = FAMILIES[self.family]
        params = dict(defaults)
        for key, val in self.params.items():
            key = _ALIASES.get(key, key)
            if key not in names:
                raise InvalidSpec(f"{self.family}: unknown parameter {key!r}")
            params[key] = float(val)
        missing = [k for k in names if k not in params]
        if missing:
            raise InvalidSpec(f"{self.family}: missing parameter(s) {missing}")
        object.__setattr__(self, "params", {k: params[k] for k in names})
        self._validate()

    def _validate(self):
        p = self.params
        fam = self.family
        positive = {"sigma2", "a", "b", "theta", "lambda", "r"}
        for k, v in p.items():
            if not math.isfinite(v):
                raise InvalidSpec(f"{fam}: {k} must be finite")
            if k in positive and not v > 0:
                raise InvalidSpec(f"{fam}: {k} must be positive, got {v}")
        if "p" in p and not 0 < p["p"] < 1:
            raise InvalidSpec(f"{fam}: p must be in (0, 1), got {p['p']}")
        if fam == "binomial" and (p["N"] < 1 or p["N"] != int(p["N"])):
            raise InvalidSpec(f"binomial: N must be a positive integer, got {p['N']}")

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        """Parse ``"name"`` or ``"name:k=v,k=v"``."""
        name, _, rest = text.strip().partition(":")
        params = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, val = item.partition("=")
            if not eq:
                raise InvalidSpec(f"malformed parameter {item!r} in {text!r}")
            try:
                params[key.strip()] = float(val)
            except ValueError:
                raise InvalidSpec(f"non-numeric parameter {item!r} in {text!r}") from None
        return cls(name.strip().lower(), params)

    @property
    def case(self) -> Case:
        return FAMILIES[self.family][2]

    def __str__(self):
        if not self.params:
            return self.family
        vals = ",".join(f"{k}={_fmt(v)}" for k, v in self.params.items())
        return f"{self.family}:{vals}"


def _fmt(v):
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def draw(spec: FamilySpec, gen: np.random.Generator, size):
    """Draw variates of ``spec`` from ``gen`` (numpy's samplers)."""
    p = spec.params
    fam = spec.family
    if fam == "normal":
        return gen.normal(p["mu"], math.sqrt(p["sigma2"]), size)
    if fam == "uniform01":
        return gen.random(size)
    if fam == "beta":
        return gen.beta(p["a"], p["b"], size)
    if fam == "gamma":
        return gen.gamma(p["a"], p["theta"], size)
    if fam == "exponential":
        return gen.exponential(p["theta"], size)
    if fam == "poisson":
        return gen.poisson(p["lambda"], size).astype(float)
    if fam == "binomial":
        return gen.binomial(int(p["N"]), p["p"], size).astype(float)
    if fam == "negbinomial":
        # numpy counts failures before the r-th success: C(j+r-1, j) p^r (1-p)^j.
        return gen.negative_binomial(p["r"], p["p"], size).astype(float)
    raise InvalidSpec(fam)


def sample(spec: FamilySpec, n: int, stream) -> Sample:
    """``n`` i.i.d. variates drawn from ``stream`` (RngStream or Generator)."""
    if n < 1:
        raise InvalidSpec(f"sample size must be >= 1, got {n}")
    gen = stream.generator() if hasattr(stream, "generator") else stream
    return Sample(draw(spec, gen, n), spec.case)


def true_q_params(spec: FamilySpec) -> QParams:
    """Exact ``(mu, delta, beta, gamma)`` of the family member."""
    p = spec.params
    fam = spec.family
    case = spec.case
    if fam == "normal":
        return QParams(p["mu"], 0.0, 0.0, p["sigma2"], case)
    if fam in ("uniform01", "beta"):
        a, b = (1.0, 1.0) if fam == "uniform01" else (p["a"], p["b"])
        s = a + b
        m = a / s
        return QParams(m, -1.0 / s, (1 - 2 * m) / s, m * (1 - m) / s, case)
    if fam in ("gamma", "exponential"):
        a = p.get("a", 1.0)
        th = p["theta"]
        return QParams(a * th, 0.0, th, a * th * th, case)
    if fam == "poisson":
        lam = p["lambda"]
        return QParams(lam, 0.0, 0.0, lam, case)
    if fam == "binomial":
        N, pr = p["N"], p["p"]
        return QParams(N * pr, 0.0, -pr, N * pr * (1 - pr), case)
    if fam == "negbinomial":
        r, pr = p["r"], p["p"]
        return QParams(r * (1 - pr) / pr, 0.0, (1 - pr) / pr, r * (1 - pr) / pr ** 2, case)
    raise InvalidSpec(fam)


# --- exact moments -----------------------------------------------------------

def _stirling2(k):
    """Row k of Stirling numbers of the second kind, S(k, 0..k)."""
    row = [1]
    for i in range(1, k + 1):
        new = [0] * (i + 1)
        for j in range(1, i + 1):
            new[j] = j * (row[j] if j < len(row) else 0) + row[j - 1]
        row = new
    return row


def _raw_from_factorial(fact, k):
    s = _stirling2(k)
    return sum(s[j] * fact(j) for j in range(k + 1))


def _raw_moments(spec, K):
    """Exact raw moments E X^k, k = 0..K, as Fractions."""
    p = {k: Fraction(v) for k, v in spec.params.items()}
    fam = spec.family

    def prod(f, k):
        out = Fraction(1)
        for j in range(k):
            out *= f(j)
        return out

    if fam in ("uniform01", "beta"):
        a, b = (Fraction(1), Fraction(1)) if fam == "uniform01" else (p["a"], p["b"])
        return [prod(lambda j: (a + j) / (a + b + j), k) for k in range(K + 1)]
    if fam in ("gamma", "exponential"):
        a = p.get("a", Fraction(1))
        th = p["theta"]
        return [th ** k * prod(lambda j: a + j, k) for k in range(K + 1)]
    if fam == "poisson":
        lam = p["lambda"]
        return [_raw_from_factorial(lambda j: lam ** j, k) for k in range(K + 1)]
    if fam == "binomial":
        N, pr = p["N"], p["p"]
        return [_raw_from_factorial(lambda j: prod(lambda i: N - i, j) * pr ** j, k)
                for k in range(K + 1)]
    if fam == "negbinomial":
        r, pr = p["r"], p["p"]
        odds = (1 - pr) / pr
        return [_raw_from_factorial(lambda j: prod(lambda i: r + i, j) * odds ** j, k)
                for k in range(K + 1)]
    raise InvalidSpec(fam)


def population_moments(spec: FamilySpec, max_order=8) -> MomentSet:
    """Exact central moments (computed in rational arithmetic)."""
    if not 2 <= max_order <= 8:
        raise ValueError("max_order must be in 2..8")
    if spec.family == "normal":
        s2 = Fraction(spec.params["sigma2"])
        cm = {}
        for k in range(2, max_order + 1):
            cm[k] = Fraction(0) if k % 2 else s2 ** (k // 2) * math.prod(range(k - 1, 0, -2))
        mean = Fraction(spec.params["mu"])
    else:
        raw = _raw_moments(spec, max_order)
        mean = raw[1]
        cm = {k: sum(math.comb(k, i) * raw[i] * (-mean) ** (k - i) for i in range(k + 1))
              for k in range(2, max_order + 1)}
    m = {k: float(v) for k, v in cm.items()}
    theta = float(cm[4] * cm[2] - cm[3] ** 2 - cm[2] ** 3) if max_order >= 4 else float("nan")
    return MomentSet(mean=float(mean), m=m, theta=theta)


# --- identity verifiers --------------------------------------------------------

def discrete_pmf(spec: FamilySpec, j_max=None):
    """Support ``0..j_max`` and p.m.f. values via ratio recurrences.

    The recurrence starts at the mode (log-p.m.f. from ``lgamma``) and runs
    outward, so neither factorials nor huge powers are formed.
    """
    if spec.case is not Case.DISCRETE:
        raise InvalidSpec(f"{spec.family} is not a discrete family")
    p = spec.params
    fam = spec.family
    if fam == "poisson":
        lam = p["lambda"]
        ratio = lambda j: lam / (j + 1)  # noqa: E731  p(j+1)/p(j)
        mode = int(math.floor(lam))
        logp_mode = mode * math.log(lam) - lam - math.lgamma(mode + 1)
        default_max = int(lam + 40 * math.sqrt(lam) + 50)
    elif fam == "binomial":
        N, pr = int(p["N"]), p["p"]
        ratio = lambda j: (N - j) / (j + 1) * pr / (1 - pr)  # noqa: E731
        mode = min(N, int(math.floor((N + 1) * pr)))
        logp_mode = (math.lgamma(N + 1) - math.lgamma(mode + 1) - math.lgamma(N - mode + 1)
                     + mode * math.log(pr) + (N - mode) * math.log1p(-pr))
        default_max = N
    else:
        r, pr = p["r"], p["p"]
        ratio = lambda j: (j + r) / (j + 1) * (1 - pr)  # noqa: E731
        mode = max(0, int(math.floor((r - 1) * (1 - pr) / pr)))
        logp_mode = (math.lgamma(mode + r) - math.lgamma(r) - math.lgamma(mode + 1)
                     + r * math.log(pr) + mode * math.log1p(-pr))
        mean = r * (1 - pr) / pr
        sd = math.sqrt(r * (1 - pr)) / pr
        default_max = int(mean + 60 * sd + 100)
    j_max = default_max if j_max is None else int(j_max)
    if fam == "binomial":
        j_max = min(j_max, int(p["N"]))
    mode = min(mode, j_max)
    pmf = np.zeros(j_max + 1)
    pmf[mode] = math.exp(logp_mode)
    for j in range(mode, j_max):
        pmf[j + 1] = pmf[j] * ratio(j)
    for j in range(mode - 1, -1, -1):
        pmf[j] = pmf[j + 1] / ratio(j)
    return np.arange(j_max + 1, dtype=float), pmf


def discrete_identity_residual(support, pmf, qp: QParams):
    """Max over the support of ``|sum_{k<=j} (mu - k) p(k) - q(j) p(j)|``.

    ``support`` must be consecutive integers in increasing order.
    """
    support = np.asarray(support, dtype=float)
    pmf = np.asarray(pmf, dtype=float)
    lhs = np.cumsum((qp.mu - support) * pmf)
    rhs = qp.q(support) * pmf
    return float(np.max(np.abs(lhs - rhs)))


def verify_discrete_identity(spec: FamilySpec, qp: QParams | None = None, j_max=None):
    """Residual of the summation identity over ``0..j_max``."""
    qp = true_q_params(spec) if qp is None else qp
    support, pmf = discrete_pmf(spec, j_max)
    return discrete_identity_residual(support, pmf, qp)


def _continuous_pieces(spec):
    """Return (pdf, lower_integral(x, mu), upper_integral(x, mu), support)."""
    p = spec.params
    fam = spec.family
    opts = dict(epsabs=1e-10, epsrel=1e-12, limit=200)
    if fam == "normal":
        dist = stats.norm(p["mu"], math.sqrt(p["sigma2"]))

        def lower(x, mu):
            return integrate.quad(lambda t: (mu - t) * dist.pdf(t), -np.inf, x, **opts)[0]

        def upper(x, mu):
            return integrate.quad(lambda t: (t - mu) * dist.pdf(t), x, np.inf, **opts)[0]

        return dist.pdf, lower, upper, (-np.inf, np.inf)
    if fam in ("uniform01", "beta"):
        a, b = (1.0, 1.0) if fam == "uniform01" else (p["a"], p["b"])
        lognorm = special.betaln(a, b)
        dist = stats.beta(a, b)

        # Endpoint singularities go into quad's algebraic weights.
        def lower(x, mu):
            f = lambda t: (mu - t) * (1 - t) ** (b - 1) * math.exp(-lognorm)  # noqa: E731
            return integrate.quad(f, 0.0, x, weight="alg", wvar=(a - 1, 0.0), **opts)[0]

        def upper(x, mu):
            f = lambda t: (t - mu) * t ** (a - 1) * math.exp(-lognorm)  # noqa: E731
            return integrate.quad(f, x, 1.0, weight="alg", wvar=(0.0, b - 1), **opts)[0]

        return dist.pdf, lower, upper, (0.0, 1.0)
    if fam in ("gamma", "exponential"):
        a = p.get("a", 1.0)
        th = p["theta"]
        lognorm = special.gammaln(a) + a * math.log(th)
        dist = stats.gamma(a, scale=th)

        def lower(x, mu):
            f = lambda t: (mu - t) * math.exp(-t / th - lognorm)  # noqa: E731
            return integrate.quad(f, 0.0, x, weight="alg", wvar=(a - 1, 0.0), **opts)[0]

        def upper(x, mu):
            return integrate.quad(lambda t: (t - mu) * dist.pdf(t), x, np.inf, **opts)[0]

        return dist.pdf, lower, upper, (0.0, np.inf)
    raise InvalidSpec(f"{fam} is not a continuous family")


def default_grid(spec: FamilySpec, points=50):
    """Interior grid: evenly spaced in (0.01, 0.99) for beta-type families,
    otherwise between the 0.1% and 99.9% quantiles."""
    p = spec.params
    fam = spec.family
    if fam == "normal":
        dist = stats.norm(p["mu"], math.sqrt(p["sigma2"]))
    elif fam in ("uniform01", "beta"):
        return np.linspace(0.01, 0.99, points)
    elif fam in ("gamma", "exponential"):
        dist = stats.gamma(p.get("a", 1.0), scale=p["theta"])
    else:
        raise InvalidSpec(f"{fam} is not a continuous family")
    return dist.ppf(np.linspace(0.001, 0.999, points))


def verify_continuous_identity(spec: FamilySpec, qp: QParams | None = None, grid=None):
    """Max residual of ``int_{-inf}^x (mu - t) f(t) dt = q(x) f(x)`` on a grid.

    The left side is integrated by adaptive quadrature over whichever tail
    does not contain the mean's far side (the two tails agree since
    ``E[mu - X] = 0``).

    Raises
    ------
    NumericError
        If the quadrature reports non-convergence.
    """
    qp = true_q_params(spec) if qp is None else qp
    pdf, lower, upper, (lo, hi) = _continuous_pieces(spec)
    grid = default_grid(spec) if grid is None else np.asarray(grid, dtype=float)
    if np.any(grid <= lo) or np.any(grid >= hi):
        raise InvalidSpec("grid points must lie inside the support")
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for x in grid:
            try:
                lhs = lower(x, qp.mu) if x <= qp.mu else upper(x, qp.mu)
            except integrate.IntegrationWarning as exc:
                raise NumericError(f"quadrature did not converge at x={x}: {exc}") from exc
            worst = max(worst, abs(lhs - float(qp.q(x)) * float(pdf(x))))
    return worst
