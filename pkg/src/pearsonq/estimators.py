"""Closed-form moment estimators of the Pearson quadratic q.

``q(x) = delta*(x - mu)**2 + beta*(x - mu) + gamma``.  The estimators solve
the three moment equations produced by the Stein-type covariance identity
with ``g(x) = (x - mu)**(k+1)``, ``k = 0, 1, 2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import SingularSystem, ThetaDegenerate
from .moments import Case, MomentSet, theta_epsilon

_AGREE_TOL = 1e-9


@dataclass(frozen=True)
class QParams:
    mu: float
    delta: float
    beta: float
    gamma: float
    case: Case = Case.CONTINUOUS

    def __post_init__(self):
        object.__setattr__(self, "case", Case.parse(self.case))

    def q(self, x):
        """Evaluate the quadratic at ``x``."""
        d = np.asarray(x, dtype=float) - self.mu
        return self.delta * d * d + self.beta * d + self.gamma

    def as_tuple(self):
        return (self.delta, self.beta, self.gamma)

    def to_dict(self):
        out = asdict(self)
        out["case"] = self.case.value
        return out


def _moments(ms: MomentSet):
    m2, m3, m4 = ms[2], ms[3], ms[4]
    theta = ms.theta if not math.isnan(ms.theta) else m4 * m2 - m3 * m3 - m2 ** 3
    if not theta > theta_epsilon(m2):
        raise ThetaDegenerate(None, theta)
    return m2, m3, m4, theta


def _check_agree(name, a, b, scale, cond):
    # Both forms carry rounding error of order eps * cond relative to scale.
    tol = _AGREE_TOL * max(1.0, cond) * max(scale, abs(a), abs(b), 1e-300)
    assert abs(a - b) <= tol, f"{name}: factored {a!r} vs expanded {b!r}"


def estimate_continuous(ms: MomentSet) -> QParams:
    """Moment estimators for a continuous Pearson member.

    Examples
    --------
    >>> from pearsonq.moments import MomentSet
    >>> estimate_continuous(MomentSet(0.0, {2: 1.0, 3: 2.0, 4: 9.0})).as_tuple()
    (0.0, 1.0, 1.0)
    """
    m2, m3, m4, theta = _moments(ms)
    den = 6.0 * theta
    delta = (2 * m4 * m2 - 3 * m3 * m3 - 6 * m2 ** 3) / den
    beta = m3 * (1 - 2 * delta) / (2 * m2)
    gamma = m2 * (1 - delta)
    if __debug__:
        cond = (m4 * m2 + m3 * m3 + m2 ** 3) / theta
        _check_agree("beta", beta, (m4 * m3 + 3 * m3 * m2 * m2) / den, math.sqrt(m2), cond)
        _check_agree("gamma", gamma, (4 * m4 * m2 * m2 - 3 * m3 * m3 * m2) / den, m2, cond)
    if gamma <= 0:
        warnings.warn(f"estimated gamma={gamma:.6g} is not positive", RuntimeWarning,
                      stacklevel=2)
    return QParams(ms.mean, delta, beta, gamma, Case.CONTINUOUS)


def estimate_discrete(ms: MomentSet) -> QParams:
    """Moment estimators for an integer-valued Pearson member."""
    m2, m3, m4, theta = _moments(ms)
    den = 6.0 * theta
    delta = (2 * m4 * m2 - 3 * m3 * m3 - 6 * m2 ** 3 + m2 * m2) / den
    beta = (m3 * (1 - 2 * delta) - m2) / (2 * m2)
    gamma = m2 * (1 - delta)
    if __debug__:
        cond = (m4 * m2 + m3 * m3 + m2 ** 3 + m2 * m2) / theta
        beta_x = (m4 * m3 - 3 * m4 * m2 + 3 * m3 * m3 + 3 * m3 * m2 * m2
                  - m3 * m2 + 3 * m2 ** 3) / den
        gamma_x = (4 * m4 * m2 * m2 - 3 * m3 * m3 * m2 - m2 ** 3) / den
        _check_agree("beta", beta, beta_x, math.sqrt(m2) + 1.0, cond)
        _check_agree("gamma", gamma, gamma_x, m2, cond)
    return QParams(ms.mean, delta, beta, gamma, Case.DISCRETE)


def estimate(ms: MomentSet, case) -> QParams:
    if Case.parse(case) is Case.DISCRETE:
        return estimate_discrete(ms)
    return estimate_continuous(ms)


def estimate_rows(m2, m3, m4, case):
    """Vectorised estimators for arrays of moments.

    Returns ``(delta, beta, gamma, ok)`` where ``ok`` flags rows whose theta
    clears the degeneracy threshold; the other rows hold NaN.
    """
    m2, m3, m4 = (np.asarray(a, dtype=float) for a in (m2, m3, m4))
    theta = m4 * m2 - m3 * m3 - m2 * m2 * m2
    ok = theta > theta_epsilon(m2)
    den = np.where(ok, 6.0 * theta, np.nan)
    if Case.parse(case) is Case.DISCRETE:
        delta = (2 * m4 * m2 - 3 * m3 * m3 - 6 * m2 ** 3 + m2 * m2) / den
        beta = (m3 * (1 - 2 * delta) - m2) / (2 * m2)
    else:
        delta = (2 * m4 * m2 - 3 * m3 * m3 - 6 * m2 ** 3) / den
        beta = m3 * (1 - 2 * delta) / (2 * m2)
    gamma = m2 * (1 - delta)
    return delta, beta, gamma, ok


def moment_system(ms: MomentSet, case):
    """Coefficient matrix and right-hand side of the 3x3 moment system.

    Unknowns are ordered ``(delta, beta, gamma)``.
    """
    m2, m3, m4 = ms[2], ms[3], ms[4]
    if Case.parse(case) is Case.DISCRETE:
        a = [[m2, 0.0, 1.0],
             [2 * m3 + m2, 2 * m2, 1.0],
             [3 * m4 + 3 * m3 + m2, 3 * m3 + 3 * m2, 3 * m2 + 1.0]]
    else:
        # (k+1) * [m_{k+2} delta + m_{k+1} beta + m_k gamma] = m_{k+2}, k = 0, 1, 2
        a = [[m2, 0.0, 1.0],
             [2 * m3, 2 * m2, 0.0],
             [3 * m4, 3 * m3, 3 * m2]]
    return a, [m2, m3, m4]


def _gauss_solve(a, b):
    """Solve a small dense system by elimination with partial pivoting."""
    n = len(a)
    aug = [list(map(float, row)) + [float(v)] for row, v in zip(a, b)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(aug[r][col]))
        if aug[piv][col] == 0.0:
            raise SingularSystem("zero pivot in moment system")
        aug[col], aug[piv] = aug[piv], aug[col]
        for r in range(col + 1, n):
            f = aug[r][col] / aug[col][col]
            for c in range(col, n + 1):
                aug[r][c] -= f * aug[col][c]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        s = aug[r][n] - sum(aug[r][c] * x[c] for c in range(r + 1, n))
        x[r] = s / aug[r][r]
    return x


def _cond1(a):
    n = len(a)
    norm = max(sum(abs(a[r][c]) for r in range(n)) for c in range(n))
    cols = [_gauss_solve(a, [1.0 if i == j else 0.0 for i in range(n)]) for j in range(n)]
    inv_norm = max(sum(abs(v) for v in col) for col in cols)
    return norm * inv_norm


def solve_moment_system(ms: MomentSet, case) -> QParams:
    """Solve the moment equations directly.

    Independent cross-check of :func:`estimate_continuous` and
    :func:`estimate_discrete`; not used on the hot path.

    Raises
    ------
    ThetaDegenerate
        If theta is below the degeneracy threshold.
    SingularSystem
        If the 1-norm condition number exceeds 1e12.
    """
    case = Case.parse(case)
    _moments(ms)
    a, b = moment_system(ms, case)
    cond = _cond1(a)
    if not cond <= 1e12:
        raise SingularSystem(f"moment system condition estimate {cond:.3g} exceeds 1e12")
    delta, beta, gamma = _gauss_solve(a, b)
    return QParams(ms.mean, delta, beta, gamma, case)
