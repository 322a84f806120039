"""Delta-method covariance of ``(mean, delta_hat, beta_hat, gamma_hat)``.

The estimator vector is ``phi(psi(Y) + (mu, 0, 0, 0))`` where ``Y`` holds the
first four raw moments of the centred data, ``psi`` maps raw to central
moments and ``phi`` maps ``(mean, m2, m3, m4)`` to ``(mean, delta, beta,
gamma)``.  All matrices are ordered ``(mu, delta, beta, gamma)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonpositiveVariance, SingularCovariance, ThetaDegenerate
from .moments import Case, MomentSet, theta_epsilon


@dataclass(frozen=True)
class CovModel:
    sigma: np.ndarray
    j_psi: np.ndarray
    j_phi: np.ndarray
    d: np.ndarray
    case: Case

    def standard_errors(self, n):
        """``sqrt(diag(d) / n)`` for ``(mean, delta, beta, gamma)``."""
        return np.sqrt(np.diag(self.d) / n)


def _moment_list(mu):
    """Normalise input to a list ``[1, 0, mu2, ..., mu8]``."""
    if isinstance(mu, MomentSet):
        vals = [mu[k] for k in range(2, 9)]
    else:
        vals = [float(v) for v in mu]
        if len(vals) != 7:
            raise ValueError(f"need the seven moments mu2..mu8, got {len(vals)}")
    return [1.0, 0.0] + vals


def sigma_matrix(mu) -> np.ndarray:
    """Covariance of the first four centred raw moments.

    Entry ``(i, j)`` (1-based) is ``mu_{i+j} - mu_i * mu_j`` with ``mu_1 = 0``.
    """
    m = _moment_list(mu)
    return np.array([[m[i + j] - m[i] * m[j] for j in range(1, 5)] for i in range(1, 5)])


def psi_map(x):
    """Raw moments of the centred data -> (mean offset, m2, m3, m4)."""
    x1, x2, x3, x4 = x
    return np.array([
        x1,
        x2 - x1 ** 2,
        x3 - 3 * x2 * x1 + 2 * x1 ** 3,
        x4 - 4 * x3 * x1 + 6 * x2 * x1 ** 2 - 3 * x1 ** 4,
    ])


def phi_map(x, case):
    """(mean, m2, m3, m4) -> (mean, delta, beta, gamma) for the given case."""
    x1, x2, x3, x4 = x
    c = 6 * (x4 * x2 - x3 ** 2 - x2 ** 3)
    if Case.parse(case) is Case.DISCRETE:
        return np.array([
            x1,
            (2 * x4 * x2 - 3 * x3 ** 2 - 6 * x2 ** 3 + x2 ** 2) / c,
            (x4 * x3 - 3 * x4 * x2 + 3 * x3 ** 2 + 3 * x3 * x2 ** 2 - x3 * x2 + 3 * x2 ** 3) / c,
            (4 * x4 * x2 ** 2 - 3 * x3 ** 2 * x2 - x2 ** 3) / c,
        ])
    return np.array([
        x1,
        (2 * x4 * x2 - 3 * x3 ** 2 - 6 * x2 ** 3) / c,
        (x4 * x3 + 3 * x3 * x2 ** 2) / c,
        (4 * x4 * x2 ** 2 - 3 * x3 ** 2 * x2) / c,
    ])


def _j_phi_scaled(m2, m3, m4, case):
    """Rows 2..4 of ``6*theta**2 * J_phi``; row 1 is (6 theta^2, 0, 0, 0)."""
    if case is Case.DISCRETE:
        return [
            [m4 * m3 ** 2 - 8 * m4 * m2 ** 3 + m4 * m2 ** 2 + 9 * m3 ** 2 * m2 ** 2
             - 2 * m3 ** 2 * m2 + m2 ** 4,
             -2 * m4 * m3 * m2 - 6 * m3 * m2 ** 3 + 2 * m3 * m2 ** 2,
             m3 ** 2 * m2 + 4 * m2 ** 4 - m2 ** 3],
            [-m4 ** 2 * m3 + 6 * m4 * m3 * m2 ** 2 - 6 * m3 ** 3 * m2 + m3 ** 3
             + 3 * m3 * m2 ** 4 - 2 * m3 * m2 ** 3,
             m4 ** 2 * m2 + m4 * m3 ** 2 + 2 * m4 * m2 ** 3 - m4 * m2 ** 2
             + 3 * m3 ** 2 * m2 ** 2 - m3 ** 2 * m2 - 3 * m2 ** 5 + m2 ** 4,
             -m3 ** 3 - 4 * m3 * m2 ** 3 + m3 * m2 ** 2],
            [4 * m4 ** 2 * m2 ** 2 - 8 * m4 * m3 ** 2 * m2 + 4 * m4 * m2 ** 4
             - 2 * m4 * m2 ** 3 + 3 * m3 ** 4 - 6 * m3 ** 2 * m2 ** 3 + 3 * m3 ** 2 * m2 ** 2,
             2 * m4 * m3 * m2 ** 2 + 6 * m3 * m2 ** 4 - 2 * m3 * m2 ** 3,
             -m3 ** 2 * m2 ** 2 - 4 * m2 ** 5 + m2 ** 4],
        ]
    return [
        [m4 * m3 ** 2 - 8 * m4 * m2 ** 3 + 9 * m3 ** 2 * m2 ** 2,
         -2 * m4 * m3 * m2 - 6 * m3 * m2 ** 3,
         m3 ** 2 * m2 + 4 * m2 ** 4],
        [-m4 ** 2 * m3 + 6 * m4 * m3 * m2 ** 2 - 6 * m3 ** 3 * m2 + 3 * m3 * m2 ** 4,
         m4 ** 2 * m2 + m4 * m3 ** 2 + 2 * m4 * m2 ** 3 + 3 * m3 ** 2 * m2 ** 2 - 3 * m2 ** 5,
         -m3 ** 3 - 4 * m3 * m2 ** 3],
        [4 * m4 ** 2 * m2 ** 2 - 8 * m4 * m3 ** 2 * m2 + 4 * m4 * m2 ** 4
         + 3 * m3 ** 4 - 6 * m3 ** 2 * m2 ** 3,
         2 * m4 * m3 * m2 ** 2 + 6 * m3 * m2 ** 4,
         -m3 ** 2 * m2 ** 2 - 4 * m2 ** 5],
    ]


def jacobians(theta_vec, case):
    """Analytic Jacobians ``(J_psi, J_phi)`` at ``theta_vec = (mu, m2, m3, m4)``.

    ``J_psi`` is evaluated at ``(0, m2, m3, m4)``.  In the discrete case the
    ``gamma`` row differentiates ``gamma = m2 * (1 - delta)``.
    """
    case = Case.parse(case)
    _, m2, m3, m4 = (float(v) for v in theta_vec)
    theta = m4 * m2 - m3 ** 2 - m2 ** 3
    if not theta > theta_epsilon(m2):
        raise ThetaDegenerate(None, theta)
    j_psi = np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-3 * m2, 0.0, 1.0, 0.0],
        [-4 * m3, 0.0, 0.0, 1.0],
    ])
    scale = 6 * theta ** 2
    j_phi = np.zeros((4, 4))
    j_phi[0, 0] = 1.0
    j_phi[1:, 1:] = np.array(_j_phi_scaled(m2, m3, m4, case)) / scale
    return j_psi, j_phi


def asymptotic_cov(ms: MomentSet, case) -> CovModel:
    """Asymptotic covariance ``D`` of ``sqrt(n) * (q_n - omega)``.

    ``ms`` must carry moments up to order 8 (population or sample).
    """
    case = Case.parse(case)
    sigma = sigma_matrix(ms)
    j_psi, j_phi = jacobians((ms.mean, ms[2], ms[3], ms[4]), case)
    c = j_phi @ j_psi
    d = c @ sigma @ c.T
    d = 0.5 * (d + d.T)
    return CovModel(sigma=sigma, j_psi=j_psi, j_phi=j_phi, d=d, case=case)


def poisson_tau_cov(ms: MomentSet) -> np.ndarray:
    """Composed covariance of ``(delta_hat, beta_hat, m2 - mean)``.

    Uses rows 2 and 3 of the discrete ``J_phi`` and ``(-1, 1, 0, 0)``.
    """
    sigma = sigma_matrix(ms)
    j_psi, j_phi = jacobians((ms.mean, ms[2], ms[3], ms[4]), Case.DISCRETE)
    j_tau = np.vstack([j_phi[1], j_phi[2], [-1.0, 1.0, 0.0, 0.0]])
    c = j_tau @ j_psi
    d = c @ sigma @ c.T
    return 0.5 * (d + d.T)


def null_cov_normality(s2) -> np.ndarray:
    """Null covariance of ``(delta_hat, beta_hat)`` under normality."""
    if not s2 > 0:
        raise NonpositiveVariance(f"s2 must be positive, got {s2!r}")
    return np.diag([2.0 / 3.0, 1.5 * s2])


def null_cov_normality_inv(s2) -> np.ndarray:
    if not s2 > 0:
        raise NonpositiveVariance(f"s2 must be positive, got {s2!r}")
    return np.diag([1.5, 2.0 / (3.0 * s2)])


def sigma0_delta(m2, m3):
    """Null variance of ``sqrt(n) * delta_hat`` when delta = 0.

    Holds for both the normal and the gamma-type members.
    """
    m2 = np.asarray(m2, dtype=float)
    m3 = np.asarray(m3, dtype=float)
    if np.any(~(m2 > 0)):
        raise NonpositiveVariance("m2 must be positive")
    m2c = m2 ** 3
    r = m3 * m3
    out = (2.0 / 3.0) * (1 + 13 * r / (4 * m2c) + 7 * r * r / (2 * m2c * (4 * m2c + r)))
    return out[()] if out.ndim == 0 else out


def sigma0_symmetry(m2, m4, m6):
    """Null variance ``m6 - 6 m4 m2 + 9 m2**3`` of ``sqrt(n) * m3``."""
    v = m6 - 6 * m4 * m2 + 9 * m2 ** 3
    if not v > 0:
        raise NonpositiveVariance(f"symmetry null variance {v!r} is not positive")
    return v


def _poisson_entries(lam, printed):
    lam = np.asarray(lam, dtype=float)
    s = 1.0 / (6 * lam)
    a = (4 * lam + 9) * s
    b = (5 * lam - 9) * s
    c = (9 * lam ** 2 - 2 * lam + (0.0 if printed else 9.0)) * s
    e = 12 * lam ** 2 * s
    f = 12 * lam ** 3 * s
    return a, b, c, e, f


def null_cov_poisson(lambda_hat, printed=False) -> np.ndarray:
    """Null covariance of ``(delta_hat, beta_hat, m2 - mean)`` for Poisson data.

    By default the (beta, beta) entry is ``(9 lam^2 - 2 lam + 9) / (6 lam)``,
    which is what the delta-method composition gives at Poisson moments.
    ``printed=True`` drops the constant 9, reproducing the matrix as it is
    usually quoted; that variant has determinant ``2 lam^3 - 2 lam - 9/2`` and is indefinite
    for ``lam`` below about 1.56.
    """
    if not lambda_hat > 0:
        raise NonpositiveVariance(f"lambda must be positive, got {lambda_hat!r}")
    a, b, c, e, f = (float(v) for v in _poisson_entries(lambda_hat, printed))
    return np.array([[a, b, 0.0], [b, c, e], [0.0, e, f]])


def inverse_3x3(m) -> np.ndarray:
    """Adjugate inverse with ``|det| < 1e-12 * ||m||_F**3`` singularity check."""
    m = np.asarray(m, dtype=float)
    adj = np.array([
        [m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1], m[0, 2] * m[2, 1] - m[0, 1] * m[2, 2],
         m[0, 1] * m[1, 2] - m[0, 2] * m[1, 1]],
        [m[1, 2] * m[2, 0] - m[1, 0] * m[2, 2], m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0],
         m[0, 2] * m[1, 0] - m[0, 0] * m[1, 2]],
        [m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0], m[0, 1] * m[2, 0] - m[0, 0] * m[2, 1],
         m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]],
    ])
    det = m[0, 0] * adj[0, 0] + m[0, 1] * adj[1, 0] + m[0, 2] * adj[2, 0]
    norm = np.sqrt((m * m).sum())
    if not abs(det) >= 1e-12 * norm ** 3:
        raise SingularCovariance(f"3x3 covariance is singular (det={det:.3g})")
    return adj / det


def poisson_quadratic_form(v, lam, printed=False):
    """Row-wise ``v' M(lam)^{-1} v`` for the Poisson null covariance.

    Parameters
    ----------
    v : ndarray, shape (..., 3)
    lam : ndarray, shape (...)

    Returns
    -------
    q : ndarray
        NaN where the matrix is singular or ``lam <= 0``.
    singular : ndarray of bool
    """
    v = np.asarray(v, dtype=float)
    lam = np.asarray(lam, dtype=float)
    pos = lam > 0
    lam_safe = np.where(pos, lam, 1.0)
    a, b, c, e, f = _poisson_entries(lam_safe, printed)
    # Adjugate of [[a, b, 0], [b, c, e], [0, e, f]].
    A00 = c * f - e * e
    A01 = -b * f
    A02 = b * e
    A11 = a * f
    A12 = -a * e
    A22 = a * c - b * b
    det = a * A00 + b * A01
    norm = np.sqrt(a * a + 2 * b * b + c * c + 2 * e * e + f * f)
    singular = ~pos | ~(np.abs(det) >= 1e-12 * norm ** 3)
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    num = (A00 * x * x + A11 * y * y + A22 * z * z
           + 2 * (A01 * x * y + A02 * x * z + A12 * y * z))
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(singular, np.nan, num / np.where(singular, 1.0, det))
    return q, singular
