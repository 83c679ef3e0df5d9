"""Dirac-representation gamma matrices and small 4x4 matrix utilities.

All matrix-valued quantities in the package are plain ``(4, 4)`` complex
numpy arrays. Tolerance checks use the max-abs entrywise norm.
"""

from dataclasses import dataclass, field
import math

import numpy as np

#: Minkowski metric with signature (-, +, +, +).
METRIC = (-1.0, 1.0, 1.0, 1.0)

IDENTITY = np.eye(4, dtype=complex)

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# Levi-Civita symbol on spatial indices 0..2, eps[0, 1, 2] = +1.
LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_j, _i, _k] = -1.0


def maxabs(m):
    """Max-abs entrywise norm."""
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def is_hermitian(m, tol=1e-12):
    return maxabs(m - m.conj().T) <= tol


def is_antihermitian(m, tol=1e-12):
    return maxabs(m + m.conj().T) <= tol


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GammaBasis:
    """Fixed Dirac-representation matrices.

    ``gamma[mu]`` are the contravariant gamma matrices, ``beta`` is
    ``gamma[0]``, ``alpha[i] = beta @ gamma[i+1]`` and ``sigma[i]`` is the
    block-diagonal spin matrix. Spatial tuples are zero-indexed, so
    ``alpha[0]`` is alpha^1.
    """

    gamma: tuple
    beta: np.ndarray
    alpha: tuple
    sigma: tuple
    metric: tuple = field(default=METRIC)

    @property
    def gamma0(self):
        return self.gamma[0]

    @property
    def alpha1(self):
        return self.alpha[0]

    @property
    def alpha2(self):
        return self.alpha[1]

    @property
    def alpha3(self):
        return self.alpha[2]

    @property
    def sigma3(self):
        return self.sigma[2]

    @property
    def beta_sigma3(self):
        return self.beta @ self.sigma[2]


def build_gamma_basis():
    """Return the Dirac-representation basis.

    Every entry is one of 0, +-1, +-i, so the matrices are exact in floating
    point.
    """
    zero = np.zeros((2, 2), dtype=complex)
    one = np.eye(2, dtype=complex)
    beta = np.block([[one, zero], [zero, -one]])
    gammas = [beta] + [np.block([[zero, s], [-s, zero]]) for s in PAULI]
    alphas = [beta @ g for g in gammas[1:]]
    sigmas = [np.block([[s, zero], [zero, s]]) for s in PAULI]
    return GammaBasis(
        gamma=tuple(_frozen(g) for g in gammas),
        beta=_frozen(beta),
        alpha=tuple(_frozen(a) for a in alphas),
        sigma=tuple(_frozen(s) for s in sigmas),
    )


def commutator(a, b):
    return a @ b - b @ a


def anticommutator(a, b):
    return a @ b + b @ a


def clifford_sign(basis):
    """Sign ``s`` with ``{gamma^mu, gamma^nu} = s * 2 * eta^{mu nu} * I``.

    Read off from the ``(0, 0)`` anticommutator and not assumed. For the
    Dirac representation with a (-, +, +, +) metric this is ``-1``.
    """
    g0 = basis.gamma[0]
    value = anticommutator(g0, g0)[0, 0].real / (2.0 * basis.metric[0])
    return int(round(value))


def sigma_tensor(basis, b, n):
    """Spin tensor ``(i/2) [gamma^b, gamma^n]``."""
    if not (0 <= b <= 3 and 0 <= n <= 3):
        raise IndexError(f"spacetime indices must be in 0..3, got ({b}, {n})")
    return 0.5j * commutator(basis.gamma[b], basis.gamma[n])


def exp_i(theta, m):
    """Matrix exponential ``exp(i * theta * m)`` for a 4x4 matrix.

    Scaling and squaring around a Taylor series summed until the terms drop
    below machine precision relative to the partial sum.
    """
    m = np.asarray(m, dtype=complex)
    if not math.isfinite(theta) or not np.all(np.isfinite(m)):
        raise ValueError("exp_i requires finite theta and matrix entries")
    a = 1j * theta * m
    norm = float(np.max(np.sum(np.abs(a), axis=1)))
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    a = a / (2.0**squarings)

    result = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    eps = np.finfo(float).eps
    for k in range(1, 40):
        term = term @ a / k
        result = result + term
        if maxabs(term) <= eps * maxabs(result):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def commuting_basis(basis):
    """The four mutually commuting involutions used to read off phases."""
    return (IDENTITY, basis.beta, basis.sigma[2], basis.beta @ basis.sigma[2])


def decompose_on_commuting_basis(m, basis=None):
    """Project ``m`` onto ``{I, beta, Sigma^3, beta Sigma^3}``.

    Returns ``(c_I, c_beta, c_sigma3, c_betasigma3, remainder_norm)``. Each
    coefficient is ``Tr(m X) / 4``; since each element squares to the identity
    and the four are trace-orthogonal, the projection is exact on their real
    span and anything outside it shows up in ``remainder_norm``. Coefficients
    are returned as real numbers when their imaginary part is at rounding
    level, otherwise as complex.
    """
    if basis is None:
        basis = build_gamma_basis()
    m = np.asarray(m, dtype=complex)
    elements = commuting_basis(basis)
    coefficients = []
    for x in elements:
        c = np.trace(m @ x) / 4.0
        coefficients.append(float(c.real) if abs(c.imag) <= 1e-14 * max(1.0, abs(c)) else complex(c))
    projected = sum(c * x for c, x in zip(coefficients, elements))
    remainder = maxabs(m - projected)
    return (*coefficients, remainder)


def principal_eigenphases(u):
    """Sorted eigenphases of a unitary, principal values in (-pi, pi]."""
    phases = np.angle(np.linalg.eigvals(u))
    phases = np.where(phases <= -np.pi, phases + 2 * np.pi, phases)
    return np.sort(phases)
