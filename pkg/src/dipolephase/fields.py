"""Field configurations and the antisymmetric tensors F_{mu nu}, K_{mu nu}.

Both tensors are stored with lower indices as real ``(4, 4)`` arrays, index 0
being time. Spatial orientation uses ``eps_{123} = +1`` in a right-handed
Cartesian frame.
"""

from dataclasses import dataclass
import math
from typing import Callable

import numpy as np

from .spinor import LEVI_CIVITA


class FieldDomainError(ValueError):
    """Field evaluated where the configuration is singular or undefined."""


@dataclass(frozen=True)
class DipoleParams:
    """Particle parameters in natural units (hbar = c = 1).

    ``alpha_pol`` is the electric polarizability, ``chi`` the magnetic
    susceptibility and ``mu`` the permanent magnetic dipole moment.
    """

    m: float = 0.0
    alpha_pol: float = 0.0
    chi: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        for name in ("m", "alpha_pol", "chi", "mu"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.m < 0:
            raise ValueError(f"mass must be non-negative, got {self.m!r}")


@dataclass(frozen=True)
class Wei:
    """Line charge along z plus uniform axial field: E = (lam/r) r_hat, B = B0 z_hat."""

    lam: float
    b0: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and math.isfinite(self.b0)):
            raise ValueError("Wei parameters must be finite")
        if self.b0 < 0:
            raise ValueError(f"B0 must be non-negative, got {self.b0!r}")


@dataclass(frozen=True)
class Uniform:
    e: tuple = (0.0, 0.0, 0.0)
    b: tuple = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Custom:
    """Arbitrary static fields; ``evaluator(r, phi, z)`` returns Cartesian (E, B)."""

    evaluator: Callable


def eval_fields(config, point):
    """Cartesian ``(E, B)`` at a cylindrical point ``(r, phi, z)``."""
    r, phi, z = point
    if isinstance(config, Wei):
        if not r > 0:
            raise FieldDomainError(
                f"Wei field is singular on the line charge (r={r!r}); need r > 0"
            )
        e = (config.lam / r) * np.array([math.cos(phi), math.sin(phi), 0.0])
        b = np.array([0.0, 0.0, config.b0])
        return e, b
    if isinstance(config, Uniform):
        return np.asarray(config.e, dtype=float), np.asarray(config.b, dtype=float)
    if isinstance(config, Custom):
        e, b = config.evaluator(r, phi, z)
        return np.asarray(e, dtype=float), np.asarray(b, dtype=float)
    raise TypeError(f"unknown field configuration {config!r}")


def to_local_frame(vector, phi):
    """Cartesian components -> (r_hat, phi_hat, z_hat) components at angle phi."""
    c, s = math.cos(phi), math.sin(phi)
    x, y, z = vector
    return np.array([c * x + s * y, -s * x + c * y, z])


def lambda_from_volume_charge(rho, r0):
    """Line-charge constant of a uniformly charged cylinder, rho R0^2 / 2."""
    if r0 < 0:
        raise ValueError(f"cylinder radius must be non-negative, got {r0!r}")
    return rho * r0**2 / 2.0


def field_tensor(e, b):
    """F with F_{0i} = -E_i and F_{ij} = eps_{ijk} B^k."""
    e = np.asarray(e, dtype=float)
    b = np.asarray(b, dtype=float)
    f = np.zeros((4, 4))
    f[0, 1:] = -e
    f[1:, 0] = e
    f[1:, 1:] = np.einsum("ijk,k->ij", LEVI_CIVITA, b)
    return f


def moment_tensor(e, b, params):
    """K with K_{0i} = -alpha E_i and K_{ij} = -chi eps_{ijk} B^k.

    Built component by component; :func:`field_tensor` applied to
    ``(alpha E, -chi B)`` must give the same array.
    """
    e = np.asarray(e, dtype=float)
    b = np.asarray(b, dtype=float)
    k = np.zeros((4, 4))
    for i in range(3):
        k[0, i + 1] = -params.alpha_pol * e[i]
        k[i + 1, 0] = params.alpha_pol * e[i]
        for j in range(3):
            k[i + 1, j + 1] = -params.chi * sum(
                LEVI_CIVITA[i, j, n] * b[n] for n in range(3)
            )
    return k
