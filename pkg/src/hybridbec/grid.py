"""Uniform radial grid and spherically symmetric one-body operators.

Fields are isotropic, so everything lives on r_i = i*h, i = 1..n, with
h = r_max/n (last node on r_max).  Reduced functions chi(r) = r*phi(r)
satisfy chi(0) = 0 exactly for regular phi; the outer Dirichlet wall
sits one spacing past the last node, an O(exp) truncation for trapped
states that decay well before r_max.

Quadrature: sum_i 4*pi*r_i^2*h * f(r_i) approximates the volume
integral of an isotropic f.  The kinetic operator acts on chi through
the standard 3-point Laplacian, second-order accurate in h.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConfigError


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Radial mesh r_i = i*h (endpoints excluded) plus volume weights."""

    r_max: float
    n_points: int
    h: float = field(init=False)
    r: np.ndarray = field(init=False)
    w: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.r_max <= 0:
            raise ConfigError(f"r_max must be positive, got {self.r_max}")
        if self.n_points < 16:
            raise ConfigError(f"n_points must be >= 16, got {self.n_points}")
        h = self.r_max / self.n_points
        r = h * np.arange(1, self.n_points + 1, dtype=float)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "w", 4.0 * np.pi * r**2 * h)

    def integrate(self, values: np.ndarray) -> float:
        """Volume integral of an isotropic field sampled on the grid."""
        return float(np.dot(self.w, values))

    def norm(self, phi: np.ndarray) -> float:
        """Particle number integral(|phi|^2 d^3r)."""
        return self.integrate(np.abs(phi) ** 2)

    def rms_width(self, phi: np.ndarray) -> float:
        """sqrt(<r^2>) of |phi|^2; collapse indicator when ~ few h."""
        n = self.norm(phi)
        if n <= 0.0:
            return 0.0
        return float(np.sqrt(self.integrate(self.r**2 * np.abs(phi) ** 2) / n))


def build_grid(r_max: float = 8.0, n_points: int = 400) -> RadialGrid:
    return RadialGrid(r_max=r_max, n_points=n_points)


def harmonic_potential(grid: RadialGrid, mass: float, omega: float) -> np.ndarray:
    """V(r) = (1/2) * mass * omega^2 * r^2 on the grid."""
    return 0.5 * mass * omega**2 * grid.r**2


@dataclass(frozen=True, eq=False)
class RadialOperator:
    """Tridiagonal operator -(hbar^2/2m) d^2/dr^2 + diag acting on chi = r*phi.

    For angular momentum l the centrifugal term l(l+1)*hbar^2/(2m r^2)
    is folded into `diag` by the caller.  Symmetric, so eigensolves use
    the dedicated tridiagonal routine.
    """

    diag: np.ndarray
    offdiag: float

    @classmethod
    def build(
        cls,
        grid: RadialGrid,
        mass: float,
        potential: np.ndarray,
        hbar: float = 1.0,
        l: int = 0,
    ) -> "RadialOperator":
        k = hbar**2 / (2.0 * mass * grid.h**2)
        diag = 2.0 * k + np.asarray(potential, dtype=float)
        if l > 0:
            diag = diag + l * (l + 1) * hbar**2 / (2.0 * mass * grid.r**2)
        return cls(diag=diag, offdiag=-k)

    def apply(self, chi: np.ndarray) -> np.ndarray:
        out = self.diag * chi
        out[:-1] += self.offdiag * chi[1:]
        out[1:] += self.offdiag * chi[:-1]
        return out

    def eigensolve(self, n_modes: int) -> tuple[np.ndarray, np.ndarray]:
        """Lowest eigenpairs; columns of the second return are chi vectors
        normalized to sum(chi^2) = 1 with chi[0] >= 0."""
        n = len(self.diag)
        n_modes = min(n_modes, n)
        off = np.full(n - 1, self.offdiag)
        vals, vecs = scipy.linalg.eigh_tridiagonal(
            self.diag, off, select="i", select_range=(0, n_modes - 1)
        )
        signs = np.where(vecs[0] < 0.0, -1.0, 1.0)
        return vals, vecs * signs


def solve_banded_shifted(
    op: RadialOperator, shift: float, rhs: np.ndarray
) -> np.ndarray:
    """Solve (op + shift*I) chi = rhs for the tridiagonal op."""
    n = len(op.diag)
    ab = np.zeros((3, n))
    ab[0, 1:] = op.offdiag
    ab[1] = op.diag + shift
    ab[2, :-1] = op.offdiag
    return scipy.linalg.solve_banded((1, 1), ab, rhs)
