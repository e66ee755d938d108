"""Mechanical quantum states on a position-quadrature grid and in Fock space.

The workhorse representation is the density matrix sampled on a uniform,
symmetric position grid, rho[i, j] = <x_i| rho |x_j>, with the plain Riemann
measure (trace = sum(diag) * dx).  Position-diagonal measurement operators
act on it by elementwise scaling, which is why this basis is preferred over
Fock space for everything except free harmonic evolution.

Quadrature convention: [X, P] = i, ground-state variance 1/2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GridError, NarrowGridWarning, TruncationError

__all__ = [
    "QuadratureGrid",
    "DensityMatrixGrid",
    "DensityMatrixFock",
    "GaussianSpec",
    "default_grid",
    "make_ground",
    "make_thermal",
    "make_squeezed",
    "make_gaussian",
    "grid_to_fock",
    "fock_to_grid",
    "moments",
    "momentum_diagonal",
    "purity",
    "validate_state",
    "validate_fock",
    "hermite_functions",
    "state_to_npz",
    "state_from_npz",
    "diagonal_to_csv",
]

DEFAULT_FOCK_DIM = 128


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform symmetric grid for the dimensionless position quadrature."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.x_min != -self.x_max or self.x_max <= 0:
            raise GridError("grid must be symmetric about 0 with x_max > 0")
        n = self.n_points
        if n < 4 or (n & (n - 1)) != 0:
            raise GridError(f"n_points must be a power of two >= 4, got {n}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


def default_grid() -> QuadratureGrid:
    """x in [-8, 8], 512 points; adequate for all unit-scale Gaussian inputs."""
    return QuadratureGrid(-8.0, 8.0, 512)


@dataclass
class DensityMatrixGrid:
    """Density matrix sampled on a position grid: rho[i, j] = <x_i|rho|x_j>."""

    grid: QuadratureGrid
    rho: np.ndarray

    def __post_init__(self):
        n = self.grid.n_points
        if self.rho.shape != (n, n):
            raise GridError(f"rho shape {self.rho.shape} does not match grid "
                            f"({n} points)")
        self.rho = np.ascontiguousarray(self.rho, dtype=np.complex128)

    def diagonal(self) -> np.ndarray:
        return np.real(np.diagonal(self.rho)).copy()

    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)) * self.grid.dx)

    def copy(self) -> "DensityMatrixGrid":
        return DensityMatrixGrid(self.grid, self.rho.copy())


@dataclass
class DensityMatrixFock:
    """Density matrix in the number basis, rho[n, m] with n, m < dim."""

    dim: int
    rho: np.ndarray

    def __post_init__(self):
        if self.rho.shape != (self.dim, self.dim):
            raise GridError(f"rho shape {self.rho.shape} does not match dim "
                            f"{self.dim}")
        self.rho = np.ascontiguousarray(self.rho, dtype=np.complex128)

    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    def tail_mass(self) -> float:
        """Population in the top two Fock levels (truncation diagnostic)."""
        return float(np.real(self.rho[-2, -2] + self.rho[-1, -1]))


@dataclass(frozen=True)
class GaussianSpec:
    """Recipe for a Gaussian mechanical state.

    kind is one of ground / thermal / momentum_squeezed / position_squeezed;
    nbar applies to thermal, r to the squeezed kinds.  Momentum squeezing
    means Var(P) = exp(-2r)/2 with the position spread anti-squeezed, so the
    measurement-outcome distribution broadens.
    """

    kind: str = "ground"
    nbar: float = 0.0
    r: float = 0.0
    mean_x: float = 0.0
    mean_p: float = 0.0

    _KINDS = ("ground", "thermal", "momentum_squeezed", "position_squeezed")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise DomainError(f"kind must be one of {self._KINDS}, got "
                              f"{self.kind!r}")
        if self.nbar < 0 or self.r < 0:
            raise DomainError("nbar and r must be non-negative")

    def variances(self):
        """(Var X, Var P) for this spec."""
        if self.kind == "ground":
            return 0.5, 0.5
        if self.kind == "thermal":
            v = 0.5 * (1.0 + 2.0 * self.nbar)
            return v, v
        if self.kind == "momentum_squeezed":
            return 0.5 * np.exp(2.0 * self.r), 0.5 * np.exp(-2.0 * self.r)
        return 0.5 * np.exp(-2.0 * self.r), 0.5 * np.exp(2.0 * self.r)


def make_gaussian(grid: QuadratureGrid, spec: GaussianSpec) -> DensityMatrixGrid:
    """Gaussian density matrix with uncorrelated X/P covariance.

    Kernel in sum/difference coordinates u = (x+x')/2, v = x - x':

        rho(x, x') = (2 pi Vx)^(-1/2) exp[-(u - <x>)^2 / (2 Vx)
                                          - Vp v^2 / 2 + i <p> v]

    which reproduces Var(X) = Vx, Var(P) = Vp and purity 1/(2 sqrt(Vx Vp)).
    The result is renormalized to unit grid trace.
    """
    var_x, var_p = spec.variances()
    sigma_x = np.sqrt(var_x)
    # warn when the analytic Gaussian tail clipped by the grid is significant
    clipped = math.erfc((grid.x_max - abs(spec.mean_x))
                        / (sigma_x * math.sqrt(2.0)))
    if clipped > 1e-6:
        warnings.warn(
            f"grid clips ~{clipped:.1e} of the position distribution; "
            "truncation error may dominate", NarrowGridWarning, stacklevel=2)
    xs = grid.xs
    u = 0.5 * (xs[:, None] + xs[None, :])
    v = xs[:, None] - xs[None, :]
    rho = np.exp(-((u - spec.mean_x) ** 2) / (2.0 * var_x)
                 - 0.5 * var_p * v**2
                 + 1j * spec.mean_p * v) / np.sqrt(2.0 * np.pi * var_x)
    rho /= np.real(np.trace(rho)) * grid.dx
    return DensityMatrixGrid(grid, rho)


def make_ground(grid: QuadratureGrid) -> DensityMatrixGrid:
    """Mechanical ground state: rho(x,x') = pi^(-1/2) exp(-(x^2+x'^2)/2)."""
    if grid.x_max < 5.0:
        warnings.warn(f"grid extends only to {grid.x_max}; ground-state "
                      "tails need x_max >= 5", NarrowGridWarning,
                      stacklevel=2)
    return make_gaussian(grid, GaussianSpec("ground"))


def make_thermal(grid: QuadratureGrid, nbar: float) -> DensityMatrixGrid:
    """Thermal state with occupation nbar: Var(X) = Var(P) = (1 + 2 nbar)/2."""
    if nbar < 0:
        raise DomainError("nbar must be non-negative")
    return make_gaussian(grid, GaussianSpec("thermal", nbar=nbar))


def make_squeezed(grid: QuadratureGrid, r: float,
                  kind: str = "momentum_squeezed") -> DensityMatrixGrid:
    """Squeezed vacuum with parameter r (see GaussianSpec for the convention)."""
    if kind not in ("momentum_squeezed", "position_squeezed"):
        raise DomainError(f"kind must be a squeezed kind, got {kind!r}")
    return make_gaussian(grid, GaussianSpec(kind, r=r))


# ---------------------------------------------------------------------------
# Fock basis
# ---------------------------------------------------------------------------

def hermite_functions(xs: np.ndarray, dim: int) -> np.ndarray:
    """Matrix phi[n, i] = <x_i|n> of harmonic-oscillator eigenfunctions.

    Stable two-term recurrence on the *normalized* functions:
    phi_n = sqrt(2/n) x phi_{n-1} - sqrt((n-1)/n) phi_{n-2}.
    """
    if dim < 1:
        raise DomainError("dim must be >= 1")
    phi = np.empty((dim, xs.size))
    phi[0] = np.pi ** (-0.25) * np.exp(-0.5 * xs**2)
    if dim > 1:
        phi[1] = np.sqrt(2.0) * xs * phi[0]
    for n in range(2, dim):
        phi[n] = (np.sqrt(2.0 / n) * xs * phi[n - 1]
                  - np.sqrt((n - 1) / n) * phi[n - 2])
    return phi


def grid_to_fock(state: DensityMatrixGrid, dim: int = DEFAULT_FOCK_DIM,
                 tail_tol: float = 1e-6) -> DensityMatrixFock:
    """Project onto the number basis: rho_nm = sum phi_n rho phi_m dx^2.

    Raises TruncationError when the top two Fock levels hold more than
    tail_tol population, i.e. dim is too small for this state.
    """
    phi = hermite_functions(state.grid.xs, dim)
    rho_f = (phi @ state.rho @ phi.T) * state.grid.dx**2
    out = DensityMatrixFock(dim, rho_f)
    tail = out.tail_mass()
    if not tail < tail_tol:
        raise TruncationError(
            f"Fock truncation too severe: top-two-level mass {tail:.3e} "
            f"(dim={dim})")
    return out


def fock_to_grid(state: DensityMatrixFock, grid: QuadratureGrid) -> DensityMatrixGrid:
    """Inverse of grid_to_fock: rho(x_i, x_j) = sum phi_n(x_i) rho_nm phi_m(x_j)."""
    phi = hermite_functions(grid.xs, state.dim)
    return DensityMatrixGrid(grid, phi.T @ state.rho @ phi)


# ---------------------------------------------------------------------------
# moments and diagnostics
# ---------------------------------------------------------------------------

def momentum_diagonal(state: DensityMatrixGrid):
    """Momentum-space probability density via FFT of the density matrix.

    Returns (p_axis, density) on the FFT momentum grid (2x zero-padded);
    sum(density) * dp = trace exactly, by DFT orthogonality.
    """
    n = state.grid.n_points
    dx = state.grid.dx
    m = 2 * n
    a = np.fft.fft(state.rho, n=m, axis=0)
    b = np.fft.ifft(a, n=m, axis=1) * m
    dens = np.real(np.diagonal(b)) * dx**2 / (2.0 * np.pi)
    dens = np.fft.fftshift(dens)
    p_axis = 2.0 * np.pi * (np.arange(m) - m // 2) / (m * dx)
    return p_axis, dens


def moments(state: DensityMatrixGrid):
    """(mean_x, mean_p, var_x, var_p) by grid quadrature.

    Position moments come from the diagonal; momentum moments from the
    Fourier-side diagonal.  Both use the plain Riemann measure.
    """
    xs = state.grid.xs
    dx = state.grid.dx
    diag = state.diagonal()
    norm = float(np.sum(diag) * dx)
    mean_x = float(np.sum(xs * diag) * dx / norm)
    var_x = float(np.sum((xs - mean_x) ** 2 * diag) * dx / norm)
    p_axis, p_dens = momentum_diagonal(state)
    dp = p_axis[1] - p_axis[0]
    p_norm = float(np.sum(p_dens) * dp)
    mean_p = float(np.sum(p_axis * p_dens) * dp / p_norm)
    var_p = float(np.sum((p_axis - mean_p) ** 2 * p_dens) * dp / p_norm)
    return mean_x, mean_p, var_x, var_p


def purity(state: DensityMatrixGrid) -> float:
    """Tr rho^2 under the grid measure: sum |rho_ij|^2 dx^2."""
    return float(np.sum(np.abs(state.rho) ** 2) * state.grid.dx**2)


def validate_state(state: DensityMatrixGrid, hermit_tol: float = 1e-10,
                   trace_tol: float = 1e-8, positivity_tol: float = 1e-8,
                   check_positivity: bool = True) -> None:
    """Assert the density-matrix invariants; raises DomainError on violation.

    Positivity means the smallest eigenvalue of the grid-measure operator
    rho * dx is above -positivity_tol (discretization can produce tiny
    negative eigenvalues).
    """
    rho = state.rho
    scale = float(np.max(np.abs(rho)))
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if not herm < hermit_tol * scale:
        raise DomainError(f"not Hermitian: max|rho - rho^dag| = {herm:.3e} "
                          f"vs scale {scale:.3e}")
    tr = state.trace()
    if not abs(tr - 1.0) < trace_tol:
        raise DomainError(f"trace {tr!r} deviates from 1 by {abs(tr - 1):.3e}")
    if check_positivity:
        eigs = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T) * state.grid.dx)
        if not eigs[0] >= -positivity_tol:
            raise DomainError(f"negative eigenvalue {eigs[0]:.3e}")


def validate_fock(state: DensityMatrixFock, hermit_tol: float = 1e-10,
                  trace_tol: float = 1e-8, positivity_tol: float = 1e-8,
                  tail_tol: float = 1e-6) -> None:
    """Fock-side invariants: Hermitian, unit trace, positive, small tail."""
    rho = state.rho
    scale = float(np.max(np.abs(rho)))
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if not herm < hermit_tol * scale:
        raise DomainError(f"not Hermitian: {herm:.3e} vs scale {scale:.3e}")
    if not abs(state.trace() - 1.0) < trace_tol:
        raise DomainError(f"trace deviates: {state.trace()!r}")
    eigs = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if not eigs[0] >= -positivity_tol:
        raise DomainError(f"negative eigenvalue {eigs[0]:.3e}")
    if not state.tail_mass() < tail_tol:
        raise TruncationError(f"truncation tail {state.tail_mass():.3e}")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def state_to_npz(state: DensityMatrixGrid, path) -> None:
    """Self-describing binary container: grid descriptor + complex matrix."""
    np.savez_compressed(
        path,
        x_min=state.grid.x_min, x_max=state.grid.x_max,
        n_points=state.grid.n_points,
        rho=state.rho.astype("<c16"))


def state_from_npz(path) -> DensityMatrixGrid:
    with np.load(path) as data:
        grid = QuadratureGrid(float(data["x_min"]), float(data["x_max"]),
                              int(data["n_points"]))
        return DensityMatrixGrid(grid, np.asarray(data["rho"]))


def diagonal_to_csv(state: DensityMatrixGrid, path) -> None:
    """Two-column CSV (x, rho(x,x)) for plotting."""
    xs = state.grid.xs
    diag = state.diagonal()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,density\n")
        for x, d in zip(xs, diag):
            fh.write(f"{x:.12g},{d:.12g}\n")


def grid_to_json(grid: QuadratureGrid) -> dict:
    return {"x_min": grid.x_min, "x_max": grid.x_max,
            "n_points": grid.n_points}


def grid_from_json(obj: dict) -> QuadratureGrid:
    if "x_max" not in obj or "n_points" not in obj:
        raise GridError("grid object needs x_max and n_points")
    x_max = float(obj["x_max"])
    return QuadratureGrid(float(obj.get("x_min", -x_max)), x_max,
                          int(obj["n_points"]))
