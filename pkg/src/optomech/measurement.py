"""Pulsed measurement operators, outcome statistics, and conditional states.

Two measurement operators appear, both diagonal in the mechanical position
quadrature:

* the effective square-displacement operator realized by amplitude-quadrature
  homodyning of a pulse under *linear* coupling,

      U(x; q) = pi^(-1/4) exp(i w x) exp(-(q - chi x^2)^2 / 2),

  with measurement strength chi, momentum kick w and offset outcome q
  (positive q selects |x| near sqrt(q/chi)); and

* its dispersive counterpart from phase-quadrature readout under a direct
  quadratic interaction, which carries the opposite outcome sign
  (large *negative* outcomes select large |x|).

Because both are functions of position only, they act on a grid density
matrix by elementwise row/column scaling.  Windowed conditioning integrates
the Gaussian outcome factor over the window in closed form (an error-function
difference); slow quadrature versions of the windowed and unconditional maps
are kept alongside as independent oracles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import ConditioningError, DomainError, RangeError
from .states import DensityMatrixGrid, QuadratureGrid

__all__ = [
    "LinearPulseMeasurement",
    "DispersiveMeasurement",
    "OutcomeWindow",
    "OutcomeDistribution",
    "linear_kraus_diagonal",
    "dispersive_kraus_diagonal",
    "outcome_kernel",
    "outcome_pdf",
    "condition_exact",
    "condition_window",
    "condition_window_quadrature",
    "uncondition",
    "uncondition_quadrature",
    "sample_outcome",
    "record_to_json",
    "pdf_to_csv",
]

DEFAULT_N_OUTCOMES = 2048
# conditioning below this probability is numerically meaningless
MIN_EVENT_PROBABILITY = 1e-12


@dataclass(frozen=True)
class LinearPulseMeasurement:
    """One amplitude-quadrature pulse: strength chi, kick omega_kick, outcome.

    The outcome is stored already offset (reference level minus raw homodyne
    result), so positive values select positions |x| ~ sqrt(outcome / chi).
    efficiency is a reserved hook for non-ideal homodyne detection; only the
    ideal value 1 is modeled.
    """

    chi: float
    omega_kick: float = 0.0
    outcome: float = 0.0
    efficiency: float = 1.0

    def __post_init__(self):
        if self.chi <= 0:
            raise DomainError(f"chi must be positive, got {self.chi!r}")
        if not 0.0 < self.efficiency <= 1.0:
            raise DomainError("efficiency must lie in (0, 1]")
        if self.efficiency != 1.0:
            raise NotImplementedError(
                "non-ideal homodyne efficiency is reserved, not modeled")


@dataclass(frozen=True)
class DispersiveMeasurement:
    """One phase-quadrature pulse in the dispersive scheme.

    x_in is the incoming mean position entering the kick phase.
    """

    chi_sq: float
    omega_sq: float = 0.0
    outcome: float = 0.0
    x_in: float = 0.0

    def __post_init__(self):
        if self.chi_sq <= 0:
            raise DomainError(f"chi_sq must be positive, got {self.chi_sq!r}")


@dataclass(frozen=True)
class OutcomeWindow:
    """Post-selection window: outcomes in center +/- width/2 are accepted."""

    center: float
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise DomainError(f"width must be positive, got {self.width!r}")

    @property
    def lo(self) -> float:
        return self.center - 0.5 * self.width

    @property
    def hi(self) -> float:
        return self.center + 0.5 * self.width


def linear_kraus_diagonal(grid: QuadratureGrid,
                          meas: LinearPulseMeasurement) -> np.ndarray:
    """Position representation of the linear-scheme measurement operator."""
    xs = grid.xs
    return (np.pi ** (-0.25)
            * np.exp(1j * meas.omega_kick * xs)
            * np.exp(-0.5 * (meas.outcome - meas.chi * xs**2) ** 2))


def dispersive_kraus_diagonal(grid: QuadratureGrid,
                              meas: DispersiveMeasurement) -> np.ndarray:
    """Position representation of the dispersive measurement operator.

    Note the signs: the Gaussian argument is (outcome + chi_sq x^2), so large
    negative outcomes play the role positive ones do in the linear scheme,
    and the kick phase is exp(-i omega_sq x_in x).
    """
    xs = grid.xs
    return (np.pi ** (-0.25)
            * np.exp(-1j * meas.omega_sq * meas.x_in * xs)
            * np.exp(-0.5 * (meas.outcome + meas.chi_sq * xs**2) ** 2))


# ---------------------------------------------------------------------------
# outcome statistics
# ---------------------------------------------------------------------------

def outcome_kernel(q_axis: np.ndarray, xs: np.ndarray, chi: float) -> np.ndarray:
    """Matrix K[k, i] = pi^(-1/2) exp(-(q_k - chi x_i^2)^2).

    P(q_k) = sum_i K[k, i] rho(x_i, x_i) dx; precompute it when many pdfs
    are needed for the same grid (Monte-Carlo loops).
    """
    return np.exp(-(q_axis[:, None] - chi * xs[None, :] ** 2) ** 2) / np.sqrt(np.pi)


class OutcomeDistribution:
    """Sampled outcome density P(q) with deterministic inverse-CDF sampling."""

    def __init__(self, q_axis: np.ndarray, pdf: np.ndarray):
        self.q_axis = q_axis
        self.pdf = pdf
        self.dq = float(q_axis[1] - q_axis[0])
        # trapezoid cumulative (starting at 0) keeps inverse-CDF sampling
        # free of the half-bin bias a plain running sum would introduce
        cdf = np.concatenate([[0.0],
                              np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * self.dq)])
        self._mass = float(cdf[-1])
        self._cdf = cdf / self._mass

    @property
    def mass(self) -> float:
        """Raw integral of the sampled pdf (1 up to grid clipping)."""
        return self._mass

    def mean(self) -> float:
        return float(np.sum(self.q_axis * self.pdf) * self.dq / self._mass)

    def central_moment(self, k: int) -> float:
        mu = self.mean()
        return float(np.sum((self.q_axis - mu) ** k * self.pdf)
                     * self.dq / self._mass)

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        """Inverse-CDF draw; identical sequences for identical generators."""
        u = rng.uniform(size=size)
        return np.interp(u, self._cdf, self.q_axis)


def outcome_pdf(state: DensityMatrixGrid, chi: float,
                n_outcomes: int = DEFAULT_N_OUTCOMES,
                q_range=None, clip_tol: float = 1e-4) -> OutcomeDistribution:
    """Homodyne outcome density P(q) = integral dx rho(x,x) |U(x; q)|^2.

    The density is independent of the kick (the phase cancels in U^dag U).
    Default outcome range [-6, chi x_max^2 + 6] covers shot noise plus the
    full deterministic range of chi x^2 on the grid; raises RangeError when
    a custom range clips more than clip_tol of the probability mass.
    """
    if chi < 0:
        raise DomainError("chi must be non-negative")
    xs = state.grid.xs
    if q_range is None:
        q_range = (-6.0, chi * state.grid.x_max**2 + 6.0)
    q_axis = np.linspace(q_range[0], q_range[1], n_outcomes)
    pdf = outcome_kernel(q_axis, xs, chi) @ state.diagonal() * state.grid.dx
    dist = OutcomeDistribution(q_axis, pdf)
    if dist.mass < 1.0 - clip_tol:
        raise RangeError(f"outcome range {q_range} clips "
                         f"{1.0 - dist.mass:.2e} of the probability mass")
    return dist


def sample_outcome(state: DensityMatrixGrid, chi: float,
                   rng: np.random.Generator, size=None):
    """Draw outcome(s) distributed per outcome_pdf; fixed seed, fixed draws."""
    return outcome_pdf(state, chi).sample(rng, size=size)


# ---------------------------------------------------------------------------
# conditional and unconditional maps
# ---------------------------------------------------------------------------

def condition_exact(state: DensityMatrixGrid,
                    meas: LinearPulseMeasurement) -> DensityMatrixGrid:
    """Post-measurement state for one recorded outcome: U rho U^dag / P."""
    u = linear_kraus_diagonal(state.grid, meas)
    raw = u[:, None] * state.rho * np.conj(u)[None, :]
    prob = float(np.real(np.trace(raw)) * state.grid.dx)
    if prob <= MIN_EVENT_PROBABILITY:
        raise ConditioningError(
            f"outcome {meas.outcome} has negligible probability {prob:.3e}")
    return DensityMatrixGrid(state.grid, raw / prob)


def condition_dispersive(state: DensityMatrixGrid,
                         meas: DispersiveMeasurement) -> DensityMatrixGrid:
    """Same update for the dispersive operator."""
    u = dispersive_kraus_diagonal(state.grid, meas)
    raw = u[:, None] * state.rho * np.conj(u)[None, :]
    prob = float(np.real(np.trace(raw)) * state.grid.dx)
    if prob <= MIN_EVENT_PROBABILITY:
        raise ConditioningError(
            f"outcome {meas.outcome} has negligible probability {prob:.3e}")
    return DensityMatrixGrid(state.grid, raw / prob)


def _window_kernel(xs: np.ndarray, chi: float, window: OutcomeWindow):
    """Closed-form integral of U(q) (x) U^*(q) over the outcome window.

    Writing m = chi (x^2 + x'^2)/2 and d = chi (x^2 - x'^2)/2, the product of
    the two outcome Gaussians is exp(-(q - m)^2 - d^2), so the q integral is
    an erf difference times the coherence-damping factor exp(-d^2).
    """
    sq = chi * xs**2
    m = 0.5 * (sq[:, None] + sq[None, :])
    d = 0.5 * (sq[:, None] - sq[None, :])
    return 0.5 * np.exp(-d * d) * (erf(window.hi - m) - erf(window.lo - m))


def condition_window(state: DensityMatrixGrid, chi: float, omega_kick: float,
                     window: OutcomeWindow):
    """Windowed post-selected state and its acceptance probability.

    Returns (rho_w, P_w) where rho_w is the normalized mixture of conditional
    states over outcomes in the window and P_w the window probability.
    chi = 0 degenerates to pure kinematics (kick phase only).
    """
    if chi < 0:
        raise DomainError("chi must be non-negative")
    xs = state.grid.xs
    kern = _window_kernel(xs, chi, window)
    phase = np.exp(1j * omega_kick * xs)
    raw = state.rho * kern * (phase[:, None] * np.conj(phase)[None, :])
    prob = float(np.real(np.trace(raw)) * state.grid.dx)
    if prob <= MIN_EVENT_PROBABILITY:
        raise ConditioningError(
            f"window {window} has negligible probability {prob:.3e}")
    return DensityMatrixGrid(state.grid, raw / prob), prob


def _simpson_weights(a: float, b: float, n: int) -> np.ndarray:
    if n < 3 or n % 2 == 0:
        raise DomainError("Simpson rule needs an odd number of points >= 3")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (b - a) / (n - 1) / 3.0


def condition_window_quadrature(state: DensityMatrixGrid, chi: float,
                                omega_kick: float, window: OutcomeWindow,
                                n_q: int = 201):
    """Quadrature oracle for condition_window: explicit Simpson sum over q.

    Deliberately built from the Kraus vectors themselves rather than the
    closed-form kernel, so the two paths are independent.
    """
    q_nodes = np.linspace(window.lo, window.hi, n_q)
    w = _simpson_weights(window.lo, window.hi, n_q)
    vecs = np.stack([
        linear_kraus_diagonal(state.grid,
                              LinearPulseMeasurement(chi, omega_kick, q))
        for q in q_nodes])
    b = vecs * np.sqrt(w)[:, None]
    kern = b.T @ b.conj()
    raw = state.rho * kern
    prob = float(np.real(np.trace(raw)) * state.grid.dx)
    if prob <= MIN_EVENT_PROBABILITY:
        raise ConditioningError(
            f"window {window} has negligible probability {prob:.3e}")
    return DensityMatrixGrid(state.grid, raw / prob), prob


def uncondition(state: DensityMatrixGrid, chi: float,
                omega_kick: float) -> DensityMatrixGrid:
    """Outcome-averaged (ignored-measurement) state, in closed form.

    rho_out(x, x') = rho(x, x') e^{i w (x - x')} exp(-chi^2 (x^2 - x'^2)^2 / 4);
    the diagonal is untouched, so the trace is preserved exactly.
    """
    if chi < 0:
        raise DomainError("chi must be non-negative")
    xs = state.grid.xs
    sq = chi * xs**2
    d = 0.5 * (sq[:, None] - sq[None, :])
    phase = np.exp(1j * omega_kick * xs)
    rho = state.rho * np.exp(-d * d) * (phase[:, None] * np.conj(phase)[None, :])
    return DensityMatrixGrid(state.grid, rho)


def uncondition_quadrature(state: DensityMatrixGrid, chi: float,
                           omega_kick: float, n_q: int = 16001,
                           pad: float = 8.5,
                           chunk: int = 512) -> DensityMatrixGrid:
    """Quadrature oracle for uncondition: Simpson over the full outcome line.

    The outcome range [-pad, chi x_max^2 + pad] leaves sub-1e-12 Gaussian
    tails; n_q = 16001 puts the composite-Simpson error safely below 1e-9.
    """
    grid = state.grid
    lo, hi = -pad, chi * grid.x_max**2 + pad
    q_nodes = np.linspace(lo, hi, n_q)
    w = _simpson_weights(lo, hi, n_q)
    kern = np.zeros((grid.n_points, grid.n_points), dtype=np.complex128)
    for start in range(0, n_q, chunk):
        qs = q_nodes[start:start + chunk]
        vecs = np.stack([
            linear_kraus_diagonal(grid, LinearPulseMeasurement(chi, omega_kick, q))
            for q in qs])
        b = vecs * np.sqrt(w[start:start + chunk])[:, None]
        kern += b.T @ b.conj()
    return DensityMatrixGrid(grid, state.rho * kern)


# ---------------------------------------------------------------------------
# external interface
# ---------------------------------------------------------------------------

def record_to_json(meas: LinearPulseMeasurement,
                   window: OutcomeWindow | None = None) -> str:
    rec = {"chi": meas.chi, "omega": meas.omega_kick, "outcome": meas.outcome,
           "window": None if window is None else
           {"center": window.center, "width": window.width}}
    return json.dumps(rec)


def record_from_json(text: str):
    rec = json.loads(text)
    meas = LinearPulseMeasurement(rec["chi"], rec["omega"], rec["outcome"])
    window = (OutcomeWindow(rec["window"]["center"], rec["window"]["width"])
              if rec.get("window") else None)
    return meas, window


def pdf_to_csv(dist: OutcomeDistribution, path) -> None:
    """Two-column CSV (q, P) of a sampled outcome density."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("q,P\n")
        for q, p in zip(dist.q_axis, dist.pdf):
            fh.write(f"{q:.12g},{p:.12g}\n")
