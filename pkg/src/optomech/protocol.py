"""Monte-Carlo experiment: prepare, post-select, and reconstruct.

One run of the preparation stage is: sample a homodyne outcome from the true
outcome density, condition the mechanical state on that exact outcome (the
window only gates acceptance), and optionally repeat after half a mechanical
period so the second pulse's momentum kick cancels the first.  The ensemble
of accepted runs converges to the windowed conditional state, which the
closed-form window map provides as a cross-check.

Free harmonic evolution is an ideal phase-space rotation
(X, P) -> (X cos t + P sin t, -X sin t + P cos t), applied as diagonal
phases in the Fock basis; mechanical bath coupling during the inter-pulse
interval is neglected (the rethermalization figure nbar/Q quantifies why,
and is surfaced in the summary when supplied).

Tomography measures the rotated position marginal through phase-quadrature
homodyning with strength chi_p: outcomes q = chi_p x + N(0, 1/2), i.e.
scaled samples carry a Gaussian blur of variance 1/(2 chi_p^2) which is
reported, not deconvolved.  Reconstruction is filtered back-projection with
a ramp filter rolled off by a cosine at the grid Nyquist.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .errors import ConditioningError, DomainError, GridError, \
    ReconstructionWarning
from .measurement import (LinearPulseMeasurement, OutcomeDistribution,
                          OutcomeWindow, condition_exact, condition_window,
                          outcome_kernel, outcome_pdf)
from .states import (DensityMatrixFock, DensityMatrixGrid, GaussianSpec,
                     QuadratureGrid, default_grid, fock_to_grid, grid_to_fock,
                     make_gaussian)
from .wigner import WignerGrid, negativity, wigner_transform

__all__ = [
    "ProtocolConfig",
    "RunRecord",
    "ProtocolSummary",
    "free_evolve",
    "free_evolve_grid",
    "momentum_kick",
    "rotate_half_period",
    "two_pulse_prepare",
    "run_protocol",
    "tomography",
    "records_to_jsonl",
    "summary_to_json",
]

DEFAULT_FOCK_DIM = 128


@dataclass(frozen=True)
class ProtocolConfig:
    """Inputs for one Monte-Carlo campaign."""

    initial: GaussianSpec
    chi: float
    window: OutcomeWindow
    n_runs: int
    seed: int
    omega_kick: float = 0.0
    two_pulse: bool = False
    tomography_angles: tuple = ()
    samples_per_angle: int = 0
    tomography_chi_p: float = 10.0
    fock_dim: int = DEFAULT_FOCK_DIM
    nbar_over_q: float | None = None

    def __post_init__(self):
        if self.n_runs < 1:
            raise DomainError("n_runs must be >= 1")
        if self.chi <= 0:
            raise DomainError("chi must be positive")
        angles = tuple(self.tomography_angles)
        if len(set(angles)) != len(angles):
            raise DomainError("tomography angles must be distinct")
        if any(not 0.0 <= a < math.pi for a in angles):
            raise DomainError("tomography angles must lie in [0, pi)")


@dataclass
class RunRecord:
    """Outcome(s) of one run; accepted iff every outcome fell in its window."""

    outcomes: list
    accepted: bool
    final_state_ref: str | None = None


@dataclass
class ProtocolSummary:
    n_runs: int
    n_accepted: int
    acceptance_rate: float
    acceptance_stderr: float
    closed_form_probability: float
    wigner_min: float | None
    wigner_negative_volume: float | None
    mean_state: DensityMatrixGrid | None
    records: list = field(repr=False, default_factory=list)
    nbar_over_q: float | None = None
    tomography_wigner: WignerGrid | None = field(repr=False, default=None)
    tomography_report: dict | None = None


# ---------------------------------------------------------------------------
# kinematics
# ---------------------------------------------------------------------------

def free_evolve(state: DensityMatrixFock, theta: float) -> DensityMatrixFock:
    """Ideal harmonic evolution by phase angle theta: rho_nm <- e^{-i theta (n-m)} rho_nm.

    Trace and purity are preserved exactly (diagonal phase map).  The
    rotation direction is (X, P) -> (X cos + P sin, -X sin + P cos): after a
    quarter period a momentum mean becomes a position mean.
    """
    phases = np.exp(-1j * theta * np.arange(state.dim))
    return DensityMatrixFock(state.dim,
                             state.rho * np.outer(phases, phases.conj()))


def free_evolve_grid(state: DensityMatrixGrid, theta: float,
                     dim: int = DEFAULT_FOCK_DIM) -> DensityMatrixGrid:
    """Grid-side free evolution via the Fock basis round trip."""
    return fock_to_grid(free_evolve(grid_to_fock(state, dim), theta),
                        state.grid)


def momentum_kick(state: DensityMatrixGrid, omega: float) -> DensityMatrixGrid:
    """Displace momentum by omega: rho <- e^{i omega (x - x')} rho.

    The position diagonal is untouched.  Kicks beyond the grid's momentum
    Nyquist pi/dx would alias and are rejected.
    """
    if abs(omega) > np.pi / state.grid.dx:
        raise GridError(f"kick {omega} exceeds the grid momentum Nyquist "
                        f"{np.pi / state.grid.dx:.2f}")
    phase = np.exp(1j * omega * state.grid.xs)
    return DensityMatrixGrid(state.grid,
                             state.rho * np.outer(phase, phase.conj()))


def rotate_half_period(state: DensityMatrixGrid) -> DensityMatrixGrid:
    """Half-period evolution is the parity flip rho(x,x') -> rho(-x,-x'),
    exact on the symmetric grid (no basis round trip needed)."""
    return DensityMatrixGrid(state.grid, state.rho[::-1, ::-1].copy())


# ---------------------------------------------------------------------------
# two-pulse preparation
# ---------------------------------------------------------------------------

def two_pulse_prepare(state: DensityMatrixGrid, chi: float, omega: float,
                      windows):
    """Windowed two-pulse sequence: pulse, half period, pulse.

    Both pulses kick by +omega; the parity flip in between telescopes the
    kicks away, so a zero-mean-momentum input leaves with zero mean momentum.
    `windows` is one OutcomeWindow (used for both pulses) or a pair.
    Returns (state, joint window probability, RunRecord).
    """
    if isinstance(windows, OutcomeWindow):
        windows = (windows, windows)
    w1, w2 = windows
    mid, p1 = condition_window(state, chi, omega, w1)
    mid = rotate_half_period(mid)
    out, p2 = condition_window(mid, chi, omega, w2)
    prob = p1 * p2
    record = RunRecord(outcomes=[w1.center, w2.center], accepted=True)
    return out, prob, record


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def run_protocol(config: ProtocolConfig, grid: QuadratureGrid | None = None,
                 threads: int = 1) -> ProtocolSummary:
    """Monte-Carlo the preparation stage and summarize the accepted ensemble.

    Per-run randomness comes from independent generators spawned from the
    master seed (numpy SeedSequence.spawn), so results are reproducible and
    independent of the number of worker threads: sampling is parallelizable,
    while the accepted-state average is accumulated sequentially in run
    order.  Zero acceptances produce an empty-ensemble summary, not an error.
    """
    if grid is None:
        grid = default_grid()
    state0 = make_gaussian(grid, config.initial)
    chi, omega, window = config.chi, config.omega_kick, config.window
    dist0 = outcome_pdf(state0, chi)
    diag0 = state0.diagonal()
    dx = grid.dx
    kernel = outcome_kernel(dist0.q_axis, grid.xs, chi) if config.two_pulse \
        else None

    master = np.random.SeedSequence(config.seed)
    streams = master.spawn(config.n_runs)

    def simulate(idx: int) -> RunRecord:
        rng = np.random.Generator(np.random.PCG64(streams[idx]))
        q1 = float(dist0.sample(rng))
        if not config.two_pulse:
            return RunRecord([q1], window.lo <= q1 <= window.hi)
        u1_sq = np.exp(-((q1 - chi * grid.xs**2) ** 2)) / math.sqrt(math.pi)
        diag1 = u1_sq * diag0
        diag1 = diag1[::-1] / (diag1.sum() * dx)  # parity flip of the diagonal
        pdf2 = kernel @ diag1 * dx
        q2 = float(OutcomeDistribution(dist0.q_axis, pdf2).sample(rng))
        accepted = (window.lo <= q1 <= window.hi
                    and window.lo <= q2 <= window.hi)
        return RunRecord([q1, q2], accepted)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(simulate, range(config.n_runs)))
    else:
        records = [simulate(i) for i in range(config.n_runs)]

    n_acc = sum(r.accepted for r in records)
    rate = n_acc / config.n_runs
    stderr = math.sqrt(max(rate * (1.0 - rate), 0.0) / config.n_runs)

    if config.two_pulse:
        _, closed_form, _ = two_pulse_prepare(state0, chi, omega, window)
    else:
        try:
            _, closed_form = condition_window(state0, chi, omega, window)
        except ConditioningError:
            closed_form = 0.0

    mean_state = None
    w_min = w_vol = None
    tomo_wigner = tomo_report = None
    if n_acc:
        acc = np.zeros_like(state0.rho)
        for rec in records:
            if not rec.accepted:
                continue
            st = condition_exact(state0,
                                 LinearPulseMeasurement(chi, omega,
                                                        rec.outcomes[0]))
            if config.two_pulse:
                st = rotate_half_period(st)
                st = condition_exact(st,
                                     LinearPulseMeasurement(chi, omega,
                                                            rec.outcomes[1]))
            acc += st.rho
        mean_state = DensityMatrixGrid(grid, acc / n_acc)
        w_min, w_vol = negativity(wigner_transform(mean_state))
        if config.tomography_angles:
            tomo_rng = np.random.Generator(np.random.PCG64(master.spawn(1)[0]))
            tomo_wigner, tomo_report = tomography(
                mean_state, config.tomography_angles,
                config.tomography_chi_p, config.samples_per_angle,
                tomo_rng, fock_dim=config.fock_dim)

    return ProtocolSummary(
        n_runs=config.n_runs, n_accepted=n_acc, acceptance_rate=rate,
        acceptance_stderr=stderr, closed_form_probability=closed_form,
        wigner_min=w_min, wigner_negative_volume=w_vol,
        mean_state=mean_state, records=records,
        nbar_over_q=config.nbar_over_q,
        tomography_wigner=tomo_wigner, tomography_report=tomo_report)


# ---------------------------------------------------------------------------
# tomography
# ---------------------------------------------------------------------------

def _ramp_filtered(projection: np.ndarray, ds: float) -> np.ndarray:
    """(1/2pi) integral |k| g^(k) e^{iks} dk on the sample grid, with a
    cosine rolloff at the Nyquist frequency to tame sampling noise."""
    n = projection.size
    pad = n // 2
    g = np.zeros(2 * n)
    g[pad:pad + n] = projection
    k = 2.0 * np.pi * np.fft.fftfreq(2 * n, d=ds)
    k_nyq = np.pi / ds
    filt = np.abs(k) * np.cos(0.5 * np.pi * np.abs(k) / k_nyq)
    q = np.real(np.fft.ifft(np.fft.fft(g) * filt))
    return q[pad:pad + n]


def tomography(state: DensityMatrixGrid, angles, chi_p: float,
               samples_per_angle: int, rng: np.random.Generator | None,
               fock_dim: int = DEFAULT_FOCK_DIM, recon_stride: int = 4):
    """Reconstruct the Wigner function from rotated-quadrature homodyne data.

    At each angle the state is freely evolved, its position marginal is
    sampled through the phase-quadrature readout (Gaussian shot noise of
    variance 1/2 on chi_p x, so scaled outcomes x + N(0, 1/(2 chi_p^2))),
    and filtered back-projection over the angle set yields W on a square
    detector grid (every recon_stride-th point of the state grid), whose
    Nyquist frequency is where the ramp filter's cosine rolloff ends.
    samples_per_angle = 0 (or rng None) switches to the noiseless limit:
    the exact marginal convolved with the shot-noise blur.

    Returns (WignerGrid, report).  The report carries the blur variance
    (not deconvolved), the raw back-projection integral before the final
    renormalization, and the normalized cross-correlation against the true
    Wigner function of the input state.
    """
    if chi_p <= 0:
        raise DomainError("chi_p must be positive")
    angles = np.asarray(sorted(angles), dtype=float)
    if angles.size and (angles.min() < 0 or angles.max() >= math.pi):
        raise DomainError("angles must lie in [0, pi)")
    if np.unique(angles).size != angles.size:
        raise DomainError("angles must be distinct")
    few = angles.size < 8 or (rng is not None
                              and 0 < samples_per_angle < 10_000)
    xs = state.grid.xs
    dx = state.grid.dx
    s_axis = xs[::recon_stride]
    ds = float(s_axis[1] - s_axis[0])
    blur_var = 1.0 / (2.0 * chi_p**2)
    fock = grid_to_fock(state, fock_dim)

    exact = rng is None or samples_per_angle == 0
    edges = np.concatenate([s_axis - 0.5 * ds, [s_axis[-1] + 0.5 * ds]])
    filtered = []
    for theta in angles:
        rotated = fock_to_grid(free_evolve(fock, float(theta)), state.grid)
        marginal = np.clip(rotated.diagonal(), 0.0, None)
        if exact:
            blurred = gaussian_filter1d(marginal, math.sqrt(blur_var) / dx,
                                        mode="constant", truncate=8.0)
            counts, _ = np.histogram(xs, bins=edges, weights=blurred * dx)
            g = counts / ds
        else:
            pos = np.interp(rng.uniform(size=samples_per_angle),
                            np.cumsum(marginal) / marginal.sum(), xs)
            data = pos + rng.normal(0.0, math.sqrt(blur_var),
                                    size=samples_per_angle)
            counts, _ = np.histogram(data, bins=edges)
            g = counts / (samples_per_angle * ds)
        filtered.append(_ramp_filtered(g, ds))

    x_mesh, p_mesh = np.meshgrid(s_axis, s_axis, indexing="ij")
    recon = np.zeros_like(x_mesh)
    for theta, q in zip(angles, filtered):
        s_req = x_mesh * math.cos(theta) + p_mesh * math.sin(theta)
        recon += np.interp(s_req.ravel(), s_axis, q, left=0.0,
                           right=0.0).reshape(s_req.shape)
    recon /= 2.0 * max(angles.size, 1)

    raw_integral = float(np.sum(recon) * ds * ds)
    if raw_integral > 0:
        recon = recon / raw_integral
    wg = WignerGrid(s_axis.copy(), s_axis.copy(), recon)

    truth_w = wigner_transform(state, p_axis=s_axis).w[::recon_stride, :]
    corr = float(np.sum(recon * truth_w)
                 / math.sqrt(np.sum(recon**2) * np.sum(truth_w**2)))
    if few:
        warnings.warn(f"reconstruction quality limited by angle/sample count "
                      f"(correlation {corr:.4f})", ReconstructionWarning,
                      stacklevel=2)
    w_min, w_vol = negativity(wg)
    report = {
        "n_angles": int(angles.size),
        "samples_per_angle": 0 if exact else int(samples_per_angle),
        "chi_p": chi_p,
        "blur_variance": blur_var,
        "raw_integral": raw_integral,
        "correlation": corr,
        "min_w": w_min,
        "negative_volume": w_vol,
    }
    return wg, report


# ---------------------------------------------------------------------------
# external interface
# ---------------------------------------------------------------------------

def records_to_jsonl(records, path) -> None:
    """One JSON object per line: {"run", "outcomes", "accepted"}."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, rec in enumerate(records):
            fh.write(json.dumps({"run": i, "outcomes": rec.outcomes,
                                 "accepted": rec.accepted}) + "\n")


def summary_to_json(summary: ProtocolSummary, indent: int = 2) -> str:
    doc = {
        "n_runs": summary.n_runs,
        "n_accepted": summary.n_accepted,
        "acceptance_rate": summary.acceptance_rate,
        "acceptance_stderr": summary.acceptance_stderr,
        "closed_form_probability": summary.closed_form_probability,
        "wigner_min": summary.wigner_min,
        "wigner_negative_volume": summary.wigner_negative_volume,
        "nbar_over_q": summary.nbar_over_q,
        "tomography": summary.tomography_report,
    }
    return json.dumps(doc, indent=indent)
