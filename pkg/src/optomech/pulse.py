"""Intracavity pulse response and numeric verification of measurement strengths.

Expanding the driven-cavity mean field in powers of the (small) optical
rotation angle g X / kappa produces a cascade of first-order filters, all
with the cavity pole:

    alpha0' = -kappa alpha0 + sqrt(2 kappa) alpha_in      (direct drive)
    alpha1' = -kappa alpha1 + sqrt(2) kappa alpha0        (X signal)
    alpha2' = -kappa alpha2 + sqrt(2) kappa alpha1        (X^2 signal)

A local oscillator matched to alpha1 reads mechanical position; matched to
alpha2 it reads position squared with strength

    chi = 2 sqrt(2 kappa N_p) (g/kappa)^2 ||alpha2||_2,

and the pulse transfers mean momentum sqrt(2) g N_p integral alpha0^2 dt.
Driving with the matched input power spectrum

    alpha_in^2(omega) = (3 pi)^(-1) 8 kappa^5 / (kappa^2 + omega^2)^3

(the spectrum proportional to the alpha2 filter gain) these reduce to
chi = sqrt(42 N_p) (g/kappa)^2 and kick (5 sqrt(2)/3) N_p g / kappa, which
is the closed-form pair the cascade integration must reproduce; a
Lorentzian-spectrum drive (the optimum for plain position readout) gives
strictly smaller chi.  Among drives whose spectral concentration
integral alpha_in^4(omega) d omega does not exceed the matched pulse's
(i.e. pulses at most as long), Cauchy-Schwarz makes the matched spectrum
the exact maximizer, which is what the random-envelope probe exercises.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import lfilter
from scipy.special import k0e, k1e

from .errors import DomainError, TruncationError

__all__ = [
    "PulseEnvelope",
    "ModeFunctions",
    "default_time_grid",
    "optimal_square_spectrum",
    "lorentzian_spectrum",
    "optimal_spectrum_amplitude",
    "lorentzian_spectrum_amplitude",
    "random_smooth_envelope",
    "cascade_integrate",
    "numeric_square_strength",
    "numeric_momentum_kick",
    "modes_to_csv",
]

log = logging.getLogger(__name__)

MAX_RK4_STEP = 1e-3  # in units of 1/kappa
# spectral concentration integral f^2 domega of the matched X^2 spectrum,
# f = alpha_in^2; equals (64*63)/(9*256*pi) / kappa = 1.75/(pi kappa)
MATCHED_SPECTRAL_CONCENTRATION = 1.75 / math.pi


@dataclass
class PulseEnvelope:
    """Real drive envelope alpha_in sampled on a uniform time grid [1/kappa]."""

    t_axis: np.ndarray
    samples: np.ndarray
    rescale_factor: float = 1.0  # applied to enforce unit time-domain norm

    @property
    def dt(self) -> float:
        return float(self.t_axis[1] - self.t_axis[0])

    def norm_squared(self) -> float:
        return float(np.trapezoid(self.samples**2, self.t_axis))


@dataclass
class ModeFunctions:
    """Cascade outputs alpha0, alpha1, alpha2 on the envelope's time grid."""

    t_axis: np.ndarray
    alpha0: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray

    def norms_squared(self):
        return tuple(float(np.trapezoid(a**2, self.t_axis))
                     for a in (self.alpha0, self.alpha1, self.alpha2))


def default_time_grid(kappa: float, n_points: int = 49153) -> np.ndarray:
    """t in [-12, +25]/kappa: 12/kappa of pre-pulse room, enough post-pulse
    decay for the cascade tails to fall below 1e-6 of peak."""
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    return np.linspace(-12.0 / kappa, 25.0 / kappa, n_points)


def _check_time_grid(kappa: float, t_axis: np.ndarray) -> None:
    span = float(t_axis[-1] - t_axis[0])
    if span < 20.0 / kappa:
        raise TruncationError(f"time grid spans {span * kappa:.1f}/kappa, "
                              "need at least 20/kappa")
    if t_axis[0] > -8.0 / kappa or t_axis[-1] < 8.0 / kappa:
        raise TruncationError("time grid must bracket the pulse center 0 by "
                              "at least 8/kappa on each side")


def optimal_spectrum_amplitude(omega, kappa: float):
    """Amplitude spectrum of the matched X^2 drive, sqrt of the stated power
    spectrum: sqrt(8 kappa^5 / 3 pi) (kappa^2 + omega^2)^(-3/2)."""
    return math.sqrt(8.0 * kappa**5 / (3.0 * math.pi)) \
        * (kappa**2 + np.asarray(omega, dtype=float) ** 2) ** (-1.5)


def lorentzian_spectrum_amplitude(omega, kappa: float):
    """Amplitude of the cavity-matched Lorentzian power spectrum
    kappa / (pi (kappa^2 + omega^2))."""
    return np.sqrt(kappa / (np.pi * (kappa**2
                                     + np.asarray(omega, dtype=float) ** 2)))


def _finalize_envelope(t_axis, samples) -> PulseEnvelope:
    nrm2 = float(np.trapezoid(samples**2, t_axis))
    scale = 1.0 / math.sqrt(nrm2)
    log.debug("envelope renormalization factor %.6e", scale)
    return PulseEnvelope(t_axis, samples * scale, rescale_factor=scale)


def optimal_square_spectrum(kappa: float, t_axis=None) -> PulseEnvelope:
    """Time-domain envelope of the matched X^2 drive.

    The inverse transform of the amplitude spectrum is
    alpha(t) = sqrt(2/pi) A (|t|/kappa) K_1(kappa |t|), A = sqrt(8 kappa^5/3 pi),
    smooth at t = 0 where t K_1(kappa t) -> 1/kappa.  Samples are rescaled to
    unit time-domain norm (the factor only absorbs grid truncation).
    """
    if t_axis is None:
        t_axis = default_time_grid(kappa)
    _check_time_grid(kappa, t_axis)
    amp = math.sqrt(8.0 * kappa**5 / (3.0 * math.pi))
    z = kappa * np.abs(t_axis)
    vals = np.where(z < 1e-12, 1.0 / kappa,
                    np.abs(t_axis) * k1e(np.maximum(z, 1e-12)) * np.exp(-z))
    return _finalize_envelope(t_axis, math.sqrt(2.0 / math.pi) * amp * vals)


def lorentzian_spectrum(kappa: float, t_axis=None) -> PulseEnvelope:
    """Time-domain envelope of the Lorentzian-power-spectrum drive.

    alpha(t) = (sqrt(2 kappa)/pi) K_0(kappa |t|); the integrable log spike at
    t = 0 is clipped at an eighth of a grid cell, and the final unit-norm
    rescale absorbs the (sub-1e-6) mass error this introduces.
    """
    if t_axis is None:
        t_axis = default_time_grid(kappa)
    _check_time_grid(kappa, t_axis)
    dt = float(t_axis[1] - t_axis[0])
    z = np.maximum(kappa * np.abs(t_axis), kappa * dt / 8.0)
    vals = k0e(z) * np.exp(-z)
    return _finalize_envelope(t_axis, (math.sqrt(2.0 * kappa) / math.pi) * vals)


def random_smooth_envelope(kappa: float, rng: np.random.Generator,
                           t_axis=None, n_omega: int = 2049) -> PulseEnvelope:
    """Random smooth drive at matched spectral concentration.

    Draws a positive bump mixture for the power spectrum f(omega),
    symmetrizes it, and rescales the frequency axis so that
    integral f^2 domega equals the matched pulse's value (f_s = s f(s omega)
    keeps unit area while scaling the concentration by s).  Pulses of this
    family cannot beat the matched spectrum's chi, which makes them fair
    probes of the optimality claim.
    """
    if t_axis is None:
        # duration matching can stretch the pulse well beyond the matched
        # spectrum's tails, so the probe grid is much longer than the default
        t_axis = np.linspace(-50.0 / kappa, 50.0 / kappa, 28673)
    _check_time_grid(kappa, t_axis)
    n_bumps = int(rng.integers(2, 6))
    centers = rng.uniform(-1.5 * kappa, 1.5 * kappa, n_bumps)
    widths = rng.uniform(0.6 * kappa, 1.2 * kappa, n_bumps)
    amps = rng.uniform(0.2, 1.0, n_bumps)

    w_max = 12.0 * kappa
    omega = np.linspace(-w_max, w_max, n_omega)
    dw = float(omega[1] - omega[0])
    f = np.zeros_like(omega)
    for c, width, a in zip(centers, widths, amps):
        f += a * (np.exp(-0.5 * ((omega - c) / width) ** 2)
                  + np.exp(-0.5 * ((omega + c) / width) ** 2))
    f /= np.sum(f) * dw
    s = (MATCHED_SPECTRAL_CONCENTRATION / kappa) / float(np.sum(f**2) * dw)
    omega_s = omega / s
    amp_weights = np.sqrt(s * f) * (dw / s) / math.sqrt(2.0 * math.pi)
    # inverse transform (real even spectrum -> real even envelope), chunked
    # over frequency to keep the cosine matrix small
    samples = np.zeros_like(t_axis)
    for start in range(0, n_omega, 256):
        blk = slice(start, start + 256)
        samples += amp_weights[blk] @ np.cos(np.outer(omega_s[blk], t_axis))
    return _finalize_envelope(t_axis, samples)


# ---------------------------------------------------------------------------
# cascade integration
# ---------------------------------------------------------------------------

def _rk4_stage(drive_half: np.ndarray, kappa: float, h: float) -> np.ndarray:
    """Fixed-step RK4 for y' = -kappa y + u(t), y(t0) = 0.

    drive_half holds u at half-step resolution (2S+1 values for S steps).
    For this linear ODE the RK4 update is the constant-coefficient
    recurrence y_{k+1} = E y_k + w0 u_0 + wm u_m + w1 u_1 (u at the step
    start/mid/end), which lfilter evaluates exactly as the explicit loop
    would.
    """
    lam = -kappa
    e = 1.0 + h * lam + (h * lam) ** 2 / 2 + (h * lam) ** 3 / 6 \
        + (h * lam) ** 4 / 24
    w0 = h / 6.0 * (1.0 + h * lam + (h * lam) ** 2 / 2 + (h * lam) ** 3 / 4)
    wm = h / 6.0 * (4.0 + 2.0 * h * lam + (h * lam) ** 2)
    w1 = h / 6.0
    forcing = (w0 * drive_half[:-2:2] + wm * drive_half[1:-1:2]
               + w1 * drive_half[2::2])
    y = np.empty(forcing.size + 1)
    y[0] = 0.0
    y[1:] = lfilter([1.0], [1.0, -e], forcing)
    return y


def cascade_integrate(pulse: PulseEnvelope, kappa: float) -> ModeFunctions:
    """Integrate the three-stage cavity-response cascade.

    Fixed-step 4th-order integration with internal step <= 1e-3/kappa
    (sample spacing is subdivided if coarser); stage inputs between grid
    nodes come from cubic splines, preserving 4th-order accuracy.
    """
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    t = pulse.t_axis
    dt = pulse.dt
    n_sub = max(1, math.ceil(dt * kappa / MAX_RK4_STEP))
    h = dt / n_sub
    n_steps = (t.size - 1) * n_sub
    t_fine = t[0] + h * np.arange(n_steps + 1)
    t_half = t[0] + 0.5 * h * np.arange(2 * n_steps + 1)

    drive = math.sqrt(2.0 * kappa) * CubicSpline(t, pulse.samples)(t_half)
    a0 = _rk4_stage(drive, kappa, h)
    drive = math.sqrt(2.0) * kappa * CubicSpline(t_fine, a0)(t_half)
    a1 = _rk4_stage(drive, kappa, h)
    drive = math.sqrt(2.0) * kappa * CubicSpline(t_fine, a1)(t_half)
    a2 = _rk4_stage(drive, kappa, h)

    modes = ModeFunctions(t, a0[::n_sub], a1[::n_sub], a2[::n_sub])
    for name, arr in (("alpha0", modes.alpha0), ("alpha1", modes.alpha1),
                      ("alpha2", modes.alpha2)):
        if not np.all(np.isfinite(arr)):
            raise TruncationError(f"{name} integration diverged")
        peak = float(np.max(np.abs(arr)))
        tail = float(abs(arr[-1]))
        if peak > 0 and not tail < 1e-6 * peak:
            raise TruncationError(
                f"{name} has not decayed at the final grid time "
                f"({tail / peak:.2e} of peak); extend the time grid")
    return modes


def numeric_square_strength(modes: ModeFunctions, photon_number: float,
                            g_lin: float, kappa: float) -> float:
    """X^2 measurement strength from the integrated cavity response.

    With the local oscillator alpha2/||alpha2|| the homodyne mean picks up
    -2 sqrt(2 kappa N_p) (g/kappa)^2 ||alpha2|| <X^2>; the prefactor of <X^2>
    is the strength.
    """
    if photon_number < 0 or g_lin <= 0 or kappa <= 0:
        raise DomainError("photon_number >= 0 and positive g_lin, kappa required")
    norm_a2 = math.sqrt(float(np.trapezoid(modes.alpha2**2, modes.t_axis)))
    return 2.0 * math.sqrt(2.0 * kappa * photon_number) \
        * (g_lin / kappa) ** 2 * norm_a2


def numeric_momentum_kick(modes: ModeFunctions, photon_number: float,
                          g_lin: float) -> float:
    """Mean momentum kick sqrt(2) g N_p integral alpha0^2 dt (leading order
    of the radiation-pressure transfer)."""
    if photon_number < 0 or g_lin <= 0:
        raise DomainError("photon_number >= 0 and g_lin > 0 required")
    return math.sqrt(2.0) * g_lin * photon_number \
        * float(np.trapezoid(modes.alpha0**2, modes.t_axis))


def modes_to_csv(pulse: PulseEnvelope, modes: ModeFunctions, path) -> None:
    """Five-column CSV: t, alpha_in, alpha0, alpha1, alpha2."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,alpha_in,alpha0,alpha1,alpha2\n")
        for row in zip(pulse.t_axis, pulse.samples, modes.alpha0,
                       modes.alpha1, modes.alpha2):
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")
