"""Wind force model, true/apparent conversions, turbulence statistics, a seeded
synthetic wind generator and the water-current disturbance.

Angle conventions:
  - TrueWind.direction is the earth-frame direction the wind blows FROM,
    measured like a heading (0 = from North).
  - WindSample.angle is the apparent angle of attack: 0 means apparent wind
    from dead ahead (its surge force coefficient -c_x then decelerates the
    vessel); it is computed as -atan2(v_rw, u_rw) from the relative components.
  - The relative components subtract vehicle velocity from the from-vector
    components (u_rw = u_w - u).  During station-keeping u, v ~ 0 and the
    correction is negligible, which is the regime this model is meant for.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import signal

from .angles import wrap_angle
from .dynamics import VehicleParams, VehicleState, Wrench

# Advised ranges for the windage coefficients of an xz-symmetric hull; tuned
# values may legitimately fall outside (the shipped defaults do).
ADVISED_RANGES = {"c_x": (0.5, 0.90), "c_y": (0.7, 0.95), "c_z": (0.05, 0.20)}


@dataclass
class WindParams:
    """Windage geometry and force coefficients."""

    rho_air: float = 1.2        # [kg/m^3]
    area_frontal: float = 1.2   # projected frontal windage area [m^2] (rough estimate)
    area_lateral: float = 2.4   # projected lateral windage area [m^2] (rough estimate)
    lever_lateral: float = 0.5  # lateral-area centroid lever [m] (rough estimate)
    c_x: float = 0.50
    c_y: float = 0.50
    c_z: float = 0.33
    range_notes: list = field(init=False, default_factory=list)

    def __post_init__(self):
        if self.rho_air <= 0 or self.area_frontal <= 0 or self.area_lateral <= 0:
            raise ValueError("air density and windage areas must be positive")
        for name, (lo, hi) in ADVISED_RANGES.items():
            val = getattr(self, name)
            if not lo <= val <= hi:
                self.range_notes.append(
                    f"{name}={val:g} outside the advised range [{lo}, {hi}]"
                    " (acceptable for tuned values)")


@dataclass(frozen=True)
class WindSample:
    """Apparent wind at the vessel at time t."""

    t: float          # [s]
    speed: float      # apparent speed [m/s], >= 0
    angle: float      # apparent angle of attack [rad], (-pi, pi]

    def __post_init__(self):
        if not (math.isfinite(self.speed) and math.isfinite(self.angle)):
            raise ValueError(f"wind sample must be finite, got {self}")
        if self.speed < 0:
            raise ValueError(f"apparent wind speed must be >= 0, got {self.speed}")
        object.__setattr__(self, "angle", wrap_angle(self.angle))


@dataclass(frozen=True)
class TrueWind:
    """Earth-frame wind: speed and the direction it blows from."""

    speed: float      # [m/s], >= 0
    direction: float  # [rad], FROM direction, (-pi, pi]

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError(f"wind speed must be >= 0, got {self.speed}")
        object.__setattr__(self, "direction", wrap_angle(self.direction))


@dataclass
class CurrentParams:
    """Constant or slowly varying water current (flow-toward direction)."""

    speed: float = 0.0      # [m/s]
    direction: float = 0.0  # earth-frame direction of flow [rad]
    amplitude: float = 0.0  # optional sinusoidal speed modulation [m/s]
    period: float = 0.0     # modulation period [s]; 0 disables

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError(f"current speed must be >= 0, got {self.speed}")

    def speed_at(self, t: float) -> float:
        if self.period > 0 and self.amplitude != 0.0:
            return max(0.0, self.speed + self.amplitude * math.sin(2.0 * math.pi * t / self.period))
        return self.speed


def wind_wrench(wp: WindParams, sample: WindSample) -> Wrench:
    """Wind force/moment from dynamic pressure and the angle-of-attack coefficients."""
    q = 0.5 * wp.rho_air * sample.speed * sample.speed
    g = sample.angle
    cx = -wp.c_x * math.cos(g)
    cy = wp.c_y * math.sin(g)
    cn = wp.c_z * math.sin(2.0 * g)
    return Wrench(q * cx * wp.area_frontal,
                  q * cy * wp.area_lateral,
                  q * cn * wp.area_lateral * wp.lever_lateral)


def apparent_from_true(true_wind: TrueWind, state: VehicleState, t: float = 0.0) -> WindSample:
    """Apparent wind seen by the vessel, given the earth-frame true wind."""
    rel = wrap_angle(true_wind.direction - state.psi)
    u_w = true_wind.speed * math.cos(rel)
    v_w = true_wind.speed * math.sin(rel)
    u_rw = u_w - state.u
    v_rw = v_w - state.v
    speed = math.hypot(u_rw, v_rw)
    angle = -math.atan2(v_rw, u_rw) if speed > 0.0 else 0.0
    return WindSample(t=t, speed=speed, angle=angle)


def true_from_apparent(sample: WindSample, state: VehicleState) -> TrueWind:
    """Inverse of apparent_from_true for the same vehicle state."""
    u_rw = sample.speed * math.cos(sample.angle)
    v_rw = -sample.speed * math.sin(sample.angle)
    u_w = u_rw + state.u
    v_w = v_rw + state.v
    speed = math.hypot(u_w, v_w)
    direction = wrap_angle(state.psi + math.atan2(v_w, u_w)) if speed > 0.0 else 0.0
    return TrueWind(speed=speed, direction=direction)


@dataclass
class WindSeries:
    """Uniformly sampled true-wind time series."""

    t: np.ndarray          # [s]
    speed: np.ndarray      # [m/s]
    direction: np.ndarray  # [rad]

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.speed = np.asarray(self.speed, dtype=float)
        self.direction = np.asarray(self.direction, dtype=float)
        if not (len(self.t) == len(self.speed) == len(self.direction)):
            raise ValueError("wind series arrays must have equal length")
        if len(self.t) == 0:
            raise ValueError("wind series must not be empty")

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    def at(self, time: float) -> TrueWind:
        """Linearly interpolated wind at an arbitrary time (clamped at the ends)."""
        sp = float(np.interp(time, self.t, self.speed))
        # Interpolate direction through unit-vector components to avoid wrap artifacts.
        c = float(np.interp(time, self.t, np.cos(self.direction)))
        s = float(np.interp(time, self.t, np.sin(self.direction)))
        direction = math.atan2(s, c) if (c != 0.0 or s != 0.0) else 0.0
        return TrueWind(speed=max(0.0, sp), direction=direction)

    @staticmethod
    def constant(speed: float, direction: float, duration: float, dt: float) -> "WindSeries":
        n = max(2, int(round(duration / dt)))
        t = np.arange(n) * dt
        return WindSeries(t, np.full(n, float(speed)), np.full(n, wrap_angle(direction)))


def _random_phase_fluctuations(rng: np.random.Generator, n: int, dt: float,
                               knee_hz: float, target_rms: float) -> np.ndarray:
    """Zero-mean fluctuation series with a low-pass spectrum and exact RMS.

    Built on the DFT grid of the series itself: deterministic amplitude
    envelope 1/(1 + (f/knee)^4) with seeded random phases, rescaled to the
    requested RMS, so sample mean and intensity are exact by construction and
    the measured periodogram matches the envelope.
    """
    freqs = np.fft.rfftfreq(n, dt)
    envelope = np.zeros_like(freqs)
    nonzero = freqs > 0
    envelope[nonzero] = 1.0 / (1.0 + (freqs[nonzero] / knee_hz) ** 4)
    phases = rng.uniform(0.0, 2.0 * np.pi, len(freqs))
    spectrum = np.sqrt(envelope) * np.exp(1j * phases)
    fluct = np.fft.irfft(spectrum, n)
    rms = math.sqrt(float(np.mean(fluct * fluct)))
    if rms > 0.0:
        fluct *= target_rms / rms
    return fluct


def synthesize_wind(seed: int, mean_speed: float, mean_direction: float,
                    intensity: float, cutoff_hz: float, duration: float, dt: float,
                    direction_std: float = 0.0) -> WindSeries:
    """Deterministic synthetic wind with prescribed mean, turbulence intensity
    and spectral cutoff (>= 90% of the fluctuation energy below cutoff_hz).
    """
    if mean_speed <= 0:
        raise ValueError(f"mean speed must be positive, got {mean_speed}")
    if not 0.0 <= intensity < 1.0:
        raise ValueError(f"turbulence intensity must lie in [0, 1), got {intensity}")
    if cutoff_hz <= 0:
        raise ValueError(f"cutoff frequency must be positive, got {cutoff_hz}")
    if dt >= 1.0 / (2.0 * cutoff_hz):
        raise ValueError(
            f"dt={dt} cannot resolve the {cutoff_hz} Hz cutoff (need dt < {1.0 / (2.0 * cutoff_hz):g})")
    n = int(round(duration / dt))
    if n < 2:
        raise ValueError("duration must cover at least two samples")

    rng = np.random.default_rng(seed)
    t = np.arange(n) * dt
    # Knee well below the cutoff so ~97% of the energy sits under cutoff_hz.
    knee = cutoff_hz / 3.0
    if intensity > 0.0:
        fluct = _random_phase_fluctuations(rng, n, dt, knee, intensity * mean_speed)
        speed = np.clip(mean_speed + fluct, 0.0, None)
    else:
        speed = np.full(n, float(mean_speed))
    if direction_std > 0.0:
        dir_fluct = _random_phase_fluctuations(rng, n, dt, knee, direction_std)
        direction = mean_direction + dir_fluct
    else:
        direction = np.full(n, float(mean_direction))
    return WindSeries(t=t, speed=speed, direction=direction)


@dataclass(frozen=True)
class TurbulenceStats:
    """Summary statistics of an apparent-wind speed record."""

    mean: float            # [m/s]
    tke: float             # RMS of the speed fluctuations [m/s]
    intensity: float       # tke / mean
    freqs: np.ndarray      # PSD frequency grid [Hz]
    psd: np.ndarray        # fluctuation PSD normalized by tke^2 [1/Hz]
    f90: float             # frequency below which 90% of fluctuation energy lies [Hz]
    length_scale: float    # mean / f90 [m]


def turbulence_stats(speeds, dt: float, window: str = "boxcar") -> TurbulenceStats:
    """Mean, turbulent kinetic energy, intensity and spectral summary.

    The PSD is a single-window periodogram of the mean-removed record,
    normalized by the fluctuation variance so it integrates to one.
    """
    x = np.asarray(speeds, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError("need a 1-D record with at least two samples")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    mean = float(np.mean(x))
    fluct = x - mean
    tke = math.sqrt(float(np.mean(fluct * fluct)))
    if mean == 0.0:
        raise ValueError("turbulence intensity is undefined for a zero-mean record")
    intensity = tke / mean

    freqs, psd = signal.periodogram(x, fs=1.0 / dt, window=window, detrend="constant")
    if tke > 0.0:
        psd_norm = psd / (tke * tke)
        energy = psd[1:]  # exclude DC (zero after mean removal)
        cum = np.cumsum(energy)
        total = cum[-1]
        idx = int(np.searchsorted(cum, 0.9 * total))
        f90 = float(freqs[1 + min(idx, len(energy) - 1)])
        length_scale = mean / f90 if f90 > 0 else math.inf
    else:
        psd_norm = np.zeros_like(psd)
        f90 = math.nan
        length_scale = math.nan
    return TurbulenceStats(mean=mean, tke=tke, intensity=intensity,
                           freqs=freqs, psd=psd_norm, f90=f90, length_scale=length_scale)


class MovingAverageFilter:
    """Trailing moving average over wind samples; span grows from 1 during warm-up.

    Direction is averaged through unit-vector components so records straddling
    +/-pi average correctly.
    """

    def __init__(self, span: int = 20):
        if span < 1:
            raise ValueError(f"span must be >= 1, got {span}")
        self.span = span
        self._speeds: deque = deque(maxlen=span)
        self._cos: deque = deque(maxlen=span)
        self._sin: deque = deque(maxlen=span)

    def update(self, sample: WindSample) -> WindSample:
        self._speeds.append(sample.speed)
        self._cos.append(math.cos(sample.angle))
        self._sin.append(math.sin(sample.angle))
        speed = sum(self._speeds) / len(self._speeds)
        c = sum(self._cos) / len(self._cos)
        s = sum(self._sin) / len(self._sin)
        angle = math.atan2(s, c) if (c != 0.0 or s != 0.0) else 0.0
        return WindSample(t=sample.t, speed=speed, angle=angle)

    def reset(self):
        self._speeds.clear()
        self._cos.clear()
        self._sin.clear()


def anemometer_filter(samples: Sequence[WindSample], span: int = 20) -> list[WindSample]:
    """Apply the trailing moving average to a chronological sample list."""
    filt = MovingAverageFilter(span)
    return [filt.update(s) for s in samples]


def current_wrench(cp: CurrentParams, state: VehicleState, params: VehicleParams,
                   t: float = 0.0) -> Wrench:
    """Disturbance wrench from the water current.

    Applies the linear drag columns to the body-frame relative water velocity,
    pushing the hull with the flow; vanishes when the vessel drifts with it.
    """
    sp = cp.speed_at(t)
    wx = sp * math.cos(cp.direction)
    wy = sp * math.sin(cp.direction)
    c, s = math.cos(state.psi), math.sin(state.psi)
    u_w = c * wx + s * wy
    v_w = -s * wx + c * wy
    rel_u = u_w - state.u
    rel_v = v_w - state.v
    return Wrench(params.x_u * rel_u, params.y_v * rel_v, params.n_v * rel_v)
