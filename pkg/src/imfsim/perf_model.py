"""Analytic workload, latency, energy, current and throughput models.

Per-frame operation counts for an M = W*H pixel frame (alpha = fraction of
pixels the non-overlapping filter actually flips, beta_t = temporal window of
the event-neighborhood baseline, gamma = its event density):

    method            reads            writes        logic ops      cells
    nn_filt           beta_t*gamma*n^2*M  beta_t*gamma*M  gamma*n^2*M    beta_t*M
    median_filter     n^2*M            M             n^2*M          2*M
    nomf              M                M             M              M
    nomf_imc          M/n              alpha*M       0              M

Fractional counts round up.  Digital implementations cost, in clock cycles:
sliding median (mf) (n^2+1)*W*H, with partial reuse (mfpr) 2*n*H, with a row
buffer (mfrb) (n^2+1)*W*H, with both (mfprrb) 2*H; the in-array filter (imf)
2*H/n.  Energy per frame for digital baselines scales read/write costs by
(vdd/ref_vdd)^2 and by the bit-line capacitance ratio of the baseline array
to the filtering array; the in-array filter is a flat measured per-pixel
energy.  Charging current of the filtering array:

    i_ch = ((rho+lambda) * N_col * C_BL + n * C_WL) * vdd * f / 2

plus a measured 0.68% bit-flip overhead.  Throughput counts 2 ops per cell
per cycle across the n rows being filtered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DimensionMismatchError, InvalidParamsError
from .sram_macro import DeviceParams

FILTER_METHODS = ("nn_filt", "median_filter", "nomf", "nomf_imc")
LATENCY_ARCHS = ("mf", "mfpr", "mfrb", "mfprrb", "imf")
ENERGY_ARCHS = ("mf", "mfrb", "imc_nomf")

BITFLIP_CURRENT_FRACTION = 0.0068   # of i_ch


@dataclass(frozen=True)
class WorkloadParams:
    width: int = 240
    height: int = 180
    n: int = 3
    alpha: float = 0.015            # flipped-pixel fraction
    beta_t: int = 16                # temporal window, frames
    gamma: float = 0.127            # event density
    empty_frame_fraction: float = 0.51

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidParamsError("frame dimensions must be positive")
        if self.n < 3 or self.n % 2 == 0:
            raise InvalidParamsError(f"n must be odd and >= 3, got {self.n}")
        if not 0 <= self.alpha <= 1 or not 0 <= self.gamma <= 1:
            raise InvalidParamsError("alpha and gamma are fractions")
        if self.beta_t <= 0:
            raise InvalidParamsError("beta_t must be positive")
        if not 0 <= self.empty_frame_fraction <= 1:
            raise InvalidParamsError("empty_frame_fraction is a fraction")

    @property
    def pixels(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class EnergyConstants:
    e_read: float = 0.916e-12       # J per bit, measured baseline array
    e_write: float = 6.0e-12        # J per bit
    ref_vdd: float = 1.0            # V at which e_read/e_write were measured
    cap_ratio: float = 89.0 / 140.0  # baseline / filtering array bit-line capacitance
    e_imc_pixel: float = 39e-15     # J per pixel, in-array filtering
    dnn_energy: float = 1076.6e-9   # J per frame of downstream inference


@dataclass(frozen=True)
class FilterCost:
    reads: int
    writes: int
    logic_ops: int
    cells: int


@dataclass(frozen=True)
class CurrentBreakdown:
    i_ch: float
    i_bitflip: float
    i_imf: float
    i_leakage: float
    i_total: float


@dataclass(frozen=True)
class SystemEnergy:
    average: float
    baseline: float
    savings: float


def op_counts(method: str, params: WorkloadParams) -> FilterCost:
    m = params.pixels
    n2 = params.n * params.n
    method = method.lower()
    if method == "nn_filt":
        return FilterCost(
            reads=math.ceil(params.beta_t * params.gamma * n2 * m),
            writes=math.ceil(params.beta_t * params.gamma * m),
            logic_ops=math.ceil(params.gamma * n2 * m),
            cells=params.beta_t * m,
        )
    if method == "median_filter":
        return FilterCost(reads=n2 * m, writes=m, logic_ops=n2 * m, cells=2 * m)
    if method == "nomf":
        return FilterCost(reads=m, writes=m, logic_ops=m, cells=m)
    if method == "nomf_imc":
        return FilterCost(
            reads=math.ceil(m / params.n),
            writes=math.ceil(params.alpha * m),
            logic_ops=0,
            cells=m,
        )
    raise InvalidParamsError(f"unknown method {method!r}, expected one of {FILTER_METHODS}")


def digital_latency(arch: str, width: int, height: int, n: int) -> int:
    """Clock cycles to filter one width x height frame."""
    arch = arch.lower()
    n2 = n * n
    if arch == "mf":
        return (n2 + 1) * width * height
    if arch == "mfpr":
        return 2 * n * height
    if arch == "mfrb":
        return (n2 + 1) * width * height
    if arch == "mfprrb":
        return 2 * height
    if arch == "imf":
        if height % n != 0:
            raise DimensionMismatchError(f"height {height} not divisible by n={n}")
        return 2 * height // n
    raise InvalidParamsError(f"unknown arch {arch!r}, expected one of {LATENCY_ARCHS}")


def baseline_energy(
    arch: str, params: WorkloadParams, constants: EnergyConstants, vdd: float
) -> float:
    """Energy per frame in joules for a digital baseline or the in-array filter."""
    arch = arch.lower()
    m = params.pixels
    n = params.n
    scale = (vdd / constants.ref_vdd) ** 2 * constants.cap_ratio
    if arch == "mf":
        return m * (n * n * constants.e_read + constants.e_write) * scale
    if arch == "mfrb":
        # the row buffer saves 2n of the n^2 reads per pixel
        return m * ((n * n - 2 * n) * constants.e_read + constants.e_write) * scale
    if arch == "imc_nomf":
        return m * constants.e_imc_pixel
    raise InvalidParamsError(f"unknown arch {arch!r}, expected one of {ENERGY_ARCHS}")


def rho_lambda_bound(k: int, n: int, beta: float = 0.7) -> tuple[float, float]:
    """Bounds on the summed bit-line swing fraction rho+lambda for a k-ones patch."""
    n2 = n * n
    if not 0 <= k <= n2:
        raise InvalidParamsError(f"k={k} impossible for n={n}")
    minority, majority = min(k, n2 - k), max(k, n2 - k)
    return 1.0, 1.0 + beta * minority / majority


def imc_current(
    params: WorkloadParams,
    device: DeviceParams,
    f: float,
    rho_lambda_mean: float = 1.01,
    i_imf: float = 0.0,
    i_leakage: float = 0.0,
) -> CurrentBreakdown:
    """Supply current of the filtering array at clock f, for params.width columns."""
    if f <= 0:
        raise InvalidParamsError("clock frequency must be positive")
    i_ch = (
        (rho_lambda_mean * params.width * device.c_bl + params.n * device.c_wl)
        * device.vdd
        * f
        / 2.0
    )
    i_bitflip = BITFLIP_CURRENT_FRACTION * i_ch
    return CurrentBreakdown(
        i_ch=i_ch,
        i_bitflip=i_bitflip,
        i_imf=i_imf,
        i_leakage=i_leakage,
        i_total=i_ch + i_bitflip + i_imf + i_leakage,
    )


def throughput_efficiency(
    f: float, n: int, cols: int, energy_per_pixel: float
) -> tuple[float, float]:
    """(GOPS, TOPS/W): 2 ops per cell over n rows per cycle; 2 ops per pixel energy."""
    if f <= 0 or energy_per_pixel <= 0:
        raise InvalidParamsError("frequency and energy must be positive")
    gops = 2.0 * cols * n * f / 1e9
    tops_per_w = (2.0 / energy_per_pixel) / 1e12
    return gops, tops_per_w


def system_energy_per_frame(
    params: WorkloadParams, constants: EnergyConstants, denoise_energy: float
) -> SystemEnergy:
    """Average per-frame energy when empty frames skip inference, vs running
    inference on every frame."""
    if denoise_energy < 0:
        raise InvalidParamsError("denoise energy must be non-negative")
    average = denoise_energy + (1.0 - params.empty_frame_fraction) * constants.dnn_energy
    baseline = constants.dnn_energy
    return SystemEnergy(average=average, baseline=baseline, savings=1.0 - average / baseline)
