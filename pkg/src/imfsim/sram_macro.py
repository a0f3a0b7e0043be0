"""Behavioral model of a 6T-SRAM array that filters its own contents.

The array stores one binary frame.  Asserting the n word lines of a row group
starts a discharge race on every n-column bit-line pair: cells storing 0 pull
BL down, cells storing 1 pull BLB down, and whichever side trips the cells of
the other side first overwrites the whole n x n patch with its value.  With
matched devices this is exactly a majority vote (the non-overlapping median);
device mismatch makes near-balanced patches resolve wrongly with some
probability, which is the error source this model reproduces.

Race model per mixed patch (k ones out of n^2):

    dt = n * (C_BL * V_BL,trip / I_BL  -  C_BLB * V_BLB,trip / I_BLB)

with I_BL the summed current of the 0-storing cells, I_BLB of the 1-storing
cells, V_BL,trip the mean sampled trip point of the cells that flip when BL
wins (the 1-storing cells) and V_BLB,trip the mean for the 0-storing cells.
C_BLB = C_BL * (1 + delta_c) models deliberate or parasitic imbalance.
Outcome is 1 iff dt > 0.  Uniform patches have no race; they keep their value
and report dt = +/-inf.

Mismatch sampling: each cell draws a discharge current from
Normal(i_s_nominal, sigma_i_over_mu * i_s_nominal), truncated at +/-4 sigma
(implemented as a clip so the draw count is fixed) and floored at a tiny
positive value, then a trip point from Normal(v_trip_nominal, sigma_vtrip).
Currents for the whole array are drawn first, then trip points, row-major,
from one numpy default_rng stream, so an independent re-implementation with
the same seed reproduces the lottery bit for bit.  Monte-Carlo trials reseed
with rng_seed + trial_index.

Supply, temperature and corner enter through a square-law overdrive model:
V_T = 0.35 V at TT / 27 C, falling 1 mV/C and shifted +/-50 mV at SS/FF;
i_s scales with (vdd - V_T)^2 from a 50 uA reference at 1.0 V TT, and the
relative current spread scales inversely with overdrive (variation_at_device).
sigma_i_over_mu in CellVariation is therefore quoted at the 1.0 V TT
reference; harnesses that sweep the operating point call variation_at_device
to get the effective spread.  Trip points are 0.3 * vdd nominal, so
beta = 1 - v_trip/vdd = 0.7 by construction.

Timing: clearing strobes 16 word lines per cycle; writing costs one cycle per
listed pixel; filtering costs two cycles (precharge + resolve) per row group.
Only complete n-wide column groups are filtered; the cols % n leftover
columns pass through untouched and are excluded from flip accounting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidParamsError, OutOfBoundsError
from .filters import KernelSpec
from .frames import BinaryFrame

# Reference operating point for the overdrive model.
TEMP_REF_C = 27.0
VDD_REF = 1.0
V_T0 = 0.35                 # V, threshold at TT / 27 C
VT_TEMP_SLOPE = 1.0e-3      # V per C; threshold drops as temperature rises
CORNER_VT_SHIFT = {"TT": 0.0, "SS": 0.05, "FF": -0.05}
I_S_REF = 50e-6             # A, unit-cell discharge current at the reference point
BETA_NOMINAL = 0.7          # 1 - v_trip / vdd
TG_MARGIN = 0.1             # transmission-gate RC budget as a fraction of the discharge RC

# Relative current spread at the reference overdrive, fitted by
# calibrate_current_sigma against the dense-noise workload so that 0.7 V image
# BER lands in [1e-4, 1e-3] while 1.2 V stays below 1e-5 (see tests).
CALIBRATED_SIGMA_I_OVER_MU = 0.0547
DEFAULT_SIGMA_VTRIP = 0.005  # V

_CURRENT_FLOOR = 1e-12       # A, keeps clipped samples strictly positive
_VTRIP_FLOOR = 1e-9          # V


def threshold_voltage(temperature: float, corner: str) -> float:
    if corner not in CORNER_VT_SHIFT:
        raise InvalidParamsError(f"corner must be one of {sorted(CORNER_VT_SHIFT)}, got {corner!r}")
    return V_T0 + CORNER_VT_SHIFT[corner] - VT_TEMP_SLOPE * (temperature - TEMP_REF_C)


REF_OVERDRIVE = VDD_REF - V_T0  # 0.65 V


@dataclass(frozen=True)
class DeviceParams:
    """Electrical operating point of the array."""

    vdd: float = 0.7
    temperature: float = 27.0
    corner: str = "TT"
    c_bl: float = 140e-15
    c_wl: float = 330e-15
    delta_c: float = 0.0            # BLB capacitance imbalance, C_BLB = c_bl*(1+delta_c)
    v_trip_nominal: float | None = None   # default 0.3*vdd
    i_s_nominal: float | None = None      # default overdrive-scaled from I_S_REF
    r_tg: float = 200.0             # ohms, transmission gate on-resistance

    def __post_init__(self):
        vt = threshold_voltage(self.temperature, self.corner)
        if self.vdd <= vt:
            raise InvalidParamsError(
                f"vdd {self.vdd} V leaves no overdrive above V_T {vt:.3f} V"
            )
        if self.c_bl <= 0 or self.c_wl <= 0:
            raise InvalidParamsError("bit-line and word-line capacitances must be positive")
        if 1.0 + self.delta_c <= 0:
            raise InvalidParamsError(f"delta_c {self.delta_c} makes C_BLB non-positive")
        if self.r_tg < 0:
            raise InvalidParamsError("r_tg must be non-negative")
        if self.v_trip_nominal is None:
            object.__setattr__(self, "v_trip_nominal", (1.0 - BETA_NOMINAL) * self.vdd)
        if not 0 < self.v_trip_nominal < self.vdd:
            raise InvalidParamsError(
                f"v_trip_nominal {self.v_trip_nominal} must lie inside (0, vdd)"
            )
        if self.i_s_nominal is None:
            object.__setattr__(
                self, "i_s_nominal", I_S_REF * (self.overdrive / REF_OVERDRIVE) ** 2
            )
        if self.i_s_nominal <= 0:
            raise InvalidParamsError("i_s_nominal must be positive")

    @property
    def overdrive(self) -> float:
        return self.vdd - threshold_voltage(self.temperature, self.corner)

    @property
    def beta(self) -> float:
        return 1.0 - self.v_trip_nominal / self.vdd


@dataclass(frozen=True)
class CellVariation:
    """Mismatch magnitudes; sigma_i_over_mu is quoted at the 1.0 V TT reference."""

    sigma_i_over_mu: float = CALIBRATED_SIGMA_I_OVER_MU
    sigma_vtrip: float = DEFAULT_SIGMA_VTRIP
    rng_seed: int = 0

    def __post_init__(self):
        if self.sigma_i_over_mu < 0 or self.sigma_vtrip < 0:
            raise InvalidParamsError("variation sigmas must be non-negative")


def variation_at_device(variation: CellVariation, device: DeviceParams) -> CellVariation:
    """Scale the reference current spread to the device's overdrive (sigma ~ 1/overdrive)."""
    scaled = variation.sigma_i_over_mu * REF_OVERDRIVE / device.overdrive
    return replace(variation, sigma_i_over_mu=scaled)


@dataclass(frozen=True)
class MacroGeometry:
    rows: int = 240
    cols: int = 320
    bank_cols: int = 15         # lcm(3,5): 3x3 and 5x5 patches never straddle a bank
    clear_group: int = 16       # word lines strobed per clear cycle

    def __post_init__(self):
        if min(self.rows, self.cols, self.bank_cols, self.clear_group) <= 0:
            raise InvalidParamsError(f"geometry fields must be positive: {self}")

    @property
    def n_banks(self) -> int:
        return -(-self.cols // self.bank_cols)


DEFAULT_GEOMETRY = MacroGeometry()


@dataclass
class MacroState:
    geometry: MacroGeometry
    device: DeviceParams
    bits: np.ndarray            # (rows, cols) uint8
    cell_current: np.ndarray    # (rows, cols) float64, amperes
    cell_vtrip: np.ndarray      # (rows, cols) float64, volts
    cycle_count: int = 0


@dataclass(frozen=True)
class GateCounts:
    nor3: int
    nand3: int
    dff: int = 1


@dataclass
class FilterReport:
    n: int
    flips_intended: int
    flips_unintended: int
    cycles: int                             # cycles spent by this filter pass
    rho_lambda: list[tuple[float, float]]   # per row group, mean (BL, BLB) swing fractions
    valid_frame: int                        # OR over the post-filter array


@dataclass(frozen=True)
class PatternStat:
    pattern_id: int
    trials: int
    flips: int
    ber: float


@dataclass
class BERStat:
    n: int
    k: int
    patches: int
    trials: int
    pattern_stats: list[PatternStat]
    ber: float                  # aggregate unintended flips / (patches * trials * patterns)


@dataclass(frozen=True)
class CalibrationResult:
    sigma_i_over_mu: float      # fitted reference spread
    ber_low_vdd: float
    ber_high_vdd: float
    vdd_low: float
    vdd_high: float


# ---------------------------------------------------------------------------
# lottery sampling and state construction
# ---------------------------------------------------------------------------

def sample_cell_lottery(
    shape: tuple[int, ...], device: DeviceParams, variation: CellVariation, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Draw per-cell currents then trip points from one default_rng(seed) stream."""
    rng = np.random.default_rng(seed)
    i_s = device.i_s_nominal
    sigma_i = variation.sigma_i_over_mu * i_s
    currents = rng.normal(i_s, sigma_i, size=shape)
    np.clip(currents, i_s - 4.0 * sigma_i, i_s + 4.0 * sigma_i, out=currents)
    np.maximum(currents, _CURRENT_FLOOR, out=currents)
    vtrips = rng.normal(device.v_trip_nominal, variation.sigma_vtrip, size=shape)
    np.maximum(vtrips, _VTRIP_FLOOR, out=vtrips)
    return currents, vtrips


def init_macro(
    geometry: MacroGeometry, device: DeviceParams, variation: CellVariation
) -> MacroState:
    """Fresh all-zero array with one sampled mismatch lottery (seeded, reproducible)."""
    shape = (geometry.rows, geometry.cols)
    currents, vtrips = sample_cell_lottery(shape, device, variation, variation.rng_seed)
    return MacroState(
        geometry=geometry,
        device=device,
        bits=np.zeros(shape, dtype=np.uint8),
        cell_current=currents,
        cell_vtrip=vtrips,
    )


def clear_memory(state: MacroState) -> int:
    """Zero the array, strobing clear_group word lines per cycle; returns cycles spent."""
    state.bits.fill(0)
    cycles = -(-state.geometry.rows // state.geometry.clear_group)
    state.cycle_count += cycles
    return cycles


def write_events(state: MacroState, pixels: Iterable[tuple[int, int]]) -> int:
    """Set (row, col) cells to 1, one cycle per listed pixel (duplicates idempotent)."""
    cycles = 0
    rows, cols = state.geometry.rows, state.geometry.cols
    for r, c in pixels:
        if not (0 <= r < rows and 0 <= c < cols):
            raise OutOfBoundsError(f"pixel ({r}, {c}) outside {rows}x{cols} array")
        state.bits[r, c] = 1
        cycles += 1
    state.cycle_count += cycles
    return cycles


def read_frame(state: MacroState) -> BinaryFrame:
    return BinaryFrame(state.bits.copy())


def load_frame(state: MacroState, frame: BinaryFrame) -> int:
    """clear_memory + write_events of the frame's on pixels in row-major order."""
    if frame.height != state.geometry.rows or frame.width != state.geometry.cols:
        raise DimensionMismatchError(
            f"frame {frame.width}x{frame.height} does not fit array "
            f"{state.geometry.cols}x{state.geometry.rows}"
        )
    cycles = clear_memory(state)
    rs, cs = np.nonzero(frame.pixels)
    cycles += write_events(state, zip(rs.tolist(), cs.tolist()))
    return cycles


# ---------------------------------------------------------------------------
# the race
# ---------------------------------------------------------------------------

def resolve_patch(
    patch_bits: np.ndarray,
    currents: np.ndarray,
    vtrips: np.ndarray,
    device: DeviceParams,
) -> tuple[int, float]:
    """Race one n x n patch; returns (outcome bit, dt). Uniform patches keep their value."""
    bits = np.asarray(patch_bits)
    n = bits.shape[0]
    if bits.ndim != 2 or bits.shape[0] != bits.shape[1]:
        raise DimensionMismatchError(f"patch must be square, got {bits.shape}")
    if n % 2 == 0:
        raise InvalidParamsError(f"patch side must be odd, got {n}")
    if currents.shape != bits.shape or vtrips.shape != bits.shape:
        raise DimensionMismatchError("currents/vtrips must match the patch shape")
    ones = bits.astype(bool)
    k = int(ones.sum())
    if k == 0:
        return 0, float("-inf")
    if k == n * n:
        return 1, float("inf")
    i_blb = float(currents[ones].sum())      # 1-storing cells discharge BLB
    i_bl = float(currents[~ones].sum())
    v_bl = float(vtrips[ones].mean())        # cells that flip if BL wins
    v_blb = float(vtrips[~ones].mean())
    c_bl = device.c_bl
    c_blb = device.c_bl * (1.0 + device.delta_c)
    dt = n * (c_bl * v_bl / i_bl - c_blb * v_blb / i_blb)
    return (1 if dt > 0 else 0), float(dt)


def filter_in_memory(state: MacroState, n: int, device: DeviceParams) -> FilterReport:
    """Run the in-array filter over every complete n x n patch, two cycles per row group.

    All patches of a row group race simultaneously; results overwrite the
    patches in place.  Flip counts compare the post-filter contents with the
    ideal majority decision of the pre-filter contents over the filtered
    region.  Leftover columns (cols % n) are untouched and not counted.
    """
    spec = KernelSpec(n)
    rows, cols = state.geometry.rows, state.geometry.cols
    if rows % n != 0:
        raise DimensionMismatchError(f"rows {rows} not divisible by n={n}")
    groups, per_group = rows // n, cols // n
    used = per_group * n
    nn = n * n

    bits = state.bits[:, :used].reshape(groups, n, per_group, n)
    cur = state.cell_current[:, :used].reshape(groups, n, per_group, n)
    vtr = state.cell_vtrip[:, :used].reshape(groups, n, per_group, n)
    ones = bits.astype(bool)

    k = ones.sum(axis=(1, 3))
    i_blb = np.where(ones, cur, 0.0).sum(axis=(1, 3))
    i_bl = np.where(ones, 0.0, cur).sum(axis=(1, 3))
    sum_vt_ones = np.where(ones, vtr, 0.0).sum(axis=(1, 3))
    sum_vt_zeros = np.where(ones, 0.0, vtr).sum(axis=(1, 3))
    with np.errstate(divide="ignore", invalid="ignore"):
        v_bl = sum_vt_ones / k
        v_blb = sum_vt_zeros / (nn - k)
        dt = n * (
            device.c_bl * v_bl / i_bl
            - device.c_bl * (1.0 + device.delta_c) * v_blb / i_blb
        )
    outcome = np.where(k == 0, 0, np.where(k == nn, 1, dt > 0)).astype(np.uint8)
    ideal = (k >= spec.threshold).astype(np.uint8)

    pre = state.bits[:, :used].copy()
    out_px = outcome.repeat(n, axis=0).repeat(n, axis=1)
    state.bits[:, :used] = out_px
    ideal_px = ideal.repeat(n, axis=0).repeat(n, axis=1)
    flips_intended = int(np.count_nonzero(pre != ideal_px))
    flips_unintended = int(np.count_nonzero(out_px != ideal_px))

    # Swing bookkeeping: the winning line discharges fully; the losing line got
    # beta * minority/majority of the way before the race ended.
    minority = np.minimum(k, nn - k)
    majority = np.maximum(k, nn - k)
    frac = device.beta * minority / majority
    rho = np.where(outcome == 1, frac, 1.0)
    lam = np.where(outcome == 1, 1.0, frac)
    rho_lambda = list(zip(rho.mean(axis=1).tolist(), lam.mean(axis=1).tolist()))

    cycles = 2 * groups
    state.cycle_count += cycles
    return FilterReport(
        n=n,
        flips_intended=flips_intended,
        flips_unintended=flips_unintended,
        cycles=cycles,
        rho_lambda=rho_lambda,
        valid_frame=int(state.bits.any()),
    )


# ---------------------------------------------------------------------------
# valid-frame sensing and the transmission-gate budget
# ---------------------------------------------------------------------------

def _gate_series(width: int, n: int, first_level: int) -> int:
    # 3-input gates reduce width/n shorted bit-line groups; levels alternate
    # NOR/NAND, so each gate type occupies every other level.  A series ends
    # with its first single-gate level.
    total, level = 0, first_level
    while True:
        t = math.ceil(width / (3**level * n))
        total += t
        if t <= 1:
            return total
        level += 2


def valid_frame_gate_counts(width: int, n: int) -> GateCounts:
    """Gate budget of the OR-reduction tree sensing `width` bit lines."""
    return GateCounts(nor3=_gate_series(width, n, 1), nand3=_gate_series(width, n, 2))


def valid_frame_detect(
    report: FilterReport, geometry: MacroGeometry
) -> tuple[int, GateCounts]:
    """Valid-frame bit of a filter pass plus the gate budget of the detector."""
    return report.valid_frame, valid_frame_gate_counts(geometry.cols, report.n)


def tg_resistance_bound(device: DeviceParams, n: int) -> float:
    """Largest transmission-gate resistance keeping R_tg*C_BL within the margin.

    Budget: R_tg * C_BL <= TG_MARGIN * C_BL * vdd / (n * i_s); C_BL cancels.
    """
    return TG_MARGIN * device.vdd / (n * device.i_s_nominal)


def check_tg_criterion(device: DeviceParams, n: int) -> bool:
    return device.r_tg <= tg_resistance_bound(device, n)


# ---------------------------------------------------------------------------
# characterization
# ---------------------------------------------------------------------------

def macro_patch_count(geometry: MacroGeometry, n: int, banked: bool = False) -> int:
    """Complete n x n patches per array: flat column tiling, or per-bank tiling
    counting every bank at its nominal width."""
    groups = geometry.rows // n
    if banked:
        return groups * geometry.n_banks * (geometry.bank_cols // n)
    return groups * (geometry.cols // n)


def pattern_to_patch(pattern_id: int, n: int) -> np.ndarray:
    """Decode a bitmask pattern id (bit i = cell (i // n, i % n)) to an n x n array."""
    if not 0 <= pattern_id < 1 << (n * n):
        raise InvalidParamsError(f"pattern id {pattern_id} out of range for n={n}")
    bits = (pattern_id >> np.arange(n * n)) & 1
    return bits.astype(np.uint8).reshape(n, n)


def _all_pattern_ids(n: int, k: int) -> list[int]:
    return [sum(1 << p for p in pos) for pos in combinations(range(n * n), k)]


def _sample_pattern_ids(n: int, k: int, m: int, seed: int) -> list[int]:
    rng = np.random.default_rng([seed, n, k])
    seen: set[int] = set()
    out: list[int] = []
    while len(out) < m:
        pos = rng.choice(n * n, size=k, replace=False)
        pid = int(sum(1 << int(p) for p in pos))
        if pid not in seen:
            seen.add(pid)
            out.append(pid)
        if len(seen) >= math.comb(n * n, k):
            break
    return sorted(out)


def ber_pattern_sweep(
    n: int,
    k: int,
    device: DeviceParams,
    variation: CellVariation,
    trials: int = 8,
    patterns: Literal["all"] | int | Sequence[int] = 16,
    geometry: MacroGeometry = DEFAULT_GEOMETRY,
) -> BERStat:
    """Fill every complete patch of the array with a k-ones pattern and measure
    unintended flips against the majority decision, resampling the mismatch
    lottery each trial (seed = rng_seed + pattern_index * trials + trial).

    `patterns` is "all" (every C(n^2, k) placement), a sample size, or explicit
    pattern ids.  BER is unintended flips / (patches * trials), so a fully
    wrong patch contributes n^2.
    """
    if not 0 <= k <= n * n:
        raise InvalidParamsError(f"k={k} impossible for n={n}")
    if trials <= 0:
        raise InvalidParamsError("trials must be positive")
    if patterns == "all":
        ids = _all_pattern_ids(n, k)
    elif isinstance(patterns, int):
        ids = _sample_pattern_ids(n, k, min(patterns, math.comb(n * n, k)), variation.rng_seed)
    else:
        ids = sorted(int(p) for p in patterns)
    groups, per_group = geometry.rows // n, geometry.cols // n
    used = per_group * n
    patches = macro_patch_count(geometry, n)

    stats: list[PatternStat] = []
    total_flips = 0
    for pi, pid in enumerate(ids):
        patch = pattern_to_patch(pid, n)
        if int(patch.sum()) != k:
            raise InvalidParamsError(f"pattern {pid} has {int(patch.sum())} ones, expected {k}")
        tiled = np.tile(patch, (groups, per_group))
        flips = 0
        for t in range(trials):
            seed = variation.rng_seed + pi * trials + t
            state = init_macro(geometry, device, replace(variation, rng_seed=seed))
            state.bits[:, :used] = tiled
            report = filter_in_memory(state, n, device)
            flips += report.flips_unintended
        total_flips += flips
        stats.append(PatternStat(pid, trials, flips, flips / (patches * trials)))
    agg = total_flips / (patches * trials * len(ids))
    return BERStat(n=n, k=k, patches=patches, trials=trials, pattern_stats=stats, ber=agg)


def patch_error_trials(
    pattern: np.ndarray,
    device: DeviceParams,
    variation: CellVariation,
    trials: int,
    seed: int | None = None,
) -> np.ndarray:
    """Monte-Carlo a single patch; returns a bool array, True where the race
    disagreed with the majority vote.

    Batch form of the per-trial lottery: currents are drawn as one
    (trials, n, n) block, then trip points as another, from default_rng(seed)
    (default variation.rng_seed), so the stream is reproducible.
    """
    patch = np.asarray(pattern, dtype=np.uint8)
    n = patch.shape[0]
    spec = KernelSpec(n)
    k = int(patch.sum())
    expected = 1 if k >= spec.threshold else 0
    cur, vtr = sample_cell_lottery(
        (trials, n, n), device, variation, variation.rng_seed if seed is None else seed
    )
    ones = patch.astype(bool)
    if k == 0 or k == n * n:
        return np.zeros(trials, dtype=bool)
    i_blb = cur[:, ones].sum(axis=1)
    i_bl = cur[:, ~ones].sum(axis=1)
    v_bl = vtr[:, ones].mean(axis=1)
    v_blb = vtr[:, ~ones].mean(axis=1)
    dt = n * (
        device.c_bl * v_bl / i_bl
        - device.c_bl * (1.0 + device.delta_c) * v_blb / i_blb
    )
    outcome = (dt > 0).astype(np.uint8)
    return outcome != expected


# ---------------------------------------------------------------------------
# image-level BER and calibration
# ---------------------------------------------------------------------------

def measure_image_ber(
    frames: Sequence[BinaryFrame],
    device: DeviceParams,
    variation: CellVariation,
    n: int = 3,
) -> float:
    """Mean fraction of pixels where the in-array filter disagrees with the
    ideal majority filter, with a fresh lottery per frame (rng_seed + index).

    `variation` is the reference spread; it is scaled to the device's
    overdrive here.
    """
    if not frames:
        raise InvalidParamsError("need at least one frame")
    eff = variation_at_device(variation, device)
    total_flips = 0
    total_px = 0
    for idx, frame in enumerate(frames):
        geom = MacroGeometry(rows=frame.height, cols=frame.width)
        state = init_macro(geom, device, replace(eff, rng_seed=eff.rng_seed + idx))
        state.bits[:, :] = frame.pixels
        report = filter_in_memory(state, n, device)
        total_flips += report.flips_unintended
        total_px += frame.width * frame.height
    return total_flips / total_px


def calibrate_current_sigma(
    frames: Sequence[BinaryFrame],
    device_low: DeviceParams,
    device_high: DeviceParams,
    variation: CellVariation,
    target_ber: float = 2e-4,
    sigma_bounds: tuple[float, float] = (2e-3, 0.5),
    iters: int = 18,
    n: int = 3,
) -> CalibrationResult:
    """Fit the reference sigma_i_over_mu so the low-supply image BER hits
    target_ber on `frames`, then report the high-supply BER on the same seeds.

    Image BER is monotone in the spread, so a log-space bisection suffices.
    """
    lo, hi = sigma_bounds
    if not 0 < lo < hi:
        raise InvalidParamsError(f"bad sigma bounds {sigma_bounds}")

    def ber_at(sigma: float) -> float:
        return measure_image_ber(frames, device_low, replace(variation, sigma_i_over_mu=sigma), n)

    for _ in range(iters):
        mid = math.sqrt(lo * hi)
        if ber_at(mid) < target_ber:
            lo = mid
        else:
            hi = mid
    fitted = math.sqrt(lo * hi)
    fitted_var = replace(variation, sigma_i_over_mu=fitted)
    return CalibrationResult(
        sigma_i_over_mu=fitted,
        ber_low_vdd=measure_image_ber(frames, device_low, fitted_var, n),
        ber_high_vdd=measure_image_ber(frames, device_high, fitted_var, n),
        vdd_low=device_low.vdd,
        vdd_high=device_high.vdd,
    )
