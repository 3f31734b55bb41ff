"""Physical scenario: radio parameters, per-link path losses, IRS geometries.

Everything downstream works in linear scale; this module owns the dB/Hz/meter
bookkeeping and the flat key-value configuration schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .correlation import IrsGeometry

SPEED_OF_LIGHT = 299792458.0

#: Reference gain of the power-law path loss at 1 m, in dB.
DEFAULT_REF_GAIN_DB = -30.0


class ConfigError(ValueError):
    """Raised when a configuration source is missing or inconsistent."""


class ThresholdMode(Enum):
    SNR_DIRECT = "snr"
    TARGET_RATE = "rate"


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0:
        raise ValueError(f"cannot convert non-positive value {value} to dB")
    import math

    return 10.0 * math.log10(value)


def pathloss_from_distance(distance_m: float, exponent: float,
                           ref_gain_db: float = DEFAULT_REF_GAIN_DB) -> float:
    """Linear power gain of a power-law path loss: G_ref * d^-alpha."""
    if distance_m <= 0:
        raise ValueError(f"distance must be positive, got {distance_m}")
    return db_to_linear(ref_gain_db) * distance_m ** (-exponent)


def threshold_to_snr(threshold: float, mode: ThresholdMode) -> float:
    """Map a coverage threshold to a linear SNR value.

    TARGET_RATE interprets `threshold` as a rate in b/s/Hz and returns
    2^threshold - 1; SNR_DIRECT passes the value through.
    """
    if threshold < 0:
        raise ValueError(f"threshold must be non-negative, got {threshold}")
    if mode is ThresholdMode.TARGET_RATE:
        return 2.0 ** threshold - 1.0
    return float(threshold)


def snr_to_threshold(tau: float, mode: ThresholdMode) -> float:
    """Inverse of threshold_to_snr (used when emitting rate grids)."""
    if tau < 0:
        raise ValueError(f"snr must be non-negative, got {tau}")
    if mode is ThresholdMode.TARGET_RATE:
        import math

        return math.log2(1.0 + tau)
    return float(tau)


@dataclass(frozen=True)
class RadioParams:
    carrier_hz: float = 3e9
    bandwidth_hz: float = 10e6
    tx_power_dbm: float = 43.0
    noise_dbm: float = -94.0

    def __post_init__(self):
        if self.carrier_hz <= 0:
            raise ValueError("carrier_hz must be positive")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def transmit_snr(self) -> float:
        """Average transmit SNR (linear): tx power over noise power."""
        return db_to_linear(self.tx_power_dbm - self.noise_dbm)


@dataclass(frozen=True)
class LinkPathLoss:
    """Linear power gains of the five links, plus the numbers they came from.

    Gains: t1 (Tx to IRS 1), 12 (IRS 1 to IRS 2), 2r (IRS 2 to Rx),
    1r (IRS 1 to Rx), t2 (Tx to IRS 2).
    """

    beta_t1: float
    beta_12: float
    beta_2r: float
    beta_1r: float
    beta_t2: float
    r_t1_m: float = 1.0
    r_12_m: float = 100.0
    r_2r_m: float = 15.0
    r_1r_m: float = 100.0
    r_t2_m: float = 100.0

    def __post_init__(self):
        for name in ("beta_t1", "beta_12", "beta_2r", "beta_1r", "beta_t2"):
            b = getattr(self, name)
            if not 0.0 < b <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {b}")
        for name in ("r_t1_m", "r_12_m", "r_2r_m", "r_1r_m", "r_t2_m"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Scenario:
    radio: RadioParams
    pathloss: LinkPathLoss
    irs1_geometry: IrsGeometry
    irs2_geometry: IrsGeometry
    threshold_mode: ThresholdMode = ThresholdMode.TARGET_RATE

    @property
    def n_total(self) -> int:
        return self.irs1_geometry.n_elements + self.irs2_geometry.n_elements

    def threshold_to_snr(self, threshold: float) -> float:
        return threshold_to_snr(threshold, self.threshold_mode)


# Flat key-value configuration schema. Values are the defaults; the link
# distances/exponents follow the reference deployment (Tx 1 m from IRS 1,
# 100 m inter-IRS hop, Rx 15 m from IRS 2, single-reflection links spanning
# roughly the inter-IRS gap).
_CONFIG_DEFAULTS = {
    "carrier_hz": 3e9,
    "bandwidth_hz": 10e6,
    "tx_power_dbm": 43.0,
    "noise_dbm": -94.0,
    "r_t1_m": 1.0,
    "r_12_m": 100.0,
    "r_2r_m": 15.0,
    "r_1r_m": 100.0,
    "r_t2_m": 100.0,
    "alpha_t1": 2.2,
    "alpha_12": 3.0,
    "alpha_2r": 2.2,
    "alpha_1r": 2.2,
    "alpha_t2": 3.0,
    "ref_gain_db": DEFAULT_REF_GAIN_DB,
    "ref_gain_db_t1": None,
    "ref_gain_db_12": None,
    "ref_gain_db_2r": None,
    "ref_gain_db_1r": None,
    "ref_gain_db_t2": None,
    "n1": 32,
    "n2": 32,
    "n_h1": None,
    "n_h2": None,
    "element_spacing_over_lambda": 0.125,
    "threshold_mode": "rate",
}


def _grid_shape(n_elements: int, n_h: int | None, key: str) -> tuple[int, int]:
    if n_h is None:
        # largest divisor not exceeding sqrt(N) gives the squarest grid
        n_h = max(d for d in range(1, int(n_elements ** 0.5) + 1)
                  if n_elements % d == 0)
    n_h = int(n_h)
    if n_h < 1 or n_elements % n_h != 0:
        raise ConfigError(f"{key}={n_h} does not divide the element count {n_elements}")
    return n_h, n_elements // n_h


def build_scenario(config_source: dict | str | Path | None = None) -> Scenario:
    """Build a Scenario from a flat key-value config (dict, JSON text, or path).

    Missing keys fall back to the defaults above; unknown keys raise
    ConfigError naming the offending key.
    """
    if config_source is None:
        raw: dict = {}
    elif isinstance(config_source, dict):
        raw = dict(config_source)
    else:
        text = Path(config_source).read_text() if Path(str(config_source)).exists() \
            else str(config_source)
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a flat JSON object")

    unknown = set(raw) - set(_CONFIG_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = {**_CONFIG_DEFAULTS, **raw}

    radio = RadioParams(
        carrier_hz=float(cfg["carrier_hz"]),
        bandwidth_hz=float(cfg["bandwidth_hz"]),
        tx_power_dbm=float(cfg["tx_power_dbm"]),
        noise_dbm=float(cfg["noise_dbm"]),
    )

    base_ref = float(cfg["ref_gain_db"])

    def link_gain(link: str, dist_key: str, alpha_key: str) -> float:
        ref = cfg[f"ref_gain_db_{link}"]
        ref = base_ref if ref is None else float(ref)
        try:
            return pathloss_from_distance(float(cfg[dist_key]), float(cfg[alpha_key]), ref)
        except ValueError as exc:
            raise ConfigError(f"invalid path loss for link '{link}': {exc}") from exc

    pathloss = LinkPathLoss(
        beta_t1=link_gain("t1", "r_t1_m", "alpha_t1"),
        beta_12=link_gain("12", "r_12_m", "alpha_12"),
        beta_2r=link_gain("2r", "r_2r_m", "alpha_2r"),
        beta_1r=link_gain("1r", "r_1r_m", "alpha_1r"),
        beta_t2=link_gain("t2", "r_t2_m", "alpha_t2"),
        r_t1_m=float(cfg["r_t1_m"]),
        r_12_m=float(cfg["r_12_m"]),
        r_2r_m=float(cfg["r_2r_m"]),
        r_1r_m=float(cfg["r_1r_m"]),
        r_t2_m=float(cfg["r_t2_m"]),
    )

    lam = radio.wavelength
    spacing = float(cfg["element_spacing_over_lambda"]) * lam
    if spacing <= 0:
        raise ConfigError("element_spacing_over_lambda must be positive")

    n1 = int(cfg["n1"])
    n2 = int(cfg["n2"])
    if n1 < 1 or n2 < 1:
        raise ConfigError("n1 and n2 must be at least 1")
    h1, v1 = _grid_shape(n1, cfg["n_h1"], "n_h1")
    h2, v2 = _grid_shape(n2, cfg["n_h2"], "n_h2")
    irs1 = IrsGeometry(n_h=h1, n_v=v1, d_h=spacing, d_v=spacing, wavelength=lam)
    irs2 = IrsGeometry(n_h=h2, n_v=v2, d_h=spacing, d_v=spacing, wavelength=lam)

    mode_key = str(cfg["threshold_mode"]).lower()
    try:
        mode = {m.value: m for m in ThresholdMode}[mode_key]
    except KeyError:
        raise ConfigError(
            f"threshold_mode must be one of {[m.value for m in ThresholdMode]}, "
            f"got {cfg['threshold_mode']!r}")

    return Scenario(radio=radio, pathloss=pathloss,
                    irs1_geometry=irs1, irs2_geometry=irs2, threshold_mode=mode)


def scenario_config_echo(scenario: Scenario) -> dict:
    """Fully resolved flat view of a scenario, for result-file metadata."""
    return {
        "carrier_hz": scenario.radio.carrier_hz,
        "bandwidth_hz": scenario.radio.bandwidth_hz,
        "tx_power_dbm": scenario.radio.tx_power_dbm,
        "noise_dbm": scenario.radio.noise_dbm,
        "beta_t1": scenario.pathloss.beta_t1,
        "beta_12": scenario.pathloss.beta_12,
        "beta_2r": scenario.pathloss.beta_2r,
        "beta_1r": scenario.pathloss.beta_1r,
        "beta_t2": scenario.pathloss.beta_t2,
        "n1": scenario.irs1_geometry.n_elements,
        "n2": scenario.irs2_geometry.n_elements,
        "n_h1": scenario.irs1_geometry.n_h,
        "n_h2": scenario.irs2_geometry.n_h,
        "spacing_over_lambda": scenario.irs1_geometry.d_h / scenario.radio.wavelength,
        "threshold_mode": scenario.threshold_mode.value,
    }
