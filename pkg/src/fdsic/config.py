"""Experiment configuration: dataclass plus flat INI-style file parsing.

The file format is plain key = value lines under [section] headers, so any
language's standard config parsing can read and write it.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .channel import (ChannelTap, MultipathChannel, PathLossModel,
                      ReceiverImpairments, taps_from_geometry)
from .signals import SignalSpec

DEFAULT_CARRIER_HZ = 2.395e9


@dataclass(frozen=True)
class ChannelConfig:
    """Channel description: explicit taps and/or reflector geometry."""

    carrier_hz: float = DEFAULT_CARRIER_HZ
    tx_gain_db: float = 0.0
    taps_db_ns: tuple = ()           # (gain_db, delay_ns) pairs
    reflector_distances_m: tuple = (0.125, 0.30)
    circulator_gain_db: float = -18.0
    circulator_delay_ns: float = 0.5
    pathloss_cap_db: float = -20.0
    pathloss_alpha: float = 4.0
    pathloss_calib_distance_m: float = 0.25
    pathloss_calib_db: float = -30.0

    def path_loss_model(self) -> PathLossModel:
        return PathLossModel.calibrated(cap_db=self.pathloss_cap_db,
                                        ref_distance_m=self.pathloss_calib_distance_m,
                                        ref_loss_db=self.pathloss_calib_db,
                                        alpha=self.pathloss_alpha)

    def build(self) -> MultipathChannel:
        tx_gain = 10.0 ** (self.tx_gain_db / 10.0)
        if self.taps_db_ns:
            taps = tuple(ChannelTap(gain=10.0 ** (g_db / 20.0), delay_s=d_ns * 1e-9)
                         for g_db, d_ns in self.taps_db_ns)
            return MultipathChannel(taps=taps, carrier_hz=self.carrier_hz,
                                    tx_gain=tx_gain)
        extra = ()
        if self.circulator_gain_db is not None:
            extra = (ChannelTap(gain=10.0 ** (self.circulator_gain_db / 20.0),
                                delay_s=self.circulator_delay_ns * 1e-9),)
        return taps_from_geometry(self.reflector_distances_m,
                                  self.path_loss_model(), self.carrier_hz,
                                  extra_taps=extra, tx_gain=tx_gain)


@dataclass(frozen=True)
class ExperimentConfig:
    signal: SignalSpec = field(default_factory=SignalSpec)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    impairments: ReceiverImpairments = field(default_factory=ReceiverImpairments)
    vm_bits: int = 16
    detector_window: int = 16384
    tune_budget: int = 1200
    digital_order: int = 2
    train_len: int = 4096
    output_dir: str = "out"
    seed: int = 1

    def __post_init__(self):
        if self.digital_order not in (1, 2):
            raise ValueError("digital_order must be 1 or 2")
        if self.train_len < 100:
            raise ValueError("train_len too short")
        if self.tune_budget <= 0:
            raise ValueError("tune_budget must be positive")


def _parse_taps(text: str) -> tuple:
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        g_db, d_ns = item.split(":")
        pairs.append((float(g_db), float(d_ns)))
    return tuple(pairs)


def load_config(path) -> ExperimentConfig:
    """Read an ExperimentConfig from a flat key=value file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    text = Path(path).read_text()
    parser.read_string(text)

    sig = parser["signal"] if parser.has_section("signal") else {}
    spec = SignalSpec(
        kind=sig.get("kind", "ofdm"),
        bandwidth_hz=float(sig.get("bandwidth_hz", 20e6)),
        oversampling=int(sig.get("oversampling", 4)),
        num_symbols=int(sig.get("num_symbols", 12)),
        constellation=sig.get("constellation", "qpsk4"),
        pulse=sig.get("pulse", "rrc"),
        rolloff=float(sig.get("rolloff", 0.3)),
        ofdm_fft_size=int(sig.get("ofdm_fft_size", 1024)),
        ofdm_used_carriers=int(sig.get("ofdm_used_carriers", 620)),
        seed=int(sig.get("seed", 0)),
    )

    chn = parser["channel"] if parser.has_section("channel") else {}
    circ_gain = chn.get("circulator_gain_db", "-18")
    channel = ChannelConfig(
        carrier_hz=float(chn.get("carrier_hz", DEFAULT_CARRIER_HZ)),
        tx_gain_db=float(chn.get("tx_gain_db", 0.0)),
        taps_db_ns=_parse_taps(chn.get("taps", "")),
        reflector_distances_m=tuple(
            float(v) for v in chn.get("reflector_distances_m", "0.125, 0.30").split(",") if v.strip()),
        circulator_gain_db=None if circ_gain.strip().lower() == "none" else float(circ_gain),
        circulator_delay_ns=float(chn.get("circulator_delay_ns", 0.5)),
        pathloss_cap_db=float(chn.get("pathloss_cap_db", -20.0)),
        pathloss_alpha=float(chn.get("pathloss_alpha", 4.0)),
        pathloss_calib_distance_m=float(chn.get("pathloss_calib_distance_m", 0.25)),
        pathloss_calib_db=float(chn.get("pathloss_calib_db", -30.0)),
    )

    imp = parser["impairments"] if parser.has_section("impairments") else {}
    impairments = ReceiverImpairments(
        noise_power=float(imp.get("noise_power", 0.0)),
        adc_bits=int(imp.get("adc_bits", 0)),
        sample_offset=float(imp.get("sample_offset", 0.0)),
    )

    rf = parser["rf"] if parser.has_section("rf") else {}
    dig = parser["digital"] if parser.has_section("digital") else {}
    run = parser["run"] if parser.has_section("run") else {}
    return ExperimentConfig(
        signal=spec,
        channel=channel,
        impairments=impairments,
        vm_bits=int(rf.get("vm_bits", 16)),
        detector_window=int(rf.get("detector_window", 16384)),
        tune_budget=int(rf.get("tune_budget", 1200)),
        digital_order=int(dig.get("order", 2)),
        train_len=int(dig.get("train_len", 4096)),
        output_dir=run.get("output_dir", "out"),
        seed=int(run.get("seed", 1)),
    )


def save_config(cfg: ExperimentConfig, path) -> None:
    """Write a config back out as a flat key=value file."""
    lines = [
        "[signal]",
        f"kind = {cfg.signal.kind}",
        f"bandwidth_hz = {cfg.signal.bandwidth_hz:.0f}",
        f"oversampling = {cfg.signal.oversampling}",
        f"num_symbols = {cfg.signal.num_symbols}",
        f"constellation = {cfg.signal.constellation}",
        f"pulse = {cfg.signal.pulse}",
        f"rolloff = {cfg.signal.rolloff}",
        f"ofdm_fft_size = {cfg.signal.ofdm_fft_size}",
        f"ofdm_used_carriers = {cfg.signal.ofdm_used_carriers}",
        f"seed = {cfg.signal.seed}",
        "",
        "[channel]",
        f"carrier_hz = {cfg.channel.carrier_hz:.0f}",
        f"tx_gain_db = {cfg.channel.tx_gain_db}",
    ]
    if cfg.channel.taps_db_ns:
        taps = ", ".join(f"{g}:{d}" for g, d in cfg.channel.taps_db_ns)
        lines.append(f"taps = {taps}")
    else:
        lines += [
            "reflector_distances_m = " + ", ".join(str(d) for d in cfg.channel.reflector_distances_m),
            f"circulator_gain_db = {cfg.channel.circulator_gain_db}",
            f"circulator_delay_ns = {cfg.channel.circulator_delay_ns}",
            f"pathloss_cap_db = {cfg.channel.pathloss_cap_db}",
            f"pathloss_alpha = {cfg.channel.pathloss_alpha}",
            f"pathloss_calib_distance_m = {cfg.channel.pathloss_calib_distance_m}",
            f"pathloss_calib_db = {cfg.channel.pathloss_calib_db}",
        ]
    lines += [
        "",
        "[impairments]",
        f"noise_power = {cfg.impairments.noise_power}",
        f"adc_bits = {cfg.impairments.adc_bits}",
        f"sample_offset = {cfg.impairments.sample_offset}",
        "",
        "[rf]",
        f"vm_bits = {cfg.vm_bits}",
        f"detector_window = {cfg.detector_window}",
        f"tune_budget = {cfg.tune_budget}",
        "",
        "[digital]",
        f"order = {cfg.digital_order}",
        f"train_len = {cfg.train_len}",
        "",
        "[run]",
        f"output_dir = {cfg.output_dir}",
        f"seed = {cfg.seed}",
        "",
    ]
    Path(path).write_text("\n".join(lines))
