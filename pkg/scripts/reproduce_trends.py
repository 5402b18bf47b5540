#!/usr/bin/env python3
"""Reproduce the headline experimental trends as CSV files:

  - RF cancellation versus bandwidth (full channel and circulator-only)
  - RF/digital cancellation versus transmit power, with the per-term split
  - residual spectra before/after each stage for OFDM and single-carrier
"""

import argparse
import dataclasses
from pathlib import Path

from fdsic.config import ChannelConfig, load_config
from fdsic.harness import run_simulate, run_sweep_bandwidth, run_sweep_power

REPO = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="trends_out")
    ap.add_argument("--quick", action="store_true",
                    help="coarser power grid for a fast run")
    args = ap.parse_args()

    base = load_config(REPO / "configs" / "ofdm_20mhz.cfg")
    out = Path(args.out)

    bws = [5e6, 10e6, 15e6, 20e6]
    cfg_bw = dataclasses.replace(base, output_dir=str(out / "bandwidth_full"))
    rows = run_sweep_bandwidth(cfg_bw, bws)
    print("RF cancellation vs bandwidth (full channel):")
    for bw, rf_db, _, _ in rows:
        print(f"  {bw/1e6:5.0f} MHz : {rf_db:6.2f} dB")

    circ_only = ChannelConfig(reflector_distances_m=())
    cfg_co = dataclasses.replace(base, channel=circ_only,
                                 output_dir=str(out / "bandwidth_circulator"))
    rows_co = run_sweep_bandwidth(cfg_co, bws)
    print("RF cancellation vs bandwidth (circulator only):")
    for bw, rf_db, _, _ in rows_co:
        print(f"  {bw/1e6:5.0f} MHz : {rf_db:6.2f} dB")

    powers = list(range(-10, 20, 5)) if args.quick else list(range(-10, 20))
    cfg_pw = dataclasses.replace(base, output_dir=str(out / "power"))
    run_sweep_power(cfg_pw, powers)
    print(f"power sweep written to {out / 'power' / 'power_sweep.csv'}")

    for name in ("ofdm_20mhz", "single_carrier_10mhz"):
        cfg = load_config(REPO / "configs" / f"{name}.cfg")
        cfg = dataclasses.replace(cfg, output_dir=str(out / name))
        report = run_simulate(cfg)
        print(f"{name}: rf={report.rf_cancellation_db:.2f} dB "
              f"total={report.total_db:.2f} dB slope R^2={report.slope_r2:.3f}")


if __name__ == "__main__":
    main()
