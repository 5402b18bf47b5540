#!/usr/bin/env python3
"""Run the default 20 MHz OFDM experiment and print the stage report."""

import argparse
from pathlib import Path

from fdsic.config import load_config
from fdsic.harness import run_simulate

REPO = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(REPO / "configs" / "ofdm_20mhz.cfg"))
    args = ap.parse_args()

    cfg = load_config(args.config)
    report = run_simulate(cfg)
    print(f"tx power            : {report.tx_power_db:8.2f} dB")
    print(f"post-RF residual    : {report.rf_residual_db:8.2f} dB")
    print(f"post-digital        : {report.digital_residual_db:8.2f} dB")
    print(f"RF cancellation     : {report.rf_cancellation_db:8.2f} dB")
    print(f"digital cancellation: {report.digital_cancellation_db:8.2f} dB")
    print(f"total cancellation  : {report.total_db:8.2f} dB")
    print(f"residual slope fit  : R^2={report.slope_r2:.3f}, "
          f"{report.slope_db_per_decade:.1f} dB/decade")
    print(f"outputs in {cfg.output_dir}/")


if __name__ == "__main__":
    main()
