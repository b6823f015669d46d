"""Population variance and its two parts versus pump, with and without
superradiance, and the relative gap between the two totals."""
import argparse

import numpy as np

from oscillator_laser.experiments import SR_RATIOS_POPULATION, preset_params
from oscillator_laser.spectra import population_variance_decomposition
from oscillator_laser.steady_state import solve_operating_point


def decompose(pump, ratio):
    p = preset_params(pump, sr_ratio=ratio)
    return population_variance_decomposition(solve_operating_point(p), p)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--stop", type=float, default=3.0)
    ap.add_argument("--step", type=float, default=0.1)
    args = ap.parse_args()
    sr, non_sr = SR_RATIOS_POPULATION
    print("pump,total_sr,pump_decay_sr,field_sr,total_non_sr,pump_decay_non_sr,field_non_sr,rel_gap")
    for pump in np.arange(args.step, args.stop + 1e-9, args.step):
        a, b = decompose(pump, sr), decompose(pump, non_sr)
        gap = a.total / b.total - 1
        print(f"{pump:.2f},{a.total:.6g},{a.pump_decay_part:.6g},{a.field_polarization_part:.6g},"
              f"{b.total:.6g},{b.pump_decay_part:.6g},{b.field_polarization_part:.6g},{gap:.4f}")


if __name__ == "__main__":
    main()
