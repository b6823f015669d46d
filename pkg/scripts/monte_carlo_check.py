"""Monte Carlo Welch spectra of the binary fluctuation system against the
closed forms, bin by bin."""
import argparse

import numpy as np

from oscillator_laser import langevin, spectra
from oscillator_laser.experiments import preset_params
from oscillator_laser.steady_state import solve_operating_point


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pump", type=float, default=0.7)
    ap.add_argument("--gamma-perp", type=float, default=50.0)
    ap.add_argument("--trajectories", type=int, default=400)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--dt", type=float, default=5e-5)
    ap.add_argument("--segment", type=int, default=2000)
    ap.add_argument("--segments", type=int, default=15)
    args = ap.parse_args()

    p = preset_params(args.pump, gamma_perp=args.gamma_perp)
    s = solve_operating_point(p)
    system = langevin.build_binary_system(s, p)
    band = langevin.slowest_decay_rate(system)
    steps = args.segment * (args.segments + 1) // 2 * 10
    ens = langevin.simulate_time_domain(system, args.dt, steps, args.trajectories, args.seed,
                                        record_every=10, channels=("n", "sigma"))
    for channel, closed in (("n", spectra.photon_fluctuation_values), ("sigma", spectra.sigma_fluctuation_values)):
        est = langevin.welch_spectrum(ens, args.segment, channel=channel)
        keep = est.omega <= band
        exact = closed(s, p, est.omega[keep])
        print(f"channel {channel}: central band |omega| <= {band:.1f}")
        print(f"{'omega':>8} {'estimate':>12} {'exact':>12} {'rel':>7} {'z':>6}")
        for w, v, e, se in zip(est.omega[keep], est.values[keep], exact, est.stderr[keep]):
            print(f"{w:8.2f} {v:12.5g} {e:12.5g} {v / e - 1:7.3f} {(v - e) / se:6.2f}")


if __name__ == "__main__":
    main()
