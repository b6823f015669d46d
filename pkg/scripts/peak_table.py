"""Print the sideband maxima of the field and photon-number spectra for
the five preset curves, plus the photon/field frequency ratio."""
import argparse

import numpy as np

from oscillator_laser.checks import local_maxima
from oscillator_laser.experiments import PUMP_FIELD, SR_RATIOS_FIELD, preset_params
from oscillator_laser.spectra import field_spectrum_values, photon_fluctuation_values
from oscillator_laser.steady_state import solve_operating_point


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pump", type=float, default=PUMP_FIELD)
    ap.add_argument("--omega-max", type=float, default=1000.0)
    args = ap.parse_args()
    w = np.linspace(0.0, args.omega_max, 40001)
    print(f"{'2k/g_perp':>9} {'n':>8} {'field peak':>11} {'photon peak':>12} {'ratio':>6}")
    for k, ratio in enumerate(SR_RATIOS_FIELD, start=1):
        p = preset_params(args.pump, sr_ratio=ratio)
        s = solve_operating_point(p)
        fw, _ = local_maxima(w, field_spectrum_values(s, p, w))
        pw, ph = local_maxima(w, photon_fluctuation_values(s, p, w))
        f = fw[0] if fw.size else np.nan
        q = pw[np.argmax(ph)] if pw.size else np.nan
        print(f"{str(ratio):>9} {s.n:8.4f} {f:11.2f} {q:12.2f} {q / f:6.3f}")


if __name__ == "__main__":
    main()
