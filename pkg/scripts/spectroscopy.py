"""Compare FFT lines of small-amplitude trajectories with the linearised normal-mode frequencies.

    python scripts/spectroscopy.py --lambda 0.6 --mode zero
"""
import argparse
import sys

from bjjmix import IntegratorConfig, Mode, ModelParams, State, integrate, normal_mode_frequencies
from bjjmix.spectral import peak_frequencies


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambda", dest="Lambda", type=float, default=0.6)
    ap.add_argument("--ratio", type=float, default=2.13)
    ap.add_argument("--K-a", type=float, default=1.0)
    ap.add_argument("--mode", choices=[m.value for m in Mode], default="zero")
    ap.add_argument("--amplitude", type=float, default=0.01)
    ap.add_argument("--t-end", type=float, default=500.0)
    args = ap.parse_args(argv)

    mode = Mode(args.mode)
    p = ModelParams(K_a=args.K_a, Lambda_a=args.Lambda, Lambda_b=args.Lambda, Lambda_ab=args.ratio * args.Lambda)
    r = normal_mode_frequencies(p, mode)
    if not r.stable:
        print(f"{mode.value} mode unstable: omega^2 = ({r.omega_sq_plus:.5g}, {r.omega_sq_minus:.5g})")
        return 1
    tr = integrate(p, State(args.amplitude, 0.0, mode.phase, mode.phase), IntegratorConfig(t_end=args.t_end))
    peaks = peak_frequencies(tr.Z_a, tr.times[1] - tr.times[0])
    for w, f in zip(sorted([r.omega_minus, r.omega_plus]), peaks):
        print(f"linear {w:.6f}  fft {f:.6f}  rel {f / w - 1:+.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
