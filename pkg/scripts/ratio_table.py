"""Tabulate PPM and PWM entropy ratios, closed form next to brute force.

    python3 scripts/ratio_table.py --M 2 --d 1,2 --dist 0.7,0.3
"""

import argparse

from qmodulation.modulation import Alphabet, closed_form_dynamical_entropy, compare_modulators


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--M", type=int, default=2)
    p.add_argument("--d", default="1,2", help="comma list of pulse amplitudes")
    p.add_argument("--dist", default=None, help="comma list of letter weights (default uniform)")
    p.add_argument("--block-max", type=int, default=3)
    args = p.parse_args()

    if args.dist:
        lam = tuple(float(x) for x in args.dist.split(","))
        alphabet = Alphabet(tuple(x / sum(lam) for x in lam))
    else:
        alphabet = Alphabet.uniform(args.M)

    header = f"{'eta':>5} {'d':>2}  {'r_PPM':>9} {'r_PPM bf':>9}  {'r_PWM':>9} {'r_PWM bf':>9}  orderings"
    print(f"letters {alphabet.lam}, S = {closed_form_dynamical_entropy(alphabet):.6f} nats")
    print(header)
    for d in (int(x) for x in args.d.split(",")):
        for k in range(1, 10):
            eta = k / 10
            rep = compare_modulators(alphabet, eta, d, args.block_max)
            ok = "ok" if rep.theorem5_pass and rep.theorem6_pass else "VIOLATED"
            print(
                f"{eta:5.1f} {d:2d}  {rep.r_ppm_closed:9.6f} {rep.r_ppm_brute:9.6f}"
                f"  {rep.r_pwm_closed:9.6f} {rep.r_pwm_brute:9.6f}  {ok}"
            )


if __name__ == "__main__":
    main()
