"""Export the certified K-curve bracket of one seeded instance as CSV.

    python3 scripts/export_kcurve.py --dim 16 --levels 4 --seed 3 > curve.csv
"""
import argparse
import sys

from ncmart.jones import HardyCouple, k_curve
from ncmart.symspaces import Lp
from ncmart.verify import InstanceSpec, generate_instance


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=8)
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--mode", choices=("noncommutative", "dyadic"), default="noncommutative")
    ap.add_argument("--filtration", choices=("pinching", "tensor", "random"), default="pinching")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--kind", choices=("martingale", "conditioned", "adapted"), default="martingale")
    args = ap.parse_args(argv)
    inst = generate_instance(InstanceSpec(dim=args.dim, levels=args.levels, mode=args.mode,
                                          filtration=args.filtration, seed=args.seed))
    curve = k_curve(inst.square_object(args.kind), HardyCouple(Lp(args.p)), square_kind=args.kind)
    sys.stdout.write(curve.to_csv())
    sys.stderr.write(f"sup upper/lower = {float(curve.ratio.max()):.6g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
