"""Run a suite config, write the JSON report and print the table plus trend details.

    python3 scripts/run_suite.py configs/interpolation.json --out results/interp.json
"""
import argparse
import json
import sys
from pathlib import Path

from ncmart.verify import SuiteConfig, run_suite, summary_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--out", help="report JSON path")
    ap.add_argument("--seeds", type=int, help="override the seed count")
    args = ap.parse_args(argv)
    with open(args.config, encoding="utf-8") as fh:
        obj = json.load(fh)
    if args.seeds is not None:
        obj["seeds"] = {"start": 0, "count": args.seeds}
    report = run_suite(SuiteConfig.from_json(obj))
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=1)
    sys.stdout.write(summary_table(report))
    print(f"seconds: {report['header']['seconds']}")
    for r in report["reports"]:
        trend = r.get("trend")
        if not trend:
            continue
        for mode, t in trend["modes"].items():
            hi = " ".join(f"{v:.4g}" for v in t["max_by_dim"])
            lo = " ".join(f"{v:.4g}" for v in t["max_lo_by_dim"])
            flag = "" if t["passed"] else "  growth"
            print(f"  {r['name']} {mode}: up/down {t['ups']}/{t['downs']} p={t['p_value']:.3g} "
                  f"max upper [{hi}] max lower [{lo}]{flag}")
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
