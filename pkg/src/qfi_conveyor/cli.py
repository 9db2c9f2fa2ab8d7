"""``qfi-conveyor <experiment> --config <path> [--out <path>] [--optimize-per-point]``.

Exit codes: 0 success, 1 validation error, 2 capacity error, 3 oracle-check failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments as ex
from .errors import CapacityError, ConveyorError

EXIT_OK, EXIT_VALIDATION, EXIT_CAPACITY, EXIT_ORACLE = 0, 1, 2, 3

RUNNERS = {
    "transfer": ex.run_transfer,
    "sweep": ex.run_theta_sweep,
    "theta-sweep": ex.run_theta_sweep,
    "oat-curve": ex.run_oat_curve,
    "negativity": ex.run_negativity,
    "calibration": ex.run_calibration,
    "fidelity": ex.run_fidelity,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qfi-conveyor", description="Information-transfer experiments on Ising spin chains.")
    p.add_argument("experiment", choices=ex.EXPERIMENTS)
    p.add_argument("--config", type=Path, help="key = value config file")
    p.add_argument("--out", type=Path, help="output file (default: output_path or stdout)")
    p.add_argument("--optimize-per-point", action="store_true",
                   help="re-optimize phi1 at every OAT time instead of fixed settings")
    return p


def execute(cfg: ex.ExperimentConfig) -> tuple[str, int]:
    if cfg.experiment == "oracle-check":
        report = ex.run_oracle_check(cfg)
        return report.text(), EXIT_OK if report.passed else EXIT_ORACLE
    return RUNNERS[cfg.experiment](cfg), EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params = ex.parse_config(args.config.read_text(encoding="utf-8")) if args.config else {}
        if args.optimize_per_point:
            params["optimize_per_point"] = True
        cfg = ex.ExperimentConfig(args.experiment, params)
        text, code = execute(cfg)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConveyorError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    out = args.out or (Path(cfg.get("output_path")) if cfg.get("output_path") else None)
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
