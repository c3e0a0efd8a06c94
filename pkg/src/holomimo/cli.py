"""Command-line front end.

Every command writes ``<command>.csv`` and a ``<command>.manifest.json``
sidecar into the output directory. ``rerun`` replays a manifest and
reproduces its CSV byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, config, scenario
from .errors import ConfigError, DomainError, NumericalError

log = logging.getLogger("holomimo")

FIGURE_SPACINGS = [0.1, 0.25, 0.5]

SWEEP_HEADER = ["d_h_over_lambda", "matching", "combiner", "mean_se_per_ue", "stderr_se",
                "mean_gain_db", "drops", "seed"]
APERTURE_HEADER = ["aperture_over_lambda", "d_h_over_lambda", "m", "matching", "combiner",
                   "mean_se_per_ue", "stderr_se", "mean_gain_db", "drops", "seed"]
DUALITY_HEADER = ["d_h_over_lambda", "m", "matching", "combiner", "ul_se", "dl_se", "dl_se_naive",
                  "stderr_ul", "stderr_dl", "stderr_dl_naive", "drops", "seed"]
TWO_ELEMENT_HEADER = ["d_h_over_lambda", "phi_deg", "theta_deg", "mu", "psi",
                      "array_gain_closed", "array_gain_pipeline",
                      "interference_gain_closed", "interference_gain_pipeline",
                      "snr_db", "se_mmse_reference", "se_mmse_swept"]
EIGEN_HEADER = ["aperture_over_lambda", "d_h_over_lambda", "m", "index",
                "z_ar", "z_ar_radiation_only", "u_no_matching"]


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[h]) for h in header])


def _sweep_rows(result, with_aperture):
    for c in result.cells:
        row = {
            "d_h_over_lambda": c.spacing, "matching": c.matching, "combiner": c.scheme,
            "mean_se_per_ue": c.mean_se, "stderr_se": c.stderr_se, "mean_gain_db": c.mean_gain_db,
            "drops": c.drops, "seed": result.seed, "m": c.count,
        }
        if with_aperture:
            row["aperture_over_lambda"] = c.aperture
        yield row


def cmd_sweep_spacing(resolved, raw):
    cfg = config.to_scenario(resolved)
    return SWEEP_HEADER, list(_sweep_rows(scenario.run_uplink(cfg), False))


def cmd_sweep_aperture(resolved, raw):
    cfg = config.to_scenario(resolved)
    return APERTURE_HEADER, list(_sweep_rows(scenario.run_uplink(cfg, fixed_aperture=True), True))


def cmd_duality(resolved, raw):
    cfg = config.to_scenario(resolved)
    rows = []
    for c in scenario.run_duality(cfg).cells:
        rows.append({
            "d_h_over_lambda": c.spacing, "m": c.count, "matching": c.matching, "combiner": c.scheme,
            "ul_se": c.extra["ul"][0], "dl_se": c.extra["dl"][0], "dl_se_naive": c.extra["dl-naive"][0],
            "stderr_ul": c.extra["ul"][1], "stderr_dl": c.extra["dl"][1],
            "stderr_dl_naive": c.extra["dl-naive"][1], "drops": c.drops, "seed": cfg.seed,
        })
    return DUALITY_HEADER, rows


def _explicit(raw, section, key):
    return key in raw.get(section, {})


def cmd_two_element(resolved, raw):
    if _explicit(raw, "array", "count") and raw["array"]["count"] != 2:
        raise ConfigError("array.count", "the two-element analysis needs count = 2")
    resolved["array"]["count"] = 2
    if not _explicit(raw, "sweep", "spacings_over_lambda"):
        resolved["sweep"]["spacings_over_lambda"] = list(FIGURE_SPACINGS)
    cfg = config.to_scenario(resolved)
    step = resolved["sweep"]["azimuth_step_deg"]
    n = int(round(180 / step)) + 1
    azimuths = [math.radians(-90 + step * i) for i in range(n)]
    rows = []
    for spacing in cfg.spacings:
        rows.extend(scenario.two_element_rows(cfg, spacing, azimuths))
    return TWO_ELEMENT_HEADER, rows


def cmd_eigen_spectrum(resolved, raw):
    if not _explicit(raw, "sweep", "spacings_over_lambda"):
        resolved["sweep"]["spacings_over_lambda"] = list(FIGURE_SPACINGS)
    cfg = config.to_scenario(resolved)
    rows = []
    for aperture in cfg.apertures:
        for spacing in cfg.spacings:
            m = scenario.element_count(aperture, spacing)
            geom = cfg.geometry(spacing, m)
            z = scenario.eigen_spectrum("Z_AR", geom, cfg.frontend)
            z0 = scenario.eigen_spectrum("Z_AR", geom, cfg.frontend, include_dissipation=False)
            u = scenario.eigen_spectrum("U", geom, cfg.frontend, rx_matching="none")
            for i in range(m):
                rows.append({"aperture_over_lambda": aperture, "d_h_over_lambda": spacing, "m": m,
                             "index": i + 1, "z_ar": z[i], "z_ar_radiation_only": z0[i],
                             "u_no_matching": u[i]})
    return EIGEN_HEADER, rows


COMMANDS = {
    "sweep-spacing": cmd_sweep_spacing,
    "sweep-aperture": cmd_sweep_aperture,
    "two-element": cmd_two_element,
    "duality": cmd_duality,
    "eigen-spectrum": cmd_eigen_spectrum,
}


def _apply_overrides(resolved, args):
    if getattr(args, "seed", None) is not None:
        resolved["sweep"]["seed"] = args.seed
    if getattr(args, "drops", None) is not None:
        resolved["sweep"]["drops"] = args.drops
    if getattr(args, "workers", None) is not None:
        resolved["sweep"]["workers"] = args.workers


def run_command(command, raw, resolved, out_dir: Path):
    """Run ``command`` and write its CSV and manifest; returns the CSV path."""
    header, rows = COMMANDS[command](resolved, raw)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = command.replace("-", "_")
    csv_path = out_dir / f"{stem}.csv"
    write_csv(csv_path, header, rows)
    manifest = {
        "command": command,
        "config": resolved,
        "config_digest": config.digest(resolved),
        "seed": resolved["sweep"]["seed"],
        "drops": resolved["sweep"]["drops"],
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "outputs": [csv_path.name],
    }
    with open(out_dir / f"{stem}.manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %s (%d rows)", csv_path, len(rows))
    return csv_path


def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", type=Path, default=default, help="TOML configuration file")
    parser.add_argument("--seed", type=int, default=default, help="RNG seed (unsigned 64-bit)")
    parser.add_argument("--drops", type=int, default=default, help="number of user drops")
    parser.add_argument("--out", type=Path, default=default, help="output directory (default: results)")
    parser.add_argument("--workers", type=int, default=default, help="worker threads for the drops")
    parser.add_argument("-v", "--verbose", action="store_true",
                        default=argparse.SUPPRESS if suppress else False)


def build_parser():
    parser = argparse.ArgumentParser(prog="holomimo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _global_flags(sub.add_parser(name, help=f"run the {name} experiment"), suppress=True)
    rerun = sub.add_parser("rerun", help="replay a run manifest")
    rerun.add_argument("manifest", type=Path)
    _global_flags(rerun, suppress=True)
    return parser


def _load_manifest(path):
    try:
        with open(path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("<manifest>", f"cannot read {path}: {exc}") from None
    if manifest.get("command") not in COMMANDS or not isinstance(manifest.get("config"), dict):
        raise ConfigError("<manifest>", "not a run manifest")
    return manifest


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "rerun":
            manifest = _load_manifest(args.manifest)
            command = manifest["command"]
            raw = manifest["config"]
            out_dir = args.out or args.manifest.parent
        else:
            command = args.command
            raw = config.read_document(args.config) if args.config else {}
            out_dir = args.out or Path("results")
        resolved = config.resolve(raw)
        _apply_overrides(resolved, args)
        run_command(command, raw, resolved, out_dir)
    except ConfigError as exc:
        print(f"holomimo: configuration error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"holomimo: invalid setting: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"holomimo: numerical failure in {exc.where}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
