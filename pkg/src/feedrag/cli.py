"""Command-line front end.

Exit codes: 0 success, 1 domain or parse error, 2 usage or I/O error.
All rates are fractions (0.01 means 1% per year).
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import accuracy, dataio
from .accuracy import analytic_boundary, classify_region, linspace, sweep_error_grid
from .loss import loss_report
from .model import FeeDragError, ReturnSeries

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2

FIG2_R, FIG2_EPS, FIG2_YEARS = 0.10, 0.01, 100


class IOFailure(Exception):
    pass


def _range_spec(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:steps, got {text!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number in range {text!r}") from None
    if steps < 1 or stop < start or (steps > 1 and stop == start):
        raise argparse.ArgumentTypeError(
            f"range {text!r} needs steps >= 1 and stop > start (stop == start only with 1 step)"
        )
    return linspace(start, stop, steps)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a whole number of years, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"years must be >= 0, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feedrag",
        description="Compounded investment loss to annual fees and the n*eps rule of thumb. "
        "Rates are fractions: 0.01 means 1%% per year.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("loss", help="exact loss and approximations at one (r, eps, years) point")
    p.add_argument("--r", type=float, required=True, help="annual return as a fraction")
    p.add_argument("--eps", type=float, required=True, help="annual fee as a fraction")
    p.add_argument("--years", type=_nonneg_int, required=True)

    p = sub.add_parser("trajectory", help="with-fee and no-fee growth of a return series")
    p.add_argument("--returns", type=Path, required=True, help="CSV with header year,return")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--principal", type=float, default=100000.0)
    p.add_argument("--out", type=Path, required=True, help="trajectory CSV to write")

    p = sub.add_parser("sweep", help="relative-error grids and region maps")
    p.add_argument("--n-list", type=_int_list, default=list(accuracy.DEFAULT_N_LIST))
    p.add_argument("--theta-list", type=_float_list, default=list(accuracy.DEFAULT_THETA_LIST))
    p.add_argument("--eps-range", type=_range_spec, default=linspace(*accuracy.DEFAULT_EPS_RANGE),
                   help="start:stop:steps (default 0.0005:0.02:40)")
    p.add_argument("--r-range", type=_range_spec, default=linspace(*accuracy.DEFAULT_R_RANGE),
                   help="start:stop:steps (default 0:0.15:31)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", type=Path, required=True, help="output directory")

    p = sub.add_parser("figures", help="regenerate all figure data")
    p.add_argument("--data-dir", type=Path, default=None,
                   help="directory of historical year,return CSVs (optional)")
    p.add_argument("--eps", type=float, default=0.01, help="fee for historical trajectories")
    p.add_argument("--principal", type=float, default=100000.0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    return parser


def _warn_fraction(name: str, value: float) -> None:
    if value > 1.0:
        print(
            f"warning: {name} {value!r} is above 1; rates are fractions "
            f"(0.01 means 1%), so this is {value * 100:g}% per year",
            file=sys.stderr,
        )


def _pct(value: float, digits: int = 2) -> str:
    return f"{value * 100:.{digits}f}%"


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from exc


def _read_returns(path: Path) -> ReturnSeries:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IOFailure(f"cannot read {path}: {exc}") from exc
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", dataio.PercentWarning)
        try:
            series = dataio.parse_returns_csv(text)
        except FeeDragError as exc:
            raise type(exc)(f"{path}: {exc}") from exc
    for w in caught:
        print(f"warning: {path}: {w.message}", file=sys.stderr)
    return series


def format_loss_report(r: float, eps: float, years: int) -> str:
    rep = loss_report(r, eps, years)
    rel = rep.relative_error
    if rel is None:
        rel_text = analytic_text = "undefined"
    else:
        rel_text = f"{_pct(rel, 1)} ({rel:.10g})"
        est = accuracy.analytic_error_estimate(r, eps, years)
        analytic_text = f"{_pct(est, 1)} ({est:.10g})"
    lines = [
        f"loss to fees: r={r!r} ({_pct(r)}/yr) eps={eps!r} ({_pct(eps)}/yr) years={years}",
        f"  true={_pct(rep.true_loss)} ({rep.true_loss:.10g})  exact compounded loss",
        f"  l1={_pct(rep.l1)} ({rep.l1:.10g})  n*eps",
        f"  l2={_pct(rep.l2)} ({rep.l2:.10g})  second order",
        f"  l1_improved={_pct(rep.l1_improved)} ({rep.l1_improved:.10g})  n*eps*(1-r)",
        f"  rel_err={rel_text}  |l1 - true| / true",
        f"  analytic_err={analytic_text}  r + (n-1)*eps/2",
    ]
    return "\n".join(lines) + "\n"


def cmd_loss(args) -> int:
    _warn_fraction("--r", args.r)
    _warn_fraction("--eps", args.eps)
    sys.stdout.write(format_loss_report(args.r, args.eps, args.years))
    return EXIT_OK


def _trajectory_summary(points, fee: float) -> str:
    last = points[-1]
    lost = last.value_no_fee - last.value_with_fee
    return (
        f"after {last.year_index} years ({points[1].year_label}..{last.year_label}), fee {_pct(fee)}/yr:\n"
        f"  no fee:   {last.value_no_fee:,.2f}\n"
        f"  with fee: {last.value_with_fee:,.2f}\n"
        f"  lost to fees: {lost:,.2f} = {_pct(last.loss_fraction)} of the no-fee value\n"
        f"  n*eps prediction: {_pct(last.l1_prediction)}\n"
    )


def cmd_trajectory(args) -> int:
    _warn_fraction("--eps", args.eps)
    series = _read_returns(args.returns)
    points = dataio.run_trajectory(args.principal, series, args.eps)
    _write(args.out, dataio.emit_trajectory_csv(points))
    sys.stdout.write(_trajectory_summary(points, args.eps))
    return EXIT_OK


def write_sweep(out_dir: Path, n_list, theta_list, eps_axis, r_axis, workers=None) -> list[Path]:
    written = []
    for n in n_list:
        grid = sweep_error_grid(eps_axis, r_axis, n, workers=workers)
        for theta in theta_list:
            mask = classify_region(grid, theta)
            boundary = analytic_boundary(n, theta, grid.eps_axis)
            stem = f"grid_N{n}_theta{dataio.fmt(theta)}"
            for suffix, text in (
                (".csv", dataio.emit_grid_csv(grid, mask, boundary)),
                (".svg", dataio.emit_region_svg(grid, mask, boundary)),
            ):
                path = out_dir / (stem + suffix)
                _write(path, text)
                written.append(path)
    return written


def cmd_sweep(args) -> int:
    for theta in args.theta_list:
        _warn_fraction("theta", theta)
    written = write_sweep(args.out, args.n_list, args.theta_list, args.eps_range, args.r_range,
                          args.workers)
    print(f"wrote {len(written)} files to {args.out}")
    return EXIT_OK


def cmd_figures(args) -> int:
    out: Path = args.out
    written: list[Path] = []

    # loss saturation: exact loss vs n*eps out to 100 years
    series = ReturnSeries.constant(FIG2_R, FIG2_YEARS)
    points = dataio.run_trajectory(args.principal, series, FIG2_EPS)
    _write(out / "fig2_trajectory.csv", dataio.emit_trajectory_csv(points))
    xs = [p.year_index for p in points]
    _write(out / "fig2_loss.svg", dataio.emit_lines_svg(
        f"Loss to fees, r = {_pct(FIG2_R, 0)}, eps = {_pct(FIG2_EPS, 0)}",
        xs,
        [("n*eps approximation", "red", False, [p.l1_prediction for p in points]),
         ("exact loss", "red", True, [p.loss_fraction for p in points])],
        y_label="fraction of no-fee value",
    ))
    written += [out / "fig2_trajectory.csv", out / "fig2_loss.svg"]

    written += write_sweep(
        out / "fig3", accuracy.DEFAULT_N_LIST, accuracy.DEFAULT_THETA_LIST,
        linspace(*accuracy.DEFAULT_EPS_RANGE), linspace(*accuracy.DEFAULT_R_RANGE), args.workers,
    )

    data_files = []
    if args.data_dir is not None:
        if not args.data_dir.is_dir():
            raise IOFailure(f"data directory {args.data_dir} does not exist")
        data_files = sorted(args.data_dir.glob("*.csv"))
    if not data_files:
        print("notice: figure 1 needs historical annual-return CSVs (year,return) in --data-dir; skipped")
    for path in data_files:
        series = _read_returns(path)
        points = dataio.run_trajectory(args.principal, series, args.eps)
        stem = f"fig1_{path.stem}"
        _write(out / f"{stem}.csv", dataio.emit_trajectory_csv(points))
        _write(out / f"{stem}.svg", dataio.emit_lines_svg(
            f"{path.stem}: growth with and without a {_pct(args.eps)} fee",
            [p.year_index for p in points],
            [("no fee", "black", False, [p.value_no_fee for p in points]),
             ("with fee", "red", False, [p.value_with_fee for p in points])],
            y_label="portfolio value",
        ))
        written += [out / f"{stem}.csv", out / f"{stem}.svg"]
        sys.stdout.write(f"{path.name}: " + _trajectory_summary(points, args.eps))
    print(f"wrote {len(written)} files to {out}")
    return EXIT_OK


COMMANDS = {"loss": cmd_loss, "trajectory": cmd_trajectory, "sweep": cmd_sweep, "figures": cmd_figures}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FeeDragError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
