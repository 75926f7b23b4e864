"""Command-line front end: ``lambda-fluor <command> --config FILE``."""
from __future__ import annotations

import argparse
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor

from .analysis import measure_peak, optimal_detuning
from .config import RunConfig, load_config
from .dynamics import dark_state_scan, steady_state, thread_count
from .errors import LambdaFluorError, NoPeakError, NumericalError, ParameterError, PreconditionError, RegimeError
from .model import build_liouvillian
from .spectrum import coherent_intensity, compute_spectrum, total_intensity

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VALIDATION = 0, 2, 3, 4


def _num(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _report(items, fmt: str) -> str:
    if fmt == "csv":
        return "quantity,value\n" + "".join(f"{k},{_num(v)}\n" for k, v in items)
    return "".join(f"{k} = {_num(v)}\n" for k, v in items)


def _header(cfg: RunConfig, results) -> str:
    lines = [f"# {line}" if line else "#" for line in cfg.to_text().splitlines()]
    lines += ["#", "# [result]"] + [f"# {k} = {_num(v)}" for k, v in results]
    return "\n".join(lines) + "\n"


def cmd_steady(cfg: RunConfig) -> str:
    params = cfg.params
    steady = steady_state(build_liouvillian(params))
    items = [
        ("rho_aa", steady.rho_aa),
        ("rho_bb", steady.rho_bb),
        ("rho_cc", steady.rho_cc),
    ]
    for name in ("ab", "ac", "bc"):
        value = getattr(steady, f"rho_{name}")
        items += [(f"rho_{name}_re", value.real), (f"rho_{name}_im", value.imag)]
    items += [
        ("i_coh_abs", coherent_intensity(steady, params)),
        ("i_tot", total_intensity(steady, params)),
        ("dark", steady.dark),
        ("method", steady.method),
        ("condition_estimate", steady.condition_estimate),
    ]
    return _report(items, cfg.output.format)


def _spectrum(cfg: RunConfig, refine=None):
    return compute_spectrum(
        cfg.params,
        span=cfg.grid.span,
        points=cfg.grid.points,
        refine_center=cfg.grid.refine_center if refine is None else refine,
        normalization=cfg.output.normalization,
    )


def cmd_spectrum(cfg: RunConfig) -> str:
    spec = _spectrum(cfg)
    out = io.StringIO()
    out.write(
        _header(
            cfg,
            [("i_coh_abs", spec.i_coh_abs), ("i_tot", spec.i_tot), ("rho_aa", spec.rho_aa_ss)],
        )
    )
    out.write("omega_offset,s_inc\n")
    for w, s in zip(spec.offsets, spec.s_inc):
        out.write(f"{float(w)!r},{float(s)!r}\n")
    return out.getvalue()


def _peak_items(cfg: RunConfig):
    rep = measure_peak(_spectrum(cfg, refine=True))
    try:
        dmax = optimal_detuning(cfg.params)
    except RegimeError:
        dmax = math.nan
    return [
        ("amplitude_measured", rep.amplitude_measured),
        ("height_measured", rep.height_measured),
        ("width_measured", rep.width_measured),
        ("fwhm_measured", rep.fwhm_measured),
        ("baseline", rep.baseline),
        ("rel_intensity_measured", rep.rel_intensity_measured),
        ("amplitude_predicted", rep.amplitude_predicted),
        ("width_predicted", rep.width_predicted),
        ("rel_intensity_predicted", rep.rel_intensity_predicted),
        ("optimal_detuning", dmax),
    ]


def cmd_peak(cfg: RunConfig) -> str:
    return _report(_peak_items(cfg), cfg.output.format)


def _sweep_peak(cfg: RunConfig, vary: str, value: float):
    try:
        point = cfg.with_overrides(params={vary: value})
        spec = _spectrum(point, refine=True)
        try:
            rep = measure_peak(spec)
            return spec.i_coh_abs, rep.amplitude_measured, rep.width_measured
        except NoPeakError:
            return spec.i_coh_abs, math.nan, math.nan
    except LambdaFluorError:
        return math.nan, math.nan, math.nan


def cmd_sweep(cfg: RunConfig) -> str:
    sw = cfg.sweep
    if sw.vary is None or sw.start is None or sw.stop is None or sw.steps is None:
        raise ParameterError("sweep", "vary, from, to and steps are all required")
    rows = dark_state_scan(cfg.params, sw.vary, (sw.start, sw.stop), sw.steps)
    with ThreadPoolExecutor(max_workers=min(thread_count(), len(rows))) as pool:
        peaks = list(pool.map(lambda r: _sweep_peak(cfg, sw.vary, r.value), rows))
    out = io.StringIO()
    out.write(_header(cfg, []))
    out.write(f"{sw.vary},rho_aa,i_tot,dark,i_coh_abs,amplitude,width,error\n")
    for row, (icoh, amp, width) in zip(rows, peaks):
        cells = [row.value, row.rho_aa, row.i_tot, row.dark, icoh, amp, width]
        text = ",".join("" if isinstance(c, float) and math.isnan(c) else _num(c) for c in cells)
        out.write(f"{text},{row.error or ''}\n")
    return out.getvalue()


def cmd_validate() -> tuple[str, bool]:
    from .validation import run_all

    checks = run_all()
    lines = [c.line() for c in checks]
    passed = sum(c.passed for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n", passed == len(checks)


COMMANDS = {"steady": cmd_steady, "spectrum": cmd_spectrum, "peak": cmd_peak, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lambda-fluor",
        description="Resonance fluorescence of a driven Lambda atom with vacuum-induced interference.",
    )
    parser.add_argument("command", choices=[*COMMANDS, "validate"])
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--out", help="write output here instead of stdout")
    parser.add_argument("--span", type=float, help="half-width of the frequency grid [gamma1]")
    parser.add_argument("--points", type=int, help="number of uniform grid points")
    parser.add_argument("--refine-center", action="store_true", default=None,
                        help="add a log-spaced insert around the laser frequency")
    parser.add_argument("--vary", help="parameter to sweep")
    parser.add_argument("--from", dest="start", type=float)
    parser.add_argument("--to", dest="stop", type=float)
    parser.add_argument("--steps", type=int)
    return parser


def _write(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            sys.stderr.close()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            text, ok = cmd_validate()
            _write(text, args.out)
            return EXIT_OK if ok else EXIT_VALIDATION
        if not args.config:
            raise ParameterError("--config", f"required for '{args.command}'")
        cfg = load_config(args.config).with_overrides(
            grid={"span": args.span, "points": args.points, "refine_center": args.refine_center},
            sweep={"vary": args.vary, "start": args.start, "stop": args.stop, "steps": args.steps},
        )
        text = COMMANDS[args.command](cfg)
        _write(text, args.out or cfg.output.path)
    except (ParameterError, PreconditionError, RegimeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, NoPeakError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
