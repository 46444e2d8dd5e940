"""``htquant`` command-line front end.

Exit codes: 0 success, 2 usage/configuration error, 3 I/O error, 4 malformed
input file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import adcsim, power, sweep
from .calibrate import ALPHA_MAX, BitAllocation, calibrate_dataset, parse_bpc
from .codec import decode, encode, parse
from .errors import DegenerateDC, FormatError, HtqError
from .imageio import read_image, resize_bilinear, write_image

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4

REFERENCE_BPCS = ("8565", "7454", "6343", "8060", "7060", "7050", "5232", "4121")


class UsageError(Exception):
    pass


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _load_images(args) -> dict:
    images = {}
    if getattr(args, "corpus", False):
        from .corpus import load_corpus

        images.update(load_corpus())
    for p in args.images:
        images[Path(p).stem] = read_image(p)
    if not images:
        raise UsageError("no input images (give paths or --corpus)")
    return images


def _allocation(args) -> BitAllocation:
    alphas = args.alphas
    if len(alphas) != args.M:
        raise UsageError(f"--alphas needs {args.M} entries, got {len(alphas)}")
    if args.bpc:
        bits = parse_bpc(args.bpc, args.M)
        return BitAllocation(n0=bits[0], alphas=alphas, bits=bits)
    return BitAllocation(n0=args.n0, alphas=alphas)


def _adc_params(args) -> power.AdcParams:
    return power.DEFAULT_PARAMS.with_overrides(
        f_s=args.fs, V_ref=args.vref, V_eff=args.veff, C_min=args.cmin,
        C_unit=args.cunit, T=args.temp,
    )


def _fmt_num(v) -> str:
    return "n/a" if v is None else f"{v:.4f}"


# -- commands ----------------------------------------------------------------

def cmd_calibrate(args) -> int:
    images = _load_images(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateDC)
        alloc = calibrate_dataset(images.values(), M=args.M, n0=args.n0, alpha_max=args.alpha_max)
    degenerate = any(issubclass(w.category, DegenerateDC) for w in caught)
    if degenerate:
        print("warning: DC channel has zero spread; gains default to 1", file=sys.stderr)
    print(f"images : {len(images)}")
    print(f"alphas : {list(alloc.alphas)}")
    print(f"gains  : {list(alloc.gains)}")
    print(f"bits   : {list(alloc.bits)}  (N0={alloc.n0})")
    print(f"bpp    : {float(alloc.bpp):g}")
    if args.json:
        side = {
            "M": alloc.M, "n0": alloc.n0, "alphas": list(alloc.alphas),
            "gains": list(alloc.gains), "bits": list(alloc.bits),
            "bpp": float(alloc.bpp), "degenerate": degenerate,
            "images": list(images),
        }
        Path(args.json).write_text(json.dumps(side, indent=2) + "\n")
    return EXIT_OK


def cmd_encode(args) -> int:
    cfg = _allocation(args)
    img = read_image(args.input)
    if args.resize:
        img = resize_bilinear(img, args.resize)
    coded = encode(img, cfg)
    data = coded.to_bytes()
    Path(args.output).write_bytes(data)
    print(f"bits per channel : {cfg.label()}")
    print(f"bpp              : {float(cfg.bpp):g}")
    print(f"payload bytes    : {len(coded.payload)}")
    print(f"file bytes       : {len(data)}")
    return EXIT_OK


def cmd_decode(args) -> int:
    coded = parse(Path(args.input).read_bytes())
    img = decode(coded)
    write_image(args.output, img)
    print(f"{coded.height}x{img.shape[1]} image, bpp {float(coded.bpp):g}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    images = _load_images(args)
    sizes = args.sizes or (None,)
    rows = sweep.run_sweep(images, sizes=sizes, configs=args.configs, alphas=args.alphas,
                           params=_adc_params(args), workers=args.workers)
    text = sweep.rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.figures:
        from .report import sweep_figures

        for p in sweep_figures(rows, args.figures):
            print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


def power_report(kinds, bpcs, params, fmt="csv") -> str:
    tables = {k: power.power_table(k, params) for k in kinds}
    bits_cols = list(next(iter(tables.values())))
    lines = []
    if fmt == "markdown":
        lines.append("| power (norm.) | " + " | ".join(str(b) for b in bits_cols) + " |")
        lines.append("|---|" + "---|" * len(bits_cols))
        for k, t in tables.items():
            lines.append(f"| {k} | " + " | ".join(f"{t[b]:.4f}" for b in bits_cols) + " |")
        lines.append("")
        lines.append("| BPC | BPP | " + " | ".join(f"P_pc {k}" for k in kinds) + " |")
        lines.append("|---|---|" + "---|" * len(kinds))
    else:
        lines.append("kind," + ",".join(str(b) for b in bits_cols))
        for k, t in tables.items():
            lines.append(k + "," + ",".join(f"{t[b]:.6f}" for b in bits_cols))
        lines.append("")
        lines.append("bpc,bpp," + ",".join(f"p_pc_{k}" for k in kinds))
    for bpc in bpcs:
        bits = parse_bpc(bpc)
        bpp = sum(bits) / len(bits)
        vals = []
        for k in kinds:
            try:
                vals.append(power.multi_channel_power(bits, k, params).per_channel_normalized)
            except HtqError:
                vals.append(None)
        label = "(" + ", ".join(map(str, bits)) + ")"
        if fmt == "markdown":
            lines.append(f"| {label} | {bpp:g} | " + " | ".join(_fmt_num(v) for v in vals) + " |")
        else:
            lines.append(f"\"{label}\",{bpp:g}," + ",".join("" if v is None else f"{v:.6f}" for v in vals))
    return "\n".join(lines) + "\n"


def cmd_power(args) -> int:
    params = _adc_params(args)
    kinds = power.KINDS if args.kind == "both" else (args.kind,)
    bpcs = args.bpc or REFERENCE_BPCS
    text = power_report(kinds, bpcs, params, args.format)
    if args.rgb:
        text += "# multiply P_pc by 3 for RGB sensors\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.figures:
        from .report import power_figure

        tables = {k: power.power_table(k, params) for k in kinds}
        p = power_figure(tables, Path(args.figures) / "power_vs_bits.png")
        print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


def mc_csv(report) -> str:
    lines = ["trial,psnr_db"]
    lines += [f"{i},{p:.6f}" for i, p in report.rows()]
    return "\n".join(lines) + "\n"


def histogram_csv(report, bins: int) -> str:
    edges, counts = report.histogram(bins)
    lines = ["bin_low,bin_high,count"]
    lines += [f"{lo:.6f},{hi:.6f},{c}" for lo, hi, c in zip(edges[:-1], edges[1:], counts)]
    return "\n".join(lines) + "\n"


def cmd_adcsim(args) -> int:
    cfg = _allocation(args)
    img = read_image(args.input)
    if img.ndim == 3 and args.gray:
        from .imageio import to_gray

        img = to_gray(img)
    if args.resize:
        img = resize_bilinear(img, args.resize)
    gain = math.inf if args.gain_db.lower() in ("inf", "infinite") else float(args.gain_db)
    rep = adcsim.monte_carlo(img, cfg, trials=args.trials, mismatch_sigma=args.sigma,
                             opamp_gain_db=gain, seed=args.seed, workers=args.workers,
                             subadc_mismatch=not args.mdac_only, thermal_noise=args.thermal_noise)
    text = mc_csv(rep)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.hist:
        Path(args.hist).write_text(histogram_csv(rep, args.bins))
    print(f"ideal PSNR {rep.ideal_psnr:.3f} dB, mean {rep.mean:.3f} dB, "
          f"min {rep.psnr_samples.min():.3f}, max {rep.psnr_samples.max():.3f}, "
          f"spread {rep.spread:.3f} dB", file=sys.stderr)
    if args.figures:
        from .report import histogram_figure

        p = histogram_figure(rep, Path(args.figures) / "adcsim_psnr_hist.png", args.bins)
        print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _add_alloc(p, bpc_default=None):
    p.add_argument("--M", type=int, default=4, help="transform size (default 4)")
    p.add_argument("--alphas", type=_int_list, default=(0, 3, 2, 3),
                   help="gain exponents, comma separated (default 0,3,2,3)")
    p.add_argument("--n0", type=int, default=8, help="full-scale bits N0 (default 8)")
    p.add_argument("--bpc", default=bpc_default,
                   help="explicit bits per channel, e.g. 8565 or 8,0,6,0 (overrides --n0)")


def _add_adc(p):
    g = p.add_argument_group("ADC parameters")
    g.add_argument("--fs", type=float, help="sample rate in Hz")
    g.add_argument("--vref", type=float, help="reference voltage")
    g.add_argument("--veff", type=float, help="overdrive voltage")
    g.add_argument("--cmin", type=float, help="minimum inverter capacitance (F)")
    g.add_argument("--cunit", type=float, help="SAR unit capacitance (F)")
    g.add_argument("--temp", type=float, help="temperature (K)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="htquant", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="derive gains and bit widths from images")
    p.add_argument("images", nargs="*")
    p.add_argument("--corpus", action="store_true", help="include the bundled corpus")
    p.add_argument("--M", type=int, default=4)
    p.add_argument("--n0", type=int, default=8)
    p.add_argument("--alpha-max", type=int, default=ALPHA_MAX)
    p.add_argument("--json", help="write a JSON sidecar with the result")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("encode", help="image -> .htq")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--resize", type=int, help="bilinear resize to a square side first")
    _add_alloc(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help=".htq -> image (.pgm/.ppm/.png)")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="PSNR/SSIM/power over sizes and configurations")
    p.add_argument("images", nargs="*")
    p.add_argument("--corpus", action="store_true", help="include the bundled corpus")
    p.add_argument("--sizes", type=_int_list, help="square sizes, e.g. 32,64,128,256,512")
    p.add_argument("--configs", type=lambda s: tuple(s.split(";")) if ";" in s else tuple(s.split()),
                   default=sweep.DEFAULT_CONFIGS,
                   help="space- or ';'-separated BPC labels (uniform labels are baseline)")
    p.add_argument("--alphas", type=_int_list, default=sweep.DEFAULT_ALPHAS)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--figures", help="directory for PNG figures")
    _add_adc(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("power", help="normalized ADC power tables")
    p.add_argument("--bpc", action="append", help="BPC label for the P_pc table (repeatable)")
    p.add_argument("--kind", choices=("pipelined", "sar", "both"), default="both")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--rgb", action="store_true", help="append the RGB (x3) note")
    p.add_argument("--out")
    p.add_argument("--figures")
    _add_adc(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("adcsim", help="Monte Carlo of the EHT pipelined ADC")
    p.add_argument("input")
    _add_alloc(p)
    p.add_argument("--resize", type=int, help="bilinear resize to a square side first")
    p.add_argument("--gray", action="store_true", help="convert color input to luma")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--sigma", type=float, default=0.01, help="capacitor mismatch sigma (fraction)")
    p.add_argument("--gain-db", default="40", help="op-amp DC gain in dB, or 'inf'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--mdac-only", action="store_true", help="no mismatch in the sub-ADC network")
    p.add_argument("--thermal-noise", action="store_true", help="add kT/C sampling noise")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--out", help="per-trial CSV (default stdout)")
    p.add_argument("--hist", help="histogram summary CSV")
    p.add_argument("--figures", help="directory for PNG figures")
    p.set_defaults(func=cmd_adcsim)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"htquant: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"htquant: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, HtqError, ValueError) as exc:
        print(f"htquant: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
