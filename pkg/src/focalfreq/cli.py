"""Command-line interface.

Exit codes: 0 success, 2 I/O or input mismatch, 3 invalid configuration,
4 numerical divergence. Every command prints a JSON summary on stdout.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .filters import MaskSpec, apply_filter, default_spec, make_mask
from .io import FormatError, read_pnm, read_spectrum, write_model, write_pnm, write_spectrum
from .loss import BatchReduction, Distance, LossConfig, Transform, batch_ffl
from .metrics import evaluate_pair, mean_report
from .mlp import PARAM_NAMES
from .spectral import Spectrum, amplitude, dft2, log_amplitude_view
from .trainer import DivergenceError, from_pixels, single_image_reconstruct, to_pixels, train_autoencoder

EXIT_OK = 0
EXIT_IO = 2
EXIT_CONFIG = 3
EXIT_DIVERGED = 4

IMAGE_SUFFIXES = (".pgm", ".ppm", ".pnm")


class InputError(Exception):
    """Unreadable or mismatched inputs (exit code 2)."""


def bundled_fixture() -> Path:
    return Path(str(resources.files("focalfreq") / "data" / "texture64.ppm"))


def _read_image(path):
    try:
        return read_pnm(path)
    except (OSError, FormatError) as exc:
        raise InputError(f"cannot read image {path}: {exc}") from exc


def _list_images(directory):
    files = sorted(p for p in Path(directory).iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise InputError(f"no PGM/PPM images in {directory}")
    return files


def _jsonable(value):
    if isinstance(value, float):
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    return value


def _emit(doc):
    print(json.dumps(_jsonable(doc), indent=2, sort_keys=True))


def _write_csv(path, rows, fields):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _jsonable(row.get(k)) for k in fields})


def _view_pixels(spectrum: Spectrum):
    return log_amplitude_view(spectrum) * 255.0


def _loss_config(args) -> LossConfig:
    return LossConfig(
        alpha=args.alpha,
        patch_factor=args.patch_factor,
        transform=Transform(args.transform),
        distance=Distance(args.distance),
        focal=not args.no_focal,
        batch_reduction=BatchReduction.AVERAGE_SPECTRUM if args.ave_spectrum else BatchReduction.MEAN_PER_IMAGE,
    )


# -- eval ---------------------------------------------------------------------


def cmd_eval(args):
    try:
        loss_cfg = _loss_config(args)
    except ValueError as exc:
        raise cfgmod.ConfigError(str(exc)) from exc
    real, fake = Path(args.real), Path(args.fake)
    if real.is_dir() != fake.is_dir():
        raise InputError("real and fake must both be files or both be directories")
    if real.is_dir():
        reals, fakes = _list_images(real), _list_images(fake)
        if len(reals) != len(fakes):
            raise InputError(f"{len(reals)} real images but {len(fakes)} fake images")
    else:
        reals, fakes = [real], [fake]

    rows = []
    stack_r, stack_f = [], []
    for rp, fp in zip(reals, fakes):
        r, f = _read_image(rp), _read_image(fp)
        if r.shape != f.shape:
            raise InputError(f"{rp.name} is {r.shape} but {fp.name} is {f.shape}")
        if r.shape[0] % loss_cfg.patch_factor or r.shape[1] % loss_cfg.patch_factor:
            raise cfgmod.ConfigError(f"patch factor {loss_cfg.patch_factor} does not divide {r.shape[0]}x{r.shape[1]}")
        report = evaluate_pair(r, f)
        # FFL on the [-1, 1] training scale
        ffl = batch_ffl([from_pixels(r)], [from_pixels(f)], loss_cfg)
        rows.append({"real": rp.name, "fake": fp.name, "ffl": ffl, **report.to_dict()})
        stack_r.append(from_pixels(r))
        stack_f.append(from_pixels(f))
        rows[-1]["_report"] = report

    mean = mean_report([row.pop("_report") for row in rows]).to_dict()
    shapes = {x.shape for x in stack_r}
    if len(shapes) == 1:
        mean["ffl"] = batch_ffl(stack_r, stack_f, loss_cfg)
    else:
        mean["ffl"] = float(np.mean([row["ffl"] for row in rows]))
    mean.update(real="mean", fake="mean")
    doc = {"pairs": rows, "mean": mean, "loss_config": _describe(loss_cfg)}
    if args.csv:
        _write_csv(args.csv, rows + [mean], ["real", "fake", "lfd", "psnr", "ssim", "ffl"])
    _emit(doc)
    return EXIT_OK


def _describe(loss_cfg):
    return {
        "alpha": loss_cfg.alpha,
        "patch_factor": loss_cfg.patch_factor,
        "transform": loss_cfg.transform.value,
        "distance": loss_cfg.distance.value,
        "focal": loss_cfg.focal,
        "batch_reduction": loss_cfg.batch_reduction.value,
    }


# -- spectrum -----------------------------------------------------------------


def cmd_spectrum(args):
    source = Path(args.image)
    orthonormalize = not args.raw
    if args.average:
        if not source.is_dir():
            raise InputError("--average expects a directory")
        images = [_read_image(p) for p in _list_images(source)]
        if len({im.shape for im in images}) != 1:
            raise InputError("images in the directory differ in size")
        values = np.mean([dft2(im, orthonormalize).values for im in images], axis=0)
        spectrum = Spectrum(values, orthonormalize)
        count = len(images)
    else:
        spectrum = dft2(_read_image(source), orthonormalize)
        count = 1
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    spec_path = out.with_suffix(".ffls")
    suffix = ".pgm" if spectrum.channels == 1 else ".ppm"
    view_path = out.with_name(out.stem + "_logamp" + suffix)
    try:
        write_spectrum(spec_path, spectrum)
        write_pnm(view_path, _view_pixels(spectrum))
    except OSError as exc:
        raise InputError(f"cannot write outputs: {exc}") from exc
    _emit(
        {
            "spectrum": str(spec_path),
            "view": str(view_path),
            "images": count,
            "shape": list(spectrum.shape),
            "orthonormalized": orthonormalize,
        }
    )
    return EXIT_OK


# -- filter -------------------------------------------------------------------


def _parse_point(text):
    try:
        row, col = (int(v) for v in text.split(","))
    except ValueError:
        raise cfgmod.ConfigError(f"notch point must be 'row,col', got {text!r}") from None
    return row, col


def cmd_filter(args):
    image = _read_image(args.image)
    h, w = image.shape[:2]
    kind = args.kind
    if kind == "notch-dc":
        spec = MaskSpec("notch", points=((h // 2, w // 2),))
    else:
        base = default_spec(kind, h, w)
        spec = MaskSpec(
            kind,
            radius=args.radius if args.radius is not None else base.radius,
            inner=args.inner if args.inner is not None else base.inner,
            outer=args.outer if args.outer is not None else base.outer,
            points=tuple(_parse_point(p) for p in args.point) if args.point else base.points,
        )
    try:
        mask = make_mask(spec, h, w)
    except ValueError as exc:
        raise cfgmod.ConfigError(str(exc)) from exc
    filtered = apply_filter(image, mask)
    exported = np.clip(filtered, 0.0, 255.0)

    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    suffix = ".pgm" if image.shape[2] == 1 else ".ppm"
    before, after = dft2(image), dft2(exported)
    paths = {
        "filtered": out / f"filtered{suffix}",
        "mask": out / "mask.pgm",
        "spectrum_before": out / f"spectrum_before{suffix}",
        "spectrum_after": out / f"spectrum_after{suffix}",
    }
    try:
        write_pnm(paths["filtered"], exported)
        write_pnm(paths["mask"], mask * 255.0)
        write_pnm(paths["spectrum_before"], _view_pixels(before))
        write_pnm(paths["spectrum_after"], _view_pixels(after))
    except OSError as exc:
        raise InputError(f"cannot write outputs: {exc}") from exc
    energy_before = float(np.sum(amplitude(before) ** 2))
    energy_after = float(np.sum(amplitude(dft2(filtered)) ** 2))
    _emit(
        {
            "kind": kind,
            "radius": spec.radius,
            "inner": spec.inner,
            "outer": spec.outer,
            "energy_before": energy_before,
            "energy_after": energy_after,
            **{k: str(v) for k, v in paths.items()},
        }
    )
    return EXIT_OK


# -- recon --------------------------------------------------------------------


def cmd_recon(args):
    target_path = Path(args.target) if args.target else bundled_fixture()
    target = from_pixels(_read_image(target_path))
    if args.steps < 0:
        raise cfgmod.ConfigError("--steps must be non-negative")
    if not args.lr > 0:
        raise cfgmod.ConfigError("--lr must be positive")
    seed = cfgmod.seed_override()
    seed = args.seed if seed is None else seed
    result = single_image_reconstruct(
        target,
        distance=Distance(args.distance),
        steps=args.steps,
        lr=args.lr,
        seed=seed,
        snapshot_every=args.snapshot_every or None,
    )
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    suffix = ".pgm" if target.shape[2] == 1 else ".ppm"
    try:
        write_pnm(out / f"final{suffix}", to_pixels(result.image))
        for step, snap in result.snapshots.items():
            write_pnm(out / f"step_{step:06d}{suffix}", to_pixels(snap))
        _write_csv(out / "trace.csv", [{"step": i, "loss": v} for i, v in enumerate(result.trace)], ["step", "loss"])
        np.save(out / "final.npy", result.image)
    except OSError as exc:
        raise InputError(f"cannot write outputs: {exc}") from exc
    amp_t = amplitude(dft2(target))
    amp_f = amplitude(dft2(result.image))
    _emit(
        {
            "target": str(target_path),
            "distance": Distance(args.distance).value,
            "steps": args.steps,
            "seed": seed,
            "initial_loss": result.trace[0],
            "final_loss": result.trace[-1],
            "final_mse": float(np.mean((result.image - target) ** 2)),
            "amplitude_relative_error": float(np.linalg.norm(amp_f - amp_t) / np.linalg.norm(amp_t)),
        }
    )
    return EXIT_OK


# -- train --------------------------------------------------------------------


def cmd_train(args):
    doc = cfgmod.load(args.config)
    corpus, train_cfg = cfgmod.build(doc)
    result = train_autoencoder(corpus, train_cfg)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "format": "focalfreq-mlp-autoencoder",
        "image_shape": [corpus.size, corpus.size, corpus.channels],
        "hidden": train_cfg.hidden,
        "config": doc,
        "seeds": {"corpus": corpus.seed, "train": train_cfg.seed},
    }
    arrays = {name: getattr(result.model, name) for name in PARAM_NAMES}
    report = result.report.to_dict()
    try:
        write_model(out / "model.bin", arrays, meta)
        _write_csv(out / "traces.csv", result.traces, ["epoch", "mse", "ffl", "total"])
        (out / "metrics.json").write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise InputError(f"cannot write outputs: {exc}") from exc
    _emit({"output": str(out), "held_out": report, "final_epoch": result.traces[-1] if result.traces else None})
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _add_loss_flags(p):
    p.add_argument("--alpha", type=float, default=1.0, help="spectrum weight exponent (default 1)")
    p.add_argument("--patch-factor", type=int, default=1, help="crops per image edge (default 1)")
    p.add_argument("--transform", choices=["dft", "dct"], default="dft", help="spectral transform")
    p.add_argument(
        "--distance",
        choices=["full", "amplitude", "phase", "spatial"],
        default="full",
        help="per-coordinate distance; 'spatial' skips the transform",
    )
    p.add_argument("--no-focal", action="store_true", help="use unit weights instead of the spectrum weight matrix")
    p.add_argument("--ave-spectrum", action="store_true", help="compare batch-averaged spectra")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="focalfreq", description="Focal frequency loss tools.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="LFD/PSNR/SSIM and FFL between image pairs")
    p.add_argument("real", help="reference image, or directory of images")
    p.add_argument("fake", help="generated image, or directory paired by sorted name")
    _add_loss_flags(p)
    p.add_argument("--csv", metavar="PATH", help="also write per-pair rows and a mean row as CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("spectrum", help="write a spectrum file and its log-amplitude view")
    p.add_argument("image", help="image, or directory with --average")
    p.add_argument("-o", "--output", required=True, help="output path prefix")
    p.add_argument("--average", action="store_true", help="mean spectrum over all images in a directory")
    p.add_argument("--raw", action="store_true", help="skip orthonormalization")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("filter", help="band-limit an image in the centered spectrum")
    p.add_argument("image")
    p.add_argument("--kind", required=True, choices=["lowpass", "highpass", "bandstop", "notch", "notch-dc"])
    p.add_argument("--radius", type=float, help="lowpass/highpass radius (default min(H,W)/8)")
    p.add_argument("--inner", type=float, help="bandstop inner radius (default min(H,W)/8)")
    p.add_argument("--outer", type=float, help="bandstop outer radius (default min(H,W)/4)")
    p.add_argument("--point", action="append", metavar="ROW,COL", help="notch position in the centered frame (repeatable)")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("recon", help="reconstruct one image from noise under a frequency distance")
    p.add_argument("target", nargs="?", help="target image (default: bundled 64x64 texture)")
    p.add_argument("--distance", choices=["full", "amplitude", "phase"], default="full")
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0, help="noise seed (FFL_SEED overrides)")
    p.add_argument("--snapshot-every", type=int, default=0, metavar="K", help="save the image every K steps")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_recon)

    p = sub.add_parser("train", help="train the MLP autoencoder from a JSON config")
    p.add_argument("config", help="experiment config (JSON)")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_train)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        import logging

        logging.basicConfig(level=logging.DEBUG, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
