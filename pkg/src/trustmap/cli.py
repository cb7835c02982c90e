"""Command-line entry point.

Exit codes: 0 success, 1 usage or batch-file error, 2 data error (unreadable
or mismatched images), 3 batch finished with at least one failed case.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import harness, imgio
from .confidence import MapConfig, confidence_map, save_matrix
from .overlay import OverlayConfig, colormap_gray_to_heat, compose_fusion, compose_translation, dominance_fractions
from .perturb import KINDS, apply_noise
from .runconfig import COMMAND_INPUTS, BatchConfigError, RunConfig, StatsRecord, load_batch, write_stats

log = logging.getLogger("trustmap")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PARTIAL = 0, 1, 2, 3


class DataError(Exception):
    pass


def _load_inputs(paths: dict[str, Path], cfg: RunConfig):
    images = {}
    for key, path in paths.items():
        try:
            images[key] = imgio.load_gray(path, normalize=cfg.normalize)
        except (OSError, ValueError) as exc:
            raise DataError(f"{key}: {exc}") from None
    shapes = {img.shape for img in images.values()}
    if len(shapes) > 1:
        detail = ", ".join(f"{k}={v.shape[1]}x{v.shape[0]}" for k, v in images.items())
        raise DataError(f"input images differ in size: {detail}")
    mask = None
    if cfg.mask is not None:
        try:
            mask = imgio.load_gray(cfg.mask) >= 0.5
        except (OSError, ValueError) as exc:
            raise DataError(f"mask: {exc}") from None
        if mask.shape != next(iter(images.values())).shape:
            raise DataError(f"mask size {mask.shape[1]}x{mask.shape[0]} differs from the inputs")
        if not mask.any():
            raise DataError("mask selects no pixels")
    return images, mask


def _map(src, tgt, cfg: RunConfig) -> np.ndarray:
    try:
        return confidence_map(src, tgt, MapConfig(W=cfg.patch, B=cfg.bins), workers=cfg.workers)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def _summary(case, command, name, scores, mask, **extra) -> StatsRecord:
    vals = scores[mask] if mask is not None else scores.ravel()
    return StatsRecord(
        case=case, command=command, map=name,
        mean=float(vals.mean()), min=float(vals.min()), max=float(vals.max()),
        frac_ge_half=float(np.mean(vals >= 0.5)), **extra,
    )


def _write_map(out: Path, name: str, scores: np.ndarray) -> None:
    imgio.save_png(scores, out / f"{name}.png")
    imgio.save_png(colormap_gray_to_heat(scores), out / f"{name}_heat.png")
    save_matrix(scores, out / f"{name}.txt")


def run_map(inputs, cfg: RunConfig, out: Path, case: str = "run") -> list[StatsRecord]:
    images, mask = _load_inputs(inputs, cfg)
    scores = _map(images["source"], images["target"], cfg)
    rec = _summary(case, "map", "confidence", scores, mask)
    out.mkdir(parents=True, exist_ok=True)
    _write_map(out, "confidence", scores)
    write_stats(out / "stats.tsv", [rec])
    return [rec]


def run_fusion_eval(inputs, cfg: RunConfig, out: Path, case: str = "run") -> list[StatsRecord]:
    images, mask = _load_inputs(inputs, cfg)
    fused = images["fused"]
    s_mri = _map(images["mri"], fused, cfg)
    s_pet = _map(images["pet"], fused, cfg)
    rgb = compose_fusion(s_mri, s_pet, fused, OverlayConfig(cfg.alpha))
    recs = [
        _summary(case, "fusion-eval", "s_mri", s_mri, mask),
        _summary(case, "fusion-eval", "s_pet", s_pet, mask),
    ]
    out.mkdir(parents=True, exist_ok=True)
    _write_map(out, "s_mri", s_mri)
    _write_map(out, "s_pet", s_pet)
    imgio.save_png(rgb, out / "overlay.png")
    write_stats(out / "stats.tsv", recs)
    return recs


def run_translation_eval(inputs, cfg: RunConfig, out: Path, case: str = "run") -> list[StatsRecord]:
    images, mask = _load_inputs(inputs, cfg)
    pred = images["predicted"]
    s_t2 = _map(images["source"], pred, cfg)
    s_t1 = _map(images["reference"], pred, cfg)
    rgb = compose_translation(s_t2, s_t1, pred, OverlayConfig(cfg.alpha))
    sel = mask if mask is not None else np.ones(pred.shape, dtype=bool)
    frac = dominance_fractions(s_t2[sel], s_t1[sel])
    extra = {f"frac_{k}": v for k, v in frac.items()}
    recs = [
        _summary(case, "translation-eval", "s_t2", s_t2, mask, **extra),
        _summary(case, "translation-eval", "s_t1", s_t1, mask, **extra),
    ]
    out.mkdir(parents=True, exist_ok=True)
    _write_map(out, "s_t2", s_t2)
    _write_map(out, "s_t1", s_t1)
    imgio.save_png(rgb, out / "overlay.png")
    write_stats(out / "stats.tsv", recs)
    return recs


def _dirname(label: str) -> str:
    return label.replace(":", "_").replace(",", "_").replace("=", "-")


def run_perturb(inputs, cfg: RunConfig, out: Path, case: str = "run") -> list[StatsRecord]:
    specs = cfg.noise_specs()
    if not specs:
        raise ValueError("perturbation study needs at least one noise spec")
    images, mask = _load_inputs(inputs, cfg)
    mri, pet, fused = images["mri"], images["pet"], images["fused"]
    ocfg = OverlayConfig(cfg.alpha)

    base = {"s_mri": _map(mri, fused, cfg), "s_pet": _map(pet, fused, cfg)}
    recs = [_summary(case, "perturb", k, v, mask, delta_mean=0.0) for k, v in base.items()]
    results = []
    for spec in specs:
        noisy = apply_noise(fused, spec)
        maps = {"s_mri": _map(mri, noisy, cfg), "s_pet": _map(pet, noisy, cfg)}
        for name, scores in maps.items():
            rec = _summary(case, "perturb", name, scores, mask, noise=spec.label())
            rec.delta_mean = rec.mean - recs[0 if name == "s_mri" else 1].mean
            recs.append(rec)
        results.append((spec, noisy, maps))

    out.mkdir(parents=True, exist_ok=True)
    for name, scores in base.items():
        _write_map(out, name, scores)
    imgio.save_png(compose_fusion(base["s_mri"], base["s_pet"], fused, ocfg), out / "overlay.png")
    for spec, noisy, maps in results:
        sub = out / _dirname(spec.label())
        sub.mkdir(exist_ok=True)
        imgio.save_png(noisy, sub / "fused.png")
        for name, scores in maps.items():
            _write_map(sub, name, scores)
        imgio.save_png(compose_fusion(maps["s_mri"], maps["s_pet"], noisy, ocfg), sub / "overlay.png")
    write_stats(out / "stats.tsv", recs)
    return recs


RUNNERS = {
    "map": run_map,
    "fusion-eval": run_fusion_eval,
    "translation-eval": run_translation_eval,
    "perturb": run_perturb,
}


def run_batch(path, out: Path | None = None) -> int:
    """Run every case of a batch file; returns the process exit code."""
    batch = load_batch(path)
    out = out if out is not None else Path(path).parent / "results"
    out.mkdir(parents=True, exist_ok=True)
    table = out / "stats.tsv"
    write_stats(table, [])
    failed = 0
    for case in batch.cases:
        try:
            recs = RUNNERS[case.command](case.inputs, case.config, out / case.name, case.name)
        except (DataError, ValueError) as exc:
            failed += 1
            log.error("case %s failed: %s", case.name, exc)
            recs = [StatsRecord(case=case.name, command=case.command, map="-", status="failed", error=str(exc))]
        write_stats(table, recs, append=True)
    return EXIT_PARTIAL if failed else EXIT_OK


def emit_harness(out: Path, size: int = 64, seed: int = 0) -> None:
    """Write fixture images and a matching batch file into ``out``."""
    pair = harness.make_synthetic_pair(size, size, seed)
    fused = harness.average_fuse(pair.structural, pair.functional)
    noise = harness.independent_noise(fused.shape, seed)
    # Near-faithful translation of the functional image.
    predicted = np.clip(pair.functional + 0.02 * (noise - 0.5), 0.0, 1.0)
    out.mkdir(parents=True, exist_ok=True)
    for name, img in [
        ("structural", pair.structural), ("functional", pair.functional),
        ("fused_average", fused), ("noise", noise), ("predicted", predicted),
    ]:
        imgio.save_png(img, out / f"{name}.png")
    (out / "batch.ini").write_text(
        "[batch]\n"
        "schema = 1\n"
        f"seed = {seed}\n\n"
        "[case map-self]\ncommand = map\nsource = structural.png\ntarget = structural.png\n\n"
        "[case map-noise]\ncommand = map\nsource = structural.png\ntarget = noise.png\n\n"
        "[case fusion]\ncommand = fusion-eval\nmri = structural.png\npet = functional.png\n"
        "fused = fused_average.png\n\n"
        "[case translation]\ncommand = translation-eval\nsource = structural.png\n"
        "reference = functional.png\npredicted = predicted.png\n\n"
        "[case perturb]\ncommand = perturb\nmri = structural.png\npet = functional.png\n"
        "fused = fused_average.png\n"
    )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    d = RunConfig()
    p.add_argument("--patch", "-W", type=int, default=d.patch, help="odd patch size (default %(default)s)")
    p.add_argument("--bins", "-B", type=int, default=d.bins, help="intensity bins (default %(default)s)")
    p.add_argument("--alpha", type=float, default=d.alpha, help="overlay blend weight (default %(default)s)")
    p.add_argument("--seed", type=int, default=d.seed, help="noise seed (default %(default)s)")
    p.add_argument("--mask", type=Path, help="binary PNG restricting the stats")
    p.add_argument("--normalize", action="store_true", help="stretch each input to span [0, 1]")
    p.add_argument("--workers", type=int, default=d.workers, help="threads per confidence map")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="trustmap", description="Confidence heat maps for fused and translated images.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("map", help="confidence map between a source and a target image")
    p.add_argument("source", type=Path)
    p.add_argument("target", type=Path)
    _common(p)

    p = sub.add_parser("fusion-eval", help="both source maps and the fusion overlay")
    p.add_argument("mri", type=Path)
    p.add_argument("pet", type=Path)
    p.add_argument("fused", type=Path)
    _common(p)

    p = sub.add_parser("translation-eval", help="source/reference maps and the translation overlay")
    p.add_argument("source", type=Path)
    p.add_argument("reference", type=Path)
    p.add_argument("predicted", type=Path)
    _common(p)

    p = sub.add_parser("perturb", help="noise perturbation study of a fused image")
    p.add_argument("mri", type=Path)
    p.add_argument("pet", type=Path)
    p.add_argument("fused", type=Path)
    p.add_argument(
        "--noise", action="append", dest="noises", metavar="KIND[:k=v,...]",
        help=f"repeatable; kinds: {', '.join(KINDS)} (default: all five)",
    )
    _common(p)

    p = sub.add_parser("batch", help="run the cases listed in an INI batch file")
    p.add_argument("config", type=Path)
    p.add_argument("--out", type=Path, help="output directory (default: results/ next to the batch file)")

    p = sub.add_parser("harness", help="write synthetic fixture images and a batch file")
    p.add_argument("--out", type=Path, default=Path("fixtures"))
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("config-dump", help="print the resolved run configuration as JSON")
    p.add_argument("--noise", action="append", dest="noises", metavar="KIND[:k=v,...]")
    _common(p)
    return ap


def _run_config(args) -> RunConfig:
    cfg = RunConfig(
        patch=args.patch, bins=args.bins, alpha=args.alpha, seed=args.seed,
        normalize=args.normalize, mask=args.mask, workers=args.workers,
    )
    if getattr(args, "noises", None) is not None:
        cfg = replace(cfg, noises=tuple(args.noises))
    # Validate eagerly so bad flags are usage errors, not data errors.
    MapConfig(W=cfg.patch, B=cfg.bins)
    OverlayConfig(cfg.alpha)
    cfg.noise_specs()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")

    if args.command == "batch":
        try:
            return run_batch(args.config, args.out)
        except BatchConfigError as exc:
            print(f"trustmap: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if args.command == "harness":
        try:
            emit_harness(args.out, args.size, args.seed)
        except ValueError as exc:
            print(f"trustmap: {exc}", file=sys.stderr)
            return EXIT_USAGE
        return EXIT_OK

    try:
        cfg = _run_config(args)
    except ValueError as exc:
        print(f"trustmap: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "config-dump":
        print(json.dumps(cfg.dump(), indent=2, sort_keys=True))
        return EXIT_OK

    inputs = {key: getattr(args, key) for key in COMMAND_INPUTS[args.command]}
    try:
        recs = RUNNERS[args.command](inputs, cfg, args.out)
    except DataError as exc:
        print(f"trustmap: {exc}", file=sys.stderr)
        return EXIT_DATA
    for rec in recs:
        label = rec.map if rec.noise == "none" else f"{rec.map}@{rec.noise}"
        print(f"{label}\tmean={rec.mean:.4f}\tmin={rec.min:.4f}\tmax={rec.max:.4f}\tfrac>=0.5={rec.frac_ge_half:.4f}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
