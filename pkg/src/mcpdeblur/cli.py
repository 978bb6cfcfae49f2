"""Command-line front ends.

`deblur` runs the blind pipeline, `deblur-synthesize` fabricates test
inputs with a known kernel and noise level, `deblur-score` compares a
restoration against its reference. Solver flags may also come from a JSON
config file given by --config or the DEBLUR_CONFIG environment variable;
explicit flags win over the file, the file wins over built-in defaults.

Exit codes: 0 success, 2 bad parameters or config, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import os
import sys

import numpy as np

from .core import DeblurError, SolverConfig, validate_config
from .fileio import (ensure_dir, load_image, load_kernel_txt, save_image,
                     save_kernel_png, save_kernel_txt)
from .metrics import psnr, shift_aligned_score, ssim
from .pipeline import blind_deblur
from .synth import make_named_kernel, synthesize

_CONFIG_KEYS = ("gamma", "lam", "sigma", "nu", "eta", "kappa", "mu_max",
                "beta_max", "xi_max", "epsilon", "weight_epsilon",
                "kernel_size", "outer_iters", "pyramid_scale", "prune_kernel")


def _load_config_file(path: str | None) -> dict:
    if path is None:
        path = os.environ.get("DEBLUR_CONFIG") or None
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError:
        raise
    except ValueError as exc:
        raise DeblurError(f"config file {path!r} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise DeblurError(f"config file {path!r} must hold a JSON object")
    out = {}
    for key, value in raw.items():
        name = {"lambda": "lam"}.get(key, key)
        if name not in _CONFIG_KEYS:
            raise DeblurError(f"unknown config key {key!r}")
        out[name] = value
    return out


def _build_config(args, overrides: dict) -> SolverConfig:
    merged = dict(overrides)
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if "kernel_size" in merged:
        ks = merged["kernel_size"]
        if isinstance(ks, int):
            ks = (ks, ks)
        merged["kernel_size"] = (int(ks[0]), int(ks[1]))
    try:
        return validate_config(SolverConfig(**merged))
    except TypeError as exc:
        raise DeblurError(str(exc))


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    add = parser.add_argument
    add("--kernel-size", dest="kernel_size", type=int, default=None,
        help="estimated kernel support (odd), e.g. 17")
    add("--gamma", type=float, default=None, help="latent ridge weight [0.1]")
    add("--lambda", dest="lam", type=float, default=None,
        help="prior weight [0.004]")
    add("--sigma", type=float, default=None,
        help="framelet/gradient balance [1.0]")
    add("--nu", type=float, default=None, help="kernel ridge weight [0.001]")
    add("--eta", type=float, default=None,
        help="kernel gradient sparsity weight [0.005]")
    add("--kappa", type=float, default=None,
        help="continuation growth factor [2.0]")
    add("--mu-max", dest="mu_max", type=float, default=None,
        help="gradient-split penalty cap [1e5]")
    add("--beta-max", dest="beta_max", type=float, default=None,
        help="framelet-split penalty cap [1e5]")
    add("--xi-max", dest="xi_max", type=float, default=None,
        help="kernel-split penalty cap [1.0]")
    add("--epsilon", type=float, default=None,
        help="relaxation constant [1e-6]")
    add("--pyramid-scale", dest="pyramid_scale", type=float, default=None,
        help="per-level shrink factor [0.7071]")
    add("--outer-iters", dest="outer_iters", type=int, default=None,
        help="alternations per pyramid level [5]")
    add("--config", default=None,
        help="JSON file of solver parameters (DEBLUR_CONFIG is the fallback)")


def _write_traces(path: str, records: list[dict]) -> None:
    keys = ["stage"]
    for rec in records:
        for key in rec:
            if key not in keys:
                keys.append(key)
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys, restval="")
        writer.writeheader()
        writer.writerows(records)


def _score_row(name: str, restored: np.ndarray, reference: np.ndarray,
               max_shift: int) -> dict:
    if restored.ndim == 3:
        restored = restored.mean(axis=2)
    if reference.ndim == 3:
        reference = reference.mean(axis=2)
    p = shift_aligned_score(restored, reference, max_shift, metric=psnr)
    s = shift_aligned_score(restored, reference, max_shift, metric=ssim)
    return {"image": name, "psnr": f"{p.value:.6f}",
            "psnr_dx": p.best_shift[0], "psnr_dy": p.best_shift[1],
            "ssim": f"{s.value:.6f}",
            "ssim_dx": s.best_shift[0], "ssim_dy": s.best_shift[1]}


def _write_scores(path: str, rows: list[dict]) -> None:
    fields = ["image", "psnr", "psnr_dx", "psnr_dy",
              "ssim", "ssim_dx", "ssim_dy"]
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def _deblur_one(in_path: str, out_dir: str, cfg: SolverConfig, args) -> dict | None:
    y = load_image(in_path)
    result = blind_deblur(y, cfg, collect_levels=args.dump_levels)
    ensure_dir(out_dir)
    save_image(os.path.join(out_dir, "x_final.png"), result.x)
    save_kernel_txt(os.path.join(out_dir, "kernel.txt"), result.kernel)
    save_kernel_png(os.path.join(out_dir, "kernel.png"), result.kernel)
    if args.dump_traces:
        _write_traces(os.path.join(out_dir, "traces.csv"), result.traces)
    if args.dump_levels:
        for idx, snap in enumerate(result.levels):
            save_image(os.path.join(out_dir, f"level_{idx:02d}_x.png"),
                       snap["x"])
            save_kernel_txt(
                os.path.join(out_dir, f"level_{idx:02d}_kernel.txt"),
                snap["kernel"])
    if args.reference:
        reference = load_image(args.reference)
        return _score_row(os.path.basename(in_path), result.x, reference,
                          args.max_shift)
    return None


def main_deblur(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="deblur",
        description="Blind image deblurring with a concave framelet prior.")
    parser.add_argument("--input", nargs="+", required=True,
                        help="input image path(s); several run as a batch")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--reference", default=None,
                        help="sharp reference for scoring the result")
    parser.add_argument("--max-shift", dest="max_shift", type=int, default=3,
                        help="alignment search radius for scoring [3]")
    parser.add_argument("--dump-traces", dest="dump_traces",
                        action="store_true", help="write traces.csv")
    parser.add_argument("--dump-levels", dest="dump_levels",
                        action="store_true",
                        help="write per-level images and kernels")
    parser.add_argument("--jobs", type=int, default=1,
                        help="concurrent workers for batch inputs [1]")
    _add_solver_flags(parser)
    args = parser.parse_args(argv)
    try:
        cfg = _build_config(args, _load_config_file(args.config))
        multi = len(args.input) > 1
        jobs = max(1, args.jobs)
        tasks = []
        for in_path in args.input:
            stem = os.path.splitext(os.path.basename(in_path))[0]
            out_dir = os.path.join(args.out, stem) if multi else args.out
            tasks.append((in_path, out_dir))
        rows = []
        if jobs == 1 or len(tasks) == 1:
            for in_path, out_dir in tasks:
                row = _deblur_one(in_path, out_dir, cfg, args)
                if row:
                    rows.append(row)
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_deblur_one, p, d, cfg, args)
                           for p, d in tasks]
                for future in futures:
                    row = future.result()
                    if row:
                        rows.append(row)
        if rows:
            ensure_dir(args.out)
            _write_scores(os.path.join(args.out, "scores.csv"), rows)
    except DeblurError as exc:
        print(f"deblur: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"deblur: {exc}", file=sys.stderr)
        return 3
    return 0


def main_synthesize(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="deblur-synthesize",
        description="Blur a sharp image with a known kernel and add noise.")
    parser.add_argument("--input", required=True, help="sharp source image")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--kernel", required=True,
                        help="kernel file, or generator spec: delta, box:N, "
                             "gaussian:SIGMA, motion:LENGTH,ANGLE")
    parser.add_argument("--kernel-size", dest="kernel_size", type=int,
                        default=None, help="support override for generators")
    parser.add_argument("--noise-sigma", dest="noise_sigma", type=float,
                        default=0.0, help="additive Gaussian noise std [0]")
    parser.add_argument("--seed", type=int, default=0,
                        help="noise RNG seed [0]")
    args = parser.parse_args(argv)
    try:
        sharp = load_image(args.input)
        if os.path.exists(args.kernel):
            kernel = load_kernel_txt(args.kernel)
        else:
            kernel = make_named_kernel(args.kernel, args.kernel_size)
        y = synthesize(sharp, kernel, args.noise_sigma, seed=args.seed)
        ensure_dir(args.out)
        save_image(os.path.join(args.out, "y.png"), y)
        save_kernel_txt(os.path.join(args.out, "kernel_true.txt"), kernel)
        save_kernel_png(os.path.join(args.out, "kernel_true.png"), kernel)
    except DeblurError as exc:
        print(f"deblur-synthesize: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"deblur-synthesize: {exc}", file=sys.stderr)
        return 3
    return 0


def main_score(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="deblur-score",
        description="Shift-aligned PSNR/SSIM of a restoration.")
    parser.add_argument("--restored", required=True)
    parser.add_argument("--reference", required=True)
    parser.add_argument("--max-shift", dest="max_shift", type=int, default=3,
                        help="alignment search radius [3]")
    parser.add_argument("--out", default=None,
                        help="CSV path; prints to stdout when omitted")
    args = parser.parse_args(argv)
    try:
        restored = load_image(args.restored)
        reference = load_image(args.reference)
        row = _score_row(os.path.basename(args.restored), restored,
                         reference, args.max_shift)
        if args.out:
            _write_scores(args.out, [row])
        else:
            print(",".join(str(row[k]) for k in
                           ("image", "psnr", "psnr_dx", "psnr_dy",
                            "ssim", "ssim_dx", "ssim_dy")))
    except DeblurError as exc:
        print(f"deblur-score: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"deblur-score: {exc}", file=sys.stderr)
        return 3
    return 0
