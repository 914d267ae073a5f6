"""text-superres CLI.

This module provides the command-line interface: synthetic degradation,
training, inference, metric evaluation and the gradient check.
"""

__all__ = [
    "DEFAULT_CONFIG",
    "load_config",
    "resolve_options",
    "write_manifest",
    "create_parser",
    "cmd_degrade",
    "cmd_train",
    "cmd_infer",
    "cmd_eval_iqa",
    "cmd_eval_ocr",
    "cmd_gradcheck",
    "parse_args",
    "main",
]

import argparse
import copy
import csv
import functools
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from text_superres.degrade import degrade_pair, pair_seed, random_degrade_config
from text_superres.exceptions import ImageIOError, InvalidArgumentError, TextSRError
from text_superres.imagecore import read_png, sample_patch_pairs, to_luma, write_png
from text_superres.iqa import evaluate_many
from text_superres.modelfile import save_model
from text_superres.models import (
    BlurKind,
    Command,
    DegradeConfig,
    ImageBuffer,
    RunManifest,
    TrainConfig,
    TrainMode,
)
from text_superres.network import PRESETS, preset_config
from text_superres.ocreval import (
    DEFAULT_ENGINE,
    average_comparisons,
    evaluate_directories,
    matching_images,
)
from text_superres.pipeline import infer
from text_superres.train import GRADCHECK_EPS, GRADCHECK_TOL, gradient_check, train
from text_superres.version import get_version

# Setup logging
logging.basicConfig(
    level=logging.INFO,
    format="%(message)s",
    handlers=[RichHandler(rich_tracebacks=True, show_time=False, show_level=False)],
)
logger = logging.getLogger("text_superres")

console = Console()

DEFAULT_CONFIG_DIR = Path.home() / ".config" / "text-superres"
DEFAULT_CONFIG_FILE = DEFAULT_CONFIG_DIR / "config.json"
DEFAULT_CONFIG: Dict[str, Dict[str, Any]] = {
    "degrade": {
        "input": None,
        "output": None,
        "kind": "motion",
        "scale": 2,
        "length": None,
        "angle": None,
        "radius": None,
        "seed": 0,
    },
    "train": {
        "data": None,
        "output": None,
        "log": None,
        "mode": "sdt",
        "scale": 2,
        "steps": 1000,
        "batch": 20,
        "lr": 0.002,
        "patch": 32,
        "patches_per_image": 20,
        "dropout_keep": 0.8,
        "profile": "sdt",
        "seed": 0,
    },
    "infer": {
        "model": None,
        "input": None,
        "output": None,
        "bicubic": False,
        "scale": None,
    },
    "eval-iqa": {"ref_dir": None, "test_dir": None, "output": None, "jobs": None},
    "eval-ocr": {
        "ref_dir": None,
        "test_dir": None,
        "output": None,
        "engine": DEFAULT_ENGINE,
        "jobs": None,
    },
    "gradcheck": {
        "eps": GRADCHECK_EPS,
        "tol": GRADCHECK_TOL,
        "seed": 0,
        "output": None,
    },
}

DEGRADE_MANIFEST = "manifest.csv"
DEGRADE_FIELDS = ["stem", "kind", "length", "angle", "radius", "scale", "seed"]
IO_EXIT_CODE = ImageIOError.exit_code


def load_config(
    path: Optional[Path] = None, command: Optional[str] = None
) -> Dict[str, Dict[str, Any]]:
    """Load per-command settings from a JSON file.

    The file holds one object per command name. A run manifest is accepted
    too; its ``config`` is applied to its ``command``.

    Args:
        path: Config file; the user config file when omitted.
        command: Command about to run. A run manifest recorded by another
            command is ignored with a warning.

    Returns:
        Settings keyed by command name (empty when nothing could be loaded).
    """
    explicit = path is not None
    path = Path(path) if explicit else DEFAULT_CONFIG_FILE
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        if explicit:
            logger.warning("Config file %s not found, using defaults.", path)
        return {}
    except json.JSONDecodeError:
        logger.error("Invalid config file format in %s, using defaults.", path)
        return {}
    except OSError as e:
        logger.warning("Failed to load config %s: %s", path, e)
        return {}

    if not isinstance(data, dict):
        logger.error("Config file %s must hold a JSON object, using defaults.", path)
        return {}
    if {"command", "config", "tool_version"} <= set(data):
        manifest = RunManifest.from_dict(data)
        if command is not None and manifest.command.value != command:
            logger.warning(
                "Run manifest %s records a '%s' run; ignoring it for '%s'.",
                path,
                manifest.command.value,
                command,
            )
            return {}
        logger.debug("Replaying %s run recorded by version %s", manifest.command.value, manifest.tool_version)
        return {manifest.command.value: manifest.config}
    return {k: v for k, v in data.items() if isinstance(v, dict)}


def resolve_options(args: argparse.Namespace, command: str) -> Dict[str, Any]:
    """Merge built-in defaults, the config file and command-line flags.

    Flags win over the config file, which wins over the defaults.

    Raises:
        InvalidArgumentError: If the config file names unknown options.
    """
    options = copy.deepcopy(DEFAULT_CONFIG[command])
    file_options = load_config(getattr(args, "config", None), command).get(command, {})
    unknown = sorted(set(file_options) - set(options))
    if unknown:
        raise InvalidArgumentError(f"unknown {command} options in config: {', '.join(unknown)}")
    options.update(file_options)
    for key in options:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            options[key] = value
    return options


def _require(options: Dict[str, Any], *keys: str) -> None:
    missing = [k for k in keys if options.get(k) in (None, "")]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise InvalidArgumentError(f"missing required option(s): {flags}")


def write_manifest(path: Path, command: Command, options: Dict[str, Any]) -> Path:
    """Write the resolved options of a run next to its outputs."""
    manifest = RunManifest(
        command=command,
        config=options,
        seed=options.get("seed"),
        tool_version=get_version(),
    )
    path = Path(path)
    path.write_text(manifest.to_json(), encoding="utf-8")
    logger.debug("Wrote run manifest %s", path)
    return path


def _format_metric(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.6f}"


def _write_csv(path: Path, header: Sequence[str], rows: List[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def add_common_arguments(parser):
    """Add common arguments to a parser.

    Args:
        parser: Parser to add arguments to.
    """
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        default=argparse.SUPPRESS,
        help="Enable verbose output",
    )
    parser.add_argument(
        "--config",
        type=Path,
        help="JSON config file or run manifest (default: ~/.config/text-superres/config.json)",
    )


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser for the CLI.

    Every option defaults to None so that config-file values can fill it.

    Returns:
        Configured argument parser.
    """
    cli_version = get_version()

    parser = argparse.ArgumentParser(
        prog="textsr",
        description=f"text-superres v{cli_version} - super-resolution and deblurring of text images",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable verbose output")
    parser.add_argument("--version", action="version", version=f"%(prog)s {cli_version}")

    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    # degrade
    degrade_parser = subparsers.add_parser(
        "degrade", help="Generate blurred low-resolution / sharp high-resolution pairs"
    )
    add_common_arguments(degrade_parser)
    degrade_parser.add_argument("--in", dest="input", help="Directory of sharp PNG images")
    degrade_parser.add_argument("--out", dest="output", help="Output directory for the pairs")
    degrade_parser.add_argument("--kind", choices=[k.value for k in BlurKind], help="Blur family")
    degrade_parser.add_argument("--scale", type=int, choices=[1, 2, 4], help="Downscale factor")
    degrade_parser.add_argument("--length", type=float, help="Motion blur length in pixels")
    degrade_parser.add_argument("--angle", type=float, help="Motion blur angle in degrees")
    degrade_parser.add_argument("--radius", type=float, help="Defocus blur radius in pixels")
    degrade_parser.add_argument("--seed", type=int, help="Random seed")

    # train
    train_parser = subparsers.add_parser("train", help="Train a model on degraded pairs")
    add_common_arguments(train_parser)
    train_parser.add_argument("--data", help="Directory written by 'degrade'")
    train_parser.add_argument("--out", dest="output", help="Model file to write (.sdtd)")
    train_parser.add_argument("--log", help="Loss log CSV (default: <out>.log.csv)")
    train_parser.add_argument("--mode", choices=[m.value for m in TrainMode], help="Training pipeline")
    train_parser.add_argument("--scale", type=int, choices=[2, 4], help="Upscale factor")
    train_parser.add_argument("--steps", type=int, help="Number of optimizer steps")
    train_parser.add_argument("--batch", type=int, help="Patches per mini-batch")
    train_parser.add_argument("--lr", type=float, help="Adam learning rate")
    train_parser.add_argument("--patch", type=int, help="LR patch size in pixels")
    train_parser.add_argument(
        "--patches-per-image", type=int, dest="patches_per_image", help="Patches cropped per image"
    )
    train_parser.add_argument(
        "--dropout-keep", type=float, dest="dropout_keep", help="Dropout keep probability"
    )
    train_parser.add_argument("--profile", choices=list(PRESETS), help="Architecture profile")
    train_parser.add_argument("--seed", type=int, help="Random seed")

    # infer
    infer_parser = subparsers.add_parser("infer", help="Upscale an image with a trained model")
    add_common_arguments(infer_parser)
    infer_parser.add_argument("--model", help="Model file (.sdtd)")
    infer_parser.add_argument("--in", dest="input", help="Input PNG")
    infer_parser.add_argument("--out", dest="output", help="Output PNG")
    infer_parser.add_argument(
        "--bicubic",
        action="store_true",
        default=None,
        help="Write the bicubic baseline instead of the network output",
    )
    infer_parser.add_argument(
        "--scale", type=int, choices=[2, 4], help="Factor for --bicubic without a model"
    )

    # eval-iqa
    iqa_parser = subparsers.add_parser("eval-iqa", help="PSNR/SSIM/IFC/VIF of restored images")
    add_common_arguments(iqa_parser)
    iqa_parser.add_argument("--ref-dir", dest="ref_dir", help="Reference images")
    iqa_parser.add_argument("--test-dir", dest="test_dir", help="Restored images")
    iqa_parser.add_argument("--out", dest="output", help="Report CSV")
    iqa_parser.add_argument("--jobs", type=int, help="Parallel workers")

    # eval-ocr
    ocr_parser = subparsers.add_parser("eval-ocr", help="OCR fidelity of restored images")
    add_common_arguments(ocr_parser)
    ocr_parser.add_argument("--ref-dir", dest="ref_dir", help="Reference images")
    ocr_parser.add_argument("--test-dir", dest="test_dir", help="Restored images")
    ocr_parser.add_argument("--engine", help="OCR command template containing {input}")
    ocr_parser.add_argument("--out", dest="output", help="Report CSV")
    ocr_parser.add_argument("--jobs", type=int, help="Concurrent OCR processes")

    # gradcheck
    gradcheck_parser = subparsers.add_parser(
        "gradcheck", help="Check backpropagation against finite differences"
    )
    add_common_arguments(gradcheck_parser)
    gradcheck_parser.add_argument("--eps", type=float, help="Finite-difference step")
    gradcheck_parser.add_argument("--tol", type=float, help="Maximum relative error")
    gradcheck_parser.add_argument("--seed", type=int, help="Random seed")
    gradcheck_parser.add_argument("--out", dest="output", help="Optional report CSV")

    return parser


def handle_errors(func):
    """Decorator to handle common errors."""

    @functools.wraps(func)
    def wrapper(args):
        try:
            func(args)
        except TextSRError as e:
            console.print(f"[red]Error: {e}[/red]")
            sys.exit(e.exit_code)
        except OSError as e:
            logger.debug("I/O failure", exc_info=True)
            console.print(f"[red]Error: {e}[/red]")
            sys.exit(IO_EXIT_CODE)
        except Exception as e:
            logger.debug("Unexpected error", exc_info=True)
            console.print(f"[red]Error: {e}[/red]")
            sys.exit(1)

    return wrapper


_BLUR_PARAMETERS = {
    BlurKind.NONE: (),
    BlurKind.MOTION: ("length", "angle"),
    BlurKind.DEFOCUS: ("radius",),
}


def _degrade_config(options: Dict[str, Any], index: int) -> DegradeConfig:
    """Blur parameters of pair ``index``.

    Explicit parameters win; the rest of the family is drawn per pair.

    Raises:
        InvalidArgumentError: If a parameter of another blur family is given.
    """
    kind = BlurKind(options["kind"])
    scale = options["scale"]
    seed = options["seed"]
    explicit = {k: options[k] for k in ("length", "angle", "radius") if options[k] is not None}
    foreign = sorted(set(explicit) - set(_BLUR_PARAMETERS[kind]))
    if foreign:
        flags = ", ".join("--" + k for k in foreign)
        raise InvalidArgumentError(f"{flags} does not apply to blur kind '{kind.value}'")
    if kind is BlurKind.NONE:
        return DegradeConfig(kind=kind, scale=scale, seed=pair_seed(seed, index))
    drawn = random_degrade_config(kind, scale, seed, index)
    return replace(drawn, **{k: float(v) for k, v in explicit.items()})


def _crop_to_multiple(img: ImageBuffer, scale: int, name: str) -> ImageBuffer:
    width = img.width - img.width % scale
    height = img.height - img.height % scale
    if (width, height) == img.size:
        return img
    if width == 0 or height == 0:
        raise InvalidArgumentError(f"{name} is smaller than the scale factor {scale}")
    logger.warning(
        "Cropping %s from %dx%d to %dx%d to fit scale %d",
        name,
        img.width,
        img.height,
        width,
        height,
        scale,
    )
    return ImageBuffer(img.data[:, :height, :width], img.colorspace)


@handle_errors
def cmd_degrade(args: argparse.Namespace) -> None:
    """Generate training pairs from a directory of sharp images.

    Args:
        args: Command line arguments.
    """
    options = resolve_options(args, "degrade")
    _require(options, "input", "output")
    in_dir = Path(options["input"])
    out_dir = Path(options["output"])
    if not in_dir.is_dir():
        raise InvalidArgumentError(f"not a directory: {in_dir}")
    sources = sorted(in_dir.glob("*.png"))
    if not sources:
        raise InvalidArgumentError(f"no PNG images in {in_dir}")
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for index, source in enumerate(sources):
        cfg = _degrade_config(options, index)
        sharp = _crop_to_multiple(to_luma(read_png(source)), cfg.scale, source.name)
        lr, hr = degrade_pair(sharp, cfg)
        write_png(lr, out_dir / f"{source.stem}_lr.png")
        write_png(hr, out_dir / f"{source.stem}_hr.png")
        rows.append(
            [source.stem, cfg.kind.value, cfg.length, cfg.angle, cfg.radius, cfg.scale, cfg.seed]
        )
        logger.debug("Degraded %s with %s", source.name, cfg)

    _write_csv(out_dir / DEGRADE_MANIFEST, DEGRADE_FIELDS, rows)
    write_manifest(out_dir / "degrade.manifest.json", Command.DEGRADE, options)
    console.print(f"Wrote {len(rows)} pairs to {out_dir}")


def _load_training_pairs(data_dir: Path, scale: int):
    pairs = []
    for lr_path in sorted(data_dir.glob("*_lr.png")):
        hr_path = lr_path.with_name(lr_path.name[: -len("_lr.png")] + "_hr.png")
        if not hr_path.exists():
            logger.warning("Skipping %s: no matching %s", lr_path.name, hr_path.name)
            continue
        lr = to_luma(read_png(lr_path))
        hr = to_luma(read_png(hr_path))
        if hr.size != (lr.width * scale, lr.height * scale):
            raise InvalidArgumentError(
                f"{hr_path.name} is not {scale}x the size of {lr_path.name}"
            )
        pairs.append((lr, hr))
    if not pairs:
        raise InvalidArgumentError(f"no *_lr.png / *_hr.png pairs in {data_dir}")
    return pairs


def _check_mode_matches_data(data_dir: Path, mode: TrainMode) -> None:
    manifest = data_dir / DEGRADE_MANIFEST
    if not manifest.exists():
        return
    with open(manifest, "r", encoding="utf-8", newline="") as f:
        kinds = {row.get("kind") for row in csv.DictReader(f)}
    blurred = kinds - {BlurKind.NONE.value}
    if mode is TrainMode.ST and blurred:
        logger.warning("ST training on blurred pairs (%s); ST expects kind 'none'", ", ".join(sorted(blurred)))
    elif mode is TrainMode.SDT and not blurred:
        logger.warning("SDT training on sharp pairs; SDT expects motion or defocus blur")


@handle_errors
def cmd_train(args: argparse.Namespace) -> None:
    """Train a model and write it with its loss log.

    Args:
        args: Command line arguments.
    """
    options = resolve_options(args, "train")
    _require(options, "data", "output")
    data_dir = Path(options["data"])
    if not data_dir.is_dir():
        raise InvalidArgumentError(f"not a directory: {data_dir}")
    out_path = Path(options["output"])
    log_path = Path(options["log"]) if options["log"] else Path(f"{out_path}.log.csv")

    cfg = TrainConfig(
        mode=options["mode"],
        scale=options["scale"],
        batch=options["batch"],
        patch=options["patch"],
        lr=options["lr"],
        steps=options["steps"],
        seed=options["seed"],
        dropout_keep=options["dropout_keep"],
    )
    model_cfg = preset_config(options["profile"], scale=cfg.scale, dropout_keep=cfg.dropout_keep)
    _check_mode_matches_data(data_dir, cfg.mode)

    patches = []
    for index, (lr, hr) in enumerate(_load_training_pairs(data_dir, cfg.scale)):
        patches.extend(
            sample_patch_pairs(
                lr, hr, cfg.patch, options["patches_per_image"], pair_seed(cfg.seed, index)
            )
        )
    logger.debug("Sampled %d patches of %dx%d", len(patches), cfg.patch, cfg.patch)

    progress = Progress(
        TextColumn("[bold blue]Training[/bold blue]"),
        BarColumn(bar_width=40),
        TextColumn("{task.completed}/{task.total}"),
        TextColumn("loss {task.fields[loss]}"),
        TimeElapsedColumn(),
        console=console,
    )
    with progress:
        task_id = progress.add_task("train", total=cfg.steps, loss="-")

        def on_step(step: int, loss: float) -> None:
            progress.update(task_id, completed=step, loss=f"{loss:.6f}")

        weights, loss_log = train(patches, cfg, model_cfg, on_step=on_step)

    save_model(weights, model_cfg, out_path)
    _write_csv(log_path, ["step", "loss"], [[i, repr(v)] for i, v in enumerate(loss_log, 1)])
    write_manifest(Path(f"{out_path}.manifest.json"), Command.TRAIN, options)
    console.print(
        f"Trained {cfg.steps} steps: loss {loss_log[0]:.6f} -> {loss_log[-1]:.6f}; "
        f"model written to {out_path}"
    )


@handle_errors
def cmd_infer(args: argparse.Namespace) -> None:
    """Upscale one image.

    Args:
        args: Command line arguments.
    """
    options = resolve_options(args, "infer")
    _require(options, "input", "output")
    if not options["bicubic"]:
        _require(options, "model")
    result = infer(
        options["model"],
        options["input"],
        options["output"],
        bicubic_only=bool(options["bicubic"]),
        scale=options["scale"],
    )
    write_manifest(Path(f"{options['output']}.manifest.json"), Command.INFER, options)
    console.print(f"Wrote {result.width}x{result.height} image to {options['output']}")


def _read_pairs(items):
    return [(read_png(ref), read_png(test)) for _, ref, test in items]


@handle_errors
def cmd_eval_iqa(args: argparse.Namespace) -> None:
    """Score restored images against references.

    Args:
        args: Command line arguments.
    """
    options = resolve_options(args, "eval-iqa")
    _require(options, "ref_dir", "test_dir", "output")
    items = matching_images(options["ref_dir"], options["test_dir"])
    if not items:
        raise InvalidArgumentError("no matching PNG files to evaluate")
    reports = evaluate_many(_read_pairs(items), workers=options["jobs"])

    fields = ("psnr", "ssim", "ifc", "vif")
    rows = [[name] + [_format_metric(getattr(r, f)) for f in fields] for (name, _, _), r in zip(items, reports)]
    averages = [math.fsum(getattr(r, f) for r in reports) / len(reports) for f in fields]
    rows.append(["AVERAGE"] + [_format_metric(v) for v in averages])
    _write_csv(Path(options["output"]), ["name", *fields], rows)
    write_manifest(Path(f"{options['output']}.manifest.json"), Command.EVAL_IQA, options)

    table = Table(title="Image Quality")
    for column in ("Name", "PSNR", "SSIM", "IFC", "VIF"):
        table.add_column(column)
    for row in rows:
        table.add_row(*row)
    console.print(table)


@handle_errors
def cmd_eval_ocr(args: argparse.Namespace) -> None:
    """Compare OCR output of restored images with the references.

    Args:
        args: Command line arguments.
    """
    options = resolve_options(args, "eval-ocr")
    _require(options, "ref_dir", "test_dir", "output")
    results = evaluate_directories(
        options["ref_dir"], options["test_dir"], options["engine"], jobs=options["jobs"]
    )
    rows = [[name, f"{c.levenshtein_ratio:.6f}", f"{c.char_cosine:.6f}"] for name, c in results]
    lev_mean, cos_mean = average_comparisons(c for _, c in results)
    rows.append(["AVERAGE", f"{lev_mean:.6f}", f"{cos_mean:.6f}"])
    _write_csv(Path(options["output"]), ["name", "lev_ratio", "cosine"], rows)
    write_manifest(Path(f"{options['output']}.manifest.json"), Command.EVAL_OCR, options)

    table = Table(title="OCR Fidelity")
    table.add_column("Name")
    table.add_column("Levenshtein ratio")
    table.add_column("Cosine")
    for row in rows:
        table.add_row(*row)
    console.print(table)


@handle_errors
def cmd_gradcheck(args: argparse.Namespace) -> None:
    """Check the analytic gradients of the 2-layer [4, 3] profile.

    Exits with status 1 when any parameter exceeds the tolerance.

    Args:
        args: Command line arguments.
    """
    options = resolve_options(args, "gradcheck")
    report = gradient_check(eps=options["eps"], seed=options["seed"])
    tol = options["tol"]

    table = Table(title="Gradient Check")
    table.add_column("Parameter")
    table.add_column("Max rel. error")
    table.add_column("Status")
    for name, error in report.items():
        status = "[green]ok[/green]" if error < tol else "[red]FAIL[/red]"
        table.add_row(name, f"{error:.3e}", status)
    console.print(table)

    if options["output"]:
        _write_csv(
            Path(options["output"]),
            ["parameter", "max_rel_error"],
            [[name, repr(error)] for name, error in report.items()],
        )
        write_manifest(Path(f"{options['output']}.manifest.json"), Command.GRADCHECK, options)

    worst = max(report.values())
    if worst >= tol:
        console.print(f"[red]Gradient check failed: max relative error {worst:.3e} >= {tol:g}[/red]")
        sys.exit(1)
    console.print(f"[green]Gradient check passed: max relative error {worst:.3e}[/green]")


COMMANDS = {
    Command.DEGRADE.value: cmd_degrade,
    Command.TRAIN.value: cmd_train,
    Command.INFER.value: cmd_infer,
    Command.EVAL_IQA.value: cmd_eval_iqa,
    Command.EVAL_OCR.value: cmd_eval_ocr,
    Command.GRADCHECK.value: cmd_gradcheck,
}


def parse_args() -> argparse.Namespace:
    """Parse command line arguments.

    Returns:
        Parsed command line arguments.
    """
    parser = create_parser()
    return parser.parse_args()


def main() -> None:
    """Main entry point for the CLI."""
    parser = create_parser()
    args = parser.parse_args()

    if args.command is None:
        parser.print_help()
        sys.exit(0 if len(sys.argv) == 1 else 1)

    if getattr(args, "verbose", False):
        logger.setLevel(logging.DEBUG)

    COMMANDS[args.command](args)


if __name__ == "__main__":
    main()
