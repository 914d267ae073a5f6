"""OCR fidelity: an external OCR engine plus string similarity scores."""

import logging
import math
import os
import shlex
import shutil
import string
import subprocess
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

import Levenshtein

from text_superres.exceptions import (
    ExternalToolFailureError,
    ExternalToolNotFoundError,
    InvalidArgumentError,
    OcrDecodeError,
)
from text_superres.models import OcrComparison

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

DEFAULT_ENGINE = "tesseract {input} stdout"
INPUT_PLACEHOLDER = "{input}"

# Letters and digits of printable ASCII, case-sensitive.
CHARSET = string.ascii_letters + string.digits
_CHARSET = frozenset(CHARSET)


def levenshtein_ratio(a: str, b: str) -> float:
    """``1 - d(a, b) / max(len(a), len(b))``; 1.0 when both are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - Levenshtein.distance(a, b) / longest


def char_freq_cosine(a: str, b: str) -> float:
    """Cosine similarity of the letter/digit frequency vectors of two strings.

    Characters outside ASCII letters and digits are ignored. One empty
    vector scores 0.0; two empty vectors score 1.0.
    """
    counts_a = Counter(c for c in a if c in _CHARSET)
    counts_b = Counter(c for c in b if c in _CHARSET)
    norm_a = sum(n * n for n in counts_a.values())
    norm_b = sum(n * n for n in counts_b.values())
    if norm_a == 0 and norm_b == 0:
        return 1.0
    if norm_a == 0 or norm_b == 0:
        return 0.0
    dot = sum(n * counts_b[c] for c, n in counts_a.items())
    return min(dot / math.sqrt(norm_a * norm_b), 1.0)


def compare_texts(reference_text: str, candidate_text: str) -> OcrComparison:
    return OcrComparison(
        reference_text=reference_text,
        candidate_text=candidate_text,
        levenshtein_ratio=levenshtein_ratio(reference_text, candidate_text),
        char_cosine=char_freq_cosine(reference_text, candidate_text),
    )


def average_comparisons(comparisons: Iterable[OcrComparison]) -> Tuple[float, float]:
    """Arithmetic means of (levenshtein_ratio, char_cosine).

    Raises:
        InvalidArgumentError: If there is nothing to average.
    """
    comparisons = list(comparisons)
    if not comparisons:
        raise InvalidArgumentError("no OCR comparisons to average")
    count = len(comparisons)
    return (
        math.fsum(c.levenshtein_ratio for c in comparisons) / count,
        math.fsum(c.char_cosine for c in comparisons) / count,
    )


def build_command(image_path: PathLike, engine_command: str = DEFAULT_ENGINE) -> List[str]:
    """Split an engine template and substitute the image path.

    Raises:
        InvalidArgumentError: If the template has no ``{input}`` placeholder.
    """
    if INPUT_PLACEHOLDER not in engine_command:
        raise InvalidArgumentError(
            f"engine command must contain the {INPUT_PLACEHOLDER} placeholder: {engine_command!r}"
        )
    args = shlex.split(engine_command)
    if not args:
        raise InvalidArgumentError("engine command is empty")
    return [arg.replace(INPUT_PLACEHOLDER, str(image_path)) for arg in args]


def run_ocr(image_path: PathLike, engine_command: str = DEFAULT_ENGINE) -> str:
    """Run an external OCR engine on an image and return its text.

    Args:
        image_path: Image handed to the engine.
        engine_command: Command template; ``{input}`` is replaced by the path.

    Returns:
        The engine's standard output with trailing whitespace removed.

    Raises:
        InvalidArgumentError: If the template lacks ``{input}``.
        ExternalToolNotFoundError: If the executable does not exist.
        ExternalToolFailureError: If the engine exits nonzero.
        OcrDecodeError: If the output is not valid UTF-8.
    """
    args = build_command(image_path, engine_command)
    if shutil.which(args[0]) is None:
        raise ExternalToolNotFoundError(f"OCR engine not found: {args[0]}")
    logger.debug("Running %s", shlex.join(args))
    try:
        completed = subprocess.run(args, capture_output=True, check=False)
    except FileNotFoundError as e:
        raise ExternalToolNotFoundError(f"OCR engine not found: {args[0]}") from e
    if completed.returncode != 0:
        raise ExternalToolFailureError(
            f"OCR engine failed on {image_path}",
            completed.returncode,
            completed.stderr.decode("utf-8", errors="replace"),
        )
    try:
        text = completed.stdout.decode("utf-8")
    except UnicodeDecodeError as e:
        raise OcrDecodeError(f"OCR output for {image_path} is not valid UTF-8: {e}") from e
    return text.rstrip()


def matching_images(ref_dir: PathLike, test_dir: PathLike) -> List[Tuple[str, Path, Path]]:
    """PNG files present in both directories, as (name, ref, test), sorted by name.

    Files without a counterpart are reported as warnings and skipped.
    """
    ref_dir = Path(ref_dir)
    test_dir = Path(test_dir)
    for directory in (ref_dir, test_dir):
        if not directory.is_dir():
            raise InvalidArgumentError(f"not a directory: {directory}")
    ref_names = {p.name for p in ref_dir.glob("*.png")}
    test_names = {p.name for p in test_dir.glob("*.png")}
    for name in sorted(ref_names ^ test_names):
        logger.warning("Skipping %s: no counterpart in both directories", name)
    return [(name, ref_dir / name, test_dir / name) for name in sorted(ref_names & test_names)]


def evaluate_directories(
    ref_dir: PathLike,
    test_dir: PathLike,
    engine_command: str = DEFAULT_ENGINE,
    jobs: Optional[int] = None,
) -> List[Tuple[str, OcrComparison]]:
    """OCR every matching image pair and compare the texts.

    At most ``jobs`` engine processes run at once.

    Raises:
        InvalidArgumentError: If no image names match.
    """
    items = matching_images(ref_dir, test_dir)
    if not items:
        raise InvalidArgumentError(f"no matching PNG files in {ref_dir} and {test_dir}")
    build_command("", engine_command)

    def compare(item: Tuple[str, Path, Path]) -> Tuple[str, OcrComparison]:
        name, ref_path, test_path = item
        result = compare_texts(
            run_ocr(ref_path, engine_command), run_ocr(test_path, engine_command)
        )
        logger.debug(
            "%s: lev_ratio %.4f cosine %.4f",
            name,
            result.levenshtein_ratio,
            result.char_cosine,
        )
        return name, result

    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(compare, items))
