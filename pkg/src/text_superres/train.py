"""Loss, Adam optimization, the training loop and the gradient check.

ST and SDT training share one loop; they differ only in the pairs they
are given (sharp or blurred low-resolution inputs).
"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from text_superres.exceptions import InvalidArgumentError
from text_superres.models import ModelConfig, PatchPair, TrainConfig
from text_superres.network import (
    Gradients,
    ModelWeights,
    backward,
    forward,
    init_model,
    preset_config,
)

logger = logging.getLogger(__name__)

StepCallback = Callable[[int, float], None]

GRADCHECK_EPS = 1e-4
GRADCHECK_TOL = 1e-4
GRADCHECK_INPUT = 6

# Denominator floor of the relative error.
_REL_FLOOR = 1e-6


def mse_loss(pred: np.ndarray, target: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean squared error and its gradient ``2 * (pred - target) / N``.

    Raises:
        InvalidArgumentError: If the shapes differ.
    """
    pred = np.asarray(pred)
    target = np.asarray(target)
    if pred.shape != target.shape:
        raise InvalidArgumentError(
            f"prediction shape {pred.shape} does not match target {target.shape}"
        )
    diff = pred - target
    return float(np.mean(diff * diff)), 2.0 * diff / diff.size


@dataclass(frozen=True)
class OptimizerState:
    """Adam moment accumulators, keyed like the weights, and the step counter."""

    m: Dict[str, np.ndarray]
    v: Dict[str, np.ndarray]
    step: int = 0


def init_optimizer(w: ModelWeights) -> OptimizerState:
    """Fresh optimizer state with zeroed moments mirroring ``w``."""
    return OptimizerState(
        m={n: np.zeros_like(a) for n, a in w.params.items()},
        v={n: np.zeros_like(a) for n, a in w.params.items()},
        step=0,
    )


def adam_step(
    w: ModelWeights, g: Gradients, s: OptimizerState, cfg: TrainConfig
) -> Tuple[ModelWeights, OptimizerState]:
    """Apply one bias-corrected Adam update.

    Returns new weights and a new state; the inputs are left untouched.

    Raises:
        InvalidArgumentError: If the gradient or state shapes do not mirror ``w``.
    """
    shapes = w.shapes()
    for label, values in (("gradients", g), ("first moments", s.m), ("second moments", s.v)):
        if {n: tuple(a.shape) for n, a in values.items()} != shapes:
            raise InvalidArgumentError(f"{label} do not mirror the model parameters")

    t = s.step + 1
    correction1 = 1.0 - cfg.beta1**t
    correction2 = 1.0 - cfg.beta2**t
    params, m, v = {}, {}, {}
    for name, value in w.params.items():
        grad = g[name].astype(value.dtype, copy=False)
        m[name] = cfg.beta1 * s.m[name] + (1.0 - cfg.beta1) * grad
        v[name] = cfg.beta2 * s.v[name] + (1.0 - cfg.beta2) * (grad * grad)
        m_hat = m[name] / correction1
        v_hat = v[name] / correction2
        params[name] = (value - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.epsilon)).astype(
            value.dtype, copy=False
        )
    return ModelWeights(params), OptimizerState(m=m, v=v, step=t)


def batch_gradients(
    w: ModelWeights,
    model_cfg: ModelConfig,
    lr_batch: np.ndarray,
    hr_batch: np.ndarray,
    dropout_seed: Optional[int] = None,
) -> Tuple[float, Gradients]:
    """Loss and parameter gradients of one mini-batch.

    The loss is the mean over every sample and pixel, so the gradients are
    the mean of the per-sample gradients.
    """
    out, cache = forward(w, model_cfg, lr_batch, training=True, dropout_seed=dropout_seed)
    loss, grad = mse_loss(out, hr_batch)
    return loss, backward(w, model_cfg, cache, grad)


def _stack_pairs(pairs: Sequence[PatchPair], scale: int) -> Tuple[np.ndarray, np.ndarray]:
    lr_shape = pairs[0].lr.data.shape
    for pair in pairs:
        if pair.lr.data.shape != lr_shape:
            raise InvalidArgumentError("all training patches must share one size")
        if pair.hr.data.shape != (1, scale * lr_shape[1], scale * lr_shape[2]):
            raise InvalidArgumentError(
                f"patch pair at {pair.origin} is not consistent with scale {scale}"
            )
    lr_all = np.stack([p.lr.data for p in pairs])
    hr_all = np.stack([p.hr.data for p in pairs])
    return lr_all, hr_all


def train(
    pairs: Sequence[PatchPair],
    cfg: TrainConfig,
    model_cfg: ModelConfig,
    on_step: Optional[StepCallback] = None,
    weights: Optional[ModelWeights] = None,
) -> Tuple[ModelWeights, List[float]]:
    """Fit a model to patch pairs with mini-batch Adam.

    Each step draws ``cfg.batch`` pairs with the seeded generator (without
    replacement when enough pairs exist), runs a training forward pass with
    dropout keep ``cfg.dropout_keep``, and applies one Adam update.

    Args:
        pairs: Aligned LR/HR patches, all of one size.
        cfg: Optimizer and loop settings.
        model_cfg: Architecture; its scale must equal ``cfg.scale``.
        on_step: Called with (step, loss) after every update.
        weights: Starting weights; He-initialized from ``cfg.seed`` when omitted.

    Returns:
        The final weights and the per-step loss log.

    Raises:
        InvalidArgumentError: If there are no pairs or the scales disagree.
    """
    if not pairs:
        raise InvalidArgumentError("training needs at least one patch pair")
    if model_cfg.scale != cfg.scale:
        raise InvalidArgumentError(
            f"model scale {model_cfg.scale} does not match training scale {cfg.scale}"
        )
    lr_all, hr_all = _stack_pairs(pairs, cfg.scale)
    model_cfg = replace(model_cfg, dropout_keep=cfg.dropout_keep)

    w = weights if weights is not None else init_model(model_cfg, cfg.seed)
    state = init_optimizer(w)
    rng = np.random.default_rng([cfg.seed, 1])
    count = len(pairs)
    loss_log: List[float] = []
    logger.debug(
        "Training %s on %d pairs for %d steps (batch %d)",
        cfg.mode.value,
        count,
        cfg.steps,
        cfg.batch,
    )

    for step in range(1, cfg.steps + 1):
        batch = rng.choice(count, size=cfg.batch, replace=count < cfg.batch)
        dropout_seed = int(rng.integers(0, 2**63 - 1))
        loss, grads = batch_gradients(w, model_cfg, lr_all[batch], hr_all[batch], dropout_seed)
        w, state = adam_step(w, grads, state, cfg)
        loss_log.append(loss)
        if on_step is not None:
            on_step(step, loss)
        if step == 1 or step % 100 == 0:
            logger.debug("step %d loss %.6g", step, loss)
    return w, loss_log


def relative_error(analytic: float, numeric: float) -> float:
    """``|a - n| / max(|a|, |n|, 1e-6)``."""
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), _REL_FLOOR)


def _evaluate(w: ModelWeights, cfg: ModelConfig, x: np.ndarray, target: np.ndarray):
    out, cache = forward(w, cfg, x, training=True)
    loss, _ = mse_loss(out, target)
    return loss, [step.pre > 0 for name, step in cache.steps.items() if name != "recon.l"]


def _same_pattern(a: List[np.ndarray], b: List[np.ndarray]) -> bool:
    return all(np.array_equal(p, q) for p, q in zip(a, b))


def gradient_check(
    cfg: Optional[ModelConfig] = None,
    eps: float = GRADCHECK_EPS,
    seed: int = 0,
    size: int = GRADCHECK_INPUT,
    max_elements: Optional[int] = None,
) -> Dict[str, float]:
    """Compare backward against central finite differences in 64-bit floats.

    Dropout is disabled. Biases and slopes are drawn away from zero so every
    path carries signal. A difference whose probes move any pre-activation
    across zero is retried with a step 100 times smaller and skipped if it
    still crosses, since the rectifiers are not differentiable there.

    Args:
        cfg: Architecture to check; the 2-layer [4, 3] profile by default.
        eps: Finite-difference step.
        seed: Seed of the weights, the input and the target.
        size: Side of the square LR input.
        max_elements: Check at most this many randomly chosen elements per
            parameter tensor; all elements when None.

    Returns:
        The maximum relative error per parameter tensor.
    """
    cfg = replace(cfg or preset_config("tiny"), dropout_keep=1.0)
    rng = np.random.default_rng(seed)
    base = init_model(cfg, seed, dtype=np.float64)
    params = {
        name: value if name.endswith(".kernel") else rng.uniform(-0.1, 0.1, value.shape)
        for name, value in base.params.items()
    }
    w = ModelWeights(params)
    x = rng.random((1, 1, size, size))
    target = rng.random((1, 1, cfg.scale * size, cfg.scale * size))

    _, analytic = batch_gradients(w, cfg, x, target)
    _, base_pattern = _evaluate(w, cfg, x, target)

    def numeric(name: str, index: Tuple[int, ...], step: float) -> Optional[float]:
        probes = []
        for sign in (1.0, -1.0):
            value = np.array(w[name])
            value[index] += sign * step
            loss, pattern = _evaluate(ModelWeights({**w.params, name: value}), cfg, x, target)
            if not _same_pattern(pattern, base_pattern):
                return None
            probes.append(loss)
        return (probes[0] - probes[1]) / (2.0 * step)

    report: Dict[str, float] = {}
    skipped = 0
    for name, value in w.params.items():
        flat = np.arange(value.size)
        if max_elements is not None and value.size > max_elements:
            flat = rng.choice(value.size, size=max_elements, replace=False)
        worst = 0.0
        for position in flat.tolist():
            index = np.unravel_index(position, value.shape)
            estimate = numeric(name, index, eps)
            if estimate is None:
                estimate = numeric(name, index, eps * 1e-2)
            if estimate is None:
                skipped += 1
                continue
            worst = max(worst, relative_error(float(analytic[name][index]), estimate))
        report[name] = worst
        logger.debug("%s: max relative error %.3e over %d elements", name, worst, len(flat))
    if skipped:
        logger.debug("Skipped %d elements at activation kinks", skipped)
    return report
