"""Online throughput estimators for segmented media downloads.

All three estimators share one calling convention: build an initial state
once, then fold it over per-segment throughput samples. Every update returns
the successor state plus the new estimate, so states are plain values that
can be stored, replayed, and compared without hidden sharing.
"""

from dataclasses import dataclass

from .errors import InvalidParameterError, InvalidSampleError

DEFAULT_STEP_SIZE = 0.1
DEFAULT_FORGETTING_MIN = 0.6
DEFAULT_FORGETTING_MAX = 1.0
DEFAULT_EWMA_WEIGHT = 0.2
DEFAULT_WINDOW = 3

KIND_AFF = "aff"
KIND_EWMA = "ewma"
KIND_SLIDING_MEAN = "sliding_mean"


@dataclass(frozen=True)
class ThroughputSample:
    """One measured download rate, in kbit/s, for a numbered segment."""

    value_kbps: float
    segment_index: int

    def __post_init__(self):
        if not (self.value_kbps > 0):
            raise InvalidSampleError(
                "throughput must be positive, got %r" % (self.value_kbps,))
        if self.segment_index < 1:
            raise InvalidSampleError(
                "segment_index starts at 1, got %r" % (self.segment_index,))


@dataclass(frozen=True)
class Estimate:
    value_kbps: float


@dataclass(frozen=True)
class AffState:
    """State of the adaptive forgetting factor estimator.

    The estimate is weighted_sum / weight, where both accumulators decay by
    the current forgetting factor before each new sample is added. A factor
    of 1.0 makes the estimate the plain cumulative mean; smaller factors
    discount history geometrically. After each sample the factor itself is
    moved one gradient step downhill on the squared one-step prediction
    error, then clamped to [forgetting_min, forgetting_max]. sum_grad and
    weight_grad carry the derivatives of the two accumulators with respect
    to the factor, which is what makes the gradient computable online.
    """

    weighted_sum: float = 0.0
    weight: float = 0.0
    forgetting: float = DEFAULT_FORGETTING_MAX
    sum_grad: float = 0.0
    weight_grad: float = 0.0
    step_size: float = DEFAULT_STEP_SIZE
    forgetting_min: float = DEFAULT_FORGETTING_MIN
    forgetting_max: float = DEFAULT_FORGETTING_MAX
    n: int = 0
    last_sq_error: float = 0.0


def aff_new(step_size=DEFAULT_STEP_SIZE,
            forgetting_min=DEFAULT_FORGETTING_MIN,
            forgetting_max=DEFAULT_FORGETTING_MAX):
    """Fresh AFF state; the factor starts at its upper clamp."""
    if not (0.0 < step_size <= 0.1):
        raise InvalidParameterError(
            "step_size must be in (0, 0.1], got %r" % (step_size,))
    if not (0.0 < forgetting_min < forgetting_max <= 1.0):
        raise InvalidParameterError(
            "need 0 < forgetting_min < forgetting_max <= 1, got %r, %r"
            % (forgetting_min, forgetting_max))
    return AffState(step_size=step_size, forgetting_min=forgetting_min,
                    forgetting_max=forgetting_max, forgetting=forgetting_max)


def aff_update(state, sample):
    """Consume one sample, return (next_state, estimate).

    Update order matters: the derivative accumulators advance with the
    previous weighted sums, then the sums advance, then the estimate is
    read, and only then does the forgetting factor take its gradient step.
    """
    if not isinstance(sample, ThroughputSample):
        sample = ThroughputSample(float(sample), state.n + 1)
    f = state.forgetting
    sum_grad = f * state.sum_grad + state.weighted_sum
    weight_grad = f * state.weight_grad + state.weight
    weighted_sum = f * state.weighted_sum + sample.value_kbps
    weight = f * state.weight + 1.0
    estimate = weighted_sum / weight
    error = estimate - sample.value_kbps
    # d(estimate)/d(factor) by the quotient rule over the two accumulators
    grad = (sum_grad * weight - weight_grad * weighted_sum) / (weight * weight)
    f_next = f - state.step_size * 2.0 * error * grad
    if f_next < state.forgetting_min:
        f_next = state.forgetting_min
    elif f_next > state.forgetting_max:
        f_next = state.forgetting_max
    next_state = AffState(
        weighted_sum=weighted_sum, weight=weight, forgetting=f_next,
        sum_grad=sum_grad, weight_grad=weight_grad,
        step_size=state.step_size, forgetting_min=state.forgetting_min,
        forgetting_max=state.forgetting_max, n=state.n + 1,
        last_sq_error=error * error)
    return next_state, Estimate(estimate)


@dataclass(frozen=True)
class EwmaState:
    weight: float = DEFAULT_EWMA_WEIGHT
    estimate: float = 0.0
    n: int = 0


def ewma_new(weight=DEFAULT_EWMA_WEIGHT):
    if not (0.0 < weight < 1.0):
        raise InvalidParameterError(
            "ewma weight must be in (0, 1), got %r" % (weight,))
    return EwmaState(weight=weight)


def ewma_update(state, sample):
    """Fixed-weight exponential average, seeded with the first sample."""
    if not isinstance(sample, ThroughputSample):
        sample = ThroughputSample(float(sample), state.n + 1)
    if state.n == 0:
        estimate = sample.value_kbps
    else:
        estimate = state.weight * sample.value_kbps \
            + (1.0 - state.weight) * state.estimate
    return EwmaState(state.weight, estimate, state.n + 1), Estimate(estimate)


@dataclass(frozen=True)
class SlidingMeanState:
    window: tuple = ()
    capacity: int = DEFAULT_WINDOW
    n: int = 0


def sliding_mean_new(window=DEFAULT_WINDOW):
    if not isinstance(window, int) or window < 1:
        raise InvalidParameterError(
            "window must be a positive integer, got %r" % (window,))
    return SlidingMeanState(capacity=window)


def sliding_mean_update(state, sample):
    """Mean of the last few samples; shorter while warming up."""
    if not isinstance(sample, ThroughputSample):
        sample = ThroughputSample(float(sample), state.n + 1)
    window = (state.window + (sample.value_kbps,))[-state.capacity:]
    estimate = sum(window) / len(window)
    return (SlidingMeanState(window, state.capacity, state.n + 1),
            Estimate(estimate))


@dataclass(frozen=True)
class EstimatorConfig:
    """Which estimator a simulation should run, plus its knobs."""

    kind: str = KIND_AFF
    step_size: float = DEFAULT_STEP_SIZE
    forgetting_min: float = DEFAULT_FORGETTING_MIN
    forgetting_max: float = DEFAULT_FORGETTING_MAX
    ewma_weight: float = DEFAULT_EWMA_WEIGHT
    window: int = DEFAULT_WINDOW


def estimator_new(cfg):
    if cfg.kind == KIND_AFF:
        return aff_new(cfg.step_size, cfg.forgetting_min, cfg.forgetting_max)
    if cfg.kind == KIND_EWMA:
        return ewma_new(cfg.ewma_weight)
    if cfg.kind == KIND_SLIDING_MEAN:
        return sliding_mean_new(cfg.window)
    raise InvalidParameterError("unknown estimator kind %r" % (cfg.kind,))


def estimator_update(state, sample):
    if isinstance(state, AffState):
        return aff_update(state, sample)
    if isinstance(state, EwmaState):
        return ewma_update(state, sample)
    if isinstance(state, SlidingMeanState):
        return sliding_mean_update(state, sample)
    raise InvalidParameterError("not an estimator state: %r" % (state,))
