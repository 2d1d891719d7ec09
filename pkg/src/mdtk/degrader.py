"""A configured random mixture over the eight degradations.

A :class:`Degrader` applies one degradation (or none) per call, chosen by
weight; it is the piece meant to sit inside a training data loader and
corrupt clean excerpts on the fly.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .core import Excerpt
from .degradations import (
    DEGRADATION_IDS,
    DEGRADATIONS,
    NO_DEGRADATION,
    DegradationOutcome,
    DegradationParams,
)
from .error_measure import ErrorProfile
from .rng import RandomSource

__all__ = [
    "DegraderConfig",
    "Degrader",
    "sample_outcome",
    "mixture_from_profile",
    "degrader_from_profile",
]

logger = logging.getLogger(__name__)

DEFAULT_CLEAN_PROPORTION = 1.0 / 9.0


@dataclass(frozen=True)
class DegraderConfig:
    """Mixture settings: how often to leave input clean, and which
    degradation to apply otherwise.

    `weights` maps degradation names to nonnegative weights (uniform when
    omitted); `params` maps degradation names to their parameter bundles
    (defaults when omitted).
    """

    clean_proportion: float = DEFAULT_CLEAN_PROPORTION
    weights: dict[str, float] | None = None
    params: dict[str, DegradationParams] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.clean_proportion <= 1.0:
            raise ValueError(
                f"clean_proportion must be in [0, 1], got {self.clean_proportion}"
            )
        if self.weights is not None:
            unknown = set(self.weights) - set(DEGRADATION_IDS)
            if unknown:
                raise ValueError(f"unknown degradation names: {sorted(unknown)}")
            if any(w < 0 for w in self.weights.values()):
                raise ValueError("weights must be nonnegative")
            if not any(w > 0 for w in self.weights.values()):
                raise ValueError("weights must not all be zero")
        for name in self.params:
            if name not in DEGRADATION_IDS:
                raise ValueError(f"unknown degradation name in params: {name}")

    def weight_vector(self) -> list[float]:
        """Weights in DEGRADATION_IDS order (uniform if unset)."""
        if self.weights is None:
            return [1.0] * len(DEGRADATION_IDS)
        return [float(self.weights.get(name, 0.0)) for name in DEGRADATION_IDS]

    def params_for(self, name: str) -> DegradationParams:
        return self.params.get(name, _DEFAULT_PARAMS)


_DEFAULT_PARAMS = DegradationParams()


def sample_outcome(
    excerpt: Excerpt, config: DegraderConfig, rng: RandomSource
) -> DegradationOutcome:
    """One draw of the mixture, using the caller's random source.

    Draw order is fixed: one uniform draw decides clean-vs-degrade, then
    one categorical draw picks the degradation.  If the picked degradation
    is inapplicable, the remaining ones are re-drawn by renormalized
    weight; if all eight fail, the excerpt is returned clean with label
    ``none``.  The emitted label always names what was actually applied.
    """
    if rng.random() < config.clean_proportion:
        return DegradationOutcome(excerpt=excerpt, label=NO_DEGRADATION)
    weights = config.weight_vector()
    names = list(DEGRADATION_IDS)
    while names and any(w > 0 for w in weights):
        k = rng.weighted_index(weights)
        name = names[k]
        outcome = DEGRADATIONS[name](
            excerpt, rng, **config.params_for(name).kwargs_for(name)
        )
        if outcome is not None:
            return outcome
        del names[k]
        del weights[k]
    logger.warning("every degradation was inapplicable; returning the excerpt clean")
    return DegradationOutcome(excerpt=excerpt, label=NO_DEGRADATION)


class Degrader:
    """Owns a random stream and degrades each excerpt passed to it.

    One instance per worker: the stream advances on every call, so an
    instance must not be shared between threads.
    """

    def __init__(self, config: DegraderConfig | None = None, *, rng: RandomSource | None = None):
        self.config = config if config is not None else DegraderConfig()
        self._rng = rng if rng is not None else RandomSource(self.config.seed)

    def degrade(self, excerpt: Excerpt) -> DegradationOutcome:
        """Return a randomly degraded version of the excerpt (or it, clean)."""
        return sample_outcome(excerpt, self.config, self._rng)


def mixture_from_profile(profile: ErrorProfile) -> tuple[float, dict[str, float] | None]:
    """(clean_proportion, weights) for a Degrader matching a profile.

    Raises ValueError when the profile's nine fractions do not sum to 1
    (tolerance 1e-6).
    """
    total = profile.clean + sum(profile.proportions.values())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(
            f"profile fractions must sum to 1 (got {total!r}); "
            "was the file edited by hand?"
        )
    mass = sum(profile.proportions.values())
    if mass > 0:
        weights = {name: profile.proportions[name] for name in DEGRADATION_IDS}
    else:
        # Nothing to degrade (clean == 1): weights are never drawn.
        weights = None
    return profile.clean, weights


def degrader_from_profile(
    profile: ErrorProfile,
    params: dict[str, DegradationParams] | None = None,
    seed: int = 0,
) -> Degrader:
    """Build a Degrader whose mixture matches a measured error profile.

    The profile's clean fraction becomes the clean proportion and its
    eight degradation fractions, renormalized, become the weights.
    """
    clean, weights = mixture_from_profile(profile)
    config = DegraderConfig(
        clean_proportion=clean,
        weights=weights,
        params=params or {},
        seed=seed,
    )
    return Degrader(config)
