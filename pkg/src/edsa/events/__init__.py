from .mabed import anomaly, mabed_candidate_weight, mabed_detect, max_subarray
from .olda import OldaState, olda_detect, olda_gibbs_step
from .peaky import peaky_detect, spike_scores
from .slices import TimeSlices, make_slices
from .types import (
    KEYWORDS_PER_EVENT,
    Event,
    EventError,
    Method,
    events_to_json,
    format_table,
    merge_duplicates,
    rank,
)


def detect(method, slices: TimeSlices, top_k: int = 50, seed: int = 0, **params) -> list[Event]:
    """Dispatch to one of the three detectors by name."""
    method = Method(method)
    if method is Method.MABED:
        return mabed_detect(slices, top_k=top_k, **params)
    if method is Method.OLDA:
        return olda_detect(slices, top_k=top_k, seed=seed, **params)
    return peaky_detect(slices, top_k=top_k, **params)


__all__ = [
    "KEYWORDS_PER_EVENT",
    "Event",
    "EventError",
    "Method",
    "OldaState",
    "TimeSlices",
    "anomaly",
    "detect",
    "events_to_json",
    "format_table",
    "make_slices",
    "mabed_candidate_weight",
    "mabed_detect",
    "max_subarray",
    "merge_duplicates",
    "olda_detect",
    "olda_gibbs_step",
    "peaky_detect",
    "rank",
    "spike_scores",
]
