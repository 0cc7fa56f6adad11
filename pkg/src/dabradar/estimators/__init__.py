from ._backend import BACKEND
from .ops import (Detection, FusionResult, lmmse_update, local_mean, map_detect,
                  observation_variance, posteriors, predict, prediction_variance,
                  reliability, sensing_gain, smooth, transition_residuals)
from .schemes import (EstimatorOutput, Scheme, estimate, map_direct_estimate,
                      open_loop_estimate, track_frame)

__all__ = [
    "BACKEND", "Detection", "FusionResult", "EstimatorOutput", "Scheme", "estimate",
    "lmmse_update", "local_mean", "map_detect", "map_direct_estimate", "observation_variance",
    "open_loop_estimate", "posteriors", "predict", "prediction_variance", "reliability",
    "sensing_gain", "smooth", "track_frame", "transition_residuals",
]
