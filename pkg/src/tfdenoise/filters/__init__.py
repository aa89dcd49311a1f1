"""Spectrogram denoising filters."""

from .neighborhood import level_weights, nf_brute_force, nf_iterate, nf_level_step
from .nlmeans import f_correspondence, nlmeans, patch_distances
from .params import FilterParams, FilterResult
from .tv import tv_functional, tv_transport_denoise
from .yaroslavsky import yaroslavsky_iterate, yaroslavsky_step

__all__ = [
    "FilterParams", "FilterResult", "f_correspondence", "level_weights", "nf_brute_force",
    "nf_iterate", "nf_level_step", "nlmeans", "patch_distances", "tv_functional",
    "tv_transport_denoise", "yaroslavsky_iterate", "yaroslavsky_step",
]
