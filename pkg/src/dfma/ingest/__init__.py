"""Tensor files, manifests, point-cloud preprocessing and the spatial low-pass ablation."""
from .lowpass import radial_lowpass, radial_mask
from .manifest import DatasetManifest, NormStats, SampleEntry, load_manifest, parse_manifest
from .pointcloud import (align_frames, align_points, build_sample, compute_norm_stats,
                         denormalize, normalize, shape_features, shape_sample,
                         subsample_indices)
from .tensorfile import decode_tensor, encode_tensor, read_tensor, write_tensor

__all__ = [
    "radial_lowpass", "radial_mask",
    "DatasetManifest", "NormStats", "SampleEntry", "load_manifest", "parse_manifest",
    "align_frames", "align_points", "build_sample", "compute_norm_stats", "denormalize",
    "normalize", "shape_features", "shape_sample", "subsample_indices",
    "decode_tensor", "encode_tensor", "read_tensor", "write_tensor",
]
