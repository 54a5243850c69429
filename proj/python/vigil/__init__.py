"""Drowsiness scoring from EEG recordings.

Thin wrapper over the compiled extension: exact spectral transforms,
rhythm band powers, fuzzy c-means calibration, EDF authoring, and the
full per-epoch analysis pipeline.
"""

try:
    from ._vigil import (
        analyze,
        band_powers,
        fcm_cluster,
        fft,
        ifft,
        save_recording,
    )
except ImportError:
    # In-tree builds leave the extension next to the build directory
    # (put it on sys.path) instead of inside the package.
    from _vigil import (
        analyze,
        band_powers,
        fcm_cluster,
        fft,
        ifft,
        save_recording,
    )

__all__ = [
    "analyze",
    "band_powers",
    "fcm_cluster",
    "fft",
    "ifft",
    "save_recording",
]

__version__ = "0.1.0"
