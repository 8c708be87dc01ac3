"""Offline exporter: encodes product images and prompt strings with a
CLIP-family model and writes catalog bundle files in the engine's formats."""

__version__ = "0.1.0"

from .errors import ExportError, ImageDecodeFailure, InvalidManifest, ModelLoadFailure
from .export import export_catalog, export_prompts
from .manifest import ExportManifest, ImageEntry, load_manifest

__all__ = [
    "__version__",
    "ExportError",
    "ImageDecodeFailure",
    "InvalidManifest",
    "ModelLoadFailure",
    "ExportManifest",
    "ImageEntry",
    "load_manifest",
    "export_catalog",
    "export_prompts",
]
