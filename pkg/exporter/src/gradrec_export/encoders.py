"""Encoder backends, selected by the manifest's model string.

``clip:<model-name>`` loads a CLIP-family checkpoint through transformers
(the image and text towers of one joint space). ``debug-hash:dim=<d>`` is a
deterministic, dependency-free stand-in for tests and pipelines without
model weights: images are downsampled and passed through a fixed random
projection (so visually similar images stay close), prompts are hashed to
seeded Gaussian vectors. Both produce unit-norm float32 vectors.
"""

from __future__ import annotations

import hashlib

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ImageDecodeFailure, ModelLoadFailure

_DEBUG_THUMB = 32  # debug encoder downsampling size (grayscale 32x32)


class DebugHashEncoder:
    """Deterministic test encoder; no ML dependencies."""

    def __init__(self, dim: int = 64):
        if dim < 2:
            raise ModelLoadFailure("debug-hash dim must be at least 2")
        self.dim = dim
        rng = np.random.default_rng(dim)  # fixed projection per dim
        self._proj = rng.standard_normal((_DEBUG_THUMB * _DEBUG_THUMB, dim))

    def encode_images(self, paths: list[str]) -> np.ndarray:
        out = np.empty((len(paths), self.dim), dtype=np.float64)
        for i, path in enumerate(paths):
            pixels = _decode_grayscale(path, _DEBUG_THUMB).reshape(-1)
            out[i] = (pixels - pixels.mean()) @ self._proj
            if np.linalg.norm(out[i]) < 1e-9:  # constant image: fall back to hash
                out[i] = _hashed_gaussian(open(path, "rb").read(), self.dim)
        return _unit_rows(out)

    def encode_texts(self, prompts: list[str]) -> np.ndarray:
        out = np.stack(
            [_hashed_gaussian(p.encode("utf-8"), self.dim) for p in prompts]
        ) if prompts else np.empty((0, self.dim))
        return _unit_rows(out) if len(prompts) else out.astype(np.float32)


class ClipEncoder:
    """CLIP-family checkpoint via transformers; joint image/text space."""

    def __init__(self, model_name: str):
        try:
            import torch
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as exc:
            raise ModelLoadFailure(
                "clip encoder needs the [clip] extra (torch + transformers)"
            ) from exc
        try:
            self._torch = torch
            self._model = CLIPModel.from_pretrained(model_name).eval()
            self._processor = CLIPProcessor.from_pretrained(model_name)
        except Exception as exc:
            raise ModelLoadFailure(f"cannot load {model_name!r}: {exc}") from exc
        self.dim = int(self._model.config.projection_dim)

    def encode_images(self, paths: list[str]) -> np.ndarray:
        images = []
        for path in paths:
            try:
                with Image.open(path) as img:
                    images.append(img.convert("RGB"))
            except (OSError, UnidentifiedImageError) as exc:
                raise ImageDecodeFailure(f"cannot decode {path!r}: {exc}") from exc
        with self._torch.no_grad():
            inputs = self._processor(images=images, return_tensors="pt")
            feats = self._model.get_image_features(**inputs)
        return _unit_rows(feats.cpu().numpy().astype(np.float64))

    def encode_texts(self, prompts: list[str]) -> np.ndarray:
        if not prompts:
            return np.empty((0, self.dim), dtype=np.float32)
        with self._torch.no_grad():
            inputs = self._processor(text=prompts, return_tensors="pt", padding=True)
            feats = self._model.get_text_features(**inputs)
        return _unit_rows(feats.cpu().numpy().astype(np.float64))


def make_encoder(model: str):
    if model.startswith("debug-hash"):
        dim = 64
        if ":" in model:
            spec = model.split(":", 1)[1]
            if not spec.startswith("dim="):
                raise ModelLoadFailure(f"bad debug-hash spec {model!r}")
            dim = int(spec[4:])
        return DebugHashEncoder(dim)
    if model.startswith("clip:"):
        return ClipEncoder(model.split(":", 1)[1])
    raise ModelLoadFailure(f"unknown model identifier {model!r}")


def _decode_grayscale(path: str, size: int) -> np.ndarray:
    try:
        with Image.open(path) as img:
            gray = img.convert("L").resize((size, size), Image.BILINEAR)
            return np.asarray(gray, dtype=np.float64) / 255.0
    except (OSError, UnidentifiedImageError) as exc:
        raise ImageDecodeFailure(f"cannot decode {path!r}: {exc}") from exc


def _hashed_gaussian(payload: bytes, dim: int) -> np.ndarray:
    digest = hashlib.sha256(payload).digest()
    seed = int.from_bytes(digest[:8], "little")
    return np.random.default_rng(seed).standard_normal(dim)


def _unit_rows(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    return (mat / norms).astype(np.float32)
