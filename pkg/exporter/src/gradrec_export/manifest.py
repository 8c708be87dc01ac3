"""Export manifest: which model, which images, which prompts, where to write.

JSON shape:

    {
      "model": "clip:openai/clip-vit-base-patch32",   # or "debug-hash:dim=16"
      "images": [{"path": "...", "id": "...", "attributes": {"..." : "..."},
                  "display_ref": "..."}],
      "prompts": ["a blue shirt", "a dark blue shirt"],
      "output_base": "/data/catalogs/fall-collection"
    }
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import InvalidManifest


@dataclass(frozen=True)
class ImageEntry:
    path: str
    id: str
    attributes: dict[str, str] = field(default_factory=dict)
    display_ref: str | None = None


@dataclass(frozen=True)
class ExportManifest:
    model: str
    images: tuple[ImageEntry, ...]
    prompts: tuple[str, ...]
    output_base: str

    def __post_init__(self):
        if not self.model:
            raise InvalidManifest("manifest needs a model identifier")
        if not self.output_base:
            raise InvalidManifest("manifest needs an output_base")
        seen: set[str] = set()
        for entry in self.images:
            if entry.id in seen:
                raise InvalidManifest(f"duplicate image id {entry.id!r}")
            seen.add(entry.id)
        if len(set(self.prompts)) != len(self.prompts):
            raise InvalidManifest("duplicate prompt strings")

    def validate_inputs(self) -> None:
        """Every listed image must be readable before any encoding starts."""
        for entry in self.images:
            if not os.path.isfile(entry.path) or not os.access(entry.path, os.R_OK):
                raise InvalidManifest(f"image not readable: {entry.path}")


def load_manifest(path: str) -> ExportManifest:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InvalidManifest(f"cannot read manifest {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidManifest(f"manifest {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise InvalidManifest("manifest must be a JSON object")
    images = []
    for i, row in enumerate(obj.get("images", [])):
        if "path" not in row or "id" not in row:
            raise InvalidManifest(f"images[{i}] needs path and id")
        images.append(
            ImageEntry(
                path=str(row["path"]),
                id=str(row["id"]),
                attributes={str(k): str(v) for k, v in row.get("attributes", {}).items()},
                display_ref=row.get("display_ref"),
            )
        )
    return ExportManifest(
        model=str(obj.get("model", "")),
        images=tuple(images),
        prompts=tuple(str(p) for p in obj.get("prompts", [])),
        output_base=str(obj.get("output_base", "")),
    )
