"""Export operations: encode everything in a manifest, write bundle files."""

from __future__ import annotations

from .encoders import make_encoder
from .manifest import ExportManifest
from .writer import write_metadata, write_prompts, write_vectors


def export_catalog(manifest: ExportManifest) -> list[str]:
    """Encode the manifest's images and write the catalog bundle files.

    Validation (duplicate ids, unreadable files) happens before any encoding;
    output is deterministic given the model and inputs.
    """
    manifest.validate_inputs()
    encoder = make_encoder(manifest.model)
    vectors = encoder.encode_images([e.path for e in manifest.images])
    rows = [
        {"id": e.id, "attributes": e.attributes, "display_ref": e.display_ref}
        for e in manifest.images
    ]
    return [
        write_vectors(manifest.output_base, vectors),
        write_metadata(manifest.output_base, rows),
    ]


def export_prompts(manifest: ExportManifest) -> str:
    """Encode the manifest's prompt strings into a prompt bank file.

    An empty prompt list produces an empty, valid file.
    """
    encoder = make_encoder(manifest.model)
    vectors = encoder.encode_texts(list(manifest.prompts))
    return write_prompts(manifest.output_base, list(manifest.prompts), vectors)
