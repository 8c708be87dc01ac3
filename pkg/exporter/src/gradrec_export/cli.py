"""gradrec-export: encode a manifest's images and prompts into bundle files."""

from __future__ import annotations

import argparse
import sys

from .errors import ExportError
from .export import export_catalog, export_prompts
from .manifest import load_manifest


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gradrec-export",
        description="Encode product images and prompts into catalog bundle files.",
    )
    parser.add_argument("manifest", help="Path to the export manifest JSON.")
    parser.add_argument(
        "--skip-images", action="store_true", help="Only write the prompt bank."
    )
    parser.add_argument(
        "--skip-prompts", action="store_true", help="Only write the catalog bundle."
    )
    args = parser.parse_args(argv)
    try:
        manifest = load_manifest(args.manifest)
        written: list[str] = []
        if not args.skip_images:
            written += export_catalog(manifest)
        if not args.skip_prompts:
            written.append(export_prompts(manifest))
    except ExportError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
