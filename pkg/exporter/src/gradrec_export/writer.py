"""Writers for the engine's catalog bundle formats.

`<base>.grvec`: magic ``GREC``, format version u32 LE, product count u64 LE,
dim u32 LE, then the row-major float32 LE matrix. `<base>.grmeta.jsonl`: one
object per row (``id``, ``attributes``, optional ``display_ref``).
`<base>.grprompt.jsonl`: ``{prompt, vector}`` per line. Writes are atomic
(temp file + rename).
"""

from __future__ import annotations

import json
import os
import struct
import tempfile

import numpy as np

MAGIC = b"GREC"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQI")


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_vectors(base: str, vectors: np.ndarray) -> str:
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    n, dim = vectors.shape
    path = base + ".grvec"
    _atomic_write(path, _HEADER.pack(MAGIC, FORMAT_VERSION, n, dim) + vectors.tobytes())
    return path


def write_metadata(base: str, rows: list[dict]) -> str:
    lines = []
    for row in rows:
        obj = {"id": row["id"], "attributes": row.get("attributes", {})}
        if row.get("display_ref") is not None:
            obj["display_ref"] = row["display_ref"]
        lines.append(json.dumps(obj, ensure_ascii=False, sort_keys=True))
    path = base + ".grmeta.jsonl"
    _atomic_write(path, ("\n".join(lines) + "\n").encode("utf-8"))
    return path


def write_prompts(base: str, prompts: list[str], vectors: np.ndarray) -> str:
    lines = [
        json.dumps({"prompt": prompt, "vector": [float(x) for x in vec]}, ensure_ascii=False)
        for prompt, vec in zip(prompts, vectors)
    ]
    path = base + ".grprompt.jsonl"
    _atomic_write(path, (("\n".join(lines) + "\n") if lines else "").encode("utf-8"))
    return path
