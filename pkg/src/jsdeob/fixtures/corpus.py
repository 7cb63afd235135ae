"""Writing obfuscated corpora with truth sidecars and a manifest."""

from __future__ import annotations

import json
import zlib
from pathlib import Path

from .obfuscator import LEVELS, ObfuscationConfig, UnsupportedInput, obfuscate_source


def file_seed(name: str, level: str, base_seed: int) -> int:
    return zlib.crc32(f"{base_seed}:{name}:{level}".encode())


def generate_corpus(
    seed_programs: list[tuple[str, str]],
    out_dir: str | Path,
    levels: tuple[str, ...] = LEVELS,
    base_seed: int = 0,
) -> list[dict]:
    """Obfuscate every seed at every level; returns and writes ``manifest.json``.

    Seeds that cannot be obfuscated get a manifest entry with an ``error:``
    status instead of files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for name, source in seed_programs:
        for level in levels:
            seed = file_seed(name, level, base_seed)
            obf_path = out / f"{name}.{level}.js"
            truth_path = out / f"{name}.{level}.truth.json"
            entry = {"source": name, "level": level, "obf_path": str(obf_path),
                     "truth_path": str(truth_path), "seed": seed, "status": "ok"}
            try:
                result = obfuscate_source(source, ObfuscationConfig.preset(level, seed))
            except UnsupportedInput as exc:
                entry["status"] = f"error: {exc}"
                entry["obf_path"] = entry["truth_path"] = None
            else:
                obf_path.write_text(result.text, encoding="utf-8")
                truth_path.write_text(json.dumps(result.truth.to_json(), indent=1, ensure_ascii=False) + "\n",
                                      encoding="utf-8")
            manifest.append(entry)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    return manifest
