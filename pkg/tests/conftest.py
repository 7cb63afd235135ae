from __future__ import annotations

import json
import shutil
from dataclasses import dataclass
from pathlib import Path

import pytest

from jsdeob.fixtures import LEVELS, ObfuscationConfig, Obfuscated, file_seed, obfuscate_source, seed_programs

DATA = Path(__file__).parent / "data"
CORPUS_SEEDS = 200

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and not report.passed):
        verdict = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _criteria[number] = (verdict, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        verdict, title = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")


@pytest.fixture(scope="session")
def golden_source() -> str:
    return (DATA / "golden.js").read_text(encoding="utf-8")


@dataclass
class CorpusFile:
    name: str
    level: str
    seed_source: str
    obf: Obfuscated
    path: Path
    truth_path: Path


@pytest.fixture(scope="session")
def corpus(tmp_path_factory) -> list[CorpusFile]:
    """200 generated seeds at all four levels, also written to disk."""
    out = tmp_path_factory.mktemp("corpus")
    files = []
    for name, source in seed_programs(CORPUS_SEEDS):
        for level in LEVELS:
            obf = obfuscate_source(source, ObfuscationConfig.preset(level, file_seed(name, level, 0)))
            path = out / f"{name}.{level}.js"
            truth_path = out / f"{name}.{level}.truth.json"
            path.write_text(obf.text, encoding="utf-8")
            truth_path.write_text(json.dumps(obf.truth.to_json(), ensure_ascii=False), encoding="utf-8")
            files.append(CorpusFile(name, level, source, obf, path, truth_path))
    return files


@pytest.fixture(scope="session")
def node_binary():
    return shutil.which("node")
