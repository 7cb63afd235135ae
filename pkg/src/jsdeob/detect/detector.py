"""Detection orchestration: chosen backend first, heuristic fallback, validation always."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from ..analysis.scopes import ScopeInfo, resolve_scopes
from ..frontend.annotate import AnnotateError, annotate
from ..frontend.nodes import Node
from .heuristic import HeuristicConfig, NotFound, heuristic_detect
from .llm import LlmClient, LlmClientConfig, LlmError
from .prompt import MissingSlot, PromptBundle, build_prompt
from .response import ParseFailure, parse_detection
from .roles import PreludeRoles
from .validate import validate_dependencies

log = logging.getLogger(__name__)


class DetectionFailed(RuntimeError):
    """No backend produced a valid role triple.

    ``reason`` is ``"validation"`` when some backend proposed roles that
    failed the dependency checks, otherwise ``"detection"``.
    """

    def __init__(self, reason: str, attempts: list[str]):
        super().__init__("; ".join(attempts) or reason)
        self.reason = reason
        self.attempts = attempts


@dataclass(frozen=True)
class Backend:
    kind: str  # heuristic | llm | sidecar
    sidecar_path: str | None = None
    llm: LlmClientConfig = field(default_factory=LlmClientConfig)

    @classmethod
    def parse(cls, spec: str, llm: LlmClientConfig | None = None) -> Backend:
        """``heuristic``, ``llm`` or ``sidecar:<path>``."""
        if spec == "heuristic":
            return cls("heuristic")
        if spec == "llm":
            return cls("llm", llm=llm or LlmClientConfig())
        if spec.startswith("sidecar:") and len(spec) > len("sidecar:"):
            return cls("sidecar", sidecar_path=spec[len("sidecar:"):])
        raise ValueError(f"unknown detector {spec!r}; expected heuristic, llm or sidecar:<path>")


def read_sidecar(path: str | Path) -> PreludeRoles:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return PreludeRoles.from_sidecar(data, source="sidecar")


def _llm_roles(program: Node, backend: Backend, client: LlmClient | None, bundle: PromptBundle | None) -> PreludeRoles:
    prompt = build_prompt(annotate(program), bundle)
    client = client or LlmClient(backend.llm)
    return parse_detection(client.complete(prompt))


def detect(
    program: Node,
    backend: Backend,
    info: ScopeInfo | None = None,
    client: LlmClient | None = None,
    bundle: PromptBundle | None = None,
    heuristic: HeuristicConfig | None = None,
) -> PreludeRoles:
    """Roles for ``program`` from ``backend``, falling back to the heuristic detector.

    Every returned triple has passed :func:`validate_dependencies`.
    """
    info = info or resolve_scopes(program)
    attempts: list[str] = []
    rejected = False

    def accept(roles: PreludeRoles) -> PreludeRoles | None:
        nonlocal rejected
        violations = validate_dependencies(program, roles, info)
        if violations:
            rejected = True
            attempts.append(f"{roles.source}: rejected ({'; '.join(map(str, violations))})")
            return None
        return roles

    if backend.kind != "heuristic":
        try:
            if backend.kind == "sidecar":
                proposed = read_sidecar(backend.sidecar_path)
            else:
                proposed = _llm_roles(program, backend, client, bundle)
        except (OSError, ValueError, LlmError, ParseFailure, MissingSlot, AnnotateError) as exc:
            attempts.append(f"{backend.kind}: {exc}")
            log.info("%s detection failed, falling back: %s", backend.kind, exc)
        else:
            roles = accept(proposed)
            if roles is not None:
                return roles

    try:
        roles = accept(heuristic_detect(program, info, heuristic))
    except NotFound as exc:
        attempts.append(f"heuristic: {exc}")
    else:
        if roles is not None:
            return roles
    raise DetectionFailed("validation" if rejected else "detection", attempts)
