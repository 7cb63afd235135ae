"""Prelude detection: model prompting, reply parsing, validation and a heuristic baseline."""

from .detector import Backend, DetectionFailed, detect, read_sidecar
from .heuristic import HeuristicConfig, NotFound, heuristic_detect, is_calls_wrapper, is_rotate, is_string_array
from .llm import LlmClient, LlmClientConfig, LlmError, MockTransport, prompt_digest
from .prompt import MissingSlot, PromptBundle, build_prompt, default_bundle, render_template
from .response import ParseFailure, parse_detection
from .roles import CALLS_WRAPPER_KEY, ROTATE_KEY, STRING_ARRAY_KEY, TEMPLATE_KEYS, PreludeRoles
from .validate import ALLOWED_GLOBALS, Violation, validate_dependencies

__all__ = [
    "ALLOWED_GLOBALS",
    "Backend",
    "CALLS_WRAPPER_KEY",
    "DetectionFailed",
    "HeuristicConfig",
    "LlmClient",
    "LlmClientConfig",
    "LlmError",
    "MissingSlot",
    "MockTransport",
    "NotFound",
    "ParseFailure",
    "PreludeRoles",
    "PromptBundle",
    "ROTATE_KEY",
    "STRING_ARRAY_KEY",
    "TEMPLATE_KEYS",
    "Violation",
    "build_prompt",
    "default_bundle",
    "detect",
    "heuristic_detect",
    "is_calls_wrapper",
    "is_rotate",
    "is_string_array",
    "parse_detection",
    "prompt_digest",
    "read_sidecar",
    "render_template",
    "validate_dependencies",
]
