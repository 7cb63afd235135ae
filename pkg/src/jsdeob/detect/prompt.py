"""Prompt construction for model-based prelude detection."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

from ..frontend.annotate import AnnotatedSource, annotate
from .roles import PreludeRoles

SLOTS = (
    "string_array_template",
    "string_array_template_example",
    "string_array_calls_wrapper_template",
    "string_array_calls_wrapper_template_example_1",
    "string_array_calls_wrapper_template_example_2",
    "string_array_calls_wrapper_template_example_3",
    "string_array_rotate_function_template",
    "string_array_rotate_function_template_example_1",
    "string_array_rotate_function_template_example_2",
    "worked_example",
    "worked_example_output",
    "annotated_example",
)
_SLOT = re.compile(r"\{\{([a-z0-9_]+)\}\}")


class MissingSlot(ValueError):
    pass


TEMPLATE_TEXT = """\
You are analysing JavaScript produced by Obfuscator.IO. When it hides string
literals it adds three generated pieces of code, named StringArrayTemplate,
StringArrayCallsWrapperTemplate and StringArrayRotateFunctionTemplate.

## StringArrayTemplate
A function holding an array with every original string plus filler entries.
On its first call it replaces itself with a function returning the same array.
Template:
```js
{{string_array_template}}
```
Example:
```js
{{string_array_template_example}}
```

## StringArrayCallsWrapperTemplate
A function that maps an index, minus a fixed offset, to an entry of the array.
Some configurations also decode the entry (for example base64).
Template:
```js
{{string_array_calls_wrapper_template}}
```
Example 1:
```js
{{string_array_calls_wrapper_template_example_1}}
```
Example 2:
```js
{{string_array_calls_wrapper_template_example_2}}
```
Example 3:
```js
{{string_array_calls_wrapper_template_example_3}}
```

## StringArrayRotateFunctionTemplate
An immediately invoked function that keeps moving the first array entry to the
end until a parseInt checksum over some entries equals a target number.
Template:
```js
{{string_array_rotate_function_template}}
```
Example 1:
```js
{{string_array_rotate_function_template_example_1}}
```
Example 2:
```js
{{string_array_rotate_function_template_example_2}}
```

## Task
The code to inspect is cut into numbered parts. Part N starts at the line
`// <N>` and ends at the line `// </N>`. Answer with a JSON object mapping each
of the three template names to the number of the part that contains it.

Worked example input:
<example_java_script>
{{worked_example}}</example_java_script>

Output:
{{worked_example_output}}

Code to inspect:
<investigation_java_script>
{{annotated_example}}</investigation_java_script>

Rules:
* The three numbers are always different from each other.
* Reply with the JSON object only.

Output:
"""

_ARRAY_SKELETON = """\
function {stringArrayFunctionName}() {
  var {stringArrayName} = [{stringArrayStorageItems}];
  {stringArrayFunctionName} = function () {
    return {stringArrayName};
  };
  return {stringArrayFunctionName}();
}"""

_WRAPPER_SKELETON = """\
function {stringArrayCallsWrapperName}({indexParameterName}, {keyParameterName}) {
  var {stringArrayCacheName} = {stringArrayFunctionName}();
  return {stringArrayCallsWrapperName} = function ({indexParameterName}, {keyParameterName}) {
    {indexParameterName} = {indexParameterName} - {indexShiftAmount};
    var {valueName} = {stringArrayCacheName}[{indexParameterName}];
    {decodeCode}
    return {valueName};
  }, {stringArrayCallsWrapperName}({indexParameterName}, {keyParameterName});
}"""

_ROTATE_SKELETON = """\
(function ({stringArrayFunctionName}, {comparisonValue}) {
  var {stringArrayName} = {stringArrayFunctionName}();
  while (true) {
    try {
      var {checksumName} = {comparisonExpressionCode};
      if ({checksumName} === {comparisonValue}) break;
      else {stringArrayName}['push']({stringArrayName}['shift']());
    } catch ({errorName}) {
      {stringArrayName}['push']({stringArrayName}['shift']());
    }
  }
}({stringArrayFunctionName}, {comparisonValueCode}));"""


@dataclass(frozen=True)
class PromptBundle:
    template_text: str = TEMPLATE_TEXT
    slots: dict[str, str] = field(default_factory=dict)


def _annotated_text(annotated: AnnotatedSource | str) -> str:
    return annotated.text if isinstance(annotated, AnnotatedSource) else annotated


def render_template(template: str, values: dict[str, str]) -> str:
    """Fill ``{{name}}`` slots in one pass; every slot must be present exactly once and filled."""
    names = _SLOT.findall(template)
    for name in names:
        if names.count(name) != 1:
            raise MissingSlot(f"slot {name!r} appears {names.count(name)} times")
        if not values.get(name):
            raise MissingSlot(f"slot {name!r} is not filled")
    return _SLOT.sub(lambda m: values[m.group(1)], template)


def build_prompt(annotated: AnnotatedSource | str, bundle: PromptBundle | None = None) -> str:
    text = _annotated_text(annotated)
    if not text.strip():
        raise MissingSlot("annotated input is empty")
    bundle = bundle or default_bundle()
    return render_template(bundle.template_text, {**bundle.slots, "annotated_example": text})


@lru_cache(maxsize=1)
def default_bundle() -> PromptBundle:
    """Templates and examples drawn from the built-in fixture obfuscator."""
    from ..fixtures.examples import prompt_example
    from ..fixtures.obfuscator import ObfuscationConfig, obfuscate_source
    from ..frontend.printer import print_statement

    plain = obfuscate_source("console.log('a', 'b', 'c');\n", ObfuscationConfig(rng_seed=101))
    second = obfuscate_source("console.log('x', 'y');\n", ObfuscationConfig(offset=0x1b5, rng_seed=202))
    encoded = obfuscate_source("console.log('p', 'q');\n", ObfuscationConfig(encoding="base64", rng_seed=303))

    def stmt(ob, i: int) -> str:
        return print_statement(ob.program.children[i]).rstrip("\n")

    program, _, roles = prompt_example()
    example_roles = PreludeRoles(roles["string_array"], roles["calls_wrapper"], roles["rotate"], "llm")
    slots = {
        "string_array_template": _ARRAY_SKELETON,
        "string_array_template_example": stmt(plain, 0),
        "string_array_calls_wrapper_template": _WRAPPER_SKELETON,
        "string_array_calls_wrapper_template_example_1": stmt(plain, 2),
        "string_array_calls_wrapper_template_example_2": stmt(encoded, 2),
        "string_array_calls_wrapper_template_example_3": stmt(second, 2),
        "string_array_rotate_function_template": _ROTATE_SKELETON,
        "string_array_rotate_function_template_example_1": stmt(plain, 1),
        "string_array_rotate_function_template_example_2": stmt(encoded, 1),
        "worked_example": annotate(program).text,
        "worked_example_output": example_roles.render(),
    }
    return PromptBundle(TEMPLATE_TEXT, slots)
