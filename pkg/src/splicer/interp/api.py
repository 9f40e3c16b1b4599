"""Registered external functions (the API table) and built-in behaviors."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..errors import DuplicateApi, EvalRuntimeError
from ..lang.ast import BOOL, INT, STR, UNIT, Type, array_of, opaque
from .vfs import VirtualFS


@dataclass(frozen=True)
class ApiSignature:
    params: tuple[Type, ...]
    ret: Type

    @property
    def receiver(self) -> Optional[str]:
        if self.params and self.params[0].kind == "opaque":
            return self.params[0].name
        return None


@dataclass(frozen=True)
class ApiFunction:
    name: str
    signature: ApiSignature
    behavior: Callable[[list, VirtualFS], Any]


@dataclass
class OpaqueValue:
    """Runtime handle for an API object; ``state`` is private to one evaluation."""

    type_name: str
    state: dict = field(default_factory=dict)


@dataclass
class ApiRegistry:
    functions: dict[str, ApiFunction] = field(default_factory=dict)
    opaque_types: set[str] = field(default_factory=set)

    def register(self, name: str, signature: ApiSignature, behavior) -> None:
        if name in self.functions:
            raise DuplicateApi(f"API function {name!r} is already registered")
        for t in (*signature.params, signature.ret):
            base = t.elem if t.kind == "array" else t
            if base.kind == "opaque":
                self.opaque_types.add(base.name)
        self.functions[name] = ApiFunction(name, signature, behavior)

    def register_type(self, name: str) -> None:
        self.opaque_types.add(name)

    def get(self, name: str) -> Optional[ApiFunction]:
        return self.functions.get(name)

    def copy(self) -> "ApiRegistry":
        return ApiRegistry(dict(self.functions), set(self.opaque_types))

    def type_known(self, t: Type) -> bool:
        base = t.elem if t.kind == "array" else t
        return base.kind != "opaque" or base.name in self.opaque_types


def register_api(registry: ApiRegistry, name: str, params, ret: Type, behavior) -> None:
    registry.register(name, ApiSignature(tuple(params), ret), behavior)


# ---------------------------------------------------------------------------
# Built-ins
# ---------------------------------------------------------------------------


def _parse_int(args, fs):
    text = args[0]
    if text is None:
        raise EvalRuntimeError("nullRead", "parseInt(null)")
    try:
        return int(text.strip())
    except ValueError:
        raise EvalRuntimeError("badParse", repr(text)) from None


def _split(args, fs):
    s, sep = args
    if s is None or sep is None:
        raise EvalRuntimeError("nullRead", "split(null)")
    if sep == "":
        raise EvalRuntimeError("apiError", "empty separator")
    return s.split(sep)


def _read_file(args, fs):
    path = args[0]
    if path is None or path not in fs:
        raise EvalRuntimeError("apiError", f"no such file {path!r}")
    return fs[path]


def _file_exists(args, fs):
    return args[0] in fs


def _str_length(args, fs):
    if args[0] is None:
        raise EvalRuntimeError("nullRead", "strLength(null)")
    return len(args[0])


def _char_at(args, fs):
    s, i = args
    if s is None:
        raise EvalRuntimeError("nullRead", "charAt(null)")
    if not 0 <= i < len(s):
        raise EvalRuntimeError("indexOutOfBounds", f"charAt {i}")
    return s[i]


def _substring(args, fs):
    s, lo, hi = args
    if s is None:
        raise EvalRuntimeError("nullRead", "substring(null)")
    if not 0 <= lo <= hi <= len(s):
        raise EvalRuntimeError("indexOutOfBounds", f"substring {lo}..{hi}")
    return s[lo:hi]


def _contains(args, fs):
    s, part = args
    if s is None or part is None:
        raise EvalRuntimeError("nullRead", "contains(null)")
    return part in s


def _index_of(args, fs):
    s, part = args
    if s is None or part is None:
        raise EvalRuntimeError("nullRead", "indexOf(null)")
    return s.find(part)


def _trim(args, fs):
    if args[0] is None:
        raise EvalRuntimeError("nullRead", "trim(null)")
    return args[0].strip()


def _to_lower(args, fs):
    if args[0] is None:
        raise EvalRuntimeError("nullRead", "toLowerCase(null)")
    return args[0].lower()


def _str_equals(args, fs):
    return args[0] == args[1]


def _to_string(args, fs):
    return str(args[0])


def _list_files(args, fs):
    prefix = args[0]
    if prefix is None:
        raise EvalRuntimeError("nullRead", "listFiles(null)")
    prefix = prefix.rstrip("/") + "/"
    return sorted(p for p in fs if p.startswith(prefix))


def _abs(args, fs):
    return abs(args[0])


def _max(args, fs):
    return max(args[0], args[1])


def _min(args, fs):
    return min(args[0], args[1])


def _println(args, fs):
    return None


BUILTINS = (
    ("parseInt", (STR,), INT, _parse_int),
    ("split", (STR, STR), array_of(STR), _split),
    ("readFile", (STR,), STR, _read_file),
    ("fileExists", (STR,), BOOL, _file_exists),
    ("listFiles", (STR,), array_of(STR), _list_files),
    ("strLength", (STR,), INT, _str_length),
    ("charAt", (STR, INT), STR, _char_at),
    ("substring", (STR, INT, INT), STR, _substring),
    ("contains", (STR, STR), BOOL, _contains),
    ("indexOf", (STR, STR), INT, _index_of),
    ("trim", (STR,), STR, _trim),
    ("toLowerCase", (STR,), STR, _to_lower),
    ("strEquals", (STR, STR), BOOL, _str_equals),
    ("toString", (INT,), STR, _to_string),
    ("abs", (INT,), INT, _abs),
    ("max", (INT, INT), INT, _max),
    ("min", (INT, INT), INT, _min),
    ("println", (STR,), UNIT, _println),
)


def default_registry() -> ApiRegistry:
    """A fresh registry with the built-ins and the mock vision API."""
    from .mockapi import register_vision_api

    reg = ApiRegistry()
    for name, params, ret, fn in BUILTINS:
        register_api(reg, name, params, ret, fn)
    register_vision_api(reg)
    return reg


_DEFAULT: Optional[ApiRegistry] = None


def shared_registry() -> ApiRegistry:
    """Process-wide default registry used when callers pass none."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = default_registry()
    return _DEFAULT


def clone_value(v):
    return copy.deepcopy(v)
