"""A small mock computer-vision API with opaque handle types.

Images live in the virtual file system as text of the form
``image WxH faces=K``; detection reports ``K`` faces when the classifier was
loaded from an ``.xml`` cascade file.
"""

from __future__ import annotations

import re

from ..errors import EvalRuntimeError
from ..lang.ast import BOOL, INT, STR, UNIT, opaque
from .api import ApiRegistry, OpaqueValue, register_api

CLASSIFIER = opaque("CascadeClassifier")
MAT = opaque("Mat")
RECTS = opaque("MatOfRect")

_IMAGE_RE = re.compile(r"image\s+(\d+)x(\d+)(?:\s+faces=(\d+))?")


def _new_classifier(args, fs):
    path = args[0]
    if path is None:
        raise EvalRuntimeError("nullRead", "newClassifier(null)")
    return OpaqueValue("CascadeClassifier", {"path": path, "loaded": path.endswith(".xml")})


def _imread(args, fs):
    path = args[0]
    if path is None or path not in fs:
        raise EvalRuntimeError("apiError", f"cannot read image {path!r}")
    m = _IMAGE_RE.fullmatch(fs[path].strip())
    if m is None:
        raise EvalRuntimeError("apiError", f"{path!r} is not an image")
    w, h, faces = int(m[1]), int(m[2]), int(m[3] or 0)
    return OpaqueValue("Mat", {"w": w, "h": h, "faces": faces, "boxes": 0})


def _detect(args, fs):
    clf, img = args
    found = img.state["faces"] if clf.state["loaded"] else 0
    return OpaqueValue("MatOfRect", {"count": found})


def _face_count(args, fs):
    return args[0].state["count"]


def _rectangle(args, fs):
    img, rects = args
    img.state["boxes"] += rects.state["count"]
    return None


def _imwrite(args, fs):
    path, img = args
    if path is None:
        raise EvalRuntimeError("nullRead", "imwrite(null)")
    if path in fs:
        # the virtual file system is read-only: existing files cannot be replaced
        raise EvalRuntimeError("apiError", f"cannot overwrite {path!r}")
    return True


def _cvt_color(args, fs):
    return OpaqueValue("Mat", dict(args[0].state))


def _blur(args, fs):
    img, k = args
    if k <= 0:
        raise EvalRuntimeError("apiError", "blur kernel must be positive")
    return OpaqueValue("Mat", dict(img.state))


def _new_mat(args, fs):
    w, h = args
    if w <= 0 or h <= 0:
        raise EvalRuntimeError("apiError", "bad image size")
    return OpaqueValue("Mat", {"w": w, "h": h, "faces": 0, "boxes": 0})


def _image_width(args, fs):
    return args[0].state["w"]


VISION_API = (
    ("newClassifier", (STR,), CLASSIFIER, _new_classifier),
    ("imread", (STR,), MAT, _imread),
    ("detectMultiScale", (CLASSIFIER, MAT), RECTS, _detect),
    ("faceCount", (RECTS,), INT, _face_count),
    ("rectangle", (MAT, RECTS), UNIT, _rectangle),
    ("imwrite", (STR, MAT), BOOL, _imwrite),
    ("cvtColor", (MAT,), MAT, _cvt_color),
    ("blur", (MAT, INT), MAT, _blur),
    ("newMat", (INT, INT), MAT, _new_mat),
    ("imageWidth", (MAT,), INT, _image_width),
)


def register_vision_api(reg: ApiRegistry) -> None:
    for name, params, ret, fn in VISION_API:
        register_api(reg, name, params, ret, fn)
