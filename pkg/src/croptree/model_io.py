"""Text serialization for trained trees.

The format is line-oriented UTF-8, LF-terminated, and canonical: saving,
loading and saving again reproduces identical bytes.  A header pins the
format version, algorithm, attribute list, class list and training
parameters; the body is an indented rule dump:

    jun <= 187.5: A1 (5/0)
    jun > 187.5
    |   aug <= 95: C3 (3/1) {B3:1,C3:2}
    |   aug > 95: B2 (2/0)

Leaves print their total training weight and misclassified weight as
``(weight/errors)``.  When errors are nonzero the full per-class
distribution follows in braces (class order, nonzero entries only) so a
loaded tree reproduces not just the predicted classes but the predicted
probability distributions exactly.  A tree that is a single leaf has a
one-line body such as ``: C3 (10/2) {B2:2,C3:8}``.
"""

from __future__ import annotations

import math
import re
from typing import List, Sequence, Tuple, Union

from .dataset import format_number
from .errors import ModelFormatError
from .trees import (ALGORITHMS, DecisionTree, Internal, Leaf, Node,
                    TrainParams)

FORMAT_VERSION = 1

_MAGIC = f"croptree-model v{FORMAT_VERSION}"

_BRANCH_RE = re.compile(
    r"^(?P<attr>\S+) (?P<op><=|>) (?P<thr>[^\s:]+)(?P<leaf>: .+)?$")
_LEAF_RE = re.compile(
    r"^: (?P<cls>\S+) \((?P<w>[^/()]+)/(?P<e>[^/()]+)\)"
    r"(?: \{(?P<dist>[^{}]*)\})?$")


def _params_text(params: TrainParams, n_attributes: int) -> str:
    if params.algorithm == "gainratio":
        fields = [("min_leaf", str(params.min_leaf)),
                  ("confidence_factor", format_number(params.confidence_factor)),
                  ("prune", "true" if params.prune else "false")]
    elif params.algorithm == "randomsubset":
        fields = [("k", str(params.resolved_k(n_attributes)))]
    else:
        fields = [("min_leaf", str(params.min_leaf)),
                  ("prune_folds", str(params.prune_folds))]
    fields.append(("seed", str(params.seed)))
    return " ".join(f"{k}={v}" for k, v in fields)


def _leaf_errors(counts: Sequence[float], weight: float) -> float:
    return max(weight - max(counts), 0.0) if counts else 0.0


def _leaf_text(leaf: Leaf, class_domain: Sequence[str]) -> str:
    weight = leaf.weight
    errors = _leaf_errors(leaf.counts, weight)
    text = (f": {class_domain[leaf.predicted_index]} "
            f"({format_number(weight)}/{format_number(errors)})")
    if errors > 0.0:
        entries = ",".join(
            f"{cls}:{format_number(count)}"
            for cls, count in zip(class_domain, leaf.counts) if count > 0.0)
        text += " {" + entries + "}"
    return text


def _emit(node: Internal, depth: int, attribute_names: Sequence[str],
          class_domain: Sequence[str], out: List[str]) -> None:
    indent = "|   " * depth
    for op, child in (("<=", node.left), (">", node.right)):
        line = (f"{indent}{attribute_names[node.attribute]} {op} "
                f"{format_number(node.threshold)}")
        if isinstance(child, Leaf):
            out.append(line + _leaf_text(child, class_domain))
        else:
            out.append(line)
            _emit(child, depth + 1, attribute_names, class_domain, out)


def save_model(tree: DecisionTree) -> bytes:
    """Serialize a trained tree to canonical UTF-8 bytes."""
    lines = [
        _MAGIC,
        f"algorithm: {tree.params.algorithm}",
        "attributes: " + ",".join(tree.attribute_names),
        "classes: " + ",".join(tree.class_domain),
        "params: " + _params_text(tree.params, len(tree.attribute_names)),
        "tree:",
    ]
    if isinstance(tree.root, Leaf):
        lines.append(_leaf_text(tree.root, tree.class_domain))
    else:
        _emit(tree.root, 0, tree.attribute_names, tree.class_domain, lines)
    return ("\n".join(lines) + "\n").encode("utf-8")


def _parse_number(text: str, lineno: int, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ModelFormatError(lineno, f"bad {what} {text!r}") from None
    if not math.isfinite(value):
        raise ModelFormatError(lineno, f"non-finite {what} {text!r}")
    return value


def _parse_leaf(text: str, lineno: int, class_domain: Tuple[str, ...]) -> Leaf:
    match = _LEAF_RE.match(text)
    if not match:
        raise ModelFormatError(lineno, f"malformed leaf {text!r}")
    cls = match.group("cls")
    if cls not in class_domain:
        raise ModelFormatError(lineno, f"unknown class {cls!r}")
    weight = _parse_number(match.group("w"), lineno, "leaf weight")
    errors = _parse_number(match.group("e"), lineno, "leaf error count")
    counts = [0.0] * len(class_domain)
    if match.group("dist") is not None:
        last_index = -1
        for entry in match.group("dist").split(","):
            name, sep, count_text = entry.partition(":")
            if not sep or name not in class_domain:
                raise ModelFormatError(lineno, f"malformed distribution entry {entry!r}")
            idx = class_domain.index(name)
            if idx <= last_index:
                raise ModelFormatError(
                    lineno, "distribution entries must follow class-domain order")
            last_index = idx
            counts[idx] = _parse_number(count_text, lineno, "class count")
            if counts[idx] < 0.0:
                raise ModelFormatError(lineno, "negative class count")
    else:
        counts[class_domain.index(cls)] = weight
    leaf = Leaf(tuple(counts))
    if leaf.weight != weight or _leaf_errors(counts, weight) != errors:
        raise ModelFormatError(lineno, "leaf weight/errors do not match distribution")
    if class_domain[leaf.predicted_index] != cls:
        raise ModelFormatError(lineno, f"class {cls!r} is not the leaf majority")
    return leaf


def _parse_node(lines: List[str], pos: int, depth: int, base: int,
                attribute_names: Tuple[str, ...],
                class_domain: Tuple[str, ...]) -> Tuple[Node, int]:
    indent = "|   " * depth

    def branch(pos: int, expected_op: str):
        lineno = base + pos
        if pos >= len(lines):
            raise ModelFormatError(lineno, "unexpected end of tree body")
        line = lines[pos]
        if not line.startswith(indent) or line[len(indent):len(indent) + 1] in ("", "|", " "):
            raise ModelFormatError(lineno, f"bad indentation at depth {depth}")
        match = _BRANCH_RE.match(line[len(indent):])
        if not match:
            raise ModelFormatError(lineno, f"malformed branch line {line!r}")
        if match.group("op") != expected_op:
            raise ModelFormatError(lineno, f"expected {expected_op!r} branch")
        attr = match.group("attr")
        if attr not in attribute_names:
            raise ModelFormatError(lineno, f"unknown attribute {attr!r}")
        threshold = _parse_number(match.group("thr"), lineno, "threshold")
        if match.group("leaf"):
            child = _parse_leaf(match.group("leaf"), lineno, class_domain)
            return attr, threshold, child, pos + 1
        child, next_pos = _parse_node(lines, pos + 1, depth + 1, base,
                                      attribute_names, class_domain)
        return attr, threshold, child, next_pos

    attr, threshold, left, pos = branch(pos, "<=")
    attr2, threshold2, right, pos = branch(pos, ">")
    if attr2 != attr or threshold2 != threshold:
        raise ModelFormatError(base + pos - 1,
                               "branch pair tests different attribute/threshold")
    return Internal(attribute_names.index(attr), threshold, left, right), pos


def load_model(data: Union[bytes, str]) -> DecisionTree:
    """Parse model bytes back into a tree equivalent to the saved one."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ModelFormatError(0, f"not valid UTF-8: {exc}") from None
    if "\r" in data:
        raise ModelFormatError(0, "model files must use LF line endings")
    if not data.endswith("\n"):
        raise ModelFormatError(max(data.count("\n"), 1), "file must end with a newline")
    lines = data.split("\n")[:-1]

    def expect(i: int, prefix: str) -> str:
        if i >= len(lines) or not lines[i].startswith(prefix):
            raise ModelFormatError(i + 1, f"expected a {prefix.rstrip(': ')!r} line")
        return lines[i][len(prefix):]

    if not lines or lines[0] != _MAGIC:
        raise ModelFormatError(1, f"expected header {_MAGIC!r}")
    algorithm = expect(1, "algorithm: ")
    if algorithm not in ALGORITHMS:
        raise ModelFormatError(2, f"unknown algorithm {algorithm!r}")
    attribute_names = tuple(expect(2, "attributes: ").split(","))
    class_domain = tuple(expect(3, "classes: ").split(","))
    if any(not name for name in attribute_names) or any(not c for c in class_domain):
        raise ModelFormatError(3, "empty attribute or class name")
    params = _parse_params(expect(4, "params: "), algorithm, 5)
    if lines[5:6] != ["tree:"]:
        raise ModelFormatError(6, "expected a 'tree:' line")
    body = lines[6:]
    if not body:
        raise ModelFormatError(7, "missing tree body")

    if body[0].startswith(":"):
        if len(body) > 1:
            raise ModelFormatError(8, "unexpected content after a single-leaf body")
        root: Node = _parse_leaf(body[0], 7, class_domain)
    else:
        root, consumed = _parse_node(body, 0, 0, 7, attribute_names, class_domain)
        if consumed != len(body):
            raise ModelFormatError(7 + consumed, "unexpected trailing content")
    return DecisionTree(root, attribute_names, class_domain, params)


def _parse_params(text: str, algorithm: str, lineno: int) -> TrainParams:
    expected = {
        "gainratio": ("min_leaf", "confidence_factor", "prune", "seed"),
        "randomsubset": ("k", "seed"),
        "reducederror": ("min_leaf", "prune_folds", "seed"),
    }[algorithm]
    values = {}
    tokens = text.split(" ") if text else []
    if len(tokens) != len(expected):
        raise ModelFormatError(lineno, f"expected params {' '.join(expected)}")
    for token, key in zip(tokens, expected):
        name, sep, value = token.partition("=")
        if not sep or name != key:
            raise ModelFormatError(lineno, f"expected param {key!r}, got {token!r}")
        values[key] = value
    try:
        if algorithm == "gainratio":
            if values["prune"] not in ("true", "false"):
                raise ValueError(f"bad prune flag {values['prune']!r}")
            return TrainParams("gainratio",
                               min_leaf=int(values["min_leaf"]),
                               confidence_factor=float(values["confidence_factor"]),
                               prune=values["prune"] == "true",
                               seed=int(values["seed"]))
        if algorithm == "randomsubset":
            return TrainParams("randomsubset", k=int(values["k"]),
                               seed=int(values["seed"]))
        return TrainParams("reducederror",
                           min_leaf=int(values["min_leaf"]),
                           prune_folds=int(values["prune_folds"]),
                           seed=int(values["seed"]))
    except ValueError as exc:
        raise ModelFormatError(lineno, f"bad params: {exc}") from None
