"""Reading, writing and synthesizing case sets and selector traces."""

import json
from dataclasses import dataclass

import numpy as np

from .core import INT64_MAX, INT64_MIN, CaseSet
from .exceptions import EmptyInputError, ParseError, PreconditionError, SpecError

__all__ = [
    "ParsedCases",
    "GeneratorSpec",
    "Trace",
    "normalize_cases",
    "parse_cases",
    "serialize_cases",
    "parse_trace",
    "serialize_trace",
    "generate_cases",
    "generate_trace",
]

FORMATS = ("auto", "lines", "json")
GENERATOR_KINDS = ("dense_opcode", "sparse_uniform", "grouped")


@dataclass(frozen=True)
class ParsedCases:
    cases: CaseSet
    duplicates_dropped: int


@dataclass(frozen=True)
class Trace:
    selectors: tuple

    def __post_init__(self):
        object.__setattr__(self, "selectors", tuple(int(s) for s in self.selectors))

    def __len__(self):
        return len(self.selectors)

    def __iter__(self):
        return iter(self.selectors)


def normalize_cases(values):
    """Sort and deduplicate raw integers into a :class:`ParsedCases`."""
    values = [int(v) for v in values]
    if not values:
        raise EmptyInputError("no case values")
    uniq = sorted(set(values))
    return ParsedCases(CaseSet(uniq), len(values) - len(uniq))


def _decode(data):
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    return data


def _read_ints(text, key):
    """Integers from whitespace-separated lines or a JSON document.

    ``key`` names the list inside a JSON object ("cases" or "selectors");
    a bare JSON list is accepted too.
    """
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        return _read_json_ints(text, key)
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for tok in line.replace(",", " ").split():
            try:
                v = int(tok, 10)
            except ValueError:
                raise ParseError(f"not a decimal integer: {tok!r}", line=lineno) from None
            if not INT64_MIN <= v <= INT64_MAX:
                raise ParseError(f"value {v} does not fit in 64 bits", line=lineno)
            out.append(v)
    return out


def _read_json_ints(text, key):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if isinstance(doc, dict):
        if key not in doc:
            raise ParseError(f"JSON object has no {key!r} list")
        doc = doc[key]
    if not isinstance(doc, list):
        raise ParseError(f"{key!r} must be a list of integers")
    for v in doc:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ParseError(f"{key!r} entry {v!r} is not an integer")
        if not INT64_MIN <= v <= INT64_MAX:
            raise ParseError(f"value {v} does not fit in 64 bits")
    return doc


def parse_cases(data, format="auto"):
    """Parse case values from text or bytes.

    ``lines`` reads whitespace- or newline-separated decimal integers
    (``#`` starts a comment), ``json`` reads ``{"cases": [...]}`` or a bare
    list, and ``auto`` picks JSON when the first non-blank character is
    ``{`` (or ``[``).
    """
    if format not in FORMATS:
        raise PreconditionError(f"format must be one of {FORMATS}, got {format!r}")
    text = _decode(data)
    if format == "json":
        values = _read_json_ints(text, "cases")
    elif format == "lines":
        stripped = text.lstrip()
        if stripped.startswith("{") or stripped.startswith("["):
            raise ParseError("JSON input given with format 'lines'", line=1)
        values = _read_ints(text, "cases")
    else:
        values = _read_ints(text, "cases")
    if not values:
        raise EmptyInputError("no case values in input")
    return normalize_cases(values)


def serialize_cases(cases, format="lines"):
    cases = CaseSet(cases)
    if format == "json":
        return json.dumps({"cases": cases.tolist()})
    return "".join(f"{v}\n" for v in cases)


def parse_trace(data):
    """Trace from newline-separated integers or ``{"selectors": [...]}``."""
    values = _read_ints(_decode(data), "selectors")
    if not values:
        raise EmptyInputError("no selectors in trace")
    return Trace(values)


def serialize_trace(trace, format="lines"):
    if format == "json":
        return json.dumps({"selectors": list(trace.selectors)})
    return "".join(f"{v}\n" for v in trace.selectors)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str = "sparse_uniform"
    n: int = 16
    value_range: tuple = (0, 1023)
    group_count: int = 4
    group_span: int = 8
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "value_range", tuple(int(v) for v in self.value_range))
        if self.kind not in GENERATOR_KINDS:
            raise SpecError(f"kind must be one of {GENERATOR_KINDS}, got {self.kind!r}")
        if self.n < 1:
            raise SpecError("n must be at least 1")
        lo, hi = self.value_range
        if lo > hi:
            raise SpecError(f"empty value range [{lo}, {hi}]")
        if lo < INT64_MIN or hi > INT64_MAX:
            raise SpecError("value range must fit in signed 64 bits")
        if self.kind == "sparse_uniform" and hi - lo + 1 < self.n:
            raise SpecError(f"range [{lo}, {hi}] cannot hold {self.n} distinct values")
        if self.kind == "grouped":
            if self.group_count < 1 or self.group_span < 1:
                raise SpecError("group_count and group_span must be positive")
            if self.n < self.group_count:
                raise SpecError("grouped needs at least one value per group")
            if self.n > self.group_count * self.group_span:
                raise SpecError(
                    f"{self.group_count} groups of span {self.group_span} "
                    f"cannot hold {self.n} values"
                )
            stride = (hi - lo + 1) // self.group_count
            if stride < 4 * self.group_span:
                raise SpecError(
                    f"range [{lo}, {hi}] too narrow for {self.group_count} "
                    f"well-separated groups of span {self.group_span}"
                )


def _rng(seed):
    return np.random.default_rng(np.uint64(seed % 2**64))


def generate_cases(spec):
    """Deterministic synthetic case set described by ``spec``.

    ``dense_opcode`` is ``0..n-1`` (the range is ignored).
    ``sparse_uniform`` draws ``n`` distinct values uniformly from the range.
    ``grouped`` splits the range into ``group_count`` equal strides and
    puts one window of ``group_span`` slots in the first half of each
    stride; values fill each window near-consecutively, and neighbouring
    windows are at least ``2 * group_span`` apart.
    """
    rng = _rng(spec.seed)
    lo, hi = spec.value_range
    if spec.kind == "dense_opcode":
        return CaseSet(list(range(spec.n)))
    if spec.kind == "sparse_uniform":
        chosen = set()
        while len(chosen) < spec.n:
            need = spec.n - len(chosen)
            draw = rng.integers(0, hi - lo + 1, size=2 * need + 8, dtype=np.uint64)
            for d in draw.tolist():
                chosen.add(lo + d)
                if len(chosen) == spec.n:
                    break
        return CaseSet(sorted(chosen))
    stride = (hi - lo + 1) // spec.group_count
    sizes = [spec.n // spec.group_count] * spec.group_count
    for k in range(spec.n % spec.group_count):
        sizes[k] += 1
    values = []
    for k, size in enumerate(sizes):
        start = lo + k * stride + int(rng.integers(0, stride // 2 - spec.group_span + 1))
        slots = rng.choice(spec.group_span, size=size, replace=False)
        values.extend(start + int(s) for s in sorted(slots.tolist()))
    return CaseSet(values)


def generate_trace(cases, distribution="uniform", length=1000, seed=0, zipf_s=1.0):
    """Deterministic selector trace drawn from the case values.

    ``distribution`` is ``uniform``, ``cyclic`` (values in ascending order,
    repeated) or ``zipf``; ``"zipf(1.2)"`` sets the exponent inline.
    Zipf ranks cases by ascending value, so the smallest value is the most
    frequent.
    """
    cases = CaseSet(cases)
    distribution, zipf_s = _parse_distribution(distribution, zipf_s)
    if length < 1:
        raise SpecError("trace length must be at least 1")
    vals = cases.values
    if distribution == "cyclic":
        idx = np.arange(length) % cases.n
        return Trace(vals[idx].tolist())
    rng = _rng(seed)
    if distribution == "uniform":
        idx = rng.integers(0, cases.n, size=length)
    else:
        weights = 1.0 / np.arange(1, cases.n + 1, dtype=float) ** zipf_s
        cdf = np.cumsum(weights)
        cdf /= cdf[-1]
        idx = np.searchsorted(cdf, rng.random(length), side="right")
        idx = np.minimum(idx, cases.n - 1)
    return Trace(vals[idx].tolist())


def _parse_distribution(distribution, zipf_s):
    name = distribution.strip().lower()
    if name.startswith("zipf(") and name.endswith(")"):
        try:
            zipf_s = float(name[5:-1])
        except ValueError:
            raise SpecError(f"bad zipf exponent in {distribution!r}") from None
        name = "zipf"
    if name not in ("uniform", "zipf", "cyclic"):
        raise SpecError(f"unknown distribution {distribution!r}")
    if name == "zipf" and not zipf_s > 0:
        raise SpecError(f"zipf exponent must be positive, got {zipf_s}")
    return name, zipf_s
