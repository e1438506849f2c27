"""Experiment configuration: parsing, validation, and a canonical printer.

The format is an INI-style file with one section per concern; rationals are
written as ``p/q`` strings so exactness survives serialization, and the
element and polynomial grammars are documented in the README.  Every
diagnostic carries a stable code (``missing-key``, ``bad-value``,
``degenerate-lattice``, ``rank-mismatch``, ``undefined-reference``,
``duplicate-name``, ``bad-syntax``).  ``parse_config`` is total: it either
returns a validated ``ExperimentConfig`` or raises ``ConfigError``.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass
from fractions import Fraction

from .equidist import Character, PiecewiseLinearBeta, SeminormPullback, TestFunction
from .errors import ConfigError
from .goodred import CurvePoly, format_curve_poly, parse_curve_poly
from .tropical import (LaurentPoly, PolySyntaxError, format_laurent_poly,
                       parse_laurent_poly)
from .uniformization import RaynaudData

SUBCOMMANDS = ("torsion", "weyl", "corner", "equidist", "goodred", "all")


@dataclass(frozen=True)
class SubvarietySpec:
    """Symbolic subvariety choice; realized against concrete curves at run time."""

    kind: str                      # diagonal | graph | hfiber | vfiber
    n: int = 0                     # multiplication degree for graphs
    point: tuple[int, int] | None = None  # prime-field coordinates for fibers


@dataclass(frozen=True)
class GoodReductionConfig:
    p: int
    k: int
    a: int
    b: int
    m_list: tuple[int, ...]
    subvarieties: tuple[SubvarietySpec, ...]
    h: CurvePoly


@dataclass(frozen=True)
class SupersingularConfig:
    p: int
    a: int
    b: int
    k_max: int


@dataclass(frozen=True)
class ExperimentConfig:
    data: RaynaudData
    polynomials: tuple[tuple[str, LaurentPoly], ...]
    test_functions: tuple[tuple[str, TestFunction], ...]
    m_list: tuple[int, ...]
    grid: int
    k_max: int
    jobs: int
    out: str
    good_reduction: GoodReductionConfig | None
    supersingular: SupersingularConfig | None

    def polynomial(self, name: str) -> LaurentPoly:
        for key, poly in self.polynomials:
            if key == name:
                return poly
        raise KeyError(name)


def _parse_fraction(text: str, where: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError("bad-value", f"{where}: not a rational: {text.strip()!r}") from exc


def _parse_int(text: str, where: str) -> int:
    try:
        return int(text.strip())
    except ValueError as exc:
        raise ConfigError("bad-value", f"{where}: not an integer: {text.strip()!r}") from exc


def _parse_matrix(text: str, where: str) -> list[list[Fraction]]:
    """Row-per-generator rational matrix, e.g. ``[[1,0],[1/2,3/2]]``."""
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ConfigError("bad-value", f"{where}: expected a [[...],[...]] matrix")
    body = text[1:-1].strip()
    if not body:
        return []
    rows = []
    depth = 0
    current = []
    for ch in body:
        if ch == "[":
            depth += 1
            if depth == 1:
                current = []
                continue
        elif ch == "]":
            depth -= 1
            if depth == 0:
                rows.append("".join(current))
                continue
            if depth < 0:
                raise ConfigError("bad-syntax", f"{where}: unbalanced brackets")
        elif depth == 0:
            if ch not in ", \t":
                raise ConfigError("bad-syntax", f"{where}: unexpected {ch!r} between rows")
            continue
        current.append(ch)
    if depth != 0:
        raise ConfigError("bad-syntax", f"{where}: unbalanced brackets")
    return [[_parse_fraction(cell, where) for cell in row.split(",")] if row.strip() else []
            for row in rows]


def _parse_int_list(text: str, where: str) -> tuple[int, ...]:
    items = [part for part in re.split(r"[,\s]+", text.strip()) if part]
    return tuple(_parse_int(item, where) for item in items)


def _require(section, key: str, section_name: str) -> str:
    if key not in section:
        raise ConfigError("missing-key", f"missing key {key!r} in [{section_name}]")
    return section[key]


_PAIR_RE = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


def _parse_profile(text: str, where: str) -> tuple[tuple[Fraction, Fraction], ...]:
    pairs = _PAIR_RE.findall(text)
    if not pairs:
        raise ConfigError("bad-value", f"{where}: expected breakpoints like (0,0) (1/2,1/2) (1,0)")
    return tuple((_parse_fraction(a, where), _parse_fraction(b, where)) for a, b in pairs)


def _parse_test_function(text: str, where: str, rank: int,
                         polynomials: dict[str, LaurentPoly]) -> TestFunction:
    parts = text.strip().split(None, 1)
    if not parts:
        raise ConfigError("bad-value", f"{where}: empty test function")
    kind = parts[0]
    rest = parts[1] if len(parts) > 1 else ""
    if kind == "character":
        words = rest.split()
        part = "re"
        if words and words[0] in ("re", "im"):
            part = words[0]
            words = words[1:]
        coords = tuple(_parse_int(w, where) for w in words)
        if len(coords) != rank:
            raise ConfigError("rank-mismatch",
                              f"{where}: character needs {rank} integer coordinates")
        return Character(coords, part)
    if kind == "pwl":
        segments = rest.split(";")
        if len(segments) != rank:
            raise ConfigError("rank-mismatch",
                              f"{where}: pwl needs {rank} profile(s) separated by ';'")
        try:
            return PiecewiseLinearBeta(tuple(_parse_profile(seg, where) for seg in segments))
        except ValueError as exc:
            raise ConfigError("bad-value", f"{where}: {exc}") from exc
    if kind == "seminorm":
        name = rest.strip()
        if name not in polynomials:
            raise ConfigError("undefined-reference",
                              f"{where}: unknown polynomial {name!r}")
        return SeminormPullback(polynomials[name])
    raise ConfigError("bad-value", f"{where}: unknown test function kind {kind!r}")


def _parse_subvariety(text: str, where: str) -> SubvarietySpec:
    words = text.strip().split()
    if not words:
        raise ConfigError("bad-value", f"{where}: empty subvariety spec")
    kind = words[0]
    if kind == "diagonal":
        return SubvarietySpec("diagonal")
    if kind == "graph":
        if len(words) != 2:
            raise ConfigError("bad-value", f"{where}: graph needs a multiplier")
        return SubvarietySpec("graph", n=_parse_int(words[1], where))
    if kind in ("hfiber", "vfiber"):
        if len(words) != 3:
            raise ConfigError("bad-value",
                              f"{where}: {kind} needs two prime-field coordinates")
        return SubvarietySpec(kind, point=(_parse_int(words[1], where),
                                           _parse_int(words[2], where)))
    raise ConfigError("bad-value", f"{where}: unknown subvariety {kind!r}")


def _ascending_positive(m_list: tuple[int, ...], where: str) -> tuple[int, ...]:
    if not m_list:
        raise ConfigError("bad-value", f"{where}: m_list must be nonempty")
    if any(m < 1 for m in m_list):
        raise ConfigError("bad-value", f"{where}: m_list entries must be positive")
    if any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise ConfigError("bad-value", f"{where}: m_list must be strictly ascending")
    return m_list


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a config file; raises ConfigError on any problem."""
    parser = configparser.ConfigParser(interpolation=None, strict=True,
                                       delimiters=("=",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError("duplicate-name",
                          f"duplicate key {exc.option!r} in [{exc.section}]",
                          line=exc.lineno) from exc
    except configparser.DuplicateSectionError as exc:
        raise ConfigError("duplicate-name", f"duplicate section [{exc.section}]",
                          line=exc.lineno) from exc
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("bad-syntax", "content before the first section header",
                          line=exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError("bad-syntax", "unparsable line", line=line) from exc

    if "uniformization" not in parser:
        raise ConfigError("missing-key", "missing section [uniformization]")
    uni = parser["uniformization"]
    r = _parse_int(_require(uni, "r", "uniformization"), "uniformization.r")
    s = _parse_int(_require(uni, "s", "uniformization"), "uniformization.s")
    n0 = _parse_int(uni.get("N0", "1"), "uniformization.N0")
    gamma = _parse_matrix(_require(uni, "gamma", "uniformization"), "uniformization.gamma")
    alpha_text = uni.get("alpha")
    if alpha_text is None:
        alpha = [[0] * r for _ in range(r)]
    else:
        alpha_rows = _parse_matrix(alpha_text, "uniformization.alpha")
        alpha = []
        for row in alpha_rows:
            ints = []
            for v in row:
                if v.denominator != 1:
                    raise ConfigError("bad-value",
                                      "uniformization.alpha: entries must be integers")
                ints.append(int(v))
            alpha.append(ints)
    try:
        data = RaynaudData.create(r, s, n0, alpha, gamma)
    except ValueError as exc:
        code = "degenerate-lattice" if "degenerate" in str(exc) else "rank-mismatch"
        raise ConfigError(code, f"uniformization: {exc}") from exc

    if "run" not in parser:
        raise ConfigError("missing-key", "missing section [run]")
    run = parser["run"]
    m_list = _ascending_positive(
        _parse_int_list(_require(run, "m_list", "run"), "run.m_list"), "run.m_list")
    grid = _parse_int(run.get("grid", "64"), "run.grid")
    if grid < 1:
        raise ConfigError("bad-value", "run.grid must be >= 1")
    k_max = _parse_int(run.get("k_max", "4"), "run.k_max")
    if k_max < 1:
        raise ConfigError("bad-value", "run.k_max must be >= 1")
    jobs = _parse_int(run.get("jobs", "1"), "run.jobs")
    if jobs < 1:
        raise ConfigError("bad-value", "run.jobs must be >= 1")
    out = run.get("out", "results").strip()

    polynomials: dict[str, LaurentPoly] = {}
    if "polynomials" in parser:
        for name, value in parser["polynomials"].items():
            try:
                polynomials[name] = parse_laurent_poly(value, data.r, data.angular_order)
            except PolySyntaxError as exc:
                raise ConfigError("bad-syntax",
                                  f"polynomials.{name}: {exc}",
                                  column=exc.column) from exc

    test_functions: list[tuple[str, TestFunction]] = []
    if "test_functions" in parser:
        for name, value in parser["test_functions"].items():
            fn = _parse_test_function(value, f"test_functions.{name}", data.r, polynomials)
            test_functions.append((name, fn))

    good_reduction = None
    if "good_reduction" in parser:
        gr = parser["good_reduction"]
        where = "good_reduction"
        good_reduction = GoodReductionConfig(
            p=_parse_int(_require(gr, "p", where), f"{where}.p"),
            k=_parse_int(_require(gr, "k", where), f"{where}.k"),
            a=_parse_int(_require(gr, "a", where), f"{where}.a"),
            b=_parse_int(_require(gr, "b", where), f"{where}.b"),
            m_list=_ascending_positive(
                _parse_int_list(_require(gr, "m_list", where), f"{where}.m_list"),
                f"{where}.m_list"),
            subvarieties=tuple(
                _parse_subvariety(part, f"{where}.subvarieties")
                for part in _require(gr, "subvarieties", where).split(",") if part.strip()),
            h=_parse_curve_poly_checked(_require(gr, "h", where), f"{where}.h"),
        )

    supersingular = None
    if "supersingular" in parser:
        ss = parser["supersingular"]
        where = "supersingular"
        supersingular = SupersingularConfig(
            p=_parse_int(_require(ss, "p", where), f"{where}.p"),
            a=_parse_int(_require(ss, "a", where), f"{where}.a"),
            b=_parse_int(_require(ss, "b", where), f"{where}.b"),
            k_max=_parse_int(ss.get("k_max", "4"), f"{where}.k_max"),
        )

    return ExperimentConfig(
        data=data,
        polynomials=tuple(sorted(polynomials.items())),
        test_functions=tuple(test_functions),
        m_list=m_list,
        grid=grid,
        k_max=k_max,
        jobs=jobs,
        out=out,
        good_reduction=good_reduction,
        supersingular=supersingular,
    )


def _parse_curve_poly_checked(text: str, where: str) -> CurvePoly:
    try:
        return parse_curve_poly(text)
    except ValueError as exc:
        raise ConfigError("bad-syntax", f"{where}: {exc}") from exc


def format_config(cfg: ExperimentConfig) -> str:
    """Canonical printer; ``parse_config(format_config(cfg))`` returns an equal config."""
    lines = ["[run]"]
    lines.append("m_list = " + ",".join(str(m) for m in cfg.m_list))
    lines.append(f"grid = {cfg.grid}")
    lines.append(f"k_max = {cfg.k_max}")
    lines.append(f"jobs = {cfg.jobs}")
    lines.append(f"out = {cfg.out}")
    lines.append("")
    lines.append("[uniformization]")
    lines.append(f"r = {cfg.data.r}")
    lines.append(f"s = {cfg.data.s}")
    lines.append(f"N0 = {cfg.data.angular_order}")
    lines.append("alpha = " + _format_matrix(cfg.data.alpha))
    lines.append("gamma = " + _format_matrix(cfg.data.gamma))
    if cfg.polynomials:
        lines.append("")
        lines.append("[polynomials]")
        for name, poly in cfg.polynomials:
            lines.append(f"{name} = {format_laurent_poly(poly)}")
    if cfg.test_functions:
        lines.append("")
        lines.append("[test_functions]")
        for name, fn in cfg.test_functions:
            lines.append(f"{name} = {_format_test_function(fn, cfg)}")
    if cfg.good_reduction is not None:
        gr = cfg.good_reduction
        lines.append("")
        lines.append("[good_reduction]")
        lines.append(f"p = {gr.p}")
        lines.append(f"k = {gr.k}")
        lines.append(f"a = {gr.a}")
        lines.append(f"b = {gr.b}")
        lines.append("m_list = " + ",".join(str(m) for m in gr.m_list))
        lines.append("subvarieties = " + ", ".join(_format_subvariety(z)
                                                   for z in gr.subvarieties))
        lines.append(f"h = {format_curve_poly(gr.h)}")
    if cfg.supersingular is not None:
        ss = cfg.supersingular
        lines.append("")
        lines.append("[supersingular]")
        lines.append(f"p = {ss.p}")
        lines.append(f"a = {ss.a}")
        lines.append(f"b = {ss.b}")
        lines.append(f"k_max = {ss.k_max}")
    return "\n".join(lines) + "\n"


def _format_matrix(rows) -> str:
    return "[" + ",".join("[" + ",".join(str(v) for v in row) + "]" for row in rows) + "]"


def _format_subvariety(z: SubvarietySpec) -> str:
    if z.kind == "diagonal":
        return "diagonal"
    if z.kind == "graph":
        return f"graph {z.n}"
    return f"{z.kind} {z.point[0]} {z.point[1]}"


def _format_test_function(fn: TestFunction, cfg: ExperimentConfig) -> str:
    if isinstance(fn, Character):
        return "character " + fn.part + " " + " ".join(str(z) for z in fn.coords)
    if isinstance(fn, PiecewiseLinearBeta):
        return "pwl " + " ; ".join(
            " ".join(f"({p},{v})" for p, v in profile) for profile in fn.profiles)
    if isinstance(fn, SeminormPullback):
        for name, poly in cfg.polynomials:
            if poly == fn.poly:
                return f"seminorm {name}"
        raise ValueError("seminorm pullback references a polynomial missing from the config")
    raise TypeError(f"unsupported test function {fn!r}")
