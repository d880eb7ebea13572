"""Text format, parser, and compiler for pulse-sequence programs.

Grammar, one statement per line, units fixed (degrees, seconds, Hz):

    # comment                      full-line or trailing
    nu 400e6                       header: nu delta_nu j temp t1 t2 f_active
    pulse ANGLE PHASE              hard pulse on both spins
    selective I|S                  composite selective 90 on one spin
    delay T                        free evolution, J coupling active
    gradient_period                1/delta_nu evolution + gradient crush
    zqdephase                      zero-quantum dephasing (slow addition)
    relax T                        T1/T2 relaxation for T seconds
    acquire N DWELL                record N points every DWELL seconds

Headers override the params object handed to compile. No loops, no
variables, no phase cycling: the sequences this encodes are short and
linear, and anything fancier belongs in Python.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .channels import (
    ChannelError,
    ChannelProgram,
    free_evolution,
    gradient_period,
    hard_pulse,
    relax as relax_channel,
    selective_pulse,
    zq_dephase,
)
from .states import SpinSystemParams

HEADER_KEYS = ("nu", "delta_nu", "j", "temp", "t1", "t2", "f_active")

_HEADER_TO_PARAM = {
    "nu": "nu_hz", "delta_nu": "delta_nu_hz", "j": "j_hz", "temp": "temp_k",
    "t1": "t1_s", "t2": "t2_s", "f_active": "f_active",
}

_TOKEN_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class SourcePos:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


_NOWHERE = SourcePos(0, 0)


@dataclass(frozen=True)
class ParseError:
    pos: SourcePos
    message: str

    def __str__(self):
        return f"{self.pos}: {self.message}"


class SequenceSyntaxError(ValueError):
    """All problems found in one parse, each with a line:column position."""

    def __init__(self, errors):
        self.errors = tuple(errors)
        super().__init__("\n".join(str(e) for e in self.errors))


class CompileError(ValueError):
    pass


@dataclass(frozen=True)
class Statement:
    op: str
    args: tuple = ()
    pos: SourcePos = field(compare=False, default=_NOWHERE)


@dataclass(frozen=True)
class SequenceAst:
    """headers is a tuple of (key, value) pairs in canonical key order;
    positions are parse provenance and never take part in equality."""

    headers: tuple = ()
    statements: tuple = ()
    header_pos: tuple = field(compare=False, default=())

    def header_dict(self) -> dict:
        return dict(self.headers)


# statement name -> (argument kinds, channel count note)
# kinds: f = finite float, t = finite float >= 0, n = int >= 1, d = float > 0,
# T = spin target token
_STMT_ARGS = {
    "pulse": "ff",
    "selective": "T",
    "delay": "t",
    "gradient_period": "",
    "zqdephase": "",
    "relax": "t",
    "acquire": "nd",
}


def _parse_value(kind: str, token: str):
    """Returns (value, error message or None)."""
    if kind == "T":
        if token in ("I", "S"):
            return token, None
        return None, f"spin target must be I or S, got {token!r}"
    if kind == "n":
        try:
            v = int(token)
        except ValueError:
            return None, f"expected an integer, got {token!r}"
        if v < 1:
            return None, f"expected a positive count, got {v}"
        return v, None
    try:
        v = float(token)
    except ValueError:
        return None, f"expected a number, got {token!r}"
    if not math.isfinite(v):
        return None, f"value must be finite, got {token!r}"
    if kind == "t" and v < 0:
        return None, f"duration must be non-negative, got {token!r}"
    if kind == "d" and v <= 0:
        return None, f"expected a positive value, got {token!r}"
    return v, None


def parse(text: str) -> SequenceAst:
    """Parse sequence text; collects every error before raising."""
    errors = []
    headers = {}
    header_pos = {}
    statements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN_RE.finditer(line)]
        if not tokens:
            continue
        (word, col), rest = tokens[0], tokens[1:]
        pos = SourcePos(lineno, col)

        if word in HEADER_KEYS:
            if word in headers:
                errors.append(ParseError(pos, f"duplicate header {word!r}"))
                continue
            if len(rest) != 1:
                errors.append(ParseError(
                    pos, f"header {word} takes exactly one value, got {len(rest)}"))
                continue
            val, err = _parse_value("d", rest[0][0])
            if err:
                errors.append(ParseError(SourcePos(lineno, rest[0][1]), err))
                continue
            headers[word] = val
            header_pos[word] = pos
            continue

        spec = _STMT_ARGS.get(word)
        if spec is None:
            errors.append(ParseError(pos, f"unknown statement {word!r}"))
            continue
        if len(rest) != len(spec):
            errors.append(ParseError(
                pos, f"{word} takes {len(spec)} argument(s), got {len(rest)}"))
            continue
        args = []
        bad = False
        for kind, (token, tcol) in zip(spec, rest):
            val, err = _parse_value(kind, token)
            if err:
                errors.append(ParseError(SourcePos(lineno, tcol), err))
                bad = True
                break
            args.append(val)
        if bad:
            continue
        if word == "acquire" and any(s.op == "acquire" for s in statements):
            errors.append(ParseError(pos, "duplicate acquire statement"))
            continue
        statements.append(Statement(op=word, args=tuple(args), pos=pos))

    if errors:
        raise SequenceSyntaxError(errors)
    canon_headers = tuple((k, headers[k]) for k in HEADER_KEYS if k in headers)
    canon_pos = tuple((k, header_pos[k]) for k in HEADER_KEYS if k in headers)
    return SequenceAst(headers=canon_headers, statements=tuple(statements),
                       header_pos=canon_pos)


def _fmt(value) -> str:
    # repr of a Python float is the shortest round-trip decimal
    return repr(value) if isinstance(value, float) else str(value)


def format(ast: SequenceAst) -> str:
    """Canonical text: headers in fixed order, one statement per line.
    parse(format(ast)) == ast, and formatting is idempotent."""
    lines = [f"{k} {_fmt(v)}" for k, v in ast.headers]
    for stmt in ast.statements:
        parts = [stmt.op] + [_fmt(a) for a in stmt.args]
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class AcquisitionSpec:
    n_points: int
    dwell_s: float


def compile(ast: SequenceAst, params: SpinSystemParams | None = None):
    """Lower an AST to (ChannelProgram, AcquisitionSpec | None).

    Header values override fields of params. Without a params object the
    statements that need delta_nu (selective, gradient_period) insist on a
    delta_nu header; everything else falls back to the demo defaults.
    """
    headers = ast.header_dict()
    needs_dnu = any(s.op in ("selective", "gradient_period") for s in ast.statements)
    if params is None and needs_dnu and "delta_nu" not in headers:
        raise CompileError(
            "sequence uses selective/gradient_period but sets no delta_nu "
            "header and no params were given")
    base = params if params is not None else SpinSystemParams()
    overrides = {_HEADER_TO_PARAM[k]: v for k, v in headers.items()}
    try:
        eff = SpinSystemParams(**{
            **{f: getattr(base, f) for f in _HEADER_TO_PARAM.values()},
            **overrides,
        })
    except ValueError as exc:
        raise CompileError(f"bad header value: {exc}") from exc

    channels = []
    statements = []
    acq = None
    for stmt in ast.statements:
        if acq is not None:
            raise CompileError(
                f"{stmt.pos}: statement after acquire; acquire must be last")
        if stmt.op == "acquire":
            n, dwell = stmt.args
            if n < 1:
                raise CompileError(f"{stmt.pos}: acquire needs at least one point")
            acq = AcquisitionSpec(n_points=n, dwell_s=dwell)
            continue
        try:
            _lower_statement(stmt, eff, channels, statements)
        except ChannelError as exc:
            raise CompileError(f"{stmt.pos}: {exc}") from exc
    program = ChannelProgram(channels=tuple(channels), params=eff,
                             statements=tuple(statements))
    return program, acq


def _lower_statement(stmt: Statement, eff: SpinSystemParams,
                     channels: list, statements: list) -> None:
    if stmt.op == "pulse":
        a, p = stmt.args
        channels.append(hard_pulse(a, p))
        statements.append(("pulse", float(a), float(p)))
    elif stmt.op == "selective":
        sub = selective_pulse(stmt.args[0], eff)
        channels.extend(sub.channels)
        statements.append(("selective", stmt.args[0]))
    elif stmt.op == "delay":
        channels.append(free_evolution(stmt.args[0], eff))
        statements.append(("delay", float(stmt.args[0])))
    elif stmt.op == "gradient_period":
        channels.extend(gradient_period(eff))
        statements.append(("gradient_period",))
    elif stmt.op == "zqdephase":
        channels.append(zq_dephase())
        statements.append(("zqdephase",))
    elif stmt.op == "relax":
        channels.append(relax_channel(stmt.args[0], eff))
        statements.append(("relax", float(stmt.args[0])))
    else:  # pragma: no cover - parser only emits known ops
        raise CompileError(f"{stmt.pos}: unknown op {stmt.op!r}")


def program_to_text(program: ChannelProgram, acq: AcquisitionSpec | None = None) -> str:
    """Serialize a compiled program back to sequence text.

    Only programs that carry source statements (anything built by compile,
    selective_pulse, or filtration_sequence) serialize; emits the full
    header block so the reparse reproduces the same params snapshot.
    """
    if program.statements is None:
        raise ValueError("program carries no source statements; cannot serialize")
    p = program.params
    lines = [f"{k} {_fmt(getattr(p, _HEADER_TO_PARAM[k]))}" for k in HEADER_KEYS]
    for stmt in program.statements:
        lines.append(" ".join([stmt[0]] + [_fmt(a) for a in stmt[1:]]))
    if acq is not None:
        lines.append(f"acquire {acq.n_points} {_fmt(acq.dwell_s)}")
    return "\n".join(lines) + "\n"
