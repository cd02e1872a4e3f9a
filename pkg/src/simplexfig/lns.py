"""The LNS scene-description language: tokenizer, parser, evaluator, writer.

LNS is a small declarative script format for simplex figures.  A script is a
sequence of builtin calls, `var` declarations, and single-call try/catch
wrappers:

    try { setViewPort(15, 80); } catch (ex) { }
    var size = 200, color = "#000";
    addTriangle(color, 2, [1], size);
    addPoint("#E01B1B", 6, "Circle", size, [2, 1, 1]);

The try/catch idiom carries cross-renderer compatibility: a wrapped call
whose builtin is missing or rejects its arguments becomes a no-op instead of
an error, so one script can drive libraries with different capabilities.
Outside try/catch those failures abort evaluation.  Unresolvable variable or
index references always abort; they indicate a broken script, not a missing
capability.
"""

from dataclasses import dataclass
from typing import Callable, Sequence

from .geometry import CoefficientVector, TimeAxis, prism_offset, simplex_frame
from .scene import (
    DEFAULT_SLICE_OPACITY,
    Marker,
    MarkerRole,
    PerpendicularFan,
    Scene,
    SceneItem,
    SideLabels,
    SliceTriangle,
    Style,
    Trajectory,
    TrajectoryKind,
    ViewSettings,
    WireSimplex,
    is_color,
)

KEYWORDS = frozenset({"var", "try", "catch"})
PUNCT = frozenset("()[]{},;=")


class LnsError(Exception):
    """Base error; carries the 1-based source position when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"line {self.line}, col {self.col}: {self.message}"


class TokenizeError(LnsError):
    pass


class ParseError(LnsError):
    pass


class EvalError(LnsError):
    pass


class UnknownBuiltinError(EvalError):
    pass


class BuiltinCallError(EvalError):
    """Arity, argument-type, or semantic failure inside a builtin call."""


class UnboundVariableError(EvalError):
    pass


class ArrayIndexError(EvalError):
    pass


# ---------------------------------------------------------------------------
# Tokens


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "number" | "string" | "punct" | "keyword"
    lexeme: str
    line: int
    col: int


def _is_ident_first(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident_rest(c: str) -> bool:
    return c.isalnum() or c == "_"


def tokenize(source: str) -> list[Token]:
    """Split LNS source into tokens, skipping whitespace and // comments."""
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)

    def advance(count: int = 1):
        nonlocal i, line, col
        for _ in range(count):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c.isspace():
            advance()
            continue
        if c == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                advance()
            continue

        start_line, start_col = line, col
        if c == '"':
            advance()
            begin = i
            while i < n and source[i] not in ('"', "\n"):
                advance()
            if i >= n or source[i] == "\n":
                raise TokenizeError("unterminated string", start_line, start_col)
            text = source[begin:i]
            advance()  # closing quote
            tokens.append(Token("string", text, start_line, start_col))
            continue
        if c.isdigit() or (c in "+-" and i + 1 < n and source[i + 1].isdigit()):
            begin = i
            if c in "+-":
                advance()
            while i < n and source[i].isdigit():
                advance()
            if i < n and source[i] == "." and i + 1 < n and source[i + 1].isdigit():
                advance()
                while i < n and source[i].isdigit():
                    advance()
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    advance(j - i)
                    while i < n and source[i].isdigit():
                        advance()
            tokens.append(Token("number", source[begin:i], start_line, start_col))
            continue
        if _is_ident_first(c):
            begin = i
            while i < n and _is_ident_rest(source[i]):
                advance()
            word = source[begin:i]
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, start_line, start_col))
            continue
        if c in PUNCT:
            advance()
            tokens.append(Token("punct", c, start_line, start_col))
            continue
        raise TokenizeError(f"illegal character {c!r}", start_line, start_col)
    return tokens


# ---------------------------------------------------------------------------
# Syntax tree


@dataclass(frozen=True)
class NumberVal:
    value: float


@dataclass(frozen=True)
class TextVal:
    text: str

    @property
    def is_color(self) -> bool:
        return is_color(self.text)


@dataclass(frozen=True)
class ArrayVal:
    items: tuple["Value", ...]


@dataclass(frozen=True)
class VarRef:
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class IndexedRef:
    name: str
    index: int
    line: int
    col: int


Value = NumberVal | TextVal | ArrayVal | VarRef | IndexedRef


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Value, ...]
    line: int
    col: int


@dataclass(frozen=True)
class VarDecl:
    bindings: tuple[tuple[str, Value], ...]
    line: int
    col: int


@dataclass(frozen=True)
class TryCatch:
    inner: Call
    line: int
    col: int


Statement = Call | VarDecl | TryCatch


@dataclass(frozen=True)
class Script:
    statements: tuple[Statement, ...]


class _Parser:
    def __init__(self, tokens: Sequence[Token]):
        self._tokens = list(tokens)
        self._pos = 0

    def _peek(self) -> Token | None:
        return self._tokens[self._pos] if self._pos < len(self._tokens) else None

    def _eof_pos(self) -> tuple[int, int]:
        if self._tokens:
            last = self._tokens[-1]
            return last.line, last.col + len(last.lexeme)
        return 1, 1

    def _next(self, expected: str) -> Token:
        tok = self._peek()
        if tok is None:
            line, col = self._eof_pos()
            raise ParseError(f"expected {expected}, found end of input", line, col)
        self._pos += 1
        return tok

    def _expect_punct(self, ch: str) -> Token:
        tok = self._next(f"'{ch}'")
        if tok.kind != "punct" or tok.lexeme != ch:
            raise ParseError(f"expected '{ch}', found {tok.lexeme!r}", tok.line, tok.col)
        return tok

    def _expect_ident(self, what: str) -> Token:
        tok = self._next(what)
        if tok.kind != "ident":
            raise ParseError(f"expected {what}, found {tok.lexeme!r}", tok.line, tok.col)
        return tok

    def _expect_keyword(self, word: str) -> Token:
        tok = self._next(f"'{word}'")
        if tok.kind != "keyword" or tok.lexeme != word:
            raise ParseError(f"expected '{word}', found {tok.lexeme!r}", tok.line, tok.col)
        return tok

    def _at_punct(self, ch: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.kind == "punct" and tok.lexeme == ch

    def parse(self) -> Script:
        statements: list[Statement] = []
        while self._peek() is not None:
            statements.append(self._statement())
        return Script(tuple(statements))

    def _statement(self) -> Statement:
        tok = self._peek()
        assert tok is not None
        if tok.kind == "keyword" and tok.lexeme == "var":
            return self._var_decl()
        if tok.kind == "keyword" and tok.lexeme == "try":
            return self._try_catch()
        if tok.kind == "ident":
            call = self._call()
            self._expect_punct(";")
            return call
        raise ParseError(
            f"expected a statement, found {tok.lexeme!r}", tok.line, tok.col
        )

    def _var_decl(self) -> VarDecl:
        head = self._expect_keyword("var")
        bindings: list[tuple[str, Value]] = []
        while True:
            name = self._expect_ident("a variable name")
            self._expect_punct("=")
            bindings.append((name.lexeme, self._arg()))
            tok = self._next("',' or ';'")
            if tok.kind == "punct" and tok.lexeme == ",":
                continue
            if tok.kind == "punct" and tok.lexeme == ";":
                break
            raise ParseError(
                f"expected ',' or ';', found {tok.lexeme!r}", tok.line, tok.col
            )
        return VarDecl(tuple(bindings), head.line, head.col)

    def _try_catch(self) -> TryCatch:
        head = self._expect_keyword("try")
        self._expect_punct("{")
        inner = self._call()
        self._expect_punct(";")
        self._expect_punct("}")
        self._expect_keyword("catch")
        self._expect_punct("(")
        self._expect_ident("the catch variable")
        self._expect_punct(")")
        self._expect_punct("{")
        self._expect_punct("}")
        return TryCatch(inner, head.line, head.col)

    def _call(self) -> Call:
        name = self._expect_ident("a builtin name")
        self._expect_punct("(")
        args: list[Value] = []
        if not self._at_punct(")"):
            args.append(self._arg())
            while self._at_punct(","):
                self._expect_punct(",")
                args.append(self._arg())
        self._expect_punct(")")
        return Call(name.lexeme, tuple(args), name.line, name.col)

    def _arg(self) -> Value:
        tok = self._next("an argument")
        if tok.kind == "number":
            return NumberVal(float(tok.lexeme))
        if tok.kind == "string":
            return TextVal(tok.lexeme)
        if tok.kind == "punct" and tok.lexeme == "[":
            items: list[Value] = []
            if not self._at_punct("]"):
                items.append(self._arg())
                while self._at_punct(","):
                    self._expect_punct(",")
                    items.append(self._arg())
            self._expect_punct("]")
            return ArrayVal(tuple(items))
        if tok.kind == "ident":
            if self._at_punct("["):
                self._expect_punct("[")
                index = self._next("an array index")
                if index.kind != "number" or not float(index.lexeme).is_integer() or float(index.lexeme) < 0:
                    raise ParseError(
                        "array index must be a non-negative integer",
                        index.line,
                        index.col,
                    )
                self._expect_punct("]")
                return IndexedRef(tok.lexeme, int(float(index.lexeme)), tok.line, tok.col)
            return VarRef(tok.lexeme, tok.line, tok.col)
        raise ParseError(f"expected an argument, found {tok.lexeme!r}", tok.line, tok.col)


def parse(tokens: Sequence[Token]) -> Script:
    """Parse a token stream into a Script."""
    return _Parser(tokens).parse()


def parse_source(source: str) -> Script:
    return parse(tokenize(source))


# ---------------------------------------------------------------------------
# Evaluation


class _EvalState:
    def __init__(self):
        self.env: dict[str, Value] = {}
        self.view_preset = ViewSettings.view_preset
        self.transform_mode = ViewSettings.transform_mode
        self.azimuth_deg = ViewSettings.azimuth_deg
        self.elevation_deg = ViewSettings.elevation_deg
        self.frame = None
        self.axis: TimeAxis | None = None
        self.items: list[SceneItem] = []
        self.show_digits = False

    def finalize(self) -> Scene:
        if self.frame is None:
            raise EvalError("script does not declare a simplex (no sized primitive)")
        return Scene(
            frame=self.frame,
            items=tuple(self.items),
            prism_axis=self.axis,
            view=ViewSettings(
                view_preset=self.view_preset,
                transform_mode=self.transform_mode,
                azimuth_deg=self.azimuth_deg,
                elevation_deg=self.elevation_deg,
            ),
            show_digits=self.show_digits,
        )


Builtin = Callable[[_EvalState, Call, list[Value]], None]
BuiltinRegistry = dict[str, Builtin]


def _resolve(value: Value, env: dict[str, Value]) -> Value:
    if isinstance(value, (NumberVal, TextVal)):
        return value
    if isinstance(value, ArrayVal):
        return ArrayVal(tuple(_resolve(item, env) for item in value.items))
    if isinstance(value, VarRef):
        if value.name not in env:
            raise UnboundVariableError(
                f"unbound variable '{value.name}'", value.line, value.col
            )
        return env[value.name]
    if isinstance(value, IndexedRef):
        if value.name not in env:
            raise UnboundVariableError(
                f"unbound variable '{value.name}'", value.line, value.col
            )
        target = env[value.name]
        if not isinstance(target, ArrayVal):
            raise ArrayIndexError(
                f"'{value.name}' is not an array", value.line, value.col
            )
        if value.index >= len(target.items):
            raise ArrayIndexError(
                f"index {value.index} out of range for '{value.name}' "
                f"(length {len(target.items)})",
                value.line,
                value.col,
            )
        return target.items[value.index]
    raise AssertionError(f"unexpected value {value!r}")


def _run_call(call: Call, state: _EvalState, registry: BuiltinRegistry) -> None:
    builtin = registry.get(call.name)
    if builtin is None:
        raise UnknownBuiltinError(f"unknown builtin '{call.name}'", call.line, call.col)
    args = [_resolve(a, state.env) for a in call.args]
    builtin(state, call, args)


def evaluate(script: Script, registry: BuiltinRegistry | None = None) -> Scene:
    """Run a script into a Scene.

    Statements execute in order against a single flat variable environment.
    A try/catch-wrapped call that hits an unknown builtin or a builtin-call
    failure becomes a no-op; the same failures outside try/catch abort.
    """
    if registry is None:
        registry = standard_registry()
    state = _EvalState()
    for stmt in script.statements:
        if isinstance(stmt, VarDecl):
            for name, value in stmt.bindings:
                state.env[name] = _resolve(value, state.env)
        elif isinstance(stmt, Call):
            _run_call(stmt, state, registry)
        elif isinstance(stmt, TryCatch):
            try:
                _run_call(stmt.inner, state, registry)
            except (UnknownBuiltinError, BuiltinCallError):
                pass
    return state.finalize()


def evaluate_source(source: str, registry: BuiltinRegistry | None = None) -> Scene:
    return evaluate(parse_source(source), registry)


# ---------------------------------------------------------------------------
# Builtin argument helpers


def _need(call: Call, args: list[Value], minimum: int, maximum: int | None = None):
    maximum = minimum if maximum is None else maximum
    if not minimum <= len(args) <= maximum:
        expected = str(minimum) if minimum == maximum else f"{minimum}..{maximum}"
        raise BuiltinCallError(
            f"{call.name} expects {expected} arguments, got {len(args)}",
            call.line,
            call.col,
        )


def _type_error(call: Call, position: int, what: str, got: Value) -> BuiltinCallError:
    kind = {
        NumberVal: "number",
        TextVal: "string",
        ArrayVal: "array",
    }.get(type(got), "value")
    return BuiltinCallError(
        f"{call.name} argument {position + 1} must be {what}, got a {kind}",
        call.line,
        call.col,
    )


def _num(call: Call, args: list[Value], position: int) -> float:
    v = args[position]
    if not isinstance(v, NumberVal):
        raise _type_error(call, position, "a number", v)
    return v.value


def _int(call: Call, args: list[Value], position: int) -> int:
    v = _num(call, args, position)
    if not float(v).is_integer():
        raise _type_error(call, position, "an integer", args[position])
    return int(v)


def _text(call: Call, args: list[Value], position: int) -> str:
    v = args[position]
    if not isinstance(v, TextVal):
        raise _type_error(call, position, "a string", v)
    return v.text


def _color_text(call: Call, args: list[Value], position: int) -> str:
    v = args[position]
    if not isinstance(v, TextVal) or not v.is_color:
        raise _type_error(call, position, 'a color like "#RGB" or "#RRGGBB"', v)
    return v.text


def _num_list(call: Call, args: list[Value], position: int) -> tuple[float, ...]:
    v = args[position]
    if not isinstance(v, ArrayVal) or not all(
        isinstance(item, NumberVal) for item in v.items
    ):
        raise _type_error(call, position, "an array of numbers", v)
    return tuple(item.value for item in v.items)  # type: ignore[union-attr]


def _color_list(call: Call, args: list[Value], position: int) -> tuple[str, ...]:
    v = args[position]
    if not isinstance(v, ArrayVal) or not all(
        isinstance(item, TextVal) and item.is_color for item in v.items
    ):
        raise _type_error(call, position, "an array of colors", v)
    return tuple(item.text for item in v.items)  # type: ignore[union-attr]


def _matrix(call: Call, args: list[Value], position: int) -> tuple[tuple[float, ...], ...]:
    v = args[position]
    if not isinstance(v, ArrayVal):
        raise _type_error(call, position, "an array of coefficient arrays", v)
    rows = []
    for item in v.items:
        if not isinstance(item, ArrayVal) or not all(
            isinstance(x, NumberVal) for x in item.items
        ):
            raise _type_error(call, position, "an array of coefficient arrays", v)
        rows.append(tuple(x.value for x in item.items))  # type: ignore[union-attr]
    return tuple(rows)


def _style(call: Call, args: list[Value]) -> Style:
    color = _color_text(call, args, 0)
    width = _num(call, args, 1)
    dash = _num_list(call, args, 2)
    try:
        return Style(color=color, stroke_width=width, dash_pattern=dash)
    except ValueError as exc:
        raise BuiltinCallError(str(exc), call.line, call.col) from exc


def _semantic(call: Call, exc: Exception) -> BuiltinCallError:
    return BuiltinCallError(str(exc), call.line, call.col)


def _resolved_frame(state: _EvalState, call: Call, n: int, edge: float):
    """The frame this call implies; never mutates state (atomicity)."""
    if state.frame is not None:
        if state.frame.n != n or state.frame.edge != edge:
            raise BuiltinCallError(
                f"scene is a {state.frame.n}-simplex with edge {state.frame.edge}; "
                f"{call.name} asked for a {n}-simplex with edge {edge}",
                call.line,
                call.col,
            )
        return state.frame
    try:
        return simplex_frame(n, edge)
    except ValueError as exc:
        raise _semantic(call, exc) from exc


def _coefficients(call: Call, values: Sequence[float]) -> CoefficientVector:
    if len(values) not in (3, 4):
        raise BuiltinCallError(
            f"{call.name} needs 3 or 4 coefficients, got {len(values)}",
            call.line,
            call.col,
        )
    try:
        return CoefficientVector(tuple(values))
    except ValueError as exc:
        raise _semantic(call, exc) from exc


def _checked_offset(state: _EvalState, call: Call, t: float) -> float:
    if state.axis is None:
        raise BuiltinCallError(
            f"{call.name}: timestamps need a time axis (call setTimeAxis first)",
            call.line,
            call.col,
        )
    try:
        return prism_offset(t, state.axis)
    except ValueError as exc:
        raise _semantic(call, exc) from exc


# ---------------------------------------------------------------------------
# Builtins


def _set_view(state: _EvalState, call: Call, args: list[Value]) -> None:
    _need(call, args, 1)
    state.view_preset = _int(call, args, 0)


def _set_transform(state: _EvalState, call: Call, args: list[Value]) -> None:
    _need(call, args, 1)
    code = _int(call, args, 0)
    if code not in (0, 1, 2):
        raise BuiltinCallError(
            f"setTransform code must be 0, 1, or 2, got {code}", call.line, call.col
        )
    # 2 is accepted as a legacy alias for perspective.
    state.transform_mode = 0 if code == 0 else 1


def _set_viewport(state: _EvalState, call: Call, args: list[Value]) -> None:
    _need(call, args, 2)
    state.azimuth_deg = _num(call, args, 0)
    state.elevation_deg = _num(call, args, 1)


def _set_time_axis(state: _EvalState, call: Call, args: list[Value]) -> None:
    _need(call, args, 3)
    t_min = _num(call, args, 0)
    t_max = _num(call, args, 1)
    length = _num(call, args, 2)
    if state.axis is not None:
        raise BuiltinCallError("the time axis is already declared", call.line, call.col)
    if state.frame is not None and state.frame.n != 2:
        raise BuiltinCallError(
            "a time axis requires a 2-simplex scene", call.line, call.col
        )
    try:
        axis = TimeAxis(t_min, t_max, length)
    except ValueError as exc:
        raise _semantic(call, exc) from exc
    state.axis = axis


def _add_wireframe(state: _EvalState, call: Call, args: list[Value], n: int, prism: bool) -> None:
    _need(call, args, 4)
    style = _style(call, args)
    edge = _num(call, args, 3)
    if prism and state.axis is None:
        raise BuiltinCallError(
            "addPrism needs a time axis (call setTimeAxis first)", call.line, call.col
        )
    if n == 3 and state.axis is not None:
        raise BuiltinCallError(
            "a 3-simplex scene cannot carry a time axis", call.line, call.col
        )
    frame = _resolved_frame(state, call, n, edge)
    state.frame = frame
    state.items.append(WireSimplex(style=style, prism=prism))


def _add_triangle(state: _EvalState, call: Call, args: list[Value]) -> None:
    _add_wireframe(state, call, args, n=2, prism=False)


def _add_tetraedron(state: _EvalState, call: Call, args: list[Value]) -> None:
    _add_wireframe(state, call, args, n=3, prism=False)


def _add_prism(state: _EvalState, call: Call, args: list[Value]) -> None:
    _add_wireframe(state, call, args, n=2, prism=True)


def _add_slice(state: _EvalState, call: Call, args: list[Value]) -> None:
    _need(call, args, 5, 6)
    style = _style(call, args)
    edge = _num(call, args, 3)
    t = _num(call, args, 4)
    opacity = _num(call, args, 5) if len(args) == 6 else DEFAULT_SLICE_OPACITY
    offset = _checked_offset(state, call, t)
    frame = _resolved_frame(state, call, 2, edge)
    try:
        item = SliceTriangle(timestamp=t, offset=offset, style=style, opacity=opacity)
    except ValueError as exc:
        raise _semantic(call, exc) from exc
    state.frame = frame
    state.items.append(item)


def _add_ijk(state: _EvalState, call: Call, args: list[Value]) -> None:
    _need(call, args, 6, 7)
    style = _style(call, args)
    edge = _num(call, args, 3)
    coeffs = _coefficients(call, _num_list(call, args, 4))
    side_colors = _color_list(call, args, 5)
    if len(side_colors) != coeffs.arity:
        raise BuiltinCallError(
            f"addIJK needs one side color per coefficient "
            f"({coeffs.arity}), got {len(side_colors)}",
            call.line,
            call.col,
        )
    t = _num(call, args, 6) if len(args) == 7 else None
    if t is not None:
        _checked_offset(state, call, t)
    frame = _resolved_frame(state, call, coeffs.arity - 1, edge)
    state.frame = frame
    state.items.append(
        PerpendicularFan(
            coefficients=coeffs, per_side_colors=side_colors, style=style, timestamp=t
        )
    )


def _add_point_role(state: _EvalState, call: Call, args: list[Value], role: MarkerRole) -> None:
    _need(call, args, 5, 6)
    color = _color_text(call, args, 0)
    radius = _num(call, args, 1)
    shape = _text(call, args, 2)
    edge = _num(call, args, 3)
    coeffs = _coefficients(call, _num_list(call, args, 4))
    t = _num(call, args, 5) if len(args) == 6 else None
    if t is not None:
        _checked_offset(state, call, t)
    frame = _resolved_frame(state, call, coeffs.arity - 1, edge)
    try:
        marker = Marker(
            coefficients=coeffs,
            radius=radius,
            style=Style(color=color),
            shape=shape,
            role=role,
            timestamp=t,
        )
    except ValueError as exc:
        raise _semantic(call, exc) from exc
    state.frame = frame
    state.items.append(marker)


def _add_point(state: _EvalState, call: Call, args: list[Value]) -> None:
    _add_point_role(state, call, args, MarkerRole.OBJECT_UNDER_STUDY)


def _add_sample_point(state: _EvalState, call: Call, args: list[Value]) -> None:
    _add_point_role(state, call, args, MarkerRole.LEARNING_SAMPLE)


_KINDS = {kind.value: kind for kind in TrajectoryKind}


def _add_path(state: _EvalState, call: Call, args: list[Value]) -> None:
    _need(call, args, 5, 7)
    style = _style(call, args)
    edge = _num(call, args, 3)
    rows = _matrix(call, args, 4)
    if not rows:
        raise BuiltinCallError("addPath needs at least one waypoint", call.line, call.col)
    arity = len(rows[0])
    if any(len(row) != arity for row in rows):
        raise BuiltinCallError(
            "addPath waypoints must all have the same arity", call.line, call.col
        )
    timestamps: tuple[float, ...] | None = None
    kind = TrajectoryKind.OBSERVED
    for position in range(5, len(args)):
        v = args[position]
        if isinstance(v, ArrayVal) and timestamps is None and kind is TrajectoryKind.OBSERVED:
            timestamps = _num_list(call, args, position)
        elif isinstance(v, TextVal):
            if v.text not in _KINDS:
                raise BuiltinCallError(
                    f"unknown path kind {v.text!r}; expected one of "
                    f"{sorted(_KINDS)}",
                    call.line,
                    call.col,
                )
            kind = _KINDS[v.text]
        else:
            raise _type_error(call, position, "a timestamp array or a kind string", v)
    if timestamps is not None:
        if len(timestamps) != len(rows):
            raise BuiltinCallError(
                f"addPath got {len(rows)} waypoints but {len(timestamps)} timestamps",
                call.line,
                call.col,
            )
        for t in timestamps:
            _checked_offset(state, call, t)
        if any(b < a for a, b in zip(timestamps, timestamps[1:])):
            raise BuiltinCallError(
                "addPath timestamps must be non-decreasing", call.line, call.col
            )
    coeffs = [_coefficients(call, row) for row in rows]
    frame = _resolved_frame(state, call, arity - 1, edge)
    waypoints = tuple(
        (cv, timestamps[i] if timestamps is not None else None)
        for i, cv in enumerate(coeffs)
    )
    try:
        trajectory = Trajectory(waypoints=waypoints, style=style, kind=kind)
    except ValueError as exc:
        raise _semantic(call, exc) from exc
    state.frame = frame
    state.items.append(trajectory)


def _set_side_labels(state: _EvalState, call: Call, args: list[Value]) -> None:
    _need(call, args, 3, 4)
    texts = tuple(_text(call, args, i) for i in range(len(args)))
    if state.frame is not None and len(texts) != state.frame.n + 1:
        raise BuiltinCallError(
            f"setSideLabels needs {state.frame.n + 1} labels for this scene, "
            f"got {len(texts)}",
            call.line,
            call.col,
        )
    state.items.append(SideLabels(texts=texts))


def _show_digits(state: _EvalState, call: Call, args: list[Value]) -> None:
    _need(call, args, 1)
    flag = _int(call, args, 0)
    if flag not in (0, 1):
        raise BuiltinCallError(
            f"showDigits expects 0 or 1, got {flag}", call.line, call.col
        )
    state.show_digits = bool(flag)


def standard_registry() -> BuiltinRegistry:
    """A fresh copy of the full builtin registry."""
    return {
        "setView": _set_view,
        "setTransform": _set_transform,
        "setViewPort": _set_viewport,
        "setTimeAxis": _set_time_axis,
        "addTriangle": _add_triangle,
        "addTetraedron": _add_tetraedron,
        "addPrism": _add_prism,
        "addSlice": _add_slice,
        "addIJK": _add_ijk,
        "addPoint": _add_point,
        "addSamplePoint": _add_sample_point,
        "addPath": _add_path,
        "setSideLabels": _set_side_labels,
        "showDigits": _show_digits,
    }


# ---------------------------------------------------------------------------
# Writer


def _fmt_num(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def _fmt_dash(dash: tuple[float, ...]) -> str:
    if dash == ():
        return "[1]"
    return "[" + ", ".join(_fmt_num(v) for v in dash) + "]"


def _fmt_nums(values: Sequence[float]) -> str:
    return "[" + ", ".join(_fmt_num(v) for v in values) + "]"


def scene_to_lns(scene: Scene) -> str:
    """Write a scene as LNS source that evaluates back to the same scene.

    Raises ValueError for the few scene features LNS cannot carry
    (an explicit saturation reference or per-marker saturation sums).
    """
    if scene.saturation_ref is not None:
        raise ValueError("an explicit saturation reference is not representable in LNS")

    view = scene.view
    size = scene.frame.edge
    lines = [
        f"try {{ setView({_fmt_num(view.view_preset)}); }} catch (ex) {{ }}",
        f"try {{ setTransform({_fmt_num(view.transform_mode)}); }} catch (ex) {{ }}",
        f"try {{ setViewPort({_fmt_num(view.azimuth_deg)}, "
        f"{_fmt_num(view.elevation_deg)}); }} catch (ex) {{ }}",
    ]
    if scene.prism_axis is not None:
        axis = scene.prism_axis
        lines.append(
            f"setTimeAxis({_fmt_num(axis.t_min)}, {_fmt_num(axis.t_max)}, "
            f"{_fmt_num(axis.length)});"
        )
    if scene.show_digits:
        lines.append("showDigits(1);")

    for item in scene.items:
        if isinstance(item, WireSimplex):
            style = item.style
            if item.prism:
                name = "addPrism"
            else:
                name = "addTriangle" if scene.frame.n == 2 else "addTetraedron"
            lines.append(
                f'{name}("{style.color}", {_fmt_num(style.stroke_width)}, '
                f"{_fmt_dash(style.dash_pattern)}, {_fmt_num(size)});"
            )
        elif isinstance(item, SliceTriangle):
            style = item.style
            tail = ""
            if item.opacity != DEFAULT_SLICE_OPACITY:
                tail = f", {_fmt_num(item.opacity)}"
            lines.append(
                f'addSlice("{style.color}", {_fmt_num(style.stroke_width)}, '
                f"{_fmt_dash(style.dash_pattern)}, {_fmt_num(size)}, "
                f"{_fmt_num(item.timestamp)}{tail});"
            )
        elif isinstance(item, Marker):
            if item.saturation_sum is not None:
                raise ValueError("a marker saturation sum is not representable in LNS")
            name = (
                "addPoint"
                if item.role is MarkerRole.OBJECT_UNDER_STUDY
                else "addSamplePoint"
            )
            tail = "" if item.timestamp is None else f", {_fmt_num(item.timestamp)}"
            lines.append(
                f'{name}("{item.style.color}", {_fmt_num(item.radius)}, '
                f'"{item.shape}", {_fmt_num(size)}, '
                f"{_fmt_nums(item.coefficients.values)}{tail});"
            )
        elif isinstance(item, PerpendicularFan):
            style = item.style
            colors = "[" + ", ".join(f'"{c}"' for c in item.per_side_colors) + "]"
            tail = "" if item.timestamp is None else f", {_fmt_num(item.timestamp)}"
            lines.append(
                f'addIJK("{style.color}", {_fmt_num(style.stroke_width)}, '
                f"{_fmt_dash(style.dash_pattern)}, {_fmt_num(size)}, "
                f"{_fmt_nums(item.coefficients.values)}, {colors}{tail});"
            )
        elif isinstance(item, Trajectory):
            style = item.style
            times = [t for _cv, t in item.waypoints]
            if any(t is None for t in times) and any(t is not None for t in times):
                raise ValueError(
                    "a trajectory with timestamps on only some waypoints "
                    "is not representable in LNS"
                )
            rows = (
                "["
                + ", ".join(_fmt_nums(cv.values) for cv, _t in item.waypoints)
                + "]"
            )
            tail = ""
            if all(t is not None for t in times):
                tail += f", {_fmt_nums(times)}"  # type: ignore[arg-type]
            if item.kind is not TrajectoryKind.OBSERVED:
                tail += f', "{item.kind.value}"'
            lines.append(
                f'addPath("{style.color}", {_fmt_num(style.stroke_width)}, '
                f"{_fmt_dash(style.dash_pattern)}, {_fmt_num(size)}, {rows}{tail});"
            )
        elif isinstance(item, SideLabels):
            texts = ", ".join(f'"{t}"' for t in item.texts)
            lines.append(f"setSideLabels({texts});")
    return "\n".join(lines) + "\n"
