"""
Recursive-descent parser for the expression grammar shared by files and
the command line:

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' uint)?
    base   := rational | var | '(' expr ')' | func '(' expr ')'
    var    := 'm'uint | 'z'uint          (1-indexed)
    rational := int ('/' uint)?
    func   := 'exp' | 'log1p'            (series mode only)

Whitespace is ignored. The parser builds a small tree that is evaluated
either into a MultiPoly or into a TruncSeries.
"""
import re
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple
import nefflow.common.build as build
import nefflow.common.exceptions as exp
from nefflow.algebra.poly import MultiPoly
from nefflow.algebra.series import TruncSeries, series_exp, series_log1p

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")

FUNCTIONS = ("exp", "log1p")


class Token(NamedTuple):
    kind: str  # "int", "name", "op", "end"
    value: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            break
        integer, name, op = match.groups()
        start = match.start(match.lastindex) if match.lastindex else match.end()
        if integer is not None:
            tokens.append(Token("int", integer, start))
        elif name is not None:
            tokens.append(Token("name", name, start))
        elif op is not None:
            if op.isspace():
                pos = match.end()
                continue
            if op not in "+-*/^()":
                raise exp.ParseError(f'Unexpected character "{op}"', start)
            tokens.append(Token("op", op, start))
        pos = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int, allow_functions: bool):
        self.text = text
        self.n = n
        self.allow_functions = allow_functions
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, value: str) -> Token:
        token = self.current
        if token.kind != "op" or token.value != value:
            found = token.value or "end of input"
            raise exp.ParseError(f'Expected "{value}" but found "{found}"', token.position)
        return self.advance()

    def parse(self) -> tuple:
        if self.current.kind == "end":
            raise exp.ParseError("Empty expression", 0)
        tree = self.expr()
        if self.current.kind != "end":
            raise exp.ParseError(f'Unexpected "{self.current.value}"', self.current.position)
        return tree

    def expr(self) -> tuple:
        sign = None
        if self.current.kind == "op" and self.current.value in "+-":
            sign = self.advance().value
        tree = self.term()
        if sign == "-":
            tree = ("neg", tree)
        while self.current.kind == "op" and self.current.value in "+-":
            op = self.advance().value
            right = self.term()
            tree = ("add" if op == "+" else "sub", tree, right)
        return tree

    def term(self) -> tuple:
        tree = self.factor()
        while self.current.kind == "op" and self.current.value == "*":
            self.advance()
            tree = ("mul", tree, self.factor())
        return tree

    def factor(self) -> tuple:
        base = self.base()
        if self.current.kind == "op" and self.current.value == "^":
            self.advance()
            token = self.current
            if token.kind == "op" and token.value == "-":
                raise exp.ParseError("Negative exponents are not allowed", token.position)
            if token.kind != "int":
                raise exp.ParseError("Expected a non-negative integer exponent", token.position)
            if int(token.value) > build.MAX_EXPRESSION_DEGREE:
                raise exp.ParseError(
                    f"Exponent {token.value} exceeds the maximum of {build.MAX_EXPRESSION_DEGREE} "
                    f"(set {build.environment_variables['max_expression_degree']} to raise it)",
                    token.position,
                )
            self.advance()
            return ("pow", base, int(token.value), token.position)
        return base

    def base(self) -> tuple:
        token = self.current
        if token.kind == "int":
            self.advance()
            value = Fraction(int(token.value))
            if self.current.kind == "op" and self.current.value == "/":
                self.advance()
                denominator = self.current
                if denominator.kind != "int":
                    raise exp.ParseError(
                        "Division is only allowed between integer literals", denominator.position
                    )
                if int(denominator.value) == 0:
                    raise exp.ParseError("Division by zero", denominator.position)
                self.advance()
                value = value / int(denominator.value)
            return ("num", value)

        if token.kind == "name":
            self.advance()
            return self.name(token)

        if token.kind == "op" and token.value == "(":
            self.advance()
            tree = self.expr()
            self.expect(")")
            return tree

        found = token.value or "end of input"
        raise exp.ParseError(f'Unexpected "{found}"', token.position)

    def name(self, token: Token) -> tuple:
        if token.value in FUNCTIONS:
            if not self.allow_functions:
                raise exp.ParseError(
                    f'Function "{token.value}" is only allowed in series expressions',
                    token.position,
                )
            self.expect("(")
            argument = self.expr()
            self.expect(")")
            return ("call", token.value, argument, token.position)

        match = re.fullmatch(r"([mz])(\d+)", token.value)
        if match is None:
            raise exp.ParseError(f'Unknown variable "{token.value}"', token.position)
        index = int(match.group(2))
        if not 1 <= index <= self.n:
            raise exp.ParseError(
                f'Unknown variable "{token.value}": variables run from 1 to {self.n}',
                token.position,
            )
        return ("var", index - 1)


def parse_tree(text: str, n: int, allow_functions: bool = False) -> tuple:
    return _Parser(text, n, allow_functions).parse()


def _evaluate(tree: tuple, constant, variable, call):
    kind = tree[0]
    if kind == "num":
        return constant(tree[1])
    if kind == "var":
        return variable(tree[1])
    if kind == "neg":
        return -_evaluate(tree[1], constant, variable, call)
    if kind in ("add", "sub", "mul"):
        left = _evaluate(tree[1], constant, variable, call)
        right = _evaluate(tree[2], constant, variable, call)
        if kind == "add":
            return left + right
        if kind == "sub":
            return left - right
        return left * right
    if kind == "pow":
        return _evaluate(tree[1], constant, variable, call) ** tree[2]
    if kind == "call":
        return call(tree[1], _evaluate(tree[2], constant, variable, call), tree[3])
    raise exp.ParseError(f"Unknown expression node {kind}")


def _degree_bound(tree: tuple) -> int:
    kind = tree[0]
    if kind == "var":
        return 1
    if kind == "neg":
        return _degree_bound(tree[1])
    if kind in ("add", "sub"):
        return max(_degree_bound(tree[1]), _degree_bound(tree[2]))
    if kind == "mul":
        return _degree_bound(tree[1]) + _degree_bound(tree[2])
    if kind == "pow":
        degree = _degree_bound(tree[1]) * tree[2]
        if degree > build.MAX_EXPRESSION_DEGREE:
            raise exp.ParseError(
                f"The power expands to degree up to {degree}, above the maximum of "
                f"{build.MAX_EXPRESSION_DEGREE}",
                tree[3],
            )
        return degree
    return 0


def parse_polynomial(text: str, n: int) -> MultiPoly:
    tree = parse_tree(text, n)
    _degree_bound(tree)
    return _evaluate(
        tree,
        constant=lambda c: MultiPoly.constant(n, c),
        variable=lambda i: MultiPoly.variable(n, i),
        call=None,
    )


def parse_series(text: str, n: int, D: int) -> TruncSeries:
    """
    Parse into a series truncated at D; exp(.) and log1p(.) are allowed
    on arguments with zero constant term.
    """

    def call(name: str, argument: TruncSeries, position: Optional[int]) -> TruncSeries:
        if argument.constant_term != 0:
            raise exp.ParseError(
                f"{name}(.) needs an argument with zero constant term to stay rational",
                position,
            )
        if name == "exp":
            return series_exp(argument)
        return series_log1p(argument)

    tree = parse_tree(text, n, allow_functions=True)
    return _evaluate(
        tree,
        constant=lambda c: TruncSeries.constant(n, D, c),
        variable=lambda i: TruncSeries.variable(n, i, D),
        call=call,
    )


def parse_series_list(text: str, n: int, D: int) -> Tuple[TruncSeries, ...]:
    """Semicolon-separated series expressions"""
    parts = [part for part in text.split(";")]
    if any(not part.strip() for part in parts):
        raise exp.ParseError("Empty expression in a ';'-separated list")
    return tuple(parse_series(part, n, D) for part in parts)
