"""Text form of polynomials: a recursive-descent parser and a canonical printer.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := '-'? factor ('*' factor)*
    factor   := atom ('^' nat)?
    atom     := rational | identifier | '(' expr ')'
    rational := int ('/' nat)?
"""

import re
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple

from .algebra import Monomial, SuPoly, VariableRoster
from .errors import ExpressionSyntaxError, UnknownIdentifier

TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


class Token(NamedTuple):
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    """Split an expression into numbers, names, operators and parentheses."""
    tokens: List[Token] = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = TOKEN_RE.match(text, position)
        if match is None:
            offset = position + len(text[position:]) - len(text[position:].lstrip())
            raise ExpressionSyntaxError(f"Unexpected character '{text[offset]}'", offset, text)
        kind = match.lastgroup or "op"
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), start))
        position = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, roster: VariableRoster):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0
        for token in self.tokens:
            if token.kind == "name":
                try:
                    roster = roster.ensure(token.text)
                except UnknownIdentifier:
                    raise UnknownIdentifier(token.text, token.position) from None
        self.roster = roster

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> ExpressionSyntaxError:
        token = token or self.current
        found = token.text or "end of input"
        return ExpressionSyntaxError(f"{message}, found '{found}'", token.position, self.text)

    def expect(self, text: str) -> Token:
        if self.current.text != text:
            raise self.error(f"Expected '{text}'")
        return self.advance()

    def parse(self) -> SuPoly:
        result = self.expr()
        if self.current.kind != "end":
            raise self.error("Unexpected token")
        return result

    def expr(self) -> SuPoly:
        result = self.term()
        while self.current.text in ("+", "-"):
            sign = self.advance().text
            right = self.term()
            result = result + right if sign == "+" else result - right
        return result

    def term(self) -> SuPoly:
        negate = False
        if self.current.text == "-":
            self.advance()
            negate = True
        result = self.factor()
        while self.current.text == "*":
            self.advance()
            result = result * self.factor()
        return -result if negate else result

    def factor(self) -> SuPoly:
        base = self.atom()
        if self.current.text == "^":
            self.advance()
            token = self.current
            if token.kind != "number":
                raise self.error("Expected a natural exponent")
            self.advance()
            return base ** int(token.text)
        return base

    def atom(self) -> SuPoly:
        token = self.current
        if token.kind == "number":
            self.advance()
            value = Fraction(int(token.text))
            if self.current.text == "/":
                self.advance()
                denominator = self.current
                if denominator.kind != "number":
                    raise self.error("Expected a denominator")
                if int(denominator.text) == 0:
                    raise self.error("Zero denominator", denominator)
                self.advance()
                value /= int(denominator.text)
            return SuPoly.constant(self.roster, value)
        if token.kind == "name":
            self.advance()
            return SuPoly.var(self.roster, token.text)
        if token.text == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.error("Expected a number, a variable or '('")


def parse_expression(text: str, roster: VariableRoster) -> SuPoly:
    """Parse ``text`` into a canonical polynomial over ``roster``.

    Jet rosters grow to cover derivative names that appear in the text.
    """
    parser = _Parser(text, roster)
    return parser.parse().with_roster(parser.roster)


def monomial_sort_key(poly: SuPoly, mono: Monomial) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
    rank = poly.roster.rank
    return (-sum(e for _, e in mono), tuple((rank[name], -e) for name, e in mono))


def format_monomial(mono: Monomial) -> str:
    """x^2*etab_y style text of one monomial."""
    return "*".join(name if e == 1 else f"{name}^{e}" for name, e in mono)


def format_canonical(p: SuPoly) -> str:
    """Deterministic text: higher degree first, then global variable order."""
    if p.is_zero():
        return "0"
    pieces: List[str] = []
    for mono in sorted(p.terms, key=lambda m: monomial_sort_key(p, m)):
        coeff = p.terms[mono]
        magnitude = abs(coeff)
        if not mono:
            body = str(magnitude)
        elif magnitude == 1:
            body = format_monomial(mono)
        else:
            body = f"{magnitude}*{format_monomial(mono)}"
        if not pieces:
            pieces.append(body if coeff > 0 else f"-{body}")
        else:
            pieces.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(pieces)
