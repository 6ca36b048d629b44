"""Parser of the Hodge type mini-language.

Grammar (whitespace allowed between tokens)::

    type    := summand ("+" summand)*
    summand := "(" int "," int ")" ["x" int]
    int     := ["-"] digit+

A missing multiplicity means 1. ``"(1,0)x2+(1,1)"`` is two copies of
the (1,0) block and one (1,1) block.

"""

from __future__ import annotations

from hodge_sigma.lib.hodge_ops import HodgeType, Summand
from hodge_sigma.utils import HodgeTypeSyntaxError


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos : self.pos + 1]

    def expect(self, char: str) -> None:
        if self.peek() != char:
            raise HodgeTypeSyntaxError(self.text, self.pos, repr(char))
        self.pos += 1

    def integer(self) -> int:
        self.skip()
        start = self.pos
        if self.text[self.pos : self.pos + 1] == "-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            raise HodgeTypeSyntaxError(self.text, start, "an integer")
        return int(self.text[start : self.pos])

    def summand(self) -> Summand:
        self.expect("(")
        p = self.integer()
        self.expect(",")
        q = self.integer()
        self.expect(")")
        mult = 1
        if self.peek() in ("x", "X"):
            self.pos += 1
            at = self.pos
            mult = self.integer()
            if mult < 1:
                raise HodgeTypeSyntaxError(self.text, at, "a positive multiplicity")
        return Summand(p, q, mult)

    def parse(self) -> HodgeType:
        summands = [self.summand()]
        while self.peek() == "+":
            self.pos += 1
            summands.append(self.summand())
        if self.peek():
            raise HodgeTypeSyntaxError(self.text, self.pos, "'+' or end of input")
        return HodgeType(tuple(summands))


def parse_hodge_type(text: str) -> HodgeType:
    """Parse ``"(p,q)xM+..."`` into a :class:`HodgeType`.

    Raises
    ------
    HodgeTypeSyntaxError
        Citing the offset and the offending token.

    Examples
    --------
    >>> str(parse_hodge_type(" (1, 0) x 2 + (1,1) "))
    '(1,0)x2+(1,1)x1'

    """
    return _Parser(text).parse()
