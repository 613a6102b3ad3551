"""Controlled-vocabulary variable names for inter-component exchange.

Every variable a component publishes or consumes is labeled with a name of
the form ``object__quantity``: an object part describing *what thing* the
quantity belongs to and a quantity part describing *what is measured*,
joined by a double underscore.  Matching producer outputs to consumer
inputs is done on these labels, so the grammar is deliberately rigid:

    name     := object "__" quantity
    object   := token ("_" token)*
    quantity := token ("_" token)*
    token    := word ("~" word)*
    word     := [a-z][a-z0-9]*

``~`` attaches qualifying adjectives to a word (``sediment~suspended``).
Within the quantity part the literal token ``of`` chains derived-quantity
operators: ``time_derivative_of_temperature`` is the operator
``time_derivative`` applied to the base quantity ``temperature``.

Parsing is lossless: re-serializing the parsed parts reproduces the input
byte for byte, and ``parse(canonical_form(n)) == n`` for every valid name.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

__all__ = [
    "ErrorKind",
    "NameParseError",
    "Token",
    "StandardName",
    "parse",
    "is_valid",
    "canonical_form",
    "compatible",
    "decompose_quantity",
]

SEPARATOR = "__"
OPERATOR_WORD = "of"

_LOWER = frozenset("abcdefghijklmnopqrstuvwxyz")
_DIGITS = frozenset("0123456789")
_WORD_CHARS = _LOWER | _DIGITS
_LEGAL_CHARS = _WORD_CHARS | {"_", "~"}


class ErrorKind(Enum):
    """Grammar violations, one per distinguishable failure mode."""

    NO_SEPARATOR = "NoSeparator"
    MULTIPLE_SEPARATORS = "MultipleSeparators"
    EMPTY_OBJECT = "EmptyObject"
    EMPTY_QUANTITY = "EmptyQuantity"
    ILLEGAL_CHARACTER = "IllegalCharacter"
    BAD_TOKEN_START = "BadTokenStart"
    EMPTY_TOKEN = "EmptyToken"

    def __str__(self) -> str:
        return self.value


class NameParseError(ValueError):
    """A string was rejected by the name grammar.

    Carries the first violation in left-to-right scan order: its kind,
    the character index where it was detected, and a readable message.
    """

    def __init__(self, kind: ErrorKind, position: int, message: str):
        super().__init__(f"{message} (at index {position})")
        self.kind = kind
        self.position = position
        self.message = message


@dataclass(frozen=True)
class Token:
    """One ``_``-delimited token: a base word plus ``~`` adjectives."""

    base: str
    adjectives: tuple[str, ...] = ()

    def __str__(self) -> str:
        return "~".join((self.base,) + self.adjectives)


@dataclass(frozen=True)
class StandardName:
    """A parsed name: object tokens, quantity tokens, operator chain."""

    object_part: tuple[Token, ...]
    quantity_part: tuple[Token, ...]
    operators: tuple[str, ...]
    raw: str

    def __str__(self) -> str:
        return self.raw

    @property
    def object(self) -> str:
        return "_".join(str(t) for t in self.object_part)

    @property
    def quantity(self) -> str:
        return "_".join(str(t) for t in self.quantity_part)


def _fail(kind: ErrorKind, position: int, message: str) -> NameParseError:
    return NameParseError(kind, position, message)


def _parse_word(s: str, start: int, end: int) -> str:
    """Validate s[start:end] as a word; offsets are into the full input."""
    if start == end:
        raise _fail(ErrorKind.EMPTY_TOKEN, min(start, len(s) - 1),
                    "empty word where a token was expected")
    if s[start] not in _LOWER:
        raise _fail(ErrorKind.BAD_TOKEN_START, start,
                    f"token must start with a letter, got {s[start]!r}")
    return s[start:end]


def _parse_part(s: str, start: int, end: int) -> tuple[tuple[Token, ...], tuple[int, ...]]:
    """Parse s[start:end] as token ("_" token)*; return tokens + start offsets."""
    tokens: list[Token] = []
    offsets: list[int] = []
    cursor = start
    while True:
        tok_end = s.find("_", cursor, end)
        if tok_end < 0:
            tok_end = end
        offsets.append(cursor)
        # split the token at ~ boundaries into base word + adjectives
        words: list[str] = []
        wstart = cursor
        while True:
            wend = s.find("~", wstart, tok_end)
            if wend < 0:
                wend = tok_end
            words.append(_parse_word(s, wstart, wend))
            if wend == tok_end:
                break
            wstart = wend + 1
            if wstart == tok_end:  # trailing ~
                raise _fail(ErrorKind.EMPTY_TOKEN, min(wstart, len(s) - 1),
                            "adjective expected after '~'")
        tokens.append(Token(words[0], tuple(words[1:])))
        if tok_end == end:
            break
        cursor = tok_end + 1
    return tuple(tokens), tuple(offsets)


def _separator_positions(s: str) -> list[int]:
    """Non-overlapping occurrences of the separator, left to right."""
    positions = []
    i = s.find(SEPARATOR)
    while i >= 0:
        positions.append(i)
        i = s.find(SEPARATOR, i + len(SEPARATOR))
    return positions


def _split_operators(
    tokens: tuple[Token, ...], offsets: tuple[int, ...], quantity_start: int
) -> tuple[tuple[str, ...], tuple[Token, ...]]:
    """Split quantity tokens at each bare ``of`` into operators + base.

    A bare ``of`` closes the tokens accumulated since the previous
    boundary into one operator identifier; an ``of`` with nothing
    accumulated is an ordinary token.  An empty remainder means the
    quantity names no measurable base at all.
    """
    operators: list[str] = []
    acc: list[Token] = []
    last_of_offset = quantity_start
    for tok, off in zip(tokens, offsets):
        if tok.base == OPERATOR_WORD and not tok.adjectives and acc:
            operators.append("_".join(str(t) for t in acc))
            acc = []
            last_of_offset = off
        else:
            acc.append(tok)
    if not acc:
        raise _fail(ErrorKind.EMPTY_QUANTITY, last_of_offset,
                    "quantity has an operator chain but no base quantity")
    return tuple(operators), tuple(acc)


def parse(text: str) -> StandardName:
    """Parse a name, raising :class:`NameParseError` on the first violation.

    Scan order: illegal characters, then separator count, then the
    object part, then the quantity part.
    """
    if not text:
        raise _fail(ErrorKind.NO_SEPARATOR, 0, "empty string is not a name")
    for i, ch in enumerate(text):
        if ch not in _LEGAL_CHARS:
            raise _fail(ErrorKind.ILLEGAL_CHARACTER, i,
                        f"illegal character {ch!r}")
    seps = _separator_positions(text)
    if not seps:
        raise _fail(ErrorKind.NO_SEPARATOR, 0,
                    "missing '__' between object and quantity")
    if len(seps) > 1:
        raise _fail(ErrorKind.MULTIPLE_SEPARATORS, seps[1],
                    "more than one '__' separator")
    sep = seps[0]
    if sep == 0:
        raise _fail(ErrorKind.EMPTY_OBJECT, 0, "object part is empty")
    quantity_start = sep + len(SEPARATOR)
    if quantity_start == len(text):
        raise _fail(ErrorKind.EMPTY_QUANTITY, sep, "quantity part is empty")
    object_part, _ = _parse_part(text, 0, sep)
    quantity_part, offsets = _parse_part(text, quantity_start, len(text))
    operators, _ = _split_operators(quantity_part, offsets, quantity_start)
    return StandardName(object_part, quantity_part, operators, text)


def is_valid(text: str) -> bool:
    try:
        parse(text)
    except NameParseError:
        return False
    return True


def canonical_form(name: StandardName) -> str:
    """Serialize a parsed name; inverse of :func:`parse`."""
    return "{}{}{}".format(name.object, SEPARATOR, name.quantity)


def compatible(producer: StandardName | str, consumer: StandardName | str) -> bool:
    """Exact-match pairing: a producer output satisfies a consumer input
    iff the raw names are identical.  Deliberate mismatches are declared
    per link at composition level, not here."""
    a = producer.raw if isinstance(producer, StandardName) else producer
    b = consumer.raw if isinstance(consumer, StandardName) else consumer
    return a == b


def decompose_quantity(name: StandardName) -> tuple[list[str], list[Token]]:
    """Return (operator chain, base quantity tokens) for a parsed name.

    Joining each operator back with ``of`` and appending the base
    reproduces the quantity part exactly.
    """
    k = sum(len(op.split("_")) + 1 for op in name.operators)
    return list(name.operators), list(name.quantity_part[k:])
