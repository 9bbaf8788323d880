"""Reduced words in the free group on two generators a, b.

Letters are small integers so that inversion is ``x ^ 1`` and walks can be
stored in numpy arrays. Text encoding: ``a``, ``A`` (= a^-1), ``b``, ``B``
(= b^-1); the empty word prints as ``e``.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Iterable, Iterator, Sequence, Union


class Letter(IntEnum):
    a = 0
    A = 1
    b = 2
    B = 3

    @property
    def inverse(self) -> "Letter":
        return Letter(self ^ 1)

    def __str__(self) -> str:
        return self.name


#: Fixed enumeration order for cylinders and tables.
LETTERS: tuple[Letter, ...] = (Letter.a, Letter.A, Letter.b, Letter.B)


def inverse_letter(x: int) -> int:
    return x ^ 1


def reduce(raw: Iterable[int]) -> "ReducedWord":
    """Freely reduce a letter sequence (single stack pass)."""
    stack: list[int] = []
    for x in raw:
        x = int(x)
        if not 0 <= x <= 3:
            raise ValueError(f"not a letter: {x!r}")
        if stack and stack[-1] == x ^ 1:
            stack.pop()
        else:
            stack.append(x)
    return ReducedWord._trusted(tuple(stack))


class ReducedWord:
    """An immutable freely reduced word; doubles as group element and cylinder label."""

    __slots__ = ("_letters", "_hash")

    def __init__(self, letters: Union[str, Iterable[int]] = ()):
        if isinstance(letters, str):
            letters = parse_letters(letters)
        self._letters = reduce(letters)._letters
        self._hash = None

    @classmethod
    def _trusted(cls, letters: tuple[int, ...]) -> "ReducedWord":
        # caller guarantees reducedness
        w = object.__new__(cls)
        w._letters = letters
        w._hash = None
        return w

    @property
    def letters(self) -> tuple[int, ...]:
        return self._letters

    def __len__(self) -> int:
        return len(self._letters)

    def __iter__(self) -> Iterator[Letter]:
        return (Letter(x) for x in self._letters)

    def __getitem__(self, i):
        if isinstance(i, slice):
            # any contiguous piece of a reduced word is reduced
            return ReducedWord._trusted(self._letters[i])
        return Letter(self._letters[i])

    def __eq__(self, other) -> bool:
        if isinstance(other, ReducedWord):
            return self._letters == other._letters
        if isinstance(other, str):
            return self == ReducedWord(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._letters)
        return self._hash

    def __lt__(self, other: "ReducedWord") -> bool:
        return (len(self), self._letters) < (len(other), other._letters)

    def __mul__(self, other: "ReducedWord") -> "ReducedWord":
        return multiply(self, other)

    def __invert__(self) -> "ReducedWord":
        return inverse(self)

    def __str__(self) -> str:
        return format_letters(self._letters)

    def __repr__(self) -> str:
        return f"ReducedWord({str(self)!r})"

    def prefix(self, n: int) -> "ReducedWord":
        return ReducedWord._trusted(self._letters[:n])

    def startswith(self, other: "ReducedWord") -> bool:
        n = len(other)
        return self._letters[:n] == other._letters

    def extend(self, x: int) -> "ReducedWord":
        """Append one letter; the result must stay reduced."""
        if self._letters and self._letters[-1] == x ^ 1:
            raise ValueError(f"appending {Letter(x)} to {self} cancels")
        return ReducedWord._trusted(self._letters + (int(x),))


IDENTITY = ReducedWord._trusted(())


def parse_letters(text: str) -> list[int]:
    text = text.strip()
    if text in ("", "e"):
        return []
    try:
        return [Letter[ch].value for ch in text]
    except KeyError:
        raise ValueError(f"malformed word {text!r}: use letters a, A, b, B or 'e'") from None


def format_letters(letters: Sequence[int]) -> str:
    if len(letters) == 0:
        return "e"
    return "".join(Letter(int(x)).name for x in letters)


def word(text: str) -> ReducedWord:
    return ReducedWord(text)


def cancellation(u: ReducedWord, v: ReducedWord) -> int:
    """Number of letter pairs cancelled at the junction of ``u·v``."""
    ul, vl = u.letters, v.letters
    c, n = 0, min(len(ul), len(vl))
    while c < n and ul[-1 - c] == vl[c] ^ 1:
        c += 1
    return c


def multiply(u: ReducedWord, v: ReducedWord) -> ReducedWord:
    c = cancellation(u, v)
    ul, vl = u.letters, v.letters
    return ReducedWord._trusted(ul[: len(ul) - c] + vl[c:])


def inverse(w: ReducedWord) -> ReducedWord:
    return ReducedWord._trusted(tuple(x ^ 1 for x in reversed(w.letters)))


def common_prefix_len(u: ReducedWord, v: ReducedWord) -> int:
    n = 0
    for x, y in zip(u.letters, v.letters):
        if x != y:
            break
        n += 1
    return n


def words_of_length(n: int) -> Iterator[ReducedWord]:
    """All reduced words of length ``n`` in the fixed letter order."""
    if n == 0:
        yield IDENTITY
        return
    for w in words_of_length(n - 1):
        for x in LETTERS:
            if w.letters and w.letters[-1] == x ^ 1:
                continue
            yield ReducedWord._trusted(w.letters + (int(x),))


def words_up_to(n: int) -> Iterator[ReducedWord]:
    for k in range(n + 1):
        yield from words_of_length(k)
