"""Punctuation lookup shared by both kernels.

A character is punctuation when its Unicode general category is P* or it is
one of the ASCII symbols in ``string.punctuation``. Non-ASCII lookups are
resolved lazily and cached, so startup does not scan the whole code space.
"""
import string
import unicodedata

ASCII_PUNCT = frozenset(string.punctuation)


def is_punct(ch: str) -> bool:
    return ch in ASCII_PUNCT or unicodedata.category(ch).startswith("P")


class DeleteTable(dict):
    """``str.translate`` table deleting punctuation; filled on first sight of a code point."""

    def __missing__(self, cp):
        value = None if is_punct(chr(cp)) else cp
        self[cp] = value
        return value


DELETE_PUNCT = DeleteTable()
