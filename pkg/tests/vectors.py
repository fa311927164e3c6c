"""Hand-derived normalization, containment and EM vectors.

Each normalization vector applies, in order: lowercase, delete punctuation,
split on whitespace, drop "a"/"an"/"the".
"""

NORMALIZE = [
    ("The Cat's Hat!", "cats hat"),
    ("", ""),
    ("a an the", ""),
    ("  Hello,   World  ", "hello world"),
    ("U.S.A.", "usa"),
    ("the theater", "theater"),
    ("An apple a day", "apple day"),
    ("Rock-and-roll", "rockandroll"),
    ("THE END.", "end"),
    ("(the)", ""),
    ("the's", "thes"),
    ("Café Müller", "café müller"),
    ("“Quoted” — text…", "quoted text"),
    ("$100 + 5%", "100 5"),
    ("tab\tand\nnewline", "tab and newline"),
    ("A", ""),
    ("a.b", "ab"),
    ("¿Qué?", "qué"),
]

CONTAINS = [
    ("Barack Obama was born in Hawaii.", "Hawaii", True),
    ("the theater is open", "heat", False),
    ("answer the question", "question answer", False),
    ("The Eiffel Tower, Paris", "eiffel tower", True),
    ("He said: THE END!", "the end", True),
    ("United States of America", "states america", False),
    ("born in 1961", "1961.", True),
    ("Hawaiian islands", "Hawaii", False),
]

EXACT_MATCH = [
    ("Hawaii", ["hawaii."], True),
    ("Obama", ["Barack Obama"], False),
    ("", [""], True),
    ("The Beatles", ["beatles"], True),
    ("beatle", ["beatles"], False),
    ("", ["x"], False),
    ("an", [""], True),
    ("Paris", ["London", "paris!"], True),
]
