"""Deterministic text preprocessing shared by extractors and vectorizers.

Tokenization rules (frozen so downstream golden files stay stable):

* a token is a maximal run of alphanumeric characters; everything else is
  a boundary and is never emitted as a token,
* surfaces are case-folded to lowercase (the original spelling is kept on
  the token for casing-sensitive features),
* ``.``, ``!`` and ``?`` advance the sentence counter; any non-whitespace
  boundary character advances the block counter (blocks are the
  punctuation-free spans candidate generators operate on).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from importlib import resources

NOUN = "NOUN"
ADJ = "ADJ"
VERB = "VERB"
OTHER = "OTHER"
STOP = "STOP"
TAGS = frozenset({NOUN, ADJ, VERB, OTHER, STOP})

_SENTENCE_ENDERS = ".!?"

# Suffix rules for the heuristic tagger, longest match wins.  Only applied
# when the word is at least two characters longer than the suffix.
_ADJ_SUFFIXES = ("ical", "able", "ible", "less", "ous", "ful", "ive", "ish", "ary", "al", "ic")
_VERB_SUFFIXES = ("izes", "ises", "ifies", "ized", "ised", "ified", "ize", "ise", "ify", "ing", "ed")


@dataclass
class Token:
    """One word occurrence. ``position`` is the 0-based token index in the
    document; ``block_index`` changes at every punctuation boundary."""

    surface: str
    position: int
    sentence_index: int = 0
    block_index: int = 0
    raw: str = ""
    stem: str = ""
    tag: str | None = None


@functools.lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    text = resources.files("rubriq.resources").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w for w in text.splitlines() if w and not w.startswith("#"))


@functools.lru_cache(maxsize=1)
def lexicon() -> dict[str, str]:
    text = resources.files("rubriq.resources").joinpath("lexicon.txt").read_text("utf-8")
    out: dict[str, str] = {}
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        word, tag = line.split("\t")
        out[word] = tag
    return out


def tokenize(text: str, drop_proper_names: bool = False) -> list[Token]:
    """Split ``text`` into tokens; see the module docstring for the rules.

    ``drop_proper_names`` removes capitalized mid-sentence tokens that are
    not in the bundled lexicon (off by default).
    """
    tokens: list[Token] = []
    buf: list[str] = []
    position = 0
    sentence = 0
    block = 0
    new_sentence = False
    new_block = False
    sentence_start = True  # document start counts as a sentence start

    def flush() -> None:
        nonlocal position, sentence, block, new_sentence, new_block, sentence_start
        if not buf:
            return
        if new_block:
            block += 1
            new_block = False
        if new_sentence:
            sentence += 1
            new_sentence = False
            sentence_start = True
        raw = "".join(buf)
        buf.clear()
        surface = raw.lower()
        if (
            drop_proper_names
            and not sentence_start
            and raw[0].isupper()
            and surface not in lexicon()
        ):
            sentence_start = False
            return
        tokens.append(
            Token(
                surface=surface,
                position=position,
                sentence_index=sentence,
                block_index=block,
                raw=raw,
                stem=stem(surface),
            )
        )
        position += 1
        sentence_start = False

    for ch in text:
        if ch.isalnum():
            buf.append(ch)
            continue
        flush()
        if not ch.isspace():
            new_block = True
        if ch in _SENTENCE_ENDERS:
            new_sentence = True
    flush()
    return tokens


def pos_tag(tokens: list[Token], pos: list[str] | None = None) -> list[Token]:
    """Fill the ``tag`` field in place and return the same list.

    When the dataset supplies a ``pos`` array those tags are used verbatim;
    otherwise the heuristic (stopword list, lexicon, suffix rules, default
    NOUN) assigns them.
    """
    if pos is not None:
        if len(pos) != len(tokens):
            raise ValueError(f"pos array has {len(pos)} tags for {len(tokens)} tokens")
        for token, tag in zip(tokens, pos):
            if tag not in TAGS:
                raise ValueError(f"unknown pos tag {tag!r}")
            token.tag = tag
        return tokens
    lex = lexicon()
    stops = stopwords()
    for token in tokens:
        word = token.surface
        if word in stops:
            token.tag = STOP
        elif word in lex:
            token.tag = lex[word]
        else:
            token.tag = _suffix_tag(word)
    return tokens


def _suffix_tag(word: str) -> str:
    for suffix in _ADJ_SUFFIXES:
        if word.endswith(suffix) and len(word) >= len(suffix) + 2:
            return ADJ
    for suffix in _VERB_SUFFIXES:
        if word.endswith(suffix) and len(word) >= len(suffix) + 2:
            return VERB
    return NOUN


def prepare(text: str, pos: list[str] | None = None, drop_proper_names: bool = False) -> list[Token]:
    """tokenize + pos_tag in one call; the shape every extractor consumes."""
    return pos_tag(tokenize(text, drop_proper_names=drop_proper_names), pos=pos)


def ngrams(tokens: list[str], nmin: int, nmax: int) -> list[str]:
    """All contiguous space-joined n-grams, grouped by n, document order."""
    if not 1 <= nmin <= nmax:
        raise ValueError(f"invalid ngram range ({nmin}, {nmax})")
    out: list[str] = []
    for n in range(nmin, nmax + 1):
        for i in range(len(tokens) - n + 1):
            out.append(" ".join(tokens[i : i + n]))
    return out


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def levenshtein_ratio(a: str, b: str) -> float:
    """1 - distance/max(len); 1.0 for two empty strings."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


# ---------------------------------------------------------------------------
# Porter stemmer (the 1980 algorithm, no later revisions).


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in "aeiou":
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem_part: str) -> int:
    m = 0
    prev_vowel = False
    for i in range(len(stem_part)):
        if _is_consonant(stem_part, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _has_vowel(stem_part: str) -> bool:
    return any(not _is_consonant(stem_part, i) for i in range(len(stem_part)))


def _ends_double_consonant(word: str) -> bool:
    return len(word) >= 2 and word[-1] == word[-2] and _is_consonant(word, len(word) - 1)


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    return (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


def _rule_step(word: str, rules: tuple[tuple[str, str], ...], min_measure: int) -> str:
    # The longest matching suffix is the one considered; if its measure
    # condition fails no rule in the step fires.
    best = None
    for suffix, replacement in rules:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = (suffix, replacement)
    if best is None:
        return word
    stem_part = word[: len(word) - len(best[0])]
    if _measure(stem_part) > min_measure:
        return stem_part + best[1]
    return word


_STEP2 = (
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
)
_STEP3 = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
)
_STEP4 = (
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
)


def stem(word: str) -> str:
    """Porter stem of a lowercase word."""
    if len(word) <= 2:
        return word

    # Step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif word.endswith("ss"):
        pass
    elif word.endswith("s"):
        word = word[:-1]

    # Step 1b
    fired = False
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    elif word.endswith("ed"):
        if _has_vowel(word[:-2]):
            word = word[:-2]
            fired = True
    elif word.endswith("ing"):
        if _has_vowel(word[:-3]):
            word = word[:-3]
            fired = True
    if fired:
        if word.endswith(("at", "bl", "iz")):
            word += "e"
        elif _ends_double_consonant(word) and word[-1] not in "lsz":
            word = word[:-1]
        elif _measure(word) == 1 and _ends_cvc(word):
            word += "e"

    # Step 1c
    if word.endswith("y") and _has_vowel(word[:-1]):
        word = word[:-1] + "i"

    word = _rule_step(word, _STEP2, 0)
    word = _rule_step(word, _STEP3, 0)
    word = _rule_step(word, tuple((s, "") for s in _STEP4 if s != "ion"), 1)
    if word.endswith("ion") and word[-4:-3] in ("s", "t") and _measure(word[:-3]) > 1:
        word = word[:-3]

    # Step 5a
    if word.endswith("e"):
        stem_part = word[:-1]
        m = _measure(stem_part)
        if m > 1 or (m == 1 and not _ends_cvc(stem_part)):
            word = stem_part
    # Step 5b
    if _measure(word) > 1 and _ends_double_consonant(word) and word.endswith("l"):
        word = word[:-1]
    return word
