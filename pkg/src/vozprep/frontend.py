"""Spanish text frontend: normalization, number expansion and rule-based G2P.

Targets Castilian Spanish with distinción (z/ce/ci -> θ) and yeísmo
(ll -> ʝ). The phoneme set is fixed by :data:`INVENTORY_SYMBOLS`; every
output of :func:`grapheme_to_phoneme` stays inside it.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

VOWELS = "aeiou"
ACCENTED = "áéíóú"
ALLOWED_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz" + ACCENTED + "üñ ")

STRESS = "ˈ"
BOUNDARY = "#"

# Canonical inventory order: vowels, consonants, stress marker, word boundary.
INVENTORY_SYMBOLS = (
    "a", "e", "i", "o", "u",
    "p", "t", "k", "b", "d", "g",
    "f", "s", "x", "θ", "tʃ",
    "m", "n", "ɲ",
    "l", "ʝ", "r", "ɾ",
    "w", "j",
    STRESS, BOUNDARY,
)


@dataclass(frozen=True)
class PhonemeInventory:
    """Ordered phoneme set; integer ids are list positions, blank is last."""

    symbols: tuple[str, ...] = INVENTORY_SYMBOLS

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("inventory symbols must be unique")

    @property
    def blank_id(self) -> int:
        return len(self.symbols)

    @property
    def num_classes(self) -> int:
        """Softmax width: phonemes plus the blank."""
        return len(self.symbols) + 1

    def id_of(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise KeyError(f"symbol {symbol!r} not in inventory") from None

    def ids_for(self, phonemes: list[str]) -> list[int]:
        return [self.id_of(p) for p in phonemes]

    def save(self, path) -> None:
        """One symbol per line; line index is the id, blank is implicit."""
        with open(path, "w", encoding="utf-8") as f:
            for sym in self.symbols:
                f.write(sym + "\n")

    @classmethod
    def load(cls, path) -> "PhonemeInventory":
        with open(path, encoding="utf-8") as f:
            symbols = tuple(line.rstrip("\n") for line in f if line.rstrip("\n"))
        return cls(symbols=symbols)


# ---------------------------------------------------------------------------
# Number expansion
# ---------------------------------------------------------------------------

_UNITS = (
    "cero", "uno", "dos", "tres", "cuatro", "cinco", "seis", "siete",
    "ocho", "nueve", "diez", "once", "doce", "trece", "catorce", "quince",
    "dieciséis", "diecisiete", "dieciocho", "diecinueve", "veinte",
    "veintiuno", "veintidós", "veintitrés", "veinticuatro", "veinticinco",
    "veintiséis", "veintisiete", "veintiocho", "veintinueve",
)
_TENS = {
    3: "treinta", 4: "cuarenta", 5: "cincuenta", 6: "sesenta",
    7: "setenta", 8: "ochenta", 9: "noventa",
}
_HUNDREDS = {
    1: "ciento", 2: "doscientos", 3: "trescientos", 4: "cuatrocientos",
    5: "quinientos", 6: "seiscientos", 7: "setecientos", 8: "ochocientos",
    9: "novecientos",
}

MAX_CARDINAL = 999_999


def _under_thousand(n: int) -> list[str]:
    # 1..999
    words = []
    hundreds, rest = divmod(n, 100)
    if hundreds:
        if hundreds == 1:
            words.append("cien" if rest == 0 else "ciento")
        else:
            words.append(_HUNDREDS[hundreds])
    if rest:
        if rest < 30:
            words.append(_UNITS[rest])
        else:
            tens, unit = divmod(rest, 10)
            words.append(_TENS[tens])
            if unit:
                words.append("y")
                words.append(_UNITS[unit])
    return words


def expand_cardinal(n: int) -> str:
    """Spell an integer in [0, 999999] as a Spanish cardinal.

    Apocope is deliberately not applied: 21000 is "veintiuno mil",
    never "veintiún mil".
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"expected an integer, got {type(n).__name__}")
    if not 0 <= n <= MAX_CARDINAL:
        raise ValueError(f"cardinal out of range [0, {MAX_CARDINAL}]: {n}")
    if n == 0:
        return "cero"
    thousands, rest = divmod(n, 1000)
    words: list[str] = []
    if thousands:
        if thousands > 1:
            words.extend(_under_thousand(thousands))
        words.append("mil")
    if rest:
        words.extend(_under_thousand(rest))
    return " ".join(words)


# ---------------------------------------------------------------------------
# Text normalization
# ---------------------------------------------------------------------------

_DIGIT_GROUP = re.compile(r"\d+")


def _expand_digit_group(match: re.Match) -> str:
    digits = match.group(0)
    n = int(digits)
    if n <= MAX_CARDINAL:
        return " " + expand_cardinal(n) + " "
    # Oversized groups are read digit by digit; normalize_text never fails.
    return " " + " ".join(_UNITS[int(d)] for d in digits) + " "


def _fold_char(ch: str) -> str:
    """Reduce a character outside the closed alphabet to it, or to space."""
    if ch in ALLOWED_CHARS:
        return ch
    if ch.isalpha():
        base = unicodedata.normalize("NFD", ch)[0]
        if base in ALLOWED_CHARS and base != " ":
            return base
    return " "


def normalize_text(raw: str) -> str:
    """Lowercase, expand integer digit groups, strip punctuation.

    Output uses only {a-z, á é í ó ú ü ñ, space} with single spaces and no
    leading/trailing space. Idempotent.
    """
    text = raw.lower()
    text = _DIGIT_GROUP.sub(_expand_digit_group, text)
    text = "".join(_fold_char(ch) for ch in text)
    return " ".join(text.split())


# ---------------------------------------------------------------------------
# Grapheme-to-phoneme
# ---------------------------------------------------------------------------

_ACCENT_TO_PLAIN = {"á": "a", "é": "e", "í": "i", "ó": "o", "ú": "u"}
_VOWEL_LETTERS = set(VOWELS) | set(ACCENTED) | {"ü"}

# Orthographic endings that trigger penultimate stress by default.
_PENULT_ENDINGS = set(VOWELS) | set(ACCENTED) | {"ü", "n", "s"}

_SIMPLE_CONSONANTS = {
    "b": "b", "d": "d", "f": "f", "k": "k", "l": "l", "m": "m",
    "n": "n", "p": "p", "s": "s", "t": "t", "w": "w",
    "ñ": "ɲ", "v": "b", "j": "x", "z": "θ",
}


class G2PError(ValueError):
    """Raised for characters outside the normalized alphabet."""

    def __init__(self, char: str, position: int):
        super().__init__(f"character {char!r} at position {position} is not normalized text")
        self.char = char
        self.position = position


@dataclass
class _Phone:
    symbol: str
    is_vowel: bool = False
    accented: bool = False


def _letters_to_phones(word: str, offset: int) -> list[_Phone]:
    """First pass: contextual letter rules, vowels kept as full vowels."""
    phones: list[_Phone] = []
    i = 0
    n = len(word)
    while i < n:
        ch = word[i]
        nxt = word[i + 1] if i + 1 < n else ""
        nxt_vowel_ei = nxt in ("e", "i", "é", "í")
        if ch not in ALLOWED_CHARS or ch == " ":
            raise G2PError(ch, offset + i)
        if ch == "c":
            if nxt == "h":
                phones.append(_Phone("tʃ"))
                i += 2
                continue
            phones.append(_Phone("θ" if nxt_vowel_ei else "k"))
        elif ch == "l" and nxt == "l":
            phones.append(_Phone("ʝ"))
            i += 2
            continue
        elif ch == "r":
            if nxt == "r":
                phones.append(_Phone("r"))
                i += 2
                continue
            # Trill word-initially and after n/l/s, tap everywhere else.
            prev = word[i - 1] if i > 0 else ""
            phones.append(_Phone("r" if (i == 0 or prev in "nls") else "ɾ"))
        elif ch == "q":
            if nxt == "u":
                after = word[i + 2] if i + 2 < n else ""
                if after in ("e", "i", "é", "í"):
                    phones.append(_Phone("k"))  # silent u
                    i += 2
                    continue
                phones.append(_Phone("k"))  # rare qua/quo: keep the glide
                phones.append(_Phone("w"))
                i += 2
                continue
            phones.append(_Phone("k"))
        elif ch == "g":
            if nxt == "u":
                after = word[i + 2] if i + 2 < n else ""
                if after in ("e", "i", "é", "í"):
                    phones.append(_Phone("g"))  # silent u: gue/gui
                    i += 2
                    continue
                phones.append(_Phone("g"))  # gua/guo: u handled as vowel
                i += 1
                continue
            phones.append(_Phone("x" if nxt_vowel_ei else "g"))
        elif ch == "h":
            pass  # silent
        elif ch == "x":
            if i == 0:
                phones.append(_Phone("s"))
            else:
                phones.append(_Phone("k"))
                phones.append(_Phone("s"))
        elif ch == "y":
            if i == n - 1 and n > 1:
                phones.append(_Phone("j"))  # word-final off-glide: hoy, muy
            elif n == 1:
                phones.append(_Phone("i", is_vowel=True))  # conjunction
            else:
                phones.append(_Phone("ʝ"))  # syllable onset: yo, mayo
        elif ch in _SIMPLE_CONSONANTS:
            phones.append(_Phone(_SIMPLE_CONSONANTS[ch]))
        elif ch in _VOWEL_LETTERS:
            if ch in _ACCENT_TO_PLAIN:
                phones.append(_Phone(_ACCENT_TO_PLAIN[ch], is_vowel=True, accented=True))
            elif ch == "ü":
                phones.append(_Phone("u", is_vowel=True))
            else:
                phones.append(_Phone(ch, is_vowel=True))
        else:
            raise G2PError(ch, offset + i)
        i += 1
    return phones


def _apply_glides(phones: list[_Phone]) -> None:
    """Turn weak unaccented i/u into glides inside each vowel run (in place)."""
    i = 0
    n = len(phones)
    while i < n:
        if not phones[i].is_vowel:
            i += 1
            continue
        j = i
        while j < n and phones[j].is_vowel:
            j += 1
        run = phones[i:j]
        if len(run) > 1:
            weak = [p.symbol in "iu" and not p.accented for p in run]
            if all(weak):
                # iu/ui clusters: the last high vowel keeps the nucleus.
                glide_mask = [True] * (len(run) - 1) + [False]
            else:
                glide_mask = weak
            for p, make_glide in zip(run, glide_mask):
                if make_glide:
                    p.symbol = "j" if p.symbol == "i" else "w"
                    p.is_vowel = False
        i = j


def _stressed_nucleus(word: str, phones: list[_Phone]) -> int | None:
    """Index into phones of the vowel that takes the stress marker."""
    nuclei = [k for k, p in enumerate(phones) if p.is_vowel]
    if not nuclei:
        return None
    for k in nuclei:
        if phones[k].accented:
            return k
    if len(nuclei) == 1:
        return nuclei[0]
    if word[-1] in _PENULT_ENDINGS:
        return nuclei[-2]
    return nuclei[-1]


def _word_to_phonemes(word: str, offset: int) -> list[str]:
    phones = _letters_to_phones(word, offset)
    _apply_glides(phones)
    stressed = _stressed_nucleus(word, phones)
    out: list[str] = []
    for k, p in enumerate(phones):
        if k == stressed:
            out.append(STRESS)
        out.append(p.symbol)
    return out


def grapheme_to_phoneme(text: str, inventory: PhonemeInventory | None = None) -> list[str]:
    """Convert normalized Spanish text to a phoneme sequence.

    Words are separated by the boundary marker; the stress marker precedes
    the stressed nuclear vowel of each word. Characters outside the
    normalized alphabet raise :class:`G2PError` with their position.
    """
    inventory = inventory or PhonemeInventory()
    allowed = set(inventory.symbols)
    phonemes: list[str] = []
    pos = 0
    for word in _iter_words(text):
        if phonemes:
            phonemes.append(BOUNDARY)
        phonemes.extend(_word_to_phonemes(word.text, word.start))
    for sym in phonemes:
        if sym not in allowed:
            raise ValueError(f"phoneme {sym!r} not covered by inventory")
    return phonemes


@dataclass
class _Word:
    text: str
    start: int


def _iter_words(text: str):
    start = None
    for i, ch in enumerate(text):
        if ch == " ":
            if start is not None:
                yield _Word(text[start:i], start)
                start = None
        else:
            if start is None:
                start = i
    if start is not None:
        yield _Word(text[start:], start)


def stress_marks_per_word(phonemes: list[str]) -> list[int]:
    """Stress-marker count for each boundary-separated word segment."""
    counts = [0]
    for sym in phonemes:
        if sym == BOUNDARY:
            counts.append(0)
        elif sym == STRESS:
            counts[-1] += 1
    return counts
