"""Bharati Braille encoding of Indic-script text.

The chart is data: a TSV of grapheme, dot pattern and class.  Output uses the
Unicode Braille Patterns block (U+2800..U+283F), one scalar per six-dot cell.

Encoding is linear: consonant, vowel sign and halant each get their own cell
in text order, a number sign opens every maximal digit run, and a space becomes
the blank cell.  Characters the chart does not know are copied through and
counted.

Decoding exists to verify round trips.  Independent vowels and vowel signs
share cells, so a vowel cell right after a consonant decodes to the sign and
anywhere else to the independent letter.  The number sign shares its cell with
``ण``; it is read as a number sign only at the start of a word and in front
of a digit cell.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .errors import DataError, LineError

BRAILLE_BASE = 0x2800
BLANK = chr(BRAILLE_BASE)
CLASSES = ("consonant", "vowel", "matra", "virama", "digit", "punct", "sign")
NUMBER_SIGN = "number"


class InvalidDots(LineError):
    pass


class DuplicateGrapheme(LineError):
    pass


class EmptyChart(DataError):
    pass


class AmbiguousChart(DataError):
    pass


@dataclass(frozen=True)
class BrailleCell:
    dots: frozenset

    def __post_init__(self):
        if not self.dots <= set(range(1, 7)):
            raise ValueError(f"dots {sorted(self.dots)} outside 1..6")

    @property
    def char(self) -> str:
        return chr(BRAILLE_BASE + sum(1 << (d - 1) for d in self.dots))

    @classmethod
    def parse(cls, text: str) -> "BrailleCell":
        return cls(frozenset(int(d) for d in text.split("-")))

    @classmethod
    def from_char(cls, ch: str) -> "BrailleCell":
        bits = ord(ch) - BRAILLE_BASE
        return cls(frozenset(k + 1 for k in range(6) if bits >> k & 1))


def is_braille(ch: str) -> bool:
    return BRAILLE_BASE <= ord(ch) <= BRAILLE_BASE + 0x3F


@dataclass(frozen=True)
class BrailleChart:
    letters: dict            # grapheme -> braille string
    classes: dict            # grapheme -> class
    signs: dict              # sign name -> braille string
    digits: dict             # digit -> braille string
    inverse: dict = field(default_factory=dict, compare=False)
    max_key: int = 1

    def __len__(self):
        return len(self.letters) + len(self.signs) + len(self.digits)

    @property
    def number_sign(self) -> str:
        return self.signs[NUMBER_SIGN]


def _parse_dots(text: str, lineno: int) -> str:
    cells = text.split()
    if not cells:
        raise InvalidDots("empty dot pattern", lineno)
    out = []
    for c in cells:
        try:
            out.append(BrailleCell.parse(c).char)
        except ValueError:
            raise InvalidDots(f"bad dot pattern {text!r}", lineno) from None
    return "".join(out)


def _build_inverse(letters: dict, classes: dict) -> dict:
    """braille string -> {class: grapheme}; raises AmbiguousChart on clashes."""
    inv: dict = {}
    for g, cells in letters.items():
        slot = inv.setdefault(cells, {})
        cls = classes[g]
        if cls in slot:
            raise AmbiguousChart(f"{g!r} and {slot[cls]!r} share cells {cells}")
        slot[cls] = g
    for cells, slot in inv.items():
        if len(slot) > 1 and set(slot) != {"vowel", "matra"}:
            raise AmbiguousChart(f"cells {cells} used by {sorted(slot.values())}")
    # a multi-cell key must not be spellable from shorter keys
    for cells in inv:
        if len(cells) < 2:
            continue
        reach = [True] + [False] * len(cells)
        for i in range(len(cells)):
            if not reach[i]:
                continue
            for j in range(i + 1, len(cells) + 1):
                if (i, j) != (0, len(cells)) and cells[i:j] in inv:
                    reach[j] = True
        if reach[-1]:
            raise AmbiguousChart(f"cells {cells} can also be read as a sequence of shorter entries")
    return inv


def chart_from_rows(rows) -> BrailleChart:
    """Build a chart from (lineno, grapheme, dots, class) rows."""
    letters, classes, signs, digits = {}, {}, {}, {}
    for lineno, g, dots, cls in rows:
        cells = _parse_dots(dots, lineno)
        if cls not in CLASSES:
            raise LineError(f"unknown class {cls!r}", lineno)
        if g.startswith("<") and g.endswith(">") and len(g) > 2:
            table, key = signs, g[1:-1]
        elif cls == "digit":
            table, key = digits, g
        else:
            table, key = letters, g
        if key in table or (table is letters and key in digits) or (table is digits and key in letters):
            raise DuplicateGrapheme(f"{g!r} listed twice", lineno)
        table[key] = cells
        if table is letters:
            classes[key] = cls
    if not (letters or digits or signs):
        raise EmptyChart("chart has no entries")
    if digits and NUMBER_SIGN not in signs:
        raise AmbiguousChart("digits listed without a <number> sign")
    inverse = _build_inverse(letters, classes)
    digit_inv: dict = {}
    for d, cells in digits.items():
        if cells in digit_inv:
            raise AmbiguousChart(f"digits {d!r} and {digit_inv[cells]!r} share cells")
        digit_inv[cells] = d
    max_key = max((len(k) for k in letters), default=1)
    return BrailleChart(letters, classes, signs, digits, inverse, max_key)


def load_chart(path) -> BrailleChart:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise LineError("expected grapheme, dots, class", lineno)
            rows.append((lineno, cols[0], cols[1], cols[2].strip()))
    return chart_from_rows(rows)


def default_chart() -> BrailleChart:
    return load_chart(resources.files("mwebraille") / "data" / "bharati_devanagari.tsv")


def segment_graphemes(text: str, chart: Optional[BrailleChart] = None) -> list[str]:
    """Split text into chart-addressable units.

    Every code point is its own unit (a consonant, its vowel sign and a halant
    are separate), except that multi-character chart keys are kept whole.
    """
    if chart is None or chart.max_key == 1:
        return list(text)
    out, i = [], 0
    while i < len(text):
        for n in range(min(chart.max_key, len(text) - i), 0, -1):
            piece = text[i:i + n]
            if n == 1 or piece in chart.letters:
                out.append(piece)
                i += n
                break
    return out


def encode_braille(text: str, chart: BrailleChart, stats: Optional[Counter] = None) -> str:
    """Encode text; unmapped characters pass through and are tallied in ``stats``."""
    out = []
    in_digits = False
    for g in segment_graphemes(text, chart):
        if g in chart.digits:
            if not in_digits:
                out.append(chart.number_sign)
                in_digits = True
            out.append(chart.digits[g])
            continue
        in_digits = False
        if g.isspace():
            out.append(BLANK)
        elif g in chart.letters:
            out.append(chart.letters[g])
        else:
            out.append(g)
            if stats is not None:
                stats[g] += 1
    return "".join(out)


def decode_braille(braille: str, chart: BrailleChart) -> str:
    """Inverse of :func:`encode_braille` on chart-covered text (see module notes)."""
    digit_inv = {v: k for k, v in chart.digits.items()}
    num = chart.signs.get(NUMBER_SIGN)
    longest = max((len(k) for k in chart.inverse), default=1)
    out = []
    prev = None          # class of the previous decoded unit, None at a word start
    in_digits = False
    i, n = 0, len(braille)
    while i < n:
        ch = braille[i]
        if ch == BLANK:
            out.append(" ")
            prev, in_digits = None, False
            i += 1
            continue
        if not is_braille(ch):
            out.append(ch)
            prev, in_digits = None, False
            i += 1
            continue
        if in_digits and ch in digit_inv:
            out.append(digit_inv[ch])
            i += 1
            continue
        in_digits = False
        if ch == num and prev is None and i + 1 < n and braille[i + 1] in digit_inv:
            in_digits = True
            prev = "digit"
            i += 1
            continue
        for size in range(min(longest, n - i), 0, -1):
            slot = chart.inverse.get(braille[i:i + size])
            if slot:
                break
        else:
            # a braille cell the chart does not define: keep it
            out.append(ch)
            prev = None
            i += 1
            continue
        if "matra" in slot and (prev == "consonant" or "vowel" not in slot):
            cls = "matra"
        elif "vowel" in slot:
            cls = "vowel"
        else:
            (cls,) = slot
        out.append(slot[cls])
        prev = None if cls == "punct" else cls
        i += size
    return "".join(out)
