"""Character classes and rule flags shared by both text kernels.

The classification is computed once from ``unicodedata`` for the BMP and
handed to the kernels as a flat byte table; code points above the BMP are
classified on demand by :func:`classify_slow`.
"""

import unicodedata

SPACE = 1
LETTER = 2       # Arabic-script letter
DIGIT = 3        # Arabic-Indic digit
MARK = 4         # Arabic combining mark (tashkeel, Quranic annotation)
TATWEEL = 5
FOREIGN = 6      # letter, digit or mark of any other script
PUNCT = 7
SPECIAL = 8      # symbols, emoji, controls, format characters

# cleaning rules, applied in this order
RULE_URL = 1
RULE_NON_ARABIC = 2
RULE_PUNCT = 4
RULE_SPECIAL = 8
RULE_SINGLE = 16
RULE_WHITESPACE = 32
ALL_RULES = 63

# normalization steps
NORM_ALEF = 1
NORM_TATWEEL = 2
NORM_DIACRITICS = 4
NORM_TA_MARBUTA = 8
NORM_ALEF_MAQSURA = 16
DEFAULT_NORM = NORM_ALEF | NORM_TATWEEL | NORM_DIACRITICS

ARABIC_RANGES = (
    (0x0600, 0x06FF),
    (0x0750, 0x077F),
    (0x0870, 0x089F),
    (0x08A0, 0x08FF),
    (0xFB50, 0xFDFF),
    (0xFE70, 0xFEFF),
)

TATWEEL_CHAR = "ـ"
ALEF = "ا"
ALEF_VARIANTS = "أإآ"  # hamza above, hamza below, madda
TA_MARBUTA = "ة"
HEH = "ه"
ALEF_MAQSURA = "ى"
YEH = "ي"


def _is_arabic(cp):
    return any(lo <= cp <= hi for lo, hi in ARABIC_RANGES)


def classify_slow(cp):
    ch = chr(cp)
    if ch.isspace():
        return SPACE
    cat = unicodedata.category(ch)
    if _is_arabic(cp):
        if ch == TATWEEL_CHAR:
            return TATWEEL
        if cat == "Lo":
            return LETTER
        if cat == "Nd":
            return DIGIT
        if cat in ("Mn", "Mc", "Me", "Lm"):
            return MARK
    if cat[0] in "LNM":
        return FOREIGN if not _is_arabic(cp) else SPECIAL
    if cat[0] == "P":
        return PUNCT
    return SPECIAL


def build_table():
    return bytes(classify_slow(cp) for cp in range(0x10000))


CLASS_TABLE = build_table()


def removal_mask(rules):
    """Classes that the given cleaning rules replace by a space."""
    removed = set()
    if rules & RULE_NON_ARABIC:
        removed.add(FOREIGN)
    if rules & RULE_PUNCT:
        removed.add(PUNCT)
    if rules & RULE_SPECIAL:
        removed.add(SPECIAL)
    return removed
