"""Arabic text cleaning and normalization.

Stop words are never removed: function words such as "في" or "لا" carry
subjectivity cues.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from . import _charclass as cc
from .kernels import clean_text, normalize_text

# fixed application order
RULE_ORDER = ("urls", "non_arabic", "punctuation", "special", "single_letters", "whitespace")
_RULE_BITS = {
    "urls": cc.RULE_URL,
    "non_arabic": cc.RULE_NON_ARABIC,
    "punctuation": cc.RULE_PUNCT,
    "special": cc.RULE_SPECIAL,
    "single_letters": cc.RULE_SINGLE,
    "whitespace": cc.RULE_WHITESPACE,
}
_NORM_BITS = {
    "alef": cc.NORM_ALEF,
    "tatweel": cc.NORM_TATWEEL,
    "diacritics": cc.NORM_DIACRITICS,
    "ta_marbuta": cc.NORM_TA_MARBUTA,
    "alef_maqsura": cc.NORM_ALEF_MAQSURA,
}


@dataclass(frozen=True)
class CleaningRuleSet:
    """Which cleaning rules run. Order is fixed by ``RULE_ORDER``.

    Removed characters are replaced by a space so neighbouring words never
    fuse; ``single_letters`` drops tokens with at most one base character
    (diacritics and tatweel do not count).
    """

    urls: bool = True
    non_arabic: bool = True
    punctuation: bool = True
    special: bool = True
    single_letters: bool = True
    whitespace: bool = True

    @classmethod
    def without(cls, *names: str) -> CleaningRuleSet:
        unknown = set(names) - set(RULE_ORDER)
        if unknown:
            raise ValueError(f"unknown cleaning rule(s): {sorted(unknown)}")
        return cls(**{name: name not in names for name in RULE_ORDER})

    @property
    def bits(self) -> int:
        return sum(_RULE_BITS[f.name] for f in fields(self) if getattr(self, f.name))


@dataclass(frozen=True)
class Normalization:
    alef: bool = True
    tatweel: bool = True
    diacritics: bool = True
    ta_marbuta: bool = False
    alef_maqsura: bool = False

    @classmethod
    def from_dict(cls, d: dict | None) -> Normalization:
        d = dict(d or {})
        unknown = set(d) - set(_NORM_BITS)
        if unknown:
            raise ValueError(f"unknown normalization option(s): {sorted(unknown)}")
        return cls(**d)

    @property
    def bits(self) -> int:
        return sum(_NORM_BITS[f.name] for f in fields(self) if getattr(self, f.name))


DEFAULT_RULES = CleaningRuleSet()
DEFAULT_NORMALIZATION = Normalization()


def clean(text: str, rules: CleaningRuleSet = DEFAULT_RULES) -> str:
    return clean_text(text, rules.bits)


def normalize(text: str, options: Normalization = DEFAULT_NORMALIZATION) -> str:
    return normalize_text(text, options.bits)


def preprocess(
    text: str,
    rules: CleaningRuleSet = DEFAULT_RULES,
    options: Normalization = DEFAULT_NORMALIZATION,
) -> str:
    """Clean then normalize ``text``; idempotent for the default settings."""
    return normalize_text(clean_text(text, rules.bits), options.bits)


def token_count(text: str) -> int:
    return len(text.split())
