import os
import subprocess
import sys
import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aradhati import _kernels_py
from aradhati import kernels
from aradhati._charclass import ALL_RULES, DEFAULT_NORM
from aradhati.preprocess import (
    RULE_ORDER,
    CleaningRuleSet,
    Normalization,
    clean,
    normalize,
    preprocess,
    token_count,
)

from strategies import mixed_text

STOP_WORDS = ["في", "من", "على", "إلى", "عن", "هذا", "هذه", "التي", "الذي", "لا", "ما", "مع", "كان", "أن", "قد"]

EXAMPLES = [
    ("شاهد http://t.co/ab الآن !! #news", "شاهد الان"),
    ("أحمد إلى آخر", "احمد الى اخر"),
    ("مـــرحبـــا بِكُمْ", "مرحبا بكم"),
    ("و قال ٣ أيام 3 days 😀", "قال ٣ ايام"),
    ("www.example.com/x?q=1 خبر", "خبر"),
    ("سلام،عليكم؟ نعم.", "سلام عليكم نعم"),
    ("ب ت ثث", "ثث"),
    ("  يوجد   \t\n شيء ", "يوجد شيء"),
    ("", ""),
    ("Hello world!", ""),
]


@pytest.mark.parametrize("raw,expected", EXAMPLES)
def test_examples(raw, expected):
    assert preprocess(raw) == expected


def test_rule_toggles():
    assert clean("Hello, World! 123", CleaningRuleSet.without("non_arabic")) == "Hello World 123"
    assert clean("كتاب، جديد", CleaningRuleSet.without("punctuation")) == "كتاب، جديد"
    # with URL removal off, the pieces of a URL fall to the other rules
    assert clean("رابط http://x.y هنا", CleaningRuleSet.without("urls", "non_arabic")) == "رابط http هنا"
    assert clean("و هو", CleaningRuleSet.without("single_letters")) == "و هو"
    assert clean("a  b", CleaningRuleSet.without("whitespace", "single_letters", "non_arabic")) == "a  b"
    with pytest.raises(ValueError):
        CleaningRuleSet.without("emoji")
    assert CleaningRuleSet().bits == ALL_RULES


def test_normalization_toggles():
    assert normalize("مدرسة على") == "مدرسة على"
    opts = Normalization(ta_marbuta=True, alef_maqsura=True)
    assert normalize("مدرسة على", opts) == "مدرسه علي"
    assert normalize("أإآ", Normalization(alef=False)) == "أإآ"
    assert normalize("بـِـب", Normalization(tatweel=False)) == "بــب"
    assert normalize("بـِـب", Normalization(diacritics=False)) == "بِب"
    assert Normalization().bits == DEFAULT_NORM
    with pytest.raises(ValueError):
        Normalization.from_dict({"hamza": True})


def test_rule_order_is_fixed():
    assert RULE_ORDER == ("urls", "non_arabic", "punctuation", "special", "single_letters", "whitespace")


def _allowed(ch):
    if ch == " ":
        return True
    if unicodedata.category(ch) == "Nd":
        return "ARABIC-INDIC" in unicodedata.name(ch, "")
    return unicodedata.category(ch).startswith("L") and "ARABIC" in unicodedata.name(ch, "")


@settings(max_examples=400, deadline=None)
@given(mixed_text)
def test_idempotent(text):
    once = preprocess(text)
    assert preprocess(once) == once


@settings(max_examples=400, deadline=None)
@given(mixed_text)
def test_script_purity(text):
    assert all(_allowed(ch) for ch in preprocess(text))


@settings(max_examples=400, deadline=None)
@given(mixed_text)
def test_length_monotone(text):
    assert len(preprocess(text)) <= len(text)


@settings(max_examples=300, deadline=None)
@given(mixed_text, st.sampled_from(STOP_WORDS), mixed_text)
def test_stop_words_survive(left, word, right):
    out = preprocess(f"{left} {word} {right}")
    assert f" {normalize(word)} " in f" {out} "


@settings(max_examples=300, deadline=None)
@given(mixed_text, st.integers(0, ALL_RULES), st.integers(0, 31))
def test_backends_agree(text, rules, flags):
    assert kernels.clean_text(text, rules) == _kernels_py.clean_text(text, rules)
    assert kernels.normalize_text(text, flags) == _kernels_py.normalize_text(text, flags)


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=30))
def test_backends_agree_any_unicode(text):
    assert kernels.clean_text(text, ALL_RULES) == _kernels_py.clean_text(text, ALL_RULES)


def test_token_count():
    assert token_count("") == 0
    assert token_count("سعادة") == 1
    assert token_count("كتاب  جميل جدا") == 3


def test_pure_python_switch():
    env = dict(os.environ, ARADHATI_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from aradhati import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
