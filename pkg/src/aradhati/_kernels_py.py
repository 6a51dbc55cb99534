"""Pure-Python kernels, used when the compiled extension is unavailable.

Must stay output-identical to ``_kernels.pyx``; the test suite checks both
against each other on fuzzed input.
"""

import re

import numpy as np

from . import _charclass as cc

URL_RE = re.compile(r"(?:[hH][tT][tT][pP][sS]?://|[wW][wW][wW]\.)\S*")
TOKEN_RE = re.compile(r"\S+")


class _RemovalTable(dict):
    """str.translate table that classifies code points lazily."""

    def __init__(self, rules):
        super().__init__()
        self.removed = cc.removal_mask(rules)

    def __missing__(self, cp):
        cls = cc.CLASS_TABLE[cp] if cp < 0x10000 else cc.classify_slow(cp)
        value = " " if cls in self.removed else cp
        self[cp] = value
        return value


_tables = {}


def _table(rules):
    key = rules & (cc.RULE_NON_ARABIC | cc.RULE_PUNCT | cc.RULE_SPECIAL)
    if key not in _tables:
        _tables[key] = _RemovalTable(key)
    return _tables[key]


def _base_chars(token):
    out = []
    for ch in token:
        cp = ord(ch)
        cls = cc.CLASS_TABLE[cp] if cp < 0x10000 else cc.classify_slow(cp)
        if cls != cc.MARK and cls != cc.TATWEEL:
            out.append(ch)
    return out


def _drop_single(match):
    # a lone digit is a number, not a letter
    token = match.group(0)
    base = _base_chars(token)
    return token if len(base) > 1 or (base and base[0].isdecimal()) else ""


def clean_text(text, rules=cc.ALL_RULES):
    if rules & cc.RULE_URL:
        text = URL_RE.sub(" ", text)
    if rules & (cc.RULE_NON_ARABIC | cc.RULE_PUNCT | cc.RULE_SPECIAL):
        text = text.translate(_table(rules))
    if rules & cc.RULE_SINGLE:
        text = TOKEN_RE.sub(_drop_single, text)
    if rules & cc.RULE_WHITESPACE:
        text = " ".join(text.split())
    return text


_norm_tables = {}


def _norm_table(flags):
    if flags in _norm_tables:
        return _norm_tables[flags]
    table = {}
    if flags & cc.NORM_ALEF:
        for ch in cc.ALEF_VARIANTS:
            table[ord(ch)] = cc.ALEF
    if flags & cc.NORM_TA_MARBUTA:
        table[ord(cc.TA_MARBUTA)] = cc.HEH
    if flags & cc.NORM_ALEF_MAQSURA:
        table[ord(cc.ALEF_MAQSURA)] = cc.YEH
    if flags & cc.NORM_TATWEEL:
        table[ord(cc.TATWEEL_CHAR)] = None
    if flags & cc.NORM_DIACRITICS:
        for cp, cls in enumerate(cc.CLASS_TABLE):
            if cls == cc.MARK:
                table[cp] = None
    _norm_tables[flags] = table
    return table


def normalize_text(text, flags=cc.DEFAULT_NORM):
    return text.translate(_norm_table(flags))


def majority_vote(votes):
    """Row-wise majority of a (n_instances, n_voters) 0/1 matrix."""
    votes = np.asarray(votes, dtype=np.int8)
    if votes.ndim != 2:
        raise ValueError("votes must be a 2-d array")
    ones = votes.sum(axis=1, dtype=np.int64)
    return (2 * ones > votes.shape[1]).astype(np.int8)


def confusion_counts(pred, truth):
    """Return (tp, fp, tn, fn) with label 1 as the positive class."""
    pred = np.asarray(pred, dtype=np.int8)
    truth = np.asarray(truth, dtype=np.int8)
    if pred.shape != truth.shape:
        raise ValueError("pred and truth differ in length")
    tp = int(np.sum((pred == 1) & (truth == 1)))
    fp = int(np.sum((pred == 1) & (truth == 0)))
    tn = int(np.sum((pred == 0) & (truth == 0)))
    fn = int(np.sum((pred == 0) & (truth == 1)))
    return tp, fp, tn, fn
