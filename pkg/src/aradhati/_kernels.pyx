# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled text and tally kernels.

Single-pass versions of the functions in ``_kernels_py``; outputs must be
identical for every input.
"""

import numpy as np

from cpython.mem cimport PyMem_Malloc, PyMem_Free
from cpython.unicode cimport Py_UNICODE_ISDECIMAL, Py_UNICODE_ISSPACE

from . import _charclass as cc

cdef extern from "Python.h":
    Py_UCS4* PyUnicode_AsUCS4Copy(object s) except NULL
    object PyUnicode_FromKindAndData(int kind, const void *buffer, Py_ssize_t size)
    int PyUnicode_4BYTE_KIND

cdef bytes _TABLE_BYTES = cc.CLASS_TABLE
cdef const unsigned char* _TABLE = _TABLE_BYTES
_classify_slow = cc.classify_slow

cdef int C_SPACE = cc.SPACE
cdef int C_MARK = cc.MARK
cdef int C_TATWEEL = cc.TATWEEL
cdef int C_FOREIGN = cc.FOREIGN
cdef int C_PUNCT = cc.PUNCT
cdef int C_SPECIAL = cc.SPECIAL


cdef inline int _classify(Py_UCS4 c):
    if c < 0x10000:
        return _TABLE[c]
    return _classify_slow(<unsigned int>c)


cdef inline unsigned int _lower(unsigned int c) noexcept nogil:
    if 65 <= c <= 90:
        return c + 32
    return c


cdef Py_ssize_t _url_at(const Py_UCS4* s, Py_ssize_t i, Py_ssize_t n) noexcept nogil:
    """Length of the URL scheme/prefix starting at i, or 0."""
    if i + 4 <= n and _lower(s[i]) == 119 and _lower(s[i + 1]) == 119 \
            and _lower(s[i + 2]) == 119 and s[i + 3] == 46:  # www.
        return 4
    if i + 7 <= n and _lower(s[i]) == 104 and _lower(s[i + 1]) == 116 \
            and _lower(s[i + 2]) == 116 and _lower(s[i + 3]) == 112:  # http
        if s[i + 4] == 58 and s[i + 5] == 47 and s[i + 6] == 47:
            return 7
        if i + 8 <= n and _lower(s[i + 4]) == 115 and s[i + 5] == 58 \
                and s[i + 6] == 47 and s[i + 7] == 47:
            return 8
    return 0


def clean_text(str text, int rules=cc.ALL_RULES):
    cdef Py_ssize_t n = len(text)
    if n == 0:
        return ""
    cdef Py_UCS4* buf = PyUnicode_AsUCS4Copy(text)
    cdef Py_ssize_t i = 0, w = 0, start, k, base
    cdef bint digit
    cdef Py_UCS4 c
    cdef int cls
    cdef bint url = rules & cc.RULE_URL
    cdef bint rm_foreign = rules & cc.RULE_NON_ARABIC
    cdef bint rm_punct = rules & cc.RULE_PUNCT
    cdef bint rm_special = rules & cc.RULE_SPECIAL
    cdef bint single = rules & cc.RULE_SINGLE
    cdef bint collapse = rules & cc.RULE_WHITESPACE
    try:
        # pass 1: URL spans and character-class removal, in place (w <= i)
        while i < n:
            c = buf[i]
            if url:
                k = _url_at(buf, i, n)
                if k:
                    i += k
                    while i < n and not Py_UNICODE_ISSPACE(buf[i]):
                        i += 1
                    buf[w] = 32
                    w += 1
                    continue
            cls = _classify(c)
            if (cls == C_FOREIGN and rm_foreign) or (cls == C_PUNCT and rm_punct) \
                    or (cls == C_SPECIAL and rm_special):
                buf[w] = 32
            else:
                buf[w] = c
            w += 1
            i += 1
        n = w
        if not single and not collapse:
            return PyUnicode_FromKindAndData(PyUnicode_4BYTE_KIND, buf, n)

        # pass 2: token filtering and whitespace collapsing, in place
        i = 0
        w = 0
        while i < n:
            c = buf[i]
            if Py_UNICODE_ISSPACE(c):
                if not collapse:
                    buf[w] = c
                    w += 1
                i += 1
                continue
            start = i
            base = 0
            digit = False
            while i < n and not Py_UNICODE_ISSPACE(buf[i]):
                cls = _classify(buf[i])
                if cls != C_MARK and cls != C_TATWEEL:
                    base += 1
                    digit = Py_UNICODE_ISDECIMAL(buf[i])
                i += 1
            # a lone digit is a number, not a letter
            if single and (base == 0 or (base == 1 and not digit)):
                continue
            if collapse and w > 0:
                buf[w] = 32
                w += 1
            for k in range(start, i):
                buf[w] = buf[k]
                w += 1
        return PyUnicode_FromKindAndData(PyUnicode_4BYTE_KIND, buf, w)
    finally:
        PyMem_Free(buf)


def normalize_text(str text, int flags=cc.DEFAULT_NORM):
    cdef Py_ssize_t n = len(text)
    if n == 0:
        return ""
    cdef Py_UCS4* buf = PyUnicode_AsUCS4Copy(text)
    cdef Py_ssize_t i, w = 0
    cdef Py_UCS4 c
    cdef int cls
    cdef bint alef = flags & cc.NORM_ALEF
    cdef bint tatweel = flags & cc.NORM_TATWEEL
    cdef bint diacritics = flags & cc.NORM_DIACRITICS
    cdef bint ta_marbuta = flags & cc.NORM_TA_MARBUTA
    cdef bint maqsura = flags & cc.NORM_ALEF_MAQSURA
    try:
        for i in range(n):
            c = buf[i]
            if c < 0x10000:
                cls = _TABLE[c]
                if cls == C_MARK and diacritics:
                    continue
                if cls == C_TATWEEL and tatweel:
                    continue
                if alef and (c == 0x0623 or c == 0x0625 or c == 0x0622):
                    c = 0x0627
                elif ta_marbuta and c == 0x0629:
                    c = 0x0647
                elif maqsura and c == 0x0649:
                    c = 0x064A
            buf[w] = c
            w += 1
        return PyUnicode_FromKindAndData(PyUnicode_4BYTE_KIND, buf, w)
    finally:
        PyMem_Free(buf)


def majority_vote(votes):
    """Row-wise majority of a (n_instances, n_voters) 0/1 matrix."""
    arr = np.ascontiguousarray(votes, dtype=np.int8)
    if arr.ndim != 2:
        raise ValueError("votes must be a 2-d array")
    cdef const signed char[:, ::1] v = arr
    cdef Py_ssize_t n = v.shape[0], m = v.shape[1], i, j
    cdef long ones
    out = np.empty(n, dtype=np.int8)
    cdef signed char[::1] o = out
    with nogil:
        for i in range(n):
            ones = 0
            for j in range(m):
                ones += v[i, j]
            o[i] = 1 if 2 * ones > m else 0
    return out


def confusion_counts(pred, truth):
    """Return (tp, fp, tn, fn) with label 1 as the positive class."""
    p_arr = np.ascontiguousarray(pred, dtype=np.int8)
    t_arr = np.ascontiguousarray(truth, dtype=np.int8)
    if p_arr.shape != t_arr.shape:
        raise ValueError("pred and truth differ in length")
    p_arr = p_arr.reshape(-1)
    t_arr = t_arr.reshape(-1)
    cdef const signed char[::1] p = p_arr
    cdef const signed char[::1] t = t_arr
    cdef Py_ssize_t i, n = p.shape[0]
    # cells indexed by 2 * pred + truth; labels outside {0, 1} are ignored
    cdef long cells[4]
    cells[0] = cells[1] = cells[2] = cells[3] = 0
    cdef unsigned char a, b
    with nogil:
        for i in range(n):
            a = <unsigned char>p[i]
            b = <unsigned char>t[i]
            if (a | b) <= 1:
                cells[2 * a + b] += 1
    return int(cells[3]), int(cells[2]), int(cells[0]), int(cells[1])
