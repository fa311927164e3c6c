# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled normalization and matching kernel.

Same functions and results as ``_pykernel``. Lowercasing is delegated to
``str.lower``; punctuation deletion, whitespace splitting, article dropping
and joining happen in a single pass over the lowered buffer without
creating per-token objects. For ASCII texts the matchers search the
normalized bytes in place instead of building a string per passage.
"""
from libc.stdlib cimport malloc, free, realloc

from ._punct import is_punct

cdef extern from "Python.h":
    int PyUnicode_KIND(object o)
    void* PyUnicode_DATA(object o)
    Py_ssize_t PyUnicode_GET_LENGTH(object o)
    Py_UCS4 PyUnicode_READ(int kind, void* data, Py_ssize_t index)
    object PyUnicode_FromKindAndData(int kind, const void* buffer, Py_ssize_t size)
    int PyUnicode_Contains(object container, object element) except -1
    bint Py_UNICODE_ISSPACE(Py_UCS4 ch)
    bint PyUnicode_IS_ASCII(object o)
    int PyUnicode_1BYTE_KIND
    int PyUnicode_4BYTE_KIND

cdef extern from *:
    """
    #include <string.h>
    #if defined(__GLIBC__) || defined(__APPLE__) || defined(__FreeBSD__)
    #define ar_memmem memmem
    #else
    static void* ar_memmem(const void* h, size_t hl, const void* n, size_t nl) {
        const char* hs = (const char*) h;
        size_t i;
        if (nl == 0) return (void*) hs;
        for (i = 0; i + nl <= hl; i++)
            if (hs[i] == *(const char*) n && memcmp(hs + i, n, nl) == 0) return (void*) (hs + i);
        return NULL;
    }
    #endif
    """
    void* ar_memmem(const void* h, size_t hl, const void* n, size_t nl)

cdef enum:
    KEEP = 0
    PUNCT = 1
    SPACE = 2

# 0 unknown, 1 punctuation, 2 not punctuation; filled lazily above ASCII
cdef bytearray _state_buf = bytearray(0x110000)
cdef unsigned char* _state = _state_buf
cdef unsigned char _ascii_class[128]

for _c in range(128):
    if chr(_c).isspace():
        _ascii_class[_c] = SPACE
    elif is_punct(chr(_c)):
        _ascii_class[_c] = PUNCT
    else:
        _ascii_class[_c] = KEEP


cdef inline int _classify(Py_UCS4 ch):
    cdef unsigned char s
    if ch < 128:
        return _ascii_class[ch]
    if Py_UNICODE_ISSPACE(ch):
        return SPACE
    s = _state[ch]
    if s == 0:
        s = 1 if is_punct(chr(ch)) else 2
        _state[ch] = s
    return PUNCT if s == 1 else KEEP


cdef inline bint _is_article(Py_UCS4* buf, Py_ssize_t start, Py_ssize_t length):
    if length == 1:
        return buf[start] == u'a'
    if length == 2:
        return buf[start] == u'a' and buf[start + 1] == u'n'
    if length == 3:
        return buf[start] == u't' and buf[start + 1] == u'h' and buf[start + 2] == u'e'
    return False


cdef inline Py_ssize_t _close_token(Py_UCS4* buf, Py_ssize_t start, Py_ssize_t w):
    cdef Py_ssize_t length = w - start
    if length == 0:
        return w
    if _is_article(buf, start, length):
        return start
    buf[w] = u' '
    return w + 1


cdef inline bint _is_article1(unsigned char* buf, Py_ssize_t start, Py_ssize_t length):
    if length == 1:
        return buf[start] == b'a'
    if length == 2:
        return buf[start] == b'a' and buf[start + 1] == b'n'
    if length == 3:
        return buf[start] == b't' and buf[start + 1] == b'h' and buf[start + 2] == b'e'
    return False


cdef inline Py_ssize_t _close_token1(unsigned char* buf, Py_ssize_t start, Py_ssize_t w):
    cdef Py_ssize_t length = w - start
    if length == 0:
        return w
    if _is_article1(buf, start, length):
        return start
    buf[w] = b' '
    return w + 1


cdef str _finish(int kind, void* buf, Py_ssize_t w, bint padded):
    cdef Py_ssize_t width = 1 if kind == PyUnicode_1BYTE_KIND else 4
    if padded:
        return PyUnicode_FromKindAndData(kind, buf, w)
    if w <= 1:
        return ""
    return PyUnicode_FromKindAndData(kind, <char*> buf + width, w - 2)


cdef Py_ssize_t _fill_ascii(unsigned char* data, Py_ssize_t n, unsigned char* buf):
    # writes " tok tok " (or " ") into buf, which must hold n + 2 bytes; returns the length
    cdef Py_ssize_t i, w = 1, start = 1
    cdef unsigned char ch
    cdef int cls
    buf[0] = b' '
    for i in range(n):
        ch = data[i]
        cls = _ascii_class[ch]
        if cls == KEEP:
            if ch >= b'A' and ch <= b'Z':
                ch += 32
            buf[w] = ch
            w += 1
        elif cls == SPACE:
            w = _close_token1(buf, start, w)
            start = w
    return _close_token1(buf, start, w)


cdef str _normalize_ascii(str text, bint padded):
    cdef Py_ssize_t n = PyUnicode_GET_LENGTH(text)
    cdef unsigned char* buf = <unsigned char*> malloc(n + 2)
    cdef Py_ssize_t w
    if buf == NULL:
        raise MemoryError()
    try:
        w = _fill_ascii(<unsigned char*> PyUnicode_DATA(text), n, buf)
        return _finish(PyUnicode_1BYTE_KIND, buf, w, padded)
    finally:
        free(buf)


cdef str _normalize(str text, bint padded):
    if PyUnicode_IS_ASCII(text):
        return _normalize_ascii(text, padded)
    cdef str low = text.lower()
    cdef Py_ssize_t n = PyUnicode_GET_LENGTH(low)
    cdef int kind = PyUnicode_KIND(low)
    cdef void* data = PyUnicode_DATA(low)
    cdef Py_UCS4* buf = <Py_UCS4*> malloc((n + 2) * sizeof(Py_UCS4))
    cdef Py_ssize_t i, w = 1, start = 1
    cdef Py_UCS4 ch
    cdef int cls
    if buf == NULL:
        raise MemoryError()
    try:
        buf[0] = u' '
        for i in range(n):
            ch = PyUnicode_READ(kind, data, i)
            cls = _classify(ch)
            if cls == KEEP:
                buf[w] = ch
                w += 1
            elif cls == SPACE:
                w = _close_token(buf, start, w)
                start = w
        w = _close_token(buf, start, w)
        return _finish(PyUnicode_4BYTE_KIND, buf, w, padded)
    finally:
        free(buf)


def norm_tokens(str text):
    return _normalize(text, False).split()


def norm_joined(str text):
    return _normalize(text, False)


def norm_padded(str text):
    return _normalize(text, True)


cdef class _Matcher:
    """Padded patterns plus their byte forms, and a scratch buffer reused across texts."""
    cdef list patterns
    cdef list ascii_patterns
    cdef unsigned char* buf
    cdef Py_ssize_t cap

    def __cinit__(self, list patterns):
        self.patterns = patterns
        # a non-ASCII pattern can never occur in an ASCII text's normal form
        self.ascii_patterns = [p.encode("ascii") if PyUnicode_IS_ASCII(p) else None for p in patterns]
        self.buf = NULL
        self.cap = 0

    def __dealloc__(self):
        free(self.buf)

    cdef Py_ssize_t find(self, str text) except -2:
        cdef Py_ssize_t j, n, w
        cdef bytes pat
        cdef void* grown
        if PyUnicode_IS_ASCII(text):
            n = PyUnicode_GET_LENGTH(text)
            if n + 2 > self.cap:
                grown = realloc(self.buf, n + 2)
                if grown == NULL:
                    raise MemoryError()
                self.buf = <unsigned char*> grown
                self.cap = n + 2
            w = _fill_ascii(<unsigned char*> PyUnicode_DATA(text), n, self.buf)
            for j in range(len(self.ascii_patterns)):
                pat = self.ascii_patterns[j]
                if pat is not None and ar_memmem(self.buf, w, <char*> pat, len(pat)) != NULL:
                    return j
            return -1
        padded = _normalize(text, True)
        for j in range(len(self.patterns)):
            if PyUnicode_Contains(padded, self.patterns[j]):
                return j
        return -1


def match_indices(list texts, list patterns):
    """Index of the first padded pattern found in each text's padded normal form, else -1."""
    cdef _Matcher m = _Matcher(patterns)
    return [m.find(text) for text in texts]


def first_hit(list texts, list patterns, Py_ssize_t limit):
    """Position of the first text (among the first ``limit``) containing any pattern, else -1."""
    cdef Py_ssize_t i, stop = min(limit, len(texts))
    cdef _Matcher m
    if not patterns:
        return -1
    m = _Matcher(patterns)
    for i in range(stop):
        if m.find(texts[i]) >= 0:
            return i
    return -1
