"""Rule-based answer extraction from free-form model responses."""

from __future__ import annotations

import re

from clearbench.bench.tasks import QType


class _Ungradable:
    __slots__ = ()

    def __repr__(self):
        return "Ungradable"

    def __bool__(self):
        return False


UNGRADABLE = _Ungradable()

_ANSWER = re.compile(r"answer\s*(?:is)?\s*[:：]", re.IGNORECASE)
_NOISE = re.compile(r"[*`_\"']")
_YESNO = re.compile(r"\b(yes|no|true|false)\b", re.IGNORECASE)
_INT = re.compile(r"(?<![\w.])-?\d+(?![\w.]\d)")
_NUMBER_WORDS = {
    w: i
    for i, w in enumerate(
        "zero one two three four five six seven eight nine ten eleven twelve thirteen "
        "fourteen fifteen sixteen seventeen eighteen nineteen twenty".split()
    )
}
_WORD_NUM = re.compile(r"\b(" + "|".join(_NUMBER_WORDS) + r")\b", re.IGNORECASE)
_OPTION_LEAD = re.compile(r"^\s*(?:option\s*)?\(?([A-Da-d])\b(?:[).:]|\s|$)")
_OPTION_NAMED = re.compile(r"\boption\s*\(?([A-Da-d])\b", re.IGNORECASE)
_OPTION_BARE = re.compile(r"(?<![A-Za-z])([A-D])(?![A-Za-z])")
_ARROWS = [
    ("⟷", "<->"), ("↔", "<->"), ("<-->", "<->"), ("→", "->"), ("⟶", "->"), ("-->", "->"),
    ("←", "<-"), ("⟵", "<-"), ("<--", "<-"), ("\u2014", "-"), ("\u2013", "-"),
]
_TOKEN = re.compile(r"<->|->|<-|-|(?<![A-Za-z])[A-Z](?![A-Za-z])")
_GROUP = re.compile(r"[\{\[\(]([^\{\}\[\]\(\)]*)[\}\]\)]")
_SPLIT = re.compile(r"[,;]|\band\b")
_EMPTY = re.compile(r"\{\s*\}|\[\s*\]|∅|\bnone\b|\bempty\b|\bno\s+\w+", re.IGNORECASE)


def answer_span(response: str) -> str:
    """Text after the last 'Answer:' marker, else the last non-empty line."""
    text = _NOISE.sub("", response or "")
    marks = list(_ANSWER.finditer(text))
    if marks:
        rest = text[marks[-1].end() :]
        for line in rest.splitlines():
            if line.strip():
                return line.strip()
        return ""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    return lines[-1] if lines else ""


def _yes_no(span):
    m = _YESNO.search(span)
    if not m:
        return UNGRADABLE
    return "yes" if m.group(1).lower() in ("yes", "true") else "no"


def _count(span):
    m = _INT.search(span)
    if m:
        return int(m.group())
    m = _WORD_NUM.search(span)
    if m:
        return _NUMBER_WORDS[m.group(1).lower()]
    return UNGRADABLE


def _choice(span):
    for pattern in (_OPTION_LEAD, _OPTION_NAMED):
        m = pattern.search(span)
        if m:
            return m.group(1).upper()
    m = _OPTION_BARE.search(span)
    return m.group(1) if m else UNGRADABLE


def _element(part: str):
    tokens = _TOKEN.findall(part)
    while tokens and not tokens[0].isalpha():
        tokens.pop(0)
    while tokens and not tokens[-1].isalpha():
        tokens.pop()
    out = []
    for t in tokens:
        if not t.isalpha() and out and not out[-1].isalpha():
            continue  # collapse doubled connectors
        out.append(t)
    return "".join(out)


def _structured(span):
    text = span
    for a, b in _ARROWS:
        text = text.replace(a, b)
    text = text.rstrip(". ")
    groups = _GROUP.findall(text) or [text]
    parsed = []
    for grp in groups:
        elems = [e for e in (_element(p) for p in _SPLIT.split(grp)) if e]
        parsed.append(elems)
    if any(parsed):
        return {"groups": [g for g in parsed if g]}
    if _EMPTY.search(text):
        return {"groups": []}
    return UNGRADABLE


def extract_answer(response: str, qtype):
    """Normalised answer for ``qtype`` or UNGRADABLE.

    YesNo / Existence give "yes" or "no", HowMany an int, ChoiceSelection an
    option letter, FindAll / FindOne ``{"groups": [[element, ...], ...]}``
    where each element is a label or a connector-joined label sequence such
    as ``"A->B<-C"``. An explicit empty answer yields no groups.
    """
    qtype = QType(qtype)
    span = answer_span(response)
    if not span:
        return UNGRADABLE
    if qtype in (QType.YN, QType.EX):
        return _yes_no(span)
    if qtype is QType.HM:
        return _count(span)
    if qtype is QType.CS:
        return _choice(span)
    return _structured(span)
