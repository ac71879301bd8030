"""Sentence/token model and CoNLL-U serialization.

Tokens carry, besides the usual CoNLL-U fields, a language tag and an
optional normalized form.  Both travel in the MISC column (``lang=``,
``norm=``) so files stay valid 10-column CoNLL-U.  Multiword-token
ranges and empty nodes are rejected outright: the corpora this package
targets contain none, and failing loudly beats silently skewing counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import ConlluError, DataError

CONLLU_COLUMNS = 10


class LangTag(str, Enum):
    """Token-level language tag."""

    HI = "hi"
    EN = "en"
    NE = "ne"
    ACRO = "acro"
    UNIV = "univ"

    def __str__(self) -> str:
        return self.value


#: Fixed tag order used wherever ties must break deterministically.
TAG_ORDER = (LangTag.HI, LangTag.EN, LangTag.NE, LangTag.ACRO, LangTag.UNIV)


def parse_lang_tag(value: str) -> LangTag:
    try:
        return LangTag(value)
    except ValueError:
        raise DataError(f"unknown language tag {value!r}") from None


@dataclass
class Token:
    """One token of a sentence.

    ``index`` is 1-based; ``head`` is 0 for the artificial root and
    ``None`` while unparsed.  ``norm`` holds the normalized or
    back-transliterated form once the normalization stage has run.
    """

    index: int
    form: str
    norm: str | None = None
    lang: LangTag | None = None
    upos: str | None = None
    head: int | None = None
    deprel: str | None = None

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")
        if self.head is not None:
            if self.head < 0:
                raise ValueError(f"head must be >= 0, got {self.head}")
            if self.head == self.index:
                raise ValueError(f"token {self.index} cannot head itself")

    @property
    def best_form(self) -> str:
        """Normalized form when available, else the surface form."""
        return self.norm if self.norm is not None else self.form


@dataclass
class Sentence:
    """An ordered list of tokens plus ``#`` comment metadata."""

    tokens: list[Token] = field(default_factory=list)
    meta: dict[str, str | None] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i: int) -> Token:
        return self.tokens[i]

    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    def check_indices(self) -> None:
        for pos, tok in enumerate(self.tokens, start=1):
            if tok.index != pos:
                raise DataError(
                    f"token indices not contiguous: expected {pos}, got {tok.index}"
                )

    def is_parsed(self) -> bool:
        return all(t.head is not None for t in self.tokens)


def validate_tree(sentence: Sentence) -> list[str]:
    """Check that the head relation forms a single tree rooted at ROOT.

    Returns a list of human-readable violations; an empty list means the
    sentence is a well-formed dependency tree.  Violations are data, not
    exceptions, so callers can report all problems at once.
    """
    violations: list[str] = []
    n = len(sentence)
    for tok in sentence:
        if tok.head is None:
            violations.append(f"token {tok.index}: head unset")
        elif tok.head > n:
            violations.append(f"token {tok.index}: head {tok.head} out of range 0..{n}")
        if tok.head is not None and tok.deprel is None:
            violations.append(f"token {tok.index}: head set but deprel empty")
    if violations:
        return violations

    roots = [t.index for t in sentence if t.head == 0]
    if not roots:
        violations.append("no root: no token headed by ROOT")
    elif len(roots) > 1:
        violations.append(f"multiple roots: tokens {roots} all headed by ROOT")

    # Walk up from every token; revisiting a node within one walk is a cycle.
    heads = {t.index: t.head for t in sentence}
    for tok in sentence:
        seen = set()
        node = tok.index
        while node != 0:
            if node in seen:
                violations.append(f"cycle involving token {tok.index}")
                break
            seen.add(node)
            node = heads[node]
    return violations


def _parse_misc(value: str, line: int) -> tuple[LangTag | None, str | None]:
    lang = None
    norm = None
    if value == "_":
        return lang, norm
    for part in value.split("|"):
        if part.startswith("lang="):
            lang = parse_lang_tag(part[len("lang="):])
        elif part.startswith("norm="):
            norm = part[len("norm="):]
        else:
            raise ConlluError(f"unsupported MISC entry {part!r}", line)
    return lang, norm


def parse_conllu(text: str) -> list[Sentence]:
    """Parse CoNLL-U text into sentences.

    Comment lines are captured into ``Sentence.meta``; the language tag is
    read from a ``lang=`` entry in MISC.  Raises :class:`ConlluError` with
    the 1-based line number on malformed input.
    """
    sentences: list[Sentence] = []
    tokens: list[Token] = []
    meta: dict[str, str | None] = {}
    saw_content = False

    def flush():
        nonlocal tokens, meta, saw_content
        if saw_content:
            sent = Sentence(tokens=tokens, meta=meta)
            sent.check_indices()
            sentences.append(sent)
        tokens, meta, saw_content = [], {}, False

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line:
            flush()
            continue
        if line.startswith("#"):
            saw_content = True
            body = line[1:].strip()
            if " = " in body:
                key, _, val = body.partition(" = ")
                meta[key] = val
            else:
                meta[body] = None
            continue
        cols = line.split("\t")
        if len(cols) != CONLLU_COLUMNS:
            raise ConlluError(
                f"expected {CONLLU_COLUMNS} tab-separated columns, got {len(cols)}",
                lineno,
            )
        tid, form, _lemma, upos, _xpos, _feats, head, deprel, _deps, misc = cols
        if "-" in tid:
            raise ConlluError(f"multiword token range {tid!r} not supported", lineno)
        if "." in tid:
            raise ConlluError(f"empty node {tid!r} not supported", lineno)
        try:
            index = int(tid)
        except ValueError:
            raise ConlluError(f"bad token id {tid!r}", lineno) from None
        lang, norm = _parse_misc(misc, lineno)
        try:
            token = Token(
                index=index,
                form=form,
                norm=norm,
                lang=lang,
                upos=None if upos == "_" else upos,
                head=None if head == "_" else int(head),
                deprel=None if deprel == "_" else deprel,
            )
        except ValueError as exc:
            raise ConlluError(str(exc), lineno) from None
        tokens.append(token)
        saw_content = True
    flush()
    return sentences


def _misc_field(tok: Token) -> str:
    parts = []
    if tok.lang is not None:
        parts.append(f"lang={tok.lang.value}")
    if tok.norm is not None:
        parts.append(f"norm={tok.norm}")
    return "|".join(parts) if parts else "_"


def write_conllu(sentences: list[Sentence]) -> str:
    """Serialize sentences to CoNLL-U text.

    Every sentence must either be fully parsed (and a valid tree) or have
    all heads unset; mixed states indicate a pipeline bug and are refused.
    """
    out: list[str] = []
    for i, sent in enumerate(sentences):
        sent.check_indices()
        if sent.is_parsed():
            violations = validate_tree(sent)
            if violations:
                raise ValueError(f"sentence {i}: invalid tree: {violations[0]}")
        elif any(t.head is not None for t in sent):
            raise ValueError(f"sentence {i}: heads must be all set or all unset")
        for key, val in sent.meta.items():
            out.append(f"# {key}" if val is None else f"# {key} = {val}")
        for tok in sent:
            out.append(
                "\t".join(
                    [
                        str(tok.index),
                        tok.form,
                        "_",
                        tok.upos if tok.upos is not None else "_",
                        "_",
                        "_",
                        str(tok.head) if tok.head is not None else "_",
                        tok.deprel if tok.deprel is not None else "_",
                        "_",
                        _misc_field(tok),
                    ]
                )
            )
        out.append("")
    return "\n".join(out) + "\n" if out else ""


def read_conllu_file(path) -> list[Sentence]:
    with open(path, encoding="utf-8") as fh:
        return parse_conllu(fh.read())


def write_conllu_file(path, sentences: list[Sentence]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_conllu(sentences))
