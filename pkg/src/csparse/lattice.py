"""Candidate lattices and contextual decoding.

A lattice holds, per token position, the candidate words that may
replace the token (normalizations, back-transliterations, translation
equivalents, and always the original).  Decoding picks one candidate
per position to maximize trigram LM score:

- ``viterbi_decode``: exact search over all combinations via dynamic
  programming on (last two candidate indices).
- ``fragment_decode``: per-language-run Viterbi, each run scored by its
  own LM in isolation.
- ``three_step_decode``: whole-sentence decoding done twice (an
  English-version pass and a Hindi-version pass, each seeing the other
  language through translation equivalents), then a tag-based merge.
  Equivalents only shape context; they never reach the output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .conllu import LangTag
from .embeddings import BilingualLexicon
from .errors import DataError
from .ngram import BOS, EOS, TrigramLM

#: Cap on translation equivalents injected per position.
MAX_EQUIVALENTS = 3


@dataclass(frozen=True)
class Candidate:
    """One candidate word with the local score its producer assigned.

    Local scores order candidates (first-best = highest); the Viterbi
    objective itself is LM score only.
    """

    word: str
    score: float = 0.0


class CandidateLattice:
    def __init__(self, positions: list[list[Candidate]], tags: list[LangTag] | None = None):
        if not positions:
            raise DataError("empty lattice")
        for i, cands in enumerate(positions):
            if not cands:
                raise DataError(f"position {i}: no candidates")
        if tags is not None and len(tags) != len(positions):
            raise DataError(
                f"tag count {len(tags)} does not match {len(positions)} positions"
            )
        self.positions = [list(cands) for cands in positions]
        self.tags = list(tags) if tags is not None else None

    def __len__(self) -> int:
        return len(self.positions)

    def to_json(self) -> str:
        payload = {
            "positions": [
                [{"word": c.word, "score": c.score} for c in cands]
                for cands in self.positions
            ]
        }
        if self.tags is not None:
            payload["tags"] = [str(t) for t in self.tags]
        return json.dumps(payload, indent=2, ensure_ascii=False)


def _dedup(words: list[Candidate]) -> list[Candidate]:
    seen: set[str] = set()
    out = []
    for c in words:
        if c.word not in seen:
            seen.add(c.word)
            out.append(c)
    return out


def with_original(cands: list[Candidate], original: str) -> list[Candidate]:
    """Candidate list with the surface form guaranteed present."""
    return _dedup(list(cands) + [Candidate(original)])


def viterbi_decode(lattice: CandidateLattice, lm: TrigramLM) -> list[str]:
    """Exact argmax of LM score over all candidate combinations.

    State is the pair of candidate indices at the last two positions;
    the EOS term is added before the final selection.  Score ties pick
    the path whose index vector is smallest at the latest position
    where two paths differ (compare index vectors reversed).
    """
    indices = viterbi_decode_indices(lattice, lm)
    return [lattice.positions[i][k].word for i, k in enumerate(indices)]


def viterbi_decode_indices(lattice: CandidateLattice, lm: TrigramLM) -> tuple[int, ...]:
    def word(pos: int, idx: int) -> str:
        return lattice.positions[pos][idx].word

    # state key: indices at the last two positions -> (score, index vector)
    states: dict[tuple, tuple[float, tuple[int, ...]]] = {(): (0.0, ())}
    for pos, cands in enumerate(lattice.positions):
        nxt: dict[tuple, tuple[float, tuple[int, ...]]] = {}
        for key, (score, vec) in states.items():
            u = word(pos - 2, vec[-2]) if len(vec) >= 2 else BOS
            v = word(pos - 1, vec[-1]) if len(vec) >= 1 else BOS
            for k in range(len(cands)):
                new_score = score + lm.cond_logp(u, v, cands[k].word)
                new_vec = vec + (k,)
                new_key = new_vec[-2:]
                cur = nxt.get(new_key)
                if cur is None or _better(new_score, new_vec, cur):
                    nxt[new_key] = (new_score, new_vec)
        states = nxt

    best: tuple[float, tuple[int, ...]] | None = None
    for key, (score, vec) in states.items():
        u = word(len(lattice) - 2, vec[-2]) if len(vec) >= 2 else BOS
        v = word(len(lattice) - 1, vec[-1])
        final = score + lm.cond_logp(u, v, EOS)
        if best is None or _better(final, vec, best):
            best = (final, vec)
    assert best is not None
    return best[1]


def _better(score: float, vec: tuple[int, ...], incumbent: tuple[float, tuple[int, ...]]) -> bool:
    inc_score, inc_vec = incumbent
    if score != inc_score:
        return score > inc_score
    return tuple(reversed(vec)) < tuple(reversed(inc_vec))


def language_runs(tags: list[LangTag]) -> list[tuple[int, int, LangTag]]:
    """Maximal same-tag runs as (start, end-exclusive, tag)."""
    runs = []
    start = 0
    for i in range(1, len(tags) + 1):
        if i == len(tags) or tags[i] != tags[start]:
            runs.append((start, i, tags[start]))
            start = i
    return runs


def fragment_decode(
    words: list[str],
    tags: list[LangTag],
    candidates: list[list[Candidate]],
    lms: dict[LangTag, TrigramLM],
) -> list[str]:
    """Per-run decoding: each same-language run is its own small lattice.

    Runs tagged hi/en are decoded with that language's LM, blind to the
    rest of the sentence; ne/acro/univ tokens pass through.
    """
    _check_aligned(words, tags, candidates)
    out = list(words)
    for start, end, tag in language_runs(tags):
        if tag not in (LangTag.HI, LangTag.EN):
            continue
        lm = lms.get(tag)
        if lm is None:
            raise DataError(f"no language model for tag {tag}")
        sub = CandidateLattice(
            [with_original(candidates[i], words[i]) for i in range(start, end)]
        )
        out[start:end] = viterbi_decode(sub, lm)
    return out


def three_step_decode(
    words: list[str],
    tags: list[LangTag],
    hi_cands: list[list[Candidate]],
    en_cands: list[list[Candidate]],
    lex: BilingualLexicon,
    lm_en: TrigramLM,
    lm_hi: TrigramLM,
) -> list[str]:
    """Cross-lingually informed decoding in three steps.

    Step 1 decodes an English version of the whole sentence: English
    positions offer their normalization candidates, Hindi positions are
    stood in for by translation equivalents of their first-best
    back-transliteration.  Step 2 mirrors this for Hindi, with English
    positions represented by equivalents of the words Step 1 chose.
    Step 3 keeps, per position, the choice from the pass that matches
    the token's own language (original form for ne/acro/univ).
    """
    _check_aligned(words, tags, hi_cands)
    _check_aligned(words, tags, en_cands)
    if lm_en is None or lm_hi is None:
        raise DataError("3-step decoding needs both language models")

    def equivalents(translations: list[str], original: str) -> list[Candidate]:
        cands = [Candidate(w) for w in translations[:MAX_EQUIVALENTS]]
        return with_original(cands, original)

    step1_positions = []
    for i, (w, tag) in enumerate(zip(words, tags)):
        if tag == LangTag.EN:
            step1_positions.append(with_original(en_cands[i], w))
        elif tag == LangTag.HI:
            first_best = hi_cands[i][0].word if hi_cands[i] else w
            step1_positions.append(equivalents(lex.translations(first_best), w))
        else:
            step1_positions.append([Candidate(w)])
    step1 = viterbi_decode(CandidateLattice(step1_positions), lm_en)

    step2_positions = []
    for i, (w, tag) in enumerate(zip(words, tags)):
        if tag == LangTag.HI:
            step2_positions.append(with_original(hi_cands[i], w))
        elif tag == LangTag.EN:
            step2_positions.append(equivalents(lex.reverse_translations(step1[i]), w))
        else:
            step2_positions.append([Candidate(w)])
    step2 = viterbi_decode(CandidateLattice(step2_positions), lm_hi)

    out = []
    for i, tag in enumerate(tags):
        if tag == LangTag.HI:
            out.append(step2[i])
        elif tag == LangTag.EN:
            out.append(step1[i])
        else:
            out.append(words[i])
    return out


def _check_aligned(words, tags, candidates) -> None:
    if not (len(words) == len(tags) == len(candidates)):
        raise DataError(
            f"misaligned inputs: {len(words)} words, {len(tags)} tags, "
            f"{len(candidates)} candidate lists"
        )
    if not words:
        raise DataError("empty sentence")
