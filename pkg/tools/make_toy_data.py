"""Generate the bundled toy corpus under data/toy/.

A small Hindi-English code-switched world built from sentence templates:
gold trees, language tags, Devanagari back-transliterations and clean
English normalizations, plus the resources the pipeline needs (seeded
embeddings with a planted rotation between the two spaces, a bilingual
lexicon, LM corpora derived from the gold annotations, and synthetic
normalization pairs).  Everything is deterministic per seed, so the
checked-in files can be regenerated byte for byte.

Run from the repository root:

    python3 tools/make_toy_data.py [-o data/toy] [--seed 13]
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from csparse.conllu import LangTag, Sentence, Token, validate_tree, write_conllu_file
from csparse.parser import is_projective

# Devanagari form -> romanized surface variants seen in tweets.
HI_WORDS = {
    "मैं": ["main", "me", "mai"],
    "में": ["mein", "me"],
    "मुझे": ["mujhe", "mje"],
    "तुम": ["tum"],
    "यह": ["yeh", "ye"],
    "वह": ["woh", "vo"],
    "है": ["hai", "h"],
    "हो": ["ho"],
    "था": ["tha"],
    "थे": ["the"],
    "रहा": ["raha", "rha"],
    "हूँ": ["hun", "hu"],
    "करो": ["karo", "kro"],
    "लिया": ["liya"],
    "देखा": ["dekha"],
    "किया": ["kiya", "kia"],
    "बहुत": ["bahut", "bht", "bohot"],
    "आज": ["aaj", "aj"],
    "कल": ["kal", "kl"],
    "अभी": ["abhi"],
    "अच्छा": ["accha", "acha"],
    "बकवास": ["bakwas", "bkws"],
    "मस्त": ["mast"],
    "सब": ["sab"],
    "क्या": ["kya"],
    "यार": ["yaar", "yr"],
    "लोग": ["log"],
    "घर": ["ghar", "ghr"],
    "बात": ["baat"],
    "दिन": ["din"],
    "काम": ["kaam", "kam"],
    "भी": ["bhi"],
    "तो": ["to"],
    "नहीं": ["nahi", "nhi"],
    "ने": ["ne"],
    "का": ["ka"],
    "की": ["ki"],
    "के": ["ke"],
    "से": ["se"],
    "पर": ["par"],
}

# clean English form -> noisy surface variants.
EN_WORDS = {
    "exam": ["exam", "xam"],
    "movie": ["movie", "muvi"],
    "party": ["party", "parti"],
    "weekend": ["weekend", "wknd"],
    "phone": ["phone", "fone"],
    "class": ["class", "clas"],
    "weather": ["weather", "wthr"],
    "friend": ["friend", "frnd"],
    "plan": ["plan"],
    "call": ["call"],
    "time": ["time", "tym"],
    "game": ["game"],
    "match": ["match"],
    "food": ["food", "fud"],
    "tough": ["tough", "tuf"],
    "good": ["good", "gud"],
    "great": ["great", "gr8"],
    "busy": ["busy", "bzy"],
    "happy": ["happy", "hapy"],
    "new": ["new"],
    "boring": ["boring", "borin"],
    "awesome": ["awesome", "awsm"],
    "free": ["free"],
    "watch": ["watch", "wach"],
    "play": ["play"],
}

# hi -> en translation pairs; the first entry per word is canonical and
# drives the synthetic LM corpora, extra entries only enrich the lexicon.
LEXICON = [
    ("मैं", "i"), ("में", "in"), ("मुझे", "me"), ("तुम", "you"),
    ("यह", "this"), ("वह", "that"), ("है", "is"), ("हो", "are"),
    ("था", "was"), ("थे", "were"), ("रहा", "is"), ("हूँ", "am"),
    ("करो", "do"), ("लिया", "took"), ("देखा", "saw"), ("किया", "did"),
    ("बहुत", "very"), ("आज", "today"), ("कल", "tomorrow"), ("अभी", "now"),
    ("अच्छा", "good"), ("बकवास", "bad"), ("मस्त", "awesome"),
    ("सब", "all"), ("क्या", "what"), ("यार", "dude"), ("लोग", "people"),
    ("घर", "home"), ("बात", "talk"), ("दिन", "day"), ("काम", "work"),
    ("भी", "also"), ("तो", "then"), ("नहीं", "not"), ("ने", "by"),
    ("का", "of"), ("की", "of"), ("के", "of"), ("से", "from"), ("पर", "on"),
    # loanwords and content translations for the English side
    ("एग्ज़ाम", "exam"), ("मूवी", "movie"), ("पार्टी", "party"),
    ("वीकेंड", "weekend"), ("फोन", "phone"), ("क्लास", "class"),
    ("मौसम", "weather"), ("दोस्त", "friend"), ("प्लान", "plan"),
    ("कॉल", "call"), ("टाइम", "time"), ("गेम", "game"), ("मैच", "match"),
    ("खाना", "food"), ("मुश्किल", "tough"), ("ग्रेट", "great"),
    ("बिज़ी", "busy"), ("खुश", "happy"), ("नया", "new"),
    ("बोरिंग", "boring"), ("फ्री", "free"), ("देख", "watch"),
    ("खेल", "play"),
]

NAMES = ["raj", "priya", "rahul", "simran"]
PLACES = ["delhi", "mumbai"]
ACROS = ["lol", "omg", "btw"]

EMBED_DIM = 12


def hi_to_en() -> dict:
    """Canonical translation per Devanagari word (first lexicon entry)."""
    out = {}
    for dev, en in LEXICON:
        out.setdefault(dev, en)
    return out


def en_to_hi() -> dict:
    """Canonical Devanagari per English word (first lexicon entry wins)."""
    out = {}
    for dev, en in LEXICON:
        out.setdefault(en, dev)
    return out


# ----------------------------------------------------------------------
# treebank templates

# slot spec: ("hi", devanagari) | ("en", clean form) | ("ne"/"acro"/"univ",
# [choices]) | ("pick", kind, [choices]); heads/deprels/upos are parallel.


def templates():
    name = ("ne", NAMES)
    return [
        # raj exam bht tough tha !
        dict(
            count=4,
            slots=[name, ("pick", "en", ["exam", "class", "match"]),
                   ("hi", "बहुत"), ("pick", "en", ["tough", "boring", "great"]),
                   ("hi", "था"), ("univ", ["!", "?"])],
            upos=["PROPN", "NOUN", "ADV", "ADJ", "AUX", "PUNCT"],
            heads=[4, 4, 4, 0, 4, 4],
            deprels=["vocative", "nsubj", "advmod", "root", "cop", "punct"],
        ),
        # main muvi watch rha hu
        dict(
            count=4,
            slots=[("hi", "मैं"), ("pick", "en", ["movie", "game", "match"]),
                   ("pick", "en", ["watch", "play"]), ("hi", "रहा"), ("hi", "हूँ")],
            upos=["PRON", "NOUN", "VERB", "AUX", "AUX"],
            heads=[3, 3, 0, 3, 3],
            deprels=["nsubj", "obj", "root", "aux", "aux"],
        ),
        # yaar kl exam hai
        dict(
            count=4,
            slots=[("hi", "यार"), ("pick", "hi", ["कल", "आज"]),
                   ("pick", "en", ["exam", "party", "class", "match"]), ("hi", "है")],
            upos=["NOUN", "ADV", "NOUN", "AUX"],
            heads=[3, 3, 0, 3],
            deprels=["discourse", "advmod", "root", "cop"],
        ),
        # sab log party me the
        dict(
            count=4,
            slots=[("hi", "सब"), ("hi", "लोग"),
                   ("pick", "en", ["party", "class", "game"]),
                   ("hi", "में"), ("hi", "थे")],
            upos=["DET", "NOUN", "NOUN", "ADP", "AUX"],
            heads=[2, 3, 0, 3, 3],
            deprels=["det", "nsubj", "root", "case", "cop"],
        ),
        # tum gud frnd ho
        dict(
            count=3,
            slots=[("hi", "तुम"), ("pick", "en", ["good", "great"]),
                   ("en", "friend"), ("hi", "हो")],
            upos=["PRON", "ADJ", "NOUN", "AUX"],
            heads=[3, 3, 0, 3],
            deprels=["nsubj", "amod", "root", "cop"],
        ),
        # aj weather bht acha hai :)
        dict(
            count=4,
            slots=[("hi", "आज"), ("pick", "en", ["weather", "food"]),
                   ("hi", "बहुत"), ("pick", "hi", ["अच्छा", "मस्त"]),
                   ("hi", "है"), ("univ", [":)", "!"])],
            upos=["ADV", "NOUN", "ADV", "ADJ", "AUX", "SYM"],
            heads=[4, 4, 4, 0, 4, 4],
            deprels=["advmod", "nsubj", "advmod", "root", "cop", "discourse"],
        ),
        # lol yeh movie bkws hai
        dict(
            count=4,
            slots=[("acro", ACROS), ("hi", "यह"),
                   ("pick", "en", ["movie", "game", "class"]),
                   ("pick", "hi", ["बकवास", "मस्त"]), ("hi", "है")],
            upos=["INTJ", "DET", "NOUN", "ADJ", "AUX"],
            heads=[4, 3, 4, 0, 4],
            deprels=["discourse", "det", "nsubj", "root", "cop"],
        ),
        # priya ne new fone liya
        dict(
            count=4,
            slots=[name, ("hi", "ने"), ("en", "new"),
                   ("pick", "en", ["phone", "game"]),
                   ("pick", "hi", ["लिया", "देखा"])],
            upos=["PROPN", "ADP", "ADJ", "NOUN", "VERB"],
            heads=[5, 1, 4, 5, 0],
            deprels=["nsubj", "case", "amod", "obj", "root"],
        ),
        # wknd ka kya plan hai
        dict(
            count=3,
            slots=[("pick", "en", ["weekend", "party"]), ("hi", "का"),
                   ("hi", "क्या"), ("en", "plan"), ("hi", "है")],
            upos=["NOUN", "ADP", "DET", "NOUN", "AUX"],
            heads=[4, 1, 4, 0, 4],
            deprels=["nmod", "case", "det", "root", "cop"],
        ),
        # mje kl call kro
        dict(
            count=3,
            slots=[("hi", "मुझे"), ("pick", "hi", ["कल", "आज", "अभी"]),
                   ("en", "call"), ("hi", "करो")],
            upos=["PRON", "ADV", "NOUN", "VERB"],
            heads=[4, 4, 4, 0],
            deprels=["iobj", "advmod", "compound", "root"],
        ),
        # me aj bht bzy hu  (the "me" that must decode to Devanagari main)
        dict(
            count=4,
            slots=[("hi", "मैं"), ("pick", "hi", ["आज", "अभी"]), ("hi", "बहुत"),
                   ("pick", "en", ["busy", "happy", "free"]), ("hi", "हूँ")],
            upos=["PRON", "ADV", "ADV", "ADJ", "AUX"],
            heads=[4, 4, 4, 0, 4],
            deprels=["nsubj", "advmod", "advmod", "root", "cop"],
        ),
        # delhi me weather bkws hai
        dict(
            count=3,
            slots=[("ne", PLACES), ("hi", "में"),
                   ("pick", "en", ["weather", "food"]),
                   ("pick", "hi", ["बकवास", "अच्छा", "मस्त"]), ("hi", "है")],
            upos=["PROPN", "ADP", "NOUN", "ADJ", "AUX"],
            heads=[4, 1, 4, 0, 4],
            deprels=["obl", "case", "nsubj", "root", "cop"],
        ),
        # yeh muvi boring hai !
        dict(
            count=3,
            slots=[("pick", "hi", ["यह", "वह"]),
                   ("pick", "en", ["movie", "game"]),
                   ("pick", "en", ["boring", "awesome"]),
                   ("hi", "है"), ("univ", ["!", "?"])],
            upos=["DET", "NOUN", "ADJ", "AUX", "PUNCT"],
            heads=[2, 3, 0, 3, 3],
            deprels=["det", "nsubj", "root", "cop", "punct"],
        ),
        # main bhi free hu
        dict(
            count=2,
            slots=[("hi", "मैं"), ("hi", "भी"),
                   ("pick", "en", ["free", "busy"]), ("hi", "हूँ")],
            upos=["PRON", "PART", "ADJ", "AUX"],
            heads=[3, 1, 0, 3],
            deprels=["nsubj", "advmod", "root", "cop"],
        ),
        # tym nhi h
        dict(
            count=1,
            slots=[("en", "time"), ("hi", "नहीं"), ("hi", "है")],
            upos=["NOUN", "PART", "AUX"],
            heads=[0, 1, 1],
            deprels=["root", "advmod", "cop"],
        ),
    ]


def realize(template, rng, force_me: bool):
    """One Sentence from a template; surface forms are sampled variants."""
    tokens = []
    for pos, slot in enumerate(template["slots"]):
        kind = slot[0]
        if kind == "pick":
            _, lang_code, choices = slot
            word = choices[rng.integers(len(choices))]
        elif kind in ("ne", "acro", "univ"):
            lang_code = kind
            word = slot[1][rng.integers(len(slot[1]))]
        else:
            lang_code, word = slot
        if lang_code == "hi":
            variants = HI_WORDS[word]
            # the ambiguous surface must actually occur for Devanagari main
            if force_me and word == "मैं":
                surface = "me"
            else:
                surface = variants[rng.integers(len(variants))]
            norm = word
        elif lang_code == "en":
            variants = EN_WORDS[word]
            surface = variants[rng.integers(len(variants))]
            norm = word
        else:
            surface = word
            norm = None
        tokens.append(
            Token(
                index=pos + 1,
                form=surface,
                norm=None if norm == surface else norm,
                lang=LangTag(lang_code),
                upos=template["upos"][pos],
                head=template["heads"][pos],
                deprel=template["deprels"][pos],
            )
        )
    return Sentence(tokens=tokens)


def build_treebank(seed: int) -> list[Sentence]:
    rng = np.random.default_rng(seed)
    sentences = []
    seen = set()
    for template in templates():
        made = 0
        attempts = 0
        while made < template["count"]:
            attempts += 1
            if attempts > 200:
                raise RuntimeError("template exhausted; widen its slots")
            sent = realize(template, rng, force_me=(made % 2 == 0))
            key = tuple(t.form for t in sent)
            if key in seen:
                continue
            seen.add(key)
            sentences.append(sent)
            made += 1
    for i, sent in enumerate(sentences, start=1):
        problems = validate_tree(sent)
        if problems:
            raise RuntimeError(f"sentence {i}: {problems}")
        if not is_projective(sent):
            raise RuntimeError(f"sentence {i} is not projective")
        sent.meta["sent_id"] = f"toy-{i:03d}"
        sent.meta["text"] = " ".join(t.form for t in sent)
    return sentences


# ----------------------------------------------------------------------
# derived resources


def normalization_pairs(treebank, total: int = 200):
    """(hi_pairs, en_pairs) sized to ``total`` together.

    Every surface variant of every inventory word is covered; English
    identity pairs pad the count so the bundle size stays fixed.
    """
    hi_pairs = []
    for dev, variants in HI_WORDS.items():
        for variant in variants:
            hi_pairs.append((variant, dev))
    en_pairs = []
    for clean, variants in EN_WORDS.items():
        for variant in variants:
            en_pairs.append((variant, clean))
        if clean not in variants:
            en_pairs.append((clean, clean))
    pad_words = sorted(EN_WORDS)
    i = 0
    while len(hi_pairs) + len(en_pairs) < total:
        en_pairs.append((pad_words[i % len(pad_words)], pad_words[i % len(pad_words)]))
        i += 1
    if len(hi_pairs) + len(en_pairs) != total:
        raise RuntimeError(
            f"pair inventory {len(hi_pairs) + len(en_pairs)} exceeds {total}; "
            "trim the variant lists"
        )
    return hi_pairs, en_pairs


def lm_corpora(treebank):
    """Monolingual renderings of the gold sentences for the two LMs."""
    to_en = hi_to_en()
    to_hi = en_to_hi()
    en_lines = []
    hi_lines = []
    for sent in treebank:
        en_line = []
        hi_line = []
        for tok in sent:
            gold = tok.norm if tok.norm is not None else tok.form
            if tok.lang == LangTag.HI:
                en_line.append(to_en[gold])
                hi_line.append(gold)
            elif tok.lang == LangTag.EN:
                en_line.append(gold)
                hi_line.append(to_hi[gold])
            else:
                en_line.append(tok.form)
                hi_line.append(tok.form)
        en_lines.append(" ".join(en_line))
        hi_lines.append(" ".join(hi_line))
    return en_lines, hi_lines


def embeddings(seed: int):
    """English vectors plus Hindi vectors rotated by a planted orthogonal map.

    hi_vec = en_vec(translation) @ R, so Procrustes on the lexicon
    recovers R transposed and the projected spaces line up exactly.
    """
    rng = np.random.default_rng(seed + 1)
    en_vocab = sorted({en for _, en in LEXICON} | set(EN_WORDS))
    en_matrix = rng.normal(size=(len(en_vocab), EMBED_DIM))
    en_matrix /= np.linalg.norm(en_matrix, axis=1, keepdims=True)
    en_index = {w: i for i, w in enumerate(en_vocab)}

    rotation, _ = np.linalg.qr(rng.normal(size=(EMBED_DIM, EMBED_DIM)))
    to_en = hi_to_en()
    hi_vocab = sorted(to_en)
    hi_matrix = np.stack(
        [en_matrix[en_index[to_en[dev]]] @ rotation for dev in hi_vocab]
    )
    return (en_vocab, en_matrix), (hi_vocab, hi_matrix)


# ----------------------------------------------------------------------
# writers


def write_vectors(path: Path, vocab, matrix) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(vocab)} {matrix.shape[1]}\n")
        for word, row in zip(vocab, matrix):
            values = " ".join(f"{v:.6f}" for v in row)
            fh.write(f"{word} {values}\n")


def write_tsv(path: Path, rows) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write("\t".join(row) + "\n")


def write_lines(path: Path, lines) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-o", "--out", default="data/toy", help="output directory")
    ap.add_argument("--seed", type=int, default=13)
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    treebank = build_treebank(args.seed)
    write_conllu_file(out / "train.conllu", treebank)
    write_lines(out / "train.txt", [" ".join(t.form for t in s) for s in treebank])

    langid_rows = []
    for sent in treebank:
        langid_rows.extend(f"{t.form}\t{t.lang}" for t in sent)
        langid_rows.append("")
    write_lines(out / "langid.tsv", langid_rows)

    hi_pairs, en_pairs = normalization_pairs(treebank)
    write_tsv(out / "hi_pairs.tsv", hi_pairs)
    write_tsv(out / "en_pairs.tsv", en_pairs)

    en_lines, hi_lines = lm_corpora(treebank)
    write_lines(out / "lm_en.txt", en_lines)
    write_lines(out / "lm_hi.txt", hi_lines)

    write_tsv(out / "lexicon.tsv", LEXICON)
    write_lines(out / "wordlist.txt", sorted(EN_WORDS))

    (en_vocab, en_matrix), (hi_vocab, hi_matrix) = embeddings(args.seed)
    write_vectors(out / "en_vectors.txt", en_vocab, en_matrix)
    write_vectors(out / "hi_vectors.txt", hi_vocab, hi_matrix)

    config = {
        "schema_version": 1,
        "en_embeddings": "en_vectors.txt",
        "hi_embeddings": "hi_vectors.txt",
        "lexicon": "lexicon.tsv",
        "wordlist": "wordlist.txt",
        "beam_width": 5,
        "use_crosslingual": True,
        "decode_mode": "3-step",
        "parse_mode": "stackprop",
        "seed": 0,
    }
    with (out / "config.json").open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(config, fh, indent=2, ensure_ascii=False)
        fh.write("\n")

    tokens = sum(len(s) for s in treebank)
    print(
        f"wrote {len(treebank)} sentences ({tokens} tokens), "
        f"{len(hi_pairs)} hi + {len(en_pairs)} en pairs to {out}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
