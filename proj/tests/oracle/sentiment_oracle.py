#!/usr/bin/env python3
"""Independent reference implementation of the rule-based sentiment scorer.

Reads the shared valence lexicon and emits a frozen corpus of scored
sentences (tests/fixtures/sentiment_corpus.json). The C++ engine is tested
against these values; regenerate only when the algorithm or lexicon changes:

    python3 tests/oracle/sentiment_oracle.py
"""
import json
import math
import random
import string
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]

B_INCR = 0.293
B_DECR = -0.293
C_INCR = 0.733
N_SCALAR = -0.74
ALPHA = 15.0

NEGATIONS = {
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
    "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
    "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
    "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
    "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
    "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
    "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't", "without",
    "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom", "despite",
}

BOOSTERS = {}
for w in ("absolutely amazingly awfully completely considerably decidedly deeply "
          "enormously entirely especially exceptionally extremely fabulously fully "
          "greatly highly hugely incredibly intensely majorly more most particularly "
          "purely quite really remarkably so substantially thoroughly totally "
          "tremendously unbelievably unusually utterly very").split():
    BOOSTERS[w] = B_INCR
for w in ("almost barely hardly kinda kindof kind-of less little marginally "
          "occasionally partly scarcely slightly somewhat sorta sortof sort-of").split():
    BOOSTERS[w] = B_DECR
BOOSTERS["just enough"] = B_DECR
BOOSTERS["kind of"] = B_DECR
BOOSTERS["sort of"] = B_DECR

IDIOMS = {
    "the shit": 3.0, "the bomb": 3.0, "bad ass": 1.5, "badass": 1.5,
    "bus stop": 0.0, "yeah right": -2.0, "kiss of death": -1.5,
    "to die for": 3.0, "beating heart": 3.1, "broken heart": -2.9,
}


def load_lexicon():
    lex = {}
    path = ROOT / "data" / "lexicons" / "valence.tsv"
    with open(path) as f:
        header = f.readline()
        assert header.startswith("#valence"), header
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            word, val = line.split("\t")
            lex[word.lower()] = float(val)
    return lex


def strip_punct_if_word(token):
    stripped = token.strip(string.punctuation)
    return token if len(stripped) <= 2 else stripped


def words_and_emoticons(text):
    return [strip_punct_if_word(t) for t in text.split()]


def is_all_caps(word):
    return word.isupper() and any(c.isalpha() for c in word)


def has_mixed_caps(words):
    caps = sum(1 for w in words if is_all_caps(w))
    diff = len(words) - caps
    return 0 < diff < len(words)


def is_negation(lowered_word):
    return lowered_word in NEGATIONS or "n't" in lowered_word


def booster_scalar(word, valence, mixed_caps):
    lw = word.lower()
    if lw not in BOOSTERS:
        return 0.0
    scalar = BOOSTERS[lw]
    if valence < 0:
        scalar = -scalar
    if is_all_caps(word) and mixed_caps:
        scalar += C_INCR if valence > 0 else -C_INCR
    return scalar


def negation_window(valence, lowered, i, back):
    if back == 0:
        if is_negation(lowered[i - 1]):
            valence *= N_SCALAR
    elif back == 1:
        if lowered[i - 2] == "never" and lowered[i - 1] in ("so", "this"):
            valence *= 1.25
        elif lowered[i - 2] == "without" and lowered[i - 1] == "doubt":
            pass
        elif is_negation(lowered[i - 2]):
            valence *= N_SCALAR
    elif back == 2:
        if lowered[i - 3] == "never" and (
            lowered[i - 2] in ("so", "this") or lowered[i - 1] in ("so", "this")
        ):
            valence *= 1.25
        elif lowered[i - 3] == "without" and "doubt" in (lowered[i - 2], lowered[i - 1]):
            pass
        elif is_negation(lowered[i - 3]):
            valence *= N_SCALAR
    return valence


def idioms_check(valence, lowered, i):
    seqs = []
    if i >= 1:
        seqs.append(f"{lowered[i-1]} {lowered[i]}")
    if i >= 2:
        seqs.append(f"{lowered[i-2]} {lowered[i-1]} {lowered[i]}")
        seqs.append(f"{lowered[i-2]} {lowered[i-1]}")
    if i >= 3:
        seqs.append(f"{lowered[i-3]} {lowered[i-2]} {lowered[i-1]}")
        seqs.append(f"{lowered[i-3]} {lowered[i-2]}")
    if i + 1 < len(lowered):
        seqs.append(f"{lowered[i]} {lowered[i+1]}")
    if i + 2 < len(lowered):
        seqs.append(f"{lowered[i]} {lowered[i+1]} {lowered[i+2]}")
    for seq in seqs:
        if seq in IDIOMS:
            return IDIOMS[seq]
    if i >= 2:
        bigram = f"{lowered[i-2]} {lowered[i-1]}"
        if bigram in BOOSTERS:
            valence += BOOSTERS[bigram]
    return valence


def least_check(valence, lowered, i):
    if i == 0 or lowered[i - 1] != "least":
        return valence
    if i > 1 and lowered[i - 2] in ("at", "very"):
        return valence
    return valence * N_SCALAR


def but_check(lowered, sentiments):
    if "but" not in lowered:
        return sentiments
    idx = lowered.index("but")
    return [s * 0.5 if i < idx else (s * 1.5 if i > idx else s)
            for i, s in enumerate(sentiments)]


def punct_emphasis(text):
    ep = min(text.count("!"), 4) * 0.292
    qc = text.count("?")
    qp = 0.0 if qc <= 1 else (qc * 0.18 if qc <= 3 else 0.96)
    return ep + qp


def score(text, lexicon):
    words = words_and_emoticons(text)
    if not words:
        return {"compound": 0.0, "positive": 0.0, "negative": 0.0, "neutral": 1.0}
    lowered = [w.lower() for w in words]
    mixed_caps = has_mixed_caps(words)

    sentiments = []
    for i, word in enumerate(words):
        lw = lowered[i]
        if lw in BOOSTERS or (i + 1 < len(words) and lw == "kind" and lowered[i + 1] == "of"):
            sentiments.append(0.0)
            continue
        if lw not in lexicon:
            sentiments.append(0.0)
            continue
        valence = lexicon[lw]
        if lw == "no" and i + 1 < len(words) and lowered[i + 1] in lexicon:
            valence = 0.0
        if (i > 0 and lowered[i - 1] == "no") or (i > 1 and lowered[i - 2] == "no") or (
            i > 2 and lowered[i - 3] == "no" and lowered[i - 1] in ("or", "nor")
        ):
            valence = lexicon[lw] * N_SCALAR
        if is_all_caps(word) and mixed_caps:
            valence += C_INCR if valence > 0 else -C_INCR

        for back in range(3):
            if i <= back:
                continue
            prev = i - back - 1
            if lowered[prev] in lexicon:
                continue
            scalar = booster_scalar(words[prev], valence, mixed_caps)
            if back == 1 and scalar != 0.0:
                scalar *= 0.95
            if back == 2 and scalar != 0.0:
                scalar *= 0.90
            valence += scalar
            valence = negation_window(valence, lowered, i, back)
            if back == 2:
                valence = idioms_check(valence, lowered, i)
        valence = least_check(valence, lowered, i)
        sentiments.append(valence)

    sentiments = but_check(lowered, sentiments)

    total = sum(sentiments)
    punct = punct_emphasis(text)
    if total > 0:
        total += punct
    elif total < 0:
        total -= punct
    compound = max(-1.0, min(1.0, total / math.sqrt(total * total + ALPHA)))

    pos_sum = sum(s + 1.0 for s in sentiments if s > 0)
    neg_sum = sum(s - 1.0 for s in sentiments if s < 0)
    neu_count = sum(1 for s in sentiments if s == 0)
    if pos_sum > abs(neg_sum):
        pos_sum += punct
    elif pos_sum < abs(neg_sum):
        neg_sum -= punct
    norm = pos_sum + abs(neg_sum) + neu_count
    if norm > 0:
        return {
            "compound": compound,
            "positive": abs(pos_sum / norm),
            "negative": abs(neg_sum / norm),
            "neutral": abs(neu_count / norm),
        }
    return {"compound": compound, "positive": 0.0, "negative": 0.0, "neutral": 0.0}


def build_corpus(lexicon):
    sentences = [
        "This plan is great.",
        "This plan is GREAT.",
        "This plan is great!",
        "This plan is great!!!",
        "This plan is not great.",
        "This plan is really great.",
        "This plan is kind of great.",
        "The plan was good, but the execution was terrible.",
        "I don't hate the idea.",
        "At least the map is useful.",
        "This is the least useful item we have.",
        "I never felt so happy about a ranking task.",
        "There is no hope for the matches on the moon.",
        "Are you sure? Are you really sure??",
        "yeah right, that will totally work",
        "The water is essential and the oxygen is critical.",
        "nothing here scores at all",
        "I love this team :)",
        "ugh this is awful :(",
        "WOW this is AMAZING work team!!",
        "I'm slightly worried about the rope.",
        "We are without doubt the best team today.",
        "That was a brilliant, brilliant move.",
        "Honestly I am not sure this helps us win.",
        "The discussion was productive and everyone was engaged.",
    ]
    rng = random.Random(20260826)
    positives = "great good happy love excellent strong helpful brilliant calm lucky".split()
    negatives = "bad terrible sad hate awful weak useless boring angry hopeless".split()
    boosters = "really very extremely somewhat slightly hardly totally quite".split()
    negs = "not never no don't can't".split()
    subjects = ["the plan", "our ranking", "this team", "the discussion", "that idea"]
    tails = ["", "!", "!!", "?", ", right?", " overall."]
    while len(sentences) < 100:
        subject = rng.choice(subjects)
        word = rng.choice(positives + negatives)
        parts = ["I think", subject, "is"]
        if rng.random() < 0.4:
            parts.append(rng.choice(negs))
        if rng.random() < 0.5:
            parts.append(rng.choice(boosters))
        parts.append(word + rng.choice(tails))
        sentences.append(" ".join(parts))
    return [{"text": s, **score(s, lexicon)} for s in sentences]


def main():
    lexicon = load_lexicon()
    corpus = build_corpus(lexicon)
    out = ROOT / "tests" / "fixtures" / "sentiment_corpus.json"
    with open(out, "w") as f:
        json.dump(corpus, f, indent=2)
        f.write("\n")
    print(f"wrote {len(corpus)} scored sentences to {out}")


if __name__ == "__main__":
    main()
