#!/usr/bin/env python3
"""Regenerate data/lexicon/ from the PDDL-licensed pattern/TextBlob adjective lexicon.

Usage: make_lexicon.py path/to/en-sentiment.xml data/lexicon

Per-sense entries are averaged per word form. Multi-word forms are skipped.
Entries whose averaged valence and subjectivity are both zero are dropped.
"""
import sys
import xml.etree.ElementTree as ET
from collections import defaultdict
from pathlib import Path

NEGATORS = [
    "not", "no", "never", "n't", "none", "nobody", "nothing", "neither", "nor",
    "nowhere", "without", "hardly", "scarcely", "cannot", "cant", "dont",
    "doesnt", "didnt", "isnt", "wasnt", "arent", "werent", "wont", "wouldnt",
    "shouldnt", "couldnt", "aint", "lack", "lacks", "lacking",
]

# Flat multipliers applied to the immediately following lexicon hit.
INTENSIFIERS = {
    "very": 1.3, "really": 1.3, "extremely": 1.5, "incredibly": 1.5,
    "absolutely": 1.4, "totally": 1.3, "completely": 1.3, "highly": 1.3,
    "so": 1.2, "too": 1.2, "truly": 1.3, "especially": 1.2, "definitely": 1.2,
    "remarkably": 1.3, "exceptionally": 1.4, "particularly": 1.2, "quite": 1.1,
    "most": 1.2, "more": 1.1, "super": 1.3, "utterly": 1.4,
    "slightly": 0.5, "somewhat": 0.7, "barely": 0.5, "fairly": 0.9,
    "mildly": 0.6, "less": 0.7,
    "marginally": 0.6, "rather": 0.9,
}


def main() -> None:
    src, out = Path(sys.argv[1]), Path(sys.argv[2])
    acc = defaultdict(lambda: [0.0, 0.0, 0])
    for w in ET.parse(src).getroot().iter("word"):
        form = w.get("form", "").strip().lower()
        if not form or " " in form or "\t" in form:
            continue
        a = acc[form]
        a[0] += float(w.get("polarity", 0.0))
        a[1] += float(w.get("subjectivity", 0.0))
        a[2] += 1
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "lexicon.tsv", "w", encoding="utf-8") as f:
        f.write("token\tvalence\tsubjectivity_weight\n")
        for form in sorted(acc):
            p, s, n = acc[form]
            v, sw = round(p / n, 4), round(s / n, 4)
            if v == 0.0 and sw == 0.0:
                continue
            v = max(-1.0, min(1.0, v))
            sw = max(0.0, min(1.0, sw))
            f.write(f"{form}\t{v:g}\t{sw:g}\n")
    with open(out / "negators.txt", "w", encoding="utf-8") as f:
        f.write("\n".join(NEGATORS) + "\n")
    with open(out / "intensifiers.tsv", "w", encoding="utf-8") as f:
        f.write("token\tmultiplier\n")
        for tok in sorted(INTENSIFIERS):
            f.write(f"{tok}\t{INTENSIFIERS[tok]:g}\n")


if __name__ == "__main__":
    main()
