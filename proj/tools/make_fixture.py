"""Regenerate tests/fixtures: short review-like texts in three moods plus
embeddings in the extractor's CSV layout (9 significant digits)."""

import argparse
import json
import random
from pathlib import Path

MOODS = {
    "pos": ["a wonderful film", "great acting", "I loved the story", "beautiful and funny",
            "an excellent cast", "truly amazing music"],
    "neg": ["a terrible plot", "boring and awful", "I hated the ending", "bad dialogue",
            "the worst sequel", "not good at all"],
    "flat": ["the movie runs two hours", "it was filmed in Spain", "the cast includes newcomers",
             "released on a Friday", "the sequel follows the book", "shot in black and white"],
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "fixtures"))
    ap.add_argument("--per-mood", type=int, default=20)
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    centers = {m: [rng.gauss(0, 4) for _ in range(args.dim)] for m in MOODS}
    texts, rows = [], []
    for m, phrases in MOODS.items():
        for i in range(args.per_mood):
            doc = f"{m}{i:02d}"
            text = ". ".join(rng.sample(phrases, 2)).capitalize() + "."
            texts.append({"id": doc, "text": text})
            rows.append([doc] + [c + rng.gauss(0, 1) for c in centers[m]])
    order = list(range(len(rows)))
    rng.shuffle(order)
    with open(out / "texts.jsonl", "w", encoding="utf-8") as f:
        for i in order:
            f.write(json.dumps(texts[i]) + "\n")
    with open(out / "embeddings.csv", "w", encoding="utf-8") as f:
        f.write("id," + ",".join(f"e{j}" for j in range(args.dim)) + "\n")
        for i in order:
            f.write(rows[i][0] + "," + ",".join(f"{v:.9g}" for v in rows[i][1:]) + "\n")


if __name__ == "__main__":
    main()
