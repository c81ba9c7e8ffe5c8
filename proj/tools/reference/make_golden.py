#!/usr/bin/env python3
"""Build data/golden/golden.jsonl and gold.tsv from data/golden/sentences.txt.

Each sentence becomes its own document, so its sentence id is "<doc id>/0".
Every sentence gets a 0/1 label for all seven features.
"""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2] / "data" / "golden"
CODES = {
    "A": "aint",
    "H": "habitual_be",
    "N": "negative_concord",
    "C": "double_comparative",
    "D": "perfective_done",
    "M": "multiple_modals",
    "Z": "null_copula",
}


def main():
    section = ""
    docs, gold = [], []
    for line in (ROOT / "sentences.txt").read_text(encoding="utf-8").splitlines():
        if line.startswith("## "):
            section = line[3:].strip()
            continue
        if not line.strip() or line.startswith("#"):
            continue
        labels, text = (part.strip() for part in line.split("|", 1))
        codes = set() if labels == "-" else set(labels)
        unknown = codes - CODES.keys()
        if unknown:
            raise SystemExit(f"unknown label {unknown} in: {line}")
        doc_id = f"g{len(docs) + 1:04d}"
        docs.append({"id": doc_id, "text": text, "meta": {"section": section}})
        for code, name in CODES.items():
            gold.append(f"{doc_id}/0\t{name}\t{int(code in codes)}")

    with open(ROOT / "golden.jsonl", "w", encoding="utf-8") as f:
        for d in docs:
            f.write(json.dumps(d, ensure_ascii=False, sort_keys=True) + "\n")
    with open(ROOT / "gold.tsv", "w", encoding="utf-8") as f:
        f.write("# sentence_id\tfeature\tlabel (generated from sentences.txt)\n")
        f.write("\n".join(gold) + "\n")
    print(f"{len(docs)} sentences, {len(gold)} labels")


if __name__ == "__main__":
    main()
