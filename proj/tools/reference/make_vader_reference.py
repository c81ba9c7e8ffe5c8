#!/usr/bin/env python3
"""Writes compound scores from the vaderSentiment package for the sentiment
cross-check test.

Two changes are applied to the package before scoring: compound scores are
left unrounded, and the "but" reweighting is applied by position (the package
looks values up with list.index(), which misplaces repeated values).

usage: make_vader_reference.py SENTENCES.txt OUT.tsv
"""
import sys

import vaderSentiment.vaderSentiment as vs


def but_by_position(words, sentiments):
    lowered = [str(w).lower() for w in words]
    if "but" not in lowered:
        return sentiments
    bi = lowered.index("but")
    return [s * 0.5 if k < bi else s * 1.5 if k > bi else s for k, s in enumerate(sentiments)]


def main():
    src, out = sys.argv[1], sys.argv[2]
    vs.round = lambda x, n=None: x
    vs.SentimentIntensityAnalyzer._but_check = staticmethod(but_by_position)
    analyzer = vs.SentimentIntensityAnalyzer()
    with open(src, encoding="utf-8") as f, open(out, "w", encoding="utf-8") as o:
        o.write("# compound\ttext (generated by tools/reference/make_vader_reference.py)\n")
        for line in f:
            text = line.rstrip("\n")
            if not text or text.startswith("#"):
                continue
            o.write("%.17g\t%s\n" % (analyzer.polarity_scores(text)["compound"], text))


if __name__ == "__main__":
    main()
