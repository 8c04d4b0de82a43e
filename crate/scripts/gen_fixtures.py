#!/usr/bin/env python3
"""Regenerate the vendored weight-2 newform fixtures with PARI/GP.

Usage: python3 scripts/gen_fixtures.py [--terms 600] [--out crates/core/fixtures]

Writes one JSON file per Galois embedding under levelN/, mirroring the
on-disk cache layout. Coefficients are stored as decimal strings.
"""
import argparse
import json
import os

import cypari2

pari = cypari2.Pari()
pari.set_real_precision(50)
_fmt = pari('(x) -> strprintf("%.25g", x)')


def dec(x):
    if abs(float(x)) < 1e-30:
        return "0"
    s = str(_fmt(x))
    if "." in s and "e" not in s:
        s = s.rstrip("0").rstrip(".")
    return s


def level_records(level, terms):
    mf = pari.mfinit([level, 2], 0)
    forms = pari.mfeigenbasis(mf)
    signs = pari.mfatkineigenvalues(mf, level)
    # order Galois orbits by their trace vectors (a_2, a_3, ...)
    order = sorted(range(len(forms)), key=lambda k: [float(pari.trace(c))
                                                     for c in list(pari.mfcoefs(forms[k], 30))[2:]])
    out = []
    for rank, k in enumerate(order):
        form = forms[k]
        coeffs = pari.mfcoefs(form, terms)
        embeddings = pari.mfembed(form, coeffs)
        if str(pari.type(embeddings[0])) != "t_VEC":
            embeddings = [embeddings]
        label = "%d.2.a.%s" % (level, chr(ord("a") + rank))
        for i, vec in enumerate(embeddings):
            # eigenvalue of W_N on this embedding: f|W_N = eps f
            eps = int(pari.round(pari.real(signs[k][i])))
            an = [[dec(pari.real(vec[n])), dec(pari.imag(vec[n]))] for n in range(1, terms + 1)]
            out.append({
                "level": level,
                "weight": 2,
                "label": label,
                "embedding_index": i + 1,
                "embedding_label": "%s.%d" % (label, i + 1),
                "atkin_lehner_eigenvalue": eps,
                "an": an,
            })
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--terms", type=int, default=600)
    ap.add_argument("--out", default="crates/core/fixtures")
    ap.add_argument("levels", nargs="*", type=int, default=[23, 29, 31, 37])
    args = ap.parse_args()
    for level in args.levels:
        recs = level_records(level, args.terms)
        d = os.path.join(args.out, "level%d" % level)
        os.makedirs(d, exist_ok=True)
        for r in recs:
            with open(os.path.join(d, r["embedding_label"] + ".json"), "w") as fh:
                json.dump(r, fh, indent=1)
                fh.write("\n")
        print(level, len(recs), [r["atkin_lehner_eigenvalue"] for r in recs])


if __name__ == "__main__":
    main()
