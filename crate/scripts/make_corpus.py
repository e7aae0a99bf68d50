"""Generate the bundled SMILES corpus.

Molecules are grown from ring templates, linkers and substituents with a
seeded RNG, then passed through `safe convert`; only lines it converts are
kept, deduplicated by their canonical SAFE string.

    python3 scripts/make_corpus.py --safe target/release/safe --out data/corpus.smi
"""

import argparse
import random
import subprocess
import tempfile
from pathlib import Path

# {d}/{e} are ring-closure digits, {} are substituent slots.
RINGS = [
    "c{d}ccc({})cc{d}",
    "c{d}cc({})cc({})c{d}",
    "c{d}ccccc{d}{}",
    "c{d}ccncc{d}{}",
    "c{d}cc({})ncc{d}",
    "c{d}cnc({})nc{d}",
    "c{d}ccsc{d}{}",
    "c{d}ccoc{d}{}",
    "c{d}cn[nH]c{d}{}",
    "c{d}ncc[nH]{d}",
    "C{d}CCC(CC{d}){}",
    "C{d}CCN(CC{d}){}",
    "C{d}CN(CCN{d}{})",
    "C{d}COCCN{d}{}",
    "C{d}CC{d}{}",
    "C{d}CCC{d}{}",
    "C{d}CCCCCC{d}{}",
    "c{d}ccc{e}ccccc{e}c{d}{}",
    "c{d}ccc{e}[nH]ccc{e}c{d}{}",
    "c{d}ccc{e}nc[nH]c{e}c{d}{}",
    "c{d}ccc{e}ncccc{e}c{d}{}",
    "C{d}CC{e}CCC{d}C{e}{}",
    "C{d}CCC{e}(CC{d})CCC{e}{}",
    "O=C{d}CCC(N{d}){}",
    "c{d}cc({})c(=O)[nH]c{d}",
]

LINKERS = ["", "", "C", "CC", "C(=O)N", "NC(=O)", "O", "N", "CO", "OC", "S(=O)(=O)", "C(=O)", "NC", "CN",
           "CCN", "OCC", "C=C", "C#C", "CC(C)N", "[C@@H](C)N", "[C@H](O)C"]

GROUPS = ["C", "CC", "OC", "N", "F", "Cl", "Br", "C(F)(F)F", "C#N", "C(=O)O", "C(=O)N", "S(=O)(=O)N", "OCC",
          "N(C)C", "[N+](=O)[O-]", "C(C)C", "C(C)(C)C", "O", "SC", "C(=O)OC", "NC(C)=O", "CCO", "[2H]", "C=O",
          "CC(=O)[O-]", "CC[NH3+]", "I"]

CHAINS = ["CCCCCCCC", "CCCCCCCCCCCC", "CC(C)CCCC(C)C", "CCCCC=CCCCC", "CCCCCCCCCCCCCCCC", "CC(C)C(C)C(C)C"]


def ring(rng, depth):
    template = rng.choice(RINGS)
    d, e = 2 * depth + 1, 2 * depth + 2
    text = template.replace("{d}", str(d)).replace("{e}", str(e))
    while "{}" in text:
        i = text.index("{}")
        filler = slot(rng, depth)
        if not filler and text[i - 1 : i + 3] == "({})":
            text = text[: i - 1] + text[i + 3 :]
        else:
            text = text[:i] + filler + text[i + 2 :]
    return text


def slot(rng, depth):
    roll = rng.random()
    if roll < 0.35:
        return ""
    if roll < 0.75 or depth >= 3:
        return rng.choice(GROUPS)
    return rng.choice(LINKERS) + ring(rng, depth + 1)


def molecule(rng):
    roll = rng.random()
    if roll < 0.04:
        return rng.choice(CHAINS) + rng.choice(["", "O", "N", "C(=O)O"])
    text = ring(rng, 0)
    if roll < 0.5:
        text = rng.choice(GROUPS) + rng.choice(LINKERS) + text
    return text


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--safe", required=True, help="path to the safe binary")
    ap.add_argument("--out", default="data/corpus.smi")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20231016)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    candidates = []
    seen = set()
    while len(candidates) < args.n * 3:
        smi = molecule(rng)
        if smi not in seen:
            seen.add(smi)
            candidates.append(smi)

    with tempfile.TemporaryDirectory() as tmp:
        src = Path(tmp) / "candidates.smi"
        src.write_text("\n".join(candidates) + "\n")
        out = Path(tmp) / "candidates.safe"
        subprocess.run([args.safe, "convert", str(src), "-o", str(out)], check=True)
        report = (Path(tmp) / "candidates.safe.report.tsv").read_text().splitlines()[1:]

    kept, safes = [], set()
    for row in report:
        smiles, safe, _, _, status = row.split("\t")
        if status == "ok" and safe not in safes:
            safes.add(safe)
            kept.append(smiles)
        if len(kept) == args.n:
            break
    if len(kept) < args.n:
        raise SystemExit(f"only {len(kept)} usable molecules")
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text("\n".join(kept) + "\n")
    print(f"wrote {len(kept)} molecules to {args.out}")


if __name__ == "__main__":
    main()
