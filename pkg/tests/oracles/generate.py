"""Independent reference computations, frozen into ``frozen.json``.

Nothing here imports the package: every value is recomputed from the
definitions with plain loops, exact fractions or brute force. Rerun with
``python3 tests/oracles/generate.py`` to regenerate.
"""

import json
import math
import random
from fractions import Fraction
from pathlib import Path

OUT = Path(__file__).with_name("frozen.json")


def cosine_distortion_table(seed=0, n=8, dim=5):
    """Seeded unit vectors and d = (1 - cos)/2 computed entry by entry."""
    rng = random.Random(seed)
    vecs = []
    for _ in range(n):
        v = [rng.gauss(0, 1) for _ in range(dim)]
        norm = math.sqrt(sum(c * c for c in v))
        vecs.append([c / norm for c in v])
    table = []
    for a in vecs:
        row = []
        for b in vecs:
            dot = sum(x * y for x, y in zip(a, b))
            na = math.sqrt(sum(x * x for x in a))
            nb = math.sqrt(sum(x * x for x in b))
            row.append(0.5 * (1 - dot / (na * nb)))
        table.append(row)
    for i in range(n):
        table[i][i] = 0.0
    return {"embeddings": vecs, "matrix": table}


def markov_order1_tables(train, size, alpha):
    """Count-and-normalize per previous symbol, smoothed, as exact fractions."""
    counts = {}
    marginal = [0] * size
    for i, s in enumerate(train):
        marginal[s] += 1
        if i >= 1:
            counts.setdefault(train[i - 1], [0] * size)[s] += 1
    a = Fraction(alpha)
    out = {}
    for ctx in range(size):
        row = counts.get(ctx)
        if row is None or sum(row) == 0:
            row = marginal
        tot = sum(row)
        out[str(ctx)] = [float((1 - a) * Fraction(c, tot) + a / size) for c in row]
    return out


def markov_stream_counts(stream, size):
    table = {}
    for i in range(1, len(stream)):
        table.setdefault(str(stream[i - 1]), [0] * size)[stream[i]] += 1
    return table


def shannon_length(p: float) -> int:
    """Smallest L >= 0 with 2^-L <= p, decided in exact rational arithmetic."""
    q = Fraction(p)
    L = 0
    while Fraction(1, 2 ** L) > q:
        L += 1
    return L


def rd_costs(probs, x, s):
    return [-math.log2(p) + s * (0 if y == x else 1) for y, p in enumerate(probs)]


def envelope(seq, tau):
    best = None
    for k in range(0, len(seq) - tau):
        tot = sum(seq[k:k + tau + 1])
        best = tot if best is None else max(best, tot)
    return best


def assumption3(seq, A, c):
    for tau in range(1, len(seq)):
        if not envelope(seq, tau) < A * tau + c:
            return False
    return True


def tau_max_constant(c, margin):
    tau = 1
    while Fraction(c) / tau > Fraction(margin).limit_denominator(10 ** 6):
        tau += 1
    return tau


def codebooks(n=25, seed=3):
    """Random distributions with their Shannon lengths in canonical order."""
    rng = random.Random(seed)
    books = []
    for _ in range(n):
        size = rng.randint(2, 20)
        w = [rng.random() ** 3 for _ in range(size)]
        tot = sum(w)
        p = [x / tot for x in w]
        lengths = [shannon_length(x) for x in p]
        order = sorted(range(size), key=lambda i: (-p[i], i))
        # canonical assignment in sorted order
        code, prev, words = 0, None, {}
        for rank, i in enumerate(order):
            L = lengths[i]
            if prev is not None:
                code = (code + 1) << (L - prev)
            words[i] = format(code, f"0{L}b") if L else ""
            prev = L
        books.append({"probs": p, "lengths": lengths, "codewords": [words[i] for i in range(size)]})
    return books


def main():
    frozen = {}
    frozen["cosine"] = cosine_distortion_table()
    train = [0, 1, 2, 0, 1, 0, 2, 2, 1, 0, 0, 1]
    frozen["markov_order1"] = {"train": train, "size": 4, "alpha": 0.1,
                               "tables": markov_order1_tables(train, 4, 0.1)}
    rng = random.Random(11)
    stream = [rng.randrange(5) for _ in range(100)]
    frozen["markov_stream"] = {"stream": stream, "size": 5, "counts": markov_stream_counts(stream, 5)}
    costs = rd_costs([0.7, 0.2, 0.1], 2, 2.0)
    frozen["rd_example"] = {"costs": costs, "argmin": min(range(3), key=lambda i: (costs[i], i))}
    pattern = [1, 0, 0] * 5
    frozen["envelope_100"] = {"pattern": pattern,
                              "values": {str(t): envelope(pattern, t) for t in range(1, 8)}}
    period10 = ([1] + [0] * 9) * 30
    frozen["assumption3_period10"] = assumption3(period10, 0.1, 2)
    frozen["tau_max"] = {"A0.1": tau_max_constant(2, Fraction(1, 4) - Fraction(1, 10)),
                         "A0.05": tau_max_constant(2, Fraction(1, 4) - Fraction(1, 20)),
                         "margin0.25": tau_max_constant(2, Fraction(1, 4))}
    frozen["codebooks"] = codebooks()
    OUT.write_text(json.dumps(frozen, indent=1))


if __name__ == "__main__":
    main()
