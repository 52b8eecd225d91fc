"""Independent reference computations for constants pinned in the C++ tests.

Run with: python3 tests/oracles/derive_values.py
"""
import math
import itertools

import numpy as np
from scipy import stats


class MT19937_64:
    """Straight transcription of the reference 64-bit Mersenne Twister."""

    NN, MM = 312, 156
    MATRIX_A = 0xB5026F5AA96619E9
    UM, LM = 0xFFFFFFFF80000000, 0x7FFFFFFF
    MASK = (1 << 64) - 1

    def __init__(self, seed):
        self.mt = [0] * self.NN
        self.mt[0] = seed & self.MASK
        for i in range(1, self.NN):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & self.MASK
        self.mti = self.NN

    def next(self):
        if self.mti >= self.NN:
            mag = (0, self.MATRIX_A)
            for i in range(self.NN):
                x = (self.mt[i] & self.UM) | (self.mt[(i + 1) % self.NN] & self.LM)
                self.mt[i] = self.mt[(i + self.MM) % self.NN] ^ (x >> 1) ^ mag[x & 1]
            self.mti = 0
        x = self.mt[self.mti]
        self.mti += 1
        x ^= (x >> 29) & 0x5555555555555555
        x ^= (x << 17) & 0x71D67FFFEDA60000
        x ^= (x << 37) & 0xFFF7EEE000000000
        x ^= x >> 43
        return x & self.MASK


def fnv1a64(data):
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & ((1 << 64) - 1)
    return h


def det_embed(text, dim=512):
    tokens = text.lower().split()
    acc = np.zeros(dim)
    for t in tokens:
        rng = MT19937_64(fnv1a64(t.encode()))
        acc += np.array([2.0 * ((rng.next() >> 11) * 2.0 ** -53) - 1.0 for _ in range(dim)])
    acc /= len(tokens)
    return acc / np.linalg.norm(acc)


def meteor(hyp, ref, alpha=0.9, beta=3.0, gamma=0.5):
    h, r = hyp.split(), ref.split()
    best = None
    # exhaustive over injective maps of hyp positions to ref positions or None
    for assign in itertools.product(*[[None] + [j for j in range(len(r)) if r[j] == w] for w in h]):
        used = [a for a in assign if a is not None]
        if len(used) != len(set(used)):
            continue
        m = len(used)
        chunks = 0
        prev = None
        for a in assign:
            if a is not None and not (prev is not None and a == prev + 1):
                chunks += 1
            prev = a
        key = (-m, chunks)
        if best is None or key < best:
            best = key
    m, chunks = -best[0], best[1]
    if m == 0:
        return 0.0, m, chunks
    p, rc = m / len(h), m / len(r)
    f = p * rc / (alpha * p + (1 - alpha) * rc)
    return f * (1 - gamma * (chunks / m) ** beta), m, chunks


if __name__ == "__main__":
    mt = MT19937_64(5489)
    for _ in range(9999):
        mt.next()
    print("mt19937_64 10000th output (std says 9981545732273789042):", mt.next())
    print("pearson (1,2,3),(1,3,2):", repr(stats.pearsonr([1, 2, 3], [1, 3, 2])[0]))
    print("spearman (1,2,3),(1,3,2):", repr(stats.spearmanr([1, 2, 3], [1, 3, 2])[0]))
    print("ranks (1,1,2):", stats.rankdata([1, 1, 2]))
    print("mse (1,2),(2,4):", np.mean((np.array([1, 2]) - np.array([2, 4])) ** 2))
    for hyp, ref in [("the cat sat", "the cat sat"), ("the cat", "cat the"),
                     ("the cat sat on the mat", "on the mat the cat sat"),
                     ("a b c d", "a x c d e")]:
        print("meteor", repr(hyp), repr(ref), "->", repr(meteor(hyp, ref)))
    print("fnv1a64('aa'):", fnv1a64(b"aa"))
    a, b = det_embed("aa bb"), det_embed("cc dd")
    print("cosine(embed('aa bb'), embed('cc dd')):", repr(float(a @ b)))
    print("embed('hello')[:3]:", [repr(float(x)) for x in det_embed("hello")[:3]])


def lev(a, b):
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


TOY5 = [("the cat sat on the mat", "el gato se sentó en la alfombra"),
        ("the dog sat on the mat", "el perro se sentó en la alfombra"),
        ("hello world", "hola mundo"),
        ("a cat was on a mat", "un gato estaba en una alfombra"),
        ("good morning", "buenos días")]


def toy5(query, reference):
    fuzzy = [1 - lev(query, s) / max(len(query), len(s)) for s, _ in TOY5]
    lex = max(range(5), key=lambda i: (fuzzy[i], -i))
    q = det_embed(query)
    sims = [float(q @ det_embed(s)) for s, _ in TOY5]
    emb = max(range(5), key=lambda i: (sims[i], -i))
    return {"lex_id": lex, "lex_fuzzy": fuzzy[lex], "emb_id": emb, "emb_sim": sims[emb],
            "meteor_lex": meteor(TOY5[lex][1], reference)[0],
            "meteor_emb": meteor(TOY5[emb][1], reference)[0]}


if __name__ == "__main__":
    print("toy5 a:", toy5("the cat sat on a mat", "el gato se sentó en una alfombra"))
    print("toy5 b:", toy5("a dog was on a mat", "un perro estaba en una alfombra"))
