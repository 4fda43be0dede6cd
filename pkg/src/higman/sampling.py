"""Random word generators used by the property checks and the CLI audits."""
from __future__ import annotations

import random
from typing import List

from .words import HigmanParams, HWord, Letter, reduce_free, relator, word_inverse, word_mul


def random_word(rng: random.Random, length: int, gens=(0, 1, 2, 3), bound: int = 1) -> HWord:
    letters: List[Letter] = []
    for _ in range(length):
        e = rng.randint(1, bound) * rng.choice((-1, 1))
        letters.append((rng.choice(gens), e))
    return reduce_free(letters)


def random_reduced_word(rng: random.Random, length: int, gens=(0, 1, 2, 3)) -> HWord:
    """Freely reduced word of exactly ``length`` letters a_i^{+-1}."""
    out: List[Letter] = []
    while len(out) < length:
        letter = (rng.choice(gens), rng.choice((-1, 1)))
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            continue
        out.append(letter)
    return reduce_free(out)


def random_relator_product(rng: random.Random, params: HigmanParams, count: int, conj_len: int) -> HWord:
    """Product of ``count`` conjugated relators (or their inverses)."""
    pieces = []
    for _ in range(count):
        g = random_word(rng, rng.randint(0, conj_len))
        r = relator(params, rng.randrange(4))
        if rng.random() < 0.5:
            r = word_inverse(r)
        pieces.append(word_mul(g, r, word_inverse(g)))
    return word_mul(*pieces)


def random_alternating_word(rng: random.Random, blocks: int, f_len: int = 3) -> HWord:
    """Word ``f a1^e f' g a3^e' g' ...`` with F-words f, f', g, g'.

    Each block ``f a_core^e f'`` lies outside F, so by the normal form
    theorem for amalgams such a word is never trivial when ``blocks >= 2``.
    """
    pieces = []
    for b in range(blocks):
        core = 1 if b % 2 == 0 else 3
        left = random_word(rng, rng.randint(0, f_len), gens=(0, 2))
        right = random_word(rng, rng.randint(0, f_len), gens=(0, 2))
        e = rng.randint(1, 3) * rng.choice((-1, 1))
        pieces.append(word_mul(left, ((core, e),), right))
    return word_mul(*pieces)


def word_length(word: HWord) -> int:
    return sum(abs(e) for _, e in word)
