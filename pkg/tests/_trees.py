"""Random expression trees shared by the parser and derivative tests."""

import random
from fractions import Fraction

from multinewton.expr import Add, Constant, Div, Func, Mul, Neg, Pow, Sub, X

_BINARY = (Add, Sub, Mul, Div)
_FUNCS = ("sin", "cos", "exp", "ln", "arcsin", "sqrt")


def random_constant(rng):
    # terminating decimals only, so printing is exact
    return Constant(Fraction(rng.randint(0, 400), rng.choice((1, 2, 4, 5, 10, 100))))


def random_tree(rng: random.Random, depth: int = 4, funcs=_FUNCS):
    if depth <= 0 or rng.random() < 0.25:
        return X if rng.random() < 0.6 else random_constant(rng)
    roll = rng.random()
    if roll < 0.45:
        op = rng.choice(_BINARY)
        return op(random_tree(rng, depth - 1, funcs), random_tree(rng, depth - 1, funcs))
    if roll < 0.6:
        return Neg(random_tree(rng, depth - 1, funcs))
    if roll < 0.75:
        return Pow(random_tree(rng, depth - 1, funcs), rng.choice((-2, -1, 2, 3, 4)))
    return Func(rng.choice(funcs), random_tree(rng, depth - 1, funcs))


def trees(count, seed=0, depth=4, funcs=_FUNCS):
    rng = random.Random(seed)
    return [random_tree(rng, depth, funcs) for _ in range(count)]
