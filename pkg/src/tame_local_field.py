"""Tame local fields and the n-th order Hilbert symbol.

An element is modeled as pi^v * omega^u for a fixed uniformizer pi and a
generator omega of the residue units. At a tame place (q = 1 mod n) the
Hilbert symbol only sees the class (v mod n, u mod n) and is given on
exponents by

    ((a, b), (c, d)) -> s*a*c + a*d - b*c  (mod n),  s = (q - 1)/2 mod n,

where s is the exponent of (pi, pi) = (-1)^((q-1)/n).
"""

from itertools import product

import numpy as np
from numpy.typing import NDArray
from pydantic import ValidationError
from sympy import nextprime

from src.exceptions import InvalidParameterError
from src.models import CheckReport, FieldElement, FieldModel, Violation

ClassPair = tuple[int, int]


def make_field(n: int, q: int) -> FieldModel:
    """Build a validated field model.

    Raises:
        InvalidParameterError: If q is not an odd prime power with q = 1 mod n
    """
    try:
        return FieldModel(n=n, q=q)
    except ValidationError as e:
        raise InvalidParameterError(
            "Not a tame field model",
            parameter="q",
            value=q,
            details={"n": n},
            original_error=e,
        ) from e


def tame_primes(n: int, k: int = 3) -> list[int]:
    """First k odd primes q with q = 1 mod n."""
    if n < 2 or k < 1:
        raise InvalidParameterError("n must be >= 2 and k >= 1", parameter="n", value=n)
    primes: list[int] = []
    q = 2
    while len(primes) < k:
        q = int(nextprime(q))
        if q % 2 == 1 and (q - 1) % n == 0:
            primes.append(q)
    return primes


def class_of(m: FieldModel, x: FieldElement) -> ClassPair:
    """Class of x in F^x / F^xn as (v mod n, u mod n)."""
    return (x.v % m.n, x.u % m.n)


def hilbert_classes(m: FieldModel, x: ClassPair, y: ClassPair) -> int:
    """Hilbert symbol exponent on class representatives."""
    a, b = x
    c, d = y
    return (m.pi_pi_exponent * a * c + a * d - b * c) % m.zeta_order


def hilbert(m: FieldModel, x: FieldElement, y: FieldElement) -> int:
    """Tame n-th Hilbert symbol (x, y) as an exponent of zeta in Z/n.

    Args:
        m: Field model
        x: Left argument
        y: Right argument

    Returns:
        s with (x, y) = zeta^s, where zeta has order m.zeta_order
    """
    return hilbert_classes(m, class_of(m, x), class_of(m, y))


def hilbert_array(
    m: FieldModel,
    x: NDArray[np.int64],
    y: NDArray[np.int64],
) -> NDArray[np.int64]:
    """Vectorized Hilbert symbol on arrays whose last axis holds (v, u)."""
    a, b = x[..., 0], x[..., 1]
    c, d = y[..., 0], y[..., 1]
    exponent = (m.pi_pi_exponent * a * c + a * d - b * c) % m.zeta_order
    return np.asarray(exponent, dtype=np.int64)


def is_nth_power(m: FieldModel, x: FieldElement) -> bool:
    """Whether x lies in F^xn, i.e. has the trivial class."""
    return class_of(m, x) == (0, 0)


def check_hilbert_axioms(m: FieldModel) -> CheckReport:
    """Exhaustively verify the Hilbert symbol axioms on F^x / F^xn.

    Covers bilinearity in the first argument, antisymmetry, (x, -x) = 1,
    triviality on n-th powers, nondegeneracy and (pi, pi) = (-1, pi).

    Args:
        m: Field model

    Returns:
        Report over the n^2 classes and their pairs and triples
    """
    n = m.n
    classes = m.all_classes()
    minus_one = class_of(m, m.minus_one())
    pi = m.uniformizer()
    report = CheckReport(name="hilbert_axioms")
    violations: list[Violation] = []
    checked = 0

    def mul(x: ClassPair, y: ClassPair) -> ClassPair:
        return ((x[0] + y[0]) % n, (x[1] + y[1]) % n)

    for x, x2, y in product(classes, classes, classes):
        checked += 1
        lhs = hilbert_classes(m, mul(x, x2), y)
        rhs = (hilbert_classes(m, x, y) + hilbert_classes(m, x2, y)) % n
        if lhs != rhs:
            violations.append(
                Violation(
                    kind="bilinearity", witness=[x, x2, y], message=f"{lhs} != {rhs}"
                )
            )

    for x, y in product(classes, classes):
        checked += 1
        if (hilbert_classes(m, x, y) + hilbert_classes(m, y, x)) % n:
            violations.append(Violation(kind="antisymmetry", witness=[x, y]))
        nth_power = ((x[0] * n) % n, (x[1] * n) % n)
        if hilbert_classes(m, nth_power, y):
            violations.append(Violation(kind="nth_power", witness=[x, y]))

    for x in classes:
        checked += 1
        neg_x = mul(minus_one, x)
        if hilbert_classes(m, x, neg_x):
            violations.append(Violation(kind="x_minus_x", witness=[x]))
        if x != (0, 0) and all(hilbert_classes(m, x, y) == 0 for y in classes):
            violations.append(Violation(kind="nondegeneracy", witness=[x]))

    checked += 1
    if hilbert(m, pi, pi) != hilbert(m, m.minus_one(), pi):
        violations.append(Violation(kind="pi_pi", witness=[class_of(m, pi)]))

    return report.model_copy(update={"checked": checked, "violations": violations})
