"""Matrix-coefficient polynomials in commuting variables."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .numkernel import as_matrix


def grlex_key(alpha: Sequence[int]) -> tuple:
    return (sum(alpha), tuple(alpha))


@dataclass(frozen=True)
class MatrixPolynomial:
    """``sum_alpha C_alpha z^alpha`` with ``size x size`` coefficients ``C_alpha``.

    Terms are kept in graded lexicographic order so evaluation is reproducible.
    """

    nvars: int
    size: int
    terms: tuple[tuple[tuple[int, ...], np.ndarray], ...]

    @classmethod
    def from_terms(cls, nvars: int, terms: Mapping[Sequence[int], object],
                   size: int | None = None) -> "MatrixPolynomial":
        items = []
        for alpha, coeff in terms.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != nvars or min(alpha, default=0) < 0:
                raise ValueError(f"bad exponent {alpha} for {nvars} variables")
            c = as_matrix(coeff, "coefficient")
            items.append((alpha, c))
        if size is None:
            size = items[0][1].shape[0] if items else 1
        for alpha, c in items:
            if c.shape != (size, size):
                raise ValueError(f"coefficient of {alpha} has shape {c.shape}, expected {size}x{size}")
        items.sort(key=lambda it: grlex_key(it[0]))
        return cls(nvars, size, tuple(items))

    @classmethod
    def constant(cls, nvars: int, value: complex = 1.0) -> "MatrixPolynomial":
        return cls.from_terms(nvars, {(0,) * nvars: [[value]]})

    @property
    def degree(self) -> int:
        return max((sum(a) for a, _ in self.terms), default=0)

    def evaluate_points(self, points: np.ndarray) -> np.ndarray:
        """Values at each row of ``points`` (shape (N, nvars)); returns (N, size, size)."""
        pts = np.asarray(points, dtype=np.complex128).reshape(-1, self.nvars)
        out = np.zeros((len(pts), self.size, self.size), dtype=np.complex128)
        for alpha, c in self.terms:
            mono = np.prod(pts ** np.array(alpha), axis=1)
            out += mono[:, None, None] * c[None, :, :]
        return out

    def evaluate_operators(self, ops: Sequence[np.ndarray]) -> np.ndarray:
        """Substitute commuting matrices for the variables; ``C`` becomes ``C (x) I``."""
        if len(ops) != self.nvars:
            raise ValueError(f"expected {self.nvars} operators, got {len(ops)}")
        m = ops[0].shape[0]
        eye = np.eye(m, dtype=np.complex128)
        powers: list[list[np.ndarray]] = [[eye] for _ in ops]

        def power(j: int, e: int) -> np.ndarray:
            cache = powers[j]
            while len(cache) <= e:
                cache.append(cache[-1] @ ops[j])
            return cache[e]

        out = np.zeros((self.size * m, self.size * m), dtype=np.complex128)
        for alpha, c in self.terms:
            mono = reduce(np.matmul, (power(j, e) for j, e in enumerate(alpha)), eye)
            out += np.kron(c, mono)
        return out

    def to_dict(self) -> dict:
        return {
            "nvars": self.nvars,
            "size": self.size,
            "terms": [
                {"exponent": list(alpha),
                 "coeff": [[[float(v.real), float(v.imag)] for v in row] for row in c]}
                for alpha, c in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "MatrixPolynomial":
        nvars = int(data["nvars"])
        size = int(data.get("size", 1))
        terms = {}
        for term in data["terms"]:
            coeff = term["coeff"]
            if len(coeff) == 2 and all(isinstance(x, (int, float)) for x in coeff):
                mat = [[complex(coeff[0], coeff[1])]]
            else:
                mat = [[complex(re, im) for re, im in row] for row in coeff]
            terms[tuple(term["exponent"])] = mat
        return cls.from_terms(nvars, terms, size)


def random_polynomial(nvars: int, degree: int, rng: np.random.Generator,
                      size: int = 1) -> MatrixPolynomial:
    """Gaussian complex coefficients on every monomial of total degree <= ``degree``."""
    terms = {}
    for alpha in product(range(degree + 1), repeat=nvars):
        if sum(alpha) <= degree:
            terms[alpha] = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    return MatrixPolynomial.from_terms(nvars, terms, size)
