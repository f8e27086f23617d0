"""The cubic-root Bernoulli convolution as a linearly represented measure.

beta is the real root of x^3 = 2x^2 - x + 1 (about 1.7549).  The measure
mu of the random series (beta-1) * sum eps_n beta^-n (eps_n fair coin flips)
is carried to the 3-letter symbol space by the affine maps

    S_0(x) = x/beta,  S_1(x) = 1/beta + x/beta^2,  S_2(x) = 1/beta + 1/beta^2 + x/beta^4,

whose images partition [0,1).  Cylinder measures are exactly linear:
nu([w_1..w_n]) = R_{w_1} M_{w_2} ... M_{w_n} C with three explicit 7x7
rational matrices M_i = Mstar_i / 2^shift_i (shifts 1, 2, 4), rational C,
and rows R_i picking coordinates 1, 3, 5 with scales 1, 1/2, 1/8.

Everything measure-valued here is exact: an integer row-chain against the
integer matrices Mstar_i yields nu([w]) = integer / (20 * 2^e).

The module also houses the combinatorial machinery that makes the direction
machinery work on this system: the 19 word-template families, the greedy
right-to-left decomposition of an arbitrary word into template words, the
three integer cones and their stability under the Mstar action, closed-form
powers of Mstar_0 and Mstar_2, limit directions (with closed-form constant
tails), the potential Phi, and the weak-Gibbs ratio diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .core_linalg import Mat, vec_norm_l1

__all__ = [
    "SoficSystem",
    "WWord",
    "WordDecomposition",
    "ConeFlags",
    "beta_root",
    "beta3_system",
    "cylinder_measure",
    "translated_vector",
    "template",
    "wword",
    "decompose_word",
    "is_strict_template_suffix",
    "cone_flags",
    "mstar_power_closed_form",
    "limit_direction",
    "potential_phi",
    "weak_gibbs_ratio",
    "segmentation_for_word",
    "TAIL_DIRECTION_0",
    "TAIL_DIRECTION_2",
    "W_PRIME",
]

# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

_MSTAR0_ROWS = (
    (1, 0, 0, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0, 0),
    (0, 0, 0, 1, 1, 0, 0),
    (0, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 1, 0, 0),
    (0, 1, 0, 0, 0, 0, 0),
)
_MSTAR1_ROWS = (
    (0, 0, 1, 1, 0, 0, 0),
    (0, 0, 0, 0, 0, 1, 0),
    (0, 0, 0, 1, 1, 0, 0),
    (1, 0, 0, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0),
)
_MSTAR2_ROWS = (
    (1, 0, 0, 0, 1, 0, 1),
    (0, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 0, 0, 0, 1),
    (0, 0, 0, 1, 1, 0, 0),
    (0, 0, 0, 0, 1, 0, 0),
    (0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0),
)

SHIFTS = (1, 2, 4)  # M_i = Mstar_i / 2^SHIFTS[i]
RSHIFTS = (0, 1, 3)  # R_i = (unit row picking entry ROW_PICKS[i]) / 2^RSHIFTS[i]
ROW_PICKS = (0, 2, 4)  # 0-based coordinates 1, 3, 5

C20 = (12, 8, 13, 4, 12, 6, 4)  # 20 * C
C_VEC = tuple(Fraction(x, 20) for x in C20)

# closed-form tail directions of the normalized column chains
TAIL_DIRECTION_0 = (0, 1, 1, 0, 1, 1, 1)  # / 5, for an all-0 tail
TAIL_DIRECTION_2 = (1, 0, 1, 1, 0, 0, 0)  # / 3, for an all-2 tail

W_PRIME = ("000", "100", "20", "1010", "011", "11", "211", "210", "002", "0010", "12")


def _act0(x):
    return (x[0], x[2], x[3] + x[4], 0, x[0] + x[6], x[4], x[1])


def _act1(x):
    return (x[2] + x[3], x[5], x[3] + x[4], x[0], x[2], 0, 0)


def _act2(x):
    return (x[0] + x[4] + x[6], 0, x[0] + x[6], x[3] + x[4], x[4], 0, 0)


ACTS = (_act0, _act1, _act2)  # X -> Mstar_i X


def _row0(r):
    return (r[0] + r[4], r[6], r[1], r[2], r[2] + r[5], 0, r[4])


def _row1(r):
    return (r[3], 0, r[0] + r[4], r[0] + r[2], r[2], r[1], 0)


def _row2(r):
    return (r[0] + r[2], 0, 0, r[3], r[0] + r[3] + r[4], 0, r[0] + r[2])


ROW_ACTS = (_row0, _row1, _row2)  # r -> r Mstar_i


def beta_root() -> float:
    """Real root of x^3 - 2x^2 + x - 1 in (1, 2), Newton-refined."""
    x = 1.75
    for _ in range(60):
        f = ((x - 2.0) * x + 1.0) * x - 1.0
        fp = (3.0 * x - 4.0) * x + 1.0
        step = f / fp
        x -= step
        if abs(step) < 1e-16:
            break
    assert abs(((x - 2.0) * x + 1.0) * x - 1.0) <= 1e-14
    return x


@dataclass(frozen=True)
class SoficSystem:
    """The full exact representation plus geometric constants."""

    d: int
    Mstar: tuple[Mat, Mat, Mat]
    M: tuple[Mat, Mat, Mat]
    C: tuple[Fraction, ...]
    R: tuple[tuple[Fraction, ...], ...]
    beta: float
    ratios: tuple[float, float, float]  # contraction ratios 1/b, 1/b^2, 1/b^4
    i_points: tuple[float, ...]
    shifts: tuple[int, int, int]
    rshifts: tuple[int, int, int]

    def validate(self) -> None:
        msum_c = [Fraction(0)] * 7
        for mi in self.M:
            for i in range(7):
                msum_c[i] += sum(Fraction(mi.rows[i][j]) * self.C[j] for j in range(7))
        assert tuple(msum_c) == self.C, "eigen-equation (sum M_i) C = C failed"
        rsum = sum(sum(ri[j] * self.C[j] for j in range(7)) for ri in self.R)
        assert rsum == 1, "row normalization (sum R_i) C = 1 failed"
        assert 1.75 < self.beta < 1.76
        b = self.beta
        assert abs(b * b * b - 2 * b * b + b - 1) <= 1e-14
        assert abs(sum(self.ratios) - 1.0) <= 1e-13  # the S_k images partition [0,1)


def beta3_system() -> SoficSystem:
    b = beta_root()
    mstar = tuple(Mat.exact(rows) for rows in (_MSTAR0_ROWS, _MSTAR1_ROWS, _MSTAR2_ROWS))
    m = tuple(ms.scale(Fraction(1, 2**s)) for ms, s in zip(mstar, SHIFTS))
    rows = []
    for pick, rs in zip(ROW_PICKS, RSHIFTS):
        rows.append(tuple(Fraction(1, 2**rs) if j == pick else Fraction(0) for j in range(7)))
    i_points = (
        0.0,
        1 / b,
        1 / b - 1 / b**2,
        -1 / b**2,
        1 - 1 / b,
        1 - 1 / b**2,
        1 - 1 / b + 1 / b**2,
    )
    sys = SoficSystem(
        d=7,
        Mstar=mstar,
        M=m,
        C=C_VEC,
        R=tuple(rows),
        beta=b,
        ratios=(1 / b, 1 / b**2, 1 / b**4),
        i_points=i_points,
        shifts=SHIFTS,
        rshifts=RSHIFTS,
    )
    sys.validate()
    return sys


def _letters(word: str) -> list[int]:
    out = []
    for ch in word:
        if ch not in "012":
            raise ValueError(f"letter {ch!r} outside alphabet {{0,1,2}}")
        out.append(ord(ch) - 48)
    return out


def cylinder_measure(word: str) -> Fraction:
    """nu([word]) by the exact integer row chain: integer / (20 * 2^e)."""
    w = _letters(word)
    if not w:
        return Fraction(1)
    r = tuple(1 if j == ROW_PICKS[w[0]] else 0 for j in range(7))
    e = RSHIFTS[w[0]]
    for a in w[1:]:
        r = ROW_ACTS[a](r)
        e += SHIFTS[a]
    value = sum(x * c for x, c in zip(r, C20))
    return Fraction(value, 20 * 2**e)


def translated_vector(word: str) -> tuple[Fraction, ...]:
    """M_{w_1} ... M_{w_n} C exactly: entry i is the measure of i_point_i + (1/beta) * interval."""
    w = _letters(word)
    v = C20
    e = 0
    for a in reversed(w):
        v = ACTS[a](v)
        e += SHIFTS[a]
    return tuple(Fraction(x, 20 * 2**e) for x in v)


# ---------------------------------------------------------------------------
# word templates and decomposition
# ---------------------------------------------------------------------------

_PREFIX_A = {
    1: "0001", 2: "1001", 3: "2001", 4: "101", 5: "201",
    6: "011", 7: "111", 8: "211", 9: "21", 10: "2",
}
_PREFIX_B = {
    12: "00", 13: "0010", 14: "1010", 15: "2010",
    16: "110", 17: "210", 18: "20", 19: "1",
}


def template(n: int, i: int) -> str:
    """The i-th template word with run parameter n (i in 1..19)."""
    if i in _PREFIX_A:
        return _PREFIX_A[i] + "0" * (4 * n + 1)
    if i == 11:
        return "1111"
    if i in _PREFIX_B:
        return _PREFIX_B[i] + "2" * (n + 1)
    raise ValueError(f"template index {i} outside 1..19")


def wword(n: int, i: int, j: int, k: int) -> str:
    """Template word extended by 0^j 1^k (j, k in 0..3)."""
    if not (0 <= j <= 3 and 0 <= k <= 3):
        raise ValueError("j and k must lie in 0..3")
    return template(n, i) + "0" * j + "1" * k


@dataclass(frozen=True)
class WWord:
    word: str
    n: int
    i: int
    j: int
    k: int


@dataclass(frozen=True)
class WordDecomposition:
    w0: str
    words: tuple[WWord, ...]

    @property
    def word(self) -> str:
        return self.w0 + "".join(u.word for u in self.words)


def is_strict_template_suffix(w: str) -> bool:
    """Whether w is a strict (proper) suffix of some template word extension.

    The complete shape catalog: 0^p 1^q (q <= 3); sigma 0^m 1^q with sigma in
    {001, 01, 1, 11} and m >= 1; all-ones of length <= 6; 111 0^m 1^q with
    m <= 3; and sigma2 2^p 0^m 1^q with sigma2 in {empty, 0, 10, 010}, p >= 1,
    m <= 3 and q <= 3 throughout.
    """
    if not w:
        return True
    if set(w) == {"1"}:
        return len(w) <= 6
    t = len(w) - len(w.rstrip("1"))
    if t > 3:
        return False
    rest = w[: len(w) - t]
    if rest.endswith("0"):
        z = len(rest) - len(rest.rstrip("0"))
        head = rest[: len(rest) - z]
        if head == "" or head in ("001", "01", "1", "11"):
            return True
        if head == "111" and z <= 3:
            return True
        if z <= 3:
            z2 = len(head) - len(head.rstrip("2"))
            if z2 >= 1 and head[: len(head) - z2] in ("", "0", "10", "010"):
                return True
        return False
    if rest.endswith("2"):
        z2 = len(rest) - len(rest.rstrip("2"))
        return rest[: len(rest) - z2] in ("", "0", "10", "010")
    return False


def _strip_one(w: str) -> tuple[str, WWord] | None:
    """Strip the rightmost template word; None when no strip rule applies."""
    m = len(w)
    t = m - len(w.rstrip("1"))
    if t >= 4:
        k = min(t - 4, 3)
        piece = w[m - 4 - k :]
        return w[: m - 4 - k], WWord(piece, 0, 11, 0, k)
    k = t
    rest = w[: m - k]
    if not rest:
        return None
    if rest.endswith("0"):
        z = len(rest) - len(rest.rstrip("0"))
        if z == len(rest):
            return None  # pure zeros before the ones: strict suffix
        x = rest[-z - 1]
        head = rest[: -z - 1]
        if x == "2":
            i, plen = 10, 1
        elif x == "1":
            if head.endswith("000"):
                i, plen = 1, 4
            elif head.endswith("100"):
                i, plen = 2, 4
            elif head.endswith("200"):
                i, plen = 3, 4
            elif head.endswith("10"):
                i, plen = 4, 3
            elif head.endswith("20"):
                i, plen = 5, 3
            elif head.endswith("01"):
                i, plen = 6, 3
            elif head.endswith("11"):
                i, plen = 7, 3
            elif head.endswith("21"):
                i, plen = 8, 3
            elif head.endswith("2"):
                i, plen = 9, 2
            else:
                return None
        else:
            return None
        n, j = (z - 1) // 4, (z - 1) % 4
        cut = m - k - z - plen
        return w[:cut], WWord(w[cut:], n, i, j, k)
    # rest ends with '2'
    z2 = len(rest) - len(rest.rstrip("2"))
    head = rest[: len(rest) - z2]
    if not head:
        return None
    c1 = head[-1]
    if c1 == "1":
        i, plen = 19, 1
    elif c1 == "0":
        c2 = head[-2] if len(head) >= 2 else ""
        if c2 == "0":
            i, plen = 12, 2
        elif c2 == "2":
            i, plen = 18, 2
        elif c2 == "1":
            c3 = head[-3] if len(head) >= 3 else ""
            if c3 == "0":
                c4 = head[-4] if len(head) >= 4 else ""
                if c4 == "0":
                    i, plen = 13, 4
                elif c4 == "1":
                    i, plen = 14, 4
                elif c4 == "2":
                    i, plen = 15, 4
                else:
                    return None
            elif c3 == "1":
                i, plen = 16, 3
            elif c3 == "2":
                i, plen = 17, 3
            else:
                return None
        else:
            return None
    else:
        return None
    n = z2 - 1
    cut = m - k - z2 - plen
    return w[:cut], WWord(w[cut:], n, i, 0, k)


def decompose_word(word: str, verify: bool = True) -> WordDecomposition:
    """Greedy right-to-left decomposition word = w0 + u_1 ... u_N with each u
    a template word extension and w0 a strict suffix of one (possibly empty)."""
    _letters(word)  # validate alphabet
    w = word
    parts: list[WWord] = []
    while True:
        res = _strip_one(w)
        if res is None:
            break
        w, piece = res
        parts.append(piece)
    parts.reverse()
    dec = WordDecomposition(w, tuple(parts))
    if verify:
        if not is_strict_template_suffix(dec.w0):
            raise AssertionError(f"leftover {dec.w0!r} is not a strict template suffix")
        for u in parts:
            if wword(u.n, u.i, u.j, u.k) != u.word:
                raise AssertionError(f"piece {u.word!r} does not match template {(u.n, u.i, u.j, u.k)}")
        if dec.word != word:
            raise AssertionError("decomposition does not concatenate to the input")
    return dec


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConeFlags:
    in_C: bool
    in_Cprime: bool
    in_Cdoubleprime: bool


_CPRIME_SUPPORTS = (
    frozenset({0, 2, 3, 4}),
    frozenset({0, 1, 2, 3, 4}),
    frozenset({0, 1, 2, 4, 5}),
    frozenset({0, 1, 2, 4, 5, 6}),
)


def cone_flags(X: Sequence[int]) -> ConeFlags:
    x = tuple(X)
    if len(x) != 7 or any(v < 0 for v in x):
        raise ValueError("expected a nonnegative 7-vector")
    supp = frozenset(i for i, v in enumerate(x) if v != 0)
    in_c = (
        supp >= {0, 2, 3} or supp >= {0, 2, 4} or supp >= {0, 3, 4}
    )
    in_cp = supp in _CPRIME_SUPPORTS
    in_cpp = all(v in (0, 1) for v in x) and (
        x[0] * (1 - x[3]) * (1 - x[4]) * x[6] == 0 and (1 - x[0]) * x[3] * x[4] == 0
    )
    if in_cp and not in_c:
        raise AssertionError("cone definitions violated: C' must be inside C")
    return ConeFlags(in_c, in_cp, in_cpp)


# ---------------------------------------------------------------------------
# closed-form powers
# ---------------------------------------------------------------------------


def _mstar_power(gen: int, j: int) -> Mat:
    base = Mat.exact((_MSTAR0_ROWS, _MSTAR1_ROWS, _MSTAR2_ROWS)[gen])
    acc = base
    for _ in range(j - 1):
        acc = acc @ base
    return acc


def mstar_power_closed_form(generator: int, j: int) -> Mat:
    """Exact Mstar_generator^j (generator 0 or 2), with the closed-form
    structure asserted against the multiplication result.

    Mstar_0^j keeps row 1 equal to the first unit row for every j, and for
    j = 4l+1 equals an explicit affine-in-l matrix; the (6,4) entry of that
    form is 0 at l = 0 and 1 for l >= 1.  Mstar_2^j has a single j-dependent
    column, the fifth: (j, 0, j-1, j, 1, 0, 0).
    """
    if generator not in (0, 2):
        raise ValueError("closed forms exist for generators 0 and 2 only")
    if j < 1:
        raise ValueError("j must be >= 1")
    p = _mstar_power(generator, j)
    if generator == 0:
        assert p.rows[0] == (1, 0, 0, 0, 0, 0, 0), "row 1 of Mstar_0^j must stay e1"
        if j % 4 == 1:
            l = j // 4
            e64 = 0 if l == 0 else 1
            expected = (
                (1, 0, 0, 0, 0, 0, 0),
                (l, 0, 1, 0, 0, 0, 0),
                (l, 0, 0, 1, 1, 0, 0),
                (0, 0, 0, 0, 0, 0, 0),
                (l + 1, 0, 0, 0, 0, 0, 1),
                (l, 0, 0, e64, 1, 0, 0),
                (l, 1, 0, 0, 0, 0, 0),
            )
            assert p.rows == expected, f"closed form for Mstar_0^(4l+1) fails at l={l}"
    else:
        col5 = tuple(p.rows[i][4] for i in range(7))
        assert col5 == (j, 0, j - 1, j, 1, 0, 0), f"fifth column of Mstar_2^{j} off"
        for jj in (0, 1, 2, 3, 5, 6):
            expected_col = {
                0: (1, 0, 1, 0, 0, 0, 0),
                3: (0, 0, 0, 1, 0, 0, 0),
                6: (1, 0, 1, 0, 0, 0, 0),
            }.get(jj, (0,) * 7)
            assert tuple(p.rows[i][jj] for i in range(7)) == expected_col
    return p


# ---------------------------------------------------------------------------
# omega views (letter sources)
# ---------------------------------------------------------------------------


class _OmegaView:
    """Uniform access to a one-sided sequence of letters, 1-based."""

    def __init__(self, fn: Callable[[int], int], tail_start: int | None, tail_letter: int | None):
        self._fn = fn
        self.tail_start = tail_start
        self.tail_letter = tail_letter

    def letter(self, k: int) -> int:
        a = self._fn(k)
        a = int(a)
        if a not in (0, 1, 2):
            raise ValueError(f"letter {a} outside alphabet at position {k}")
        return a

    def shifted(self, by: int) -> "_OmegaView":
        ts = None if self.tail_start is None else max(1, self.tail_start - by)
        return _OmegaView(lambda k: self._fn(k + by), ts, self.tail_letter)


def _omega_view(omega) -> _OmegaView:
    if isinstance(omega, _OmegaView):
        return omega
    if isinstance(omega, str):
        w = _letters(omega)

        def fn(k: int) -> int:
            if k > len(w):
                raise ValueError(f"word of length {len(w)} has no letter {k}")
            return w[k - 1]

        return _OmegaView(fn, None, None)
    if isinstance(omega, tuple) and omega and omega[0] == "periodic":
        w = _letters(omega[1])
        if not w:
            raise ValueError("empty periodic word")
        if len(set(w)) == 1:
            return _OmegaView(lambda k: w[0], 1, w[0])
        return _OmegaView(lambda k: w[(k - 1) % len(w)], None, None)
    if isinstance(omega, tuple) and omega and omega[0] == "tail":
        head = _letters(omega[1])
        letter = int(omega[2])

        def fn(k: int) -> int:
            return head[k - 1] if k <= len(head) else letter

        return _OmegaView(fn, len(head) + 1, letter)
    if callable(omega):
        return _OmegaView(omega, None, None)
    raise TypeError("omega must be a word, ('periodic', w), ('tail', head, letter), or callable")


def limit_direction(omega, depth: int):
    """Unit-L1 direction of M_{w_1} ... M_{w_depth} C (exact integer chain).

    For a declared constant tail of 0s or 2s past some position, the
    closed-form tail direction replaces the chain beyond the tail start
    (the direct chain does not converge there: the relevant coefficients
    are unbounded on constant 0/2 tails).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    view = _omega_view(omega)
    if (
        view.tail_start is not None
        and view.tail_letter in (0, 2)
        and depth >= view.tail_start
    ):
        v = TAIL_DIRECTION_0 if view.tail_letter == 0 else TAIL_DIRECTION_2
        for k in range(view.tail_start - 1, 0, -1):
            v = ACTS[view.letter(k)](v)
    else:
        v = C20
        for k in range(depth, 0, -1):
            v = ACTS[view.letter(k)](v)
    s = sum(v)
    assert s > 0, "the direction chain annihilated (impossible from a positive start)"
    return tuple(x / s for x in v)


def potential_phi(omega, depth: int) -> float:
    """Phi(omega) = log || M_{w_1} C_{shift omega, depth} ||, L1 norm."""
    view = _omega_view(omega)
    a = view.letter(1)
    direction = limit_direction(view.shifted(1), depth)
    image = ACTS[a](direction)
    return math.log(sum(image)) - SHIFTS[a] * math.log(2.0)


def _int_log(n: int) -> float:
    """log of a positive integer of arbitrary size."""
    if n <= 0:
        raise ValueError("positive integer required")
    s = max(n.bit_length() - 52, 0)
    return math.log(n >> s if s else n) + s * math.log(2.0)


def _mm7(a, b):
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(7)) for j in range(7)) for i in range(7)
    )


def _mv7(a, v):
    return tuple(sum(a[i][t] * v[t] for t in range(7)) for i in range(7))


def _norm_rows(a):
    s = sum(sum(abs(x) for x in row) for row in a)
    return tuple(tuple(x / s for x in row) for row in a)


_MSTAR_FLOAT = tuple(
    tuple(tuple(float(x) for x in row) for row in rows)
    for rows in (_MSTAR0_ROWS, _MSTAR1_ROWS, _MSTAR2_ROWS)
)
_ID7 = tuple(tuple(1.0 if i == j else 0.0 for j in range(7)) for i in range(7))


def _window_direction_sums(letters: list[int], n: int, depth: int) -> float:
    """Birkhoff sum of Phi over positions 0..n-1 with depth-letter windows.

    Position k needs the direction of the window product over letters
    k+2 .. k+1+depth (1-based); windows are built from per-block suffix and
    prefix products so each position costs one 7x7 multiply.  All stored
    products are normalized — only directions matter.
    """
    B = depth
    total_letters = n + depth + 1

    def block_range(b: int) -> range:
        return range(b * B + 1, min((b + 1) * B, total_letters) + 1)

    def block_suffixes(b: int) -> dict[int, tuple]:
        out = {}
        acc = _ID7
        for t in reversed(block_range(b)):
            acc = _norm_rows(_mm7(_MSTAR_FLOAT[letters[t - 1]], acc))
            out[t] = acc
        return out

    def block_prefixes(b: int) -> dict[int, tuple]:
        out = {}
        acc = _ID7
        for t in block_range(b):
            acc = _norm_rows(_mm7(acc, _MSTAR_FLOAT[letters[t - 1]]))
            out[t] = acc
        return out

    c_float = tuple(float(x) for x in C20)
    suf: dict[int, dict] = {}
    pre: dict[int, dict] = {}
    total = 0.0
    log2 = math.log(2.0)
    for k in range(n):
        a_start = k + 2
        a_end = k + 1 + depth
        b = (a_start - 1) // B
        for bb in (b, b + 1):
            if bb not in suf:
                suf[bb] = block_suffixes(bb)
                pre[bb] = block_prefixes(bb)
        for old in [x for x in suf if x < b]:
            del suf[old], pre[old]
        w = suf[b][a_start]
        if a_end > (b + 1) * B:
            w = _mm7(w, pre[b + 1][a_end])
        v = _mv7(w, c_float)
        nv = sum(v)
        u = _mv7(_MSTAR_FLOAT[letters[k]], v)
        total += math.log(sum(u) / nv) - SHIFTS[letters[k]] * log2
    return total


def weak_gibbs_ratio(omega, n: int, depth: int) -> float:
    """(nu([w_1..w_n]) / exp(Birkhoff sum of Phi))^(1/n).

    The measure is exact; Phi is evaluated with depth-letter direction
    windows.  A value near 1 is the weak-Gibbs signature.
    """
    if n < 1 or depth < 1:
        raise ValueError("n and depth must be >= 1")
    view = _omega_view(omega)
    letters = [view.letter(k) for k in range(1, n + depth + 2)]
    # exact log nu via the integer row chain
    r = tuple(1 if jj == ROW_PICKS[letters[0]] else 0 for jj in range(7))
    e = RSHIFTS[letters[0]]
    for a in letters[1:n]:
        r = ROW_ACTS[a](r)
        e += SHIFTS[a]
    value = sum(x * c for x, c in zip(r, C20))
    log_nu = _int_log(value) - math.log(20.0) - e * math.log(2.0)
    birkhoff = _window_direction_sums(letters, n, depth)
    return math.exp((log_nu - birkhoff) / n)


def segmentation_for_word(word: str, group_size: int) -> list[int]:
    """Segment cut positions: the strict-suffix head plus the first group is
    the first segment, then every group_size template words."""
    if group_size < 1:
        raise ValueError("group_size must be >= 1")
    dec = decompose_word(word)
    cuts = [0]
    pos = len(dec.w0)
    count = 0
    for u in dec.words:
        pos += len(u.word)
        count += 1
        if count == group_size:
            cuts.append(pos)
            count = 0
    if len(cuts) == 1:
        raise ValueError("word too short: no full template group fits")
    return cuts
