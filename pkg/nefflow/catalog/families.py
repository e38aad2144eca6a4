"""
Canonical polynomial variance functions: the six Morris families on R and
the 2n+4 quadratic representatives on R^n.
"""
import dataclasses
from typing import List, Optional, Tuple
import nefflow.common.exceptions as exp
from nefflow.algebra.poly import MultiPoly, PolyMatrix
from nefflow.transform.action import VarianceSpec

CASALIS_TAGS = ("I", "II", "III", "IV", "V")


@dataclasses.dataclass(frozen=True)
class CasalisFamily:
    """
    One representative of the simple quadratic classification. `k` is
    used by the I and IV tags only (0 <= k <= n for I, 1 <= k <= n for IV).
    """

    tag: str
    n: int
    k: Optional[int] = None

    def __post_init__(self):
        if self.tag not in CASALIS_TAGS:
            raise exp.ArgError(
                f'Unknown family tag "{self.tag}". Allowed values are: {", ".join(CASALIS_TAGS)}'
            )
        if self.n < 1:
            raise exp.ArgError(f"Dimension n must be at least 1, got {self.n}")
        if self.tag in ("I", "IV"):
            low = 0 if self.tag == "I" else 1
            if self.k is None or not low <= self.k <= self.n:
                msg = f"""
                Family {self.tag} needs k with {low} <= k <= n={self.n}, got k={self.k}.
                Pass k explicitly, for example CasalisFamily("{self.tag}", {self.n}, {self.n}).
                """
                raise exp.ArgError(msg)
        elif self.k is not None:
            raise exp.ArgError(f"Family {self.tag} does not take a k parameter")

    @property
    def label(self) -> str:
        return f"{self.tag}_{self.k}" if self.k is not None else self.tag


def _positive_orthant(k: int, n: int) -> str:
    parts = []
    if k:
        parts.append("(0,inf)" if k == 1 else f"(0,inf)^{k}")
    if n - k:
        parts.append("R" if n - k == 1 else f"R^{n - k}")
    return " x ".join(parts)


def casalis_representative(family: CasalisFamily) -> VarianceSpec:
    n = family.n
    m = [MultiPoly.variable(n, i) for i in range(n)]
    one = MultiPoly.one(n)
    zero = MultiPoly.zero(n)
    mmT = PolyMatrix.outer(m, m)

    if family.tag == "I":
        k = family.k
        V = PolyMatrix.diagonal(m[:k] + [one] * (n - k))
        domain = _positive_orthant(k, n)
    elif family.tag == "II":
        V = PolyMatrix.diagonal(m) - mmT
        domain = "{m in (0,inf)^n : m_1 + ... + m_n < 1}" if n > 1 else "(0,1)"
    elif family.tag == "III":
        V = mmT + PolyMatrix.diagonal(m)
        domain = _positive_orthant(n, n)
    elif family.tag == "IV":
        k = family.k
        V = mmT + PolyMatrix.diagonal([zero] + m[1:k] + [m[0]] * (n - k))
        domain = _positive_orthant(k, n)
    else:
        last = one
        for mi in m[: n - 1]:
            last = last + mi
        V = mmT + PolyMatrix.diagonal(m[: n - 1] + [last])
        domain = _positive_orthant(n - 1, n)
    return VarianceSpec(n, V, domain, f"V_{family.label}")


def all_casalis(n: int) -> List[CasalisFamily]:
    """The 2n+4 families for dimension n, in catalog order"""
    families = [CasalisFamily("I", n, k) for k in range(n + 1)]
    families += [CasalisFamily("II", n), CasalisFamily("III", n)]
    families += [CasalisFamily("IV", n, k) for k in range(1, n + 1)]
    families.append(CasalisFamily("V", n))
    return families


_MORRIS = (
    ("1", "R", "Normal"),
    ("m1", "(0,inf)", "Poisson"),
    ("m1^2", "(0,inf)", "Gamma"),
    ("m1 - m1^2", "(0,1)", "Binomial"),
    ("m1 + m1^2", "(0,inf)", "NegBinomial"),
    ("m1^2 + 1", "R", "Hyperbolic"),
)


def morris_representatives() -> List[Tuple[VarianceSpec, str]]:
    return [
        (VarianceSpec.from_text([[text]], domain, name), name) for text, domain, name in _MORRIS
    ]


def family_from_label(label: str, n: int) -> CasalisFamily:
    """Parse "I_2", "IV_1", "II", ... into a CasalisFamily"""
    tag, _, k = label.partition("_")
    if k:
        try:
            return CasalisFamily(tag, n, int(k))
        except ValueError as e:
            raise exp.ArgError(f'Cannot read k from family label "{label}"') from e
    return CasalisFamily(tag, n)
