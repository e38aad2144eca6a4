"""
JSON group-element and variance files, and TSV tables.

Group element:  {"n": 2, "rows": [["1", "0", "0"], ["0", "1", "0"], ["1/2", "0", "1"]]}
Variance:       {"n": 2, "entries": [["m1", "0"], ["0", "m2"]], "domain": "(0,inf)^2"}
A rational function result adds "denominator": "<poly>".
"""
import json
import sys
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union
import nefflow.common.exceptions as exp
from nefflow.algebra.parser import parse_polynomial
from nefflow.algebra.poly import PolyMatrix
from nefflow.algebra.rational import format_rational, parse_rational
from nefflow.group.element import GroupElement
from nefflow.transform.action import RationalMatrixFunction, VarianceSpec


def _read_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf8") as stream:
            contents = json.load(stream)
    except json.JSONDecodeError as e:
        raise exp.ParseError(f"{path} is not valid JSON: {e.msg}", e.pos) from e
    except OSError as e:
        raise exp.ArgError(f"Cannot read {path}: {e.strerror}") from e
    if not isinstance(contents, dict):
        raise exp.ParseError(f"{path} must contain a JSON object")
    return contents


def _write(text: str, path: Optional[str]):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf8") as stream:
            stream.write(text)


def _require_n(contents: Dict[str, Any], path: str) -> int:
    n = contents.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise exp.ParseError(f'{path}: "n" must be a positive integer, got {n!r}')
    return n


def _require_square(rows: Any, size: int, key: str, path: str):
    if not isinstance(rows, list) or len(rows) != size or any(
        not isinstance(row, list) or len(row) != size for row in rows
    ):
        raise exp.DimensionError(f'{path}: "{key}" must be a {size}x{size} array')


def load_group(path: str) -> GroupElement:
    contents = _read_json(path)
    n = _require_n(contents, path)
    rows = contents.get("rows")
    _require_square(rows, n + 1, "rows", path)
    try:
        parsed = [[parse_rational(str(x)) for x in row] for row in rows]
    except exp.ParseError as e:
        raise exp.ParseError(f"{path}: {e}") from e
    return GroupElement.from_rows(parsed)


def group_to_json(g: GroupElement) -> str:
    rows = [[format_rational(x) for x in row] for row in g.rows]
    return json.dumps({"n": g.n, "rows": rows}, indent=2) + "\n"


def save_group(g: GroupElement, path: Optional[str] = None):
    _write(group_to_json(g), path)


def load_variance_function(path: str) -> RationalMatrixFunction:
    """Variance file, with an optional denominator"""
    contents = _read_json(path)
    n = _require_n(contents, path)
    entries = contents.get("entries")
    _require_square(entries, n, "entries", path)
    numerators = PolyMatrix([[parse_polynomial(str(text), n) for text in row] for row in entries], n)
    denominator = parse_polynomial(str(contents.get("denominator", "1")), n)
    if not numerators.is_symmetric():
        raise exp.ArgError(f"{path}: the variance matrix is not symmetric")
    return RationalMatrixFunction(numerators, denominator).normalized()


def load_variance(path: str) -> VarianceSpec:
    """Variance file that must describe a polynomial variance function"""
    contents = _read_json(path)
    rmf = load_variance_function(path)
    try:
        return rmf.as_variance(domain=str(contents.get("domain", "")), name=str(contents.get("name", "")))
    except exp.NotAnalyticError as e:
        raise exp.ArgError(f"{path}: the variance function is not a polynomial") from e


def variance_to_json(V: Union[VarianceSpec, RationalMatrixFunction], domain: str = "") -> str:
    if isinstance(V, VarianceSpec):
        contents = {"n": V.n, "entries": V.V.to_text(), "domain": V.domain or domain}
        if V.name:
            contents["name"] = V.name
    else:
        contents = {"n": V.n, "entries": V.numerators.to_text(), "domain": domain}
        if not V.is_polynomial:
            contents["denominator"] = V.denominator.to_text()
    return json.dumps(contents, indent=2) + "\n"


def save_variance(V: Union[VarianceSpec, RationalMatrixFunction], path: Optional[str] = None, domain: str = ""):
    _write(variance_to_json(V, domain), path)


def tsv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = ["\t".join(header)]
    lines.extend("\t".join(str(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def save_tsv(header: Sequence[str], rows: Iterable[Sequence[Any]], path: Optional[str] = None):
    _write(tsv_text(header, rows), path)


def exponent_header(n: int, *extra: str) -> List[str]:
    return [f"k_{i + 1}" for i in range(n)] + list(extra)


def parse_float_vector(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as e:
        raise exp.ParseError(f'Cannot read "{text}" as comma-separated numbers') from e


