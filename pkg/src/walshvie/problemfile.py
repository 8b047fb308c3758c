"""Plain-text problem files.

One ``key = expression`` pair per line; blank lines and ``#`` comments
are ignored.  Required keys: x0, k1, k2, beta, sigma.  Optional keys:
exact, label.  Kernels may use the variables s and t, beta and sigma
use x, and exact uses t and B, where B is the path value at the last
collocation midpoint at or below t.

    label = example-2
    x0    = 1/10
    k1    = -(1/30)^2
    k2    = 1/30
    beta  = x*(1-x^2)
    sigma = 1-x^2
    exact = tanh((1/30)*B + atanh(1/10))
"""

from .expressions import ExpressionError
from .solver import problem_from_sources

REQUIRED_KEYS = ("x0", "k1", "k2", "beta", "sigma")
OPTIONAL_KEYS = ("exact", "label")


def problem_from_text(text, name="problem file"):
    sources = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ValueError(f"{name}: line {lineno}: expected 'key = expression'")
        key, rhs = line.split("=", 1)
        key = key.strip()
        if key not in REQUIRED_KEYS + OPTIONAL_KEYS:
            raise ValueError(f"{name}: line {lineno}: unknown key {key!r}")
        if key in sources:
            raise ValueError(f"{name}: line {lineno}: duplicate key {key!r}")
        expr = rhs.strip()
        if not expr:
            raise ValueError(f"{name}: line {lineno}: empty value for {key!r}")
        sources[key] = expr
        lines[key] = (lineno, 1 + len(raw) - len(raw.split("=", 1)[1].lstrip()))
    missing = [key for key in REQUIRED_KEYS if key not in sources]
    if missing:
        raise ValueError(f"{name}: missing required key(s): {', '.join(missing)}")
    label = sources.pop("label", "problem")
    if "label" in lines:
        del lines["label"]
    try:
        return problem_from_sources(sources, label=label)
    except ExpressionError as exc:
        key = _offending_key(sources, exc)
        if key is not None:
            lineno, col0 = lines[key]
            raise ExpressionError(exc.bare_message, lineno, col0 + exc.col - 1) from None
        raise


def _offending_key(sources, exc):
    """Recover which key failed by recompiling individually."""
    from . import expressions

    variable_sets = {
        "x0": (),
        "k1": ("s", "t"),
        "k2": ("s", "t"),
        "beta": ("x",),
        "sigma": ("x",),
        "exact": ("t", "B"),
    }
    for key, src in sources.items():
        try:
            expressions.compile_expression(src, variable_sets[key])
        except ExpressionError:
            return key
    return None


def parse_problem_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return problem_from_text(fh.read(), name=str(path))


def encode_problem(problem):
    """Render a problem back to the file format.

    Requires the problem to carry its expression sources (all built-in
    and file-parsed problems do).  Re-parsing the output reproduces the
    identical compiled functions, so solver output round-trips exactly.
    """
    if not problem.sources:
        raise ValueError(f"problem {problem.label!r} carries no expression sources")
    lines = [f"label = {problem.label}"]
    for key in REQUIRED_KEYS + ("exact",):
        if key in problem.sources:
            lines.append(f"{key} = {problem.sources[key]}")
    return "\n".join(lines) + "\n"
