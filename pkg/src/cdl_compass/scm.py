"""Structural causal models: factorization, equations, sampling, CATE oracle.

A model is a DAG plus one generating equation per endogenous variable and a
noise specification per exogenous source.  Equations live at one of the
parametric knowledge levels:

* ``noise_model`` — additive form ``target = g(parents) + U`` with ``g``
  held as an expression AST;
* ``fully_known`` — an explicit expression for the whole right-hand side,
  which may reference noise symbols ``U_<key>`` directly;
* ``nonparametric`` / ``parametric`` — declared shape only (no expression);
  such models are representable but refuse to sample.

Sampling is ancestral (topological order) and deterministic per seed, with
one independent substream per variable and per noise symbol keyed by name,
so neither dict ordering nor internal parallelism can change the output.

Potential outcomes are modeled as two explicit equations, ``Y0`` and
``Y1``, which may reference a shared noise symbol; consistency then holds
by construction and :func:`oracle_cate` evaluates both surfaces on common
noise draws.

Distribution factorizations (a product of non-negative factors over
variable scopes divided by a normalizer) are supported alongside, with an
exact normalization check whenever every scope variable has a finite
domain, and a consistency check against a DAG's canonical factorization.

File formats: datasets are CSV with a header row and 17-significant-digit
decimal floats; model definitions are text with ``graph:``, ``equations:``
and ``noise:`` sections (see :func:`parse_scm`).
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property
from math import fsum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .expressions import (
    BinOp,
    Call,
    EvaluationError,
    Expression,
    Neg,
    Num,
    Var,
    evaluate_expression,
    format_expression,
    free_variables,
    parse_expression,
)
from .graphs import Dag, GraphFormatError, Pdag, format_graph, parse_graph
from .lattice import ParametricTag


class ScmFormatError(ValueError):
    """Malformed model definition text; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


# ---------------------------------------------------------------------------
# Datasets


class Dataset:
    """Named columns of equal-length real vectors.

    NaN values are rejected at construction and at CSV ingestion; column
    order is preserved as given.
    """

    def __init__(self, columns: Mapping[str, Sequence[float]]):
        if not columns:
            raise ValueError("a dataset needs at least one column")
        self._names: tuple[str, ...] = tuple(columns)
        self._data: dict[str, np.ndarray] = {}
        n = None
        for name in self._names:
            if not name or any(c.isspace() for c in name):
                raise ValueError(f"bad column name {name!r}")
            arr = np.asarray(columns[name], dtype=float)
            if arr.ndim != 1:
                raise ValueError(f"column {name!r} is not a vector")
            if n is None:
                n = arr.shape[0]
            elif arr.shape[0] != n:
                raise ValueError(
                    f"column {name!r} has {arr.shape[0]} rows, expected {n}"
                )
            if np.isnan(arr).any():
                raise ValueError(f"column {name!r} contains NaN")
            self._data[name] = arr
        self._n = int(n if n is not None else 0)

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def n(self) -> int:
        return self._n

    def column(self, name: str) -> np.ndarray:
        try:
            return self._data[name]
        except KeyError:
            raise ValueError(f"unknown column {name!r}") from None

    def to_csv(self, target=None) -> str | None:
        """Write CSV with 17 significant digits; return text if no target given."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self._names)
        cols = [self._data[name] for name in self._names]
        for i in range(self._n):
            writer.writerow([format(col[i], ".17g") for col in cols])
        text = buffer.getvalue()
        if target is None:
            return text
        if hasattr(target, "write"):
            target.write(text)
            return None
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        return None

    @classmethod
    def from_csv(cls, source) -> "Dataset":
        """Read CSV with a header row; rejects ragged rows, non-numbers, NaN."""
        if hasattr(source, "read"):
            text = source.read()
        else:
            with open(source, "r", encoding="utf-8", newline="") as fh:
                text = fh.read()
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty CSV: missing header row")
        header = rows[0]
        if len(set(header)) != len(header):
            raise ValueError("duplicate column names in CSV header")
        columns: dict[str, list[float]] = {name: [] for name in header}
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"row {lineno}: {len(row)} fields, expected {len(header)}"
                )
            for name, cell in zip(header, row):
                try:
                    value = float(cell)
                except ValueError:
                    raise ValueError(f"row {lineno}: non-numeric value {cell!r}") from None
                if math.isnan(value):
                    raise ValueError(f"row {lineno}: NaN is not accepted")
                columns[name].append(value)
        return cls(columns)


# ---------------------------------------------------------------------------
# Distribution factorization


@dataclass(frozen=True)
class Factor:
    """A non-negative function over an ordered variable scope.

    Backed either by an explicit table over finite domains or by an
    expression.  ``domains`` maps each scope variable to its finite value
    tuple, or ``None`` for a real-valued variable (expression factors only).
    """

    scope: tuple[str, ...]
    domains: tuple[tuple[str, tuple[float, ...] | None], ...]
    table: tuple[tuple[tuple[float, ...], float], ...] | None = None
    expr: Expression | None = None

    @classmethod
    def from_table(
        cls,
        scope: Sequence[str],
        domains: Mapping[str, Sequence[float]],
        table: Mapping[tuple[float, ...], float],
    ) -> "Factor":
        scope_t = tuple(scope)
        dom_t = tuple(
            (v, tuple(float(x) for x in domains[v])) for v in scope_t
        )
        tab_t = tuple(
            sorted((tuple(float(x) for x in key), float(val)) for key, val in table.items())
        )
        return cls(scope_t, dom_t, table=tab_t)

    @classmethod
    def from_expression(
        cls,
        scope: Sequence[str],
        expr: Expression | str,
        domains: Mapping[str, Sequence[float] | None] | None = None,
    ) -> "Factor":
        if isinstance(expr, str):
            expr = parse_expression(expr)
        scope_t = tuple(scope)
        domains = domains or {}
        dom_t = tuple(
            (
                v,
                tuple(float(x) for x in domains[v])
                if domains.get(v) is not None
                else None,
            )
            for v in scope_t
        )
        return cls(scope_t, dom_t, expr=expr)

    def __post_init__(self) -> None:
        if not self.scope:
            raise ValueError("a factor scope must be nonempty")
        if len(set(self.scope)) != len(self.scope):
            raise ValueError("factor scope repeats a variable")
        if {v for v, _ in self.domains} != set(self.scope):
            raise ValueError("domains must cover exactly the scope variables")
        if (self.table is None) == (self.expr is None):
            raise ValueError("a factor is backed by exactly one of table or expression")
        if self.table is not None:
            doms = dict(self.domains)
            if any(doms[v] is None for v in self.scope):
                raise ValueError("table factors need a finite domain for every variable")
            expected = set(itertools.product(*(doms[v] for v in self.scope)))
            seen = {key for key, _ in self.table}
            if seen != expected:
                raise ValueError("table must cover the scope's full joint domain exactly")
            for key, value in self.table:
                if value < 0.0:
                    raise ValueError(f"negative factor value {value!r} at {key!r}")

    @cached_property
    def _table_map(self) -> dict[tuple[float, ...], float] | None:
        return dict(self.table) if self.table is not None else None

    def domain_of(self, variable: str) -> tuple[float, ...] | None:
        for v, dom in self.domains:
            if v == variable:
                return dom
        raise ValueError(f"{variable!r} is not in this factor's scope")

    def evaluate(self, assignment: Mapping[str, float]) -> float:
        for v in self.scope:
            if v not in assignment:
                raise ValueError(f"assignment missing scope variable {v!r}")
        for v, dom in self.domains:
            if dom is not None and float(assignment[v]) not in dom:
                raise ValueError(
                    f"value {assignment[v]!r} outside the declared domain of {v!r}"
                )
        if self._table_map is not None:
            key = tuple(float(assignment[v]) for v in self.scope)
            return self._table_map[key]
        value = evaluate_expression(self.expr, {v: assignment[v] for v in self.scope})
        if value < 0.0:
            raise ValueError(f"negative factor value {value!r} encountered")
        return value


@dataclass(frozen=True)
class Factorization:
    """A product of factors divided by a positive normalizer.

    When every variable's domain is finite the total mass is checked at
    construction: the product summed over the joint domain must equal the
    normalizer (verified with compensated summation; tolerance 1e-9).
    """

    factors: tuple[Factor, ...]
    z: float = 1.0

    @classmethod
    def of(cls, factors: Iterable[Factor], z: float = 1.0) -> "Factorization":
        return cls(tuple(factors), float(z))

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValueError("a factorization needs at least one factor")
        if not (self.z > 0.0) or not math.isfinite(self.z):
            raise ValueError(f"normalizer must be a positive real, got {self.z!r}")
        domains: dict[str, tuple[float, ...] | None] = {}
        for f in self.factors:
            for v, dom in f.domains:
                if v in domains and domains[v] != dom:
                    raise ValueError(f"inconsistent domains declared for {v!r}")
                domains[v] = dom
        if all(dom is not None for dom in domains.values()):
            names = sorted(domains)
            total = fsum(
                math.prod(
                    f.evaluate(dict(zip(names, values))) for f in self.factors
                )
                for values in itertools.product(*(domains[v] for v in names))
            )
            if abs(total / self.z - 1.0) > 1e-9:
                raise ValueError(
                    f"factorization does not normalize: mass {total!r} vs z {self.z!r}"
                )

    def variables(self) -> frozenset[str]:
        return frozenset(v for f in self.factors for v in f.scope)


def evaluate_factorization(f: Factorization, assignment: Mapping[str, float]) -> float:
    """Joint value at one assignment: product of all factors divided by z."""
    return math.prod(factor.evaluate(assignment) for factor in f.factors) / f.z


def scopes_consistent_with_dag(f: Factorization, g: Dag) -> bool:
    """Is this the canonical DAG factorization?

    True iff the multiset of factor scopes equals the multiset of
    ``{X} ∪ parents(X)`` over all nodes — one factor per node, each scoped
    on the node and its parents.
    """
    from collections import Counter

    have = Counter(frozenset(factor.scope) for factor in f.factors)
    want = Counter(frozenset({v}) | g.parents(v) for v in g.nodes)
    return have == want


# ---------------------------------------------------------------------------
# Noise specifications


@dataclass(frozen=True)
class NormalNoise:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if not (self.sigma > 0.0):
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.normal(self.mu, self.sigma, size=n)

    def format(self) -> str:
        return f"Normal({_fmt_num(self.mu)}, {_fmt_num(self.sigma)})"


@dataclass(frozen=True)
class UniformNoise:
    low: float = 0.0
    high: float = 1.0

    def __post_init__(self) -> None:
        if not (self.low < self.high):
            raise ValueError(f"need low < high, got [{self.low!r}, {self.high!r}]")

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=n)

    def format(self) -> str:
        return f"Uniform({_fmt_num(self.low)}, {_fmt_num(self.high)})"


NoiseSpec = NormalNoise | UniformNoise


def _fmt_num(x: float) -> str:
    return repr(float(x))


def noise_symbol(key: str) -> str:
    return f"U_{key}"


# ---------------------------------------------------------------------------
# Structural equations and models


@dataclass(frozen=True)
class StructuralEquation:
    """One variable's generating rule at a stated parametric level.

    ``noise_model``: ``expr`` is g over the parents; the sampled value is
    ``g(parents) + U_<target>``.  ``fully_known``: ``expr`` is the entire
    right-hand side and may reference declared noise symbols ``U_<key>``.
    ``nonparametric``/``parametric``: shape only, ``expr`` must be None.
    """

    target: str
    parents: tuple[str, ...]
    level: ParametricTag
    expr: Expression | None = None

    def __post_init__(self) -> None:
        if not self.target:
            raise ValueError("equation target must be a variable name")
        if len(set(self.parents)) != len(self.parents):
            raise ValueError(f"equation for {self.target!r} repeats a parent")
        needs_expr = self.level in (ParametricTag.NOISE_MODEL, ParametricTag.FULLY_KNOWN)
        if needs_expr and self.expr is None:
            raise ValueError(
                f"{self.level.label} equation for {self.target!r} needs an expression"
            )
        if not needs_expr and self.expr is not None:
            raise ValueError(
                f"{self.level.label} equation for {self.target!r} cannot carry an expression"
            )


class Scm:
    """A DAG plus structural equations and noise specifications.

    ``equations`` maps endogenous targets to their rules; any node without
    an equation is exogenous and must have a noise spec under its own name.
    ``noise`` maps keys to distributions; key ``k`` backs the symbol
    ``U_k``.  Keys need not be node names — a free-standing symbol shared by
    several fully-known equations models common noise (the potential-outcome
    construction relies on this).
    """

    def __init__(
        self,
        graph: Dag,
        equations: Iterable[StructuralEquation] = (),
        noise: Mapping[str, NoiseSpec] | None = None,
    ):
        self.graph = graph
        eq_map: dict[str, StructuralEquation] = {}
        for eq in equations:
            if eq.target in eq_map:
                raise ValueError(f"duplicate equation for {eq.target!r}")
            eq_map[eq.target] = eq
        self.equations: dict[str, StructuralEquation] = dict(
            sorted(eq_map.items())
        )
        self.noise: dict[str, NoiseSpec] = dict(sorted((noise or {}).items()))

        symbols = {noise_symbol(k) for k in self.noise}
        for target, eq in self.equations.items():
            if target not in graph.nodes:
                raise ValueError(f"equation target {target!r} is not a graph node")
            graph_parents = tuple(sorted(graph.parents(target)))
            if tuple(sorted(eq.parents)) != graph_parents:
                raise ValueError(
                    f"equation for {target!r} declares parents {sorted(eq.parents)} "
                    f"but the graph says {list(graph_parents)}"
                )
            if eq.expr is None:
                continue
            refs = free_variables(eq.expr)
            if eq.level is ParametricTag.NOISE_MODEL:
                allowed = set(eq.parents)
                if target not in self.noise:
                    raise ValueError(
                        f"noise-model equation for {target!r} needs a noise spec "
                        f"for U_{target}"
                    )
            else:
                allowed = set(eq.parents) | symbols
            unknown = refs - allowed
            if unknown:
                raise ValueError(
                    f"equation for {target!r} references undeclared symbols "
                    f"{sorted(unknown)}"
                )
        for node in graph.nodes:
            if node not in self.equations and node not in self.noise:
                raise ValueError(
                    f"exogenous variable {node!r} has no noise spec and no equation"
                )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Scm):
            return NotImplemented
        return (
            self.graph == other.graph
            and self.equations == other.equations
            and self.noise == other.noise
        )

    def sampleable(self) -> bool:
        return all(
            eq.level in (ParametricTag.NOISE_MODEL, ParametricTag.FULLY_KNOWN)
            for eq in self.equations.values()
        )


def _substream(seed: int, label: str) -> np.random.Generator:
    """An independent, platform-stable generator keyed by seed and name."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 8], "little") for i in range(0, 16, 8)]
    return np.random.default_rng(np.random.SeedSequence([int(seed), *words]))


def _eval_array(e: Expression, env: Mapping[str, np.ndarray | float], n: int) -> np.ndarray:
    """Vectorized expression evaluation with the scalar evaluator's error rules."""
    if isinstance(e, Num):
        return np.full(n, e.value)
    if isinstance(e, Var):
        try:
            value = env[e.name]
        except KeyError:
            raise EvaluationError(f"unbound identifier {e.name!r}") from None
        return np.broadcast_to(np.asarray(value, dtype=float), (n,))
    if isinstance(e, Neg):
        return -_eval_array(e.operand, env, n)
    if isinstance(e, Call):
        arg = _eval_array(e.arg, env, n)
        if e.func == "exp":
            with np.errstate(over="ignore"):
                out = np.exp(arg)
            if np.isinf(out).any():
                raise EvaluationError("overflow in exp")
            return out
        if e.func == "log":
            if (arg <= 0.0).any():
                raise EvaluationError("log of non-positive value")
            return np.log(arg)
        return np.sin(arg)
    if isinstance(e, BinOp):
        left = _eval_array(e.left, env, n)
        right = _eval_array(e.right, env, n)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if e.op == "/":
            if (right == 0.0).any():
                raise EvaluationError("division by zero")
            return left / right
        with np.errstate(invalid="ignore", over="ignore"):
            out = np.power(left, right)
        if np.isnan(out).any() or np.isinf(out).any():
            raise EvaluationError("invalid power")
        return out
    raise TypeError(f"not an expression node: {e!r}")


def sample(m: Scm, n: int, seed: int = 0) -> Dataset:
    """Draw ``n`` joint observations by ancestral sampling.

    Deterministic per seed: each noise symbol gets its own substream keyed
    by name, so the same seed reproduces the same dataset byte for byte
    regardless of declaration order.  Columns come out in sorted name
    order.  Models holding any equation below the noise-model level cannot
    be sampled.
    """
    if n < 0:
        raise ValueError(f"sample size must be non-negative, got {n}")
    for target, eq in m.equations.items():
        if eq.level not in (ParametricTag.NOISE_MODEL, ParametricTag.FULLY_KNOWN):
            raise ValueError(
                f"cannot sample: equation for {target!r} is at the "
                f"{eq.level.label} level"
            )
    draws = {
        noise_symbol(key): spec.draw(_substream(seed, f"noise:{key}"), n)
        for key, spec in m.noise.items()
    }
    values: dict[str, np.ndarray] = {}
    for node in m.graph.topological_order():
        eq = m.equations.get(node)
        if eq is None:
            values[node] = draws[noise_symbol(node)]
        elif eq.level is ParametricTag.NOISE_MODEL:
            env = {p: values[p] for p in eq.parents}
            values[node] = _eval_array(eq.expr, env, n) + draws[noise_symbol(node)]
        else:
            env = {p: values[p] for p in eq.parents}
            env.update(draws)
            values[node] = _eval_array(eq.expr, env, n)
    return Dataset({name: values[name] for name in sorted(values)})


# ---------------------------------------------------------------------------
# Treatment-effect surfaces


def ihdp_surfaces(
    x: Sequence[float],
    m: Sequence[float],
    beta: Sequence[float],
    omega: float,
) -> tuple[float, float]:
    """Semi-synthetic benchmark response surfaces for one covariate vector.

    Control: ``mu0 = exp((x + m) . beta)``; treated: ``mu1 = x . beta + omega``.
    """
    xv = np.asarray(x, dtype=float)
    mv = np.asarray(m, dtype=float)
    bv = np.asarray(beta, dtype=float)
    if xv.shape != mv.shape or xv.shape != bv.shape or xv.ndim != 1:
        raise ValueError("x, m, and beta must be vectors of one common length")
    mu0 = float(np.exp((xv + mv) @ bv))
    mu1 = float(xv @ bv + omega)
    return mu0, mu1


def oracle_cate(
    m: Scm,
    x: Mapping[str, float],
    n_mc: int = 10000,
    seed: int = 0,
) -> float:
    """Ground-truth conditional average treatment effect at one covariate point.

    The model must carry explicit potential-outcome equations named ``Y0``
    and ``Y1``.  Both surfaces are evaluated on shared noise draws per
    replicate and the mean difference ``E[Y1 - Y0 | X = x]`` is returned.
    When neither equation involves noise, the value is computed exactly in
    one evaluation and ``n_mc`` is ignored.
    """
    outcome: dict[str, StructuralEquation] = {}
    for name in ("Y0", "Y1"):
        eq = m.equations.get(name)
        if eq is None:
            raise ValueError(f"missing outcome equation {name!r}")
        if eq.level not in (ParametricTag.NOISE_MODEL, ParametricTag.FULLY_KNOWN):
            raise ValueError(
                f"outcome equation {name!r} is at the {eq.level.label} level; "
                "an explicit or additive-noise form is required"
            )
        outcome[name] = eq

    symbols = {noise_symbol(k): k for k in m.noise}
    needed_keys: set[str] = set()
    for name, eq in outcome.items():
        refs = free_variables(eq.expr)
        covariates = refs - set(symbols)
        if eq.level is ParametricTag.NOISE_MODEL:
            needed_keys.add(name)
            covariates = refs  # noise enters additively, not via the expression
        else:
            needed_keys.update(symbols[s] for s in refs & set(symbols))
        missing = {v for v in covariates if v not in x and v not in symbols}
        if missing:
            raise ValueError(f"covariate assignment missing {sorted(missing)}")

    noise_free = not needed_keys and all(
        eq.level is ParametricTag.FULLY_KNOWN for eq in outcome.values()
    )
    if noise_free:
        env = dict(x)
        return evaluate_expression(outcome["Y1"].expr, env) - evaluate_expression(
            outcome["Y0"].expr, env
        )

    if n_mc < 1:
        raise ValueError(f"n_mc must be positive, got {n_mc}")
    for key in needed_keys:
        if key not in m.noise:
            raise ValueError(f"no noise spec for U_{key}")
    draws = {
        noise_symbol(key): m.noise[key].draw(_substream(seed, f"noise:{key}"), n_mc)
        for key in sorted(needed_keys)
    }
    results: dict[str, np.ndarray] = {}
    for name, eq in outcome.items():
        env: dict[str, np.ndarray | float] = dict(x)
        env.update(draws)
        if eq.level is ParametricTag.NOISE_MODEL:
            results[name] = _eval_array(eq.expr, env, n_mc) + draws[noise_symbol(name)]
        else:
            results[name] = _eval_array(eq.expr, env, n_mc)
    return float(np.mean(results["Y1"] - results["Y0"]))


# ---------------------------------------------------------------------------
# Model definition file format

_NOISE_LINE = re.compile(
    r"^U_([A-Za-z_][A-Za-z0-9_]*)\s*~\s*(Normal|Uniform)\s*\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)$"
)


def parse_scm(text: str) -> Scm:
    """Parse a model definition.

    Three sections, each introduced by a header line::

        graph:
        X -> Y
        equations:
        Y = 2 * X + U        # additive noise: g(parents) + U_Y
        # or:  Y := exp(X) + 0.5 * U_Y   (fully explicit right-hand side)
        noise:
        U_X ~ Normal(0, 1)
        U_Y ~ Normal(0, 0.1)

    ``#`` starts a comment anywhere; errors carry the line number.
    """
    section: str | None = None
    graph_lines: list[str] = []
    equation_lines: list[tuple[int, str]] = []
    noise_lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.endswith(":") and " " not in line:
            name = line[:-1]
            if name not in ("graph", "equations", "noise"):
                raise ScmFormatError(lineno, f"unknown section {name!r}")
            section = name
            continue
        if section == "graph":
            graph_lines.append(line)
        elif section == "equations":
            equation_lines.append((lineno, line))
        elif section == "noise":
            noise_lines.append((lineno, line))
        else:
            raise ScmFormatError(
                lineno, "content before the first section header"
            )

    try:
        graph = parse_graph("\n".join(graph_lines))
    except GraphFormatError as exc:
        raise ScmFormatError(0, f"graph section: {exc}") from None
    if isinstance(graph, Pdag):
        raise ScmFormatError(0, "graph section: a model graph must be directed")

    noise: dict[str, NoiseSpec] = {}
    for lineno, line in noise_lines:
        match = _NOISE_LINE.match(line)
        if match is None:
            raise ScmFormatError(
                lineno, "expected 'U_<name> ~ Normal(mu, sigma)' or 'U_<name> ~ Uniform(a, b)'"
            )
        key, family, first, second = match.groups()
        if key in noise:
            raise ScmFormatError(lineno, f"duplicate noise spec for U_{key}")
        try:
            a, b = float(first), float(second)
            noise[key] = NormalNoise(a, b) if family == "Normal" else UniformNoise(a, b)
        except ValueError as exc:
            raise ScmFormatError(lineno, str(exc)) from None

    equations: list[StructuralEquation] = []
    for lineno, line in equation_lines:
        if ":=" in line:
            target, _, rhs = line.partition(":=")
            level = ParametricTag.FULLY_KNOWN
            body = rhs.strip()
        elif "=" in line:
            target, _, rhs = line.partition("=")
            level = ParametricTag.NOISE_MODEL
            stripped = re.match(r"^(.*?)\s*\+\s*U$", rhs.strip())
            if stripped is None:
                raise ScmFormatError(
                    lineno,
                    "a noise-model equation must end with '+ U' "
                    "(use ':=' for a fully explicit right-hand side)",
                )
            body = stripped.group(1)
        else:
            raise ScmFormatError(lineno, "expected '<var> = <expr> + U' or '<var> := <expr>'")
        target = target.strip()
        if target not in graph.nodes:
            raise ScmFormatError(lineno, f"equation target {target!r} is not a graph node")
        try:
            expr = parse_expression(body)
        except ValueError as exc:
            raise ScmFormatError(lineno, f"bad expression: {exc}") from None
        equations.append(
            StructuralEquation(
                target,
                tuple(sorted(graph.parents(target))),
                level,
                expr,
            )
        )

    try:
        return Scm(graph, equations, noise)
    except ValueError as exc:
        raise ScmFormatError(0, str(exc)) from None


def format_scm(m: Scm) -> str:
    """Canonical model text that reparses to an equal model."""
    lines = ["graph:"]
    graph_text = format_graph(m.graph)
    if graph_text:
        lines.extend(graph_text.rstrip("\n").split("\n"))
    lines.append("equations:")
    for target, eq in m.equations.items():
        if eq.level is ParametricTag.NOISE_MODEL:
            lines.append(f"{target} = {format_expression(eq.expr)} + U")
        elif eq.level is ParametricTag.FULLY_KNOWN:
            lines.append(f"{target} := {format_expression(eq.expr)}")
        else:
            raise ValueError(
                f"equation for {target!r} at level {eq.level.label} has no text form"
            )
    lines.append("noise:")
    for key, spec in m.noise.items():
        lines.append(f"U_{key} ~ {spec.format()}")
    return "\n".join(lines) + "\n"
