"""First-order terms over a finite signature: substitutions, unification, matching.

Terms are immutable values; substitutions are plain dicts mapping variable ids
to terms. Unifiers produced here are idempotent and introduce no fresh
variables, matching the conventions the rest of the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union


@dataclass(frozen=True)
class Symbol:
    """A function symbol with a fixed arity; arity 0 means a constant."""

    name: str
    arity: int

    def __call__(self, *args: "Term") -> "App":
        return App(self, tuple(args))

    def __repr__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Var:
    vid: int

    def __repr__(self) -> str:
        return f"x{self.vid}"


@dataclass(frozen=True)
class App:
    sym: Symbol
    args: tuple["Term", ...] = ()

    def __post_init__(self) -> None:
        if len(self.args) != self.sym.arity:
            raise ValueError(
                f"{self.sym.name} expects {self.sym.arity} arguments, got {len(self.args)}"
            )

    def __hash__(self) -> int:
        # terms are hashed constantly; cache the recursive hash
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.sym, self.args))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return render_term(self)


Term = Union[Var, App]

# A substitution is a finite map vid -> Term; dom = {x | x sigma != x}.
Subst = dict


@dataclass(frozen=True)
class Signature:
    """Declaration-ordered collection of symbols with unique names."""

    symbols: tuple[Symbol, ...]

    def __post_init__(self) -> None:
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError("duplicate symbol names in signature")

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def by_name(self, name: str) -> Symbol:
        for s in self.symbols:
            if s.name == name:
                return s
        raise KeyError(name)

    def constants(self) -> list[Symbol]:
        return [s for s in self.symbols if s.arity == 0]

    def non_constants(self) -> list[Symbol]:
        return [s for s in self.symbols if s.arity > 0]


@lru_cache(maxsize=None)
def size(t: Term) -> int:
    """Number of symbol and variable occurrences in t."""
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


@lru_cache(maxsize=None)
def vars_of(t: Term) -> frozenset[int]:
    if isinstance(t, Var):
        return frozenset((t.vid,))
    out: frozenset[int] = frozenset()
    for a in t.args:
        out |= vars_of(a)
    return out


def vars_of_all(terms: Iterable[Term]) -> frozenset[int]:
    out: frozenset[int] = frozenset()
    for t in terms:
        out |= vars_of(t)
    return out


def occ_count(vid: int, t: Term) -> int:
    """Number of occurrences of the variable vid in t."""
    if isinstance(t, Var):
        return 1 if t.vid == vid else 0
    return sum(occ_count(vid, a) for a in t.args)


def is_ground(t: Term) -> bool:
    return not vars_of(t)


def subterms(t: Term) -> Iterator[Term]:
    """All subterms of t, including t itself."""
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def apply(subst: Mapping[int, Term], t: Term) -> Term:
    """Homomorphic application of a substitution to a term."""
    if not subst:
        return t
    if isinstance(t, Var):
        return subst.get(t.vid, t)
    if vars_of(t).isdisjoint(subst):
        return t
    return App(t.sym, tuple(apply(subst, a) for a in t.args))


def apply_all(subst: Mapping[int, Term], terms: Iterable[Term]) -> list[Term]:
    return [apply(subst, t) for t in terms]


def simultaneous_mgu(pairs: Iterable[tuple[Term, Term]]) -> Subst | None:
    """One idempotent unifier solving every pair at once, or None.

    Variable-variable conflicts are oriented by binding the variable with the
    larger id, so unifiers never introduce fresh variables.
    """
    subst: Subst = {}
    work = list(pairs)
    while work:
        s, t = work.pop()
        s = apply(subst, s)
        t = apply(subst, t)
        if s == t:
            continue
        if isinstance(s, App) and isinstance(t, App):
            if s.sym != t.sym:
                return None
            work.extend(zip(s.args, t.args))
            continue
        if isinstance(s, Var) and isinstance(t, Var):
            if s.vid < t.vid:
                s, t = t, s
        elif isinstance(t, Var):
            s, t = t, s
        # s is a variable, t is not s
        if s.vid in vars_of(t):
            return None
        binding = {s.vid: t}
        subst = {v: apply(binding, u) for v, u in subst.items()}
        subst[s.vid] = t
    return subst


def mgu(s: Term, t: Term) -> Subst | None:
    """Most general unifier of two terms, or None on clash/occurs failure."""
    return simultaneous_mgu([(s, t)])


def match(pattern: Term, target: Term, frozen: frozenset[int] = frozenset()) -> Subst | None:
    """Matcher delta with pattern*delta == target, or None.

    Only variables of the pattern are bound; variables listed in `frozen` are
    treated as constants (they may only match themselves). The target is never
    instantiated.
    """
    subst: Subst = {}
    work = [(pattern, target)]
    while work:
        p, t = work.pop()
        if isinstance(p, Var):
            if p.vid in subst:
                if subst[p.vid] != t:
                    return None
            elif p == t:
                continue
            elif p.vid in frozen:
                return None
            else:
                subst[p.vid] = t
        else:
            if not isinstance(t, App) or p.sym != t.sym:
                return None
            work.extend(zip(p.args, t.args))
    return subst


class FreshVars:
    """Monotone variable-id allocator; one per saturation state."""

    def __init__(self, start: int = 0) -> None:
        self._next = start

    def __call__(self) -> int:
        v = self._next
        self._next += 1
        return v

    def reserve(self, vids: Iterable[int]) -> None:
        """Make sure future ids are strictly above every id in vids."""
        top = max(vids, default=-1)
        if top >= self._next:
            self._next = top + 1


def rename_vars(obj, mapping: Mapping[int, int]):
    """Rename variables by id; obj is a Term or an iterable of Terms."""
    subst = {v: Var(w) for v, w in mapping.items()}
    if isinstance(obj, (Var, App)):
        return apply(subst, obj)
    return [apply(subst, t) for t in obj]


def rename_apart(obj, reserved: Iterable[int], gen: FreshVars | None = None):
    """Rename every variable of obj to ids disjoint from `reserved`.

    obj is a Term or an iterable of Terms (renamed consistently). Returns the
    renamed copy together with the id bijection actually used. Without a
    generator, fresh ids start right above everything in sight.
    """
    single = isinstance(obj, (Var, App))
    terms = [obj] if single else list(obj)
    vs = sorted(vars_of_all(terms))
    if gen is None:
        start = max(set(reserved) | set(vs), default=-1) + 1
        mapping = {v: start + i for i, v in enumerate(vs)}
    else:
        mapping = {v: gen() for v in vs}
    renamed = rename_vars(terms, mapping)
    return (renamed[0] if single else renamed), mapping


@lru_cache(maxsize=None)
def _lex(t: Term) -> tuple:
    if isinstance(t, Var):
        return (0, "", t.vid)
    return (1, t.sym.name, tuple(_lex(a) for a in t.args))


def term_key(t: Term) -> tuple:
    """Canonical ordering key: size first, then lexicographic structure."""
    return (size(t), _lex(t))


def render_term(t: Term, names: Mapping[int, str] | None = None) -> str:
    if isinstance(t, Var):
        return names[t.vid] if names and t.vid in names else f"x{t.vid}"
    if not t.args:
        return t.sym.name
    return f"{t.sym.name}({', '.join(render_term(a, names) for a in t.args)})"
