"""Hierarchical content names and longest-prefix matching over name prefixes."""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

SEPARATOR = "/"


class MalformedName(ValueError):
    pass


class Name(tuple):
    """An immutable sequence of non-empty text components.

    Names compare, hash and sort as plain tuples of strings, so they can be
    used directly as dict keys in forwarding tables.
    """

    __slots__ = ()

    def __new__(cls, components: Iterable[str]) -> "Name":
        if isinstance(components, str):
            raise TypeError("use parse_name() for rendered names")
        comps = tuple(components)
        if not comps:
            raise MalformedName("a name needs at least one component")
        for c in comps:
            if not isinstance(c, str) or not c or SEPARATOR in c:
                raise MalformedName(f"bad name component {c!r}")
        return super().__new__(cls, comps)

    @property
    def components(self) -> tuple[str, ...]:
        return tuple(self)

    def is_prefix_of(self, other: "Name") -> bool:
        return len(self) <= len(other) and other[: len(self)] == tuple(self)

    def child(self, component: str) -> "Name":
        return Name(tuple(self) + (component,))

    def __str__(self) -> str:
        return SEPARATOR + SEPARATOR.join(self)

    def __repr__(self) -> str:
        return f"Name({str(self)!r})"


# A prefix is structurally a name; the alias documents intent at call sites.
NamePrefix = Name


def parse_name(text: str) -> Name:
    """Parse ``"/a/b/c"`` into ``Name(("a", "b", "c"))``.

    Raises MalformedName on empty input, a missing leading separator, or an
    empty component (``"//a"``, ``"/a/"``).
    """
    if not text:
        raise MalformedName("empty name")
    if not text.startswith(SEPARATOR):
        raise MalformedName(f"name must start with {SEPARATOR!r}: {text!r}")
    parts = text[1:].split(SEPARATOR)
    if any(p == "" for p in parts):
        raise MalformedName(f"empty component in {text!r}")
    return Name(parts)


def render_name(name: Name) -> str:
    return str(name)


class _Node:
    __slots__ = ("children", "prefix")

    def __init__(self) -> None:
        self.children: dict[str, _Node] = {}
        self.prefix: Optional[Name] = None


class PrefixTrie:
    """Component-level trie over a set of name prefixes.

    One edge per name component; lookup cost is bounded by the depth of the
    query name, independent of how many prefixes are stored.
    """

    def __init__(self, prefixes: Iterable[Name] = ()) -> None:
        self._root = _Node()
        self._size = 0
        for p in prefixes:
            self.insert(p)

    def insert(self, prefix: Name) -> None:
        node = self._root
        for comp in prefix:
            nxt = node.children.get(comp)
            if nxt is None:
                nxt = node.children[comp] = _Node()
            node = nxt
        if node.prefix is None:
            self._size += 1
        node.prefix = prefix if isinstance(prefix, Name) else Name(prefix)

    def __len__(self) -> int:
        return self._size

    def __contains__(self, prefix: object) -> bool:
        node = self._root
        for comp in prefix:  # type: ignore[union-attr]
            node = node.children.get(comp)
            if node is None:
                return False
        return node.prefix is not None

    def __iter__(self) -> Iterator[Name]:
        stack = [self._root]
        while stack:
            node = stack.pop()
            if node.prefix is not None:
                yield node.prefix
            stack.extend(node.children.values())

    def longest_match(self, name: Name) -> Optional[Name]:
        node = self._root
        best = None
        for comp in name:
            node = node.children.get(comp)
            if node is None:
                break
            if node.prefix is not None:
                best = node.prefix
        return best


def longest_prefix_match(name: Name, prefixes) -> Optional[Name]:
    """Return the longest prefix in ``prefixes`` that is a prefix of ``name``.

    ``prefixes`` may be a PrefixTrie (preferred for repeated queries) or any
    iterable of prefixes. Returns None when nothing matches.
    """
    if not isinstance(prefixes, PrefixTrie):
        prefixes = PrefixTrie(prefixes)
    return prefixes.longest_match(name)
