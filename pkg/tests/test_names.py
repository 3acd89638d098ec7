import random

import pytest
from hypothesis import given, strategies as st

from ccnramp.content_store import ContentStore
from ccnramp.names import (MalformedName, Name, PrefixTrie, longest_prefix_match, parse_name,
                           render_name)

components = st.text(alphabet="abcdefgh0123456789-_.", min_size=1, max_size=6)
names = st.lists(components, min_size=1, max_size=6).map(Name)


def test_parse_and_render():
    n = parse_name("/att/videos/v1")
    assert n == Name(("att", "videos", "v1"))
    assert str(n) == "/att/videos/v1"
    assert render_name(n) == "/att/videos/v1"


@pytest.mark.parametrize("bad", ["", "a/b", "//a", "/a/", "/a//b", "/"])
def test_malformed_names(bad):
    with pytest.raises(MalformedName):
        parse_name(bad)


def test_name_rejects_plain_string():
    with pytest.raises(TypeError):
        Name("/a/b")
    with pytest.raises(MalformedName):
        Name(("a", "b/c"))
    with pytest.raises(MalformedName):
        Name(())


def test_prefix_relation():
    p = parse_name("/a/b")
    assert p.is_prefix_of(parse_name("/a/b/c"))
    assert p.is_prefix_of(p)
    assert not p.is_prefix_of(parse_name("/a"))
    # component boundaries, not characters
    assert not p.is_prefix_of(parse_name("/a/bc"))
    assert p.child("c") == parse_name("/a/b/c")


@given(names)
def test_round_trip(n):
    assert parse_name(str(n)) == n


@given(st.lists(names, max_size=20), names)
def test_trie_agrees_with_scan(prefixes, query):
    assert PrefixTrie(prefixes).longest_match(query) == longest_prefix_match(query, prefixes)


def naive_lpm(name, prefixes):
    best = None
    for p in prefixes:
        if tuple(name[: len(p)]) == tuple(p) and (best is None or len(p) > len(best)):
            best = p
    return best


def test_lpm_matches_naive_oracle():
    rng = random.Random(1)
    alphabet = ["a", "b", "c", "d"]

    def rand_name(lo, hi):
        return Name(rng.choice(alphabet) for _ in range(rng.randint(lo, hi)))

    prefixes = {rand_name(1, 4) for _ in range(200)}
    trie = PrefixTrie(prefixes)
    assert len(trie) == len(prefixes)
    assert set(trie) == prefixes
    hits = 0
    for _ in range(1000):
        q = rand_name(1, 6)
        want = naive_lpm(q, prefixes)
        assert trie.longest_match(q) == want
        assert longest_prefix_match(q, trie) == want
        hits += want is not None
    assert hits > 500


def test_trie_membership_and_duplicates():
    trie = PrefixTrie()
    trie.insert(parse_name("/a/b"))
    trie.insert(parse_name("/a/b"))
    assert len(trie) == 1
    assert parse_name("/a/b") in trie
    assert parse_name("/a") not in trie
    assert trie.longest_match(parse_name("/a")) is None
    assert trie.longest_match(parse_name("/x/y")) is None


def test_content_store_lru():
    cs = ContentStore(2)
    a, b, c = parse_name("/a"), parse_name("/b"), parse_name("/c")
    assert cs.insert(a, 1) is None
    assert cs.insert(b, 2) is None
    assert cs.get(a) == 1          # a is now most recent
    assert cs.insert(c, 3) == b
    assert b not in cs and a in cs and c in cs
    assert cs.get(b) is None
    assert cs.names() == [a, c]


def test_content_store_zero_capacity():
    cs = ContentStore(0)
    assert cs.insert(parse_name("/a"), 1) is None
    assert len(cs) == 0
    with pytest.raises(ValueError):
        ContentStore(-1)


@given(st.integers(1, 8), st.lists(st.integers(0, 15), max_size=200))
def test_content_store_capacity_invariant(capacity, ops):
    cs = ContentStore(capacity)
    model = []
    for k in ops:
        n = Name((f"o{k}",))
        if k % 3 == 0:
            hit = cs.get(n)
            if n in model:
                model.remove(n)
                model.append(n)
                assert hit is not None
            else:
                assert hit is None
        else:
            cs.insert(n, k)
            if n in model:
                model.remove(n)
            elif len(model) == capacity:
                model.pop(0)
            model.append(n)
        assert len(cs) <= capacity
        assert cs.names() == model
