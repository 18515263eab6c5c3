import random

import pytest

from voltpick.structures import (
    AvlTreeMap,
    AvlTreeSet,
    CopyOnWriteList,
    LinkedList,
    SynchronizedDict,
    SynchronizedList,
    SynchronizedSet,
)


@pytest.mark.parametrize("cls", [LinkedList, CopyOnWriteList, SynchronizedList])
def test_list_like_basics(cls):
    xs = cls([1, 2, 3])
    xs.append(4)
    assert list(xs) == [1, 2, 3, 4]
    assert len(xs) == 4
    assert 3 in xs and 9 not in xs
    assert xs.index_of(3) == 2


def test_linked_list_mutations():
    xs = LinkedList([10, 20, 30])
    xs.push_front(5)
    xs.insert_at(2, 15)
    assert list(xs) == [5, 10, 15, 20, 30]
    assert xs.pop_front() == 5
    assert xs.pop_back() == 30
    assert xs.remove_at(1) == 15
    assert list(xs) == [10, 20]
    assert xs.remove_value(20) is True
    assert xs.remove_value(99) is False
    assert list(xs) == [10]
    assert xs.index_of(10) == 0
    assert xs.index_of(11) == -1


def test_linked_list_has_no_positional_get():
    assert not hasattr(LinkedList([1]), "__getitem__")


@pytest.mark.parametrize("cls", [CopyOnWriteList, SynchronizedList])
def test_wrapped_list_against_builtin(cls):
    rng = random.Random(42)
    ours, ref = cls(), []
    for _ in range(400):
        action = rng.randrange(5)
        if action == 0:
            v = rng.randrange(50)
            ours.append(v)
            ref.append(v)
        elif action == 1 and ref:
            i = rng.randrange(len(ref) + 1)
            v = rng.randrange(50)
            ours.insert(i, v)
            ref.insert(i, v)
        elif action == 2 and ref:
            i = rng.randrange(len(ref))
            assert ours.pop(i) == ref.pop(i)
        elif action == 3:
            v = rng.randrange(50)
            assert ours.remove_value(v) == (v in ref)
            if v in ref:
                ref.remove(v)
        else:
            v = rng.randrange(50)
            assert (v in ours) == (v in ref)
            assert ours.index_of(v) == (ref.index(v) if v in ref else -1)
        assert list(ours) == ref


def test_avl_map_against_dict():
    rng = random.Random(7)
    ours, ref = AvlTreeMap(), {}
    for _ in range(1500):
        key = rng.randrange(120)
        action = rng.randrange(3)
        if action == 0:
            ours.put(key, key * 2)
            ref[key] = key * 2
        elif action == 1:
            assert ours.get(key) == ref.get(key)
        else:
            assert ours.remove(key) == (key in ref)
            ref.pop(key, None)
        assert len(ours) == len(ref)
    assert list(ours.items()) == sorted(ref.items())


def test_avl_map_iterates_in_key_order():
    m = AvlTreeMap((k, None) for k in [5, 1, 9, 3, 7])
    assert list(m) == [1, 3, 5, 7, 9]


def test_avl_set():
    s = AvlTreeSet([3, 1, 2, 1])
    assert len(s) == 3
    s.add(0)
    assert list(s) == [0, 1, 2, 3]
    assert s.discard(2) is True
    assert s.discard(2) is False
    assert 2 not in s


def test_synchronized_dict():
    m = SynchronizedDict({1: "a"})
    m.put(2, "b")
    assert m.get(1) == "a"
    assert m.get(9, "x") == "x"
    assert sorted(m.items()) == [(1, "a"), (2, "b")]
    assert m.remove(1) is True
    assert m.remove(1) is False
    assert len(m) == 1
    assert 2 in m


def test_synchronized_set():
    s = SynchronizedSet([1, 2])
    s.add(3)
    s.discard(1)
    assert sorted(s) == [2, 3]
    assert 2 in s and 1 not in s
    assert len(s) == 2
