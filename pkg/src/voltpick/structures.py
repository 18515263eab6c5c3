"""Desk-scale container implementations that round out the benchmark pool.

Python's standard library does not offer the design spread the benchmark
pool wants (linked, copy-on-write, ordered-tree, synchronized), so the
missing designs live here.  They are small, honest implementations: the
point is that each one really does the operation the way its design
implies, not that it competes with C extensions.
"""

from __future__ import annotations

import threading
from typing import Iterable, Iterator


class LinkedList:
    """Doubly-linked list with a sentinel node.

    Deliberately offers no positional __getitem__: random access on a
    linked design is a traversal, and the benchmark pool marks it as such.
    """

    __slots__ = ("_sentinel", "_size")

    class _Node:
        __slots__ = ("value", "prev", "next")

        def __init__(self, value):
            self.value = value
            self.prev = None
            self.next = None

    def __init__(self, values: Iterable = ()):
        sentinel = self._Node(None)
        sentinel.prev = sentinel
        sentinel.next = sentinel
        self._sentinel = sentinel
        self._size = 0
        for v in values:
            self.append(v)

    def __len__(self) -> int:
        return self._size

    def __iter__(self) -> Iterator:
        node = self._sentinel.next
        while node is not self._sentinel:
            yield node.value
            node = node.next

    def __contains__(self, value) -> bool:
        return self.index_of(value) >= 0

    def _node_at(self, index: int) -> "_Node":
        if not 0 <= index <= self._size:
            raise IndexError(index)
        # walk from the nearer end
        if index <= self._size // 2:
            node = self._sentinel.next
            for _ in range(index):
                node = node.next
        else:
            node = self._sentinel
            for _ in range(self._size - index):
                node = node.prev
        return node

    def _insert_before(self, node: "_Node", value) -> None:
        new = self._Node(value)
        new.prev = node.prev
        new.next = node
        node.prev.next = new
        node.prev = new
        self._size += 1

    def _unlink(self, node: "_Node"):
        node.prev.next = node.next
        node.next.prev = node.prev
        self._size -= 1
        return node.value

    def append(self, value) -> None:
        self._insert_before(self._sentinel, value)

    def push_front(self, value) -> None:
        self._insert_before(self._sentinel.next, value)

    def insert_at(self, index: int, value) -> None:
        self._insert_before(self._node_at(index), value)

    def pop_front(self):
        if not self._size:
            raise IndexError("pop from empty LinkedList")
        return self._unlink(self._sentinel.next)

    def pop_back(self):
        if not self._size:
            raise IndexError("pop from empty LinkedList")
        return self._unlink(self._sentinel.prev)

    def remove_at(self, index: int):
        if not 0 <= index < self._size:
            raise IndexError(index)
        return self._unlink(self._node_at(index))

    def remove_value(self, value) -> bool:
        node = self._sentinel.next
        while node is not self._sentinel:
            if node.value == value:
                self._unlink(node)
                return True
            node = node.next
        return False

    def index_of(self, value) -> int:
        for i, v in enumerate(self):
            if v == value:
                return i
        return -1


class CopyOnWriteList:
    """List backed by an immutable snapshot; every mutation copies.

    Readers never block and always see a consistent snapshot; writers
    serialize on a lock.  Thread-safe by construction.
    """

    __slots__ = ("_items", "_lock")

    def __init__(self, values: Iterable = ()):
        self._items = tuple(values)
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator:
        return iter(self._items)

    def __contains__(self, value) -> bool:
        return value in self._items

    def __getitem__(self, index: int):
        return self._items[index]

    def append(self, value) -> None:
        with self._lock:
            self._items = self._items + (value,)

    def insert(self, index: int, value) -> None:
        with self._lock:
            items = self._items
            self._items = items[:index] + (value,) + items[index:]

    def pop(self, index: int = -1):
        with self._lock:
            items = self._items
            value = items[index]
            if index == -1:
                self._items = items[:-1]
            else:
                self._items = items[:index] + items[index + 1 :]
            return value

    def remove_value(self, value) -> bool:
        with self._lock:
            items = self._items
            try:
                i = items.index(value)
            except ValueError:
                return False
            self._items = items[:i] + items[i + 1 :]
            return True

    def index_of(self, value) -> int:
        try:
            return self._items.index(value)
        except ValueError:
            return -1


class SynchronizedList:
    """Plain list guarded by a re-entrant lock on every operation.

    Iteration yields over a snapshot taken under the lock, so concurrent
    mutation during a traversal cannot corrupt it.
    """

    __slots__ = ("_items", "_lock")

    def __init__(self, values: Iterable = ()):
        self._items = list(values)
        self._lock = threading.RLock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._items)

    def __iter__(self) -> Iterator:
        with self._lock:
            snapshot = list(self._items)
        return iter(snapshot)

    def __contains__(self, value) -> bool:
        with self._lock:
            return value in self._items

    def __getitem__(self, index: int):
        with self._lock:
            return self._items[index]

    def append(self, value) -> None:
        with self._lock:
            self._items.append(value)

    def insert(self, index: int, value) -> None:
        with self._lock:
            self._items.insert(index, value)

    def pop(self, index: int = -1):
        with self._lock:
            return self._items.pop(index)

    def remove_value(self, value) -> bool:
        with self._lock:
            try:
                self._items.remove(value)
                return True
            except ValueError:
                return False

    def index_of(self, value) -> int:
        with self._lock:
            try:
                return self._items.index(value)
            except ValueError:
                return -1


class AvlTreeMap:
    """Ordered map as an AVL tree: O(log n) put/get/remove, in-order items."""

    __slots__ = ("_root", "_size")

    class _Node:
        __slots__ = ("key", "value", "left", "right", "height")

        def __init__(self, key, value):
            self.key = key
            self.value = value
            self.left = None
            self.right = None
            self.height = 1

    def __init__(self, items: Iterable = ()):
        self._root = None
        self._size = 0
        for k, v in items:
            self.put(k, v)

    def __len__(self) -> int:
        return self._size

    def __contains__(self, key) -> bool:
        return self._find(key) is not None

    def __iter__(self) -> Iterator:
        for k, _ in self.items():
            yield k

    @staticmethod
    def _height(node) -> int:
        return node.height if node else 0

    @classmethod
    def _fix(cls, node):
        node.height = 1 + max(cls._height(node.left), cls._height(node.right))
        balance = cls._height(node.left) - cls._height(node.right)
        if balance > 1:
            if cls._height(node.left.left) < cls._height(node.left.right):
                node.left = cls._rotate_left(node.left)
            return cls._rotate_right(node)
        if balance < -1:
            if cls._height(node.right.right) < cls._height(node.right.left):
                node.right = cls._rotate_right(node.right)
            return cls._rotate_left(node)
        return node

    @classmethod
    def _rotate_left(cls, node):
        pivot = node.right
        node.right = pivot.left
        pivot.left = node
        node.height = 1 + max(cls._height(node.left), cls._height(node.right))
        pivot.height = 1 + max(cls._height(pivot.left), cls._height(pivot.right))
        return pivot

    @classmethod
    def _rotate_right(cls, node):
        pivot = node.left
        node.left = pivot.right
        pivot.right = node
        node.height = 1 + max(cls._height(node.left), cls._height(node.right))
        pivot.height = 1 + max(cls._height(pivot.left), cls._height(pivot.right))
        return pivot

    def _find(self, key):
        node = self._root
        while node:
            if key < node.key:
                node = node.left
            elif key > node.key:
                node = node.right
            else:
                return node
        return None

    def get(self, key, default=None):
        node = self._find(key)
        return node.value if node else default

    def put(self, key, value) -> None:
        def insert(node):
            if node is None:
                self._size += 1
                return self._Node(key, value)
            if key < node.key:
                node.left = insert(node.left)
            elif key > node.key:
                node.right = insert(node.right)
            else:
                node.value = value
                return node
            return self._fix(node)

        self._root = insert(self._root)

    def remove(self, key) -> bool:
        if self._find(key) is None:
            return False
        self._root = self._delete_key(self._root, key)
        self._size -= 1
        return True

    def _delete_key(self, node, key):
        if node is None:
            return None
        if key < node.key:
            node.left = self._delete_key(node.left, key)
        elif key > node.key:
            node.right = self._delete_key(node.right, key)
        else:
            if node.left is None:
                return node.right
            if node.right is None:
                return node.left
            successor = node.right
            while successor.left:
                successor = successor.left
            node.key, node.value = successor.key, successor.value
            node.right = self._delete_key(node.right, successor.key)
        return self._fix(node)

    def items(self) -> Iterator:
        stack, node = [], self._root
        while stack or node:
            while node:
                stack.append(node)
                node = node.left
            node = stack.pop()
            yield node.key, node.value
            node = node.right


class AvlTreeSet:
    """Ordered set over an AvlTreeMap."""

    __slots__ = ("_map",)

    def __init__(self, values: Iterable = ()):
        self._map = AvlTreeMap((v, None) for v in values)

    def __len__(self) -> int:
        return len(self._map)

    def __contains__(self, value) -> bool:
        return value in self._map

    def __iter__(self) -> Iterator:
        return iter(self._map)

    def add(self, value) -> None:
        self._map.put(value, None)

    def discard(self, value) -> bool:
        return self._map.remove(value)


class SynchronizedDict:
    """dict guarded by a re-entrant lock; items() iterates a snapshot."""

    __slots__ = ("_items", "_lock")

    def __init__(self, items: Iterable = ()):
        self._items = dict(items)
        self._lock = threading.RLock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._items)

    def __contains__(self, key) -> bool:
        with self._lock:
            return key in self._items

    def get(self, key, default=None):
        with self._lock:
            return self._items.get(key, default)

    def put(self, key, value) -> None:
        with self._lock:
            self._items[key] = value

    def remove(self, key) -> bool:
        with self._lock:
            return self._items.pop(key, _MISSING) is not _MISSING

    def items(self):
        with self._lock:
            snapshot = list(self._items.items())
        return iter(snapshot)


class SynchronizedSet:
    """set guarded by a re-entrant lock; iteration over a snapshot."""

    __slots__ = ("_items", "_lock")

    def __init__(self, values: Iterable = ()):
        self._items = set(values)
        self._lock = threading.RLock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._items)

    def __contains__(self, value) -> bool:
        with self._lock:
            return value in self._items

    def __iter__(self) -> Iterator:
        with self._lock:
            snapshot = list(self._items)
        return iter(snapshot)

    def add(self, value) -> None:
        with self._lock:
            self._items.add(value)

    def discard(self, value) -> None:
        with self._lock:
            self._items.discard(value)


_MISSING = object()
