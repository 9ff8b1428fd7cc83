"""Small graph utilities over adjacency lists indexed 0..n-1."""
from __future__ import annotations

from collections import deque


def reachable(adj, sources) -> set:
    seen = set(sources)
    todo = deque(seen)
    while todo:
        u = todo.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def reverse(adj) -> list:
    radj = [[] for _ in range(len(adj))]
    for u, succ in enumerate(adj):
        for v in succ:
            radj[v].append(u)
    return radj


def sccs(adj, nodes=None) -> list:
    """Tarjan's algorithm, iterative.  Returns a list of lists of nodes.

    If ``nodes`` is given, only the subgraph induced by it is decomposed.
    """
    if nodes is None:
        nodes = range(len(adj))
    allowed = set(nodes)
    index = {}
    low = {}
    on_stack = set()
    stack = []
    out = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            u, it = work[-1]
            advanced = False
            for v in it:
                if v not in allowed:
                    continue
                if v not in index:
                    index[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack.add(v)
                    work.append((v, iter(adj[v])))
                    advanced = True
                    break
                if v in on_stack:
                    low[u] = min(low[u], index[v])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[u])
            if low[u] == index[u]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == u:
                        break
                out.append(comp)
    return out
