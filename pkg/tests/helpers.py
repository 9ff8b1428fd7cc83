from mdpst.graphs import reachable


def forward_states(p):
    """States reachable from the initial state along any set member."""
    adj = [[] for _ in range(p.n_states)]
    for (s, _), outs in p.transitions.items():
        for o in outs:
            adj[s].extend(o.targets)
    return reachable(adj, [p.initial])
