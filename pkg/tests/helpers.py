"""Small builders shared by the test modules."""

from rtimpact.graph import SocialGraph
from rtimpact.grouping import CategorizationResult, GroupSpec, assign_groups
from rtimpact.interactions import Interaction, InteractionDataset

T0 = 1554076800  # 2019-04-01T00:00:00Z


def rt(retweeter, retweeted, ts=T0, tweet=None, topics=()):
    return Interaction(int(ts), tweet or f"{retweeted}-t", retweeter, retweeted, tuple(topics))


def dataset(*items):
    return InteractionDataset.from_interactions(items)


def graph(edges, nodes=()):
    """``edges`` as (u, v, w) triples of user ids."""
    return SocialGraph.from_edges(edges, nodes)


def coded_graph(n, edges):
    """Graph over users n000.. from integer (u, v, w) triples."""
    from oracles import names
    return SocialGraph.from_edges([(f"n{u:03d}", f"n{v:03d}", w) for u, v, w in edges], names(n))


def scored(scores: dict, fractions=None, names=None, thresholds=None):
    results = [CategorizationResult(u, float(s)) for u, s in sorted(scores.items())]
    if thresholds is not None:
        spec = GroupSpec(thresholds=tuple(thresholds), names=names)
    else:
        spec = GroupSpec(fractions=tuple(fractions or (1.0,)), names=names)
    return assign_groups(results, spec)


def labelled(groups: dict):
    """Assignment from {user: label}; labels sort into group order."""
    return assign_groups([CategorizationResult(u, lab) for u, lab in sorted(groups.items())])
