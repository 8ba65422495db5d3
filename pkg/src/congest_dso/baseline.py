"""Answering replacement-distance queries without any preprocessing."""
from __future__ import annotations

from .graph import without_edges
from .queries import Answer, QueryBatch, query_error
from .simulator import CostModel, NetworkRun, schedule_random_delays, sssp_protocol

ANSWER_KEY = "answers"


def _store(run: NetworkRun, ans: Answer) -> None:
    q = ans.query
    run.stores[q.y].setdefault(ANSWER_KEY, {})[(q.x, q.y, q.u, q.v)] = ans.distance


def answer_general_no_pre(run: NetworkRun, batch: QueryBatch, cost_model: CostModel | None = None) -> list[Answer]:
    """One SSSP from ``x`` in ``G - e`` per query, run one after the other."""
    cost_model = cost_model or CostModel.charged()
    g = run.graph
    answers = []
    with run.phase("baseline-general") as delta:
        for q in batch:
            err = query_error(g, q)
            if err:
                answers.append(Answer(q, None, err))
                continue
            dist, _ = run.run(sssp_protocol(run, g, q.x, cost_model, without_edges([q.edge]), with_parents=False))
            ans = Answer(q, dist[q.y])
            _store(run, ans)
            answers.append(ans)
    for a in answers:
        a.rounds_charged = delta.rounds
    return answers


def answer_seb_no_pre(
    run: NetworkRun,
    batch: QueryBatch,
    cost_model: CostModel | None = None,
    seed: int | None = None,
) -> list[Answer]:
    """Batch sharing one failed edge: SSSP from each distinct source in ``G - e``.

    When every query has the same source this is a single SSSP.
    """
    cost_model = cost_model or CostModel.charged()
    g = run.graph
    if not batch:
        return []
    edges = {q.edge for q in batch}
    if len(edges) != 1:
        raise ValueError("single-edge batch expected; use the general baseline for mixed edges")
    errs = [query_error(g, q) for q in batch]
    if any(errs):
        return [Answer(q, None, e or "invalid batch") for q, e in zip(batch, errs)]
    (u, v), = edges
    sources = sorted({q.x for q in batch})
    with run.phase("baseline-seb") as delta:
        protos = [
            sssp_protocol(run, g, x, cost_model, without_edges([(u, v)]), with_parents=False) for x in sources
        ]
        res, _ = schedule_random_delays(
            run, protos, cost_model.sssp_congestion_bound(g.n), cost_model.sssp_round_bound(g.n), seed,
            name="seb-ksssp",
        )
        table = {x: dict(enumerate(d)) for x, (d, _) in zip(sources, res)}
    answers = []
    for q in batch:
        ans = Answer(q, table[q.x][q.y], rounds_charged=delta.rounds)
        _store(run, ans)
        answers.append(ans)
    return answers
