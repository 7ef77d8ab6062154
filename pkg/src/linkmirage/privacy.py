"""Link-privacy metrics: anti-inference posterior, indistinguishability
entropy, and anti-aggregation distance.

The worst-case adversary knows the whole original sequence except the
queried link and observes every perturbed snapshot. The exact likelihood of
an observed perturbed sequence under walk-based perturbation is intractable,
so the posterior uses a feature-likelihood surrogate: the likelihood of a
hypothesis is the empirical frequency, over fresh re-perturbations of that
hypothesis world, of reproducing the observed local neighborhood of the
queried pair (edge presence plus the perturbed degree pair, per timestamp),
with add-one smoothing. On small graphs this is validated against exhaustive
enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, TemporalGraphSequence, union_graph
from .markov import (TransitionMatrix, matrix_power, transition_matrix,
                     tv_distance, tv_distance_common)
from .perturb import (PerturbParams, PerturbationRecord, build_step_plan,
                      perturb_static)


@dataclass(frozen=True)
class LinkQuery:
    """A link whose privacy is being quantified at timestamp t."""

    t: int
    u: int
    v: int
    truth: bool | None = None

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError("a link query needs two distinct vertices")

    @property
    def pair(self) -> tuple[int, int]:
        return (min(self.u, self.v), max(self.u, self.v))


@dataclass(frozen=True)
class PriorModel:
    """Link-prediction prior: logistic calibration of common-neighbor counts.

    kind 'worst-case-all-but-L' conditions the hypothesis worlds on the full
    original sequence except the queried link; 'link-prediction' uses the
    same calibrated scorer without that conditioning semantics.
    """

    kind: str = "worst-case-all-but-L"
    clip: tuple = (0.01, 0.99)
    negatives_per_positive: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("worst-case-all-but-L", "link-prediction"):
            raise ValueError(f"unknown prior kind {self.kind!r}")


@dataclass(frozen=True)
class PosteriorEstimate:
    probability: float
    standard_error: float
    samples: int
    prior: float
    likelihood_with: float
    likelihood_without: float
    degenerate: bool = False


def common_neighbors(graph: Graph, u: int, v: int) -> int:
    if not (graph.has_vertex(u) and graph.has_vertex(v)):
        raise KeyError(f"vertices {u},{v} not present in graph")
    return int(np.intersect1d(graph.neighbors(u), graph.neighbors(v)).size)


def fit_logistic_1d(x: np.ndarray, y: np.ndarray,
                    max_iter: int = 25) -> tuple[float, float]:
    """Damped-Newton fit of P(y=1|x) = sigmoid(b0 + b1*x).

    Falls back to a constant model (slope 0, intercept = logit of the base
    rate) when the data are degenerate or separable.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    base = min(max(y.mean(), 1e-3), 1 - 1e-3) if y.size else 0.5
    fallback = (math.log(base / (1 - base)), 0.0)
    if y.size == 0 or np.all(y == y[0]) or np.all(x == x[0]):
        return fallback
    design = np.column_stack([np.ones_like(x), x])
    beta = np.array([fallback[0], 0.0])
    for _ in range(max_iter):
        z = design @ beta
        p = 1.0 / (1.0 + np.exp(-np.clip(z, -35, 35)))
        grad = design.T @ (y - p)
        w = np.maximum(p * (1 - p), 1e-9)
        hess = (design * w[:, None]).T @ design + 1e-8 * np.eye(2)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            return fallback
        norm = np.abs(step).max()
        if norm > 10.0:
            step = step * (10.0 / norm)
        beta = beta + step
        if norm < 1e-10:
            break
    if not np.all(np.isfinite(beta)):
        return fallback
    return float(beta[0]), float(beta[1])


def prior_probability(query: LinkQuery, model: PriorModel,
                      seq: TemporalGraphSequence) -> float:
    """Calibrated link-prediction prior for the queried pair, clipped.

    Positives are the snapshot's edges and negatives a matched sample of
    absent pairs, both excluding the queried pair; the score is the
    common-neighbor count through a fitted logistic.
    """
    graph = seq[query.t]
    if not (graph.has_vertex(query.u) and graph.has_vertex(query.v)):
        raise KeyError(f"query vertices absent at t={query.t}")
    qpair = query.pair
    pos_pairs = [(int(u), int(v)) for u, v in graph.edges
                 if (int(u), int(v)) != qpair]
    rng = np.random.default_rng(np.random.SeedSequence(model.seed))
    n_neg = max(1, int(round(model.negatives_per_positive * max(len(pos_pairs), 1))))
    ids = graph.vertices
    existing = graph.edge_set()
    neg_pairs = []
    seen = set()
    attempts = 0
    while len(neg_pairs) < n_neg and attempts < 50 * n_neg + 1000:
        attempts += 1
        u = int(ids[rng.integers(0, ids.size)])
        v = int(ids[rng.integers(0, ids.size)])
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in existing or key in seen or key == qpair:
            continue
        seen.add(key)
        neg_pairs.append(key)
    x = np.array([common_neighbors(graph, u, v) for u, v in pos_pairs + neg_pairs],
                 dtype=np.float64)
    y = np.concatenate([np.ones(len(pos_pairs)), np.zeros(len(neg_pairs))])
    b0, b1 = fit_logistic_1d(x, y)
    score = b0 + b1 * common_neighbors(graph, query.u, query.v)
    prob = 1.0 / (1.0 + math.exp(-max(min(score, 35.0), -35.0)))
    return float(min(max(prob, model.clip[0]), model.clip[1]))


# -- posterior via feature-likelihood surrogate -------------------------------


DEGREE_BIN = 3


def _edge_feature(edges: np.ndarray, u: int, v: int,
                  degree_bin: int = DEGREE_BIN) -> tuple[int, int, int]:
    """Queried-edge presence plus the binned perturbed degree pair.

    Degrees are discretized into bins of width ``degree_bin`` so the match
    probability of a feature stays bounded away from zero; exact-degree
    matching makes the Monte Carlo likelihood collapse on realistic sizes.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    lo, hi = (u, v) if u < v else (v, u)
    present = int(bool(((edges[:, 0] == lo) & (edges[:, 1] == hi)).any())) \
        if edges.size else 0
    du = int(((edges[:, 0] == u) | (edges[:, 1] == u)).sum()) if edges.size else 0
    dv = int(((edges[:, 0] == v) | (edges[:, 1] == v)).sum()) if edges.size else 0
    return (present, du // degree_bin, dv // degree_bin)


def observed_features(perturbed, query: LinkQuery,
                      degree_bin: int = DEGREE_BIN) -> tuple:
    """Per-timestamp feature tuple of the observed perturbed prefix 0..t."""
    feats = []
    for g in perturbed[:query.t + 1]:
        feats.append(_edge_feature(g.edges, query.u, query.v, degree_bin))
    return tuple(feats)


def _hypothesis_world(seq: TemporalGraphSequence, query: LinkQuery,
                      present: bool) -> TemporalGraphSequence:
    """The original prefix with the queried link forced present or absent."""
    lo, hi = query.pair
    snaps = []
    for g in seq.snapshots[:query.t + 1]:
        if not (g.has_vertex(lo) and g.has_vertex(hi)):
            snaps.append(g)
            continue
        edges = g.edges
        mask = ~((edges[:, 0] == lo) & (edges[:, 1] == hi))
        edges = edges[mask]
        if present:
            edges = np.vstack([edges, [[lo, hi]]]) if edges.size else np.array([[lo, hi]])
        snaps.append(Graph(edges, vertices=g.vertices))
    return TemporalGraphSequence(snaps)


class _SequenceSampler:
    """Re-perturbs a fixed hypothesis world; clustering work done once."""

    def __init__(self, world: TemporalGraphSequence, params: PerturbParams,
                 mechanism):
        self.world = world
        self.params = params
        self.mechanism = mechanism
        self.plans = None
        if mechanism == "linkmirage":
            self.plans = []
            prev = None
            for t, g_t in enumerate(world.snapshots):
                plan = build_step_plan(g_t, prev, params)
                self.plans.append(plan)
                # the reuse layout of later steps depends only on clusterings,
                # so a placeholder record with empty edge sets is enough
                rec = PerturbationRecord(timestamp=t, clustering=plan.clustering,
                                         history=plan.history,
                                         intra={lab: np.empty((0, 2), np.int64)
                                                for lab in plan.clustering.communities},
                                         inter={(task.a, task.b): np.empty((0, 2), np.int64)
                                                for task in plan.pair_tasks})
                prev = (g_t, rec)

    def sample_features(self, uv: tuple[int, int], rng: np.random.Generator,
                        degree_bin: int = DEGREE_BIN) -> tuple:
        u, v = uv
        feats = []
        if self.mechanism == "static":
            for g_t in self.world.snapshots:
                fake = perturb_static(g_t, self.params.k, rng)
                feats.append(_edge_feature(fake.edges, u, v, degree_bin))
            return tuple(feats)
        if self.mechanism == "linkmirage":
            carried_intra, carried_inter = {}, {}
            for plan in self.plans:
                reused_intra = {lab: carried_intra.get(prev_lab, np.empty((0, 2), np.int64))
                                for prev_lab, lab in plan.diff.unchanged}
                reuse_keys = set(plan.reused_inter)
                intra, inter = self._sample_plan(plan, reused_intra, reuse_keys,
                                                 carried_inter, rng)
                pieces = [np.asarray(e).reshape(-1, 2) for e in intra.values()] \
                    + [np.asarray(e).reshape(-1, 2) for e in inter.values()]
                edges = np.concatenate(pieces) if pieces else np.empty((0, 2), np.int64)
                feats.append(_edge_feature(edges, u, v, degree_bin))
                carried_intra, carried_inter = intra, inter
            return tuple(feats)
        # custom mechanism: callable(world, rng) -> list of edge arrays
        for edges in self.mechanism(self.world, rng):
            feats.append(_edge_feature(edges, u, v, degree_bin))
        return tuple(feats)

    def _sample_plan(self, plan, reused_intra, reuse_keys, carried_inter, rng):
        comm_streams, pair_streams = plan.spawn_streams(rng)
        intra = dict(reused_intra)
        for label in plan.changed_labels:
            sub = plan.subgraphs[label]
            fake = perturb_static(sub, self.params.k_for(label), comm_streams[label])
            intra[label] = fake.edges
        inter = {}
        prev_for = {cur: prv for prv, cur in plan.diff.unchanged}
        for task, stream in zip(plan.pair_tasks, pair_streams):
            key = (task.a, task.b)
            if key in reuse_keys:
                pa, pb = prev_for[task.a], prev_for[task.b]
                pkey = (pa, pb) if pa < pb else (pb, pa)
                inter[key] = carried_inter.get(pkey, np.empty((0, 2), np.int64))
            else:
                inter[key] = task.sample(stream, self.params.inter_cluster_form)
        return intra, inter

    def innovation_steps(self, uv: tuple[int, int]) -> list:
        """Which timestamps draw fresh randomness that can touch (u, v).

        Verbatim-reused steps replicate the previous features of the queried
        pair deterministically, so they contribute no new evidence: their
        likelihood factor is exactly 1. A step innovates when the community
        of u or v is re-perturbed, or a non-reused inter pair lists u or v
        among its marginal nodes.
        """
        if self.plans is None:
            return [True] * len(self.world)
        u, v = uv
        out = []
        for t, plan in enumerate(self.plans):
            if t == 0:
                out.append(True)
                continue
            changed = set(plan.diff.changed)
            labels = {plan.clustering.assignment.get(u),
                      plan.clustering.assignment.get(v)}
            innovate = bool(labels & changed)
            if not innovate:
                reused = set(plan.reused_inter)
                for task in plan.pair_tasks:
                    if (task.a, task.b) in reused:
                        continue
                    if u in task.nodes_a or u in task.nodes_b \
                            or v in task.nodes_a or v in task.nodes_b:
                        innovate = True
                        break
            out.append(innovate)
        return out

    def marginal_match_counts(self, observed: tuple, uv: tuple[int, int],
                              n_samples: int, rng: np.random.Generator,
                              degree_bin: int = DEGREE_BIN) -> np.ndarray:
        """Per-timestamp counts of samples whose step feature matches."""
        counts = np.zeros(len(observed), dtype=np.int64)
        for _ in range(n_samples):
            feats = self.sample_features(uv, rng, degree_bin)
            for t in range(len(observed)):
                if feats[t] == observed[t]:
                    counts[t] += 1
        return counts


def _likelihood_counts(sampler: _SequenceSampler, observed: tuple,
                       uv: tuple[int, int], n_samples: int,
                       rng: np.random.Generator,
                       degree_bin: int = DEGREE_BIN) -> np.ndarray:
    """Per-timestamp prefix match counts over n_samples re-perturbations."""
    horizon = len(observed)
    counts = np.zeros(horizon, dtype=np.int64)
    for _ in range(n_samples):
        feats = sampler.sample_features(uv, rng, degree_bin)
        for t in range(horizon):
            if feats[t] != observed[t]:
                break
            counts[t] += 1
    return counts


def _bayes(prior: float, like_with: float, like_without: float) -> float:
    denom = prior * like_with + (1.0 - prior) * like_without
    if denom <= 0.0:
        return prior
    return prior * like_with / denom


def posterior_probability(query: LinkQuery, seq: TemporalGraphSequence,
                          perturbed, model: PriorModel, params: PerturbParams,
                          n_samples: int, rng: np.random.Generator,
                          mechanism="linkmirage",
                          degree_bin: int = DEGREE_BIN) -> PosteriorEstimate:
    """Monte Carlo worst-case posterior of the queried link.

    Builds the two hypothesis worlds (original prefix with the link forced
    present/absent), estimates the likelihood of the observed perturbed
    prefix under each by the feature surrogate over ``n_samples`` fresh
    re-perturbations, and combines with the calibrated prior. The standard
    error comes from a binomial bootstrap of the two match counts.
    """
    if n_samples < 100:
        raise ValueError("posterior estimation needs n_samples >= 100")
    prior = prior_probability(query, model, seq)
    observed = observed_features(perturbed, query, degree_bin)
    uv = (query.u, query.v)
    t = query.t

    counts = {}
    for present in (True, False):
        world = _hypothesis_world(seq, query, present)
        sampler = _SequenceSampler(world, params, mechanism)
        counts[present] = _likelihood_counts(sampler, observed, uv, n_samples,
                                             rng.spawn(1)[0], degree_bin)[t]
    c1, c0 = int(counts[True]), int(counts[False])
    like1 = (c1 + 1.0) / (n_samples + 2.0)
    like0 = (c0 + 1.0) / (n_samples + 2.0)
    post = _bayes(prior, like1, like0)

    boot_rng = rng.spawn(1)[0]
    reps = 200
    b1 = boot_rng.binomial(n_samples, max(c1, 0) / n_samples, size=reps)
    b0 = boot_rng.binomial(n_samples, max(c0, 0) / n_samples, size=reps)
    boots = [_bayes(prior, (x1 + 1.0) / (n_samples + 2.0),
                    (x0 + 1.0) / (n_samples + 2.0)) for x1, x0 in zip(b1, b0)]
    se = float(np.std(boots))
    degenerate = (c1 == 0 and c0 == 0)
    if degenerate:
        se = max(se, 0.25)
    # keep probability +- 2*SE inside the [-0.05, 1.05] sanity band
    se = min(se, (1.05 - post) / 2.0, (post + 0.05) / 2.0)
    return PosteriorEstimate(probability=float(post), standard_error=se,
                             samples=n_samples, prior=prior,
                             likelihood_with=like1, likelihood_without=like0,
                             degenerate=degenerate)


def indistinguishability(posterior: float) -> float:
    """Binary entropy of the posterior, in bits; H(0) = H(1) = 0."""
    p = float(posterior)
    if not 0.0 <= p <= 1.0:
        raise ValueError("posterior must lie in [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _bayes_log(prior: float, loglike_with: float, loglike_without: float) -> float:
    # posterior odds in log space to survive long-horizon products
    log_odds = math.log(prior / (1.0 - prior)) + loglike_with - loglike_without
    if log_odds > 35:
        return 1.0
    if log_odds < -35:
        return 0.0
    return 1.0 / (1.0 + math.exp(-log_odds))


def indistinguishability_series(seq: TemporalGraphSequence, perturbed_by_mechanism: dict,
                                query: LinkQuery, model: PriorModel,
                                params: PerturbParams, n_samples: int,
                                rng: np.random.Generator,
                                degree_bin: int = DEGREE_BIN) -> dict:
    """Entropy of the posterior per timestamp for each mechanism.

    ``perturbed_by_mechanism`` maps mechanism name ('linkmirage'/'static') to
    its observed perturbed sequence. The prefix likelihood factorizes over
    innovation steps: perturbations are independent across timestamps given
    the hypothesis world, and a verbatim-reused step replicates the queried
    pair's feature deterministically (factor 1). One batch of
    re-perturbations per world serves every prefix. Returns
    {mechanism: [(t, entropy_bits, entropy_se), ...]}.
    """
    if n_samples < 100:
        raise ValueError("posterior estimation needs n_samples >= 100")
    horizon = len(seq)
    full_query = LinkQuery(t=horizon - 1, u=query.u, v=query.v)
    prior = prior_probability(full_query, model, seq)
    uv = (query.u, query.v)
    out = {}
    for mech, perturbed in perturbed_by_mechanism.items():
        observed = observed_features(perturbed, full_query, degree_bin)
        counts, innov = {}, {}
        for present in (True, False):
            world = _hypothesis_world(seq, full_query, present)
            sampler = _SequenceSampler(world, params, mech)
            innov[present] = sampler.innovation_steps(uv)
            counts[present] = sampler.marginal_match_counts(
                observed, uv, n_samples, rng.spawn(1)[0], degree_bin)

        def prefix_loglike(step_counts, steps_innovate, t):
            total = 0.0
            for s in range(t + 1):
                if steps_innovate[s]:
                    total += math.log((step_counts[s] + 1.0) / (n_samples + 2.0))
            return total

        rows = []
        boot_rng = rng.spawn(1)[0]
        reps = 200
        boot = {present: boot_rng.binomial(
            n_samples, np.asarray(counts[present]) / n_samples,
            size=(reps, horizon)) for present in (True, False)}
        for t in range(horizon):
            post = _bayes_log(prior,
                              prefix_loglike(counts[True], innov[True], t),
                              prefix_loglike(counts[False], innov[False], t))
            ents = [indistinguishability(_bayes_log(
                prior,
                prefix_loglike(boot[True][r], innov[True], t),
                prefix_loglike(boot[False][r], innov[False], t)))
                for r in range(reps)]
            rows.append((t, indistinguishability(post), float(np.std(ents))))
        out[mech] = rows
    return out


# -- anti-aggregation ---------------------------------------------------------


def anti_aggregation(g_t: Graph, g_prime_t: Graph, k: int) -> float:
    """TV distance between the k-step original TPM and the perturbed TPM."""
    if not np.array_equal(g_t.vertices, g_prime_t.vertices):
        raise ValueError("anti-aggregation needs identical vertex sets")
    p_k = matrix_power(transition_matrix(g_t), k)
    return tv_distance(p_k, transition_matrix(g_prime_t))


def anti_aggregation_aggregated(perturbed, g_t: Graph, k: int) -> float:
    """Anti-aggregation against the union of all published perturbed graphs."""
    perturbed = list(perturbed)
    if not perturbed:
        raise ValueError("need at least one perturbed graph")
    union = union_graph(perturbed)
    p_k = matrix_power(transition_matrix(g_t), k)
    value, _common = tv_distance_common(p_k, transition_matrix(union))
    return value


@dataclass(frozen=True)
class BoundCheck:
    holds: bool
    lhs: float
    rhs: float


def estimation_error_bound_check(p: TransitionMatrix, p_prime: TransitionMatrix,
                                 p_hat: TransitionMatrix, k: int,
                                 consistency_tol: float = 1e-6) -> BoundCheck:
    """Check ||P^k - P'||_TV <= k ||P - P_hat||_TV for a candidate estimate.

    ``p_hat`` must satisfy p_hat^k = p_prime within ``consistency_tol``; the
    anti-aggregation privacy then lower-bounds the adversary's estimation
    error (scaled by k).
    """
    if tv_distance(matrix_power(p_hat, k), p_prime) > consistency_tol:
        raise ValueError("p_hat^k does not reproduce p_prime within tolerance")
    lhs = tv_distance(matrix_power(p, k), p_prime)
    rhs = k * tv_distance(p, p_hat)
    return BoundCheck(holds=bool(lhs <= rhs + 1e-9), lhs=lhs, rhs=rhs)
