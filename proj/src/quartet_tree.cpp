#include "semdist/quartet_tree.hpp"

#include "semdist/error.hpp"
#include "semdist/text.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <sstream>

namespace semdist {

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void replace_neighbor(std::vector<std::vector<int>>& adj, int node, int old_nb, int new_nb) {
    for (int& nb : adj[node]) {
        if (nb == old_nb) {
            nb = new_nb;
            return;
        }
    }
    fail(ErrorKind::InvalidParameter, "internal tree corruption: missing neighbor");
}

// Nodes reachable from `from` without crossing `avoid`.
std::vector<char> side_of(const std::vector<std::vector<int>>& adj, int from, int avoid) {
    std::vector<char> seen(adj.size(), 0);
    std::deque<int> queue{from};
    seen[from] = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int nb : adj[v]) {
            if (nb != avoid && !seen[nb]) {
                seen[nb] = 1;
                queue.push_back(nb);
            }
        }
    }
    return seen;
}

} // namespace

TernaryTree::TernaryTree(std::vector<std::string> labels, std::vector<std::array<int, 2>> edges)
    : labels_(std::move(labels)) {
    size_t n = labels_.size();
    if (n < 3)
        fail(ErrorKind::TooFewObjects, "ternary tree needs at least 3 leaves");
    adjacency_.assign(2 * n - 2, {});
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= static_cast<int>(adjacency_.size()) ||
            b >= static_cast<int>(adjacency_.size()))
            fail(ErrorKind::InvalidParameter, "edge endpoint out of range");
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
    }
    if (!valid())
        fail(ErrorKind::InvalidParameter, "edge list does not form a ternary tree");
}

bool TernaryTree::valid() const {
    size_t n = labels_.size();
    if (n < 3 || adjacency_.size() != 2 * n - 2)
        return false;
    for (size_t v = 0; v < adjacency_.size(); ++v) {
        size_t want = v < n ? 1 : 3;
        if (adjacency_[v].size() != want)
            return false;
        for (int nb : adjacency_[v])
            if (nb < 0 || nb >= static_cast<int>(adjacency_.size()) ||
                nb == static_cast<int>(v))
                return false;
    }
    std::vector<char> seen = side_of(adjacency_, 0, -1);
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

TernaryTree TernaryTree::random(std::vector<std::string> labels, std::mt19937_64& rng) {
    size_t n = labels.size();
    if (n < 3)
        fail(ErrorKind::TooFewObjects, "need at least 3 labels");
    TernaryTree t;
    t.labels_ = std::move(labels);
    t.adjacency_.assign(2 * n - 2, {});
    int center = static_cast<int>(n);
    t.adjacency_[center] = {0, 1, 2};
    t.adjacency_[0] = {center};
    t.adjacency_[1] = {center};
    t.adjacency_[2] = {center};

    std::vector<std::array<int, 2>> edges{{0, center}, {1, center}, {2, center}};
    for (int leaf = 3; leaf < static_cast<int>(n); ++leaf) {
        size_t pick = std::uniform_int_distribution<size_t>(0, edges.size() - 1)(rng);
        auto [a, b] = edges[pick];
        int w = static_cast<int>(n) + leaf - 2;
        replace_neighbor(t.adjacency_, a, b, w);
        replace_neighbor(t.adjacency_, b, a, w);
        t.adjacency_[w] = {a, b, leaf};
        t.adjacency_[leaf] = {w};
        edges[pick] = {a, w};
        edges.push_back({w, b});
        edges.push_back({w, leaf});
    }
    return t;
}

std::vector<std::vector<int>> TernaryTree::leaf_distances() const {
    size_t n = labels_.size();
    std::vector<std::vector<int>> out(n, std::vector<int>(n, 0));
    std::vector<int> dist(adjacency_.size());
    for (size_t src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), -1);
        std::deque<int> queue{static_cast<int>(src)};
        dist[src] = 0;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int nb : adjacency_[v]) {
                if (dist[nb] < 0) {
                    dist[nb] = dist[v] + 1;
                    queue.push_back(nb);
                }
            }
        }
        for (size_t dst = 0; dst < n; ++dst)
            out[src][dst] = dist[dst];
    }
    return out;
}

std::set<std::vector<std::string>> TernaryTree::splits() const {
    std::set<std::vector<std::string>> out;
    size_t n = labels_.size();
    for (size_t u = n; u < adjacency_.size(); ++u) {
        for (int v : adjacency_[u]) {
            if (v <= static_cast<int>(u) || v < static_cast<int>(n))
                continue; // one direction per internal edge
            std::vector<char> side = side_of(adjacency_, v, static_cast<int>(u));
            std::vector<std::string> part;
            bool has_leaf0 = side[0] != 0;
            for (size_t leaf = 0; leaf < n; ++leaf)
                if ((side[leaf] != 0) != has_leaf0)
                    part.push_back(labels_[leaf]);
            std::sort(part.begin(), part.end());
            out.insert(std::move(part));
        }
    }
    return out;
}

QuartetTopology embedded_topology(const TernaryTree& tree,
                                  const std::array<std::string, 4>& quartet,
                                  const DistanceMatrix* matrix) {
    std::array<int, 4> leaf{};
    for (size_t i = 0; i < 4; ++i) {
        auto it = std::find(tree.labels().begin(), tree.labels().end(), quartet[i]);
        if (it == tree.labels().end())
            fail(ErrorKind::UnknownLabel, "leaf '" + quartet[i] + "' not in tree");
        leaf[i] = static_cast<int>(it - tree.labels().begin());
    }
    std::vector<std::vector<int>> ld = tree.leaf_distances();
    int s0 = ld[leaf[0]][leaf[1]] + ld[leaf[2]][leaf[3]];
    int s1 = ld[leaf[0]][leaf[2]] + ld[leaf[1]][leaf[3]];
    int s2 = ld[leaf[0]][leaf[3]] + ld[leaf[1]][leaf[2]];
    QuartetPairing pairing;
    if (s0 <= s1 && s0 <= s2)
        pairing = QuartetPairing::ab_cd;
    else if (s1 <= s2)
        pairing = QuartetPairing::ac_bd;
    else
        pairing = QuartetPairing::ad_bc;

    QuartetTopology topo{quartet, pairing, 0.0};
    if (matrix) {
        std::array<size_t, 4> mi{};
        for (size_t i = 0; i < 4; ++i) {
            auto idx = matrix->index_of(quartet[i]);
            if (!idx)
                fail(ErrorKind::UnknownLabel, "label '" + quartet[i] + "' not in matrix");
            mi[i] = *idx;
        }
        switch (pairing) {
        case QuartetPairing::ab_cd:
            topo.cost = matrix->at(mi[0], mi[1]) + matrix->at(mi[2], mi[3]);
            break;
        case QuartetPairing::ac_bd:
            topo.cost = matrix->at(mi[0], mi[2]) + matrix->at(mi[1], mi[3]);
            break;
        case QuartetPairing::ad_bc:
            topo.cost = matrix->at(mi[0], mi[3]) + matrix->at(mi[1], mi[2]);
            break;
        }
    }
    return topo;
}

namespace {

struct CostTable {
    size_t n = 0;
    std::vector<std::array<double, 3>> quartets; // lexicographic over i<j<k<l
    double m_min = 0.0;
    double m_max = 0.0;
};

CostTable build_table(const DistanceMatrix& m) {
    size_t n = m.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (!std::isfinite(m.at(i, j)))
                fail(ErrorKind::InfiniteDistance,
                     "matrix entry (" + m.labels()[i] + ", " + m.labels()[j] +
                         ") is not finite; substitute infinities first");

    CostTable table;
    table.n = n;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (size_t k = j + 1; k < n; ++k)
                for (size_t l = k + 1; l < n; ++l) {
                    double c0 = m.at(i, j) + m.at(k, l);
                    double c1 = m.at(i, k) + m.at(j, l);
                    double c2 = m.at(i, l) + m.at(j, k);
                    table.quartets.push_back({c0, c1, c2});
                    table.m_min += std::min({c0, c1, c2});
                    table.m_max += std::max({c0, c1, c2});
                }
    return table;
}

// leaf_of[matrix index] = tree leaf index
std::vector<size_t> leaf_mapping(const TernaryTree& tree, const DistanceMatrix& matrix) {
    if (tree.leaf_count() != matrix.size())
        fail(ErrorKind::UnknownLabel, "tree and matrix have different label sets");
    std::vector<size_t> map(matrix.size());
    for (size_t mi = 0; mi < matrix.size(); ++mi) {
        auto it = std::find(tree.labels().begin(), tree.labels().end(), matrix.labels()[mi]);
        if (it == tree.labels().end())
            fail(ErrorKind::UnknownLabel,
                 "matrix label '" + matrix.labels()[mi] + "' not in tree");
        map[mi] = static_cast<size_t>(it - tree.labels().begin());
    }
    return map;
}

double eval_cost(const TernaryTree& tree, const CostTable& table,
                 const std::vector<size_t>& leaf_of) {
    std::vector<std::vector<int>> ld = tree.leaf_distances();
    size_t n = table.n;
    size_t qi = 0;
    double total = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (size_t k = j + 1; k < n; ++k)
                for (size_t l = k + 1; l < n; ++l) {
                    const auto& la = ld[leaf_of[i]];
                    int s0 = la[leaf_of[j]] + ld[leaf_of[k]][leaf_of[l]];
                    int s1 = la[leaf_of[k]] + ld[leaf_of[j]][leaf_of[l]];
                    int s2 = la[leaf_of[l]] + ld[leaf_of[j]][leaf_of[k]];
                    int pick = s0 <= s1 ? (s0 <= s2 ? 0 : 2) : (s1 <= s2 ? 1 : 2);
                    total += table.quartets[qi][static_cast<size_t>(pick)];
                    ++qi;
                }
    return total;
}

TreeScore score_from_cost(double cost, const CostTable& table) {
    TreeScore score;
    score.cost = cost;
    score.m_min = table.m_min;
    score.m_max = table.m_max;
    if (table.m_max == table.m_min) {
        score.degenerate = true;
        score.s = 1.0;
    } else {
        score.s = (table.m_max - cost) / (table.m_max - table.m_min);
        score.s = std::clamp(score.s, 0.0, 1.0);
    }
    return score;
}

std::vector<size_t> identity_mapping(size_t n) {
    std::vector<size_t> map(n);
    for (size_t i = 0; i < n; ++i)
        map[i] = i;
    return map;
}

} // namespace

double tree_cost(const TernaryTree& tree, const DistanceMatrix& matrix) {
    CostTable table = build_table(matrix);
    return eval_cost(tree, table, leaf_mapping(tree, matrix));
}

TreeScore score_tree(const TernaryTree& tree, const DistanceMatrix& matrix) {
    CostTable table = build_table(matrix);
    return score_from_cost(eval_cost(tree, table, leaf_mapping(tree, matrix)), table);
}

namespace {

void leaf_pair_swap(std::vector<std::vector<int>>& adj, size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
    int a = pick(rng);
    int b = pick(rng);
    if (a == b)
        return;
    int pa = adj[a][0];
    int pb = adj[b][0];
    if (pa == pb)
        return;
    replace_neighbor(adj, pa, a, b);
    replace_neighbor(adj, pb, b, a);
    adj[a][0] = pb;
    adj[b][0] = pa;
}

std::vector<std::array<int, 2>> directed_edges(const std::vector<std::vector<int>>& adj) {
    std::vector<std::array<int, 2>> out;
    for (size_t u = 0; u < adj.size(); ++u)
        for (int p : adj[u])
            out.push_back({static_cast<int>(u), p});
    return out;
}

void subtree_pair_swap(std::vector<std::vector<int>>& adj, std::mt19937_64& rng) {
    std::vector<std::array<int, 2>> edges = directed_edges(adj);
    std::uniform_int_distribution<size_t> pick(0, edges.size() - 1);
    for (int attempt = 0; attempt < 10; ++attempt) {
        auto [u1, p1] = edges[pick(rng)];
        auto [u2, p2] = edges[pick(rng)];
        if (u1 == u2)
            continue;
        std::vector<char> s1 = side_of(adj, u1, p1);
        if (s1[u2] || s1[p2])
            continue;
        std::vector<char> s2 = side_of(adj, u2, p2);
        if (s2[u1] || s2[p1])
            continue;
        replace_neighbor(adj, p1, u1, u2);
        replace_neighbor(adj, p2, u2, u1);
        replace_neighbor(adj, u1, p1, p2);
        replace_neighbor(adj, u2, p2, p1);
        return;
    }
}

void detach_reattach(std::vector<std::vector<int>>& adj, size_t n, std::mt19937_64& rng) {
    std::vector<std::array<int, 2>> candidates;
    for (size_t u = 0; u < adj.size(); ++u)
        for (int p : adj[u])
            if (adj[p].size() == 3)
                candidates.push_back({static_cast<int>(u), p});
    if (candidates.empty())
        return;
    auto [u, p] =
        candidates[std::uniform_int_distribution<size_t>(0, candidates.size() - 1)(rng)];

    std::vector<char> detached = side_of(adj, u, p);
    int x = -1, y = -1;
    for (int nb : adj[p]) {
        if (nb == u)
            continue;
        (x < 0 ? x : y) = nb;
    }

    // Edges of the remaining tree once p is suppressed: (x, y) plus every
    // edge not touching the detached side or p.
    std::vector<std::array<int, 2>> sites{{x, y}};
    for (size_t a = 0; a < adj.size(); ++a) {
        if (detached[a] || static_cast<int>(a) == p)
            continue;
        for (int b : adj[a]) {
            if (detached[b] || b == p || b <= static_cast<int>(a))
                continue;
            sites.push_back({static_cast<int>(a), b});
        }
    }
    auto [a, b] = sites[std::uniform_int_distribution<size_t>(0, sites.size() - 1)(rng)];

    replace_neighbor(adj, x, p, y);
    replace_neighbor(adj, y, p, x);
    replace_neighbor(adj, a, b, p);
    replace_neighbor(adj, b, a, p);
    adj[p] = {a, b, u};
    (void)n;
}

} // namespace

TernaryTree mutate(const TernaryTree& tree, std::mt19937_64& rng, int max_composite) {
    TernaryTree out = tree;
    size_t n = out.labels_.size();
    int k = 1;
    while (k < max_composite && (rng() & 1u))
        ++k;
    for (int step = 0; step < k; ++step) {
        switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0:
            leaf_pair_swap(out.adjacency_, n, rng);
            break;
        case 1:
            subtree_pair_swap(out.adjacency_, rng);
            break;
        default:
            detach_reattach(out.adjacency_, n, rng);
            break;
        }
    }
    return out;
}

void enumerate_ternary_trees(const std::vector<std::string>& labels,
                             const std::function<void(const TernaryTree&)>& visit) {
    size_t n = labels.size();
    if (n < 3)
        fail(ErrorKind::TooFewObjects, "need at least 3 labels");

    std::vector<std::array<int, 2>> edges{{0, static_cast<int>(n)},
                                          {1, static_cast<int>(n)},
                                          {2, static_cast<int>(n)}};

    std::function<void(std::vector<std::array<int, 2>>&, int)> recurse =
        [&](std::vector<std::array<int, 2>>& current, int leaf) {
            if (leaf == static_cast<int>(n)) {
                TernaryTree t;
                t.labels_ = labels;
                t.adjacency_.assign(2 * n - 2, {});
                for (auto [a, b] : current) {
                    t.adjacency_[a].push_back(b);
                    t.adjacency_[b].push_back(a);
                }
                visit(t);
                return;
            }
            int w = static_cast<int>(n) + leaf - 2;
            size_t edge_count = current.size();
            for (size_t e = 0; e < edge_count; ++e) {
                auto [a, b] = current[e];
                current[e] = {a, w};
                current.push_back({w, b});
                current.push_back({w, leaf});
                recurse(current, leaf + 1);
                current.pop_back();
                current.pop_back();
                current[e] = {a, b};
            }
        };
    recurse(edges, 3);
}

namespace {

struct RestartOutcome {
    TernaryTree tree;
    double cost = 0.0;
    std::vector<TracePoint> trace;
};

RestartOutcome run_restart(const DistanceMatrix& matrix, const CostTable& table,
                           const OptimizeParams& params, int restart) {
    std::mt19937_64 rng(mix_seed(params.seed, static_cast<uint64_t>(restart)));
    std::vector<size_t> ident = identity_mapping(table.n);

    RestartOutcome out;
    out.tree = TernaryTree::random(matrix.labels(), rng);
    out.cost = eval_cost(out.tree, table, ident);
    out.trace.push_back({0, score_from_cost(out.cost, table).s});

    uint64_t stall = 0;
    uint64_t step = 0;
    while (stall < params.stall_limit) {
        ++step;
        TernaryTree candidate = mutate(out.tree, rng, params.max_composite);
        double cost = eval_cost(candidate, table, ident);
        if (cost < out.cost) {
            out.tree = std::move(candidate);
            out.cost = cost;
            out.trace.push_back({step, score_from_cost(cost, table).s});
            stall = 0;
        } else {
            ++stall;
        }
    }
    return out;
}

} // namespace

OptimizeResult optimize(const DistanceMatrix& matrix, const OptimizeParams& params) {
    if (matrix.size() < 4)
        fail(ErrorKind::TooFewObjects, "quartet optimization needs at least 4 objects");
    if (params.restarts < 1 || params.stall_limit < 1 || params.max_composite < 1)
        fail(ErrorKind::InvalidParameter, "restarts, stall_limit, max_composite must be >= 1");

    CostTable table = build_table(matrix);

    if (matrix.size() == 4) {
        // Only 3 topologies exist; evaluate them all.
        auto [tree, score] = brute_force(matrix);
        OptimizeResult result{std::move(tree), score, {{0, score.s}}, 0};
        return result;
    }

    std::vector<std::future<RestartOutcome>> futures;
    futures.reserve(params.restarts);
    for (int r = 0; r < params.restarts; ++r)
        futures.push_back(std::async(std::launch::async, run_restart, std::cref(matrix),
                                     std::cref(table), std::cref(params), r));

    OptimizeResult result;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < params.restarts; ++r) {
        RestartOutcome outcome = futures[static_cast<size_t>(r)].get();
        if (outcome.cost < best_cost) {
            best_cost = outcome.cost;
            result.tree = std::move(outcome.tree);
            result.trace = std::move(outcome.trace);
            result.winning_restart = r;
        }
    }
    result.score = score_from_cost(best_cost, table);
    return result;
}

std::pair<TernaryTree, TreeScore> brute_force(const DistanceMatrix& matrix) {
    size_t n = matrix.size();
    if (n < 4)
        fail(ErrorKind::TooFewObjects, "brute force needs at least 4 objects");
    if (n > 7)
        fail(ErrorKind::TooLarge, "brute force is limited to 7 objects (945 trees)");

    CostTable table = build_table(matrix);
    std::vector<size_t> ident = identity_mapping(n);

    TernaryTree best;
    double best_cost = std::numeric_limits<double>::infinity();
    enumerate_ternary_trees(matrix.labels(), [&](const TernaryTree& t) {
        double cost = eval_cost(t, table, ident);
        if (cost < best_cost) {
            best_cost = cost;
            best = t;
        }
    });
    return {best, score_from_cost(best_cost, table)};
}

namespace {

struct Embedding {
    int root_leaf = 0;
    int top = 0;                          // the internal node adjacent to root_leaf
    std::vector<int> parent;              // -1 for root leaf
    std::vector<std::vector<int>> children;

    void collect_leaves(int v, size_t n, std::vector<int>& out) const {
        if (v < static_cast<int>(n)) {
            out.push_back(v);
            return;
        }
        for (int c : children[v])
            collect_leaves(c, n, out);
    }

    std::vector<int> ring(size_t n) const {
        std::vector<int> out{root_leaf};
        collect_leaves(top, n, out);
        return out;
    }
};

Embedding build_embedding(const TernaryTree& tree) {
    Embedding e;
    e.root_leaf = 0;
    e.top = tree.adjacency()[0][0];
    e.parent.assign(tree.node_count(), -1);
    e.children.assign(tree.node_count(), {});
    std::deque<int> queue{e.top};
    e.parent[e.top] = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int nb : tree.adjacency()[v]) {
            if (nb == e.parent[v])
                continue;
            e.parent[nb] = v;
            e.children[v].push_back(nb);
            queue.push_back(nb);
        }
    }
    return e;
}

double ring_sum(const std::vector<int>& ring, const DistanceMatrix& matrix,
                const std::vector<size_t>& matrix_of) {
    double total = 0.0;
    for (size_t i = 0; i < ring.size(); ++i) {
        size_t j = (i + 1) % ring.size();
        total += matrix.at(matrix_of[ring[i]], matrix_of[ring[j]]);
    }
    return total;
}

} // namespace

RingOrder ring_order(const TernaryTree& tree, const DistanceMatrix& matrix) {
    size_t n = tree.leaf_count();
    // matrix_of[tree leaf] = matrix index
    std::vector<size_t> matrix_of(n);
    for (size_t leaf = 0; leaf < n; ++leaf) {
        auto idx = matrix.index_of(tree.labels()[leaf]);
        if (!idx)
            fail(ErrorKind::UnknownLabel, "leaf '" + tree.labels()[leaf] + "' not in matrix");
        matrix_of[leaf] = *idx;
    }

    Embedding emb = build_embedding(tree);
    double best = ring_sum(emb.ring(n), matrix, matrix_of);

    bool improved = true;
    while (improved) {
        improved = false;
        for (size_t v = n; v < tree.node_count(); ++v) {
            std::reverse(emb.children[v].begin(), emb.children[v].end());
            double candidate = ring_sum(emb.ring(n), matrix, matrix_of);
            if (candidate < best) {
                best = candidate;
                improved = true;
            } else {
                std::reverse(emb.children[v].begin(), emb.children[v].end());
            }
        }
    }

    RingOrder out;
    std::vector<int> ring = emb.ring(n);
    for (int leaf : ring)
        out.leaves.push_back(tree.labels()[leaf]);
    for (size_t i = 0; i < ring.size(); ++i) {
        size_t j = (i + 1) % ring.size();
        out.adjacent.push_back(matrix.at(matrix_of[ring[i]], matrix_of[ring[j]]));
    }
    out.total = best;
    return out;
}

namespace {

bool newick_needs_quotes(const std::string& label) {
    if (label.empty())
        return true;
    for (char c : label) {
        bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                     (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
        if (!plain)
            return true;
    }
    return false;
}

std::string newick_label(const std::string& label) {
    if (!newick_needs_quotes(label))
        return label;
    std::string out = "'";
    for (char c : label) {
        if (c == '\'')
            out += "''";
        else
            out += c;
    }
    out += "'";
    return out;
}

void write_newick(const TernaryTree& tree, int v, int parent, std::string& out) {
    if (v < static_cast<int>(tree.leaf_count())) {
        out += newick_label(tree.labels()[v]);
        return;
    }
    out += '(';
    bool first = true;
    for (int nb : tree.adjacency()[v]) {
        if (nb == parent)
            continue;
        if (!first)
            out += ',';
        first = false;
        write_newick(tree, nb, v, out);
    }
    out += ')';
}

} // namespace

std::string to_newick(const TernaryTree& tree) {
    int root = tree.adjacency()[0][0];
    std::string out;
    write_newick(tree, root, -1, out);
    out += ';';
    return out;
}

namespace {

struct ParsedNode {
    std::string label;
    std::vector<int> children;
};

} // namespace

TernaryTree TernaryTree::from_newick(std::string_view text) {
    std::vector<ParsedNode> nodes;
    size_t pos = 0;

    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };
    auto parse_label = [&]() -> std::string {
        skip_ws();
        std::string label;
        if (pos < text.size() && text[pos] == '\'') {
            ++pos;
            while (pos < text.size()) {
                if (text[pos] == '\'') {
                    if (pos + 1 < text.size() && text[pos + 1] == '\'') {
                        label += '\'';
                        pos += 2;
                    } else {
                        ++pos;
                        break;
                    }
                } else {
                    label += text[pos++];
                }
            }
        } else {
            while (pos < text.size() && text[pos] != ',' && text[pos] != ')' &&
                   text[pos] != '(' && text[pos] != ';' && text[pos] != ':')
                label += text[pos++];
            while (!label.empty() && std::isspace(static_cast<unsigned char>(label.back())))
                label.pop_back();
        }
        return label;
    };
    auto skip_length = [&] {
        skip_ws();
        if (pos < text.size() && text[pos] == ':') {
            ++pos;
            while (pos < text.size() && text[pos] != ',' && text[pos] != ')' &&
                   text[pos] != ';')
                ++pos;
        }
    };

    std::function<int()> parse_node = [&]() -> int {
        skip_ws();
        if (pos >= text.size())
            fail(ErrorKind::FormatError, "unexpected end of newick text");
        int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        if (text[pos] == '(') {
            ++pos;
            while (true) {
                int child = parse_node();
                nodes[id].children.push_back(child);
                skip_ws();
                if (pos >= text.size())
                    fail(ErrorKind::FormatError, "unterminated group in newick text");
                if (text[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (text[pos] == ')') {
                    ++pos;
                    break;
                }
                fail(ErrorKind::FormatError, std::string("unexpected character '") +
                                                 text[pos] + "' in newick text");
            }
            parse_label(); // optional internal label, ignored
            skip_length();
        } else {
            nodes[id].label = parse_label();
            if (nodes[id].label.empty())
                fail(ErrorKind::FormatError, "empty leaf label in newick text");
            skip_length();
        }
        return id;
    };

    int root = parse_node();
    skip_ws();
    if (pos >= text.size() || text[pos] != ';')
        fail(ErrorKind::FormatError, "newick text must end with ';'");

    // Flatten to adjacency, then splice out degree-2 nodes (the artificial
    // root of a binary-style rooted representation).
    size_t total = nodes.size();
    std::vector<std::vector<int>> adj(total);
    for (size_t v = 0; v < total; ++v)
        for (int c : nodes[v].children) {
            adj[v].push_back(c);
            adj[c].push_back(static_cast<int>(v));
        }
    (void)root;

    std::vector<char> removed(total, 0);
    for (size_t v = 0; v < total; ++v) {
        if (adj[v].size() == 2 && nodes[v].children.size() > 0) {
            int a = adj[v][0];
            int b = adj[v][1];
            replace_neighbor(adj, a, static_cast<int>(v), b);
            replace_neighbor(adj, b, static_cast<int>(v), a);
            adj[v].clear();
            removed[v] = 1;
        }
    }

    std::vector<int> leaf_ids, internal_ids;
    for (size_t v = 0; v < total; ++v) {
        if (removed[v])
            continue;
        if (adj[v].size() == 1) {
            if (nodes[v].label.empty())
                fail(ErrorKind::FormatError, "leaf without label in newick text");
            leaf_ids.push_back(static_cast<int>(v));
        } else if (adj[v].size() == 3) {
            internal_ids.push_back(static_cast<int>(v));
        } else {
            fail(ErrorKind::FormatError,
                 "node of degree " + std::to_string(adj[v].size()) +
                     " is not allowed in an unrooted ternary tree");
        }
    }

    size_t n = leaf_ids.size();
    if (n < 3 || internal_ids.size() != n - 2)
        fail(ErrorKind::FormatError, "newick tree is not an unrooted ternary tree");

    std::vector<int> new_id(total, -1);
    TernaryTree out;
    for (size_t i = 0; i < n; ++i) {
        new_id[leaf_ids[i]] = static_cast<int>(i);
        out.labels_.push_back(nodes[leaf_ids[i]].label);
    }
    for (size_t i = 0; i < internal_ids.size(); ++i)
        new_id[internal_ids[i]] = static_cast<int>(n + i);

    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (out.labels_[i] == out.labels_[j])
                fail(ErrorKind::FormatError, "duplicate leaf label '" + out.labels_[i] + "'");

    out.adjacency_.assign(2 * n - 2, {});
    for (size_t v = 0; v < total; ++v) {
        if (removed[v])
            continue;
        for (int nb : adj[v])
            out.adjacency_[new_id[v]].push_back(new_id[nb]);
    }
    if (!out.valid())
        fail(ErrorKind::FormatError, "newick tree is not a valid ternary tree");
    return out;
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string to_dot(const TernaryTree& tree, const TreeScore* score, const RingOrder* ring,
                   int precision) {
    std::ostringstream out;
    out << "graph quartet_tree {\n";
    if (score)
        out << "  label=\"S(T)=" << format_fixed(score->s, 6) << "\";\n  labelloc=\"t\";\n";
    size_t n = tree.leaf_count();
    for (size_t v = 0; v < n; ++v)
        out << "  n" << v << " [label=\"" << dot_escape(tree.labels()[v]) << "\"];\n";
    for (size_t v = n; v < tree.node_count(); ++v)
        out << "  n" << v << " [shape=point, label=\"\"];\n";
    for (size_t v = 0; v < tree.node_count(); ++v)
        for (int nb : tree.adjacency()[v])
            if (nb > static_cast<int>(v))
                out << "  n" << v << " -- n" << nb << ";\n";
    if (ring) {
        auto leaf_index = [&](const std::string& label) -> size_t {
            auto it = std::find(tree.labels().begin(), tree.labels().end(), label);
            return static_cast<size_t>(it - tree.labels().begin());
        };
        for (size_t i = 0; i < ring->leaves.size(); ++i) {
            size_t j = (i + 1) % ring->leaves.size();
            out << "  n" << leaf_index(ring->leaves[i]) << " -- n"
                << leaf_index(ring->leaves[j]) << " [style=dotted, constraint=false, label=\""
                << format_fixed(ring->adjacent[i], precision) << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

} // namespace semdist
