#pragma once

#include "semdist/matrix.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace semdist {

// Unrooted tree with every internal node of degree exactly 3. Leaves are
// nodes 0..n-1 and carry the labels; internal nodes are n..2n-3.
class TernaryTree {
public:
    TernaryTree() = default;
    TernaryTree(std::vector<std::string> labels, std::vector<std::array<int, 2>> edges);

    static TernaryTree random(std::vector<std::string> labels, std::mt19937_64& rng);
    static TernaryTree from_newick(std::string_view text);

    size_t leaf_count() const { return labels_.size(); }
    size_t node_count() const { return adjacency_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }

    bool valid() const;

    // Pairwise leaf distances in edge counts.
    std::vector<std::vector<int>> leaf_distances() const;

    // Nontrivial splits (one per internal edge): each is the sorted label
    // set of the side not containing labels()[0]. Two trees over the same
    // labels are isomorphic iff their split sets are equal.
    std::set<std::vector<std::string>> splits() const;

private:
    friend TernaryTree mutate(const TernaryTree&, std::mt19937_64&, int);
    friend void enumerate_ternary_trees(const std::vector<std::string>&,
                                        const std::function<void(const TernaryTree&)>&);

    std::vector<std::string> labels_;
    std::vector<std::vector<int>> adjacency_;
};

enum class QuartetPairing : uint8_t {
    ab_cd = 0, // {a,b} | {c,d}
    ac_bd = 1,
    ad_bc = 2,
};

struct QuartetTopology {
    std::array<std::string, 4> leaves;
    QuartetPairing pairing;
    double cost = 0.0; // d(pair1) + d(pair2) when a matrix is supplied
};

struct TreeScore {
    double s = 0.0;     // (m_max - cost) / (m_max - m_min), in [0, 1]
    double cost = 0.0;  // C(T)
    double m_min = 0.0;
    double m_max = 0.0;
    bool degenerate = false; // m_max == m_min; every tree scores 1
};

// The unique 2+2 pairing of the four leaves consistent with the tree.
QuartetTopology embedded_topology(const TernaryTree& tree,
                                  const std::array<std::string, 4>& quartet,
                                  const DistanceMatrix* matrix = nullptr);

// Summed matrix cost of the embedded topology over all C(n,4) quartets.
double tree_cost(const TernaryTree& tree, const DistanceMatrix& matrix);

TreeScore score_tree(const TernaryTree& tree, const DistanceMatrix& matrix);

// One composite mutation: k primitives with Pr(k) proportional to 2^-k,
// each drawn from {leaf-pair swap, subtree-pair swap, subtree detach-and-
// reattach}.
TernaryTree mutate(const TernaryTree& tree, std::mt19937_64& rng, int max_composite = 6);

struct OptimizeParams {
    int restarts = 8;
    uint64_t stall_limit = 10000; // consecutive non-improving mutations per restart
    uint64_t seed = 1;
    int max_composite = 6;
};

struct TracePoint {
    uint64_t step;
    double best_s;
};

struct OptimizeResult {
    TernaryTree tree;
    TreeScore score;
    std::vector<TracePoint> trace; // winning restart, improvements only
    int winning_restart = 0;
};

// Randomized hill-climbing on summed quartet cost. Deterministic given the
// seed; restarts run concurrently with per-restart derived seeds and the
// final pick is by (score, restart index).
OptimizeResult optimize(const DistanceMatrix& matrix, const OptimizeParams& params = {});

// Exhaustive search over all (2n-5)!! trees; n must be in [4, 7].
std::pair<TernaryTree, TreeScore> brute_force(const DistanceMatrix& matrix);

// Deterministic enumeration of every unrooted ternary tree on the labels.
void enumerate_ternary_trees(const std::vector<std::string>& labels,
                             const std::function<void(const TernaryTree&)>& visit);

struct RingOrder {
    std::vector<std::string> leaves;  // circular order
    std::vector<double> adjacent;     // adjacent[i] = d(leaves[i], leaves[i+1 mod n])
    double total = 0.0;
};

// Planar embedding whose circular leaf order locally minimizes the summed
// adjacent distances under child-order flips.
RingOrder ring_order(const TernaryTree& tree, const DistanceMatrix& matrix);

std::string to_newick(const TernaryTree& tree);
std::string to_dot(const TernaryTree& tree, const TreeScore* score = nullptr,
                   const RingOrder* ring = nullptr, int precision = 3);

} // namespace semdist
