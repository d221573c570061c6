#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "rde/prime_field.hpp"
#include "rde/source_model.hpp"
#include "rde/weight_vector.hpp"

namespace rde {

// Successive-cancellation probability engine.
//
// Given independent per-position weights V_0..V_{n-1} over GF(q) symbols, the
// engine models the law  P(u^n) ∝ ∏_j V_j(x̂_j)  where x̂^n = polar_transform(u^n),
// and serves the chain-rule conditionals P(u_t | u^{t-1}) one input symbol at a
// time. It exploits the kernel structure: feeding the input stream to a node in
// adjacent pairs (u_{2s}, u_{2s+1}) splits it into a sum stream u_{2s}+u_{2s+1}
// for the child covering the even residue positions and a copy stream u_{2s+1}
// for the odd residue child. Child conditionals are cached per pair and only
// recomputed lazily, so a full conditional()/advance() sweep over all n inputs
// costs O(q^2 · n log n).
class ScProcess {
  public:
    ScProcess() = default;
    explicit ScProcess(std::vector<WeightVector> leaves) { reset(std::move(leaves)); }

    void reset(std::vector<WeightVector> leaves) {
        const int n = int(leaves.size());
        if (n < 1 || !is_power_of_two(n))
            throw std::invalid_argument("ScProcess: leaf count must be a power of two");
        q_ = leaves[0].q;
        for (auto& wv : leaves) {
            if (wv.q != q_) throw std::invalid_argument("ScProcess: mixed alphabet sizes");
            wv.normalize();
        }
        n_ = n;
        k_ = log2_exact(n);
        t_ = 0;
        leaves_ = std::move(leaves);
        uniform_ = true;
        for (const auto& wv : leaves_)
            if (!wv.is_uniform()) { uniform_ = false; break; }
        nodes_.assign(std::size_t(2) * n_ - 1, Node{});
    }

    int size() const { return n_; }
    int alphabet() const { return q_; }
    // Index of the next input symbol to be consumed.
    int position() const { return t_; }
    // True when every leaf weight is uniform; all conditionals are then uniform
    // and the recursion is skipped entirely (exact, not approximate).
    bool uniform_leaves() const { return uniform_; }

    // P(U_t = · | U^{t-1} = consumed prefix). Throws impossible_path if the
    // consumed prefix has probability zero.
    WeightVector conditional() {
        if (t_ >= n_) throw std::logic_error("ScProcess: conditional past end of block");
        if (uniform_) return WeightVector::uniform(q_);
        return node_conditional(0, 0);
    }

    void advance(Symbol u) {
        if (t_ >= n_) throw std::logic_error("ScProcess: advance past end of block");
        if (u < 0 || u >= q_) throw std::invalid_argument("ScProcess: symbol out of range");
        if (!uniform_) node_advance(0, 0, u);
        ++t_;
    }

  private:
    struct Node {
        int cnt = 0;       // symbols consumed by this node
        Symbol v1 = 0;     // first symbol of the in-progress pair
        int tag = -1;      // pair index for which (wa, wb) are valid
        WeightVector wa;   // even child conditional (sum stream)
        WeightVector wb;   // odd child conditional (copy stream)
    };

    // Node (d, o) covers x̂ positions congruent to o mod 2^d; leaves are d = k_.
    WeightVector node_conditional(int d, int o) {
        if (d == k_) return leaves_[o];
        Node& nd = nodes_[std::size_t((1 << d) - 1 + o)];
        const int pair = nd.cnt >> 1;
        if (nd.tag != pair) {
            nd.wa = node_conditional(d + 1, o);
            nd.wb = node_conditional(d + 1, o + (1 << d));
            nd.tag = pair;
        }
        if ((nd.cnt & 1) == 0) return sc_combine_minus(nd.wa, nd.wb);
        return sc_combine_plus(nd.wa, nd.wb, nd.v1);
    }

    void node_advance(int d, int o, Symbol u) {
        if (d == k_) return;
        Node& nd = nodes_[std::size_t((1 << d) - 1 + o)];
        if ((nd.cnt & 1) == 0) {
            nd.v1 = u;
        } else {
            node_advance(d + 1, o, Symbol((nd.v1 + u) % q_));
            node_advance(d + 1, o + (1 << d), u);
        }
        ++nd.cnt;
    }

    int n_ = 0, k_ = 0, q_ = 0, t_ = 0;
    bool uniform_ = false;
    std::vector<Node> nodes_;
    std::vector<WeightVector> leaves_;
};

// One-shot convenience: conditional of U_i given the prefix path = u^{i-1}.
// For full-vector evaluation prefer a single ScProcess with interleaved
// conditional()/advance() calls, which shares work across indices.
inline WeightVector sc_conditionals(const std::vector<WeightVector>& leaf_weights,
                                    const SymbolVector& path) {
    if (path.size() >= leaf_weights.size())
        throw std::invalid_argument("sc_conditionals: path must be shorter than the block");
    ScProcess proc(leaf_weights);
    for (Symbol u : path) proc.advance(u);
    return proc.conditional();
}

// Leaf weights for the conditioned chain P(u_i | u^{i-1}, x^n, y^n). With the
// reconstruction treated through its reverse factorization, V_j(x̂) is
// proportional to P(x̂)·W(x_j,y_j|x̂) = Q(x_j,y_j)·P(x̂|x_j,y_j), i.e. simply the
// forward test-channel row at (x_j, y_j).
inline std::vector<WeightVector> conditioned_leaves(const TestChannel& ch,
                                                    const SymbolVector& xs,
                                                    const SymbolVector& ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("conditioned_leaves: sequence length mismatch");
    std::vector<WeightVector> leaves;
    leaves.reserve(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        WeightVector wv;
        wv.q = ch.q;
        const double* row = ch.row(xs[j], ys[j]);
        for (int a = 0; a < ch.q; ++a) wv.w[std::size_t(a)] = row[a];
        wv.normalize();
        leaves.push_back(wv);
    }
    return leaves;
}

// Leaf weights for the marginal chain P(u_i | u^{i-1}): every position carries
// the reconstruction prior P(x̂).
inline std::vector<WeightVector> marginal_leaves(const JointSource& src, const TestChannel& ch,
                                                 int n) {
    const std::vector<double> prior = ch.reconstruction_prior(src);
    WeightVector wv;
    wv.q = ch.q;
    for (int a = 0; a < ch.q; ++a) wv.w[std::size_t(a)] = prior[std::size_t(a)];
    wv.normalize();
    return std::vector<WeightVector>(std::size_t(n), wv);
}

}  // namespace rde
