#pragma once

#include <cstdint>
#include <vector>

#include "wrenchval/record.hpp"
#include "wrenchval/tensor.hpp"

namespace wrenchval {

// Rows = true class, cols = predicted class; indices are class ids remapped
// densely by the caller (class ids in our datasets are already 0..C-1).
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t n_classes);

    void add(int true_class, int predicted_class, std::int64_t count = 1);
    std::int64_t at(std::size_t true_class, std::size_t predicted_class) const;
    std::size_t num_classes() const { return n_; }
    std::int64_t total() const;

    const std::vector<std::int64_t>& counts() const { return counts_; }

private:
    std::size_t n_;
    std::vector<std::int64_t> counts_;  // row-major [n, n]
};

struct F1Result {
    std::vector<double> per_class;
    double macro = 0.0;
};

// Per-class F1 = 2PR/(P+R), 0 when degenerate; macro = unweighted mean.
F1Result f1_scores(const ConfusionMatrix& cm);

struct CorrelationResult {
    Tensor matrix;                       // [9, 9] Pearson correlation
    std::vector<int> constant_channels;  // zero-variance channels (rows zeroed, diag kept 1)
};

CorrelationResult compute_correlation_matrix(const Dataset& d);

enum class ChannelRanking { MaxEnergy, PcaVariance };

// Channel indices ranked most-informative first. MaxEnergy: mean per-record
// sum of squares. PcaVariance: |loading| on the first principal component of
// the channel covariance. Ties break toward the lower channel index.
std::vector<int> rank_channels(const Dataset& d, ChannelRanking method);

}  // namespace wrenchval
