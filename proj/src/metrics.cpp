#include "wrenchval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wrenchval/errors.hpp"
#include "wrenchval/kernels.hpp"

namespace wrenchval {

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes) : n_(n_classes), counts_(n_classes * n_classes, 0) {
    if (n_classes == 0) throw DataError("confusion matrix needs at least one class");
}

void ConfusionMatrix::add(int true_class, int predicted_class, std::int64_t count) {
    if (true_class < 0 || predicted_class < 0 || static_cast<std::size_t>(true_class) >= n_ ||
        static_cast<std::size_t>(predicted_class) >= n_)
        throw DataError("confusion matrix index out of range");
    if (count < 0) throw DataError("confusion matrix counts must be nonnegative");
    counts_[static_cast<std::size_t>(true_class) * n_ + static_cast<std::size_t>(predicted_class)] += count;
}

std::int64_t ConfusionMatrix::at(std::size_t t, std::size_t p) const { return counts_[t * n_ + p]; }

std::int64_t ConfusionMatrix::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

F1Result f1_scores(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) throw DataError("confusion matrix is empty");
    const std::size_t n = cm.num_classes();
    F1Result out;
    out.per_class.resize(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        std::int64_t tp = cm.at(c, c), fp = 0, fn = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == c) continue;
            fp += cm.at(k, c);
            fn += cm.at(c, k);
        }
        const double p = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double r = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        out.per_class[c] = (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
    }
    out.macro = std::accumulate(out.per_class.begin(), out.per_class.end(), 0.0) /
                static_cast<double>(n);
    return out;
}

namespace {

// Per-channel mean/variance and the full covariance over every sample of every record.
struct ChannelMoments {
    std::array<double, kNumChannels> mean{};
    std::array<std::array<double, kNumChannels>, kNumChannels> cov{};  // population covariance
    std::size_t total_samples = 0;
};

ChannelMoments channel_moments(const Dataset& d) {
    ChannelMoments m;
    for (const auto& rec : d.records) m.total_samples += rec.length();
    if (m.total_samples == 0) throw DataError("dataset has no samples");

    for (const auto& rec : d.records) {
        const std::size_t n = rec.length();
        for (int c = 0; c < kNumChannels; ++c) {
            const double* row = rec.channels.row(c);
            for (std::size_t i = 0; i < n; ++i) m.mean[c] += row[i];
        }
    }
    for (int c = 0; c < kNumChannels; ++c) m.mean[c] /= static_cast<double>(m.total_samples);

    for (const auto& rec : d.records) {
        const std::size_t n = rec.length();
        for (int a = 0; a < kNumChannels; ++a) {
            const double* ra = rec.channels.row(a);
            for (int b = a; b < kNumChannels; ++b) {
                const double* rb = rec.channels.row(b);
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) acc += (ra[i] - m.mean[a]) * (rb[i] - m.mean[b]);
                m.cov[a][b] += acc;
            }
        }
    }
    for (int a = 0; a < kNumChannels; ++a)
        for (int b = a; b < kNumChannels; ++b) {
            m.cov[a][b] /= static_cast<double>(m.total_samples);
            m.cov[b][a] = m.cov[a][b];
        }
    return m;
}

constexpr double kVarEps = 1e-24;

}  // namespace

CorrelationResult compute_correlation_matrix(const Dataset& d) {
    if (d.records.empty()) throw DataError("cannot compute correlation of an empty dataset");
    const ChannelMoments m = channel_moments(d);

    CorrelationResult out;
    out.matrix = Tensor({kNumChannels, kNumChannels});
    std::array<bool, kNumChannels> constant{};
    for (int c = 0; c < kNumChannels; ++c) {
        constant[c] = m.cov[c][c] < kVarEps;
        if (constant[c]) out.constant_channels.push_back(c);
    }
    for (int a = 0; a < kNumChannels; ++a) {
        for (int b = 0; b < kNumChannels; ++b) {
            if (a == b) {
                out.matrix.at(a, b) = 1.0;
            } else if (constant[a] || constant[b]) {
                out.matrix.at(a, b) = 0.0;
            } else {
                double r = m.cov[a][b] / std::sqrt(m.cov[a][a] * m.cov[b][b]);
                out.matrix.at(a, b) = std::clamp(r, -1.0, 1.0);
            }
        }
    }
    return out;
}

std::vector<int> rank_channels(const Dataset& d, ChannelRanking method) {
    if (d.records.empty()) throw DataError("cannot rank channels of an empty dataset");

    std::array<double, kNumChannels> score{};
    if (method == ChannelRanking::MaxEnergy) {
        for (const auto& rec : d.records) {
            const std::size_t n = rec.length();
            for (int c = 0; c < kNumChannels; ++c)
                score[c] += kernels::sum_sq(rec.channels.row(c), n);
        }
        for (double& s : score) s /= static_cast<double>(d.records.size());
    } else {
        // dominant eigenvector of the channel covariance via power iteration
        const ChannelMoments m = channel_moments(d);
        std::array<double, kNumChannels> v;
        v.fill(1.0 / std::sqrt(static_cast<double>(kNumChannels)));
        std::array<double, kNumChannels> w{};
        for (int iter = 0; iter < 2000; ++iter) {
            for (int a = 0; a < kNumChannels; ++a) {
                w[a] = 0.0;
                for (int b = 0; b < kNumChannels; ++b) w[a] += m.cov[a][b] * v[b];
            }
            double norm = 0.0;
            for (double x : w) norm += x * x;
            norm = std::sqrt(norm);
            if (norm < kVarEps) break;  // all-zero covariance; fall through to tie-break
            double delta = 0.0;
            for (int a = 0; a < kNumChannels; ++a) {
                w[a] /= norm;
                delta = std::max(delta, std::abs(std::abs(w[a]) - std::abs(v[a])));
            }
            v = w;
            if (delta < 1e-14 && iter > 2) break;
        }
        for (int c = 0; c < kNumChannels; ++c) score[c] = std::abs(v[c]);
    }

    std::vector<int> order(kNumChannels);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });
    return order;
}

}  // namespace wrenchval
