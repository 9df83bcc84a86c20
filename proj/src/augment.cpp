#include "wrenchval/augment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wrenchval/errors.hpp"
#include "wrenchval/random.hpp"

namespace wrenchval {

using nlohmann::json;

void AugmentPolicy::validate() const {
    if (!(0 < dilation_lo && dilation_lo <= 1.0 && 1.0 <= dilation_hi))
        throw DataError("dilation range must satisfy 0 < lo <= 1 <= hi");
    if (translation_range < 0) throw DataError("translation_range must be nonnegative");
    if (noise_std_fraction < 0) throw DataError("noise_std_fraction must be nonnegative");
    if (target_multiplier < 1.0) throw DataError("target_multiplier must be >= 1");
}

json AugmentPolicy::to_json() const {
    return json{{"dilation_range", {dilation_lo, dilation_hi}},
                {"translation_range", translation_range},
                {"noise_std_fraction", noise_std_fraction},
                {"seed", seed},
                {"target_multiplier", target_multiplier}};
}

AugmentPolicy AugmentPolicy::from_json(const json& j) {
    AugmentPolicy p;
    try {
        if (j.contains("dilation_range")) {
            p.dilation_lo = j.at("dilation_range")[0].get<double>();
            p.dilation_hi = j.at("dilation_range")[1].get<double>();
        }
        p.translation_range = j.value("translation_range", p.translation_range);
        p.noise_std_fraction = j.value("noise_std_fraction", p.noise_std_fraction);
        p.seed = j.value("seed", p.seed);
        p.target_multiplier = j.value("target_multiplier", p.target_multiplier);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid augment policy: ") + e.what());
    }
    p.validate();
    return p;
}

Tensor time_dilate(const Tensor& x, double ratio) {
    if (!(ratio > 0)) throw DataError("dilation ratio must be positive");
    if (x.rank() != 2) throw DataError("time_dilate expects [C, N]");
    const std::size_t C = x.dim(0), n = x.dim(1);
    const auto m = static_cast<std::size_t>(std::max(1.0, std::round(static_cast<double>(n) * ratio)));

    Tensor resampled({C, m});
    for (std::size_t c = 0; c < C; ++c) {
        const double* src = x.row(c);
        double* dst = resampled.row(c);
        for (std::size_t j = 0; j < m; ++j) {
            const double pos = static_cast<double>(j) / ratio;
            const auto lo = static_cast<std::size_t>(std::min(pos, static_cast<double>(n - 1)));
            const std::size_t hi = std::min(lo + 1, n - 1);
            const double w = std::clamp(pos - static_cast<double>(lo), 0.0, 1.0);
            dst[j] = (1.0 - w) * src[lo] + w * src[hi];
        }
    }
    if (m == n) return resampled;

    Tensor out({C, n});
    if (m > n) {
        const std::size_t off = (m - n) / 2;  // center crop
        for (std::size_t c = 0; c < C; ++c)
            std::copy(resampled.row(c) + off, resampled.row(c) + off + n, out.row(c));
    } else {
        const std::size_t off = (n - m) / 2;  // centered with edge padding
        for (std::size_t c = 0; c < C; ++c) {
            const double* src = resampled.row(c);
            double* dst = out.row(c);
            for (std::size_t j = 0; j < n; ++j) {
                const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(off);
                dst[j] = src[std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(m) - 1)];
            }
        }
    }
    return out;
}

Tensor translate(const Tensor& x, int shift) {
    if (x.rank() != 2) throw DataError("translate expects [C, N]");
    const std::size_t C = x.dim(0), n = x.dim(1);
    if (static_cast<std::size_t>(std::abs(shift)) >= n)
        throw DataError("translation shift exceeds signal length");

    Tensor out({C, n});
    for (std::size_t c = 0; c < C; ++c) {
        const double* src = x.row(c);
        double* dst = out.row(c);
        for (std::size_t i = 0; i < n; ++i) {
            const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i) - shift;
            dst[i] = src[std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(n) - 1)];
        }
    }
    return out;
}

Tensor add_noise(const Tensor& x, double std_fraction, std::uint64_t seed) {
    if (std_fraction < 0) throw DataError("noise fraction must be nonnegative");
    if (x.rank() != 2) throw DataError("add_noise expects [C, N]");
    if (std_fraction == 0) return x;
    const std::size_t C = x.dim(0), n = x.dim(1);

    Tensor out = x;
    auto rng = make_rng(seed, 0xA05E);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t c = 0; c < C; ++c) {
        const double* src = x.row(c);
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += src[i];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (src[i] - mean) * (src[i] - mean);
        var /= static_cast<double>(n);
        const double sigma = std_fraction * std::sqrt(var);
        double* dst = out.row(c);
        for (std::size_t i = 0; i < n; ++i) dst[i] += sigma * gauss(rng);
    }
    return out;
}

Dataset balance_dataset(const Dataset& d, const AugmentPolicy& policy) {
    policy.validate();
    d.validate();
    if (d.records.empty()) return d;

    auto counts = d.class_counts();
    for (const auto& [cid, cnt] : counts)
        if (cnt == 0) throw DataError("class '" + d.class_map.at(cid) + "' has no records to augment");

    std::size_t max_count = 0;
    for (const auto& [cid, cnt] : counts) max_count = std::max(max_count, cnt);
    const auto cap = static_cast<std::size_t>(
        std::floor(policy.target_multiplier * static_cast<double>(d.records.size())));
    std::size_t budget = cap > d.records.size() ? cap - d.records.size() : 0;

    Dataset out = d;
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < d.records.size(); ++i)
        members[d.records[i].label.class_id].push_back(i);

    auto rng = make_rng(policy.seed, 0xBA1A);
    std::uniform_real_distribution<double> dil(policy.dilation_lo, policy.dilation_hi);
    std::uniform_int_distribution<int> shift(-policy.translation_range, policy.translation_range);

    // round-robin over classes, most-deficient first, until parity or cap
    while (budget > 0) {
        int worst = -1;
        std::size_t worst_count = max_count;
        for (const auto& [cid, cnt] : counts) {
            if (cnt < worst_count) {
                worst_count = cnt;
                worst = cid;
            }
        }
        if (worst < 0) break;  // balanced

        const auto& pool = members.at(worst);
        const std::size_t src_idx = pool[counts[worst] % pool.size()];
        const ActionRecord& src = d.records[src_idx];

        ActionRecord aug = src;
        aug.id = src.id + "#aug" + std::to_string(counts[worst]);
        aug.augmented = true;
        const double ratio = dil(rng);
        const int sh = shift(rng);
        const std::uint64_t noise_seed = rng();
        aug.channels = add_noise(translate(time_dilate(src.channels, ratio), sh),
                                 policy.noise_std_fraction, noise_seed);
        // pose stream follows the same temporal warp, minus the noise
        aug.tcp_rotvec = translate(time_dilate(src.tcp_rotvec, ratio), sh);

        out.records.push_back(std::move(aug));
        counts[worst]++;
        budget--;
    }
    return out;
}

}  // namespace wrenchval
