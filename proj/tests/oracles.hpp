#pragma once

// Independent reference implementations used as test oracles. These stay
// deliberately naive (direct formulas, brute-force loops) and must not call
// into the library code paths they check.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracles {

// --- quaternion rotation ------------------------------------------------------

struct Quat {
    double w, x, y, z;
};

inline Quat quat_from_rotvec(const std::array<double, 3>& r) {
    const double angle = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    if (angle < 1e-300) return {1.0, 0.0, 0.0, 0.0};
    const double h = angle / 2.0;
    const double s = std::sin(h) / angle;
    return {std::cos(h), r[0] * s, r[1] * s, r[2] * s};
}

inline std::array<double, 3> quat_rotate(const Quat& q, const std::array<double, 3>& v) {
    // q * (0, v) * conj(q)
    const double tw = -q.x * v[0] - q.y * v[1] - q.z * v[2];
    const double tx = q.w * v[0] + q.y * v[2] - q.z * v[1];
    const double ty = q.w * v[1] + q.z * v[0] - q.x * v[2];
    const double tz = q.w * v[2] + q.x * v[1] - q.y * v[0];
    return {tx * q.w - tw * q.x - ty * q.z + tz * q.y,
            ty * q.w - tw * q.y - tz * q.x + tx * q.z,
            tz * q.w - tw * q.z - tx * q.y + ty * q.x};
}

// rotate by the INVERSE rotation (matches R^T v)
inline std::array<double, 3> quat_rotate_inverse(const Quat& q, const std::array<double, 3>& v) {
    return quat_rotate({q.w, -q.x, -q.y, -q.z}, v);
}

// --- dense symmetric eigensolver (Jacobi) ------------------------------------------

template <std::size_t N>
struct EigenResult {
    std::array<double, N> values;
    std::array<std::array<double, N>, N> vectors;  // column i is eigenvector i
};

template <std::size_t N>
EigenResult<N> jacobi_eigen(std::array<std::array<double, N>, N> a) {
    EigenResult<N> res{};
    std::array<std::array<double, N>, N>& v = res.vectors;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) v[i][j] = i == j ? 1.0 : 0.0;

    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < N; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    for (std::size_t i = 0; i < N; ++i) res.values[i] = a[i][i];
    return res;
}

// --- digital filter frequency response ------------------------------------------------

struct BiquadCoeffs {
    double b0, b1, b2, a1, a2;
};

inline double cascade_gain_at(const std::vector<BiquadCoeffs>& sections, double freq_hz, double fs) {
    const std::complex<double> z = std::polar(1.0, -2.0 * M_PI * freq_hz / fs);
    std::complex<double> h = 1.0;
    for (const auto& s : sections) {
        h *= (s.b0 + s.b1 * z + s.b2 * z * z) / (1.0 + s.a1 * z + s.a2 * z * z);
    }
    return std::abs(h);
}

// steady-state amplitude of a sinusoid buried in y, by projection over whole periods
inline double sine_amplitude(const std::vector<double>& y, std::size_t begin, std::size_t end,
                             double freq_hz, double fs) {
    double sc = 0.0, ss = 0.0;
    const std::size_t n = end - begin;
    for (std::size_t i = begin; i < end; ++i) {
        const double t = static_cast<double>(i) / fs;
        sc += y[i] * std::cos(2.0 * M_PI * freq_hz * t);
        ss += y[i] * std::sin(2.0 * M_PI * freq_hz * t);
    }
    return 2.0 * std::sqrt(sc * sc + ss * ss) / static_cast<double>(n);
}

// --- naive transforms -------------------------------------------------------------------

// literal double sum W[a,b] = sum_n x[n] psi*((n-b)/a) (/sqrt(a) when energy_norm)
inline std::vector<double> naive_cwt_row(const std::vector<double>& x, double scale, double omega0,
                                         bool energy_norm) {
    const std::size_t n = x.size();
    const double amp = std::pow(M_PI, -0.25) * (energy_norm ? 1.0 / std::sqrt(scale) : 1.0);
    std::vector<double> out(n);
    for (std::size_t b = 0; b < n; ++b) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = (static_cast<double>(i) - static_cast<double>(b)) / scale;
            const double env = amp * std::exp(-0.5 * t * t);
            acc += x[i] * std::complex<double>(env * std::cos(omega0 * t), -env * std::sin(omega0 * t));
        }
        out[b] = std::abs(acc);
    }
    return out;
}

inline std::vector<double> naive_sliding_energy(const std::vector<std::vector<double>>& channels,
                                                int window) {
    const std::size_t n = channels.front().size();
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
        for (std::size_t j = lo; j <= i; ++j)
            for (const auto& ch : channels) e[i] += ch[j] * ch[j];
    }
    return e;
}

// valid cross-correlation, triple loop
inline std::vector<std::vector<double>> naive_conv1d(const std::vector<std::vector<double>>& x,
                                                     const std::vector<std::vector<std::vector<double>>>& w,
                                                     const std::vector<double>& bias, int stride) {
    const std::size_t L = x.front().size(), K = w.front().front().size();
    const std::size_t out_len = (L - K) / static_cast<std::size_t>(stride) + 1;
    std::vector<std::vector<double>> y(w.size(), std::vector<double>(out_len, 0.0));
    for (std::size_t f = 0; f < w.size(); ++f)
        for (std::size_t o = 0; o < out_len; ++o) {
            double acc = bias[f];
            for (std::size_t c = 0; c < x.size(); ++c)
                for (std::size_t k = 0; k < K; ++k) acc += w[f][c][k] * x[c][o * stride + k];
            y[f][o] = acc;
        }
    return y;
}

// radix-agnostic DFT magnitude (test-scale N only)
inline std::vector<double> dft_magnitude(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> mag(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += x[i] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * i) / static_cast<double>(n));
        mag[k] = std::abs(acc);
    }
    return mag;
}

}  // namespace oracles
