#pragma once

// Test-only oracles and generators. Nothing here calls into the code paths
// it is used to check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "freqprior/core.hpp"

namespace freqprior::testing {

inline constexpr long double kTwoPiL = 6.283185307179586476925286766559L;

/// Direct O(T^2) DFT in extended precision.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t m = 0; m < n; ++m) {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t t = 0; t < n; ++t) {
            const long double a = -kTwoPiL * static_cast<long double>((m * t) % n) / static_cast<long double>(n);
            re += x[t] * std::cos(a);
            im += x[t] * std::sin(a);
        }
        out[m] = {static_cast<double>(re), static_cast<double>(im)};
    }
    return out;
}

inline std::vector<double> tone(std::size_t T, double f, double amp = 1.0, double phase = 0.0) {
    std::vector<double> y(T);
    for (std::size_t t = 0; t < T; ++t) {
        y[t] = amp * std::cos(static_cast<double>(kTwoPiL) * f * static_cast<double>(t) + phase);
    }
    return y;
}

inline std::vector<double> add(std::vector<double> a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                     double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return m;
}

/// Element-by-element sum_t sum_l (x - sum_k a cos - b sin)^2 with scalar trig.
inline double brute_force_loss(const Eigen::MatrixXd& x, const std::vector<double>& freqs,
                               const Eigen::MatrixXd& A) {
    long double total = 0.0L;
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        for (Eigen::Index l = 0; l < x.cols(); ++l) {
            long double pred = 0.0L;
            for (std::size_t k = 0; k < freqs.size(); ++k) {
                const long double th = kTwoPiL * freqs[k] * static_cast<long double>(t);
                pred += A(l, 2 * static_cast<Eigen::Index>(k)) * std::cos(th) +
                        A(l, 2 * static_cast<Eigen::Index>(k) + 1) * std::sin(th);
            }
            const long double e = x(t, l) - pred;
            total += e * e;
        }
    }
    return static_cast<double>(total);
}

/// max(|a|, |b|, floor)-relative difference.
inline double rel_err(double a, double b, double floor = 1e-30) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace freqprior::testing
