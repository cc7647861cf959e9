#include "freqprior/dsp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace freqprior::dsp {

namespace {

// exp(-2 pi i num / den) with the argument reduced exactly in integers first.
Complex twiddle(std::uint64_t num, std::uint64_t den) {
    const double angle = -kTwoPi * static_cast<double>(num % den) / static_cast<double>(den);
    return {std::cos(angle), std::sin(angle)};
}

// In-place iterative radix-2 transform; data.size() must be a power of two.
void fft_pow2(std::vector<Complex>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n <= 1) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    // Twiddles for the largest stage; smaller stages stride through it.
    std::vector<Complex> w(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        w[k] = twiddle(k, n);
        if (inverse) w[k] = std::conj(w[k]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const Complex u = data[start + k];
                const Complex v = data[start + k + half] * w[k * stride];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
    }
}

// Bluestein: X(m) = conj(c_m) * sum_t (x_t conj(c_t)) c_{m-t}, c_j = exp(i pi j^2 / N).
std::vector<Complex> bluestein(std::span<const Complex> x) {
    const std::size_t n = x.size();
    const std::size_t m = std::bit_ceil(2 * n - 1);
    const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);

    std::vector<Complex> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t jj = static_cast<std::uint64_t>(j) * j % two_n;
        chirp[j] = std::conj(twiddle(jj, two_n)); // exp(+i pi j^2 / N)
    }

    std::vector<Complex> a(m, Complex{}), b(m, Complex{});
    for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * std::conj(chirp[j]);
    b[0] = chirp[0];
    for (std::size_t j = 1; j < n; ++j) b[j] = b[m - j] = chirp[j];

    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
    fft_pow2(a, true);

    std::vector<Complex> out(n);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * std::conj(chirp[k]);
    return out;
}

} // namespace

std::vector<Complex> dft(std::span<const Complex> x) {
    if (x.empty()) return {};
    if (std::has_single_bit(x.size())) {
        std::vector<Complex> data(x.begin(), x.end());
        fft_pow2(data, false);
        return data;
    }
    return bluestein(x);
}

std::vector<Complex> dft_channel(std::span<const double> x) {
    std::vector<Complex> data(x.begin(), x.end());
    return dft(data);
}

std::vector<Complex> dft_direct(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<Complex> out(n);
    for (std::size_t m = 0; m < n; ++m) {
        Complex acc{};
        for (std::size_t t = 0; t < n; ++t) {
            acc += x[t] * twiddle(static_cast<std::uint64_t>(m) * t, n);
        }
        out[m] = acc;
    }
    return out;
}

Spectrum power_spectrum(const Eigen::MatrixXd& values) {
    const auto T = static_cast<std::size_t>(values.rows());
    std::vector<double> power(T / 2 + 1, 0.0);
    // Channels accumulate in index order so the sum is reproducible.
    for (Eigen::Index l = 0; l < values.cols(); ++l) {
        const auto col = values.col(l);
        const auto X = dft_channel(std::span<const double>(col.data(), T));
        for (std::size_t m = 0; m < power.size(); ++m) power[m] += std::norm(X[m]);
    }
    return Spectrum(T, std::move(power));
}

Spectrum power_spectrum(const TimeSeries& ts) { return power_spectrum(ts.values()); }

std::size_t admissible_bin_count(std::size_t length) noexcept {
    return length < 2 ? 0 : (length - 1) / 2;
}

std::vector<std::size_t> top_k_bins(const Spectrum& spec, std::size_t k,
                                    const std::set<std::size_t>& exclude) {
    std::vector<std::size_t> candidates;
    for (std::size_t m = 0; m < spec.bins(); ++m) {
        if (spec.is_interior(m) && !exclude.contains(m)) candidates.push_back(m);
    }
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "K must be positive");
    if (candidates.size() < k) {
        throw Error(ErrorCode::NotEnoughBins, "requested " + std::to_string(k) + " peaks but only " +
                                                  std::to_string(candidates.size()) +
                                                  " admissible bins");
    }
    const auto& p = spec.power();
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
    candidates.resize(k);
    return candidates;
}

std::vector<Frequency> top_k_peaks(const Spectrum& spec, std::size_t k,
                                   const std::set<std::size_t>& exclude) {
    std::vector<Frequency> out;
    for (std::size_t m : top_k_bins(spec, k, exclude)) out.push_back(spec.frequency(m));
    return out;
}

} // namespace freqprior::dsp
