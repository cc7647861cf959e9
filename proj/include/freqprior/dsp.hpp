#pragma once

#include <complex>
#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "freqprior/core.hpp"

namespace freqprior::dsp {

using Complex = std::complex<double>;

/// Forward DFT X(m) = sum_t x_t exp(-2 pi i m t / T), m = 0..T-1, exact for
/// any T >= 1 (radix-2 for powers of two, Bluestein chirp-z otherwise).
std::vector<Complex> dft(std::span<const Complex> x);

/// Real-input DFT of one channel; returns all T coefficients.
std::vector<Complex> dft_channel(std::span<const double> x);

/// O(T^2) direct summation. Reference for tests; not used on hot paths.
std::vector<Complex> dft_direct(std::span<const double> x);

/// Half-grid power sum_l |X_l(m)|^2 for m = 0..floor(T/2).
Spectrum power_spectrum(const TimeSeries& ts);
Spectrum power_spectrum(const Eigen::MatrixXd& values);

/// Number of admissible (interior) bins for length T: 0 < m < T/2.
std::size_t admissible_bin_count(std::size_t length) noexcept;

/// Highest-power admissible bins outside `exclude`, by descending power,
/// ties to the lower index. Throws NotEnoughBins.
std::vector<std::size_t> top_k_bins(const Spectrum& spec, std::size_t k,
                                    const std::set<std::size_t>& exclude = {});

std::vector<Frequency> top_k_peaks(const Spectrum& spec, std::size_t k,
                                   const std::set<std::size_t>& exclude = {});

} // namespace freqprior::dsp
