#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "freqprior/core.hpp"

namespace freqprior::extract {

struct ExtractionConfig {
    std::size_t k = 5;
    /// Stop once no frequency moved by this much in a sweep (cycles/sample).
    /// Unset means half a grid bin, 1/(2T).
    std::optional<double> epsilon;
    std::size_t max_sweeps = 50;
    /// A move to a new bin is accepted only if its residual power exceeds the
    /// current bin's by this relative margin.
    double improvement_rtol = 1e-12;

    double resolved_epsilon(std::size_t length) const {
        return epsilon.value_or(0.5 / static_cast<double>(length));
    }
    void validate() const;
};

struct ExtractionReport {
    HarmonicModel model;
    std::vector<std::size_t> bins;      // grid index m of each mode
    double initial_loss = 0.0;          // after the peak-picking init and first refit
    std::vector<double> loss_history;   // reconstruction loss after each sweep
    std::size_t sweeps_used = 0;
    bool converged = false;
    std::vector<double> residual_power; // sum_l |R_l(m_k)|^2 at each mode's final bin

    double final_loss() const { return loss_history.empty() ? initial_loss : loss_history.back(); }
};

/// sum_t ||x_t - A Omega(t)||^2
double reconstruction_loss(const TimeSeries& ts, const HarmonicModel& model);

/// x_t minus every mode except k.
TimeSeries residual(const TimeSeries& ts, const HarmonicModel& model, std::size_t k);

/// Least-squares amplitudes (n x 2K) for fixed frequencies, solved by
/// column-pivoted Householder QR of the T x 2K cos/sin design.
/// Throws IllConditioned when the design's condition number exceeds 1e12.
Eigen::MatrixXd refit_amplitudes(const TimeSeries& ts, const std::vector<Frequency>& freqs);

inline constexpr double kMaxDesignCondition = 1e12;

/// min over A_k of sum_t ||R_t - A_k [cos, sin](2 pi f t)||^2 by explicit
/// two-column least squares per channel.
double partial_objective_direct(const TimeSeries& residual, Frequency f);

/// ||R||_F^2 - (2/T) sum_l |R_l(m)|^2 for an interior grid frequency f = m/T.
/// Throws NotInteriorBin for DC, Nyquist or off-grid frequencies.
double partial_objective_closed_form(const TimeSeries& residual, Frequency f);

/// Grid index m if f lies on the DFT grid of `length` and is interior.
std::optional<std::size_t> interior_bin(Frequency f, std::size_t length);

/// Admissible frequency maximising the residual's summed power, skipping
/// `exclude`; ties go to the lower bin.
Frequency update_frequency(const TimeSeries& residual, const std::set<std::size_t>& exclude = {});

/// FFT-guided coordinate descent over grid frequencies with global amplitude
/// refits after every accepted move.
ExtractionReport extract_frequencies(const TimeSeries& ts, const ExtractionConfig& config);

} // namespace freqprior::extract
