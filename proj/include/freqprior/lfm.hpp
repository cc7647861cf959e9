#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "freqprior/core.hpp"
#include "freqprior/extract.hpp"

namespace freqprior::lfm {

/// y(t) = sum_k amp_k cos(2 pi f_k t + phase_k). Frequencies are free reals
/// while training and may leave the DFT grid or the [0, 0.5] band.
struct LfmParams {
    std::vector<Frequency> freqs;
    std::vector<double> amps;
    std::vector<double> phases;

    std::size_t modes() const noexcept { return freqs.size(); }
    void validate() const;
};

enum class InitMode { Fft, Random };

std::string_view to_string(InitMode mode) noexcept;
InitMode parse_init_mode(std::string_view text);

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct TrainConfig {
    std::size_t k = 5;
    double lr_main = 1e-3; // amplitudes and phases
    double lr_freq = 1e-6; // frequencies
    std::size_t steps = 2000;
    AdamHyper adam;
    InitMode init_mode = InitMode::Fft;
    double random_freq_low = 0.0;
    double random_freq_high = 0.15;
    std::uint64_t seed = 0;
    /// freq_trajectory gets a row every log_every steps (and at the end).
    std::size_t log_every = 100;
    /// Used for the FFT initialisation; its k is overridden by `k`.
    extract::ExtractionConfig extraction;

    void validate() const;
};

struct FreqSnapshot {
    std::size_t step;
    std::vector<double> freqs;
};

struct TrainReport {
    LfmParams initial;
    LfmParams final;
    std::vector<double> loss_history; // loss before each update, one per step
    double final_loss = 0.0;
    std::vector<FreqSnapshot> freq_trajectory;
};

/// [cos(2 pi f_k t + b_k), sin(2 pi f_k t + b_k)] concatenated over k; length 2K.
std::vector<double> periodic_embedding(double t, std::span<const Frequency> freqs,
                                       std::span<const double> phases);

std::vector<double> lfm_predict(const LfmParams& params, std::span<const double> t_values);

struct LossAndGrads {
    double loss = 0.0;
    std::vector<double> grad_amps;
    std::vector<double> grad_phases;
    std::vector<double> grad_freqs; // d loss / d f, f in cycles/sample
};

/// Sum-of-squares loss over t = 0..T-1 and its analytic gradients.
/// Throws MultiChannelUnsupported for n > 1.
LossAndGrads lfm_loss_and_grads(const LfmParams& params, const TimeSeries& ts);

/// Bias-corrected Adam moments for a set of parameter groups.
struct AdamState {
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
    std::uint64_t step = 0;

    static AdamState for_groups(std::span<const std::vector<double>> params);
};

/// One Adam update; group g moves with learning rate lrs[g].
/// Throws ShapeMismatch when state, params, grads and lrs disagree.
void adam_step(AdamState& state, const AdamHyper& hyper, std::span<std::vector<double>> params,
               std::span<const std::vector<double>> grads, std::span<const double> lrs);

/// Initial parameters per config.init_mode (FFT extraction or seeded random draw).
LfmParams initialize(const TimeSeries& ts, const TrainConfig& config);

/// Full-batch Adam with (amps, phases) at lr_main and freqs at lr_freq.
TrainReport train_lfm(const TimeSeries& ts, const TrainConfig& config);

/// Same, from explicit starting parameters.
TrainReport train_lfm_from(const TimeSeries& ts, const LfmParams& start, const TrainConfig& config);

} // namespace freqprior::lfm
