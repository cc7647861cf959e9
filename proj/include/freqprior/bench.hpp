#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "freqprior/core.hpp"
#include "freqprior/lfm.hpp"

namespace freqprior::bench {

/// Sum of sines at low and high frequencies plus Gaussian noise, standardized.
struct SyntheticConfig {
    std::size_t length = 512;
    std::vector<double> f_low{0.015, 0.025, 0.035};
    std::vector<double> f_high{0.080, 0.110};
    std::vector<double> amp_low{1.0, 1.0, 1.0};
    std::vector<double> amp_high{0.3, 0.3};
    double noise_std = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

TimeSeries generate_synthetic(const SyntheticConfig& config);

/// Fraction of `truths` with at least one learned frequency strictly within delta.
double hit_rate(std::span<const Frequency> learned, std::span<const Frequency> truths, double delta);

/// Mixes (master, cell, run, stream) into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t run,
                          std::uint64_t stream) noexcept;

struct BenchSetting {
    lfm::InitMode init = lfm::InitMode::Fft;
    double lr_freq = 1e-6;
};

/// {FFT, Random} x {1e-6, 1e-3}.
std::vector<BenchSetting> default_grid();

struct BenchConfig {
    std::vector<BenchSetting> settings = default_grid();
    std::size_t runs = 10;
    std::uint64_t master_seed = 0;
    SyntheticConfig synth;
    lfm::TrainConfig train;
    double delta = 0.005;
    /// Worker threads; 0 picks the hardware concurrency.
    std::size_t threads = 0;

    void validate() const;
};

struct RunResult {
    std::size_t cell = 0;
    std::size_t run = 0;
    std::uint64_t data_seed = 0;
    std::uint64_t init_seed = 0;
    std::vector<double> init_freqs;
    std::vector<double> freqs;  // final, cycles/sample
    std::vector<double> amps;   // final |a_k|
    std::vector<double> phases; // final, folded so that a_k >= 0
    double final_loss = 0.0;
    double p_hit = 0.0;
};

struct SettingAggregate {
    BenchSetting setting;
    double mean_p_hit = 0.0;
    double std_p_hit = 0.0; // population (divisor = runs)
    std::vector<double> pooled_freqs;
};

struct BenchReport {
    BenchConfig config;
    std::vector<RunResult> runs; // ordered by (cell, run)
    std::vector<SettingAggregate> aggregates;

    const SettingAggregate& aggregate_for(lfm::InitMode init, double lr_freq) const;
};

BenchReport run_benchmark(const BenchConfig& config);

/// Evaluates the model at t = T_obs, ..., T_obs + Q - 1, i.e. the Q steps
/// that follow observations indexed 0..T_obs-1. Returns Q x n.
Eigen::MatrixXd forecast_extrapolate(const HarmonicModel& model, std::size_t observed,
                                     std::size_t horizon);

struct ForecastMetrics {
    double mse = 0.0;
    double mae = 0.0;
};

ForecastMetrics forecast_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth);

} // namespace freqprior::bench
