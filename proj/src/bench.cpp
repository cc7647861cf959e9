#include "freqprior/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

namespace freqprior::bench {

void SyntheticConfig::validate() const {
    if (length < 2) throw Error(ErrorCode::InvalidArgument, "synthetic length must be >= 2");
    if (f_low.size() != amp_low.size() || f_high.size() != amp_high.size()) {
        throw Error(ErrorCode::ShapeMismatch, "each synthetic frequency needs one amplitude");
    }
    if (f_low.empty() && f_high.empty()) {
        throw Error(ErrorCode::InvalidArgument, "synthetic signal needs at least one component");
    }
    for (const auto* list : {&f_low, &f_high}) {
        for (double f : *list) {
            if (!(f > 0.0 && f < 0.5)) {
                throw Error(ErrorCode::InvalidArgument, "synthetic frequencies must lie in (0, 0.5)");
            }
        }
    }
    if (!(noise_std >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_std must be >= 0");
}

TimeSeries generate_synthetic(const SyntheticConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);

    std::vector<double> freqs = config.f_low;
    freqs.insert(freqs.end(), config.f_high.begin(), config.f_high.end());
    std::vector<double> amps = config.amp_low;
    amps.insert(amps.end(), config.amp_high.begin(), config.amp_high.end());
    std::vector<double> phases;
    for (std::size_t i = 0; i < freqs.size(); ++i) phases.push_back(phase(rng));

    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(config.length), 1);
    for (std::size_t t = 0; t < config.length; ++t) {
        double v = 0.0;
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            v += amps[i] * std::sin(kTwoPi * freqs[i] * static_cast<double>(t) + phases[i]);
        }
        y(static_cast<Eigen::Index>(t), 0) = v;
    }
    if (config.noise_std > 0.0) {
        std::normal_distribution<double> noise(0.0, config.noise_std);
        for (Eigen::Index t = 0; t < y.rows(); ++t) y(t, 0) += noise(rng);
    }
    return standardize(TimeSeries(std::move(y), {"y"})).first;
}

double hit_rate(std::span<const Frequency> learned, std::span<const Frequency> truths, double delta) {
    if (truths.empty()) throw Error(ErrorCode::EmptyTruths, "hit rate needs at least one true frequency");
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
    std::size_t covered = 0;
    for (Frequency truth : truths) {
        const bool hit = std::any_of(learned.begin(), learned.end(), [&](Frequency w) {
            return std::abs(w.cycles_per_sample() - truth.cycles_per_sample()) < delta;
        });
        if (hit) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(truths.size());
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t run,
                          std::uint64_t stream) noexcept {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ cell);
    h = splitmix64(h ^ run);
    return splitmix64(h ^ stream);
}

std::vector<BenchSetting> default_grid() {
    using lfm::InitMode;
    return {{InitMode::Fft, 1e-6}, {InitMode::Fft, 1e-3}, {InitMode::Random, 1e-6}, {InitMode::Random, 1e-3}};
}

void BenchConfig::validate() const {
    if (settings.empty()) throw Error(ErrorCode::InvalidArgument, "benchmark grid is empty");
    if (runs < 1) throw Error(ErrorCode::InvalidArgument, "benchmark needs at least one seed");
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
    if (synth.f_low.empty()) throw Error(ErrorCode::EmptyTruths, "hit rate needs low frequencies");
    synth.validate();
    train.validate();
}

const SettingAggregate& BenchReport::aggregate_for(lfm::InitMode init, double lr_freq) const {
    for (const auto& a : aggregates) {
        if (a.setting.init == init && a.setting.lr_freq == lr_freq) return a;
    }
    throw Error(ErrorCode::InvalidArgument, "setting not present in benchmark report");
}

namespace {

constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kInitStream = 2;

RunResult run_one(const BenchConfig& config, std::size_t cell, std::size_t run) {
    const BenchSetting& setting = config.settings[cell];
    RunResult r;
    r.cell = cell;
    r.run = run;
    r.data_seed = derive_seed(config.master_seed, cell, run, kDataStream);
    r.init_seed = derive_seed(config.master_seed, cell, run, kInitStream);

    SyntheticConfig synth = config.synth;
    synth.seed = r.data_seed;
    const TimeSeries y = generate_synthetic(synth);

    lfm::TrainConfig train = config.train;
    train.init_mode = setting.init;
    train.lr_freq = setting.lr_freq;
    train.seed = r.init_seed;
    const auto report = lfm::train_lfm(y, train);

    r.init_freqs = to_cycles(report.initial.freqs);
    r.freqs = to_cycles(report.final.freqs);
    for (std::size_t k = 0; k < report.final.modes(); ++k) {
        // Fold the sign of a_k into the phase.
        const double a = report.final.amps[k];
        double b = report.final.phases[k] + (a < 0.0 ? kTwoPi / 2.0 : 0.0);
        b = std::remainder(b, kTwoPi);
        r.amps.push_back(std::abs(a));
        r.phases.push_back(b);
    }
    r.final_loss = report.final_loss;
    r.p_hit = hit_rate(report.final.freqs, to_frequencies(config.synth.f_low), config.delta);
    return r;
}

} // namespace

BenchReport run_benchmark(const BenchConfig& config) {
    config.validate();
    const std::size_t jobs = config.settings.size() * config.runs;
    std::vector<RunResult> results(jobs);
    std::vector<std::exception_ptr> errors(jobs);

    std::size_t workers = config.threads ? config.threads : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, jobs);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            try {
                results[j] = run_one(config, j / config.runs, j % config.runs);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }

    for (std::size_t j = 0; j < jobs; ++j) {
        if (!errors[j]) continue;
        const std::string where = "benchmark cell " + std::to_string(j / config.runs) + " (" +
                                  std::string(lfm::to_string(config.settings[j / config.runs].init)) +
                                  ", lr_freq " + std::to_string(config.settings[j / config.runs].lr_freq) +
                                  "), run " + std::to_string(j % config.runs) + ": ";
        try {
            std::rethrow_exception(errors[j]);
        } catch (const Error& e) {
            throw Error(e.code(), where + e.what());
        } catch (const std::exception& e) {
            throw Error(ErrorCode::InvalidArgument, where + e.what());
        }
    }

    BenchReport report;
    report.config = config;
    report.runs = std::move(results);
    for (std::size_t cell = 0; cell < config.settings.size(); ++cell) {
        SettingAggregate agg;
        agg.setting = config.settings[cell];
        double sum = 0.0;
        for (std::size_t run = 0; run < config.runs; ++run) {
            const auto& r = report.runs[cell * config.runs + run];
            sum += r.p_hit;
            agg.pooled_freqs.insert(agg.pooled_freqs.end(), r.freqs.begin(), r.freqs.end());
        }
        const double n = static_cast<double>(config.runs);
        agg.mean_p_hit = sum / n;
        double ss = 0.0;
        for (std::size_t run = 0; run < config.runs; ++run) {
            const double d = report.runs[cell * config.runs + run].p_hit - agg.mean_p_hit;
            ss += d * d;
        }
        agg.std_p_hit = std::sqrt(ss / n);
        report.aggregates.push_back(std::move(agg));
    }
    return report;
}

Eigen::MatrixXd forecast_extrapolate(const HarmonicModel& model, std::size_t observed,
                                     std::size_t horizon) {
    return model.evaluate_range(static_cast<double>(observed), horizon);
}

ForecastMetrics forecast_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "prediction and truth shapes differ");
    }
    if (pred.size() == 0) throw Error(ErrorCode::InvalidArgument, "metrics need at least one value");
    const Eigen::ArrayXXd diff = (pred - truth).array();
    const double count = static_cast<double>(diff.size());
    return {diff.square().sum() / count, diff.abs().sum() / count};
}

} // namespace freqprior::bench
