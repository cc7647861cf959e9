#include "freqprior/lfm.hpp"

#include <cmath>
#include <random>

namespace freqprior::lfm {

void LfmParams::validate() const {
    if (freqs.empty()) throw Error(ErrorCode::InvalidArgument, "LFM needs K >= 1");
    if (amps.size() != freqs.size() || phases.size() != freqs.size()) {
        throw Error(ErrorCode::ShapeMismatch, "LFM freqs, amps and phases must all have length K");
    }
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        if (!std::isfinite(freqs[k].cycles_per_sample()) || !std::isfinite(amps[k]) ||
            !std::isfinite(phases[k])) {
            throw Error(ErrorCode::InvalidArgument, "LFM parameters must be finite");
        }
    }
}

std::string_view to_string(InitMode mode) noexcept {
    return mode == InitMode::Fft ? "fft" : "random";
}

InitMode parse_init_mode(std::string_view text) {
    if (text == "fft") return InitMode::Fft;
    if (text == "random") return InitMode::Random;
    throw Error(ErrorCode::InvalidArgument, "init mode must be 'fft' or 'random'");
}

void TrainConfig::validate() const {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
    if (!(lr_main > 0.0)) throw Error(ErrorCode::InvalidArgument, "lr_main must be positive");
    if (!(lr_freq >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lr_freq must be nonnegative");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "Adam betas must lie in [0, 1)");
    }
    if (!(adam.eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "Adam eps must be positive");
    if (!(random_freq_low <= random_freq_high)) {
        throw Error(ErrorCode::InvalidArgument, "random frequency range is empty");
    }
    if (log_every < 1) throw Error(ErrorCode::InvalidArgument, "log_every must be at least 1");
}

std::vector<double> periodic_embedding(double t, std::span<const Frequency> freqs,
                                       std::span<const double> phases) {
    if (freqs.empty() || freqs.size() != phases.size()) {
        throw Error(ErrorCode::ShapeMismatch, "embedding needs K >= 1 frequencies and K phases");
    }
    std::vector<double> out;
    out.reserve(2 * freqs.size());
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        const double theta = freqs[k].radians_per_sample() * t + phases[k];
        out.push_back(std::cos(theta));
        out.push_back(std::sin(theta));
    }
    return out;
}

std::vector<double> lfm_predict(const LfmParams& params, std::span<const double> t_values) {
    params.validate();
    std::vector<double> out(t_values.size(), 0.0);
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < params.modes(); ++k) {
            acc += params.amps[k] *
                   std::cos(params.freqs[k].radians_per_sample() * t_values[i] + params.phases[k]);
        }
        out[i] = acc;
    }
    return out;
}

LossAndGrads lfm_loss_and_grads(const LfmParams& params, const TimeSeries& ts) {
    if (ts.channels() != 1) {
        throw Error(ErrorCode::MultiChannelUnsupported,
                    "the linear Fourier model fits one channel, got " + std::to_string(ts.channels()));
    }
    params.validate();
    const std::size_t K = params.modes();
    const std::size_t T = ts.length();
    const auto y = ts.values().col(0);

    // cos/sin of each mode's phase angle, row-major by mode.
    std::vector<double> cosv(K * T), sinv(K * T);
    std::vector<double> err(T);
    for (std::size_t k = 0; k < K; ++k) {
        const double w = params.freqs[k].radians_per_sample();
        for (std::size_t t = 0; t < T; ++t) {
            const double theta = w * static_cast<double>(t) + params.phases[k];
            cosv[k * T + t] = std::cos(theta);
            sinv[k * T + t] = std::sin(theta);
        }
    }
    LossAndGrads out;
    for (std::size_t t = 0; t < T; ++t) {
        double pred = 0.0;
        for (std::size_t k = 0; k < K; ++k) pred += params.amps[k] * cosv[k * T + t];
        err[t] = y(static_cast<Eigen::Index>(t)) - pred;
        out.loss += err[t] * err[t];
    }

    out.grad_amps.assign(K, 0.0);
    out.grad_phases.assign(K, 0.0);
    out.grad_freqs.assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double ga = 0.0, gb = 0.0, gf = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            const double e = err[t];
            ga += e * cosv[k * T + t];
            const double es = e * sinv[k * T + t];
            gb += es;
            gf += es * static_cast<double>(t);
        }
        out.grad_amps[k] = -2.0 * ga;
        out.grad_phases[k] = 2.0 * params.amps[k] * gb;
        out.grad_freqs[k] = 2.0 * params.amps[k] * kTwoPi * gf;
    }
    return out;
}

AdamState AdamState::for_groups(std::span<const std::vector<double>> params) {
    AdamState s;
    for (const auto& p : params) {
        s.first_moment.emplace_back(p.size(), 0.0);
        s.second_moment.emplace_back(p.size(), 0.0);
    }
    return s;
}

void adam_step(AdamState& state, const AdamHyper& hyper, std::span<std::vector<double>> params,
               std::span<const std::vector<double>> grads, std::span<const double> lrs) {
    const std::size_t groups = params.size();
    if (grads.size() != groups || lrs.size() != groups || state.first_moment.size() != groups ||
        state.second_moment.size() != groups) {
        throw Error(ErrorCode::ShapeMismatch, "Adam group counts disagree");
    }
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t n = params[g].size();
        if (grads[g].size() != n || state.first_moment[g].size() != n || state.second_moment[g].size() != n) {
            throw Error(ErrorCode::ShapeMismatch, "Adam group " + std::to_string(g) + " sizes disagree");
        }
    }

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bias1 = 1.0 - std::pow(hyper.beta1, t);
    const double bias2 = 1.0 - std::pow(hyper.beta2, t);
    for (std::size_t g = 0; g < groups; ++g) {
        auto& m = state.first_moment[g];
        auto& v = state.second_moment[g];
        for (std::size_t i = 0; i < params[g].size(); ++i) {
            const double grad = grads[g][i];
            m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * grad;
            v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * grad * grad;
            if (lrs[g] == 0.0) continue;
            const double m_hat = m[i] / bias1;
            const double v_hat = v[i] / bias2;
            params[g][i] -= lrs[g] * m_hat / (std::sqrt(v_hat) + hyper.eps);
        }
    }
}

LfmParams initialize(const TimeSeries& ts, const TrainConfig& config) {
    config.validate();
    const std::size_t K = config.k;
    LfmParams p;
    if (config.init_mode == InitMode::Fft) {
        auto ext = config.extraction;
        ext.k = K;
        const auto report = extract::extract_frequencies(ts, ext);
        const auto ap = report.model.to_amplitude_phase();
        p.freqs = report.model.freqs();
        for (std::size_t k = 0; k < K; ++k) {
            p.amps.push_back(ap.amplitude(0, static_cast<Eigen::Index>(k)));
            p.phases.push_back(ap.phase(0, static_cast<Eigen::Index>(k)));
        }
        return p;
    }
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> freq(config.random_freq_low, config.random_freq_high);
    std::uniform_real_distribution<double> amp(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    // One draw per mode in (freq, amp, phase) order.
    for (std::size_t k = 0; k < K; ++k) {
        p.freqs.emplace_back(freq(rng));
        p.amps.push_back(amp(rng));
        p.phases.push_back(phase(rng));
    }
    return p;
}

TrainReport train_lfm(const TimeSeries& ts, const TrainConfig& config) {
    if (ts.channels() != 1) {
        throw Error(ErrorCode::MultiChannelUnsupported,
                    "the linear Fourier model fits one channel, got " + std::to_string(ts.channels()));
    }
    return train_lfm_from(ts, initialize(ts, config), config);
}

TrainReport train_lfm_from(const TimeSeries& ts, const LfmParams& start, const TrainConfig& config) {
    config.validate();
    start.validate();

    // Groups: 0 amplitudes, 1 phases, 2 frequencies.
    std::vector<std::vector<double>> groups{start.amps, start.phases, to_cycles(start.freqs)};
    const std::vector<double> lrs{config.lr_main, config.lr_main, config.lr_freq};
    AdamState state = AdamState::for_groups(groups);

    auto current = [&] {
        return LfmParams{to_frequencies(groups[2]), groups[0], groups[1]};
    };

    TrainReport report;
    report.initial = start;
    report.loss_history.reserve(config.steps);
    report.freq_trajectory.push_back({0, groups[2]});

    for (std::size_t step = 1; step <= config.steps; ++step) {
        const auto lg = lfm_loss_and_grads(current(), ts);
        report.loss_history.push_back(lg.loss);
        const std::vector<std::vector<double>> grads{lg.grad_amps, lg.grad_phases, lg.grad_freqs};
        adam_step(state, config.adam, groups, grads, lrs);
        if (step % config.log_every == 0 || step == config.steps) {
            report.freq_trajectory.push_back({step, groups[2]});
        }
    }
    report.final = current();
    report.final_loss = lfm_loss_and_grads(report.final, ts).loss;
    return report;
}

} // namespace freqprior::lfm
