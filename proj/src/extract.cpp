#include "freqprior/extract.hpp"

#include <algorithm>
#include <cmath>

#include "freqprior/dsp.hpp"

namespace freqprior::extract {

void ExtractionConfig::validate() const {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
    if (epsilon && !(*epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    if (max_sweeps < 1) throw Error(ErrorCode::InvalidArgument, "max_sweeps must be at least 1");
    if (!(improvement_rtol >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "improvement_rtol must be nonnegative");
    }
}

namespace {

void require_same_channels(const TimeSeries& ts, const HarmonicModel& model) {
    if (model.channels() != ts.channels()) {
        throw Error(ErrorCode::ShapeMismatch, "model has " + std::to_string(model.channels()) +
                                                  " channels, series has " +
                                                  std::to_string(ts.channels()));
    }
}

// Residual after removing every mode except `keep` (keep == K removes all).
Eigen::MatrixXd strip_modes(const TimeSeries& ts, const HarmonicModel& model, std::size_t keep) {
    const Eigen::MatrixXd X = harmonic_design(model.freqs(), ts.length());
    Eigen::MatrixXd A = model.amplitudes();
    if (keep < model.modes()) A.middleCols(2 * static_cast<Eigen::Index>(keep), 2).setZero();
    return ts.values() - X * A.transpose();
}

} // namespace

double reconstruction_loss(const TimeSeries& ts, const HarmonicModel& model) {
    require_same_channels(ts, model);
    return strip_modes(ts, model, model.modes()).squaredNorm();
}

TimeSeries residual(const TimeSeries& ts, const HarmonicModel& model, std::size_t k) {
    require_same_channels(ts, model);
    if (k >= model.modes()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "mode " + std::to_string(k) + " out of range for K = " + std::to_string(model.modes()));
    }
    if (model.modes() == 1) return ts;
    return TimeSeries(strip_modes(ts, model, k), ts.names());
}

Eigen::MatrixXd refit_amplitudes(const TimeSeries& ts, const std::vector<Frequency>& freqs) {
    if (freqs.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one frequency");
    if (2 * freqs.size() > ts.length()) {
        throw Error(ErrorCode::InvalidArgument, "2K = " + std::to_string(2 * freqs.size()) +
                                                    " exceeds series length " +
                                                    std::to_string(ts.length()));
    }
    const Eigen::MatrixXd X = harmonic_design(freqs, ts.length());
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);

    // The triangular factor shares the design's singular values.
    const auto p = X.cols();
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues();
    const double cond = sv(0) / sv(p - 1);
    if (!(cond <= kMaxDesignCondition)) {
        throw Error(ErrorCode::IllConditioned,
                    "harmonic design condition number " + std::to_string(cond) +
                        " exceeds 1e12; frequencies are (nearly) duplicated or at DC/Nyquist");
    }
    return qr.solve(ts.values()).transpose();
}

double partial_objective_direct(const TimeSeries& residual, Frequency f) {
    const Eigen::MatrixXd X = harmonic_design({f}, residual.length());
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    double total = 0.0;
    for (Eigen::Index l = 0; l < residual.values().cols(); ++l) {
        const Eigen::VectorXd y = residual.values().col(l);
        const Eigen::VectorXd coef = qr.solve(y);
        total += (y - X * coef).squaredNorm();
    }
    return total;
}

std::optional<std::size_t> interior_bin(Frequency f, std::size_t length) {
    const double x = f.cycles_per_sample() * static_cast<double>(length);
    if (!std::isfinite(x)) return std::nullopt;
    const double m = std::round(x);
    if (std::abs(x - m) > 1e-9 * std::max(1.0, std::abs(x))) return std::nullopt;
    if (m <= 0.0 || 2.0 * m >= static_cast<double>(length)) return std::nullopt;
    return static_cast<std::size_t>(m);
}

double partial_objective_closed_form(const TimeSeries& residual, Frequency f) {
    const std::size_t T = residual.length();
    const auto m = interior_bin(f, T);
    if (!m) {
        throw Error(ErrorCode::NotInteriorBin,
                    "frequency " + std::to_string(f.cycles_per_sample()) +
                        " is not an interior grid bin for T = " + std::to_string(T));
    }
    const Spectrum spec = dsp::power_spectrum(residual);
    const double value =
        residual.values().squaredNorm() - 2.0 / static_cast<double>(T) * spec.power()[*m];
    return std::max(0.0, value);
}

Frequency update_frequency(const TimeSeries& residual, const std::set<std::size_t>& exclude) {
    const Spectrum spec = dsp::power_spectrum(residual);
    return spec.frequency(dsp::top_k_bins(spec, 1, exclude).front());
}

ExtractionReport extract_frequencies(const TimeSeries& ts, const ExtractionConfig& config) {
    config.validate();
    const std::size_t T = ts.length();
    const std::size_t K = config.k;
    if (2 * K > T) {
        throw Error(ErrorCode::InvalidArgument,
                    "2K = " + std::to_string(2 * K) + " exceeds series length " + std::to_string(T));
    }
    const double epsilon = config.resolved_epsilon(T);

    auto freqs_of = [T](const std::vector<std::size_t>& bins) {
        std::vector<Frequency> f;
        for (std::size_t m : bins) f.push_back(Frequency::from_bin(m, T));
        return f;
    };

    std::vector<std::size_t> bins = dsp::top_k_bins(dsp::power_spectrum(ts), K);
    HarmonicModel model(freqs_of(bins), refit_amplitudes(ts, freqs_of(bins)));

    ExtractionReport report{model, bins, reconstruction_loss(ts, model), {}, 0, false, {}};

    for (std::size_t sweep = 1; sweep <= config.max_sweeps; ++sweep) {
        double delta = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const Spectrum spec = dsp::power_spectrum(residual(ts, model, k));
            std::set<std::size_t> exclude;
            for (std::size_t j = 0; j < K; ++j) {
                if (j != k) exclude.insert(bins[j]);
            }
            const std::size_t candidate = dsp::top_k_bins(spec, 1, exclude).front();
            const auto& p = spec.power();
            if (candidate == bins[k] || !(p[candidate] > p[bins[k]] * (1.0 + config.improvement_rtol))) {
                continue;
            }
            const double step = std::abs(static_cast<double>(candidate) - static_cast<double>(bins[k])) /
                                static_cast<double>(T);
            delta = std::max(delta, step);
            bins[k] = candidate;
            const auto freqs = freqs_of(bins);
            model = HarmonicModel(freqs, refit_amplitudes(ts, freqs));
        }
        report.loss_history.push_back(reconstruction_loss(ts, model));
        report.sweeps_used = sweep;
        if (delta < epsilon) {
            report.converged = true;
            break;
        }
    }

    report.model = model;
    report.bins = bins;
    for (std::size_t k = 0; k < K; ++k) {
        report.residual_power.push_back(dsp::power_spectrum(residual(ts, model, k)).power()[bins[k]]);
    }
    return report;
}

} // namespace freqprior::extract
