#include "freqprior/core.hpp"

#include <cmath>
#include <sstream>

namespace freqprior {

std::string_view error_tag(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConstantChannel: return "ConstantChannel";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotEnoughBins: return "NotEnoughBins";
    case ErrorCode::NotInteriorBin: return "NotInteriorBin";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::MultiChannelUnsupported: return "MultiChannelUnsupported";
    case ErrorCode::EmptyTruths: return "EmptyTruths";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

std::vector<Frequency> to_frequencies(const std::vector<double>& cycles_per_sample) {
    std::vector<Frequency> out;
    out.reserve(cycles_per_sample.size());
    for (double f : cycles_per_sample) out.emplace_back(f);
    return out;
}

std::vector<double> to_cycles(const std::vector<Frequency>& freqs) {
    std::vector<double> out;
    out.reserve(freqs.size());
    for (Frequency f : freqs) out.push_back(f.cycles_per_sample());
    return out;
}

// ---------------------------------------------------------------------------
// TimeSeries

TimeSeries::TimeSeries(Eigen::MatrixXd values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
    if (values_.rows() < 2) {
        throw Error(ErrorCode::TooShort, "time series needs at least 2 rows, got " +
                                             std::to_string(values_.rows()));
    }
    if (values_.cols() < 1) {
        throw Error(ErrorCode::InvalidArgument, "time series needs at least one channel");
    }
    if (!values_.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "time series contains NaN or Inf");
    }
    if (names_.empty()) {
        for (Eigen::Index l = 0; l < values_.cols(); ++l) names_.push_back("x" + std::to_string(l));
    } else if (names_.size() != static_cast<std::size_t>(values_.cols())) {
        throw Error(ErrorCode::ShapeMismatch, "channel name count does not match column count");
    }
}

TimeSeries TimeSeries::from_vector(const std::vector<double>& values, std::string name) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t t = 0; t < values.size(); ++t) m(static_cast<Eigen::Index>(t), 0) = values[t];
    return TimeSeries(std::move(m), {std::move(name)});
}

std::vector<double> TimeSeries::channel(std::size_t l) const {
    if (l >= channels()) {
        throw Error(ErrorCode::IndexOutOfRange, "channel index " + std::to_string(l) + " out of range");
    }
    const auto col = values_.col(static_cast<Eigen::Index>(l));
    return {col.data(), col.data() + col.size()};
}

std::pair<TimeSeries, StandardizeParams> standardize(const TimeSeries& ts) {
    const auto& x = ts.values();
    const double T = static_cast<double>(x.rows());
    StandardizeParams params;
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index l = 0; l < x.cols(); ++l) {
        const double mean = x.col(l).sum() / T;
        const double var = (x.col(l).array() - mean).square().sum() / T;
        const double sd = std::sqrt(var);
        if (!(sd > 0.0)) {
            throw Error(ErrorCode::ConstantChannel,
                        "channel '" + ts.names()[static_cast<std::size_t>(l)] + "' is constant");
        }
        out.col(l) = (x.col(l).array() - mean) / sd;
        params.mean.push_back(mean);
        params.stddev.push_back(sd);
    }
    return {TimeSeries(std::move(out), ts.names()), std::move(params)};
}

TimeSeries destandardize(const TimeSeries& ts, const StandardizeParams& params) {
    if (params.mean.size() != ts.channels() || params.stddev.size() != ts.channels()) {
        std::ostringstream msg;
        msg << "standardize params cover " << params.mean.size() << " channels, series has "
            << ts.channels();
        throw Error(ErrorCode::ShapeMismatch, msg.str());
    }
    Eigen::MatrixXd out = ts.values();
    for (Eigen::Index l = 0; l < out.cols(); ++l) {
        const auto i = static_cast<std::size_t>(l);
        out.col(l) = out.col(l).array() * params.stddev[i] + params.mean[i];
    }
    return TimeSeries(std::move(out), ts.names());
}

// ---------------------------------------------------------------------------
// HarmonicModel

HarmonicModel::HarmonicModel(std::vector<Frequency> freqs, Eigen::MatrixXd amplitudes)
    : freqs_(std::move(freqs)), amplitudes_(std::move(amplitudes)) {
    if (freqs_.empty()) throw Error(ErrorCode::InvalidArgument, "harmonic model needs K >= 1");
    if (amplitudes_.cols() != static_cast<Eigen::Index>(2 * freqs_.size())) {
        throw Error(ErrorCode::ShapeMismatch, "amplitude matrix must have 2K columns");
    }
    if (amplitudes_.rows() < 1) throw Error(ErrorCode::ShapeMismatch, "amplitude matrix has no rows");
}

HarmonicModel HarmonicModel::from_amplitude_phase(std::vector<Frequency> freqs,
                                                  const AmplitudePhase& ap) {
    const auto K = static_cast<Eigen::Index>(freqs.size());
    if (ap.amplitude.cols() != K || ap.phase.cols() != K || ap.amplitude.rows() != ap.phase.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "amplitude/phase matrices must be n x K");
    }
    // a cos(theta + b) = a cos(b) cos(theta) - a sin(b) sin(theta)
    Eigen::MatrixXd A(ap.amplitude.rows(), 2 * K);
    for (Eigen::Index l = 0; l < A.rows(); ++l) {
        for (Eigen::Index k = 0; k < K; ++k) {
            A(l, 2 * k) = ap.amplitude(l, k) * std::cos(ap.phase(l, k));
            A(l, 2 * k + 1) = -ap.amplitude(l, k) * std::sin(ap.phase(l, k));
        }
    }
    return HarmonicModel(std::move(freqs), std::move(A));
}

AmplitudePhase HarmonicModel::to_amplitude_phase() const {
    const auto K = static_cast<Eigen::Index>(freqs_.size());
    AmplitudePhase ap{Eigen::MatrixXd(amplitudes_.rows(), K), Eigen::MatrixXd(amplitudes_.rows(), K)};
    for (Eigen::Index l = 0; l < amplitudes_.rows(); ++l) {
        for (Eigen::Index k = 0; k < K; ++k) {
            const double c = amplitudes_(l, 2 * k);
            const double s = amplitudes_(l, 2 * k + 1);
            ap.amplitude(l, k) = std::hypot(c, s);
            ap.phase(l, k) = std::atan2(-s, c);
        }
    }
    return ap;
}

Eigen::VectorXd HarmonicModel::evaluate(double t) const {
    Eigen::VectorXd basis(2 * static_cast<Eigen::Index>(freqs_.size()));
    for (std::size_t k = 0; k < freqs_.size(); ++k) {
        const double theta = freqs_[k].radians_per_sample() * t;
        basis(2 * static_cast<Eigen::Index>(k)) = std::cos(theta);
        basis(2 * static_cast<Eigen::Index>(k) + 1) = std::sin(theta);
    }
    return amplitudes_ * basis;
}

Eigen::VectorXd HarmonicModel::evaluate_mode(std::size_t k, double t) const {
    if (k >= freqs_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "mode index " + std::to_string(k) + " out of range");
    }
    const double theta = freqs_[k].radians_per_sample() * t;
    const auto c = static_cast<Eigen::Index>(2 * k);
    return amplitudes_.col(c) * std::cos(theta) + amplitudes_.col(c + 1) * std::sin(theta);
}

Eigen::MatrixXd HarmonicModel::evaluate_range(double first, std::size_t count) const {
    if (count == 0) return Eigen::MatrixXd(0, amplitudes_.rows());
    return harmonic_design(freqs_, count, first) * amplitudes_.transpose();
}

Eigen::MatrixXd harmonic_design(const std::vector<Frequency>& freqs, std::size_t rows, double first) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), 2 * static_cast<Eigen::Index>(freqs.size()));
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        const double w = freqs[k].radians_per_sample();
        const auto c = 2 * static_cast<Eigen::Index>(k);
        for (std::size_t t = 0; t < rows; ++t) {
            const double theta = w * (first + static_cast<double>(t));
            X(static_cast<Eigen::Index>(t), c) = std::cos(theta);
            X(static_cast<Eigen::Index>(t), c + 1) = std::sin(theta);
        }
    }
    return X;
}

// ---------------------------------------------------------------------------
// Spectrum

Spectrum::Spectrum(std::size_t length, std::vector<double> power)
    : length_(length), power_(std::move(power)) {
    if (length_ < 2) throw Error(ErrorCode::TooShort, "spectrum needs T >= 2");
    if (power_.size() != length_ / 2 + 1) {
        throw Error(ErrorCode::ShapeMismatch, "spectrum for T = " + std::to_string(length_) +
                                                  " needs " + std::to_string(length_ / 2 + 1) +
                                                  " bins");
    }
    for (double p : power_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw Error(ErrorCode::InvalidArgument, "spectrum power must be finite and nonnegative");
        }
    }
}

std::vector<Frequency> Spectrum::grid() const {
    std::vector<Frequency> g;
    g.reserve(power_.size());
    for (std::size_t m = 0; m < power_.size(); ++m) g.push_back(frequency(m));
    return g;
}

} // namespace freqprior
