#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "freqprior/error.hpp"

namespace freqprior {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Frequency in cycles per sample. A sinusoid at frequency f is evaluated as
/// cos(2*pi*f*t + phase) with integer t starting at 0. Multiply by 2*pi to
/// obtain radians per sample.
class Frequency {
public:
    constexpr Frequency() = default;
    constexpr explicit Frequency(double cycles_per_sample) : value_(cycles_per_sample) {}

    constexpr double cycles_per_sample() const noexcept { return value_; }
    constexpr double radians_per_sample() const noexcept { return kTwoPi * value_; }

    /// True when the value lies in [0, 0.5].
    constexpr bool in_nyquist_range() const noexcept { return value_ >= 0.0 && value_ <= 0.5; }

    /// Grid frequency m/T.
    static Frequency from_bin(std::size_t m, std::size_t length) {
        return Frequency(static_cast<double>(m) / static_cast<double>(length));
    }

    friend constexpr bool operator==(Frequency, Frequency) = default;
    friend constexpr auto operator<=>(Frequency, Frequency) = default;

private:
    double value_ = 0.0;
};

std::vector<Frequency> to_frequencies(const std::vector<double>& cycles_per_sample);
std::vector<double> to_cycles(const std::vector<Frequency>& freqs);

/// Multichannel real series, T rows (time) by n columns (channels).
/// Immutable after construction.
class TimeSeries {
public:
    explicit TimeSeries(Eigen::MatrixXd values, std::vector<std::string> names = {});

    /// Single-channel convenience constructor.
    static TimeSeries from_vector(const std::vector<double>& values, std::string name = "y");

    std::size_t length() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t channels() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    const std::vector<std::string>& names() const noexcept { return names_; }

    std::vector<double> channel(std::size_t l) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
};

/// Per-channel affine map produced by standardize().
struct StandardizeParams {
    std::vector<double> mean;
    std::vector<double> stddev;
};

/// Zero mean, unit population variance per channel.
/// Throws ConstantChannel when a channel has zero spread.
std::pair<TimeSeries, StandardizeParams> standardize(const TimeSeries& ts);

TimeSeries destandardize(const TimeSeries& ts, const StandardizeParams& params);

/// Amplitude/phase view of a harmonic model: x_l(t) = sum_k amp(l,k) cos(2 pi f_k t + phase(l,k)),
/// with amp >= 0.
struct AmplitudePhase {
    Eigen::MatrixXd amplitude; // n x K
    Eigen::MatrixXd phase;     // n x K, radians in (-pi, pi]
};

/// Truncated harmonic expansion x_t ~ A * Omega(t). Column pair (2k, 2k+1) of
/// the n x 2K amplitude matrix multiplies [cos(2 pi f_k t), sin(2 pi f_k t)].
class HarmonicModel {
public:
    HarmonicModel(std::vector<Frequency> freqs, Eigen::MatrixXd amplitudes);

    static HarmonicModel from_amplitude_phase(std::vector<Frequency> freqs,
                                              const AmplitudePhase& ap);

    std::size_t modes() const noexcept { return freqs_.size(); }
    std::size_t channels() const noexcept { return static_cast<std::size_t>(amplitudes_.rows()); }
    const std::vector<Frequency>& freqs() const noexcept { return freqs_; }
    const Eigen::MatrixXd& amplitudes() const noexcept { return amplitudes_; }

    AmplitudePhase to_amplitude_phase() const;

    /// Model value at integer time t, one entry per channel.
    Eigen::VectorXd evaluate(double t) const;

    /// Contribution of mode k alone at time t.
    Eigen::VectorXd evaluate_mode(std::size_t k, double t) const;

    /// Evaluates rows t = first, first+1, ..., first+count-1.
    Eigen::MatrixXd evaluate_range(double first, std::size_t count) const;

private:
    std::vector<Frequency> freqs_;
    Eigen::MatrixXd amplitudes_;
};

/// T x 2K matrix with rows [cos(2 pi f_k t), sin(2 pi f_k t)]_k for t = first .. first+T-1.
Eigen::MatrixXd harmonic_design(const std::vector<Frequency>& freqs, std::size_t rows,
                                double first = 0.0);

/// Power summed over channels on the half DFT grid m/T, m = 0..floor(T/2).
class Spectrum {
public:
    Spectrum(std::size_t length, std::vector<double> power);

    std::size_t length() const noexcept { return length_; }
    std::size_t bins() const noexcept { return power_.size(); }
    const std::vector<double>& power() const noexcept { return power_; }
    Frequency frequency(std::size_t m) const { return Frequency::from_bin(m, length_); }
    std::vector<Frequency> grid() const;

    /// Bins strictly between DC and Nyquist.
    bool is_interior(std::size_t m) const noexcept { return m > 0 && 2 * m < length_; }

private:
    std::size_t length_;
    std::vector<double> power_;
};

} // namespace freqprior
