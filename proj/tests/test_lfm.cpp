#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "freqprior/lfm.hpp"
#include "support.hpp"

using namespace freqprior;
using namespace freqprior::lfm;
namespace t = freqprior::testing;

namespace {

LfmParams random_params(std::mt19937_64& rng, std::size_t K) {
    std::uniform_real_distribution<double> f(0.01, 0.45), a(0.5, 2.0), b(-3.0, 3.0);
    LfmParams p;
    for (std::size_t k = 0; k < K; ++k) {
        p.freqs.emplace_back(f(rng));
        p.amps.push_back(a(rng));
        p.phases.push_back(b(rng));
    }
    return p;
}

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

} // namespace

TEST_CASE("periodic_embedding: t = 0 with zero phases") {
    const std::vector<Frequency> f{Frequency(0.1), Frequency(0.2), Frequency(0.3)};
    const std::vector<double> b(3, 0.0);
    CHECK(periodic_embedding(0.0, f, b) == std::vector<double>{1, 0, 1, 0, 1, 0});
}

TEST_CASE("periodic_embedding: squared norm equals K") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t K = 1 + static_cast<std::size_t>(trial % 7);
        std::vector<Frequency> f;
        std::vector<double> b;
        for (std::size_t k = 0; k < K; ++k) {
            f.emplace_back(u(rng));
            b.push_back(u(rng));
        }
        const auto e = periodic_embedding(std::floor(u(rng) * 100.0), f, b);
        REQUIRE(e.size() == 2 * K);
        double sq = 0.0;
        for (double v : e) sq += v * v;
        CHECK(std::abs(sq - static_cast<double>(K)) < 1e-12);
    }
}

TEST_CASE("periodic_embedding: elementwise scalar oracle") {
    const std::vector<Frequency> f{Frequency(0.25), Frequency(0.1)};
    const std::vector<double> b{0.0, kTwoPi / 4.0};
    const auto e = periodic_embedding(1.0, f, b);
    const double pi = kTwoPi / 2.0;
    const std::vector<double> expected{std::cos(pi / 2), std::sin(pi / 2), std::cos(0.2 * pi + pi / 2),
                                       std::sin(0.2 * pi + pi / 2)};
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(e[i] - expected[i]) < 1e-12);
}

TEST_CASE("lfm_predict: zero amplitudes and single tone") {
    std::vector<double> ts(512);
    for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = static_cast<double>(i);
    LfmParams zero{{Frequency(0.1), Frequency(0.2)}, {0.0, 0.0}, {1.0, 2.0}};
    for (double v : lfm_predict(zero, ts)) CHECK(v == 0.0);

    const LfmParams one{{Frequency(8.0 / 512)}, {1.0}, {0.0}};
    const auto y = lfm_predict(one, ts);
    const auto ref = t::tone(512, 8.0 / 512);
    for (std::size_t i = 0; i < 512; ++i) CHECK(std::abs(y[i] - ref[i]) < 1e-12);
}

TEST_CASE("lfm_predict: per-term scalar oracle") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> tdist(-1000, 1000);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_params(rng, 4);
        std::vector<double> ts;
        for (int i = 0; i < 10; ++i) ts.push_back(tdist(rng));
        const auto y = lfm_predict(p, ts);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            long double acc = 0.0L;
            for (std::size_t k = 0; k < 4; ++k) {
                acc += p.amps[k] * std::cos(t::kTwoPiL * p.freqs[k].cycles_per_sample() * ts[i] + p.phases[k]);
            }
            CHECK(std::abs(y[i] - static_cast<double>(acc)) < 1e-12);
        }
    }
}

TEST_CASE("lfm_loss_and_grads: global minimum") {
    std::mt19937_64 rng(3);
    const auto p = random_params(rng, 3);
    std::vector<double> ts(100);
    for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = static_cast<double>(i);
    const auto y = TimeSeries::from_vector(lfm_predict(p, ts));
    const auto lg = lfm_loss_and_grads(p, y);
    CHECK(lg.loss < 1e-18 * 100);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(lg.grad_amps[k]) < 1e-8);
        CHECK(std::abs(lg.grad_phases[k]) < 1e-8);
        CHECK(std::abs(lg.grad_freqs[k]) < 1e-8);
    }
}

TEST_CASE("lfm_loss_and_grads: zero amplitude kills phase and frequency gradients") {
    std::mt19937_64 rng(4);
    auto p = random_params(rng, 3);
    p.amps.assign(3, 0.0);
    const TimeSeries y(t::random_matrix(rng, 64, 1));
    const auto lg = lfm_loss_and_grads(p, y);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(lg.grad_phases[k] == 0.0);
        CHECK(lg.grad_freqs[k] == 0.0);
    }
}

TEST_CASE("lfm_loss_and_grads: central finite differences") {
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t K = 1 + static_cast<std::size_t>(trial % 5);
        const auto p = random_params(rng, K);
        const TimeSeries y(t::random_matrix(rng, 64, 1));
        const auto lg = lfm_loss_and_grads(p, y);
        auto loss_at = [&](LfmParams q) { return lfm_loss_and_grads(q, y).loss; };
        for (std::size_t k = 0; k < K; ++k) {
            auto hi = p, lo = p;
            hi.amps[k] += 1e-6;
            lo.amps[k] -= 1e-6;
            worst = std::max(worst, t::rel_err(lg.grad_amps[k], (loss_at(hi) - loss_at(lo)) / 2e-6, 1e-8));
            hi = p, lo = p;
            hi.phases[k] += 1e-6;
            lo.phases[k] -= 1e-6;
            worst = std::max(worst, t::rel_err(lg.grad_phases[k], (loss_at(hi) - loss_at(lo)) / 2e-6, 1e-8));
            hi = p, lo = p;
            hi.freqs[k] = Frequency(p.freqs[k].cycles_per_sample() + 1e-8);
            lo.freqs[k] = Frequency(p.freqs[k].cycles_per_sample() - 1e-8);
            worst = std::max(worst, t::rel_err(lg.grad_freqs[k], (loss_at(hi) - loss_at(lo)) / 2e-8, 1e-8));
        }
    }
    MESSAGE("worst relative gradient error: " << worst);
    CHECK(worst < 1e-5);
}

TEST_CASE("lfm_loss_and_grads: multichannel input is rejected") {
    std::mt19937_64 rng(6);
    try {
        (void)lfm_loss_and_grads(random_params(rng, 2), TimeSeries(t::random_matrix(rng, 10, 2)));
        FAIL("expected MultiChannelUnsupported");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MultiChannelUnsupported);
    }
}

TEST_CASE("adam_step: zero gradient leaves parameters unchanged") {
    std::vector<std::vector<double>> params{{1.0, -2.0}, {3.0}};
    const auto before = params;
    auto state = AdamState::for_groups(params);
    const std::vector<std::vector<double>> grads{{0.0, 0.0}, {0.0}};
    const std::vector<double> lrs{0.1, 0.5};
    for (int i = 0; i < 50; ++i) adam_step(state, {}, params, grads, lrs);
    CHECK(params == before);
}

TEST_CASE("adam_step: first step moves by the learning rate") {
    std::vector<std::vector<double>> params{{0.0}};
    auto state = AdamState::for_groups(params);
    const std::vector<std::vector<double>> grads{{1.0}};
    const std::vector<double> lrs{1e-3};
    adam_step(state, {}, params, grads, lrs);
    CHECK(std::abs(params[0][0] + 1e-3) < 1e-6);
}

TEST_CASE("adam_step on x^2 follows a scalar simulation") {
    // Independent scalar Adam with textbook bias correction.
    const double x0 = 1.0, lr = 0.1;
    std::vector<double> oracle;
    {
        double x = x0, m = 0.0, v = 0.0;
        for (int s = 1; s <= 100; ++s) {
            const double g = 2.0 * x;
            m = 0.9 * m + 0.1 * g;
            v = 0.999 * v + 0.001 * g * g;
            x -= lr * (m / (1.0 - std::pow(0.9, s))) / (std::sqrt(v / (1.0 - std::pow(0.999, s))) + 1e-8);
            oracle.push_back(x);
        }
    }
    std::vector<std::vector<double>> params{{x0}};
    auto state = AdamState::for_groups(params);
    const std::vector<double> lrs{lr};
    for (int s = 0; s < 100; ++s) {
        const std::vector<std::vector<double>> grads{{2.0 * params[0][0]}};
        adam_step(state, {}, params, grads, lrs);
        CHECK(std::abs(params[0][0] - oracle[static_cast<std::size_t>(s)]) < 1e-12);
    }
    CHECK(std::abs(params[0][0]) < 0.1 * x0);
}

TEST_CASE("adam_step: shape mismatch") {
    std::vector<std::vector<double>> params{{1.0, 2.0}};
    auto state = AdamState::for_groups(params);
    const std::vector<std::vector<double>> grads{{1.0}};
    const std::vector<double> lrs{0.1};
    CHECK_THROWS_AS(adam_step(state, {}, params, grads, lrs), Error);
}

TEST_CASE("train_lfm: lr_freq = 0 keeps frequencies bitwise fixed") {
    std::mt19937_64 rng(7);
    const TimeSeries y(t::random_matrix(rng, 128, 1));
    for (auto mode : {InitMode::Fft, InitMode::Random}) {
        TrainConfig cfg;
        cfg.k = 3;
        cfg.lr_freq = 0.0;
        cfg.steps = 500;
        cfg.init_mode = mode;
        cfg.seed = 99;
        const auto rep = train_lfm(y, cfg);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(bitwise_equal(rep.final.freqs[k].cycles_per_sample(), rep.initial.freqs[k].cycles_per_sample()));
        }
        CHECK(rep.loss_history.size() == 500);
    }
}

TEST_CASE("train_lfm: zero steps") {
    std::mt19937_64 rng(8);
    const TimeSeries y(t::random_matrix(rng, 64, 1));
    TrainConfig cfg;
    cfg.k = 2;
    cfg.steps = 0;
    const auto rep = train_lfm(y, cfg);
    CHECK(rep.loss_history.empty());
    CHECK(to_cycles(rep.final.freqs) == to_cycles(rep.initial.freqs));
    CHECK(rep.final.amps == rep.initial.amps);
    CHECK(rep.final.phases == rep.initial.phases);
}

TEST_CASE("train_lfm: deterministic for a fixed seed") {
    std::mt19937_64 rng(9);
    const TimeSeries y(t::random_matrix(rng, 100, 1));
    TrainConfig cfg;
    cfg.k = 3;
    cfg.steps = 300;
    cfg.lr_freq = 1e-3;
    cfg.init_mode = InitMode::Random;
    cfg.seed = 1234;
    const auto a = train_lfm(y, cfg);
    const auto b = train_lfm(y, cfg);
    CHECK(a.loss_history == b.loss_history);
    CHECK(to_cycles(a.final.freqs) == to_cycles(b.final.freqs));
    CHECK(a.final.amps == b.final.amps);
    CHECK(a.final.phases == b.final.phases);
    cfg.seed = 1235;
    CHECK(to_cycles(train_lfm(y, cfg).initial.freqs) != to_cycles(a.initial.freqs));
}

TEST_CASE("train_lfm: random init draws within the configured range") {
    const TimeSeries y = TimeSeries::from_vector(t::tone(64, 0.1));
    TrainConfig cfg;
    cfg.k = 5;
    cfg.init_mode = InitMode::Random;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.seed = seed;
        const auto p = initialize(y, cfg);
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(p.freqs[k].cycles_per_sample() >= 0.0);
            CHECK(p.freqs[k].cycles_per_sample() < 0.15);
            CHECK(p.amps[k] >= 0.0);
            CHECK(p.amps[k] < 1.0);
            CHECK(p.phases[k] >= 0.0);
            CHECK(p.phases[k] < kTwoPi);
        }
    }
}

TEST_CASE("train_lfm: FFT init on a noiseless on-grid tone reaches tiny loss") {
    const auto y = TimeSeries::from_vector(t::tone(512, 8.0 / 512, 1.3, 0.6));
    TrainConfig cfg;
    cfg.k = 1;
    cfg.steps = 2000;
    const auto rep = train_lfm(y, cfg);
    CHECK(rep.final_loss < 1e-6);
    CHECK(*std::min_element(rep.loss_history.begin(), rep.loss_history.end()) < 1e-6);
}

TEST_CASE("train_lfm: trajectory logging") {
    const auto y = TimeSeries::from_vector(t::tone(64, 0.1));
    TrainConfig cfg;
    cfg.k = 2;
    cfg.steps = 250;
    cfg.log_every = 100;
    const auto rep = train_lfm(y, cfg);
    REQUIRE(rep.freq_trajectory.size() == 4);
    CHECK(rep.freq_trajectory[0].step == 0);
    CHECK(rep.freq_trajectory[1].step == 100);
    CHECK(rep.freq_trajectory[3].step == 250);
    CHECK(rep.freq_trajectory[3].freqs == to_cycles(rep.final.freqs));
}

TEST_CASE("train_lfm: multichannel input is rejected") {
    std::mt19937_64 rng(10);
    CHECK_THROWS_AS(train_lfm(TimeSeries(t::random_matrix(rng, 32, 2)), TrainConfig{}), Error);
}
