#include <cmath>
#include <cstring>
#include <stdexcept>

#include "doctest.h"
#include "smdsr/diffusion.hpp"
#include "smdsr/invariants.hpp"
#include "smdsr/rng.hpp"
#include "smdsr/schedule.hpp"

using namespace smdsr;

namespace {

Image<double> random_unit(int c, int h, int w, uint64_t seed, double amp = 0.9) {
    Image<double> img(c, h, w, ValueRange::UnitSigned);
    Rng rng(seed);
    for (auto& v : img.data) v = rng.uniform(-amp, amp);
    return img;
}

Image<double> gauss(int c, int h, int w, uint64_t seed) {
    Rng rng(seed);
    return gaussian_image<double>(c, h, w, rng);
}

}  // namespace

TEST_CASE("single forward step matches its definition") {
    NoiseSchedule s = build_schedule(10, ScheduleKind::Cosine);
    Image<double> prev = random_unit(2, 3, 3, 11);
    Image<double> mask = random_unit(1, 3, 3, 12, 0.5);
    Image<double> eps = gauss(2, 3, 3, 13);

    Image<double> next = forward_step(prev, mask, s, 4, eps);
    double sb = std::sqrt(s.beta[4]);
    double sa = std::sqrt(1.0 - s.beta[4]);
    for (int c = 0; c < 2; ++c)
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 3; ++x) {
                double want = sa * prev.at(c, y, x) + sb * (mask.at(0, y, x) + eps.at(c, y, x));
                CHECK(next.at(c, y, x) == doctest::Approx(want).epsilon(1e-15));
            }
}

TEST_CASE("closed-form jump matches its definition") {
    NoiseSchedule s = build_schedule(25, ScheduleKind::Linear);
    Image<double> x0 = random_unit(3, 4, 4, 21);
    Image<double> mask = random_unit(1, 4, 4, 22, 0.4);
    Image<double> eps = gauss(3, 4, 4, 23);

    int t = 17;
    Image<double> xt = forward_jump(x0, mask, s, t, eps);
    double a = std::sqrt(s.alpha_bar[t]);
    double b = s.phi[t];
    double c3 = std::sqrt(1.0 - s.alpha_bar[t]);
    for (size_t i = 0; i < xt.data.size(); ++i) {
        size_t px = i % 16;
        double want = a * x0.data[i] + b * mask.data[px] + c3 * eps.data[i];
        CHECK(xt.data[i] == doctest::Approx(want).epsilon(1e-15));
    }
}

TEST_CASE("iterated zero-noise steps equal the closed-form jump") {
    CHECK(forward_identity_max_rel<double>(build_schedule(100, ScheduleKind::Cosine), 5) <= 1e-12);
    CHECK(forward_identity_max_rel<double>(build_schedule(100, ScheduleKind::Linear), 6) <= 1e-12);
    CHECK(forward_identity_max_rel<float>(build_schedule(100, ScheduleKind::Cosine), 7) <= 1e-6);
    CHECK(forward_identity_max_rel<float>(build_schedule(100, ScheduleKind::Linear), 8) <= 1e-6);
}

TEST_CASE("loss target blends mask and noise with the scheduled gain") {
    NoiseSchedule s = build_schedule(40, ScheduleKind::Cosine);
    Image<double> mask = random_unit(1, 5, 5, 31, 0.3);
    Image<double> eps = gauss(3, 5, 5, 32);
    int t = 9;
    Image<double> tgt = loss_target(mask, eps, s, t);
    double gain = std::sqrt(1.0 - s.alpha_bar[t]) / std::sqrt(s.beta[t]);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 5; ++x)
                CHECK(tgt.at(c, y, x) ==
                      doctest::Approx(gain * mask.at(0, y, x) + eps.at(c, y, x)).epsilon(1e-15));
}

TEST_CASE("zero mask reduces the loss target to plain noise") {
    NoiseSchedule s = build_schedule(40, ScheduleKind::Cosine);
    Image<double> mask(1, 5, 5, ValueRange::UnitSigned);
    Image<double> eps = gauss(3, 5, 5, 33);
    Image<double> tgt = loss_target(mask, eps, s, 13);
    for (size_t i = 0; i < eps.data.size(); ++i) CHECK(tgt.data[i] == eps.data[i]);
}

TEST_CASE("two posterior mean forms agree away from t=1") {
    CHECK(posterior_equivalence_max_rel<double>(build_schedule(100, ScheduleKind::Cosine), 99, 1000) <= 1e-10);
    CHECK(posterior_equivalence_max_rel<double>(build_schedule(100, ScheduleKind::Linear), 98, 1000) <= 1e-10);
    CHECK(posterior_equivalence_max_rel<float>(build_schedule(100, ScheduleKind::Cosine), 97, 1000) <= 1e-5);
}

TEST_CASE("estimate form at t=1 returns x0 when fed the exact target") {
    NoiseSchedule s = build_schedule(30, ScheduleKind::Cosine);
    Image<double> x0 = random_unit(1, 4, 4, 41);
    Image<double> mask = random_unit(1, 4, 4, 42, 0.3);
    Image<double> eps = gauss(1, 4, 4, 43);
    Image<double> x1 = forward_jump(x0, mask, s, 1, eps);
    // the exact regression target at t=1
    Image<double> est = loss_target(mask, eps, s, 1);
    Image<double> mu = posterior_mean_eps(x1, est, s, 1);
    CHECK(max_abs_diff(mu, x0) <= 1e-12);
}

TEST_CASE("x0 form rejects t=1 and t out of range") {
    NoiseSchedule s = build_schedule(10, ScheduleKind::Cosine);
    Image<double> a(1, 2, 2, ValueRange::UnitSigned);
    Image<double> m(1, 2, 2, ValueRange::UnitSigned);
    CHECK_THROWS_AS(posterior_mean_x0(a, a, m, a, s, 1), std::invalid_argument);
    CHECK_THROWS_AS(posterior_mean_x0(a, a, m, a, s, 11), std::invalid_argument);
    CHECK_THROWS_AS(posterior_mean_eps(a, a, s, 0), std::invalid_argument);
}

TEST_CASE("posterior forms disagree when the drift recurrence is corrupted") {
    NoiseSchedule good = build_schedule(20, ScheduleKind::Cosine);
    NoiseSchedule bad = corrupt_phi_recurrence(good);
    CHECK(posterior_equivalence_max_rel<double>(good, 5, 100) <= 1e-10);
    CHECK(posterior_equivalence_max_rel<double>(bad, 5, 100) > 1e-3);
}

TEST_CASE("zero-mask pipeline matches an independent plain-diffusion reference") {
    CHECK(vanilla_reduction_max_dev(3) <= 1e-10);
    CHECK(vanilla_reduction_max_dev(4) <= 1e-10);
}

TEST_CASE("oracle sampler with suppressed noise recovers the clean image") {
    CHECK(oracle_sampler_max_abs(build_schedule(100, ScheduleKind::Cosine), 16, 16, 55) <= 1e-4);
    CHECK(oracle_sampler_max_abs(build_schedule(10, ScheduleKind::Linear), 8, 8, 56) <= 1e-4);
}

TEST_CASE("sampler is bitwise deterministic for a fixed seed") {
    NoiseSchedule s = build_schedule(12, ScheduleKind::Cosine);
    Image<double> cond = random_unit(3, 6, 6, 61, 0.5);
    DenoiseFn<double> denoise = [](const Image<double>& x, int, const Image<double>&) {
        Image<double> e = x;
        for (auto& v : e.data) v *= 0.5;
        return e;
    };
    SamplerOptions opts;
    opts.seed = 77;
    Image<double> a = reverse_sample(denoise, cond, s, opts);
    Image<double> b = reverse_sample(denoise, cond, s, opts);
    REQUIRE(a.data.size() == b.data.size());
    CHECK(std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0);
    opts.seed = 78;
    Image<double> c = reverse_sample(denoise, cond, s, opts);
    CHECK(max_abs_diff(a, c) > 0.0);
}

TEST_CASE("sampler can start from a caller-provided state") {
    NoiseSchedule s = build_schedule(5, ScheduleKind::Cosine);
    Image<double> cond(1, 3, 3, ValueRange::UnitSigned);
    Image<double> start = random_unit(1, 3, 3, 71);
    DenoiseFn<double> zero = [](const Image<double>& x, int, const Image<double>&) {
        Image<double> e = x;
        for (auto& v : e.data) v = 0.0;
        return e;
    };
    SamplerOptions opts;
    opts.noise_scale = 0.0;
    Image<double> out = reverse_sample(zero, cond, s, opts, &start);
    // zero estimates mean each step just rescales by 1/sqrt(alpha_t)
    double scale = 1.0;
    for (int t = 1; t <= 5; ++t) scale /= std::sqrt(s.alpha[t]);
    for (size_t i = 0; i < out.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(start.data[i] * scale).epsilon(1e-12));
}

TEST_CASE("mask broadcast requires matching spatial shape") {
    NoiseSchedule s = build_schedule(10, ScheduleKind::Cosine);
    Image<double> x0 = random_unit(3, 4, 4, 81);
    Image<double> eps = gauss(3, 4, 4, 82);
    Image<double> bad_mask(1, 4, 5, ValueRange::UnitSigned);
    CHECK_THROWS_AS(forward_jump(x0, bad_mask, s, 3, eps), std::invalid_argument);
    Image<double> bad_chan(2, 4, 4, ValueRange::UnitSigned);
    CHECK_THROWS_AS(forward_jump(x0, bad_chan, s, 3, eps), std::invalid_argument);
    Image<double> full(3, 4, 4, ValueRange::UnitSigned);
    CHECK_NOTHROW(forward_jump(x0, full, s, 3, eps));
}
