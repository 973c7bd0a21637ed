#include <cmath>
#include <cstring>
#include <stdexcept>

#include "doctest.h"
#include "smdsr/denoiser.hpp"
#include "smdsr/invariants.hpp"
#include "smdsr/rng.hpp"

using namespace smdsr;

namespace {

DenoiserSpec tiny_spec() {
    DenoiserSpec s;
    s.x_channels = 1;
    s.cond_channels = 1;
    s.width = 4;
    s.depth = 1;
    s.kernel = 3;
    s.time_embed_dim = 4;
    return s;
}

Image<double> random_image(int c, int h, int w, uint64_t seed) {
    Image<double> img(c, h, w, ValueRange::UnitSigned);
    Rng rng(seed);
    for (auto& v : img.data) v = rng.uniform(-1.0, 1.0);
    return img;
}

std::size_t layout_offset(const DenoiserSpec& spec, const std::string& name) {
    for (const auto& l : param_layout(spec))
        if (l.name == name) return l.offset;
    throw std::runtime_error("layout entry not found: " + name);
}

}  // namespace

TEST_CASE("parameter count matches the closed-form layout size") {
    DenoiserSpec tiny = tiny_spec();
    // conv_in 4*2*9+4, time 4*4+4, block 4*4*9+4, head 4+1
    CHECK(param_count(tiny) == 72 + 4 + 16 + 4 + 144 + 4 + 4 + 1);

    DenoiserSpec d;  // defaults
    size_t expect = 32ull * 6 * 9 + 32 + 32ull * 32 + 32 + 4ull * (32ull * 32 * 9 + 32) + 3ull * 32 + 3;
    CHECK(param_count(d) == expect);

    // layout is contiguous and covers the whole vector
    auto layout = param_layout(d);
    size_t pos = 0;
    for (const auto& l : layout) {
        CHECK(l.offset == pos);
        pos += l.count;
    }
    CHECK(pos == param_count(d));
    CHECK(layout.front().name == "conv_in.w");
    CHECK(layout.back().name == "head.b");
}

TEST_CASE("spec validation rejects malformed nets") {
    DenoiserSpec s = tiny_spec();
    s.kernel = 4;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = tiny_spec();
    s.width = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = tiny_spec();
    s.time_embed_dim = 5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = tiny_spec();
    s.depth = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("initialization is seeded and leaves biases at zero") {
    DenoiserSpec spec = tiny_spec();
    DenoiserParams a = init_params(spec, 42);
    DenoiserParams b = init_params(spec, 42);
    DenoiserParams c = init_params(spec, 43);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    for (const auto& l : param_layout(spec)) {
        if (l.name.size() >= 2 && l.name.substr(l.name.size() - 2) == ".b")
            for (size_t i = 0; i < l.count; ++i) CHECK(a.values[l.offset + i] == 0.0);
        else {
            bool any_nonzero = false;
            for (size_t i = 0; i < l.count; ++i) any_nonzero |= a.values[l.offset + i] != 0.0;
            CHECK(any_nonzero);
        }
    }
}

TEST_CASE("all-zero parameters give an all-zero output") {
    DenoiserSpec spec = tiny_spec();
    DenoiserParams p;
    p.spec = spec;
    p.values.assign(param_count(spec), 0.0);
    Image<double> out = denoiser_forward(p, random_image(1, 5, 5, 1), 3, random_image(1, 5, 5, 2));
    for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("head bias alone produces a constant plane") {
    DenoiserSpec spec = tiny_spec();
    DenoiserParams p;
    p.spec = spec;
    p.values.assign(param_count(spec), 0.0);
    p.values[layout_offset(spec, "head.b")] = 0.25;
    Image<double> out = denoiser_forward(p, random_image(1, 4, 6, 3), 9, random_image(1, 4, 6, 4));
    for (double v : out.data) CHECK(v == 0.25);
}

TEST_CASE("forward is pure and cache does not change the output") {
    DenoiserSpec spec = tiny_spec();
    DenoiserParams p = init_params(spec, 7);
    Image<double> x = random_image(1, 6, 6, 5);
    Image<double> cond = random_image(1, 6, 6, 6);
    Image<double> x_copy = x;
    DenoiserCache cache;
    Image<double> a = denoiser_forward(p, x, 4, cond, &cache);
    Image<double> b = denoiser_forward(p, x, 4, cond);
    CHECK(std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0);
    CHECK(x.data == x_copy.data);
    CHECK(cache.h.size() == static_cast<size_t>(spec.depth) + 1);
}

TEST_CASE("forward validates shapes and timestep") {
    DenoiserSpec spec = tiny_spec();
    DenoiserParams p = init_params(spec, 7);
    Image<double> x = random_image(1, 6, 6, 5);
    Image<double> cond_bad = random_image(1, 6, 5, 6);
    CHECK_THROWS_AS(denoiser_forward(p, x, 4, cond_bad), std::invalid_argument);
    Image<double> x_bad = random_image(2, 6, 6, 5);
    CHECK_THROWS_AS(denoiser_forward(p, x_bad, 4, random_image(1, 6, 6, 6)), std::invalid_argument);
    CHECK_THROWS_AS(denoiser_forward(p, x, -1, random_image(1, 6, 6, 6)), std::invalid_argument);
    p.values.pop_back();
    CHECK_THROWS_AS(denoiser_forward(p, x, 4, random_image(1, 6, 6, 6)), std::invalid_argument);
}

TEST_CASE("time embedding follows the sinusoid ladder") {
    auto e = time_embedding(3, 4);
    double w1 = std::pow(10000.0, -0.5);
    CHECK(e[0] == doctest::Approx(std::sin(3.0)).epsilon(1e-14));
    CHECK(e[1] == doctest::Approx(std::cos(3.0)).epsilon(1e-14));
    CHECK(e[2] == doctest::Approx(std::sin(3.0 * w1)).epsilon(1e-14));
    CHECK(e[3] == doctest::Approx(std::cos(3.0 * w1)).epsilon(1e-14));
    // t=0 embeds as alternating (0, 1)
    auto z = time_embedding(0, 6);
    for (int i = 0; i < 3; ++i) {
        CHECK(z[2 * i] == 0.0);
        CHECK(z[2 * i + 1] == 1.0);
    }
    CHECK_THROWS_AS(time_embedding(1, 3), std::invalid_argument);
}

TEST_CASE("distinct timesteps change the output") {
    DenoiserSpec spec = tiny_spec();
    DenoiserParams p = init_params(spec, 12);
    Image<double> x = random_image(1, 5, 5, 13);
    Image<double> cond = random_image(1, 5, 5, 14);
    Image<double> a = denoiser_forward(p, x, 1, cond);
    Image<double> b = denoiser_forward(p, x, 2, cond);
    CHECK(max_abs_diff(a, b) > 0.0);
}

TEST_CASE("analytic gradient matches central finite differences") {
    CHECK(denoiser_fd_max_rel(tiny_spec(), 31, 6, 6, 1e-3) <= 1e-4);
}

TEST_CASE("backward is linear in the upstream gradient") {
    DenoiserSpec spec = tiny_spec();
    DenoiserParams p = init_params(spec, 17);
    Image<double> x = random_image(1, 5, 5, 18);
    Image<double> cond = random_image(1, 5, 5, 19);
    DenoiserCache cache;
    denoiser_forward(p, x, 5, cond, &cache);
    Image<double> g = random_image(1, 5, 5, 20);
    Image<double> g2 = g;
    for (auto& v : g2.data) v *= 2.0;
    auto ga = denoiser_backward(p, cache, g);
    auto gb = denoiser_backward(p, cache, g2);
    REQUIRE(ga.size() == gb.size());
    for (size_t i = 0; i < ga.size(); ++i)
        CHECK(gb[i] == doctest::Approx(2.0 * ga[i]).epsilon(1e-12));
}

TEST_CASE("backward rejects a cache built from different parameters") {
    DenoiserSpec spec = tiny_spec();
    DenoiserParams p = init_params(spec, 23);
    Image<double> x = random_image(1, 4, 4, 24);
    Image<double> cond = random_image(1, 4, 4, 25);
    DenoiserCache cache;
    denoiser_forward(p, x, 2, cond, &cache);
    const double saved = p.values[0];
    p.values[0] = saved + 1.0;
    Image<double> g = random_image(1, 4, 4, 26);
    CHECK_THROWS_AS(denoiser_backward(p, cache, g), std::runtime_error);
    p.values[0] = saved;
    CHECK_NOTHROW(denoiser_backward(p, cache, g));
    Image<double> g_bad = random_image(1, 4, 5, 26);
    CHECK_THROWS_AS(denoiser_backward(p, cache, g_bad), std::invalid_argument);
}

TEST_CASE("first optimizer step moves weights by about the learning rate") {
    std::vector<double> params = {1.0, -2.0};
    std::vector<double> grad = {0.5, -0.001};
    AdamState st = init_adam(2);
    adam_step(st, params, grad, 1e-3);
    CHECK(std::abs(params[0] - 1.0) == doctest::Approx(1e-3).epsilon(1e-4));
    CHECK(std::abs(params[1] + 2.0) == doctest::Approx(1e-3).epsilon(1e-4));
    CHECK(params[0] < 1.0);    // moved against the gradient
    CHECK(params[1] > -2.0);
    CHECK(st.step == 1);
}

TEST_CASE("optimizer validates sizes") {
    std::vector<double> params = {1.0};
    std::vector<double> grad = {0.5, 0.5};
    AdamState st = init_adam(1);
    CHECK_THROWS_AS(adam_step(st, params, grad, 1e-3), std::invalid_argument);
}

TEST_CASE("cosine learning rate decays from lr0 to zero") {
    CHECK(cosine_lr(2e-4, 0, 100) == 2e-4);
    CHECK(cosine_lr(2e-4, 100, 100) == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(cosine_lr(2e-4, 50, 100) == doctest::Approx(1e-4).epsilon(1e-12));
    double prev = cosine_lr(2e-4, 0, 100);
    for (size_t k = 1; k <= 100; ++k) {
        double cur = cosine_lr(2e-4, k, 100);
        CHECK(cur < prev);
        prev = cur;
    }
    // past-the-end clamps instead of rising again
    CHECK(cosine_lr(2e-4, 150, 100) == cosine_lr(2e-4, 100, 100));
    CHECK_THROWS_AS(cosine_lr(2e-4, 0, 0), std::invalid_argument);
}

TEST_CASE("parameter fingerprint reacts to any value change") {
    std::vector<double> v = {1.0, 2.0, 3.0};
    uint64_t f = fingerprint(v);
    CHECK(fingerprint(v) == f);
    v[1] += 1e-15;
    CHECK(fingerprint(v) != f);
}
