#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smdsr/image.hpp"
#include "smdsr/rng.hpp"

namespace smdsr {

// Small conditional conv net used as the denoiser:
//   in  = concat(x_t, cond) along channels
//   h   = conv_in(in) + project(time_embedding(t))   (projection broadcast per channel)
//   h   = h + conv_k(silu(h))                        repeated `depth` times
//   out = 1x1 head(h)
// Convolutions are same-padded. Parameters live in one flat vector.
struct DenoiserSpec {
    int x_channels = 3;
    int cond_channels = 3;
    int width = 32;
    int depth = 4;
    int kernel = 3;
    int time_embed_dim = 32;

    int in_channels() const { return x_channels + cond_channels; }
    void validate() const;
    bool operator==(const DenoiserSpec&) const = default;
};

struct LayerShape {
    std::string name;
    std::size_t offset = 0;
    std::size_t count = 0;
};

// Flat parameter layout: conv_in.w, conv_in.b, time_proj.w, time_proj.b,
// block<i>.w, block<i>.b (i = 0..depth-1), head.w, head.b.
std::vector<LayerShape> param_layout(const DenoiserSpec& spec);
std::size_t param_count(const DenoiserSpec& spec);

struct DenoiserParams {
    DenoiserSpec spec;
    std::vector<double> values;
};

// Uniform(-a, a) weights with a = 1/sqrt(fan_in), zero biases. Deterministic
// in the seed.
DenoiserParams init_params(const DenoiserSpec& spec, std::uint64_t seed);

// Sinusoidal embedding of an integer step: pair i of dim gets
// (sin(t * w_i), cos(t * w_i)) with w_i = base^(-2i / dim).
std::vector<double> time_embedding(int t, int dim, double base = 10000.0);

// Activations saved by forward for the matching backward call.
struct DenoiserCache {
    std::uint64_t param_fingerprint = 0;
    int t = 0;
    int height = 0;
    int width = 0;
    Image<double> input;                // concat(x_t, cond)
    std::vector<double> temb;
    std::vector<Image<double>> h;       // h[0] after conv_in+time, h[i+1] after block i
};

Image<double> denoiser_forward(const DenoiserParams& params, const Image<double>& x_t, int t,
                               const Image<double>& cond, DenoiserCache* cache = nullptr);

// Gradient of a scalar loss w.r.t. the flat parameter vector, given the
// loss gradient w.r.t. the network output. The cache must come from a
// forward call with the same parameter values.
std::vector<double> denoiser_backward(const DenoiserParams& params, const DenoiserCache& cache,
                                      const Image<double>& grad_output);

struct AdamState {
    std::size_t step = 0;
    double lr0 = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<double> m;
    std::vector<double> v;
};

AdamState init_adam(std::size_t n, double lr0 = 2e-4);

// Cosine-decayed learning rate: lr0 * 0.5 * (1 + cos(pi * k / total)).
double cosine_lr(double lr0, std::size_t k, std::size_t total);

// One Adam update in place with the given learning rate. Bias-corrected
// moments; first step moves each weight by about lr.
void adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grad, double lr);

std::uint64_t fingerprint(const std::vector<double>& values);

}  // namespace smdsr
