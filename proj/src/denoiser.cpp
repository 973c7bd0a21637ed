#include "smdsr/denoiser.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace smdsr {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double silu(double x) { return x * sigmoid(x); }
double silu_grad(double x) {
    double s = sigmoid(x);
    return s * (1.0 + x * (1.0 - s));
}

// Same-padded correlation: out[oc] = b[oc] + sum_ic w[oc][ic] * in[ic].
// Weight layout w[((oc * in_ch + ic) * k + ky) * k + kx].
void conv2d(const Image<double>& in, const double* w, const double* b, int out_ch, int k,
            Image<double>& out) {
    const int H = in.height, W = in.width, in_ch = in.channels, r = k / 2;
    out = Image<double>(out_ch, H, W, in.range);
    for (int oc = 0; oc < out_ch; ++oc) {
        double* plane = &out.at(oc, 0, 0);
        const std::size_t n = out.plane();
        for (std::size_t p = 0; p < n; ++p) plane[p] = b[oc];
    }
    for (int oc = 0; oc < out_ch; ++oc) {
        for (int ic = 0; ic < in_ch; ++ic) {
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - r;
                const int y0 = dy < 0 ? -dy : 0;
                const int y1 = dy > 0 ? H - dy : H;
                for (int kx = 0; kx < k; ++kx) {
                    const int dx = kx - r;
                    const int x0 = dx < 0 ? -dx : 0;
                    const int x1 = dx > 0 ? W - dx : W;
                    const double wv = w[((static_cast<std::size_t>(oc) * in_ch + ic) * k + ky) * k + kx];
                    for (int y = y0; y < y1; ++y) {
                        const double* src = &in.at(ic, y + dy, 0);
                        double* dst = &out.at(oc, y, 0);
                        for (int x = x0; x < x1; ++x) dst[x] += wv * src[x + dx];
                    }
                }
            }
        }
    }
}

// Accumulates dL/dw and dL/db given upstream gradient g on the conv output.
void conv2d_weight_grad(const Image<double>& in, const Image<double>& g, int k,
                        double* gw, double* gb) {
    const int H = in.height, W = in.width, in_ch = in.channels, out_ch = g.channels, r = k / 2;
    for (int oc = 0; oc < out_ch; ++oc) {
        double s = 0.0;
        const double* plane = &g.at(oc, 0, 0);
        const std::size_t n = g.plane();
        for (std::size_t p = 0; p < n; ++p) s += plane[p];
        gb[oc] += s;
    }
    for (int oc = 0; oc < out_ch; ++oc) {
        for (int ic = 0; ic < in_ch; ++ic) {
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - r;
                const int y0 = dy < 0 ? -dy : 0;
                const int y1 = dy > 0 ? H - dy : H;
                for (int kx = 0; kx < k; ++kx) {
                    const int dx = kx - r;
                    const int x0 = dx < 0 ? -dx : 0;
                    const int x1 = dx > 0 ? W - dx : W;
                    double acc = 0.0;
                    for (int y = y0; y < y1; ++y) {
                        const double* src = &in.at(ic, y + dy, 0);
                        const double* gp = &g.at(oc, y, 0);
                        for (int x = x0; x < x1; ++x) acc += gp[x] * src[x + dx];
                    }
                    gw[((static_cast<std::size_t>(oc) * in_ch + ic) * k + ky) * k + kx] += acc;
                }
            }
        }
    }
}

// dL/d(input) of the conv: scatter the upstream gradient back through the
// same taps the forward pass read.
void conv2d_input_grad(const Image<double>& g, const double* w, int in_ch, int k,
                       Image<double>& gin) {
    const int H = g.height, W = g.width, out_ch = g.channels, r = k / 2;
    gin = Image<double>(in_ch, H, W, g.range);
    for (int oc = 0; oc < out_ch; ++oc) {
        for (int ic = 0; ic < in_ch; ++ic) {
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - r;
                const int y0 = dy < 0 ? -dy : 0;
                const int y1 = dy > 0 ? H - dy : H;
                for (int kx = 0; kx < k; ++kx) {
                    const int dx = kx - r;
                    const int x0 = dx < 0 ? -dx : 0;
                    const int x1 = dx > 0 ? W - dx : W;
                    const double wv = w[((static_cast<std::size_t>(oc) * in_ch + ic) * k + ky) * k + kx];
                    for (int y = y0; y < y1; ++y) {
                        double* dst = &gin.at(ic, y + dy, 0);
                        const double* gp = &g.at(oc, y, 0);
                        for (int x = x0; x < x1; ++x) dst[x + dx] += wv * gp[x];
                    }
                }
            }
        }
    }
}

struct Offsets {
    std::size_t conv_in_w, conv_in_b;
    std::size_t time_w, time_b;
    std::vector<std::size_t> block_w, block_b;
    std::size_t head_w, head_b;
    std::size_t total;
};

Offsets offsets_for(const DenoiserSpec& s) {
    Offsets o;
    const std::size_t k2 = static_cast<std::size_t>(s.kernel) * s.kernel;
    std::size_t p = 0;
    o.conv_in_w = p; p += static_cast<std::size_t>(s.width) * s.in_channels() * k2;
    o.conv_in_b = p; p += s.width;
    o.time_w = p; p += static_cast<std::size_t>(s.width) * s.time_embed_dim;
    o.time_b = p; p += s.width;
    for (int i = 0; i < s.depth; ++i) {
        o.block_w.push_back(p); p += static_cast<std::size_t>(s.width) * s.width * k2;
        o.block_b.push_back(p); p += s.width;
    }
    o.head_w = p; p += static_cast<std::size_t>(s.x_channels) * s.width;
    o.head_b = p; p += s.x_channels;
    o.total = p;
    return o;
}

}  // namespace

void DenoiserSpec::validate() const {
    if (x_channels < 1) throw std::invalid_argument("DenoiserSpec: x_channels must be >= 1");
    if (cond_channels < 0) throw std::invalid_argument("DenoiserSpec: cond_channels must be >= 0");
    if (width < 1) throw std::invalid_argument("DenoiserSpec: width must be >= 1");
    if (depth < 1) throw std::invalid_argument("DenoiserSpec: depth must be >= 1");
    if (kernel < 1 || kernel % 2 == 0)
        throw std::invalid_argument("DenoiserSpec: kernel must be odd and >= 1");
    if (time_embed_dim < 2 || time_embed_dim % 2 != 0)
        throw std::invalid_argument("DenoiserSpec: time_embed_dim must be even and >= 2");
}

std::vector<LayerShape> param_layout(const DenoiserSpec& spec) {
    spec.validate();
    const Offsets o = offsets_for(spec);
    std::vector<LayerShape> out;
    out.push_back({"conv_in.w", o.conv_in_w, o.conv_in_b - o.conv_in_w});
    out.push_back({"conv_in.b", o.conv_in_b, o.time_w - o.conv_in_b});
    out.push_back({"time_proj.w", o.time_w, o.time_b - o.time_w});
    out.push_back({"time_proj.b", o.time_b, o.block_w[0] - o.time_b});
    for (int i = 0; i < spec.depth; ++i) {
        std::size_t end_w = o.block_b[i];
        std::size_t end_b = (i + 1 < spec.depth) ? o.block_w[i + 1] : o.head_w;
        out.push_back({"block" + std::to_string(i) + ".w", o.block_w[i], end_w - o.block_w[i]});
        out.push_back({"block" + std::to_string(i) + ".b", o.block_b[i], end_b - o.block_b[i]});
    }
    out.push_back({"head.w", o.head_w, o.head_b - o.head_w});
    out.push_back({"head.b", o.head_b, o.total - o.head_b});
    return out;
}

std::size_t param_count(const DenoiserSpec& spec) {
    spec.validate();
    return offsets_for(spec).total;
}

DenoiserParams init_params(const DenoiserSpec& spec, std::uint64_t seed) {
    spec.validate();
    const Offsets o = offsets_for(spec);
    DenoiserParams p;
    p.spec = spec;
    p.values.assign(o.total, 0.0);
    Rng rng(seed);
    auto fill = [&](std::size_t off, std::size_t count, std::size_t fan_in) {
        const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i) p.values[off + i] = rng.uniform(-a, a);
    };
    const std::size_t k2 = static_cast<std::size_t>(spec.kernel) * spec.kernel;
    fill(o.conv_in_w, o.conv_in_b - o.conv_in_w, spec.in_channels() * k2);
    fill(o.time_w, o.time_b - o.time_w, spec.time_embed_dim);
    for (int i = 0; i < spec.depth; ++i)
        fill(o.block_w[i], o.block_b[i] - o.block_w[i], static_cast<std::size_t>(spec.width) * k2);
    fill(o.head_w, o.head_b - o.head_w, spec.width);
    return p;
}

std::vector<double> time_embedding(int t, int dim, double base) {
    if (dim < 2 || dim % 2 != 0)
        throw std::invalid_argument("time_embedding: dim must be even and >= 2");
    std::vector<double> e(dim);
    for (int i = 0; i < dim / 2; ++i) {
        double w = std::pow(base, -2.0 * i / dim);
        e[2 * i] = std::sin(t * w);
        e[2 * i + 1] = std::cos(t * w);
    }
    return e;
}

std::uint64_t fingerprint(const std::vector<double>& values) {
    std::uint64_t h = 1469598103934665603ull;
    for (double v : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

Image<double> denoiser_forward(const DenoiserParams& params, const Image<double>& x_t, int t,
                               const Image<double>& cond, DenoiserCache* cache) {
    const DenoiserSpec& s = params.spec;
    s.validate();
    const Offsets o = offsets_for(s);
    if (params.values.size() != o.total)
        throw std::invalid_argument("denoiser_forward: parameter vector size mismatch");
    if (x_t.channels != s.x_channels)
        throw std::invalid_argument("denoiser_forward: x_t channel mismatch");
    if (cond.channels != s.cond_channels || cond.height != x_t.height || cond.width != x_t.width)
        throw std::invalid_argument("denoiser_forward: condition shape mismatch");
    if (t < 0) throw std::invalid_argument("denoiser_forward: negative timestep");

    const int H = x_t.height, W = x_t.width;
    Image<double> in(s.in_channels(), H, W, ValueRange::UnitSigned);
    std::copy(x_t.data.begin(), x_t.data.end(), in.data.begin());
    std::copy(cond.data.begin(), cond.data.end(), in.data.begin() + x_t.data.size());

    const double* pv = params.values.data();
    Image<double> h;
    conv2d(in, pv + o.conv_in_w, pv + o.conv_in_b, s.width, s.kernel, h);

    std::vector<double> temb = time_embedding(t, s.time_embed_dim);
    for (int ch = 0; ch < s.width; ++ch) {
        double proj = pv[o.time_b + ch];
        const double* wrow = pv + o.time_w + static_cast<std::size_t>(ch) * s.time_embed_dim;
        for (int d = 0; d < s.time_embed_dim; ++d) proj += wrow[d] * temb[d];
        double* plane = &h.at(ch, 0, 0);
        const std::size_t n = h.plane();
        for (std::size_t p = 0; p < n; ++p) plane[p] += proj;
    }

    if (cache) {
        cache->param_fingerprint = fingerprint(params.values);
        cache->t = t;
        cache->height = H;
        cache->width = W;
        cache->input = in;
        cache->temb = temb;
        cache->h.clear();
        cache->h.push_back(h);
    }

    Image<double> act(s.width, H, W), delta;
    for (int i = 0; i < s.depth; ++i) {
        for (std::size_t p = 0; p < h.data.size(); ++p) act.data[p] = silu(h.data[p]);
        conv2d(act, pv + o.block_w[i], pv + o.block_b[i], s.width, s.kernel, delta);
        for (std::size_t p = 0; p < h.data.size(); ++p) h.data[p] += delta.data[p];
        if (cache) cache->h.push_back(h);
    }

    Image<double> out(s.x_channels, H, W, ValueRange::UnitSigned);
    const std::size_t plane = out.plane();
    for (int oc = 0; oc < s.x_channels; ++oc) {
        double* dst = &out.at(oc, 0, 0);
        for (std::size_t p = 0; p < plane; ++p) dst[p] = pv[o.head_b + oc];
        for (int ic = 0; ic < s.width; ++ic) {
            const double wv = pv[o.head_w + static_cast<std::size_t>(oc) * s.width + ic];
            const double* src = &h.at(ic, 0, 0);
            for (std::size_t p = 0; p < plane; ++p) dst[p] += wv * src[p];
        }
    }
    return out;
}

std::vector<double> denoiser_backward(const DenoiserParams& params, const DenoiserCache& cache,
                                      const Image<double>& grad_output) {
    const DenoiserSpec& s = params.spec;
    s.validate();
    const Offsets o = offsets_for(s);
    if (params.values.size() != o.total)
        throw std::invalid_argument("denoiser_backward: parameter vector size mismatch");
    if (cache.h.size() != static_cast<std::size_t>(s.depth) + 1)
        throw std::invalid_argument("denoiser_backward: cache does not match spec depth");
    if (cache.param_fingerprint != fingerprint(params.values))
        throw std::runtime_error("denoiser_backward: stale cache (parameters changed since forward)");
    if (grad_output.channels != s.x_channels || grad_output.height != cache.height ||
        grad_output.width != cache.width)
        throw std::invalid_argument("denoiser_backward: grad_output shape mismatch");

    const double* pv = params.values.data();
    std::vector<double> grad(o.total, 0.0);
    const int H = cache.height, W = cache.width;
    const std::size_t plane = static_cast<std::size_t>(H) * W;

    // head: out[oc] = b[oc] + sum_ic w[oc][ic] * h_last[ic]
    const Image<double>& h_last = cache.h.back();
    Image<double> gh(s.width, H, W);
    for (int oc = 0; oc < s.x_channels; ++oc) {
        const double* gp = &grad_output.at(oc, 0, 0);
        double bsum = 0.0;
        for (std::size_t p = 0; p < plane; ++p) bsum += gp[p];
        grad[o.head_b + oc] += bsum;
        for (int ic = 0; ic < s.width; ++ic) {
            const double* hp = &h_last.at(ic, 0, 0);
            double* dst = &gh.at(ic, 0, 0);
            const double wv = pv[o.head_w + static_cast<std::size_t>(oc) * s.width + ic];
            double wacc = 0.0;
            for (std::size_t p = 0; p < plane; ++p) {
                wacc += gp[p] * hp[p];
                dst[p] += wv * gp[p];
            }
            grad[o.head_w + static_cast<std::size_t>(oc) * s.width + ic] += wacc;
        }
    }

    // residual blocks, reversed: h_{i+1} = h_i + conv(silu(h_i))
    Image<double> act(s.width, H, W), gs;
    for (int i = s.depth - 1; i >= 0; --i) {
        const Image<double>& h_in = cache.h[i];
        for (std::size_t p = 0; p < h_in.data.size(); ++p) act.data[p] = silu(h_in.data[p]);
        conv2d_weight_grad(act, gh, s.kernel, grad.data() + o.block_w[i], grad.data() + o.block_b[i]);
        conv2d_input_grad(gh, pv + o.block_w[i], s.width, s.kernel, gs);
        for (std::size_t p = 0; p < gh.data.size(); ++p)
            gh.data[p] += gs.data[p] * silu_grad(h_in.data[p]);
    }

    // time projection broadcast: every pixel of channel ch got proj[ch]
    for (int ch = 0; ch < s.width; ++ch) {
        const double* gp = &gh.at(ch, 0, 0);
        double gsum = 0.0;
        for (std::size_t p = 0; p < plane; ++p) gsum += gp[p];
        grad[o.time_b + ch] += gsum;
        double* wrow = grad.data() + o.time_w + static_cast<std::size_t>(ch) * s.time_embed_dim;
        for (int d = 0; d < s.time_embed_dim; ++d) wrow[d] += gsum * cache.temb[d];
    }

    conv2d_weight_grad(cache.input, gh, s.kernel, grad.data() + o.conv_in_w,
                       grad.data() + o.conv_in_b);
    return grad;
}

AdamState init_adam(std::size_t n, double lr0) {
    AdamState st;
    st.lr0 = lr0;
    st.m.assign(n, 0.0);
    st.v.assign(n, 0.0);
    return st;
}

double cosine_lr(double lr0, std::size_t k, std::size_t total) {
    if (total == 0) throw std::invalid_argument("cosine_lr: total must be positive");
    if (k > total) k = total;
    return lr0 * 0.5 * (1.0 + std::cos(kPi * static_cast<double>(k) / static_cast<double>(total)));
}

void adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grad, double lr) {
    if (params.size() != grad.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: size mismatch");
    state.step += 1;
    const double b1 = state.beta1, b2 = state.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
        double mhat = state.m[i] / c1;
        double vhat = state.v[i] / c2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

}  // namespace smdsr
