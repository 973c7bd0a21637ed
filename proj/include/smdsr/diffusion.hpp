#pragma once

#include <cmath>
#include <functional>

#include "smdsr/image.hpp"
#include "smdsr/rng.hpp"
#include "smdsr/schedule.hpp"

namespace smdsr {

// All diffusion arithmetic runs in double regardless of the image storage
// type; values are cast once on store. This keeps the float instantiation
// consistent with the double one to well under 1e-6 over a full chain.

namespace detail {
template <typename T>
inline double mask_at(const Image<T>& mask, const Image<T>& like, int c, std::size_t p) {
    const std::size_t plane = like.plane();
    if (mask.channels == 1) return static_cast<double>(mask.data[p]);
    return static_cast<double>(mask.data[static_cast<std::size_t>(c) * plane + p]);
}
}  // namespace detail

// One forward step: x_t = sqrt(1-beta_t) * x_{t-1} + sqrt(beta_t) * (mask + eps).
template <typename T>
Image<T> forward_step(const Image<T>& x_prev, const Image<T>& mask,
                      const NoiseSchedule& sched, int t, const Image<T>& eps) {
    sched.check_t(t);
    require_same_shape(x_prev, eps, "forward_step");
    require_mask_shape(x_prev, mask, "forward_step");
    const double sa = std::sqrt(sched.alpha[t]);
    const double sb = std::sqrt(sched.beta[t]);
    Image<T> out(x_prev.channels, x_prev.height, x_prev.width, x_prev.range);
    const std::size_t plane = x_prev.plane();
    for (int c = 0; c < x_prev.channels; ++c) {
        const std::size_t off = static_cast<std::size_t>(c) * plane;
        for (std::size_t p = 0; p < plane; ++p) {
            double e = detail::mask_at(mask, x_prev, c, p);
            double v = sa * static_cast<double>(x_prev.data[off + p])
                     + sb * (e + static_cast<double>(eps.data[off + p]));
            out.data[off + p] = static_cast<T>(v);
        }
    }
    return out;
}

// Closed-form jump to step t:
//   x_t = sqrt(alpha_bar_t) * x0 + phi_t * mask + sqrt(1 - alpha_bar_t) * eps.
template <typename T>
Image<T> forward_jump(const Image<T>& x0, const Image<T>& mask,
                      const NoiseSchedule& sched, int t, const Image<T>& eps) {
    sched.check_t(t);
    require_same_shape(x0, eps, "forward_jump");
    require_mask_shape(x0, mask, "forward_jump");
    const double sab = std::sqrt(sched.alpha_bar[t]);
    const double phi = sched.phi[t];
    const double snab = std::sqrt(1.0 - sched.alpha_bar[t]);
    Image<T> out(x0.channels, x0.height, x0.width, x0.range);
    const std::size_t plane = x0.plane();
    for (int c = 0; c < x0.channels; ++c) {
        const std::size_t off = static_cast<std::size_t>(c) * plane;
        for (std::size_t p = 0; p < plane; ++p) {
            double e = detail::mask_at(mask, x0, c, p);
            double v = sab * static_cast<double>(x0.data[off + p]) + phi * e
                     + snab * static_cast<double>(eps.data[off + p]);
            out.data[off + p] = static_cast<T>(v);
        }
    }
    return out;
}

// Regression target for the denoiser at step t:
//   target = (sqrt(1 - alpha_bar_t) / sqrt(beta_t)) * mask + eps.
// With a zero mask this is plain noise prediction.
template <typename T>
Image<T> loss_target(const Image<T>& mask, const Image<T>& eps,
                     const NoiseSchedule& sched, int t) {
    sched.check_t(t);
    require_mask_shape(eps, mask, "loss_target");
    const double coef = std::sqrt(1.0 - sched.alpha_bar[t]) / std::sqrt(sched.beta[t]);
    Image<T> out(eps.channels, eps.height, eps.width, eps.range);
    const std::size_t plane = eps.plane();
    for (int c = 0; c < eps.channels; ++c) {
        const std::size_t off = static_cast<std::size_t>(c) * plane;
        for (std::size_t p = 0; p < plane; ++p) {
            double e = detail::mask_at(mask, eps, c, p);
            out.data[off + p] = static_cast<T>(coef * e + static_cast<double>(eps.data[off + p]));
        }
    }
    return out;
}

// Posterior mean written against the denoiser estimate:
//   mu = (x_t - (beta_t / sqrt(1 - alpha_bar_t)) * estimate) / sqrt(alpha_t).
template <typename T>
Image<T> posterior_mean_eps(const Image<T>& x_t, const Image<T>& estimate,
                            const NoiseSchedule& sched, int t) {
    sched.check_t(t);
    require_same_shape(x_t, estimate, "posterior_mean_eps");
    const double inv_sa = 1.0 / std::sqrt(sched.alpha[t]);
    const double coef = sched.beta[t] / std::sqrt(1.0 - sched.alpha_bar[t]);
    Image<T> out(x_t.channels, x_t.height, x_t.width, x_t.range);
    for (std::size_t i = 0; i < x_t.data.size(); ++i) {
        double v = (static_cast<double>(x_t.data[i]) - coef * static_cast<double>(estimate.data[i])) * inv_sa;
        out.data[i] = static_cast<T>(v);
    }
    return out;
}

// Posterior mean written against ground truth (combination form, t >= 2):
//   mu = beta_tilde_t * ( sqrt(alpha_t) * (x_t - sqrt(beta_t) * mask) / beta_t
//        + (sqrt(alpha_bar_{t-1}) * x0 + phi_{t-1} * mask) / (1 - alpha_bar_{t-1}) ).
// Algebraically identical to posterior_mean_eps composed with loss_target.
template <typename T>
Image<T> posterior_mean_x0(const Image<T>& x_t, const Image<T>& x0, const Image<T>& mask,
                           const Image<T>& eps, const NoiseSchedule& sched, int t) {
    if (t < 2)
        throw std::invalid_argument("posterior_mean_x0: needs t >= 2 (use the estimate form at t = 1)");
    sched.check_t(t);
    require_same_shape(x_t, x0, "posterior_mean_x0");
    require_mask_shape(x_t, mask, "posterior_mean_x0");
    (void)eps;  // the combination form does not need the noise draw
    const double bt = sched.beta[t];
    const double sa = std::sqrt(sched.alpha[t]);
    const double sb = std::sqrt(bt);
    const double sab_prev = std::sqrt(sched.alpha_bar[t - 1]);
    const double phi_prev = sched.phi[t - 1];
    const double one_minus_ab_prev = 1.0 - sched.alpha_bar[t - 1];
    const double btilde = sched.posterior_beta_tilde[t];
    Image<T> out(x_t.channels, x_t.height, x_t.width, x_t.range);
    const std::size_t plane = x_t.plane();
    for (int c = 0; c < x_t.channels; ++c) {
        const std::size_t off = static_cast<std::size_t>(c) * plane;
        for (std::size_t p = 0; p < plane; ++p) {
            double e = detail::mask_at(mask, x_t, c, p);
            double term_t = sa * (static_cast<double>(x_t.data[off + p]) - sb * e) / bt;
            double term_0 = (sab_prev * static_cast<double>(x0.data[off + p]) + phi_prev * e)
                          / one_minus_ab_prev;
            out.data[off + p] = static_cast<T>(btilde * (term_t + term_0));
        }
    }
    return out;
}

struct SamplerOptions {
    bool clamp_x0 = false;          // clamp the implied x0 to [-1, 1] each step
    bool final_step_noise = false;  // draw z at t = 1 too (beta_tilde_1 = 0, so inert)
    std::uint64_t seed = 0;
    double noise_scale = 1.0;       // scales the posterior noise; 0 gives the mean chain
};

template <typename T>
using DenoiseFn = std::function<Image<T>(const Image<T>& x_t, int t, const Image<T>& cond)>;

// Ancestral sampler. Starts from standard Gaussian noise (the chain is
// mask-free by construction: nothing here accepts or reads a mask), walks
// t = T..1 through the estimate-form posterior, and adds sqrt(beta_tilde_t)
// noise except at the final step.
template <typename T>
Image<T> reverse_sample(const DenoiseFn<T>& denoise, const Image<T>& condition,
                        const NoiseSchedule& sched, const SamplerOptions& opts,
                        const Image<T>* initial_state = nullptr) {
    if (sched.steps < 1) throw std::invalid_argument("reverse_sample: empty schedule");
    Rng rng(opts.seed);
    Image<T> x;
    if (initial_state != nullptr) {
        require_same_shape(*initial_state, condition, "reverse_sample");
        x = *initial_state;
    } else {
        x = gaussian_image<T>(condition.channels, condition.height, condition.width, rng);
    }
    for (int t = sched.steps; t >= 1; --t) {
        Image<T> est = denoise(x, t, condition);
        require_same_shape(est, x, "reverse_sample: denoiser output");
        if (opts.clamp_x0) {
            const double sab = std::sqrt(sched.alpha_bar[t]);
            const double snab = std::sqrt(1.0 - sched.alpha_bar[t]);
            if (snab > 0.0) {
                for (std::size_t i = 0; i < x.data.size(); ++i) {
                    double x0 = (static_cast<double>(x.data[i]) - snab * static_cast<double>(est.data[i])) / sab;
                    x0 = std::clamp(x0, -1.0, 1.0);
                    est.data[i] = static_cast<T>((static_cast<double>(x.data[i]) - sab * x0) / snab);
                }
            }
        }
        Image<T> mu = posterior_mean_eps(x, est, sched, t);
        if (t > 1 || opts.final_step_noise) {
            const double sigma = std::sqrt(sched.posterior_beta_tilde[t]) * opts.noise_scale;
            for (std::size_t i = 0; i < mu.data.size(); ++i)
                mu.data[i] = static_cast<T>(static_cast<double>(mu.data[i]) + sigma * rng.gaussian());
        }
        x = std::move(mu);
    }
    return x;
}

}  // namespace smdsr
