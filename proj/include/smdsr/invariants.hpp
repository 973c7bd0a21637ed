#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "smdsr/diffusion.hpp"
#include "smdsr/denoiser.hpp"
#include "smdsr/mask.hpp"
#include "smdsr/schedule.hpp"

namespace smdsr {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct InvariantOptions {
    std::uint64_t seed = 0;
    bool mutation_checks = true;  // also verify that injected faults are caught
};

// Runs every module's invariant checks and returns one result per check.
// With mutation_checks on, it additionally corrupts the phi recurrence and
// injects a mask-reading sampler to prove the corresponding checks can fail.
std::vector<CheckResult> run_invariant_suite(const InvariantOptions& opts = {});

bool all_passed(const std::vector<CheckResult>& results);
void print_results(std::ostream& os, const std::vector<CheckResult>& results);

// Measurement helpers shared with the acceptance suite. Each returns the
// worst deviation found; callers compare against their own tolerance.

// max |posterior_mean_x0 - posterior_mean_eps(loss_target)| (relative) over
// random (x0, mask, eps, t >= 2) tuples.
template <typename T>
double posterior_equivalence_max_rel(const NoiseSchedule& sched, std::uint64_t seed, int tuples);

// max relative gap between t iterated zero-noise forward steps and the
// zero-noise closed form, over all t.
template <typename T>
double forward_identity_max_rel(const NoiseSchedule& sched, std::uint64_t seed);

// max |reverse_sample(oracle) - x0| with an exact-target oracle denoiser and
// zeroed sampling noise.
double oracle_sampler_max_abs(const NoiseSchedule& sched, int h, int w, std::uint64_t seed);

// max relative disagreement between backward() and central finite
// differences of the squared-error loss.
double denoiser_fd_max_rel(const DenoiserSpec& spec, std::uint64_t seed, int h, int w,
                           double step);

// max absolute disagreement between the zero-mask operations and an
// independently coded plain-DDPM reference.
double vanilla_reduction_max_dev(std::uint64_t seed);

// Rebuilds phi with a sign flip inside the recurrence (the mutation that the
// posterior-equivalence check must catch).
NoiseSchedule corrupt_phi_recurrence(NoiseSchedule sched);

// Restoration harness used by the no-mask-inference check: candidate
// restoration functions are handed a mask and must not let it influence the
// output. Returns true when the two outputs are bitwise identical.
using MaskedRestore =
    std::function<Image<double>(const Image<double>& lr, std::uint64_t seed, const SpeMask& mask)>;
bool mask_invariance(const MaskedRestore& fn, const Image<double>& lr, std::uint64_t seed,
                     const SpeMask& a, const SpeMask& b);

// --- template definitions ---

template <typename T>
double posterior_equivalence_max_rel(const NoiseSchedule& sched, std::uint64_t seed, int tuples) {
    if (sched.steps < 2)
        throw std::invalid_argument("posterior_equivalence_max_rel: needs T >= 2");
    Rng rng(seed);
    const int h = 8, w = 8, c = 3;
    double worst = 0.0;
    for (int i = 0; i < tuples; ++i) {
        // cycle t over 2..T so every step is exercised
        int t = 2 + (i % (sched.steps - 1));
        Image<T> x0 = gaussian_image<T>(c, h, w, rng);
        Image<T> eps = gaussian_image<T>(c, h, w, rng);
        Image<T> mask = gaussian_image<T>(1, h, w, rng);
        Image<T> x_t = forward_jump(x0, mask, sched, t, eps);
        Image<T> a = posterior_mean_x0(x_t, x0, mask, eps, sched, t);
        Image<T> b = posterior_mean_eps(x_t, loss_target(mask, eps, sched, t), sched, t);
        double scale = 1.0;
        for (const auto& v : b.data) scale = std::max(scale, std::abs(static_cast<double>(v)));
        double dev = max_abs_diff(a, b) / scale;
        worst = std::max(worst, dev);
    }
    return worst;
}

template <typename T>
double forward_identity_max_rel(const NoiseSchedule& sched, std::uint64_t seed) {
    Rng rng(seed);
    const int h = 8, w = 8, c = 3;
    Image<T> x0 = gaussian_image<T>(c, h, w, rng);
    Image<T> mask = gaussian_image<T>(1, h, w, rng);
    Image<T> zero(c, h, w);
    Image<T> x = x0;
    double worst = 0.0;
    for (int t = 1; t <= sched.steps; ++t) {
        x = forward_step(x, mask, sched, t, zero);
        Image<T> jump = forward_jump(x0, mask, sched, t, zero);
        double scale = 1.0;
        for (const auto& v : jump.data) scale = std::max(scale, std::abs(static_cast<double>(v)));
        worst = std::max(worst, max_abs_diff(x, jump) / scale);
    }
    return worst;
}

}  // namespace smdsr
