#pragma once

#include <string>
#include <vector>

namespace smdsr {

enum class ScheduleKind { Cosine, Linear };

ScheduleKind schedule_kind_from_string(const std::string& name);
std::string to_string(ScheduleKind kind);

// Noise schedule tables for a T-step chain, indexed 1..T (index 0 is the
// t=0 boundary: alpha_bar[0] = 1, phi[0] = 0).
//
//   beta[t]                  per-step noise variance, in (0, 1)
//   alpha[t]                 1 - beta[t]
//   alpha_bar[t]             prod_{i<=t} alpha[i], strictly decreasing
//   phi[t]                   structure-drift coefficient,
//                            phi[t] = sqrt(alpha[t]) * phi[t-1] + sqrt(beta[t])
//   posterior_beta_tilde[t]  (1 - alpha_bar[t-1]) * beta[t] / (1 - alpha_bar[t]),
//                            exactly 0 at t = 1
struct NoiseSchedule {
    int steps = 0;
    ScheduleKind kind = ScheduleKind::Cosine;
    std::vector<double> beta;
    std::vector<double> alpha;
    std::vector<double> alpha_bar;
    std::vector<double> phi;
    std::vector<double> posterior_beta_tilde;

    void check_t(int t) const;

    double beta_at(int t) const { check_t(t); return beta[t]; }
    double alpha_at(int t) const { check_t(t); return alpha[t]; }
    double alpha_bar_at(int t) const { check_t(t); return alpha_bar[t]; }
    // alpha_bar extended to the t=0 boundary (== 1).
    double alpha_bar_before(int t) const { check_t(t); return alpha_bar[t - 1]; }
    double phi_at(int t) const { check_t(t); return phi[t]; }
    double phi_before(int t) const { check_t(t); return phi[t - 1]; }
    double beta_tilde_at(int t) const { check_t(t); return posterior_beta_tilde[t]; }
};

// Builds the derived tables from a raw beta sequence (index 0 = t=1 here;
// the result is re-indexed 1..T).
NoiseSchedule schedule_from_betas(const std::vector<double>& betas, ScheduleKind kind);

// kind == Cosine: squared-cosine alpha_bar profile with offset s, betas
// clipped at 0.999 and alpha_bar rebuilt from the clipped betas.
// kind == Linear: betas evenly spaced over 1e-4 .. 0.02.
NoiseSchedule build_schedule(int steps, ScheduleKind kind, double cosine_s = 0.008);

// Direct summation form of the drift coefficient:
//   phi_direct(t) = sum_{i=1..t} sqrt(alpha_bar[t] * beta[i] / alpha_bar[i])
// Used as an independent check of the recurrence-built phi table.
double phi_direct(const NoiseSchedule& sched, int t);

}  // namespace smdsr
