#include "smdsr/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace smdsr {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kLinearBetaStart = 1e-4;
constexpr double kLinearBetaEnd = 0.02;
constexpr double kMaxBeta = 0.999;
}  // namespace

ScheduleKind schedule_kind_from_string(const std::string& name) {
    if (name == "cosine") return ScheduleKind::Cosine;
    if (name == "linear") return ScheduleKind::Linear;
    throw std::invalid_argument("unknown schedule kind: " + name);
}

std::string to_string(ScheduleKind kind) {
    return kind == ScheduleKind::Cosine ? "cosine" : "linear";
}

void NoiseSchedule::check_t(int t) const {
    if (t < 1 || t > steps)
        throw std::invalid_argument("timestep out of range: t=" + std::to_string(t)
                                    + ", steps=" + std::to_string(steps));
}

NoiseSchedule schedule_from_betas(const std::vector<double>& betas, ScheduleKind kind) {
    if (betas.empty())
        throw std::invalid_argument("schedule_from_betas: empty beta sequence");
    const int T = static_cast<int>(betas.size());
    NoiseSchedule s;
    s.steps = T;
    s.kind = kind;
    s.beta.assign(T + 1, 0.0);
    s.alpha.assign(T + 1, 0.0);
    s.alpha_bar.assign(T + 1, 0.0);
    s.phi.assign(T + 1, 0.0);
    s.posterior_beta_tilde.assign(T + 1, 0.0);
    s.alpha_bar[0] = 1.0;
    s.phi[0] = 0.0;
    for (int t = 1; t <= T; ++t) {
        double b = betas[t - 1];
        if (!(b > 0.0 && b < 1.0))
            throw std::invalid_argument("schedule_from_betas: beta out of (0,1) at t="
                                        + std::to_string(t));
        s.beta[t] = b;
        s.alpha[t] = 1.0 - b;
        s.alpha_bar[t] = s.alpha_bar[t - 1] * s.alpha[t];
        s.phi[t] = std::sqrt(s.alpha[t]) * s.phi[t - 1] + std::sqrt(b);
        s.posterior_beta_tilde[t] = (1.0 - s.alpha_bar[t - 1]) * b / (1.0 - s.alpha_bar[t]);
    }
    return s;
}

NoiseSchedule build_schedule(int steps, ScheduleKind kind, double cosine_s) {
    if (steps < 1)
        throw std::invalid_argument("build_schedule: steps must be >= 1");
    std::vector<double> betas(steps);
    if (kind == ScheduleKind::Linear) {
        if (steps == 1) {
            betas[0] = kLinearBetaStart;
        } else {
            double step = (kLinearBetaEnd - kLinearBetaStart) / (steps - 1);
            for (int i = 0; i < steps; ++i) betas[i] = kLinearBetaStart + step * i;
        }
    } else {
        if (cosine_s < 0.0)
            throw std::invalid_argument("build_schedule: cosine offset must be >= 0");
        auto f = [&](double u) {
            double c = std::cos((u + cosine_s) / (1.0 + cosine_s) * kPi / 2.0);
            return c * c;
        };
        const double f0 = f(0.0);
        double prev = 1.0;
        for (int t = 1; t <= steps; ++t) {
            double cur = f(static_cast<double>(t) / steps) / f0;
            double b = 1.0 - cur / prev;
            if (b > kMaxBeta) b = kMaxBeta;
            betas[t - 1] = b;
            prev *= 1.0 - b;  // alpha_bar is rebuilt from the clipped betas
        }
    }
    return schedule_from_betas(betas, kind);
}

double phi_direct(const NoiseSchedule& sched, int t) {
    sched.check_t(t);
    double sum = 0.0;
    for (int i = 1; i <= t; ++i)
        sum += std::sqrt(sched.alpha_bar[t] * sched.beta[i] / sched.alpha_bar[i]);
    return sum;
}

}  // namespace smdsr
