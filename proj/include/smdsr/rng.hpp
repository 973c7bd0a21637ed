#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "smdsr/image.hpp"

namespace smdsr {

// Deterministic random source. Gaussians come from an explicit Box-Muller
// transform so streams are reproducible bit for bit across standard
// libraries (std::normal_distribution's algorithm is unspecified).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
        std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

template <typename T>
inline void fill_gaussian(Image<T>& img, Rng& rng) {
    for (auto& v : img.data) v = static_cast<T>(rng.gaussian());
}

template <typename T>
inline Image<T> gaussian_image(int c, int h, int w, Rng& rng) {
    Image<T> img(c, h, w, ValueRange::UnitSigned);
    fill_gaussian(img, rng);
    return img;
}

}  // namespace smdsr
