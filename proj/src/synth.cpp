#include "smdsr/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "smdsr/resample.hpp"
#include "smdsr/rng.hpp"

namespace smdsr {

namespace {
constexpr double kPi = 3.14159265358979323846;

double quantize_byte(double v01) {
    long q = std::lround(v01 * 255.0);
    if (q < 0) q = 0;
    if (q > 255) q = 255;
    return static_cast<double>(q);
}
}  // namespace

void SceneSpec::validate() const {
    if (height < 8 || width < 8 || height % 4 != 0 || width % 4 != 0)
        throw std::invalid_argument("SceneSpec: dims must be >= 8 and divisible by 4");
    if (regions < 1 || static_cast<long long>(regions) > static_cast<long long>(height) * width)
        throw std::invalid_argument("SceneSpec: region count out of range");
    if (!(freq_min > 0.0) || freq_max < freq_min)
        throw std::invalid_argument("SceneSpec: bad frequency band");
    if (amp_min < 0.0 || amp_max < amp_min)
        throw std::invalid_argument("SceneSpec: bad amplitude band");
    if (base_min < 0.0 || base_max < base_min || base_max > 1.0)
        throw std::invalid_argument("SceneSpec: bad base band");
    if (noise < 0.0)
        throw std::invalid_argument("SceneSpec: negative noise");
}

Scene gen_synthetic(const SceneSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const int H = spec.height, W = spec.width, K = spec.regions;

    // Voronoi sites, distinct pixels.
    std::vector<int> sy(K), sx(K);
    for (int k = 0; k < K; ++k) {
        for (;;) {
            int y = rng.uniform_int(0, H - 1);
            int x = rng.uniform_int(0, W - 1);
            bool dup = false;
            for (int j = 0; j < k; ++j)
                if (sy[j] == y && sx[j] == x) { dup = true; break; }
            if (!dup) { sy[k] = y; sx[k] = x; break; }
        }
    }

    Scene scene;
    scene.labels = LabelMap(H, W);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            long long best = -1;
            int who = 0;
            for (int k = 0; k < K; ++k) {
                long long dy = y - sy[k], dx = x - sx[k];
                long long d = dy * dy + dx * dx;
                if (best < 0 || d < best) { best = d; who = k; }
            }
            scene.labels.at(y, x) = static_cast<std::uint16_t>(who + 1);
        }
    }

    struct Grating { double cx, cy, phase, amp, base[3]; };
    std::vector<Grating> g(K);
    for (int k = 0; k < K; ++k) {
        double theta = rng.uniform(0.0, kPi);
        double freq = rng.uniform(spec.freq_min, spec.freq_max);
        double omega = 2.0 * kPi * freq;
        g[k].cx = omega * std::cos(theta);
        g[k].cy = omega * std::sin(theta);
        g[k].phase = rng.uniform(0.0, 2.0 * kPi);
        g[k].amp = rng.uniform(spec.amp_min, spec.amp_max);
        for (int c = 0; c < 3; ++c) g[k].base[c] = rng.uniform(spec.base_min, spec.base_max);
    }

    scene.hr = Image<double>(3, H, W, ValueRange::Byte);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const Grating& gr = g[scene.labels.at(y, x) - 1];
                double v = gr.base[c] + gr.amp * std::sin(gr.cx * x + gr.cy * y + gr.phase);
                v += spec.noise * rng.gaussian();
                scene.hr.at(c, y, x) = quantize_byte(v);
            }
        }
    }

    scene.lr = box_downsample4(scene.hr);
    for (auto& v : scene.lr.data) v = std::round(v);
    return scene;
}

}  // namespace smdsr
