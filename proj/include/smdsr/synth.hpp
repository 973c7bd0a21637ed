#pragma once

#include <cstdint>

#include "smdsr/image.hpp"
#include "smdsr/mask.hpp"

namespace smdsr {

// Procedural textured scene: a Voronoi partition of the grid into `regions`
// cells, each filled with its own oriented sinusoidal grating over a flat
// base color, plus white noise, quantized to bytes. The partition doubles
// as the ground-truth region labels.
struct SceneSpec {
    int height = 64;
    int width = 64;
    int regions = 4;
    double freq_min = 0.08;   // grating frequency band, cycles per pixel
    double freq_max = 0.45;
    double amp_min = 0.15;    // grating amplitude, fraction of full scale
    double amp_max = 0.45;
    double base_min = 0.30;   // per-channel base level band
    double base_max = 0.70;
    double noise = 0.01;      // white-noise sigma, fraction of full scale
    std::uint64_t seed = 0;

    void validate() const;
};

struct Scene {
    Image<double> hr;   // byte range, integer values (as written to disk)
    Image<double> lr;   // byte range, hr dims / 4
    LabelMap labels;    // hr-sized region labels, 1-based
};

Scene gen_synthetic(const SceneSpec& spec);

}  // namespace smdsr
