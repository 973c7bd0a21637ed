#pragma once

#include <string>

#include "smdsr/denoiser.hpp"
#include "smdsr/image.hpp"
#include "smdsr/mask.hpp"
#include "smdsr/schedule.hpp"

namespace smdsr {

// Binary PNM. Color images are PPM (P6), single-channel PGM (P5), both
// maxval 255; label maps are PGM with maxval 65535 (16-bit big-endian
// samples, per the PNM convention). Values load as doubles in byte range.
Image<double> read_image(const std::string& path);
void write_image(const std::string& path, const Image<double>& img);

LabelMap read_label_map(const std::string& path);
void write_label_map(const std::string& path, const LabelMap& map);

// SPE mask container: "SPE1" magic, then height, width, reserved as
// little-endian uint32, then height*width float32 values (little-endian,
// row-major).
SpeMask read_spe(const std::string& path);
void write_spe(const std::string& path, const SpeMask& mask);

// Trained model container: "SDNC" magic + format version, the network
// shape, the noise-schedule settings it was trained under, the flat
// float64 parameter vector, and the full Adam state so training can
// resume bit-exactly.
struct Checkpoint {
    DenoiserParams params;
    AdamState adam;
    ScheduleKind schedule_kind = ScheduleKind::Cosine;
    int steps = 100;
    double cosine_s = 0.008;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace smdsr
