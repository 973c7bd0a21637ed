#pragma once

#include "smdsr/image.hpp"

namespace smdsr {

// Byte range [0, 255] <-> working range [-1, 1] via v / 127.5 - 1.
Image<double> to_unit_signed(const Image<double>& byte_img);
Image<double> to_byte(const Image<double>& unit_img);  // clamps to [-1, 1] first

// 4x box-filter downsample (dims must be divisible by 4).
Image<double> box_downsample4(const Image<double>& img);

// 4x bilinear upsample with half-pixel-aligned sample centers and edge
// clamping.
Image<double> upsample_bilinear4(const Image<double>& img);

// Residual the model learns: x0 = (hr - upsample(lr)) / 2 in unit range, so
// x0 stays inside [-1, 1]. Inputs are byte-range images, hr dims = 4 * lr
// dims.
Image<double> make_residual(const Image<double>& hr_byte, const Image<double>& lr_byte);

// Inverse: sr = upsample(lr) + 2 * x0, returned in byte range, clamped and
// rounded to integer values like the on-disk format.
Image<double> combine_residual(const Image<double>& lr_byte, const Image<double>& x0);

}  // namespace smdsr
