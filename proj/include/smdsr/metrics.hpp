#pragma once

#include "smdsr/image.hpp"

namespace smdsr {

// BT.601 luma from a byte-range image (single-channel images pass through).
Image<double> luma_y(const Image<double>& byte_img);

// PSNR over the luma plane, in dB against peak 255. Identical images give
// +infinity.
double psnr_y(const Image<double>& a, const Image<double>& b);

// Mean SSIM over the luma plane: 11x11 Gaussian window (sigma 1.5),
// C1 = (0.01*255)^2, C2 = (0.03*255)^2, valid windows only (no padding).
// Needs both dimensions >= 11.
double ssim_y(const Image<double>& a, const Image<double>& b);

}  // namespace smdsr
