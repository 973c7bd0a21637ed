#include "smdsr/resample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smdsr {

Image<double> to_unit_signed(const Image<double>& byte_img) {
    if (byte_img.range != ValueRange::Byte)
        throw std::invalid_argument("to_unit_signed: input is not byte range");
    Image<double> out(byte_img.channels, byte_img.height, byte_img.width, ValueRange::UnitSigned);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = byte_img.data[i] / 127.5 - 1.0;
    return out;
}

Image<double> to_byte(const Image<double>& unit_img) {
    if (unit_img.range != ValueRange::UnitSigned)
        throw std::invalid_argument("to_byte: input is not unit range");
    Image<double> out(unit_img.channels, unit_img.height, unit_img.width, ValueRange::Byte);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = (std::clamp(unit_img.data[i], -1.0, 1.0) + 1.0) * 127.5;
    return out;
}

Image<double> box_downsample4(const Image<double>& img) {
    if (img.height % 4 != 0 || img.width % 4 != 0)
        throw std::invalid_argument("box_downsample4: dimensions must be divisible by 4");
    Image<double> out(img.channels, img.height / 4, img.width / 4, img.range);
    for (int c = 0; c < img.channels; ++c) {
        for (int y = 0; y < out.height; ++y) {
            for (int x = 0; x < out.width; ++x) {
                double sum = 0.0;
                for (int dy = 0; dy < 4; ++dy)
                    for (int dx = 0; dx < 4; ++dx)
                        sum += img.at(c, 4 * y + dy, 4 * x + dx);
                out.at(c, y, x) = sum / 16.0;
            }
        }
    }
    return out;
}

Image<double> upsample_bilinear4(const Image<double>& img) {
    Image<double> out(img.channels, img.height * 4, img.width * 4, img.range);
    for (int c = 0; c < img.channels; ++c) {
        for (int y = 0; y < out.height; ++y) {
            double sy = (y + 0.5) / 4.0 - 0.5;
            int y0 = static_cast<int>(std::floor(sy));
            double fy = sy - y0;
            int ya = std::clamp(y0, 0, img.height - 1);
            int yb = std::clamp(y0 + 1, 0, img.height - 1);
            for (int x = 0; x < out.width; ++x) {
                double sx = (x + 0.5) / 4.0 - 0.5;
                int x0 = static_cast<int>(std::floor(sx));
                double fx = sx - x0;
                int xa = std::clamp(x0, 0, img.width - 1);
                int xb = std::clamp(x0 + 1, 0, img.width - 1);
                double top = img.at(c, ya, xa) * (1.0 - fx) + img.at(c, ya, xb) * fx;
                double bot = img.at(c, yb, xa) * (1.0 - fx) + img.at(c, yb, xb) * fx;
                out.at(c, y, x) = top * (1.0 - fy) + bot * fy;
            }
        }
    }
    return out;
}

Image<double> make_residual(const Image<double>& hr_byte, const Image<double>& lr_byte) {
    if (hr_byte.channels != lr_byte.channels || hr_byte.height != lr_byte.height * 4 ||
        hr_byte.width != lr_byte.width * 4)
        throw std::invalid_argument("make_residual: hr dims must be 4x lr dims");
    Image<double> hr = to_unit_signed(hr_byte);
    Image<double> up = to_unit_signed(upsample_bilinear4(lr_byte));
    Image<double> out(hr.channels, hr.height, hr.width, ValueRange::UnitSigned);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = (hr.data[i] - up.data[i]) / 2.0;
    return out;
}

Image<double> combine_residual(const Image<double>& lr_byte, const Image<double>& x0) {
    if (x0.channels != lr_byte.channels || x0.height != lr_byte.height * 4 ||
        x0.width != lr_byte.width * 4)
        throw std::invalid_argument("combine_residual: residual dims must be 4x lr dims");
    Image<double> up = to_unit_signed(upsample_bilinear4(lr_byte));
    Image<double> sr(x0.channels, x0.height, x0.width, ValueRange::UnitSigned);
    for (std::size_t i = 0; i < sr.data.size(); ++i)
        sr.data[i] = up.data[i] + 2.0 * x0.data[i];
    Image<double> out = to_byte(sr);
    for (auto& v : out.data) v = std::round(v);  // quantize like the on-disk format
    return out;
}

}  // namespace smdsr
