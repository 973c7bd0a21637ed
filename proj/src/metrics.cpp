#include "smdsr/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace smdsr {

namespace {

void check_pair(const Image<double>& a, const Image<double>& b, const char* what) {
    require_same_shape(a, b, what);
    if (a.range != ValueRange::Byte || b.range != ValueRange::Byte)
        throw std::invalid_argument(std::string(what) + ": metrics want byte-range images");
    if (a.channels != 1 && a.channels != 3)
        throw std::invalid_argument(std::string(what) + ": images must have 1 or 3 channels");
}

}  // namespace

Image<double> luma_y(const Image<double>& byte_img) {
    if (byte_img.channels == 1) return byte_img;
    if (byte_img.channels != 3)
        throw std::invalid_argument("luma_y: needs 1 or 3 channels");
    Image<double> y(1, byte_img.height, byte_img.width, ValueRange::Byte);
    const std::size_t plane = byte_img.plane();
    for (std::size_t p = 0; p < plane; ++p) {
        y.data[p] = 0.299 * byte_img.data[p]
                  + 0.587 * byte_img.data[plane + p]
                  + 0.114 * byte_img.data[2 * plane + p];
    }
    return y;
}

double psnr_y(const Image<double>& a, const Image<double>& b) {
    check_pair(a, b, "psnr_y");
    Image<double> ya = luma_y(a), yb = luma_y(b);
    double se = 0.0;
    for (std::size_t i = 0; i < ya.data.size(); ++i) {
        double d = ya.data[i] - yb.data[i];
        se += d * d;
    }
    double mse = se / static_cast<double>(ya.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim_y(const Image<double>& a, const Image<double>& b) {
    check_pair(a, b, "ssim_y");
    constexpr int kWin = 11;
    constexpr double kSigma = 1.5;
    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    if (a.height < kWin || a.width < kWin)
        throw std::invalid_argument("ssim_y: image smaller than the 11x11 window");

    Image<double> ya = luma_y(a), yb = luma_y(b);

    double w[kWin][kWin];
    double wsum = 0.0;
    for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
            double dy = i - kWin / 2, dx = j - kWin / 2;
            w[i][j] = std::exp(-(dy * dy + dx * dx) / (2.0 * kSigma * kSigma));
            wsum += w[i][j];
        }
    for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) w[i][j] /= wsum;

    const int oh = a.height - kWin + 1, ow = a.width - kWin + 1;
    double total = 0.0;
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double mu_a = 0.0, mu_b = 0.0;
            for (int i = 0; i < kWin; ++i)
                for (int j = 0; j < kWin; ++j) {
                    mu_a += w[i][j] * ya.at(0, y + i, x + j);
                    mu_b += w[i][j] * yb.at(0, y + i, x + j);
                }
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int i = 0; i < kWin; ++i)
                for (int j = 0; j < kWin; ++j) {
                    double da = ya.at(0, y + i, x + j) - mu_a;
                    double db = yb.at(0, y + i, x + j) - mu_b;
                    va += w[i][j] * da * da;
                    vb += w[i][j] * db * db;
                    cov += w[i][j] * da * db;
                }
            double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            double den = (mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2);
            total += num / den;
        }
    }
    return total / (static_cast<double>(oh) * ow);
}

}  // namespace smdsr
