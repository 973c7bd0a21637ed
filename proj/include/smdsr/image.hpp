#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace smdsr {

// Value convention carried by an image. UnitSigned is the working range
// [-1, 1] used by the diffusion math; Byte is display range [0, 255].
enum class ValueRange { UnitSigned, Byte };

// Dense CHW image. T is the storage type; all arithmetic on images is done
// in double by the operations that consume them.
template <typename T>
struct Image {
    int channels = 0;
    int height = 0;
    int width = 0;
    ValueRange range = ValueRange::UnitSigned;
    std::vector<T> data;

    Image() = default;
    Image(int c, int h, int w, ValueRange r = ValueRange::UnitSigned)
        : channels(c), height(h), width(w), range(r),
          data(static_cast<std::size_t>(c) * h * w, T(0)) {
        if (c < 1 || h < 1 || w < 1)
            throw std::invalid_argument("Image: non-positive dimension");
    }

    std::size_t size() const { return data.size(); }
    std::size_t plane() const { return static_cast<std::size_t>(height) * width; }

    T& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    const T& at(int c, int y, int x) const { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }

    bool same_shape(const Image& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

using ImageF = Image<float>;
using ImageD = Image<double>;

template <typename T>
inline void require_same_shape(const Image<T>& a, const Image<T>& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": shape mismatch ("
            + std::to_string(a.channels) + "x" + std::to_string(a.height) + "x" + std::to_string(a.width)
            + " vs " + std::to_string(b.channels) + "x" + std::to_string(b.height) + "x" + std::to_string(b.width) + ")");
}

// A modulation mask must either match the image shape or be a single plane
// that broadcasts across channels.
template <typename T>
inline void require_mask_shape(const Image<T>& x, const Image<T>& mask, const char* what) {
    if (mask.height != x.height || mask.width != x.width ||
        (mask.channels != 1 && mask.channels != x.channels))
        throw std::invalid_argument(std::string(what) + ": mask shape incompatible");
}

template <typename T>
inline double max_abs_diff(const Image<T>& a, const Image<T>& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(static_cast<double>(a.data[i]) - static_cast<double>(b.data[i])));
    return m;
}

template <typename T>
inline Image<T> clamp_unit(Image<T> img) {
    for (auto& v : img.data) v = std::clamp(v, T(-1), T(1));
    img.range = ValueRange::UnitSigned;
    return img;
}

template <typename Dst, typename Src>
inline Image<Dst> convert_image(const Image<Src>& src) {
    Image<Dst> out(src.channels, src.height, src.width, src.range);
    for (std::size_t i = 0; i < src.data.size(); ++i)
        out.data[i] = static_cast<Dst>(src.data[i]);
    return out;
}

}  // namespace smdsr
