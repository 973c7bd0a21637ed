#pragma once

#include <cstdint>
#include <vector>

#include "smdsr/image.hpp"

namespace smdsr {

// Integer region labels, one per pixel. Region masks are stored collapsed
// into a single label map; equal labels mean same region.
struct LabelMap {
    int height = 0;
    int width = 0;
    std::vector<std::uint16_t> labels;

    LabelMap() = default;
    LabelMap(int h, int w)
        : height(h), width(w), labels(static_cast<std::size_t>(h) * w, 0) {
        if (h < 1 || w < 1) throw std::invalid_argument("LabelMap: non-positive dimension");
    }

    std::uint16_t& at(int y, int x) { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::uint16_t at(int y, int x) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

// Pixel-index partition of an image grid. regions[k] holds flat indices
// (y * width + x) in ascending order; every pixel appears exactly once.
struct RegionSet {
    int height = 0;
    int width = 0;
    std::vector<std::vector<std::int32_t>> regions;

    int count() const { return static_cast<int>(regions.size()); }
};

// How overlapping binary masks are resolved when collapsed to labels.
enum class OverlapPolicy { SmallestWins };

// Collapses a stack of binary masks into a label map: pixels covered by
// several masks go to the smallest covering mask (1-based label), pixels
// covered by none get label 0.
LabelMap collapse_masks(int height, int width,
                        const std::vector<std::vector<std::uint8_t>>& masks,
                        OverlapPolicy policy = OverlapPolicy::SmallestWins);

// Groups pixels by label value (labels sorted ascending). Label maps are
// already partitions, so the policy only matters for mask-stack ingest.
RegionSet regions_from_label_map(const LabelMap& map,
                                 OverlapPolicy policy = OverlapPolicy::SmallestWins);

// Rotary positional field evaluated on an all-ones input: the grid's height
// is the embedding dimension (must be even), the width is the sequence of
// positions. For position m and dimension pair (2i, 2i+1):
//   value(2i,   m) = cos(m * theta_i) - sin(m * theta_i)
//   value(2i+1, m) = sin(m * theta_i) + cos(m * theta_i)
// with theta_i = base^(-2i / height).
struct RopeGrid {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

RopeGrid rope_grid(int height, int width, double base = 10000.0);

enum class SpeScheme { Rope, Cosine, Linear };

SpeScheme spe_scheme_from_string(const std::string& name);
std::string to_string(SpeScheme scheme);

// Structural position embedding: piecewise-constant field holding, for each
// region, the mean of the embedding grid over that region's pixels.
struct SpeMask {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    SpeMask() = default;
    SpeMask(int h, int w)
        : height(h), width(w), values(static_cast<std::size_t>(h) * w, 0.0) {
        if (h < 1 || w < 1) throw std::invalid_argument("SpeMask: non-positive dimension");
    }

    double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Region means of the given grid. A single all-covering region reduces to
// the all-zero mask (no structure to encode). Cosine/Linear schemes ignore
// the grid values and use simple column ramps instead (ablation variants).
SpeMask encode_spe(const RegionSet& regions, const RopeGrid& grid,
                   SpeScheme scheme = SpeScheme::Rope);

// Same, building the embedding field internally (RoPE grid only when the
// scheme needs one).
SpeMask encode_spe(const RegionSet& regions, SpeScheme scheme, double base = 10000.0);

struct CropRect {
    int y = 0;
    int x = 0;
    int height = 0;
    int width = 0;
};

LabelMap crop(const LabelMap& map, const CropRect& rect);
SpeMask crop(const SpeMask& mask, const CropRect& rect);

template <typename T>
Image<T> crop(const Image<T>& img, const CropRect& rect) {
    if (rect.height < 1 || rect.width < 1 || rect.y < 0 || rect.x < 0 ||
        rect.y + rect.height > img.height || rect.x + rect.width > img.width)
        throw std::invalid_argument("crop: rect outside image");
    Image<T> out(img.channels, rect.height, rect.width, img.range);
    for (int c = 0; c < img.channels; ++c)
        for (int y = 0; y < rect.height; ++y)
            for (int x = 0; x < rect.width; ++x)
                out.at(c, y, x) = img.at(c, rect.y + y, rect.x + x);
    return out;
}

// Crops image and labels together and re-encodes the embedding on the
// cropped grid, so single-region crops collapse back to zero.
struct CroppedPair {
    Image<double> image;
    LabelMap labels;
    SpeMask spe;
};

CroppedPair crop_pair(const Image<double>& img, const LabelMap& labels, const CropRect& rect,
                      SpeScheme scheme = SpeScheme::Rope, double base = 10000.0);

// Mask as a broadcastable single-plane image for the diffusion operations.
template <typename T>
Image<T> spe_to_image(const SpeMask& mask) {
    Image<T> out(1, mask.height, mask.width, ValueRange::UnitSigned);
    for (std::size_t i = 0; i < mask.values.size(); ++i)
        out.data[i] = static_cast<T>(mask.values[i]);
    return out;
}

}  // namespace smdsr
