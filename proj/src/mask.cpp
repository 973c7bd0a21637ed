#include "smdsr/mask.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace smdsr {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Column ramp used by the non-rotary embedding schemes.
double scheme_column_value(SpeScheme scheme, int x, int width) {
    double u = width > 1 ? static_cast<double>(x) / (width - 1) : 0.0;
    if (scheme == SpeScheme::Cosine) return std::cos(kPi * u);
    return u;  // Linear
}
}  // namespace

LabelMap collapse_masks(int height, int width,
                        const std::vector<std::vector<std::uint8_t>>& masks,
                        OverlapPolicy policy) {
    (void)policy;  // only SmallestWins exists
    if (masks.size() >= 65536)
        throw std::invalid_argument("collapse_masks: too many masks for 16-bit labels");
    const std::size_t n = static_cast<std::size_t>(height) * width;
    for (const auto& m : masks)
        if (m.size() != n)
            throw std::invalid_argument("collapse_masks: mask size mismatch");

    std::vector<std::size_t> area(masks.size(), 0);
    for (std::size_t k = 0; k < masks.size(); ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (masks[k][i]) ++area[k];

    LabelMap out(height, width);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        int label = 0;
        for (std::size_t k = 0; k < masks.size(); ++k) {
            if (masks[k][i] && area[k] < best) {
                best = area[k];
                label = static_cast<int>(k) + 1;
            }
        }
        out.labels[i] = static_cast<std::uint16_t>(label);
    }
    return out;
}

RegionSet regions_from_label_map(const LabelMap& map, OverlapPolicy policy) {
    (void)policy;  // label maps are partitions already
    if (map.height < 1 || map.width < 1 || map.labels.size() !=
        static_cast<std::size_t>(map.height) * map.width)
        throw std::invalid_argument("regions_from_label_map: malformed label map");

    std::map<std::uint16_t, std::vector<std::int32_t>> by_label;
    for (std::size_t i = 0; i < map.labels.size(); ++i)
        by_label[map.labels[i]].push_back(static_cast<std::int32_t>(i));

    RegionSet out;
    out.height = map.height;
    out.width = map.width;
    out.regions.reserve(by_label.size());
    for (auto& [label, pixels] : by_label)
        out.regions.push_back(std::move(pixels));
    return out;
}

RopeGrid rope_grid(int height, int width, double base) {
    if (height < 2 || height % 2 != 0)
        throw std::invalid_argument("rope_grid: height must be even and >= 2");
    if (width < 1)
        throw std::invalid_argument("rope_grid: width must be >= 1");
    if (!(base > 0.0))
        throw std::invalid_argument("rope_grid: base must be positive");

    RopeGrid g;
    g.height = height;
    g.width = width;
    g.values.resize(static_cast<std::size_t>(height) * width);
    for (int i = 0; i < height / 2; ++i) {
        double theta = std::pow(base, -2.0 * i / height);
        for (int m = 0; m < width; ++m) {
            double a = m * theta;
            double c = std::cos(a), s = std::sin(a);
            g.values[static_cast<std::size_t>(2 * i) * width + m] = c - s;
            g.values[static_cast<std::size_t>(2 * i + 1) * width + m] = s + c;
        }
    }
    return g;
}

SpeScheme spe_scheme_from_string(const std::string& name) {
    if (name == "rope") return SpeScheme::Rope;
    if (name == "cosine") return SpeScheme::Cosine;
    if (name == "linear") return SpeScheme::Linear;
    throw std::invalid_argument("unknown embedding scheme: " + name);
}

std::string to_string(SpeScheme scheme) {
    switch (scheme) {
        case SpeScheme::Rope: return "rope";
        case SpeScheme::Cosine: return "cosine";
        default: return "linear";
    }
}

SpeMask encode_spe(const RegionSet& regions, const RopeGrid& grid, SpeScheme scheme) {
    if (regions.height < 1 || regions.width < 1)
        throw std::invalid_argument("encode_spe: empty region set");

    const std::size_t n = static_cast<std::size_t>(regions.height) * regions.width;
    std::vector<char> seen(n, 0);
    std::size_t covered = 0;
    for (const auto& r : regions.regions) {
        for (std::int32_t p : r) {
            if (p < 0 || static_cast<std::size_t>(p) >= n || seen[p])
                throw std::invalid_argument("encode_spe: regions are not a partition");
            seen[p] = 1;
            ++covered;
        }
    }
    if (covered != n)
        throw std::invalid_argument("encode_spe: regions do not cover the grid");

    SpeMask out(regions.height, regions.width);
    if (regions.count() <= 1) return out;  // single region carries no structure, needs no grid
    if (scheme == SpeScheme::Rope &&
        (grid.height != regions.height || grid.width != regions.width))
        throw std::invalid_argument("encode_spe: grid dimensions do not match regions");

    for (const auto& r : regions.regions) {
        double sum = 0.0;
        for (std::int32_t p : r) {
            if (scheme == SpeScheme::Rope) {
                sum += grid.values[static_cast<std::size_t>(p)];
            } else {
                int x = static_cast<int>(p) % regions.width;
                sum += scheme_column_value(scheme, x, regions.width);
            }
        }
        double mean = sum / static_cast<double>(r.size());
        for (std::int32_t p : r) out.values[static_cast<std::size_t>(p)] = mean;
    }
    return out;
}

SpeMask encode_spe(const RegionSet& regions, SpeScheme scheme, double base) {
    if (scheme == SpeScheme::Rope && regions.count() > 1)
        return encode_spe(regions, rope_grid(regions.height, regions.width, base), scheme);
    return encode_spe(regions, RopeGrid{}, scheme);
}

namespace {
void check_rect(int h, int w, const CropRect& rect, const char* what) {
    if (rect.height < 1 || rect.width < 1 || rect.y < 0 || rect.x < 0 ||
        rect.y + rect.height > h || rect.x + rect.width > w)
        throw std::invalid_argument(std::string(what) + ": rect outside grid");
}
}  // namespace

LabelMap crop(const LabelMap& map, const CropRect& rect) {
    check_rect(map.height, map.width, rect, "crop(LabelMap)");
    LabelMap out(rect.height, rect.width);
    for (int y = 0; y < rect.height; ++y)
        for (int x = 0; x < rect.width; ++x)
            out.at(y, x) = map.at(rect.y + y, rect.x + x);
    return out;
}

SpeMask crop(const SpeMask& mask, const CropRect& rect) {
    check_rect(mask.height, mask.width, rect, "crop(SpeMask)");
    SpeMask out(rect.height, rect.width);
    for (int y = 0; y < rect.height; ++y)
        for (int x = 0; x < rect.width; ++x)
            out.values[static_cast<std::size_t>(y) * rect.width + x] = mask.at(rect.y + y, rect.x + x);
    return out;
}

CroppedPair crop_pair(const Image<double>& img, const LabelMap& labels, const CropRect& rect,
                      SpeScheme scheme, double base) {
    if (img.height != labels.height || img.width != labels.width)
        throw std::invalid_argument("crop_pair: image and labels differ in size");
    CroppedPair out;
    out.image = crop(img, rect);
    out.labels = crop(labels, rect);
    out.spe = encode_spe(regions_from_label_map(out.labels), scheme, base);
    return out;
}

}  // namespace smdsr
