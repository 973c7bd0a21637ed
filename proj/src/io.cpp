#include "smdsr/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace smdsr {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw std::runtime_error(path + ": " + why);
}

// Reads one PNM header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

long pnm_int(std::istream& in, const std::string& path) {
    std::string tok = pnm_token(in);
    if (tok.empty()) fail(path, "truncated header");
    try {
        return std::stol(tok);
    } catch (const std::exception&) {
        fail(path, "bad header field '" + tok + "'");
    }
}

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) fail(path, "truncated file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
    std::uint64_t lo = get_u32(in, path);
    std::uint64_t hi = get_u32(in, path);
    return lo | (hi << 32);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

double get_f64(std::istream& in, const std::string& path) {
    std::uint64_t bits = get_u64(in, path);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void put_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

float get_f32(std::istream& in, const std::string& path) {
    std::uint32_t bits = get_u32(in, path);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    return out;
}

}  // namespace

Image<double> read_image(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string magic = pnm_token(in);
    int channels;
    if (magic == "P6") channels = 3;
    else if (magic == "P5") channels = 1;
    else fail(path, "not a binary PPM/PGM file (magic '" + magic + "')");
    long w = pnm_int(in, path), h = pnm_int(in, path), maxval = pnm_int(in, path);
    if (w < 1 || h < 1) fail(path, "bad dimensions");
    if (maxval != 255) fail(path, "unsupported maxval " + std::to_string(maxval));

    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * channels);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        fail(path, "truncated pixel data");

    Image<double> img(channels, static_cast<int>(h), static_cast<int>(w), ValueRange::Byte);
    const std::size_t plane = img.plane();
    for (std::size_t p = 0; p < plane; ++p)
        for (int c = 0; c < channels; ++c)
            img.data[static_cast<std::size_t>(c) * plane + p] = raw[p * channels + c];
    return img;
}

void write_image(const std::string& path, const Image<double>& img) {
    if (img.range != ValueRange::Byte)
        throw std::invalid_argument(path + ": write_image wants byte-range values");
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument(path + ": only 1- or 3-channel images are supported");
    std::ofstream out = open_out(path);
    out << (img.channels == 3 ? "P6" : "P5") << "\n" << img.width << " " << img.height << "\n255\n";
    const std::size_t plane = img.plane();
    std::vector<unsigned char> raw(plane * img.channels);
    for (std::size_t p = 0; p < plane; ++p) {
        for (int c = 0; c < img.channels; ++c) {
            double v = img.data[static_cast<std::size_t>(c) * plane + p];
            long q = std::lround(v);
            if (q < 0) q = 0;
            if (q > 255) q = 255;
            raw[p * img.channels + c] = static_cast<unsigned char>(q);
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) fail(path, "write failed");
}

LabelMap read_label_map(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string magic = pnm_token(in);
    if (magic != "P5") fail(path, "label maps are P5 PGM (magic '" + magic + "')");
    long w = pnm_int(in, path), h = pnm_int(in, path), maxval = pnm_int(in, path);
    if (w < 1 || h < 1) fail(path, "bad dimensions");
    if (maxval != 65535) fail(path, "label maps use maxval 65535");

    LabelMap map(static_cast<int>(h), static_cast<int>(w));
    std::vector<unsigned char> raw(map.labels.size() * 2);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        fail(path, "truncated label data");
    for (std::size_t i = 0; i < map.labels.size(); ++i)
        map.labels[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    return map;
}

void write_label_map(const std::string& path, const LabelMap& map) {
    std::ofstream out = open_out(path);
    out << "P5\n" << map.width << " " << map.height << "\n65535\n";
    std::vector<unsigned char> raw(map.labels.size() * 2);
    for (std::size_t i = 0; i < map.labels.size(); ++i) {
        raw[2 * i] = static_cast<unsigned char>(map.labels[i] >> 8);
        raw[2 * i + 1] = static_cast<unsigned char>(map.labels[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) fail(path, "write failed");
}

SpeMask read_spe(const std::string& path) {
    std::ifstream in = open_in(path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "SPE1", 4) != 0)
        fail(path, "not an SPE mask file");
    std::uint32_t h = get_u32(in, path);
    std::uint32_t w = get_u32(in, path);
    get_u32(in, path);  // reserved
    if (h < 1 || w < 1 || h > 1u << 20 || w > 1u << 20) fail(path, "bad dimensions");
    SpeMask mask(static_cast<int>(h), static_cast<int>(w));
    for (auto& v : mask.values) v = get_f32(in, path);
    return mask;
}

void write_spe(const std::string& path, const SpeMask& mask) {
    std::ofstream out = open_out(path);
    out.write("SPE1", 4);
    put_u32(out, static_cast<std::uint32_t>(mask.height));
    put_u32(out, static_cast<std::uint32_t>(mask.width));
    put_u32(out, 0);
    for (double v : mask.values) put_f32(out, static_cast<float>(v));
    if (!out) fail(path, "write failed");
}

namespace {
constexpr std::uint32_t kCheckpointVersion = 1;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    const DenoiserSpec& s = ckpt.params.spec;
    if (ckpt.params.values.size() != param_count(s))
        throw std::invalid_argument(path + ": parameter vector does not match spec");
    if (ckpt.adam.m.size() != ckpt.params.values.size() ||
        ckpt.adam.v.size() != ckpt.params.values.size())
        throw std::invalid_argument(path + ": Adam state does not match parameters");

    std::ofstream out = open_out(path);
    out.write("SDNC", 4);
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(s.x_channels));
    put_u32(out, static_cast<std::uint32_t>(s.cond_channels));
    put_u32(out, static_cast<std::uint32_t>(s.width));
    put_u32(out, static_cast<std::uint32_t>(s.depth));
    put_u32(out, static_cast<std::uint32_t>(s.kernel));
    put_u32(out, static_cast<std::uint32_t>(s.time_embed_dim));
    put_u32(out, ckpt.schedule_kind == ScheduleKind::Cosine ? 0u : 1u);
    put_u32(out, static_cast<std::uint32_t>(ckpt.steps));
    put_f64(out, ckpt.cosine_s);
    put_u64(out, ckpt.params.values.size());
    for (double v : ckpt.params.values) put_f64(out, v);
    put_u64(out, ckpt.adam.step);
    put_f64(out, ckpt.adam.lr0);
    put_f64(out, ckpt.adam.beta1);
    put_f64(out, ckpt.adam.beta2);
    put_f64(out, ckpt.adam.eps);
    for (double v : ckpt.adam.m) put_f64(out, v);
    for (double v : ckpt.adam.v) put_f64(out, v);
    if (!out) fail(path, "write failed");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in = open_in(path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "SDNC", 4) != 0)
        fail(path, "not a checkpoint file");
    std::uint32_t version = get_u32(in, path);
    if (version != kCheckpointVersion)
        fail(path, "unsupported checkpoint version " + std::to_string(version));

    Checkpoint ckpt;
    DenoiserSpec s;
    s.x_channels = static_cast<int>(get_u32(in, path));
    s.cond_channels = static_cast<int>(get_u32(in, path));
    s.width = static_cast<int>(get_u32(in, path));
    s.depth = static_cast<int>(get_u32(in, path));
    s.kernel = static_cast<int>(get_u32(in, path));
    s.time_embed_dim = static_cast<int>(get_u32(in, path));
    s.validate();
    ckpt.schedule_kind = get_u32(in, path) == 0 ? ScheduleKind::Cosine : ScheduleKind::Linear;
    ckpt.steps = static_cast<int>(get_u32(in, path));
    ckpt.cosine_s = get_f64(in, path);
    if (ckpt.steps < 1) fail(path, "bad schedule steps");

    std::uint64_t n = get_u64(in, path);
    if (n != param_count(s)) fail(path, "parameter count does not match network shape");
    ckpt.params.spec = s;
    ckpt.params.values.resize(n);
    for (auto& v : ckpt.params.values) v = get_f64(in, path);

    ckpt.adam.step = get_u64(in, path);
    ckpt.adam.lr0 = get_f64(in, path);
    ckpt.adam.beta1 = get_f64(in, path);
    ckpt.adam.beta2 = get_f64(in, path);
    ckpt.adam.eps = get_f64(in, path);
    ckpt.adam.m.resize(n);
    for (auto& v : ckpt.adam.m) v = get_f64(in, path);
    ckpt.adam.v.resize(n);
    for (auto& v : ckpt.adam.v) v = get_f64(in, path);
    return ckpt;
}

}  // namespace smdsr
