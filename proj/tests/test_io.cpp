#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "smdsr/io.hpp"
#include "smdsr/rng.hpp"

using namespace smdsr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
        path = fs::temp_directory_path() /
               ("smdsr_io_" + std::to_string(tick) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("color image round trip preserves every byte") {
    TempDir dir;
    Image<double> img(3, 5, 7, ValueRange::Byte);
    Rng rng(1);
    for (auto& v : img.data) v = static_cast<double>(rng.uniform_int(0, 255));
    std::string p = dir.file("a.ppm");
    write_image(p, img);
    Image<double> back = read_image(p);
    CHECK(back.channels == 3);
    CHECK(back.height == 5);
    CHECK(back.width == 7);
    CHECK(back.range == ValueRange::Byte);
    CHECK(back.data == img.data);
}

TEST_CASE("gray image round trip") {
    TempDir dir;
    Image<double> img(1, 3, 4, ValueRange::Byte);
    for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<double>(i * 20);
    std::string p = dir.file("a.pgm");
    write_image(p, img);
    Image<double> back = read_image(p);
    CHECK(back.channels == 1);
    CHECK(back.data == img.data);
}

TEST_CASE("image writer rounds and clamps") {
    TempDir dir;
    Image<double> img(1, 1, 4, ValueRange::Byte);
    img.data = {254.6, -3.0, 100.4, 300.0};
    std::string p = dir.file("c.pgm");
    write_image(p, img);
    Image<double> back = read_image(p);
    CHECK(back.data == std::vector<double>{255.0, 0.0, 100.0, 255.0});
}

TEST_CASE("image writer rejects wrong range or channel count") {
    TempDir dir;
    Image<double> unit(1, 2, 2, ValueRange::UnitSigned);
    CHECK_THROWS_AS(write_image(dir.file("u.pgm"), unit), std::invalid_argument);
    Image<double> two(2, 2, 2, ValueRange::Byte);
    CHECK_THROWS_AS(write_image(dir.file("t.pgm"), two), std::invalid_argument);
}

TEST_CASE("header comments are skipped") {
    TempDir dir;
    std::string p = dir.file("c.pgm");
    write_bytes(p, std::string("P5\n# a comment\n2 1\n# another\n255\n") + '\x05' + '\x09');
    Image<double> img = read_image(p);
    CHECK(img.width == 2);
    CHECK(img.height == 1);
    CHECK(img.data == std::vector<double>{5.0, 9.0});
}

TEST_CASE("image reader rejects malformed files") {
    TempDir dir;
    CHECK_THROWS_AS(read_image(dir.file("missing.ppm")), std::runtime_error);

    std::string bad_magic = dir.file("bad.ppm");
    write_bytes(bad_magic, "P3\n1 1\n255\n0 0 0\n");
    CHECK_THROWS_AS(read_image(bad_magic), std::runtime_error);

    std::string truncated = dir.file("short.ppm");
    write_bytes(truncated, "P6\n4 4\n255\nxx");
    CHECK_THROWS_AS(read_image(truncated), std::runtime_error);

    std::string maxval = dir.file("maxval.pgm");
    write_bytes(maxval, std::string("P5\n1 1\n254\n") + '\x00');
    CHECK_THROWS_AS(read_image(maxval), std::runtime_error);
}

TEST_CASE("label map round trip keeps 16-bit values") {
    TempDir dir;
    LabelMap m(2, 3);
    m.labels = {0, 1, 300, 65535, 7, 2};
    std::string p = dir.file("labels.pgm");
    write_label_map(p, m);
    LabelMap back = read_label_map(p);
    CHECK(back.height == 2);
    CHECK(back.width == 3);
    CHECK(back.labels == m.labels);
}

TEST_CASE("label samples are stored big-endian") {
    TempDir dir;
    LabelMap m(1, 1);
    m.labels = {0x0102};
    std::string p = dir.file("be.pgm");
    write_label_map(p, m);
    std::ifstream in(p, std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(all.size() >= 2);
    CHECK(static_cast<unsigned char>(all[all.size() - 2]) == 0x01);
    CHECK(static_cast<unsigned char>(all[all.size() - 1]) == 0x02);
}

TEST_CASE("label reader demands the 16-bit maxval") {
    TempDir dir;
    std::string p = dir.file("m255.pgm");
    write_bytes(p, std::string("P5\n1 1\n255\n") + '\x00');
    CHECK_THROWS_AS(read_label_map(p), std::runtime_error);
}

TEST_CASE("spe mask round trips through float32") {
    TempDir dir;
    SpeMask m(2, 2);
    m.values = {0.5, -0.25, 1.0, 0.0};  // exactly representable
    std::string p = dir.file("m.spe");
    write_spe(p, m);
    SpeMask back = read_spe(p);
    CHECK(back.height == 2);
    CHECK(back.width == 2);
    CHECK(back.values == m.values);

    SpeMask gen(1, 3);
    gen.values = {0.1234567890123, -0.777, 2.5e-3};
    write_spe(p, gen);
    SpeMask g2 = read_spe(p);
    for (size_t i = 0; i < gen.values.size(); ++i)
        CHECK(g2.values[i] == doctest::Approx(gen.values[i]).epsilon(1e-6));
}

TEST_CASE("spe reader checks magic and truncation") {
    TempDir dir;
    std::string p = dir.file("bad.spe");
    write_bytes(p, "SPEX\x01\x00\x00\x00");
    CHECK_THROWS_AS(read_spe(p), std::runtime_error);
    write_bytes(p, std::string("SPE1") + std::string(12, '\x01'));
    CHECK_THROWS_AS(read_spe(p), std::runtime_error);  // huge dims / truncated
}

TEST_CASE("checkpoint round trip is bit exact") {
    TempDir dir;
    DenoiserSpec spec;
    spec.x_channels = 3;
    spec.cond_channels = 3;
    spec.width = 5;
    spec.depth = 2;
    spec.kernel = 3;
    spec.time_embed_dim = 6;

    Checkpoint c;
    c.params = init_params(spec, 99);
    c.adam = init_adam(c.params.values.size(), 3e-4);
    c.adam.step = 1234;
    Rng rng(5);
    for (auto& v : c.adam.m) v = rng.uniform(-1.0, 1.0);
    for (auto& v : c.adam.v) v = rng.uniform(0.0, 1.0);
    c.schedule_kind = ScheduleKind::Linear;
    c.steps = 42;
    c.cosine_s = 0.012;

    std::string p = dir.file("model.ckpt");
    save_checkpoint(p, c);
    Checkpoint back = load_checkpoint(p);
    CHECK(back.params.spec == spec);
    CHECK(back.params.values == c.params.values);
    CHECK(back.adam.step == 1234);
    CHECK(back.adam.lr0 == 3e-4);
    CHECK(back.adam.beta1 == c.adam.beta1);
    CHECK(back.adam.beta2 == c.adam.beta2);
    CHECK(back.adam.eps == c.adam.eps);
    CHECK(back.adam.m == c.adam.m);
    CHECK(back.adam.v == c.adam.v);
    CHECK(back.schedule_kind == ScheduleKind::Linear);
    CHECK(back.steps == 42);
    CHECK(back.cosine_s == 0.012);
}

TEST_CASE("checkpoint saver validates consistency") {
    TempDir dir;
    DenoiserSpec spec;
    spec.width = 4;
    spec.depth = 1;
    spec.time_embed_dim = 4;
    Checkpoint c;
    c.params = init_params(spec, 1);
    c.adam = init_adam(c.params.values.size());
    c.params.values.pop_back();
    CHECK_THROWS_AS(save_checkpoint(dir.file("x.ckpt"), c), std::invalid_argument);
    c.params = init_params(spec, 1);
    c.adam.m.pop_back();
    CHECK_THROWS_AS(save_checkpoint(dir.file("x.ckpt"), c), std::invalid_argument);
}

TEST_CASE("checkpoint loader rejects corruption") {
    TempDir dir;
    CHECK_THROWS_AS(load_checkpoint(dir.file("none.ckpt")), std::runtime_error);

    std::string p = dir.file("junk.ckpt");
    write_bytes(p, "JUNKJUNKJUNK");
    CHECK_THROWS_AS(load_checkpoint(p), std::runtime_error);

    // valid checkpoint truncated mid-stream
    DenoiserSpec spec;
    spec.width = 4;
    spec.depth = 1;
    spec.time_embed_dim = 4;
    Checkpoint c;
    c.params = init_params(spec, 1);
    c.adam = init_adam(c.params.values.size());
    std::string good = dir.file("good.ckpt");
    save_checkpoint(good, c);
    std::ifstream in(good, std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::string cut = dir.file("cut.ckpt");
    write_bytes(cut, all.substr(0, all.size() / 2));
    CHECK_THROWS_AS(load_checkpoint(cut), std::runtime_error);

    // flip the version field
    std::string vbad = all;
    vbad[4] = '\x09';
    std::string vpath = dir.file("vbad.ckpt");
    write_bytes(vpath, vbad);
    CHECK_THROWS_AS(load_checkpoint(vpath), std::runtime_error);
}
