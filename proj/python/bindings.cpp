// pybind11 surface over the C++ core. Images cross the boundary as numpy
// arrays shaped (channels, height, width) in float64; label maps as (h, w)
// uint16.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smdsr/diffusion.hpp"
#include "smdsr/invariants.hpp"
#include "smdsr/io.hpp"
#include "smdsr/mask.hpp"
#include "smdsr/metrics.hpp"
#include "smdsr/resample.hpp"
#include "smdsr/schedule.hpp"
#include "smdsr/synth.hpp"
#include "smdsr/train.hpp"

namespace py = pybind11;
using namespace smdsr;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image<double> image_from_array(const DArray& a, ValueRange range = ValueRange::UnitSigned) {
    if (a.ndim() == 2) {
        Image<double> img(1, static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), range);
        std::copy(a.data(), a.data() + a.size(), img.data.begin());
        return img;
    }
    if (a.ndim() == 3) {
        Image<double> img(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                          static_cast<int>(a.shape(2)), range);
        std::copy(a.data(), a.data() + a.size(), img.data.begin());
        return img;
    }
    throw std::invalid_argument("expected a (h, w) or (c, h, w) array");
}

py::array_t<double> array_from_image(const Image<double>& img) {
    py::array_t<double> out({img.channels, img.height, img.width});
    std::copy(img.data.begin(), img.data.end(), out.mutable_data());
    return out;
}

LabelMap labels_from_array(const py::array_t<std::uint16_t,
                                             py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("labels must be a (h, w) array");
    LabelMap map(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), map.labels.begin());
    return map;
}

py::array_t<std::uint16_t> array_from_labels(const LabelMap& map) {
    py::array_t<std::uint16_t> out({map.height, map.width});
    std::copy(map.labels.begin(), map.labels.end(), out.mutable_data());
    return out;
}

py::array_t<double> array_from_spe(const SpeMask& mask) {
    py::array_t<double> out({mask.height, mask.width});
    std::copy(mask.values.begin(), mask.values.end(), out.mutable_data());
    return out;
}

ValueRange range_from_string(const std::string& name) {
    if (name == "unit") return ValueRange::UnitSigned;
    if (name == "byte") return ValueRange::Byte;
    throw std::invalid_argument("range must be 'unit' or 'byte'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Structure-modulated diffusion super-resolution core";

    py::class_<NoiseSchedule>(m, "Schedule")
        .def_readonly("steps", &NoiseSchedule::steps)
        .def_property_readonly("kind",
                               [](const NoiseSchedule& s) { return to_string(s.kind); })
        .def_readonly("beta", &NoiseSchedule::beta)
        .def_readonly("alpha", &NoiseSchedule::alpha)
        .def_readonly("alpha_bar", &NoiseSchedule::alpha_bar)
        .def_readonly("phi", &NoiseSchedule::phi)
        .def_readonly("beta_tilde", &NoiseSchedule::posterior_beta_tilde);

    m.def(
        "build_schedule",
        [](int steps, const std::string& kind, double cosine_s) {
            return build_schedule(steps, schedule_kind_from_string(kind), cosine_s);
        },
        py::arg("steps"), py::arg("kind") = "cosine", py::arg("cosine_s") = 0.008);
    m.def("phi_direct", &phi_direct, py::arg("schedule"), py::arg("t"));

    m.def(
        "rope_grid",
        [](int height, int width, double base) {
            RopeGrid g = rope_grid(height, width, base);
            py::array_t<double> out({g.height, g.width});
            std::copy(g.values.begin(), g.values.end(), out.mutable_data());
            return out;
        },
        py::arg("height"), py::arg("width"), py::arg("base") = 10000.0);

    m.def(
        "encode_spe",
        [](const py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>& labels,
           const std::string& scheme, double base) {
            RegionSet rs = regions_from_label_map(labels_from_array(labels));
            return array_from_spe(encode_spe(rs, spe_scheme_from_string(scheme), base));
        },
        py::arg("labels"), py::arg("scheme") = "rope", py::arg("base") = 10000.0);

    m.def(
        "forward_jump",
        [](const DArray& x0, const DArray& mask, const NoiseSchedule& s, int t,
           const DArray& eps) {
            return array_from_image(forward_jump(image_from_array(x0), image_from_array(mask),
                                                 s, t, image_from_array(eps)));
        },
        py::arg("x0"), py::arg("mask"), py::arg("schedule"), py::arg("t"), py::arg("eps"));

    m.def(
        "forward_step",
        [](const DArray& x_prev, const DArray& mask, const NoiseSchedule& s, int t,
           const DArray& eps) {
            return array_from_image(forward_step(image_from_array(x_prev),
                                                 image_from_array(mask), s, t,
                                                 image_from_array(eps)));
        },
        py::arg("x_prev"), py::arg("mask"), py::arg("schedule"), py::arg("t"), py::arg("eps"));

    m.def(
        "loss_target",
        [](const DArray& mask, const DArray& eps, const NoiseSchedule& s, int t) {
            return array_from_image(
                loss_target(image_from_array(mask), image_from_array(eps), s, t));
        },
        py::arg("mask"), py::arg("eps"), py::arg("schedule"), py::arg("t"));

    m.def(
        "posterior_mean",
        [](const DArray& x_t, const DArray& estimate, const NoiseSchedule& s, int t) {
            return array_from_image(
                posterior_mean_eps(image_from_array(x_t), image_from_array(estimate), s, t));
        },
        py::arg("x_t"), py::arg("estimate"), py::arg("schedule"), py::arg("t"));

    m.def(
        "reverse_sample",
        [](const py::function& denoise, const DArray& condition, const NoiseSchedule& s,
           bool clamp_x0, bool final_step_noise, std::uint64_t seed, double noise_scale) {
            SamplerOptions opts;
            opts.clamp_x0 = clamp_x0;
            opts.final_step_noise = final_step_noise;
            opts.seed = seed;
            opts.noise_scale = noise_scale;
            DenoiseFn<double> fn = [&denoise](const Image<double>& x, int t,
                                              const Image<double>& cond) {
                DArray est = denoise(array_from_image(x), t, array_from_image(cond));
                return image_from_array(est);
            };
            return array_from_image(reverse_sample(fn, image_from_array(condition), s, opts));
        },
        py::arg("denoise"), py::arg("condition"), py::arg("schedule"),
        py::arg("clamp_x0") = false, py::arg("final_step_noise") = false, py::arg("seed") = 0,
        py::arg("noise_scale") = 1.0);

    m.def(
        "gen_scene",
        [](int height, int width, int regions, std::uint64_t seed, double freq_min,
           double freq_max, double amp_min, double amp_max, double base_min, double base_max,
           double noise) {
            SceneSpec spec;
            spec.height = height;
            spec.width = width;
            spec.regions = regions;
            spec.seed = seed;
            spec.freq_min = freq_min;
            spec.freq_max = freq_max;
            spec.amp_min = amp_min;
            spec.amp_max = amp_max;
            spec.base_min = base_min;
            spec.base_max = base_max;
            spec.noise = noise;
            Scene sc = gen_synthetic(spec);
            py::dict d;
            d["hr"] = array_from_image(sc.hr);
            d["lr"] = array_from_image(sc.lr);
            d["labels"] = array_from_labels(sc.labels);
            return d;
        },
        py::arg("height") = 64, py::arg("width") = 64, py::arg("regions") = 4,
        py::arg("seed") = 0, py::arg("freq_min") = 0.08, py::arg("freq_max") = 0.45,
        py::arg("amp_min") = 0.15, py::arg("amp_max") = 0.45, py::arg("base_min") = 0.30,
        py::arg("base_max") = 0.70, py::arg("noise") = 0.01);

    m.def("upsample_bilinear4", [](const DArray& a) {
        return array_from_image(upsample_bilinear4(image_from_array(a, ValueRange::Byte)));
    });
    m.def("box_downsample4", [](const DArray& a) {
        return array_from_image(box_downsample4(image_from_array(a, ValueRange::Byte)));
    });

    m.def("psnr_y", [](const DArray& a, const DArray& b) {
        return psnr_y(image_from_array(a, ValueRange::Byte),
                      image_from_array(b, ValueRange::Byte));
    });
    m.def("ssim_y", [](const DArray& a, const DArray& b) {
        return ssim_y(image_from_array(a, ValueRange::Byte),
                      image_from_array(b, ValueRange::Byte));
    });

    m.def(
        "read_image",
        [](const std::string& path) { return array_from_image(read_image(path)); },
        py::arg("path"));
    m.def(
        "write_image",
        [](const std::string& path, const DArray& a) {
            write_image(path, image_from_array(a, ValueRange::Byte));
        },
        py::arg("path"), py::arg("image"));

    m.def(
        "train",
        [](int iterations, int batch, int patch, const std::string& schedule_kind, int steps,
           double lr0, std::uint64_t seed, const std::string& scheme, bool baseline,
           int net_width, int net_depth, int net_kernel, int net_temb,
           const std::string& dataset_dir, int scene_count, std::uint64_t scene_seed,
           int scene_height, int scene_width, int scene_regions, double scene_freq_min,
           double scene_freq_max, double scene_amp_min, double scene_amp_max,
           double scene_base_min, double scene_base_max, double scene_noise,
           const std::string& checkpoint) {
            TrainConfig c;
            c.iterations = iterations;
            c.batch = batch;
            c.patch = patch;
            c.schedule_kind = schedule_kind_from_string(schedule_kind);
            c.steps = steps;
            c.lr0 = lr0;
            c.seed = seed;
            c.scheme = spe_scheme_from_string(scheme);
            c.baseline = baseline;
            c.net.width = net_width;
            c.net.depth = net_depth;
            c.net.kernel = net_kernel;
            c.net.time_embed_dim = net_temb;
            c.dataset_dir = dataset_dir;
            c.scene_count = scene_count;
            c.scene.seed = scene_seed;
            c.scene.height = scene_height;
            c.scene.width = scene_width;
            c.scene.regions = scene_regions;
            c.scene.freq_min = scene_freq_min;
            c.scene.freq_max = scene_freq_max;
            c.scene.amp_min = scene_amp_min;
            c.scene.amp_max = scene_amp_max;
            c.scene.base_min = scene_base_min;
            c.scene.base_max = scene_base_max;
            c.scene.noise = scene_noise;
            c.checkpoint_path = checkpoint;
            TrainResult r = train(c);
            py::dict d;
            d["initial_loss"] = r.initial_loss;
            d["final_loss"] = r.final_loss;
            d["iterations"] = r.iterations;
            return d;
        },
        py::arg("iterations") = 200, py::arg("batch") = 4, py::arg("patch") = 16,
        py::arg("schedule_kind") = "cosine", py::arg("steps") = 100, py::arg("lr0") = 2e-4,
        py::arg("seed") = 0, py::arg("scheme") = "rope", py::arg("baseline") = false,
        py::arg("net_width") = 8, py::arg("net_depth") = 1, py::arg("net_kernel") = 3,
        py::arg("net_temb") = 8, py::arg("dataset_dir") = "", py::arg("scene_count") = 2,
        py::arg("scene_seed") = 0, py::arg("scene_height") = 32, py::arg("scene_width") = 32,
        py::arg("scene_regions") = 3, py::arg("scene_freq_min") = 0.08,
        py::arg("scene_freq_max") = 0.45, py::arg("scene_amp_min") = 0.15,
        py::arg("scene_amp_max") = 0.45, py::arg("scene_base_min") = 0.30,
        py::arg("scene_base_max") = 0.70, py::arg("scene_noise") = 0.01,
        py::arg("checkpoint") = "");

    m.def(
        "restore",
        [](const std::string& checkpoint, const DArray& lr_byte, std::uint64_t seed,
           bool clamp_x0, double noise_scale) {
            Checkpoint ckpt = load_checkpoint(checkpoint);
            SamplerOptions opts;
            opts.clamp_x0 = clamp_x0;
            opts.noise_scale = noise_scale;
            return array_from_image(
                restore(ckpt, image_from_array(lr_byte, ValueRange::Byte), seed, &opts));
        },
        py::arg("checkpoint"), py::arg("lr"), py::arg("seed") = 0, py::arg("clamp_x0") = false,
        py::arg("noise_scale") = 1.0);

    m.def(
        "run_invariants",
        [](std::uint64_t seed, bool mutation_checks) {
            InvariantOptions opts;
            opts.seed = seed;
            opts.mutation_checks = mutation_checks;
            std::vector<CheckResult> rs = run_invariant_suite(opts);
            py::list out;
            for (const auto& r : rs) out.append(py::make_tuple(r.name, r.pass, r.detail));
            return out;
        },
        py::arg("seed") = 0, py::arg("mutation_checks") = true);
}
