#include "smdsr/train.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "smdsr/metrics.hpp"
#include "smdsr/resample.hpp"

namespace smdsr {

void TrainConfig::validate() const {
    if (iterations < 1) throw std::invalid_argument("TrainConfig: iterations must be >= 1");
    if (batch < 1) throw std::invalid_argument("TrainConfig: batch must be >= 1");
    if (patch < 8 || patch % 4 != 0)
        throw std::invalid_argument("TrainConfig: patch must be >= 8 and divisible by 4");
    if (steps < 1) throw std::invalid_argument("TrainConfig: steps must be >= 1");
    if (!(lr0 > 0.0)) throw std::invalid_argument("TrainConfig: lr0 must be positive");
    if (scene_count < 1) throw std::invalid_argument("TrainConfig: scene_count must be >= 1");
    if (log_every < 1) throw std::invalid_argument("TrainConfig: log_every must be >= 1");
    net.validate();
    if (net.x_channels != 3 || net.cond_channels != 3)
        throw std::invalid_argument("TrainConfig: the SR trainer uses 3-channel images");
    if (dataset_dir.empty()) scene.validate();
}

std::string scene_filename(int index, const std::string& kind) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "scene_%04d_%s", index, kind.c_str());
    return buf;
}

void save_scene(const std::string& dir, int index, const Scene& scene) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_image((fs::path(dir) / scene_filename(index, "hr.ppm")).string(), scene.hr);
    write_image((fs::path(dir) / scene_filename(index, "lr.ppm")).string(), scene.lr);
    write_label_map((fs::path(dir) / scene_filename(index, "labels.pgm")).string(), scene.labels);
}

std::vector<Scene> load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<Scene> scenes;
    for (int i = 0;; ++i) {
        fs::path hr = fs::path(dir) / scene_filename(i, "hr.ppm");
        if (!fs::exists(hr)) break;
        Scene s;
        s.hr = read_image(hr.string());
        s.lr = read_image((fs::path(dir) / scene_filename(i, "lr.ppm")).string());
        s.labels = read_label_map((fs::path(dir) / scene_filename(i, "labels.pgm")).string());
        if (s.hr.height != s.lr.height * 4 || s.hr.width != s.lr.width * 4)
            throw std::runtime_error(hr.string() + ": LR dims are not HR/4");
        if (s.labels.height != s.hr.height || s.labels.width != s.hr.width)
            throw std::runtime_error(hr.string() + ": label map does not match HR dims");
        scenes.push_back(std::move(s));
    }
    if (scenes.empty())
        throw std::runtime_error(dir + ": no scene_0000_hr.ppm found");
    return scenes;
}

std::vector<Scene> synth_dataset(const SceneSpec& base, int count) {
    std::vector<Scene> scenes;
    scenes.reserve(count);
    for (int i = 0; i < count; ++i) {
        SceneSpec spec = base;
        spec.seed = base.seed + static_cast<std::uint64_t>(i);
        scenes.push_back(gen_synthetic(spec));
    }
    return scenes;
}

int draw_timestep(Rng& rng, int steps) { return rng.uniform_int(1, steps); }

TrainResult train(const TrainConfig& config, const std::vector<Scene>* dataset,
                  Checkpoint* out_checkpoint) {
    config.validate();
    std::vector<Scene> owned;
    if (dataset == nullptr) {
        owned = config.dataset_dir.empty() ? synth_dataset(config.scene, config.scene_count)
                                           : load_dataset(config.dataset_dir);
        dataset = &owned;
    }
    if (dataset->empty()) throw std::invalid_argument("train: empty dataset");
    for (const auto& s : *dataset) {
        if (s.hr.height < config.patch || s.hr.width < config.patch)
            throw std::invalid_argument("train: patch larger than a dataset image");
        if (s.labels.height != s.hr.height || s.labels.width != s.hr.width)
            throw std::invalid_argument("train: label map does not match HR image");
    }

    NoiseSchedule sched = build_schedule(config.steps, config.schedule_kind, config.cosine_s);

    Checkpoint ckpt;
    if (!config.resume_path.empty()) {
        ckpt = load_checkpoint(config.resume_path);
        if (!(ckpt.params.spec == config.net))
            throw std::runtime_error("train: checkpoint network shape does not match config");
        if (ckpt.schedule_kind != config.schedule_kind || ckpt.steps != config.steps)
            throw std::runtime_error("train: checkpoint schedule does not match config");
    } else {
        ckpt.params = init_params(config.net, config.seed);
        ckpt.adam = init_adam(ckpt.params.values.size(), config.lr0);
        ckpt.schedule_kind = config.schedule_kind;
        ckpt.steps = config.steps;
        ckpt.cosine_s = config.cosine_s;
    }

    std::ofstream log;
    if (!config.log_path.empty()) {
        log.open(config.log_path);
        if (!log) throw std::runtime_error(config.log_path + ": cannot open log for writing");
        log << "iter,loss,lr\n";
    }

    // Separate stream from parameter init so changing the net shape does not
    // shift the data order.
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ull);

    const int p = config.patch;
    const int lp = p / 4;
    struct Draw {
        int scene, y0, x0, t;
        Image<double> eps;
    };
    std::vector<Draw> draws(config.batch);
    std::vector<double> grad_sum(ckpt.params.values.size());
    TrainResult result;
    result.iterations = config.iterations;

    for (int it = 0; it < config.iterations; ++it) {
        const double lr = cosine_lr(config.lr0, static_cast<std::size_t>(ckpt.adam.step),
                                    static_cast<std::size_t>(config.iterations));
        // All randomness drawn up front, in a fixed order.
        for (int b = 0; b < config.batch; ++b) {
            Draw& d = draws[b];
            d.scene = rng.uniform_int(0, static_cast<int>(dataset->size()) - 1);
            const Scene& s = (*dataset)[d.scene];
            d.y0 = 4 * rng.uniform_int(0, (s.hr.height - p) / 4);
            d.x0 = 4 * rng.uniform_int(0, (s.hr.width - p) / 4);
            d.t = draw_timestep(rng, config.steps);
            d.eps = gaussian_image<double>(3, p, p, rng);
        }

        std::fill(grad_sum.begin(), grad_sum.end(), 0.0);
        double loss_sum = 0.0;
        for (int b = 0; b < config.batch; ++b) {
            const Draw& d = draws[b];
            const Scene& s = (*dataset)[d.scene];
            CropRect hr_rect{d.y0, d.x0, p, p};
            CropRect lr_rect{d.y0 / 4, d.x0 / 4, lp, lp};
            Image<double> hrp = crop(s.hr, hr_rect);
            Image<double> lrp = crop(s.lr, lr_rect);
            Image<double> x0 = make_residual(hrp, lrp);
            Image<double> cond = to_unit_signed(upsample_bilinear4(lrp));

            Image<double> mask;
            if (config.baseline) {
                mask = Image<double>(1, p, p, ValueRange::UnitSigned);
            } else {
                LabelMap lab = crop(s.labels, hr_rect);
                mask = spe_to_image<double>(
                    encode_spe(regions_from_label_map(lab), config.scheme, config.rope_base));
            }

            Image<double> x_t = forward_jump(x0, mask, sched, d.t, d.eps);
            Image<double> target = loss_target(mask, d.eps, sched, d.t);

            DenoiserCache cache;
            Image<double> est = denoiser_forward(ckpt.params, x_t, d.t, cond, &cache);
            const double inv_n = 1.0 / static_cast<double>(est.data.size());
            Image<double> go(est.channels, est.height, est.width);
            double loss_b = 0.0;
            for (std::size_t i = 0; i < est.data.size(); ++i) {
                double diff = est.data[i] - target.data[i];
                loss_b += diff * diff * inv_n;
                go.data[i] = 2.0 * diff * inv_n;
            }
            std::vector<double> grad_b = denoiser_backward(ckpt.params, cache, go);
            loss_sum += loss_b;
            for (std::size_t i = 0; i < grad_sum.size(); ++i) grad_sum[i] += grad_b[i];
        }

        const double loss = loss_sum / config.batch;
        if (!std::isfinite(loss))
            throw std::runtime_error("train: non-finite loss at iteration " + std::to_string(it + 1)
                                     + " (diverged; lower lr0 or check the data)");
        const double inv_b = 1.0 / config.batch;
        for (auto& g : grad_sum) g *= inv_b;
        adam_step(ckpt.adam, ckpt.params.values, grad_sum, lr);

        if (it == 0) result.initial_loss = loss;
        result.final_loss = loss;
        if (log.is_open() && ((it + 1) % config.log_every == 0 || it == 0))
            log << (it + 1) << "," << loss << "," << lr << "\n";
    }

    if (!config.checkpoint_path.empty()) save_checkpoint(config.checkpoint_path, ckpt);
    if (out_checkpoint != nullptr) *out_checkpoint = ckpt;
    return result;
}

Image<double> restore(const Checkpoint& ckpt, const Image<double>& lr_byte,
                      std::uint64_t seed, const SamplerOptions* opts) {
    if (lr_byte.channels != ckpt.params.spec.x_channels)
        throw std::invalid_argument("restore: LR channel count does not match the model");
    NoiseSchedule sched = build_schedule(ckpt.steps, ckpt.schedule_kind, ckpt.cosine_s);
    Image<double> cond = to_unit_signed(upsample_bilinear4(lr_byte));
    DenoiseFn<double> fn = [&](const Image<double>& x, int t, const Image<double>& c) {
        return denoiser_forward(ckpt.params, x, t, c);
    };
    SamplerOptions o;
    if (opts != nullptr) o = *opts;
    o.seed = seed;
    Image<double> x0hat = reverse_sample(fn, cond, sched, o);
    return combine_residual(lr_byte, x0hat);
}

double eval_mean_psnr_y(const Checkpoint& ckpt, const std::vector<Scene>& scenes,
                        std::uint64_t seed, const SamplerOptions* opts) {
    if (scenes.empty()) throw std::invalid_argument("eval_mean_psnr_y: no scenes");
    double sum = 0.0;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        Image<double> sr = restore(ckpt, scenes[i].lr, seed + i, opts);
        sum += psnr_y(sr, scenes[i].hr);
    }
    return sum / static_cast<double>(scenes.size());
}

}  // namespace smdsr
