#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smdsr/denoiser.hpp"
#include "smdsr/diffusion.hpp"
#include "smdsr/io.hpp"
#include "smdsr/mask.hpp"
#include "smdsr/schedule.hpp"
#include "smdsr/synth.hpp"

namespace smdsr {

struct TrainConfig {
    int iterations = 20000;
    int batch = 16;
    int patch = 32;             // HR patch size, divisible by 4
    ScheduleKind schedule_kind = ScheduleKind::Cosine;
    int steps = 100;
    double cosine_s = 0.008;
    double lr0 = 2e-4;
    std::uint64_t seed = 0;
    SpeScheme scheme = SpeScheme::Rope;
    double rope_base = 10000.0;
    bool baseline = false;      // force a zero mask (plain noise prediction)
    DenoiserSpec net;
    std::string dataset_dir;    // when empty, scenes are generated from `scene`
    SceneSpec scene;
    int scene_count = 8;
    std::string checkpoint_path;
    std::string resume_path;
    std::string log_path;       // CSV loss log when non-empty
    int log_every = 1;

    void validate() const;
};

struct TrainResult {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    int iterations = 0;
};

// Dataset file naming inside a directory: scene_0000_hr.ppm etc.
std::string scene_filename(int index, const std::string& kind);
void save_scene(const std::string& dir, int index, const Scene& scene);
std::vector<Scene> load_dataset(const std::string& dir);
std::vector<Scene> synth_dataset(const SceneSpec& base, int count);

// The trainer's timestep draw, shared with the statistical check.
int draw_timestep(Rng& rng, int steps);

// Residual-space diffusion training. Per iteration: draw a batch of
// (scene, crop, t, eps), encode the cropped label map (with the
// single-region reduction), form x_t by the closed-form jump, regress the
// denoiser on the modulated target, and take one Adam step with cosine
// learning-rate decay. Aborts with a diagnostic if the loss goes
// non-finite. When `dataset` is given it overrides config-driven loading.
TrainResult train(const TrainConfig& config, const std::vector<Scene>* dataset = nullptr,
                  Checkpoint* out_checkpoint = nullptr);

// Runs the reverse sampler on the upsampled LR condition and adds the
// predicted residual back. Takes no mask in any form.
Image<double> restore(const Checkpoint& ckpt, const Image<double>& lr_byte,
                      std::uint64_t seed, const SamplerOptions* opts = nullptr);

// Mean luma PSNR of restored scenes against their HR ground truth. Sampler
// options pass through to restore; scene i uses seed + i.
double eval_mean_psnr_y(const Checkpoint& ckpt, const std::vector<Scene>& scenes,
                        std::uint64_t seed, const SamplerOptions* opts = nullptr);

}  // namespace smdsr
