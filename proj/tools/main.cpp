#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "smdsr/invariants.hpp"
#include "smdsr/io.hpp"
#include "smdsr/metrics.hpp"
#include "smdsr/resample.hpp"
#include "smdsr/schedule.hpp"
#include "smdsr/synth.hpp"
#include "smdsr/train.hpp"

namespace {

using namespace smdsr;

void maybe_dump_config(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot write config");
    out << cmd->config_to_str(true, false);
}

// Applies a flat key=value config file to a subcommand's options. Values
// fill only options absent from the command line, so flags override the
// file; unknown keys are usage errors. (CLI11's own config handling only
// runs on the root app and wants sectioned files, so this is done by hand
// with its formatter.)
void apply_config_file(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::vector<CLI::ConfigItem> items = cmd->get_config_formatter()->from_file(path);
    for (const auto& item : items) {
        if (!item.parents.empty() || item.name == "++" || item.name == "--")
            throw CLI::ConfigError(path + ": sections are not supported (flat key=value only)");
        CLI::Option* op = cmd->get_option_no_throw("--" + item.name);
        if (op == nullptr) throw CLI::ConfigError(path + ": unknown config key '" + item.name + "'");
        if (!op->get_configurable())
            throw CLI::ConfigError(path + ": key '" + item.name + "' cannot come from a config file");
        if (op->count() > 0) continue;
        if (op->get_expected_min() == 0) {
            std::string res = item.inputs.empty() ? std::string("true") : item.inputs.at(0);
            op->add_result(op->get_flag_value(item.name, res));
        } else {
            for (const auto& input : item.inputs) op->add_result(input);
        }
        op->run_callback();
    }
}

void add_scene_flags(CLI::App* cmd, SceneSpec& scene) {
    cmd->add_option("--scene-height", scene.height, "Scene HR height (divisible by 4)")
        ->capture_default_str();
    cmd->add_option("--scene-width", scene.width, "Scene HR width (divisible by 4)")
        ->capture_default_str();
    cmd->add_option("--scene-regions", scene.regions, "Voronoi region count")
        ->capture_default_str();
    cmd->add_option("--scene-freq-min", scene.freq_min, "Grating frequency band low (cyc/px)")
        ->capture_default_str();
    cmd->add_option("--scene-freq-max", scene.freq_max, "Grating frequency band high (cyc/px)")
        ->capture_default_str();
    cmd->add_option("--scene-amp-min", scene.amp_min, "Grating amplitude band low")
        ->capture_default_str();
    cmd->add_option("--scene-amp-max", scene.amp_max, "Grating amplitude band high")
        ->capture_default_str();
    cmd->add_option("--scene-base-min", scene.base_min, "Base level band low")
        ->capture_default_str();
    cmd->add_option("--scene-base-max", scene.base_max, "Base level band high")
        ->capture_default_str();
    cmd->add_option("--scene-noise", scene.noise, "White-noise sigma (fraction of full scale)")
        ->capture_default_str();
    cmd->add_option("--scene-seed", scene.seed, "Scene generator seed")->capture_default_str();
}

int cmd_gen(CLI::App& app) {
    auto* cmd = app.add_subcommand("gen", "Generate a synthetic HR/LR/label dataset");
    auto state = std::make_shared<std::tuple<std::string, int, SceneSpec, std::string, std::string>>();
    auto& [out_dir, count, scene, dump, config] = *state;
    count = 8;
    cmd->add_option("--config", config, "Read options from a flat key=value file")
        ->configurable(false);
    cmd->add_option("--out", out_dir, "Output directory (required here or in the config)");
    cmd->add_option("--count", count, "Number of scenes")->capture_default_str();
    add_scene_flags(cmd, scene);
    cmd->add_option("--dump-config", dump, "Write the effective configuration to a file")
        ->configurable(false);
    cmd->callback([state, cmd]() {
        auto& [out_dir, count, scene, dump, config] = *state;
        apply_config_file(cmd, config);
        maybe_dump_config(cmd, dump);
        if (out_dir.empty()) throw CLI::RequiredError("--out");
        if (count < 1) throw std::invalid_argument("gen: --count must be >= 1");
        for (int i = 0; i < count; ++i) {
            SceneSpec spec = scene;
            spec.seed = scene.seed + static_cast<std::uint64_t>(i);
            save_scene(out_dir, i, gen_synthetic(spec));
        }
        std::cout << "wrote " << count << " scenes to " << out_dir << "\n";
    });
    return 0;
}

int cmd_encode(CLI::App& app) {
    auto* cmd = app.add_subcommand("encode", "Encode a label map into an SPE mask file");
    auto state = std::make_shared<std::tuple<std::string, std::string, std::string, double>>();
    auto& [labels_path, out_path, scheme, base] = *state;
    scheme = "rope";
    base = 10000.0;
    cmd->add_option("--labels", labels_path, "Label map (16-bit PGM)")->required();
    cmd->add_option("--out", out_path, "Output SPE file")->required();
    cmd->add_option("--scheme", scheme, "Embedding scheme")
        ->check(CLI::IsMember({"rope", "cosine", "linear"}))
        ->capture_default_str();
    cmd->add_option("--base", base, "Rotary base frequency")->capture_default_str();
    cmd->callback([state]() {
        auto& [labels_path, out_path, scheme, base] = *state;
        LabelMap map = read_label_map(labels_path);
        SpeMask mask =
            encode_spe(regions_from_label_map(map), spe_scheme_from_string(scheme), base);
        write_spe(out_path, mask);
        std::cout << "wrote " << out_path << " (" << mask.width << "x" << mask.height << ")\n";
    });
    return 0;
}

struct TrainCliState {
    TrainConfig cfg;
    std::string schedule = "cosine";
    std::string scheme = "rope";
    std::string dump;
    std::string config;
};

int cmd_train(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Train the denoiser on synthetic or on-disk scenes");
    auto state = std::make_shared<TrainCliState>();
    TrainConfig& cfg = state->cfg;
    cfg.checkpoint_path = "model.ckpt";
    cmd->add_option("--config", state->config, "Read options from a flat key=value file")
        ->configurable(false);
    cmd->add_option("--iterations", cfg.iterations, "Training iterations")->capture_default_str();
    cmd->add_option("--batch", cfg.batch, "Batch size")->capture_default_str();
    cmd->add_option("--patch", cfg.patch, "HR patch size (divisible by 4)")->capture_default_str();
    cmd->add_option("--schedule", state->schedule, "Noise schedule kind")
        ->check(CLI::IsMember({"cosine", "linear"}))
        ->capture_default_str();
    cmd->add_option("--steps", cfg.steps, "Diffusion steps T")->capture_default_str();
    cmd->add_option("--cosine-s", cfg.cosine_s, "Cosine schedule offset")->capture_default_str();
    cmd->add_option("--lr0", cfg.lr0, "Initial learning rate")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Training seed")->capture_default_str();
    cmd->add_option("--scheme", state->scheme, "SPE embedding scheme")
        ->check(CLI::IsMember({"rope", "cosine", "linear"}))
        ->capture_default_str();
    cmd->add_option("--rope-base", cfg.rope_base, "Rotary base frequency")->capture_default_str();
    cmd->add_flag("--baseline", cfg.baseline, "Train with a zero mask (plain DDPM target)");
    cmd->add_option("--dataset", cfg.dataset_dir, "Dataset directory (omit to synthesize)");
    cmd->add_option("--scene-count", cfg.scene_count, "Synthetic scene count")
        ->capture_default_str();
    add_scene_flags(cmd, cfg.scene);
    cmd->add_option("--net-width", cfg.net.width, "Denoiser hidden width")->capture_default_str();
    cmd->add_option("--net-depth", cfg.net.depth, "Denoiser residual blocks")
        ->capture_default_str();
    cmd->add_option("--net-kernel", cfg.net.kernel, "Denoiser conv kernel (odd)")
        ->capture_default_str();
    cmd->add_option("--net-temb", cfg.net.time_embed_dim, "Time embedding dimension (even)")
        ->capture_default_str();
    cmd->add_option("--checkpoint", cfg.checkpoint_path, "Checkpoint output path")
        ->capture_default_str();
    cmd->add_option("--resume", cfg.resume_path, "Resume from an existing checkpoint");
    cmd->add_option("--log", cfg.log_path, "CSV loss log path");
    cmd->add_option("--log-every", cfg.log_every, "Log every N iterations")->capture_default_str();
    cmd->add_option("--dump-config", state->dump, "Write the effective configuration to a file")
        ->configurable(false);
    cmd->callback([state, cmd]() {
        TrainConfig& cfg = state->cfg;
        apply_config_file(cmd, state->config);
        maybe_dump_config(cmd, state->dump);
        cfg.schedule_kind = schedule_kind_from_string(state->schedule);
        cfg.scheme = spe_scheme_from_string(state->scheme);
        TrainResult res = train(cfg);
        std::cout << std::setprecision(6) << std::fixed;
        std::cout << "iterations=" << res.iterations << "\n";
        std::cout << "initial_loss=" << res.initial_loss << "\n";
        std::cout << "final_loss=" << res.final_loss << "\n";
        std::cout << "checkpoint=" << cfg.checkpoint_path << "\n";
    });
    return 0;
}

int cmd_restore(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "restore", "Super-resolve an LR image with a trained checkpoint (no mask input exists)");
    auto state = std::make_shared<
        std::tuple<std::string, std::string, std::string, std::uint64_t, SamplerOptions>>();
    auto& [ckpt_path, lr_path, out_path, seed, opts] = *state;
    seed = 0;
    cmd->add_option("--checkpoint", ckpt_path, "Trained checkpoint")->required();
    cmd->add_option("--lr", lr_path, "Low-resolution input image (PPM)")->required();
    cmd->add_option("--out", out_path, "Output SR image (PPM)")->required();
    cmd->add_option("--seed", seed, "Sampler seed")->capture_default_str();
    cmd->add_flag("--clamp-x0", opts.clamp_x0, "Clamp the implied x0 during sampling");
    cmd->add_flag("--final-step-noise", opts.final_step_noise,
                  "Draw noise at t = 1 as well (inert: its variance is 0)");
    cmd->add_option("--noise-scale", opts.noise_scale, "Scale on the posterior sampling noise")
        ->capture_default_str();
    cmd->callback([state]() {
        auto& [ckpt_path, lr_path, out_path, seed, opts] = *state;
        Checkpoint ckpt = load_checkpoint(ckpt_path);
        Image<double> lr = read_image(lr_path);
        Image<double> sr = restore(ckpt, lr, seed, &opts);
        write_image(out_path, sr);
        std::cout << "wrote " << out_path << " (" << sr.width << "x" << sr.height << ")\n";
    });
    return 0;
}

int cmd_eval(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Report luma PSNR/SSIM between two images");
    auto state = std::make_shared<std::pair<std::string, std::string>>();
    cmd->add_option("--sr", state->first, "Restored image")->required();
    cmd->add_option("--hr", state->second, "Reference image")->required();
    cmd->callback([state]() {
        Image<double> sr = read_image(state->first);
        Image<double> hr = read_image(state->second);
        double psnr = psnr_y(sr, hr);
        double ssim = ssim_y(sr, hr);
        std::ostringstream os;
        os << std::setprecision(6) << std::fixed;
        if (std::isinf(psnr)) os << "psnr=inf\n";
        else os << "psnr=" << psnr << "\n";
        os << "ssim=" << ssim << "\n";
        std::cout << os.str();
    });
    return 0;
}

int cmd_schedule(CLI::App& app) {
    auto* cmd = app.add_subcommand("schedule", "Dump a noise schedule as a plain-text table");
    auto state = std::make_shared<std::tuple<int, std::string, double>>();
    auto& [steps, kind, s] = *state;
    steps = 100;
    kind = "cosine";
    s = 0.008;
    cmd->add_option("--steps", steps, "Step count T")->capture_default_str();
    cmd->add_option("--kind", kind, "Schedule kind")
        ->check(CLI::IsMember({"cosine", "linear"}))
        ->capture_default_str();
    cmd->add_option("--s", s, "Cosine offset")->capture_default_str();
    cmd->callback([state]() {
        auto& [steps, kind, s] = *state;
        NoiseSchedule sched = build_schedule(steps, schedule_kind_from_string(kind), s);
        std::cout << "t beta alpha_bar phi beta_tilde\n";
        std::cout << std::setprecision(12);
        for (int t = 1; t <= sched.steps; ++t)
            std::cout << t << " " << sched.beta[t] << " " << sched.alpha_bar[t] << " "
                      << sched.phi[t] << " " << sched.posterior_beta_tilde[t] << "\n";
    });
    return 0;
}

int cmd_check(CLI::App& app) {
    auto* cmd = app.add_subcommand("check", "Run the cross-module invariant suite");
    auto state = std::make_shared<std::pair<std::uint64_t, bool>>(0, false);
    cmd->add_option("--seed", state->first, "Suite seed")->capture_default_str();
    cmd->add_flag("--skip-mutation", state->second, "Skip the fault-injection meta checks");
    cmd->callback([state]() {
        InvariantOptions opts;
        opts.seed = state->first;
        opts.mutation_checks = !state->second;
        std::vector<CheckResult> results = run_invariant_suite(opts);
        print_results(std::cout, results);
        if (!all_passed(results)) throw std::runtime_error("invariant suite failed");
    });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structure-modulated diffusion super-resolution toolkit"};
    app.require_subcommand(1);
    cmd_gen(app);
    cmd_encode(app);
    cmd_train(app);
    cmd_restore(app);
    cmd_eval(app);
    cmd_schedule(app);
    cmd_check(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
