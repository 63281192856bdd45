#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crossing/export.hpp"
#include "crossing/trainer.hpp"

namespace {

using namespace crossing;

ScenarioConfig load_or_default(const std::string& path) {
    ScenarioConfig cfg;
    if (!path.empty()) cfg = load_config(path);
    validate_config(cfg);
    return cfg;
}

int cmd_train(const std::string& config_path, std::uint64_t seed, std::int64_t steps,
              bool shield, const std::string& out_dir) {
    ScenarioConfig cfg = load_or_default(config_path);
    if (steps >= 0) cfg.train_steps = steps;
    std::filesystem::create_directories(out_dir);

    TrainOptions opt;
    opt.seed = seed;
    opt.shield = shield;
    opt.checkpoint_dir = out_dir;
    TrainResult r = train(cfg, opt);

    write_file(out_dir + "/checkpoint.json", checkpoint_save(r.checkpoint));
    write_file(out_dir + "/metrics.csv", r.metrics_csv);
    write_file(out_dir + "/config.cfg", serialize_config(cfg));
    std::cout << "trained " << r.steps << " steps, " << r.episodes << " episodes\n"
              << "mean return first/last 10%: " << r.mean_return_first_window << " / "
              << r.mean_return_last_window << "\n"
              << "checkpoint: " << out_dir << "/checkpoint.json\n";
    return 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& ckpt_path,
                 std::uint64_t seed, bool shield, const std::vector<double>& delays,
                 int episodes, const std::string& out_dir) {
    ScenarioConfig cfg = load_or_default(config_path);
    PolicyCheckpoint ckpt = checkpoint_load(read_file(ckpt_path));

    EvalOptions opt;
    opt.delays = delays;
    opt.episodes_per_delay = episodes;
    opt.seed = seed;
    opt.shield = shield;
    opt.record_first_trace = !out_dir.empty();
    EvalResult r = evaluate(cfg, ckpt, opt);

    std::string report = format_eval_report(r);
    std::cout << report;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(out_dir + "/report.txt", report);
        write_file(out_dir + "/trace.csv", trace_to_csv(r.first_trace));
    }
    return 0;
}

int cmd_ablate(const std::string& config_path, std::uint64_t seed, std::int64_t steps,
               const std::string& out_dir) {
    ScenarioConfig cfg = load_or_default(config_path);
    if (steps >= 0) cfg.train_steps = steps;
    std::filesystem::create_directories(out_dir);

    TrainOptions topt;
    topt.seed = seed;
    EvalOptions eopt;
    eopt.delays = {0, 2, 4, 6, 8, 10, 12};
    eopt.episodes_per_delay = 3;
    eopt.seed = seed;
    AblateResult r = ablate(cfg, topt, eopt);

    write_file(out_dir + "/checkpoint_with_penalty.json", checkpoint_save(r.with_penalty.checkpoint));
    write_file(out_dir + "/checkpoint_no_penalty.json",
               checkpoint_save(r.without_penalty.checkpoint));
    std::string report = "== with braking penalty ==\n" + format_eval_report(r.eval_with) +
                         "== without braking penalty ==\n" + format_eval_report(r.eval_without);
    write_file(out_dir + "/ablation.txt", report);
    std::cout << report;
    return 0;
}

int cmd_export(const std::string& config_path, const std::string& ckpt_path, double delay,
               std::uint64_t seed, bool shield, const std::string& metrics_path,
               const std::string& out_dir) {
    ScenarioConfig cfg = load_or_default(config_path);
    PolicyCheckpoint ckpt = checkpoint_load(read_file(ckpt_path));

    EvalOptions opt;
    if (delay >= 0) opt.delays = {delay};
    opt.episodes_per_delay = 1;
    opt.seed = seed;
    opt.shield = shield;
    opt.record_first_trace = true;
    EvalResult r = evaluate(cfg, ckpt, opt);

    std::filesystem::create_directories(out_dir);
    std::string metrics = metrics_path.empty() ? "" : read_file(metrics_path);
    export_plotdata(r.first_trace, metrics, out_dir);
    write_file(out_dir + "/trace.csv", trace_to_csv(r.first_trace));
    std::cout << "wrote plot data to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shielded intersection crossing: simulation, training, evaluation"};
    app.require_subcommand(1);

    std::string config_path, ckpt_path, out_dir = "out", metrics_path;
    std::uint64_t seed = 1;
    std::int64_t steps = -1;
    bool no_shield = false;
    std::vector<double> delays;
    int episodes = 1;
    double delay = -1.0;

    auto* tr = app.add_subcommand("train", "Train the throttle policy with PPO");
    tr->add_option("--config", config_path, "Scenario config file");
    tr->add_option("--seed", seed, "Training seed");
    tr->add_option("--steps", steps, "Override train.steps");
    tr->add_flag("--no-shield", no_shield, "Disable the safety shield");
    tr->add_option("--out", out_dir, "Output directory");

    auto* ev = app.add_subcommand("evaluate", "Evaluate a checkpoint (deterministic policy)");
    ev->add_option("--config", config_path, "Scenario config file");
    ev->add_option("--checkpoint", ckpt_path, "Checkpoint file")->required();
    ev->add_option("--seed", seed, "Evaluation seed");
    ev->add_option("--delays", delays, "Forced north spawn delays (s)")->delimiter(',');
    ev->add_option("--episodes", episodes, "Episodes per delay");
    ev->add_flag("--no-shield", no_shield, "Disable the safety shield");
    ev->add_option("--out", out_dir, "Output directory (report + first-episode trace)");

    auto* ab = app.add_subcommand("ablate", "Train with and without the braking penalty");
    ab->add_option("--config", config_path, "Scenario config file");
    ab->add_option("--seed", seed, "Training seed");
    ab->add_option("--steps", steps, "Override train.steps");
    ab->add_option("--out", out_dir, "Output directory");

    auto* ex = app.add_subcommand("export", "Export per-figure plot CSVs from one episode");
    ex->add_option("--config", config_path, "Scenario config file");
    ex->add_option("--checkpoint", ckpt_path, "Checkpoint file")->required();
    ex->add_option("--delay", delay, "Forced north spawn delay (s)");
    ex->add_option("--seed", seed, "Episode seed");
    ex->add_flag("--no-shield", no_shield, "Disable the safety shield");
    ex->add_option("--metrics", metrics_path, "Training metrics CSV to bundle");
    ex->add_option("--out", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (tr->parsed()) return cmd_train(config_path, seed, steps, !no_shield, out_dir);
        if (ev->parsed())
            return cmd_evaluate(config_path, ckpt_path, seed, !no_shield, delays, episodes,
                                out_dir);
        if (ab->parsed()) return cmd_ablate(config_path, seed, steps, out_dir);
        if (ex->parsed())
            return cmd_export(config_path, ckpt_path, delay, seed, !no_shield, metrics_path,
                              out_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
