// vidrisk command-line driver.
//
// Exit codes: 0 success, 1 configuration or validation failure, 2 runtime
// failure (I/O, backend, training, evaluation).

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vidrisk/config.hpp"
#include "vidrisk/demo.hpp"
#include "vidrisk/error.hpp"
#include "vidrisk/pipeline.hpp"

#if defined(VIDRISK_HAVE_OPENCV)
#include "vidrisk/opencv_source.hpp"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> workers;

  vidrisk::ConfigOverrides overrides() const { return {seed, output_dir, workers}; }
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required = true) {
  auto* c = cmd->add_option("-c,--config", opts.config, "experiment config (JSON)");
  if (config_required) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--output-dir", opts.output_dir, "override the output directory");
  cmd->add_option("--workers", opts.workers, "parallel workers (0 = hardware concurrency)");
}

vidrisk::RunContext make_context(const CommonOptions& opts) {
  vidrisk::RunContext ctx;
  ctx.overrides = opts.overrides().describe();
  ctx.config_file = opts.config;
#if defined(VIDRISK_HAVE_OPENCV)
  ctx.decoder = [](const std::filesystem::path& p) { return vidrisk::open_opencv_source(p); };
#endif
  return ctx;
}

int exit_code_for(vidrisk::ErrorCode code) {
  return code == vidrisk::ErrorCode::kConfig ? kExitValidation : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vidrisk: danger alerting for video content from visual and text embeddings"};
  app.set_version_flag("--version", std::string(vidrisk::kToolVersion));
  app.require_subcommand(1);

  CommonOptions validate_opts;
  auto* validate = app.add_subcommand("validate", "check a config and its manifest without running anything");
  add_common(validate, validate_opts);

  CommonOptions embed_opts;
  bool export_plans = false;
  auto* embed = app.add_subcommand("embed", "sample frames and compute embedding caches");
  add_common(embed, embed_opts);
  embed->add_flag("--export-frame-plans", export_plans, "write frame_plans.jsonl to the output directory");

  CommonOptions train_opts;
  auto* train = app.add_subcommand("train", "train the configured model on the training split");
  add_common(train, train_opts);

  CommonOptions eval_opts;
  std::string artifact_path;
  bool plot = false;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a trained artifact on the test split");
  add_common(evaluate, eval_opts);
  evaluate->add_option("--artifact", artifact_path, "model artifact (default <output>/model.vmdl)");
  evaluate->add_flag("--plot", plot, "also write confusion.svg");

  CommonOptions cv_opts;
  auto* crossval = app.add_subcommand("crossval", "k-fold cross-validation of the configured classifier");
  add_common(crossval, cv_opts);

  std::string rep_manifest;
  std::string rep_backends;
  std::string rep_output = "runs/replicate";
  std::uint64_t rep_seed = 42;
  std::size_t rep_workers = 0;
  std::vector<std::string> rep_suite{"framework1", "framework2", "framework3"};
  auto* replicate = app.add_subcommand("replicate", "run all three preset frameworks and compare with reference values");
  replicate->add_option("--manifest", rep_manifest, "dataset manifest (JSONL)");
  replicate->add_option("--backends", rep_backends, "backend definitions (JSON with visual/text entries)");
  replicate->add_option("--suite", rep_suite, "frameworks to run")->delimiter(',');
  replicate->add_option("--output-dir", rep_output, "output directory");
  replicate->add_option("--seed", rep_seed, "seed");
  replicate->add_option("--workers", rep_workers, "parallel workers (0 = hardware concurrency)");

  std::string preset_name;
  std::string preset_manifest = "manifest.jsonl";
  std::string preset_output = "runs/out";
  auto* preset = app.add_subcommand("preset", "print a preset config for framework1, framework2 or framework3");
  preset->add_option("framework", preset_name, "framework name")->required();
  preset->add_option("--manifest", preset_manifest, "manifest path written into the config");
  preset->add_option("--output-dir", preset_output, "output directory written into the config");

  std::string demo_dir;
  vidrisk::DemoDatasetOptions demo_opts;
  auto* demo = app.add_subcommand("make-demo", "write a synthetic dataset (procedural media and a manifest)");
  demo->add_option("directory", demo_dir, "destination directory")->required();
  demo->add_option("--videos", demo_opts.videos, "number of videos");
  demo->add_option("--seed", demo_opts.seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const auto result = vidrisk::validate_config_file(validate_opts.config, validate_opts.overrides());
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& v : result.violations) std::cerr << "violation: " << v << '\n';
      if (!result.violations.empty()) {
        std::cerr << result.violations.size() << " violation(s)\n";
        return kExitValidation;
      }
      std::cout << "config OK (hash " << vidrisk::config_hash(*result.config) << ")\n";
      return kExitOk;
    }
    if (*embed) {
      const auto config = vidrisk::load_config(embed_opts.config, embed_opts.overrides());
      const auto summary = vidrisk::run_embed(config, make_context(embed_opts), export_plans);
      std::cout << "computed " << summary.computed << ", skipped " << summary.skipped << ", failed "
                << summary.failures.size() << '\n';
      return summary.failures.empty() ? kExitOk : kExitRuntime;
    }
    if (*train) {
      const auto config = vidrisk::load_config(train_opts.config, train_opts.overrides());
      const auto outcome = vidrisk::run_train(config, make_context(train_opts));
      std::cout << outcome.artifact_path.string() << '\n';
      return kExitOk;
    }
    if (*evaluate) {
      const auto config = vidrisk::load_config(eval_opts.config, eval_opts.overrides());
      const std::filesystem::path artifact =
          artifact_path.empty() ? config.output_path() / "model.vmdl" : std::filesystem::path(artifact_path);
      const auto outcome = vidrisk::run_evaluate(config, artifact, make_context(eval_opts), plot);
      std::cout << nlohmann::json(outcome.metrics).dump(2) << '\n';
      return kExitOk;
    }
    if (*crossval) {
      const auto config = vidrisk::load_config(cv_opts.config, cv_opts.overrides());
      const auto outcome = vidrisk::run_crossval(config, make_context(cv_opts));
      std::cout << vidrisk::cross_validation_csv(outcome.report);
      return kExitOk;
    }
    if (*replicate) {
      vidrisk::ReplicationRequest req;
      req.manifest = rep_manifest;
      req.output_dir = rep_output;
      req.seed = rep_seed;
      req.workers = rep_workers;
      if (!rep_backends.empty()) {
        req.backends = nlohmann::json::parse(vidrisk::read_file_text(rep_backends), nullptr, false);
        if (req.backends.is_discarded()) {
          std::cerr << "error: " << rep_backends << " is not valid JSON\n";
          return kExitValidation;
        }
      }
      req.suite.clear();
      for (const auto& name : rep_suite) req.suite.push_back(vidrisk::framework_from_name(name));
      CommonOptions none;
      const auto rows = vidrisk::run_replicate(req, make_context(none));
      std::cout << vidrisk::format_replication_table(rows);
      return kExitOk;
    }
    if (*demo) {
      const auto entries = vidrisk::write_demo_dataset(demo_dir, demo_opts);
      std::cout << entries.size() << " videos -> " << (std::filesystem::path(demo_dir) / "manifest.jsonl").string()
                << '\n';
      return kExitOk;
    }
    if (*preset) {
      const auto f = vidrisk::framework_from_name(preset_name);
      std::cout << vidrisk::preset_config(f, preset_manifest, preset_output).dump(2) << '\n';
      return kExitOk;
    }
  } catch (const vidrisk::Error& e) {
    std::cerr << "error [" << vidrisk::to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
