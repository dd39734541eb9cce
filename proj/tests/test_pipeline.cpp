#include <gtest/gtest.h>

#include "support.hpp"
#include "vidrisk/demo.hpp"
#include "vidrisk/pipeline.hpp"

using namespace vidrisk;
using vidrisk::testkit::error_code_of;
using vidrisk::testkit::TempDir;

namespace {

std::size_t count_files(const std::filesystem::path& dir, const std::string& suffix) {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    n += name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  }
  return n;
}

bool has_violation(const ConfigValidation& v, const std::string& needle) {
  for (const auto& s : v.violations) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

/// A preset shrunk for test speed: narrow mock encoders and short training.
nlohmann::json small_preset(Framework f, const std::filesystem::path& manifest, const std::filesystem::path& out) {
  auto doc = preset_config(f, manifest.string(), out.string());
  for (auto& [slot, backend] : doc["backends"].items()) backend["dim"] = slot == "visual" ? 24 : 40;
  if (doc["model"]["type"] == "mlp") {
    doc["model"]["hidden_dims"] = {32, 8};
    doc["model"]["epochs"] = 30;
  }
  return doc;
}

ExperimentConfig write_and_load(const nlohmann::json& doc, const std::filesystem::path& path) {
  write_file_text(path, doc.dump(2));
  return load_config(path);
}

RunContext quiet() {
  RunContext ctx;
  ctx.log = [](const std::string&) {};
  return ctx;
}

RunContext capturing(std::vector<std::string>& lines) {
  RunContext ctx;
  ctx.log = [&lines](const std::string& s) { lines.push_back(s); };
  return ctx;
}

}  // namespace

TEST(Config, ShippedPresetsValidateAndMatchGenerator) {
  const std::filesystem::path presets = std::filesystem::path(VIDRISK_SOURCE_DIR) / "presets";
  for (Framework f : {Framework::kFusionClassifier, Framework::kTextSvmCrossValidation, Framework::kFusionRegressor}) {
    const auto name = std::string(framework_name(f));
    const auto path = presets / (name + ".json");
    const auto result = validate_config_file(path);
    EXPECT_TRUE(result.ok()) << name << ": " << (result.violations.empty() ? "" : result.violations.front());
    EXPECT_TRUE(result.warnings.empty()) << name;
    const auto shipped = nlohmann::json::parse(read_file_text(path));
    EXPECT_EQ(shipped, preset_config(f, "demo/manifest.jsonl", "../runs/" + name)) << name;
  }
}

TEST(Config, PresetShapes) {
  TempDir dir;
  write_demo_dataset(dir.path(), {20, 1});
  const auto m = dir / "manifest.jsonl";
  const auto f1 = write_and_load(preset_config(Framework::kFusionClassifier, m.string(), "out"), dir / "f1.json");
  const auto& mlp = std::get<MlpConfig>(f1.model);
  EXPECT_EQ(mlp.head, MlpHead::kBinaryClassifier);
  EXPECT_EQ(mlp.input_dim, 512u + 1536u);
  EXPECT_EQ(mlp.hidden_dims, (std::vector<std::size_t>{256, 64}));
  EXPECT_DOUBLE_EQ(mlp.dropout_rate, 0.3);
  EXPECT_DOUBLE_EQ(mlp.learning_rate, 1e-3);
  EXPECT_EQ(mlp.epochs, 100u);
  EXPECT_EQ(mlp.batch_size, 16u);
  EXPECT_DOUBLE_EQ(f1.split->test_fraction, 0.1);
  EXPECT_EQ(f1.frame_count, 50u);

  const auto f2 = write_and_load(preset_config(Framework::kTextSvmCrossValidation, m.string(), "out"), dir / "f2.json");
  EXPECT_EQ(f2.features, FeatureSet::kText);
  EXPECT_EQ(f2.cv->k, 10u);
  const auto& svm = std::get<SvmConfig>(f2.model);
  EXPECT_EQ(svm.kernel, SvmKernel::kRbf);
  EXPECT_DOUBLE_EQ(svm.regularization_c, 1.0);
  EXPECT_FALSE(svm.kernel_width.has_value());

  const auto f3 = write_and_load(preset_config(Framework::kFusionRegressor, m.string(), "out"), dir / "f3.json");
  EXPECT_EQ(std::get<MlpConfig>(f3.model).head, MlpHead::kRegressor);
  EXPECT_EQ(std::get<MlpConfig>(f3.model).input_dim, 512u + 768u);
}

TEST(Config, Violations) {
  TempDir dir;
  write_demo_dataset(dir.path(), {20, 1});
  const auto base = preset_config(Framework::kFusionClassifier, (dir / "manifest.jsonl").string(), "out");

  auto doc = base;
  doc["threshold"] = 11;
  EXPECT_TRUE(has_violation(validate_config(doc, dir.path()), "threshold outside rating scale [0,10]"));

  doc = base;
  doc["cv"] = {{"k", 10}};
  EXPECT_TRUE(has_violation(validate_config(doc, dir.path()), "both split and cv present"));

  doc = base;
  doc.erase("split");
  EXPECT_TRUE(has_violation(validate_config(doc, dir.path()), "one of split or cv is required"));

  doc = base;
  doc["colour"] = "red";
  EXPECT_TRUE(has_violation(validate_config(doc, dir.path()), "colour"));

  doc = base;
  doc["model"]["input_dim"] = 7;
  EXPECT_TRUE(has_violation(validate_config(doc, dir.path()), "model.input_dim"));

  doc = base;
  doc["model"]["epochs"] = 0;
  EXPECT_TRUE(has_violation(validate_config(doc, dir.path()), "epochs"));

  doc = base;
  doc["model"]["seed"] = 3;
  EXPECT_TRUE(has_violation(validate_config(doc, dir.path()), "model.seed"));

  doc = preset_config(Framework::kFusionRegressor, (dir / "manifest.jsonl").string(), "out");
  doc.erase("split");
  doc["cv"] = {{"k", 5}};
  EXPECT_TRUE(has_violation(validate_config(doc, dir.path()), "regressor"));

  doc = base;
  doc.erase("split");
  doc["cv"] = {{"k", 50}};
  EXPECT_TRUE(has_violation(validate_config(doc, dir.path()), "cv.k"));

  doc = base;
  doc["manifest_path"] = "nowhere.jsonl";
  EXPECT_TRUE(has_violation(validate_config(doc, dir.path()), "not found"));

  doc = base;
  doc["backends"]["text"]["token"] = "secret";
  EXPECT_FALSE(validate_config(doc, dir.path()).ok());

  // Every violation is reported at once.
  doc = base;
  doc["threshold"] = -1;
  doc["cv"] = {{"k", 10}};
  EXPECT_GE(validate_config(doc, dir.path()).violations.size(), 2u);
  EXPECT_TRUE(validate_config(base, dir.path()).ok());
}

TEST(Config, MissingMediaIsAWarning) {
  TempDir dir;
  write_demo_dataset(dir.path(), {20, 1});
  std::filesystem::remove(dir / "media/demo_003.synvid");
  const auto result =
      validate_config(preset_config(Framework::kFusionClassifier, (dir / "manifest.jsonl").string(), "out"), dir.path());
  EXPECT_TRUE(result.ok());
  ASSERT_EQ(result.warnings.size(), 1u);
  EXPECT_NE(result.warnings[0].find("demo_003"), std::string::npos);
}

TEST(Config, FileLoadingAndOverrides) {
  TempDir dir;
  write_demo_dataset(dir.path(), {20, 1});
  write_file_text(dir / "bad.json", "{not json");
  EXPECT_FALSE(validate_config_file(dir / "bad.json").ok());
  EXPECT_EQ(error_code_of([&] { validate_config_file(dir / "none.json"); }), ErrorCode::kIo);
  EXPECT_EQ(error_code_of([&] { load_config(dir / "bad.json"); }), ErrorCode::kConfig);

  write_file_text(dir / "f1.json", preset_config(Framework::kFusionClassifier, "manifest.jsonl", "out").dump());
  const auto config = load_config(dir / "f1.json", {7, std::string("elsewhere"), 3});
  EXPECT_EQ(config.seed, 7u);
  EXPECT_EQ(std::get<MlpConfig>(config.model).seed, 7u);
  EXPECT_EQ(config.output_path(), dir / "elsewhere");
  EXPECT_EQ(config.workers, 3u);
  EXPECT_EQ(config.manifest_file(), dir / "manifest.jsonl");
  EXPECT_EQ((ConfigOverrides{7, std::nullopt, 3}).describe(), (std::vector<std::string>{"seed=7", "workers=3"}));
}

TEST(Config, HashIsStableAndSensitive) {
  TempDir dir;
  write_demo_dataset(dir.path(), {20, 1});
  const auto doc = preset_config(Framework::kFusionClassifier, "manifest.jsonl", "out");
  const auto a = *validate_config(doc, dir.path()).config;
  const auto b = *validate_config(doc, dir.path()).config;
  EXPECT_EQ(config_hash(a), config_hash(b));
  auto changed = doc;
  changed["seed"] = 43;
  EXPECT_NE(config_hash(a), config_hash(*validate_config(changed, dir.path()).config));
}

TEST(Embed, HundredVideosThreeCachesEachAndIdempotent) {
  TempDir dir;
  write_demo_dataset(dir.path(), {100, 2});
  const auto config = write_and_load(
      small_preset(Framework::kFusionClassifier, dir / "manifest.jsonl", dir / "out"), dir / "f1.json");
  const auto first = run_embed(config, quiet());
  EXPECT_TRUE(first.failures.empty());
  EXPECT_EQ(first.computed, 300u);
  EXPECT_EQ(count_files(config.cache_path(), ".vemb"), 300u);
  EXPECT_EQ(count_files(config.cache_path(), ".meta.jsonl"), 100u);

  const auto before = std::filesystem::last_write_time(config.cache_path() / "demo_000.text.vemb");
  std::vector<std::string> log;
  const auto second = run_embed(config, capturing(log));
  EXPECT_EQ(second.computed, 0u);
  EXPECT_EQ(second.skipped, 300u);
  EXPECT_EQ(std::filesystem::last_write_time(config.cache_path() / "demo_000.text.vemb"), before);
  std::size_t skipped_lines = 0;
  for (const auto& line : log) skipped_lines += line.find("skipped") != std::string::npos;
  EXPECT_GE(skipped_lines, 100u);
}

TEST(Embed, CacheContentsMatchDirectComputation) {
  TempDir dir;
  const auto entries = write_demo_dataset(dir.path(), {6, 3});
  const auto config = write_and_load(
      small_preset(Framework::kFusionClassifier, dir / "manifest.jsonl", dir / "out"), dir / "f1.json");
  run_embed(config, quiet());
  const auto& e = entries[2];
  const auto label = to_alert_label(aggregate_rating(e.ratings));
  MockBackend visual(Modality::kVisual, 24, 1, "mock-visual");
  auto source = open_frame_source(dir / e.media_path);
  const auto frames = extract_frames(*source, sample_indices({e.segment_start_frame, e.segment_end_frame}, 50));
  const double s = label == AlertLabel::kHighAlert ? 1.0 : -1.0;
  const auto stack = embed_frames(visual, frames, {e.video_id, s});
  const auto cached = cache_read_stack(config.cache_path() / (e.video_id + ".frames.vemb"));
  ASSERT_EQ(cached.size(), 50u);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(cached[i], stack[i]);
  EXPECT_EQ(cache_read_vector(config.cache_path() / (e.video_id + ".video.vemb"), EmbeddingKind::kVideoPooled),
            pool_frames(stack));
  const auto sidecar = read_sidecar(config.cache_path() / (e.video_id + ".meta.jsonl"));
  ASSERT_EQ(sidecar.size(), 3u);
  EXPECT_EQ(sidecar[0].backend_id, "mock-visual");
}

TEST(Embed, ConfigChangeRecomputes) {
  TempDir dir;
  write_demo_dataset(dir.path(), {8, 3});
  auto doc = small_preset(Framework::kFusionClassifier, dir / "manifest.jsonl", dir / "out");
  run_embed(write_and_load(doc, dir / "f1.json"), quiet());
  doc["backends"]["text"]["salt"] = 99;
  const auto again = run_embed(write_and_load(doc, dir / "f1.json"), quiet());
  EXPECT_EQ(again.computed, 8u);
  EXPECT_EQ(again.skipped, 16u);
  doc["frames"]["count"] = 10;
  const auto third = run_embed(write_and_load(doc, dir / "f1.json"), quiet());
  EXPECT_EQ(third.computed, 16u);
  EXPECT_EQ(cache_read_stack(dir / "out/cache/demo_000.frames.vemb").size(), 10u);
}

TEST(Embed, MissingMediaIsolatedPerVideo) {
  TempDir dir;
  write_demo_dataset(dir.path(), {10, 4});
  std::filesystem::remove(dir / "media/demo_004.synvid");
  const auto config = write_and_load(
      small_preset(Framework::kFusionClassifier, dir / "manifest.jsonl", dir / "out"), dir / "f1.json");
  const auto summary = run_embed(config, quiet());
  ASSERT_EQ(summary.failures.size(), 1u);
  EXPECT_EQ(summary.failures[0].video_id, "demo_004");
  EXPECT_NE(summary.failures[0].message.find("demo_004"), std::string::npos);
  EXPECT_EQ(count_files(config.cache_path(), ".video.vemb"), 9u);
  EXPECT_EQ(error_code_of([&] { run_train(config, quiet()); }), ErrorCode::kMissingCache);
}

TEST(Embed, ParallelWorkersProduceIdenticalCaches) {
  TempDir dir;
  write_demo_dataset(dir.path(), {12, 5});
  auto doc = small_preset(Framework::kFusionClassifier, dir / "manifest.jsonl", dir / "serial");
  doc["workers"] = 1;
  run_embed(write_and_load(doc, dir / "a.json"), quiet());
  doc["workers"] = 4;
  doc["output_dir"] = (dir / "parallel").string();
  run_embed(write_and_load(doc, dir / "b.json"), quiet());
  for (const auto& e : std::filesystem::directory_iterator(dir / "serial/cache")) {
    EXPECT_EQ(read_file_bytes(e.path()), read_file_bytes(dir / "parallel/cache" / e.path().filename()))
        << e.path().filename();
  }
}

TEST(Embed, FramePlanExport) {
  TempDir dir;
  write_demo_dataset(dir.path(), {10, 6});
  const auto config = write_and_load(
      small_preset(Framework::kFusionClassifier, dir / "manifest.jsonl", dir / "out"), dir / "f1.json");
  run_embed(config, quiet());
  EXPECT_FALSE(std::filesystem::exists(dir / "out/frame_plans.jsonl"));
  run_embed(config, quiet(), true);
  const auto text = read_file_text(dir / "out/frame_plans.jsonl");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
  const auto first = nlohmann::json::parse(text.substr(0, text.find('\n')));
  EXPECT_EQ(first["indices"].size(), 50u);
}

TEST(Embed, UnreachableHttpBackendNamesBackend) {
  TempDir dir;
  write_demo_dataset(dir.path(), {3, 6});
  auto doc = small_preset(Framework::kTextSvmCrossValidation, dir / "manifest.jsonl", dir / "out");
  doc["cv"]["k"] = 2;
  doc["backends"]["text"] = {{"type", "http"}, {"backend_id", "remote-text"}, {"dim", 8},
                             {"url", "http://127.0.0.1:9"}, {"timeout_seconds", 1}};
  const auto summary = run_embed(write_and_load(doc, dir / "f2.json"), quiet());
  ASSERT_EQ(summary.failures.size(), 3u);
  EXPECT_NE(summary.failures[0].message.find("remote-text"), std::string::npos);
}

class Pipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    write_demo_dataset(dir_->path(), {60, 11});
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static std::filesystem::path dir() { return dir_->path(); }

  ExperimentConfig prepared(Framework f, const std::string& tag) {
    const auto config = write_and_load(small_preset(f, dir() / "manifest.jsonl", dir() / tag), dir() / (tag + ".json"));
    run_embed(config, quiet());
    return config;
  }

  static TempDir* dir_;
};

TempDir* Pipeline::dir_ = nullptr;

TEST_F(Pipeline, TrainFrameworkOneGivesBinaryArtifact) {
  const auto config = prepared(Framework::kFusionClassifier, "f1");
  const auto outcome = run_train(config, quiet());
  EXPECT_EQ(outcome.artifact.kind(), ModelKind::kMlpBinary);
  EXPECT_EQ(outcome.artifact.feature_kind(), EmbeddingKind::kFused);
  ASSERT_EQ(outcome.artifact.backends.size(), 2u);
  EXPECT_EQ(outcome.split.test_ids.size(), 6u);
  for (const char* f : {"model.vmdl", "training_log.json", "split.json", "run_record.train.json"}) {
    EXPECT_TRUE(std::filesystem::exists(config.output_path() / f)) << f;
  }
  const auto record = nlohmann::json::parse(read_file_text(config.output_path() / "run_record.train.json"));
  EXPECT_EQ(record["config_hash"], config_hash(config));
  EXPECT_EQ(record["config"], to_json(config));
  EXPECT_TRUE(record.contains("started_at"));
  EXPECT_TRUE(record["input_hashes"].contains("manifest"));
  EXPECT_EQ(record["tool_version"], std::string(kToolVersion));
}

TEST_F(Pipeline, TrainIsDeterministic) {
  const auto config = prepared(Framework::kFusionClassifier, "f1_det");
  const auto a = read_file_bytes(run_train(config, quiet()).artifact_path);
  const auto b = read_file_bytes(run_train(config, quiet()).artifact_path);
  EXPECT_EQ(sha256_hex(a), sha256_hex(b));
}

TEST_F(Pipeline, EvaluateSeparableRunScoresOne) {
  const auto config = prepared(Framework::kFusionClassifier, "f1_eval");
  const auto trained = run_train(config, quiet());
  const auto outcome = run_evaluate(config, trained.artifact_path, quiet(), true);
  EXPECT_DOUBLE_EQ(*outcome.metrics.accuracy, 1.0);
  EXPECT_TRUE(std::filesystem::exists(config.output_path() / "confusion.csv"));
  EXPECT_TRUE(std::filesystem::exists(config.output_path() / "confusion.svg"));
  const auto report = nlohmann::json::parse(read_file_text(outcome.report_path));
  EXPECT_EQ(report["config"], to_json(config));
  EXPECT_EQ(report["seed"], config.seed);
  EXPECT_EQ(report["predictions"].size(), 6u);
  EXPECT_FALSE(report.dump().find("started_at") != std::string::npos);

  const auto first = read_file_bytes(outcome.report_path);
  run_evaluate(config, trained.artifact_path, quiet());
  EXPECT_EQ(read_file_bytes(outcome.report_path), first);
}

TEST_F(Pipeline, RegressorReportHasErrorsNoConfusion) {
  const auto config = prepared(Framework::kFusionRegressor, "f3");
  const auto trained = run_train(config, quiet());
  EXPECT_EQ(trained.artifact.kind(), ModelKind::kMlpRegressor);
  const auto outcome = run_evaluate(config, trained.artifact_path, quiet());
  const auto report = nlohmann::json::parse(read_file_text(outcome.report_path));
  EXPECT_TRUE(report["metrics"].contains("mse"));
  EXPECT_TRUE(report["metrics"].contains("mae"));
  EXPECT_FALSE(report["metrics"].contains("confusion"));
  EXPECT_FALSE(std::filesystem::exists(config.output_path() / "confusion.csv"));
  for (const auto& p : report["predictions"]) {
    EXPECT_GE(p["predicted_score"].get<double>(), 0.0);
    EXPECT_LE(p["predicted_score"].get<double>(), 10.0);
  }
}

TEST_F(Pipeline, FrameworksOneAndThreeShareTheSplit) {
  const auto f1 = prepared(Framework::kFusionClassifier, "share1");
  const auto f3 = prepared(Framework::kFusionRegressor, "share3");
  const auto data = load_dataset(f1);
  EXPECT_EQ(split_for(f1, data), split_for(f3, load_dataset(f3)));
}

TEST_F(Pipeline, EvaluateRejectsMismatchedArtifact) {
  const auto f1 = prepared(Framework::kFusionClassifier, "mm1");
  const auto f3 = prepared(Framework::kFusionRegressor, "mm3");
  const auto regressor = run_train(f3, quiet());
  EXPECT_EQ(error_code_of([&] { run_evaluate(f1, regressor.artifact_path, quiet()); }), ErrorCode::kKindMismatch);
  auto doc = small_preset(Framework::kFusionClassifier, dir() / "manifest.jsonl", dir() / "mm1");
  doc["features"] = "visual";
  doc["backends"].erase("text");
  const auto visual_only = write_and_load(doc, dir() / "mm1v.json");
  const auto classifier = run_train(f1, quiet());
  EXPECT_EQ(error_code_of([&] { run_evaluate(visual_only, classifier.artifact_path, quiet()); }),
            ErrorCode::kKindMismatch);
}

TEST_F(Pipeline, CrossvalTenFolds) {
  const auto config = prepared(Framework::kTextSvmCrossValidation, "f2");
  std::vector<std::string> log;
  const auto outcome = run_crossval(config, capturing(log));
  EXPECT_EQ(outcome.report.folds.size(), 10u);
  double sum = 0;
  for (const auto& f : outcome.report.folds) sum += *f.metrics->accuracy;
  EXPECT_DOUBLE_EQ(outcome.report.mean_accuracy, sum / 10);
  const auto csv = read_file_text(config.output_path() / "cv_folds.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
  const auto doc = nlohmann::json::parse(read_file_text(outcome.report_path));
  EXPECT_EQ(doc["cross_validation"]["folds"].size(), 10u);

  std::string assignment_line;
  for (const auto& l : log) {
    if (l.find("fold assignment") != std::string::npos) assignment_line = l;
  }
  ASSERT_FALSE(assignment_line.empty());
  auto other = small_preset(Framework::kTextSvmCrossValidation, dir() / "manifest.jsonl", dir() / "f2");
  other["seed"] = 7;
  std::vector<std::string> log2;
  const auto reseeded = run_crossval(write_and_load(other, dir() / "f2b.json"), capturing(log2));
  EXPECT_NE(reseeded.assignment.fold_of, outcome.assignment.fold_of);
  std::string assignment_line2;
  for (const auto& l : log2) {
    if (l.find("fold assignment") != std::string::npos) assignment_line2 = l;
  }
  EXPECT_NE(assignment_line, assignment_line2);
}

TEST_F(Pipeline, CrossvalRetainsFoldArtifacts) {
  auto doc = small_preset(Framework::kTextSvmCrossValidation, dir() / "manifest.jsonl", dir() / "f2r");
  doc["cv"]["k"] = 3;
  doc["cv"]["retain_artifacts"] = true;
  doc["cv"]["scope"] = "train";
  const auto config = write_and_load(doc, dir() / "f2r.json");
  run_embed(config, quiet());
  const auto outcome = run_crossval(config, quiet());
  for (int f = 0; f < 3; ++f) {
    const auto path = config.output_path() / ("fold" + std::to_string(f) + ".vmdl");
    EXPECT_EQ(deserialize_artifact(path).kind(), ModelKind::kSvm);
  }
  EXPECT_EQ(outcome.document["holdout_test_ids"].size(), 6u);
  std::size_t tested = 0;
  for (const auto& f : outcome.report.folds) tested += f.test_ids.size();
  EXPECT_EQ(tested, 54u);
}

TEST_F(Pipeline, ReplicateDryRunFlagsMockBackends) {
  ReplicationRequest req;
  req.manifest = dir() / "manifest.jsonl";
  req.output_dir = dir() / "replicate";
  req.backends = {{"visual", {{"type", "mock"}, {"backend_id", "v"}, {"dim", 16}, {"salt", 1}, {"class_signal", 1.0}}},
                  {"text", {{"type", "mock"}, {"backend_id", "t"}, {"dim", 24}, {"salt", 2}, {"class_signal", 1.0}}}};
  req.model_overrides = {{"epochs", 10}, {"hidden_dims", {16}}};
  req.workers = 2;
  const auto rows = run_replicate(req, quiet());
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& r : rows) EXPECT_EQ(r.note, "reference not comparable: mock backend");
  EXPECT_EQ(rows[0].reference, 0.85);
  EXPECT_EQ(rows[1].reference, 0.79);
  EXPECT_EQ(rows[4].reference, 0.43);
  const auto table = format_replication_table(rows);
  EXPECT_NE(table.find("framework3"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(req.output_dir / "replicate.csv"));
  EXPECT_TRUE(std::filesystem::exists(req.output_dir / "framework2/cv_report.json"));
}

TEST(Replicate, MissingInputsListRequirements) {
  ReplicationRequest req;
  req.manifest = "/nonexistent/manifest.jsonl";
  const auto message = testkit::error_message_of([&] { run_replicate(req, quiet()); });
  EXPECT_EQ(error_code_of([&] { run_replicate(req, quiet()); }), ErrorCode::kConfig);
  EXPECT_NE(message.find("manifest"), std::string::npos);
  EXPECT_NE(message.find("backends"), std::string::npos);
}
