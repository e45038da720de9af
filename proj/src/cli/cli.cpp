// Copyright 2026 The emocert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emocert/cli/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "emocert/augment/augment.hpp"
#include "emocert/cert/report.hpp"
#include "emocert/core/error.hpp"
#include "emocert/data/analysis.hpp"
#include "emocert/data/fixture.hpp"
#include "emocert/data/manifest.hpp"
#include "emocert/data/manifest_ops.hpp"
#include "emocert/metrics/metrics.hpp"
#include "emocert/nn/inference.hpp"
#include "emocert/nn/model_io.hpp"
#include "emocert/nn/trainer.hpp"

namespace emocert::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Common {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool progress = false;

  std::size_t Threads() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

void AddCommon(CLI::App* cmd, Common& common) {
  cmd->add_option("--seed", common.seed, "Random seed (default 0)");
  cmd->add_option("--threads", common.threads,
                  "Worker threads; 0 uses all cores. Outputs do not depend on it")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--progress", common.progress,
                "Write machine-readable JSON progress lines to stderr");
}

class Progress {
 public:
  Progress(std::ostream& err, bool enabled, std::string command)
      : err_(err), enabled_(enabled), command_(std::move(command)) {}

  void Emit(Json fields) const {
    if (!enabled_) return;
    Json line;
    line["command"] = command_;
    for (auto& item : fields.items()) line[item.key()] = item.value();
    err_ << line.dump() << '\n' << std::flush;
  }

 private:
  std::ostream& err_;
  bool enabled_;
  std::string command_;
};

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void RefuseOverwrite(const fs::path& input, const fs::path& output) {
  if (fs::exists(output) && fs::equivalent(input, output)) {
    throw InvalidArgument("refusing to overwrite input " + input.string());
  }
}

void SaveManifestTo(const data::Manifest& manifest, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  data::SaveManifest(manifest, path);
}

template <std::size_t N>
std::array<double, N> ParseFractions(const std::string& text, const char* what) {
  std::array<double, N> out{};
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= N) break;
    try {
      out[i++] = std::stod(item);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  if (i != N || std::getline(ss, item, ',')) {
    throw InvalidArgument(std::string(what) + " needs " + std::to_string(N) +
                          " comma-separated fractions");
  }
  return out;
}

// "attribute=group:sigma"
data::NoiseBias ParseBias(const std::string& text) {
  const auto eq = text.find('=');
  const auto colon = text.rfind(':');
  if (eq == std::string::npos || colon == std::string::npos || colon < eq) {
    throw InvalidArgument("--bias expects attribute=group:sigma, got '" + text + "'");
  }
  const auto attribute = data::ParseAttribute(text.substr(0, eq));
  if (!attribute) throw InvalidArgument("--bias: unknown attribute '" + text.substr(0, eq) + "'");
  data::NoiseBias bias;
  bias.attribute = *attribute;
  bias.group = text.substr(eq + 1, colon - eq - 1);
  try {
    bias.extra_sigma = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw InvalidArgument("--bias: bad sigma in '" + text + "'");
  }
  return bias;
}

std::optional<data::Split> ParseSplitOption(const std::string& text) {
  if (text == "all") return std::nullopt;
  const auto split = data::Parse<data::Split>(text);
  if (!split) throw InvalidArgument("unknown split '" + text + "' (train, val, test, all)");
  return split;
}

const CLI::Validator kArchNames = CLI::IsMember({"baseline", "enhanced"});

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"emocert: train, evaluate and certify emotion classifiers", "emocert"};
  app.set_version_flag("--version", std::string(cert::ToolkitVersion()));
  app.require_subcommand(1);

  // fixture gen
  Common fixture_common;
  struct {
    fs::path out, images_dir;
    std::size_t n_per_class = 500;
    double noise_sigma = 12.0;
    std::string gender_mix, race_mix, age_mix, bias;
  } fx;
  auto* fixture = app.add_subcommand("fixture", "Synthetic desk-scale datasets");
  fixture->require_subcommand(1);
  auto* fixture_gen = fixture->add_subcommand("gen", "Generate a labelled synthetic fixture");
  AddCommon(fixture_gen, fixture_common);
  fixture_gen->add_option("--out", fx.out, "Manifest to write (JSONL)")->required();
  fixture_gen->add_option("--images-dir", fx.images_dir, "Directory for the PGM images")
      ->required();
  fixture_gen->add_option("--n-per-class", fx.n_per_class, "Originals per emotion")
      ->check(CLI::PositiveNumber);
  fixture_gen->add_option("--noise-sigma", fx.noise_sigma, "Pixel noise sigma (8-bit scale)");
  fixture_gen->add_option("--gender-mix", fx.gender_mix, "male,female,unsure fractions");
  fixture_gen->add_option("--race-mix", fx.race_mix,
                          "caucasian,african_american,asian fractions");
  fixture_gen->add_option("--age-mix", fx.age_mix, "0-3,4-19,20-39,40-69,70+ fractions");
  fixture_gen->add_option("--bias", fx.bias,
                          "Extra noise for one group, as attribute=group:sigma");

  // dataset analyze | rebalance | split | augment
  auto* dataset = app.add_subcommand("dataset", "Manifest inspection and transformation");
  dataset->require_subcommand(1);
  Common ds_common;
  struct {
    fs::path manifest, out, images_dir, out_images_dir;
    std::string emotion;
    double keep_fraction = 1.0;
    double train = 0.8, val = 0.1, test = 0.1;
  } ds;
  auto* analyze = dataset->add_subcommand("analyze", "Composition report (JSON)");
  analyze->add_option("--manifest", ds.manifest, "Input manifest")->required();
  analyze->add_option("--out", ds.out, "Report path (default: stdout)");
  auto* rebalance =
      dataset->add_subcommand("rebalance", "Keep a fraction of one emotion's originals");
  AddCommon(rebalance, ds_common);
  rebalance->add_option("--manifest", ds.manifest, "Input manifest")->required();
  rebalance->add_option("--emotion", ds.emotion, "Class to thin out")
      ->required()
      ->check(CLI::IsMember({"anger", "fear", "calm", "surprise"}));
  rebalance->add_option("--keep-fraction", ds.keep_fraction, "Fraction in (0, 1] to keep")
      ->required();
  rebalance->add_option("--out", ds.out, "Output manifest")->required();
  auto* split = dataset->add_subcommand("split", "Stratified train/val/test assignment");
  AddCommon(split, ds_common);
  split->add_option("--manifest", ds.manifest, "Input manifest")->required();
  split->add_option("--out", ds.out, "Output manifest")->required();
  split->add_option("--train", ds.train, "Train fraction (default 0.8)");
  split->add_option("--val", ds.val, "Validation fraction (default 0.1)");
  split->add_option("--test", ds.test, "Test fraction (default 0.1)");
  auto* augment_cmd =
      dataset->add_subcommand("augment", "Add the ten augmented variants of every original");
  AddCommon(augment_cmd, ds_common);
  augment_cmd->add_option("--manifest", ds.manifest, "Input manifest (originals only)")
      ->required();
  augment_cmd->add_option("--images-dir", ds.images_dir, "Input image directory")->required();
  augment_cmd->add_option("--out", ds.out, "Output manifest")->required();
  augment_cmd
      ->add_option("--out-images-dir", ds.out_images_dir,
                   "Output image directory (default: --images-dir)");

  // train
  Common train_common;
  struct {
    fs::path manifest, images_dir, model, history;
    std::string arch = "enhanced";
    std::optional<std::size_t> epochs, batch_size, samples_per_epoch, patience;
    std::optional<double> lr;
    bool originals_only = false;
  } tr;
  auto* train = app.add_subcommand("train", "Train a model on the train split");
  AddCommon(train, train_common);
  train->add_option("--manifest", tr.manifest, "Manifest with train and val splits")
      ->required();
  train->add_option("--images-dir", tr.images_dir, "Image directory")->required();
  train->add_option("--arch", tr.arch, "baseline or enhanced (default enhanced)")
      ->check(kArchNames);
  train->add_option("--model", tr.model, "Weights file to write")->required();
  train->add_option("--history", tr.history, "Per-epoch history CSV to write");
  train->add_option("--epochs", tr.epochs, "Maximum epochs (default 100)")
      ->check(CLI::PositiveNumber);
  train->add_option("--batch-size", tr.batch_size, "Batch size (default 64)")
      ->check(CLI::PositiveNumber);
  train->add_option("--samples-per-epoch", tr.samples_per_epoch,
                    "Training draws per epoch (default: train split size)")
      ->check(CLI::PositiveNumber);
  train->add_option("--patience", tr.patience, "Early-stopping patience in epochs")
      ->check(CLI::PositiveNumber);
  train->add_option("--lr", tr.lr, "Base learning rate")->check(CLI::PositiveNumber);
  train->add_flag("--train-originals-only", tr.originals_only,
                  "Train on non-augmented samples of the train split only");

  // evaluate
  Common eval_common;
  struct {
    fs::path manifest, images_dir, model, out;
    std::string split = "test";
    bool originals_only = false;
  } ev;
  auto* evaluate = app.add_subcommand("evaluate", "Write prediction records for a split");
  AddCommon(evaluate, eval_common);
  evaluate->add_option("--manifest", ev.manifest, "Manifest")->required();
  evaluate->add_option("--images-dir", ev.images_dir, "Image directory")->required();
  evaluate->add_option("--model", ev.model, "Weights file")->required();
  evaluate->add_option("--out", ev.out, "Prediction records to write (JSONL)")->required();
  evaluate->add_option("--split", ev.split, "train, val, test or all (default test)");
  evaluate->add_flag("--originals-only", ev.originals_only, "Skip augmented samples");

  // metrics
  struct {
    fs::path predictions, out, train_predictions, confusion_csv;
    std::optional<double> train_accuracy, robustness_floor;
    std::size_t min_group_n = metrics::kDefaultMinGroupN;
  } mt;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compute the metrics bundle (JSON)");
  metrics_cmd->add_option("--predictions", mt.predictions, "Prediction records")->required();
  metrics_cmd->add_option("--out", mt.out, "Bundle path (default: stdout)");
  auto* m_train_acc = metrics_cmd->add_option("--train-accuracy", mt.train_accuracy,
                                              "Training accuracy for the train-test gap");
  metrics_cmd
      ->add_option("--train-predictions", mt.train_predictions,
                   "Prediction records on the training split, for the train-test gap")
      ->excludes(m_train_acc);
  metrics_cmd->add_option("--min-group-n", mt.min_group_n, "Smallest group counted in gaps")
      ->check(CLI::PositiveNumber);
  metrics_cmd->add_option("--robustness-floor", mt.robustness_floor,
                          "Flag augmentation tags below this accuracy");
  metrics_cmd->add_option("--confusion-csv", mt.confusion_csv, "Also write the confusion matrix");

  // certify
  struct {
    fs::path profile, predictions, metrics, train_predictions, out;
    std::optional<double> train_accuracy;
    std::string format = "human_readable";
    std::string pin_timestamp;
  } ce;
  auto* certify = app.add_subcommand(
      "certify", "Check metrics against a profile; exit 0 only if every dimension passes");
  certify->add_option("--profile", ce.profile, "Certification profile (JSON)")->required();
  certify->add_option("--predictions", ce.predictions,
                                     "Prediction records (digest always embedded)");
  certify->add_option(
      "--metrics", ce.metrics, "Precomputed metrics bundle; otherwise computed from --predictions");
  auto* c_train_acc =
      certify->add_option("--train-accuracy", ce.train_accuracy, "Training accuracy");
  certify->add_option("--train-predictions", ce.train_predictions, "Training-split records")
      ->excludes(c_train_acc);
  certify->add_option("--out", ce.out, "Report path (default: stdout)");
  certify->add_option("--format", ce.format, "structured or human_readable")
      ->check(CLI::IsMember({"structured", "human_readable"}));
  certify->add_option("--pin-timestamp", ce.pin_timestamp,
                      "Use this timestamp instead of the current time");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return e.get_exit_code() == 0 ? code : kExitUsage;
  }

  try {
    if (fixture_gen->parsed()) {
      const Progress progress(err, fixture_common.progress, "fixture gen");
      data::FixtureConfig config;
      config.n_per_class = fx.n_per_class;
      config.noise_sigma = fx.noise_sigma;
      config.seed = fixture_common.seed;
      if (!fx.gender_mix.empty()) config.mix.gender = ParseFractions<3>(fx.gender_mix, "--gender-mix");
      if (!fx.race_mix.empty()) config.mix.race = ParseFractions<3>(fx.race_mix, "--race-mix");
      if (!fx.age_mix.empty()) config.mix.age_group = ParseFractions<5>(fx.age_mix, "--age-mix");
      if (!fx.bias.empty()) config.bias = ParseBias(fx.bias);
      fs::create_directories(fx.images_dir);
      const auto manifest = data::GenerateFixture(config, fx.images_dir, fixture_common.Threads());
      SaveManifestTo(manifest, fx.out);
      progress.Emit({{"event", "done"}, {"samples", manifest.samples.size()}});
      out << "wrote " << manifest.samples.size() << " samples to " << fx.out.string() << "\n";
      return kExitOk;
    }
    if (analyze->parsed()) {
      const auto report = data::AnalyzeDataset(data::LoadManifest(ds.manifest));
      const std::string text = data::ToJson(report).dump(2) + "\n";
      if (ds.out.empty()) {
        out << text;
      } else {
        WriteText(ds.out, text);
      }
      return kExitOk;
    }
    if (rebalance->parsed()) {
      RefuseOverwrite(ds.manifest, ds.out);
      core::Rng rng(core::DeriveSeed(ds_common.seed, "rebalance"));
      const auto result = data::RebalanceClass(data::LoadManifest(ds.manifest),
                                               *data::Parse<data::Emotion>(ds.emotion),
                                               ds.keep_fraction, rng);
      if (result.warning) err << "warning: " << *result.warning << "\n";
      SaveManifestTo(result.manifest, ds.out);
      out << "kept " << result.originals_kept << " of " << result.originals_before << " "
          << ds.emotion << " originals\n";
      return kExitOk;
    }
    if (split->parsed()) {
      RefuseOverwrite(ds.manifest, ds.out);
      core::Rng rng(core::DeriveSeed(ds_common.seed, "split"));
      const auto manifest =
          data::SplitDataset(data::LoadManifest(ds.manifest), {ds.train, ds.val, ds.test}, rng);
      SaveManifestTo(manifest, ds.out);
      out << "split " << manifest.samples.size() << " samples into " << ds.out.string() << "\n";
      return kExitOk;
    }
    if (augment_cmd->parsed()) {
      RefuseOverwrite(ds.manifest, ds.out);
      const Progress progress(err, ds_common.progress, "dataset augment");
      const fs::path out_images = ds.out_images_dir.empty() ? ds.images_dir : ds.out_images_dir;
      const auto manifest = augment::ExpandDataset(data::LoadManifest(ds.manifest), ds.images_dir,
                                                   out_images, ds_common.seed, ds_common.Threads());
      SaveManifestTo(manifest, ds.out);
      progress.Emit({{"event", "done"}, {"samples", manifest.samples.size()}});
      out << "wrote " << manifest.samples.size() << " samples to " << ds.out.string() << "\n";
      return kExitOk;
    }
    if (train->parsed()) {
      const Progress progress(err, train_common.progress, "train");
      const auto arch = *nn::ParseArch(tr.arch);
      nn::TrainConfig config = nn::DefaultTrainConfig(arch);
      config.seed = train_common.seed;
      if (tr.epochs) config.max_epochs = *tr.epochs;
      if (tr.batch_size) config.batch_size = *tr.batch_size;
      if (tr.samples_per_epoch) config.samples_per_epoch = *tr.samples_per_epoch;
      if (tr.patience) config.patience = *tr.patience;
      if (tr.lr) std::visit([&](auto& o) { o.lr = *tr.lr; }, config.optimizer);
      const auto manifest = data::LoadManifest(tr.manifest);
      std::vector<std::string> skipped;
      const auto train_set = nn::LoadLabeledSet(
          manifest, tr.images_dir, {data::Split::kTrain, tr.originals_only},
          train_common.Threads(), &skipped);
      const auto val_set = nn::LoadLabeledSet(manifest, tr.images_dir, {data::Split::kVal, true},
                                              train_common.Threads(), &skipped);
      for (const auto& s : skipped) err << "warning: skipped " << s << "\n";
      progress.Emit({{"event", "start"},
                     {"arch", tr.arch},
                     {"train_samples", train_set.size()},
                     {"val_samples", val_set.size()}});
      const auto result = nn::Train(config, train_set, val_set, [&](const nn::HistoryRow& row) {
        progress.Emit({{"event", "epoch"},
                       {"epoch", row.epoch},
                       {"train_loss", row.train_loss},
                       {"train_acc", row.train_acc},
                       {"val_loss", row.val_loss},
                       {"val_acc", row.val_acc},
                       {"lr", row.lr}});
      });
      if (tr.model.has_parent_path()) fs::create_directories(tr.model.parent_path());
      nn::SaveModel(result.model, tr.model);
      if (!tr.history.empty()) {
        std::ostringstream csv;
        nn::WriteHistoryCsv(result.history, csv);
        WriteText(tr.history, csv.str());
      }
      progress.Emit({{"event", "done"},
                     {"epochs", result.history.size()},
                     {"best_epoch", result.best_epoch}});
      out << "trained " << tr.arch << " for " << result.history.size()
          << " epochs (best epoch " << result.best_epoch << "), wrote " << tr.model.string()
          << "\n";
      return kExitOk;
    }
    if (evaluate->parsed()) {
      const Progress progress(err, eval_common.progress, "evaluate");
      const auto model = nn::LoadModel(ev.model);
      const auto manifest = data::LoadManifest(ev.manifest);
      const auto result =
          nn::Predict(model, manifest, ev.images_dir,
                      {ParseSplitOption(ev.split), ev.originals_only}, eval_common.Threads());
      for (const auto& s : result.skipped) err << "warning: skipped " << s << "\n";
      if (ev.out.has_parent_path()) fs::create_directories(ev.out.parent_path());
      metrics::SaveRecords(result.records, ev.out);
      progress.Emit({{"event", "done"},
                     {"records", result.records.size()},
                     {"skipped", result.skipped.size()}});
      out << "wrote " << result.records.size() << " prediction records to " << ev.out.string();
      if (!result.skipped.empty()) out << " (" << result.skipped.size() << " images skipped)";
      out << "\n";
      return kExitOk;
    }
    if (metrics_cmd->parsed()) {
      const auto records = metrics::LoadRecords(mt.predictions);
      metrics::BundleOptions options;
      options.min_group_n = mt.min_group_n;
      options.robustness_floor = mt.robustness_floor;
      options.train_accuracy = mt.train_accuracy;
      if (!mt.train_predictions.empty()) {
        options.train_accuracy = metrics::Accuracy(metrics::LoadRecords(mt.train_predictions));
      }
      const auto bundle = metrics::ComputeBundle(records, options);
      const std::string text = metrics::ToJson(bundle).dump(2) + "\n";
      if (mt.out.empty()) {
        out << text;
      } else {
        WriteText(mt.out, text);
      }
      if (!mt.confusion_csv.empty()) WriteText(mt.confusion_csv, metrics::ConfusionCsv(bundle.confusion));
      return kExitOk;
    }
    if (certify->parsed()) {
      if (ce.predictions.empty() && ce.metrics.empty()) {
        err << "certify: one of --predictions or --metrics is required\n";
        return kExitUsage;
      }
      const std::string profile_text = ReadText(ce.profile);
      const auto profile = cert::ParseProfileText(profile_text, ce.profile.string());
      cert::Digests digests;
      metrics::MetricsBundle bundle;
      if (!ce.predictions.empty()) {
        digests.emplace_back("predictions", cert::Sha256File(ce.predictions));
      }
      if (!ce.metrics.empty()) {
        const std::string text = ReadText(ce.metrics);
        digests.emplace_back("metrics", cert::Sha256Hex(text));
        Json doc;
        try {
          doc = Json::parse(text);
        } catch (const Json::parse_error& e) {
          throw FormatError(ce.metrics.string() + ": malformed JSON (" + e.what() + ")");
        }
        bundle = metrics::BundleFromJson(doc);
      } else {
        metrics::BundleOptions options;
        options.min_group_n = profile.fairness.min_group_n;
        options.train_accuracy = ce.train_accuracy;
        if (!ce.train_predictions.empty()) {
          options.train_accuracy =
              metrics::Accuracy(metrics::LoadRecords(ce.train_predictions));
        }
        bundle = metrics::ComputeBundle(metrics::LoadRecords(ce.predictions), options);
      }
      if (!ce.train_predictions.empty()) {
        digests.emplace_back("train_predictions", cert::Sha256File(ce.train_predictions));
      }
      digests.emplace_back("profile", cert::Sha256Hex(profile_text));
      const auto report = cert::BuildReport(
          profile, bundle, std::move(digests),
          ce.pin_timestamp.empty() ? cert::UtcTimestamp() : ce.pin_timestamp);
      const std::string text = cert::RenderReport(report, *cert::ParseReportFormat(ce.format));
      if (ce.out.empty()) {
        out << text;
      } else {
        WriteText(ce.out, text);
      }
      for (const auto& d : report.dimensions) {
        err << cert::DimensionName(d.dimension) << ": " << (d.pass ? "pass" : "fail") << "\n";
      }
      return report.AllDimensionsPass() ? kExitOk : kExitFailure;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace emocert::cli
