#include "tgat/cli/commands.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <set>

#include "CLI11.hpp"
#include "tgat/binary_io.hpp"
#include "tgat/cli/archive.hpp"
#include "tgat/cli/gradcheck_suite.hpp"
#include "tgat/dsp/tgr_io.hpp"
#include "tgat/error.hpp"
#include "tgat/model/checkpoint.hpp"
#include "tgat/numerics/kernels.hpp"
#include "tgat/train/report.hpp"

namespace tgat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Ablation> parse_ablation(const std::string& name) {
  if (name == "none") return {Ablation::none};
  if (name == "no-tdrop") return {Ablation::no_tdrop};
  if (name == "no-tattn") return {Ablation::no_tattn};
  if (name == "no-both") return {Ablation::no_both};
  if (name == "all") return {Ablation::none, Ablation::no_tdrop, Ablation::no_tattn, Ablation::no_both};
  throw ConfigError("--ablation: expected none, no-tdrop, no-tattn, no-both or all, got '" + name + "'");
}

std::string ablation_name(Ablation a) {
  switch (a) {
    case Ablation::none: return "none";
    case Ablation::no_tdrop: return "no-tdrop";
    case Ablation::no_tattn: return "no-tattn";
    case Ablation::no_both: return "no-both";
  }
  return "none";
}

model::ModelConfig apply_ablation(model::ModelConfig m, Ablation a) {
  if (a == Ablation::no_tdrop || a == Ablation::no_both) m.enable_temporal_dropout = false;
  if (a == Ablation::no_tattn || a == Ablation::no_both) m.enable_temporal_attention = false;
  return m;
}

namespace {

fs::path start_run(const RunConfig& cfg, const RunTarget& target) {
  const fs::path dir = make_run_dir(target.out, target.run_name, cfg);
  binary::write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
  return dir;
}

std::vector<fs::path> recording_headers(const fs::path& input) {
  if (fs::is_regular_file(input)) return {input};
  if (!fs::is_directory(input)) throw IoError("input '" + input.string() + "' does not exist");
  std::vector<fs::path> headers;
  if (fs::exists(input / "manifest.json")) {
    const json m = json::parse(binary::read_text(input / "manifest.json"), nullptr, false);
    if (m.is_discarded() || !m.contains("files") || !m.at("files").is_array())
      throw DataError("'" + (input / "manifest.json").string() + "': malformed dataset manifest");
    for (const auto& f : m.at("files")) {
      if (!f.contains("header") || !f.at("header").is_string())
        throw DataError("'" + (input / "manifest.json").string() + "': file entry without a header name");
      headers.push_back(input / f.at("header").get<std::string>());
    }
  } else {
    for (const auto& e : fs::directory_iterator(input)) {
      const auto name = e.path().filename().string();
      if (e.path().extension() == ".json" && name != "config.json" && name != "segments.json") headers.push_back(e.path());
    }
    std::sort(headers.begin(), headers.end());
  }
  if (headers.empty()) throw ConfigError("no recordings found under '" + input.string() + "'");
  return headers;
}

fs::path archive_dir(const fs::path& p) { return fs::is_regular_file(p) ? p.parent_path() : p; }

train::Dataset load_dataset(const fs::path& archive) {
  const auto segments = read_archive(archive_dir(archive));
  if (segments.empty()) throw ConfigError("archive '" + archive.string() + "' contains no segments");
  train::Dataset d;
  d.reserve(segments.size());
  for (const auto& s : segments) d.push_back(graph::build_graph(s));
  return d;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

json summary_entry(const train::CvSummary& s) {
  auto e = [](const train::MetricSummary& m) { return json{{"mean", m.mean}, {"std", m.std}}; };
  return {{"accuracy", e(s.accuracy)}, {"precision", e(s.precision)}, {"recall", e(s.recall)},
          {"f1", e(s.f1)},             {"kappa", e(s.kappa)}};
}

void write_ablation_table(const fs::path& dir, const std::vector<ArmOutcome>& arms) {
  std::string csv =
      "arm,accuracy_mean,accuracy_std,precision_mean,precision_std,recall_mean,recall_std,f1_mean,f1_std,"
      "kappa_mean,kappa_std\n";
  json j = json::object();
  for (const auto& a : arms) {
    const auto& s = a.cv.summary;
    csv += ablation_name(a.ablation);
    for (const auto* m : {&s.accuracy, &s.precision, &s.recall, &s.f1, &s.kappa})
      csv += "," + fixed(m->mean) + "," + fixed(m->std);
    csv += "\n";
    j[ablation_name(a.ablation)] = summary_entry(s);
  }
  binary::write_text(dir / "ablation.csv", csv);
  binary::write_text(dir / "ablation.json", j.dump(2) + "\n");
}

}  // namespace

SynthOutcome cmd_synth(const RunConfig& cfg, const RunTarget& target) {
  SynthOutcome o;
  o.run_dir = start_run(cfg, target);
  o.files = synth::generate_dataset(cfg.synth, o.run_dir);
  return o;
}

PreprocessOutcome cmd_preprocess(const RunConfig& cfg, const fs::path& input, const RunTarget& target) {
  const auto headers = recording_headers(input);
  PreprocessOutcome o;
  o.run_dir = start_run(cfg, target);
  std::vector<dsp::Recording> recs;
  for (const auto& h : headers) recs.push_back(dsp::read_tgr(h));
  const auto res = dsp::preprocess_all(recs, cfg.preprocess);
  write_archive(o.run_dir, res.segments);
  o.recordings = recs.size();
  o.epochs = res.epochs;
  o.skipped = res.skipped_events;
  o.segments = res.segments.size();
  return o;
}

TrainOutcome cmd_train(const RunConfig& cfg, const fs::path& archive, const std::vector<Ablation>& arms,
                       const RunTarget& target, std::ostream* progress) {
  if (arms.empty()) throw ConfigError("train: no ablation arm selected");
  const train::Dataset data = load_dataset(archive);
  TrainOutcome o;
  o.run_dir = start_run(cfg, target);

  std::mutex log_mutex;
  for (Ablation a : arms) {
    RunConfig arm_cfg = cfg;
    arm_cfg.model = apply_ablation(cfg.model, a);
    ArmOutcome arm{a, arms.size() == 1 ? o.run_dir : o.run_dir / ablation_name(a), {}};
    if (arms.size() > 1) {
      fs::create_directories(arm.dir);
      binary::write_text(arm.dir / "config.json", to_json(arm_cfg).dump(2) + "\n");
    }

    train::TrainHooks hooks;
    if (progress)
      hooks.on_epoch = [&, name = ablation_name(a)](std::size_t fold, const train::EpochRecord& r) {
        std::lock_guard lock(log_mutex);
        *progress << "[" << name << "] fold " << fold << " epoch " << r.epoch << " train_loss " << r.train_loss
                  << " val_loss " << r.val_loss << " lr " << r.lr << "\n";
        progress->flush();
      };
    arm.cv = train::cross_validate(data, arm_cfg.model, arm_cfg.train, hooks);

    const json echo = to_json(arm_cfg);
    train::write_reports(arm.dir, arm.cv, echo, cfg.seed);
    for (const auto& f : arm.cv.folds) {
      model::Checkpoint ck;
      ck.config = arm_cfg.model;
      ck.params = f.best_params;
      ck.seed = cfg.seed;
      ck.extra = {{"fold", f.fold},
                  {"ablation", ablation_name(a)},
                  {"best_epoch", f.best_epoch},
                  {"epochs_run", f.epochs_run},
                  {"test_trials", f.test_groups},
                  {"batch_size", arm_cfg.train.batch_size},
                  {"label_smoothing", arm_cfg.train.label_smoothing}};
      model::save_checkpoint(arm.dir / ("fold" + std::to_string(f.fold) + ".ckpt"), ck);
    }
    o.arms.push_back(std::move(arm));
  }
  if (arms.size() > 1) write_ablation_table(o.run_dir, o.arms);
  return o;
}

EvaluateOutcome cmd_evaluate(const fs::path& checkpoint, const fs::path& archive, const std::string& split,
                             const std::optional<RunConfig>& cfg, const RunTarget& target) {
  if (split != "test" && split != "all") throw ConfigError("--split: expected test or all, got '" + split + "'");
  model::Checkpoint ck = model::load_checkpoint(checkpoint);

  RunConfig run;
  if (cfg) {
    run = *cfg;
    const model::ModelParams expected = model::ModelParams::init(cfg->model, 0);
    for (const auto& t : expected.tensors) {
      if (!ck.params.has(t.name))
        throw ConfigError("checkpoint lacks parameter '" + t.name + "' required by the configured model");
      const auto& have = ck.params.at(t.name);
      if (!have.same_shape(t.value))
        throw ConfigError("parameter '" + t.name + "': checkpoint shape " + numerics::shape_str(have.shape()) +
                          ", configured model expects " + numerics::shape_str(t.value.shape()));
    }
    for (const auto& t : ck.params.tensors)
      if (!expected.has(t.name))
        throw ConfigError("checkpoint parameter '" + t.name + "' does not exist in the configured model");
  } else {
    run.model = ck.config;
    run.seed = ck.seed;
    if (ck.extra.contains("batch_size")) run.train.batch_size = ck.extra.at("batch_size").get<std::size_t>();
    if (ck.extra.contains("label_smoothing")) run.train.label_smoothing = ck.extra.at("label_smoothing").get<double>();
    run.resolve();
  }
  run.paths.input = archive.string();

  const train::Dataset data = load_dataset(archive);
  std::vector<std::size_t> idx;
  if (split == "all") {
    for (std::size_t i = 0; i < data.size(); ++i) idx.push_back(i);
  } else {
    if (!ck.extra.contains("test_trials")) throw ConfigError("checkpoint records no test trials; use --split all");
    const auto trials = ck.extra.at("test_trials").get<std::vector<std::string>>();
    const std::set<std::string> keep(trials.begin(), trials.end());
    for (std::size_t i = 0; i < data.size(); ++i)
      if (keep.count(train::group_key(data[i]))) idx.push_back(i);
  }
  if (idx.empty()) throw ConfigError("no segments of the archive fall in the '" + split + "' split");

  EvaluateOutcome o;
  o.run_dir = start_run(run, target);
  const train::Evaluation ev =
      train::evaluate(data, idx, ck.params, run.model, run.train.batch_size, run.train.label_smoothing);
  o.metrics = train::compute_metrics(ev.confusion);
  o.loss = ev.loss;
  o.samples = idx.size();

  json j = train::metrics_json(o.metrics);
  j["loss"] = o.loss;
  j["samples"] = o.samples;
  j["split"] = split;
  j["checkpoint"] = checkpoint.string();
  binary::write_text(o.run_dir / "metrics.json", j.dump(2) + "\n");
  std::string csv = "truth\\predicted";
  for (std::size_t c = 0; c < o.metrics.confusion.size(); ++c) csv += ",class" + std::to_string(c);
  csv += "\n";
  for (std::size_t r = 0; r < o.metrics.confusion.size(); ++r) {
    csv += "class" + std::to_string(r);
    for (auto v : o.metrics.confusion[r]) csv += "," + std::to_string(v);
    csv += "\n";
  }
  binary::write_text(o.run_dir / "confusion.csv", csv);
  return o;
}

namespace {

struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  std::string run_name;
  std::string input;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_input) {
  cmd->add_option("-c,--config", f.config, "run config JSON");
  cmd->add_option("--set", f.sets, "override a config value, e.g. train.max_epochs=50")->allow_extra_args(false);
  cmd->add_option("-o,--out", f.out, "parent directory for run directories (default: paths.output)");
  cmd->add_option("--run-name", f.run_name, "run directory name (default: UTC timestamp + config hash)");
  if (with_input) cmd->add_option("-i,--in", f.input, "input path (default: paths.input)");
}

ConfigSources sources(const CommonFlags& f) {
  ConfigSources s;
  if (!f.config.empty()) s.file = f.config;
  s.overrides = f.sets;
  if (const char* env = std::getenv("TGAT_SEED")) s.env_seed = env;
  return s;
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig c = load_run_config(sources(f));
  if (!f.out.empty()) c.paths.output = f.out;
  if (!f.input.empty()) c.paths.input = f.input;
  return c;
}

RunTarget target_of(const RunConfig& c, const CommonFlags& f) { return {c.paths.output, f.run_name}; }

fs::path require_input(const RunConfig& c) {
  if (c.paths.input.empty()) throw ConfigError("no input given (use --in or paths.input)");
  return c.paths.input;
}

void print_summary(const std::string& arm, const train::CvResult& cv) {
  const auto& s = cv.summary;
  std::printf("%-9s accuracy %.4f +- %.4f  precision %.4f  recall %.4f  f1 %.4f  kappa %.4f\n", arm.c_str(),
              s.accuracy.mean, s.accuracy.std, s.precision.mean, s.recall.mean, s.f1.mean, s.kappa.mean);
}

int run(int argc, char** argv) {
  CLI::App app{"EEG temporal graph attention pipeline"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap on worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);

  CommonFlags f;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  add_common(synth_cmd, f, false);

  auto* pre_cmd = app.add_subcommand("preprocess", "filter, epoch and segment recordings into an archive");
  add_common(pre_cmd, f, true);

  std::string ablation = "none";
  bool verbose = false;
  auto* train_cmd = app.add_subcommand("train", "grouped k-fold training on a segment archive");
  add_common(train_cmd, f, true);
  train_cmd->add_option("--ablation", ablation, "none | no-tdrop | no-tattn | no-both | all");
  train_cmd->add_flag("-v,--verbose", verbose, "print one line per epoch");

  std::string checkpoint, split = "test";
  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a checkpoint on a segment archive");
  add_common(eval_cmd, f, true);
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--split", split, "test | all");

  bool inject = false;
  GradCheckSuiteOptions gopts;
  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference check of every gradient");
  grad_cmd->add_flag("--inject-fault", inject, "add an op with a deliberately wrong backward");
  grad_cmd->add_option("--draws", gopts.draws, "random draws per op");
  grad_cmd->add_option("--coords", gopts.model_coords, "coordinates per model parameter group (0: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (threads > 0) {
    omp_set_num_threads(threads);
    numerics::kernels::set_max_threads(threads);
  }

  if (*synth_cmd) {
    const RunConfig c = resolve(f);
    const auto o = cmd_synth(c, target_of(c, f));
    std::printf("wrote %zu recording(s) and manifest.json to %s\n", o.files.headers.size(), o.run_dir.c_str());
  } else if (*pre_cmd) {
    const RunConfig c = resolve(f);
    const auto o = cmd_preprocess(c, require_input(c), target_of(c, f));
    std::printf("recordings %zu epochs %zu skipped %zu segments %zu\n", o.recordings, o.epochs, o.skipped,
                o.segments);
    std::printf("archive: %s\n", o.run_dir.c_str());
  } else if (*train_cmd) {
    const RunConfig c = resolve(f);
    const auto arms = parse_ablation(ablation);
    const auto o = cmd_train(c, require_input(c), arms, target_of(c, f), verbose ? &std::cerr : nullptr);
    for (const auto& a : o.arms) print_summary(ablation_name(a.ablation), a.cv);
    std::printf("run directory: %s\n", o.run_dir.c_str());
  } else if (*eval_cmd) {
    std::optional<RunConfig> c;
    if (!f.config.empty() || !f.sets.empty()) c = resolve(f);
    RunConfig paths;
    paths.paths.output = f.out.empty() ? (c ? c->paths.output : paths.paths.output) : f.out;
    const std::string input = !f.input.empty() ? f.input : (c ? c->paths.input : "");
    if (input.empty()) throw ConfigError("no input given (use --in or paths.input)");
    const auto o = cmd_evaluate(checkpoint, input, split, c, {paths.paths.output, f.run_name});
    json j = train::metrics_json(o.metrics);
    j["loss"] = o.loss;
    j["samples"] = o.samples;
    std::printf("%s\n", j.dump(2).c_str());
  } else if (*grad_cmd) {
    gopts.inject_fault = inject;
    const GradCheckReport r = run_gradcheck_suite(gopts);
    for (const auto& e : r.entries)
      std::printf("%-26s rel %.3e  abs %.3e  quantum %.1e  coords %5zu  %s\n", e.name.c_str(), e.max_rel_error,
                  e.max_abs_error, e.difference_quantum, e.coordinates, e.max_rel_error < r.tolerance ? "ok" : "FAIL");
    const auto& w = r.worst();
    std::printf("worst: %s %.3e (tolerance %.0e)\n", w.name.c_str(), w.max_rel_error, r.tolerance);
    return r.passed() ? kExitOk : kExitCheckFailed;
  }
  return kExitOk;
}

}  // namespace

int main_entry(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "tgat: config error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "tgat: I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "tgat: I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const DataError& e) {
    std::fprintf(stderr, "tgat: data error: %s\n", e.what());
    return kExitData;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "tgat: numerical failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tgat: error: %s\n", e.what());
    return kExitCheckFailed;
  }
}

}  // namespace tgat::cli
