// fcstg: train, evaluate, and inspect spatial-temporal graph models over
// multivariate time-series containers. One command per process; exit codes
// 0 ok, 2 config, 3 data, 4 numeric fault, 5 gradcheck failure.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "fcstgnn/config.hpp"
#include "fcstgnn/data.hpp"
#include "fcstgnn/errors.hpp"
#include "fcstgnn/gradcheck.hpp"
#include "fcstgnn/model.hpp"
#include "fcstgnn/model_io.hpp"
#include "fcstgnn/tape.hpp"
#include "fcstgnn/train.hpp"

namespace fs = std::filesystem;
using namespace fcstgnn;

namespace {

void apply_thread_cap() {
  const char* raw = std::getenv("FCSTG_THREADS");
  if (raw == nullptr || *raw == '\0') return;
  int threads = 0;
  const auto [end, ec] = std::from_chars(raw, raw + std::string_view(raw).size(), threads);
  if (ec != std::errc() || *end != '\0' || threads < 1) {
    throw ConfigError(std::string("FCSTG_THREADS: '") + raw +
                      "' is not a positive integer");
  }
  omp_set_num_threads(threads);
}

DataDims dims_from_manifest(const DatasetManifest& m) {
  DataDims dims;
  dims.sensors = m.sensors;
  dims.timesteps = m.timesteps;
  dims.task = m.task;
  dims.classes = m.classes;
  dims.max_rul = m.max_rul;
  return dims;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw DataError(path.string() + ": write failed");
}

int cmd_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir, const std::string& format,
              bool seed_given, uint64_t seed) {
  FileConfig cfg = load_config_file(config_path);
  if (seed_given) cfg.train.seed = seed;
  const Dataset data = load_dataset(data_dir);

  Model model(cfg.model, dims_from_manifest(data.manifest), cfg.train.seed);
  const TrainResult result = train_model(model, data, cfg.train);

  fs::create_directories(out_dir);
  save_params((fs::path(out_dir) / "params.bin").string(), model, cfg.train);
  write_text(fs::path(out_dir) / "train_log.csv",
             log_csv(result.log, data.manifest.task));
  write_text(fs::path(out_dir) / "test_report.csv", report_csv(result.test));

  std::cout << "trained " << result.log.size() << " epochs, best epoch "
            << result.best_epoch << " (val " << format_metric(result.best_val)
            << ")\n";
  std::cout << "artifacts in " << out_dir << "\n";
  std::cout << (format == "csv" ? report_csv(result.test)
                                : report_pretty(result.test));
  return 0;
}

int cmd_eval(const std::string& params_path, const std::string& data_dir,
             const std::string& format) {
  const LoadedModel loaded = load_params(params_path);
  const Dataset data = load_dataset(data_dir);
  const DataDims want = dims_from_manifest(data.manifest);
  if (!(loaded.dims == want)) {
    throw ConfigError("params expect sensors=" + std::to_string(loaded.dims.sensors) +
                      " timesteps=" + std::to_string(loaded.dims.timesteps) + " task=" +
                      task_name(loaded.dims.task) + ", dataset has sensors=" +
                      std::to_string(want.sensors) + " timesteps=" +
                      std::to_string(want.timesteps) + " task=" + task_name(want.task));
  }
  const EvalReport report = evaluate(loaded.model, data.test);
  std::cout << (format == "csv" ? report_csv(report) : report_pretty(report));
  return 0;
}

int cmd_gradcheck(const std::string& config_path, uint64_t seed, bool corrupt) {
  // The finite-difference suite runs at a pinned tiny geometry; a config, if
  // given, is only validated.
  if (!config_path.empty()) load_config_file(config_path);
  testhook::corrupt_relu_backward = corrupt;
  const GradcheckReport report = run_gradcheck(seed);
  testhook::corrupt_relu_backward = false;

  std::cout << "variant,block,max_rel_err,pass\n";
  for (const GradcheckBlock& row : report.blocks) {
    std::cout << row.variant << "," << row.block << ","
              << format_metric(row.max_rel_err) << "," << (row.pass ? "yes" : "no")
              << "\n";
  }
  std::cout << "tolerance " << format_metric(report.tolerance) << ": "
            << (report.pass ? "all blocks pass" : "FAIL") << "\n";
  if (!report.pass) {
    for (const GradcheckBlock& row : report.blocks) {
      if (!row.pass) {
        std::cerr << "gradcheck failed: " << row.variant << " " << row.block
                  << " max_rel_err " << format_metric(row.max_rel_err) << "\n";
      }
    }
    return 5;
  }
  return 0;
}

std::string csv_safe(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n') c = ';';
  }
  return s;
}

int sweep_int(const std::string& v) {
  int out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw ConfigError("'" + v + "' is not an integer");
  }
  return out;
}

double sweep_double(const std::string& v) {
  double out = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw ConfigError("'" + v + "' is not a number");
  }
  return out;
}

int cmd_sweep(const std::string& config_path, const std::string& data_dir,
              const std::string& axis, const std::vector<std::string>& values,
              bool seed_given, uint64_t seed) {
  if (values.empty()) throw ConfigError("sweep: --values must list at least one value");
  const FileConfig base = load_config_file(config_path);
  const Dataset data = load_dataset(data_dir);
  const bool classification = data.manifest.task == TaskKind::kClassification;

  std::cout << "axis,value,status,"
            << (classification ? "accuracy,macro_f1" : "rmse,nasa_score") << "\n";
  for (const std::string& value : values) {
    std::cout << axis << "," << value << ",";
    try {
      FileConfig cfg = base;
      if (seed_given) cfg.train.seed = seed;
      // Patch one key textually, exactly like editing the file.
      if (axis == "f") {
        cfg.model.patch_size = sweep_int(value);
      } else if (axis == "M") {
        cfg.model.window_size = sweep_int(value);
      } else if (axis == "s") {
        cfg.model.stride = sweep_int(value);
      } else if (axis == "delta") {
        cfg.model.decay_rate = sweep_double(value);
      } else if (axis == "branches") {
        cfg.model.branches = sweep_int(value);
      } else {
        throw ConfigError("sweep: unknown axis '" + axis +
                          "' (f|M|s|delta|branches)");
      }
      cfg.model.validate();
      Model model(cfg.model, dims_from_manifest(data.manifest), cfg.train.seed);
      const TrainResult result = train_model(model, data, cfg.train);
      if (classification) {
        std::cout << "ok," << format_metric(result.test.accuracy) << ","
                  << format_metric(result.test.macro_f1) << "\n";
      } else {
        std::cout << "ok," << format_metric(result.test.rmse) << ","
                  << format_metric(result.test.nasa_score) << "\n";
      }
    } catch (const std::exception& e) {
      std::cout << "error: " << csv_safe(e.what()) << ",,\n";
    }
  }
  return 0;
}

int cmd_dump_adj(const std::string& params_path, const std::string& data_dir,
                 int sample, int branch, int window, bool pre_decay) {
  const LoadedModel loaded = load_params(params_path);
  const Dataset data = load_dataset(data_dir);
  if (!(loaded.dims == dims_from_manifest(data.manifest))) {
    throw ConfigError("dump-adj: params and dataset dimensions do not match");
  }
  if (sample < 0 || sample >= static_cast<int>(data.test.size())) {
    throw ConfigError("sample: index " + std::to_string(sample) +
                      " outside test split [0, " + std::to_string(data.test.size()) +
                      ")");
  }
  Tape tape;
  const Tensor adj =
      loaded.model
          .window_adjacency(tape, data.test[static_cast<size_t>(sample)].values,
                            branch, window, pre_decay)
          .value();
  for (int r = 0; r < adj.rows(); ++r) {
    for (int c = 0; c < adj.cols(); ++c) {
      std::cout << (c > 0 ? "," : "") << format_metric(adj.at2(r, c));
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_synth(const std::string& kind, const std::string& out_dir, uint64_t seed,
              int sensors, int timesteps, int per_class, int lag, double alpha,
              double sigma, int trajectories, int samples_per_trajectory,
              int age_stride, double noise, double max_rul) {
  Dataset data;
  if (kind == "dedt") {
    DedtOptions opts;
    opts.seed = seed;
    opts.sensors = sensors;
    opts.timesteps = timesteps;
    opts.per_class = per_class;
    opts.lag = lag;
    opts.alpha = alpha;
    opts.sigma = sigma;
    data = synth_dedt(opts);
  } else if (kind == "rul") {
    RulOptions opts;
    opts.seed = seed;
    opts.sensors = sensors;
    opts.timesteps = timesteps;
    opts.trajectories = trajectories;
    opts.samples_per_trajectory = samples_per_trajectory;
    opts.age_stride = age_stride;
    opts.noise = noise;
    opts.max_rul = max_rul;
    data = synth_rul(opts);
  } else {
    throw ConfigError("synth: unknown kind '" + kind + "' (dedt|rul)");
  }
  save_dataset(out_dir, data);
  std::cout << "wrote " << data.manifest.name << " to " << out_dir << " ("
            << data.manifest.train_count << "/" << data.manifest.val_count << "/"
            << data.manifest.test_count << " train/val/test)\n";
  return 0;
}

int cmd_ingest(const IngestOptions& opts, const std::string& out_dir) {
  const Dataset data = ingest_csv(opts);
  save_dataset(out_dir, data);
  std::cout << "ingested " << (data.train.size() + data.val.size() + data.test.size())
            << " samples (" << data.manifest.sensors << " sensors x "
            << data.manifest.timesteps << " timesteps) to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatial-temporal graph representation learning for multivariate time series"};
  app.require_subcommand(1);

  std::string config_path, data_dir, out_dir, params_path;
  std::string format = "pretty";
  uint64_t seed = 1;

  auto* train = app.add_subcommand("train", "train a model, write params and logs");
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--out", out_dir, "output directory")->required();
  auto* train_seed = train->add_option("--seed", seed, "override the config seed");
  train->add_option("--format", format, "stdout report format")
      ->check(CLI::IsMember({"csv", "pretty"}));

  auto* eval = app.add_subcommand("eval", "evaluate saved params on a dataset's test split");
  eval->add_option("--params", params_path, "params file")->required();
  eval->add_option("--data", data_dir, "dataset directory")->required();
  eval->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"csv", "pretty"}));

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every parameter block");
  gradcheck->add_option("--config", config_path, "config file (validated only)");
  gradcheck->add_option("--seed", seed, "seed for parameters and input");
  bool corrupt = false;
  gradcheck->add_flag("--corrupt", corrupt, "corrupt one backward rule (negative control)");

  auto* sweep = app.add_subcommand("sweep", "train once per axis value, print a CSV table");
  std::string axis;
  std::vector<std::string> values;
  sweep->add_option("--config", config_path, "base config file")->required();
  sweep->add_option("--data", data_dir, "dataset directory")->required();
  sweep->add_option("--axis", axis, "config key to vary")
      ->required()
      ->check(CLI::IsMember({"f", "M", "s", "delta", "branches"}));
  sweep->add_option("--values", values, "comma-separated axis values")
      ->required()
      ->delimiter(',');
  auto* sweep_seed = sweep->add_option("--seed", seed, "override the config seed");

  auto* dump = app.add_subcommand("dump-adj", "print one window's adjacency matrix as CSV");
  int sample = 0, branch = 0, window = 0;
  bool pre_decay = false;
  dump->add_option("--params", params_path, "params file")->required();
  dump->add_option("--data", data_dir, "dataset directory")->required();
  dump->add_option("--sample", sample, "sample index into the test split");
  dump->add_option("--branch", branch, "branch index");
  dump->add_option("--window", window, "window index");
  dump->add_flag("--pre-decay", pre_decay, "dump the adjacency before the decay mask");

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset container");
  std::string kind;
  int sensors = 4, timesteps = 48, per_class = 500, lag = 6;
  double alpha = 0.9, sigma = 0.3;
  int trajectories = 60, samples_per_trajectory = 10, age_stride = 3;
  double noise = 0.1, max_rul = 60.0;
  synth->add_option("--kind", kind, "generator")
      ->required()
      ->check(CLI::IsMember({"dedt", "rul"}));
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--sensors", sensors, "sensor count");
  synth->add_option("--timesteps", timesteps, "series length");
  synth->add_option("--per-class", per_class, "dedt: samples per class");
  synth->add_option("--lag", lag, "dedt: coupling lag");
  synth->add_option("--alpha", alpha, "dedt: coupling strength");
  synth->add_option("--sigma", sigma, "dedt: coupling noise");
  synth->add_option("--trajectories", trajectories, "rul: trajectory count");
  synth->add_option("--samples-per-trajectory", samples_per_trajectory,
                    "rul: windows per trajectory");
  synth->add_option("--age-stride", age_stride, "rul: steps between windows");
  synth->add_option("--noise", noise, "rul: sensor noise");
  synth->add_option("--max-rul", max_rul, "rul: label cap");

  auto* ingest = app.add_subcommand("ingest", "build a container from CSV files");
  IngestOptions ingest_opts;
  std::string task_name_opt = "classification";
  ingest->add_option("--source", ingest_opts.source_dir, "directory of CSVs")->required();
  ingest->add_option("--out", out_dir, "output directory")->required();
  ingest->add_option("--task", task_name_opt, "label type")
      ->check(CLI::IsMember({"regression", "classification"}));
  ingest->add_flag("--long", ingest_opts.long_format,
                   "rows are (sample_id, sensor values) in one data.csv");
  ingest->add_option("--max-rul", ingest_opts.max_rul, "cap regression labels");
  ingest->add_option("--seed", seed, "split shuffle seed");
  ingest->add_option("--name", ingest_opts.name, "dataset name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    apply_thread_cap();
    if (*train) {
      return cmd_train(config_path, data_dir, out_dir, format,
                       train_seed->count() > 0, seed);
    }
    if (*eval) return cmd_eval(params_path, data_dir, format);
    if (*gradcheck) return cmd_gradcheck(config_path, seed, corrupt);
    if (*sweep) {
      return cmd_sweep(config_path, data_dir, axis, values, sweep_seed->count() > 0,
                       seed);
    }
    if (*dump) return cmd_dump_adj(params_path, data_dir, sample, branch, window, pre_decay);
    if (*synth) {
      return cmd_synth(kind, out_dir, seed, sensors, timesteps, per_class, lag, alpha,
                       sigma, trajectories, samples_per_trajectory, age_stride, noise,
                       max_rul);
    }
    if (*ingest) {
      ingest_opts.task = task_name_opt == "regression" ? TaskKind::kRegression
                                                       : TaskKind::kClassification;
      ingest_opts.seed = seed;
      return cmd_ingest(ingest_opts, out_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericFault& e) {
    std::cerr << "numeric fault: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
