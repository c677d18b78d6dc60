// End-to-end tests that drive the installed binary the way a user would:
// every case shells out to FCSTG_BIN and inspects exit codes, streams, and
// written artifacts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

// Runs `env_prefix FCSTG_BIN args` through the shell, capturing both streams.
CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const fs::path base = fs::temp_directory_path();
  const std::string tag = std::to_string(++counter);
  const fs::path out_file = base / ("fcstg_cli_stdout_" + tag);
  const fs::path err_file = base / ("fcstg_cli_stderr_" + tag);

  std::string cmd = env_prefix.empty() ? std::string() : env_prefix + " ";
  cmd += std::string(FCSTG_BIN) + " " + args + " >" + out_file.string() + " 2>" +
         err_file.string();
  const int raw = std::system(cmd.c_str());

  CliResult result;
  result.code = (raw != -1 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  fs::remove(out_file);
  fs::remove(err_file);
  return result;
}

struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("fcstg_cli_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

const char* kSmallConfig =
    "[model]\n"
    "f = 6\n"
    "d = 4\n"
    "M = 2\n"
    "s = 1\n"
    "delta = 0.9\n"
    "branches = 2\n"
    "D = 8\n"
    "head = classification\n"
    "ablation = none\n"
    "\n"
    "[train]\n"
    "batch_size = 8\n"
    "epochs = 2\n"
    "lr = 0.001\n"
    "seed = 1\n"
    "patience = 0\n";

// One tiny dataset + config shared by the expensive cases.
struct Workbench {
  TempDir dir{"workbench"};
  std::string data;
  std::string config;

  Workbench() {
    data = dir.sub("data");
    config = dir.sub("run.ini");
    spit(config, kSmallConfig);
    const CliResult r =
        run_cli("synth --kind dedt --out " + data + " --per-class 10 --seed 1");
    REQUIRE(r.code == 0);
  }
};

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> row;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) row.push_back(std::stod(cell));
  return row;
}

}  // namespace

TEST_CASE("help and argument errors") {
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("train --help").code == 0);
  CHECK(run_cli("").code == 2);                 // a subcommand is required
  CHECK(run_cli("train --config only").code == 2);  // missing required options
  CHECK(run_cli("synth --kind nonsense --out /tmp/x").code == 2);
}

TEST_CASE("missing dataset is a data error") {
  TempDir dir("missing_data");
  spit(dir.path / "run.ini", kSmallConfig);
  const CliResult r = run_cli("train --config " + dir.sub("run.ini") + " --data " +
                              dir.sub("no_such_dir") + " --out " + dir.sub("out"));
  CHECK(r.code == 3);
  CHECK(r.err.find("data error") != std::string::npos);
}

TEST_CASE("invalid config field is reported by name") {
  TempDir dir("bad_config");
  std::string bad(kSmallConfig);
  bad.replace(bad.find("delta = 0.9"), 11, "delta = 1.5");
  spit(dir.path / "run.ini", bad);
  const CliResult r = run_cli("train --config " + dir.sub("run.ini") + " --data " +
                              dir.sub("whatever") + " --out " + dir.sub("out"));
  CHECK(r.code == 2);
  CHECK(r.err.find("delta") != std::string::npos);
}

TEST_CASE("gradient check passes clean and fails the negative control") {
  const CliResult clean = run_cli("gradcheck");
  CHECK(clean.code == 0);
  CHECK(clean.out.find("variant,block,max_rel_err,pass") != std::string::npos);
  CHECK(clean.out.find("all blocks pass") != std::string::npos);

  const CliResult corrupt = run_cli("gradcheck --corrupt");
  CHECK(corrupt.code == 5);
  CHECK(corrupt.err.find("gradcheck failed") != std::string::npos);

  CHECK(run_cli("gradcheck --config /nonexistent.ini").code == 3);
}

TEST_CASE("generation is deterministic at the byte level") {
  TempDir dir("synth_repeat");
  const std::string args = "synth --kind dedt --per-class 10 --seed 7 --out ";
  REQUIRE(run_cli(args + dir.sub("a")).code == 0);
  REQUIRE(run_cli(args + dir.sub("b")).code == 0);
  for (const char* file : {"train.bin", "val.bin", "test.bin", "manifest.json"}) {
    CAPTURE(file);
    const std::string a = slurp(dir.path / "a" / file);
    REQUIRE_FALSE(a.empty());
    CHECK(a == slurp(dir.path / "b" / file));
  }
}

TEST_CASE("training artifacts are identical across reruns and thread counts") {
  Workbench bench;
  const std::string train_args = "train --config " + bench.config + " --data " +
                                 bench.data + " --out ";

  REQUIRE(run_cli(train_args + bench.dir.sub("run_a")).code == 0);
  REQUIRE(run_cli(train_args + bench.dir.sub("run_b")).code == 0);
  REQUIRE(run_cli(train_args + bench.dir.sub("run_t1"), "FCSTG_THREADS=1").code == 0);
  REQUIRE(run_cli(train_args + bench.dir.sub("run_t4"), "FCSTG_THREADS=4").code == 0);

  for (const char* file : {"params.bin", "train_log.csv", "test_report.csv"}) {
    CAPTURE(file);
    const std::string a = slurp(bench.dir.path / "run_a" / file);
    REQUIRE_FALSE(a.empty());
    CHECK(a == slurp(bench.dir.path / "run_b" / file));
    CHECK(a == slurp(bench.dir.path / "run_t1" / file));
    CHECK(a == slurp(bench.dir.path / "run_t4" / file));
  }

  SUBCASE("saved params evaluate to the train-time test report") {
    const CliResult r = run_cli("eval --params " + bench.dir.sub("run_a/params.bin") +
                                " --data " + bench.data + " --format csv");
    CHECK(r.code == 0);
    CHECK(r.out == slurp(bench.dir.path / "run_a" / "test_report.csv"));
  }

  SUBCASE("adjacency dump rows sum to one before decay") {
    const std::string base = "dump-adj --params " + bench.dir.sub("run_a/params.bin") +
                             " --data " + bench.data + " --sample 0 --branch 0 --window 0";
    const CliResult pre = run_cli(base + " --pre-decay");
    const CliResult post = run_cli(base);
    REQUIRE(pre.code == 0);
    REQUIRE(post.code == 0);

    const std::vector<std::string> pre_rows = lines_of(pre.out);
    const std::vector<std::string> post_rows = lines_of(post.out);
    REQUIRE(pre_rows.size() == 8);  // M*N = 2*4 nodes
    REQUIRE(post_rows.size() == 8);
    for (size_t r = 0; r < pre_rows.size(); ++r) {
      const std::vector<double> pre_row = parse_csv_row(pre_rows[r]);
      const std::vector<double> post_row = parse_csv_row(post_rows[r]);
      REQUIRE(pre_row.size() == 8);
      REQUIRE(post_row.size() == 8);
      double pre_sum = 0.0, post_sum = 0.0;
      for (size_t c = 0; c < pre_row.size(); ++c) {
        pre_sum += pre_row[c];
        post_sum += post_row[c];
        CHECK(post_row[c] <= pre_row[c] + 1e-12);  // the mask only shrinks
      }
      CHECK(pre_sum == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(post_sum <= pre_sum + 1e-9);
    }

    CHECK(run_cli(base + " --sample 99").code == 2);  // outside the test split
  }

  SUBCASE("dimension mismatch between params and dataset") {
    const std::string other = bench.dir.sub("narrow");
    REQUIRE(run_cli("synth --kind dedt --per-class 10 --sensors 3 --out " + other).code == 0);
    const CliResult r = run_cli("eval --params " + bench.dir.sub("run_a/params.bin") +
                                " --data " + other);
    CHECK(r.code == 2);
    CHECK(r.err.find("sensors") != std::string::npos);
  }
}

TEST_CASE("sweep prints one row per value and survives bad values") {
  Workbench bench;
  const std::string args = "sweep --config " + bench.config + " --data " + bench.data +
                           " --axis delta --values 1.5,0.9";
  const CliResult first = run_cli(args);
  CHECK(first.code == 0);
  const std::vector<std::string> rows = lines_of(first.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "axis,value,status,accuracy,macro_f1");
  CHECK(rows[1].find("delta,1.5,error:") == 0);
  CHECK(rows[1].find("delta") != std::string::npos);
  CHECK(rows[2].find("delta,0.9,ok,") == 0);

  const CliResult second = run_cli(args);
  CHECK(second.out == first.out);

  CHECK(run_cli("sweep --config " + bench.config + " --data " + bench.data +
                " --axis lr --values 0.1")
            .code == 2);  // lr is not a sweepable axis
}

TEST_CASE("csv ingestion feeds training, and an empty test split refuses eval") {
  TempDir dir("ingest_one");
  const std::string src = dir.sub("src");
  fs::create_directories(src);
  // One 2-sensor, 12-timestep sample; 12 timesteps = 2 patches at f = 6.
  // A lone sample lands entirely in the train split, so val and test stay
  // empty; regression sidesteps the >= 2 classes rule.
  std::string rows;
  for (int t = 0; t < 12; ++t) {
    rows += std::to_string(t) + "," + std::to_string(10 - t) + "\n";
  }
  spit(fs::path(src) / "only.csv", rows);
  spit(fs::path(src) / "labels.csv", "only,42\n");

  const std::string data = dir.sub("data");
  const CliResult ing =
      run_cli("ingest --source " + src + " --out " + data + " --task regression");
  REQUIRE(ing.code == 0);
  CHECK(ing.out.find("ingested 1 samples") != std::string::npos);

  std::string cfg(kSmallConfig);
  cfg.replace(cfg.find("batch_size = 8"), 14, "batch_size = 1");
  cfg.replace(cfg.find("head = classification"), 21, "head = regression");
  spit(dir.path / "run.ini", cfg);
  const CliResult tr = run_cli("train --config " + dir.sub("run.ini") + " --data " +
                               data + " --out " + dir.sub("out"));
  CHECK(tr.code == 0);  // empty val split falls back to train for selection

  const CliResult ev = run_cli("eval --params " + dir.sub("out/params.bin") +
                               " --data " + data);
  CHECK(ev.code == 3);  // nothing to evaluate
  CHECK(ev.err.find("empty") != std::string::npos);
}

TEST_CASE("thread cap rejects nonsense") {
  const CliResult r = run_cli("gradcheck", "FCSTG_THREADS=banana");
  CHECK(r.code == 2);
  CHECK(r.err.find("FCSTG_THREADS") != std::string::npos);
}
