#include <string>

#include "doctest.h"

#include "fcstgnn/config.hpp"
#include "fcstgnn/errors.hpp"

using namespace fcstgnn;

namespace {

bool message_mentions(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("serialize then parse reproduces the struct") {
  SUBCASE("defaults") {
    const FileConfig original;
    CHECK(parse_config(serialize_config(original)) == original);
  }

  SUBCASE("every field off its default") {
    FileConfig cfg;
    cfg.model.patch_size = 5;
    cfg.model.feature_dim = 24;
    cfg.model.window_size = 3;
    cfg.model.stride = 2;
    cfg.model.decay_rate = 0.3725;
    cfg.model.branches = 3;
    cfg.model.repr_dim = 48;
    cfg.model.head = TaskKind::kRegression;
    cfg.model.ablation = Ablation::kNoPooling;
    cfg.train.batch_size = 17;
    cfg.train.epochs = 3;
    cfg.train.lr = 2.5e-4;
    cfg.train.seed = 18446744073709551615ull;  // largest 64-bit seed
    cfg.train.patience = 7;
    CHECK(parse_config(serialize_config(cfg)) == cfg);
  }
}

TEST_CASE("comments, blank lines, and spacing are ignored") {
  const std::string text =
      "# leading comment\n"
      "\n"
      "[model]\n"
      "  d =   8   # trailing comment\n"
      "\tf\t=\t3\n"
      "\n"
      "[train]\n"
      "epochs = 2\n";
  const FileConfig cfg = parse_config(text);
  CHECK(cfg.model.feature_dim == 8);
  CHECK(cfg.model.patch_size == 3);
  CHECK(cfg.train.epochs == 2);
  CHECK(cfg.train.batch_size == TrainConfig{}.batch_size);
}

TEST_CASE("keys may appear without section headers") {
  const FileConfig cfg = parse_config("d = 12\nlr = 0.01\n");
  CHECK(cfg.model.feature_dim == 12);
  CHECK(cfg.train.lr == 0.01);
}

TEST_CASE("malformed files raise a config error naming the problem") {
  CHECK_THROWS_WITH_AS(parse_config("d = 4\nd = 5\n"),
                       doctest::Contains("duplicate key 'd'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("widgets = 3\n"),
                       doctest::Contains("unknown key 'widgets'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[optimizer]\n"),
                       doctest::Contains("unknown section"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("just some words\n"),
                       doctest::Contains("expected key = value"), ConfigError);
  CHECK_THROWS_AS(parse_config("d = twelve\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("lr = 1e\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("head = ordinal\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("ablation = everything\n"), ConfigError);
}

TEST_CASE("out-of-range fields are rejected by name") {
  try {
    parse_config("delta = 1.5\n");
    FAIL("delta = 1.5 must not validate");
  } catch (const ConfigError& e) {
    CHECK(message_mentions(e, "delta"));
  }
  CHECK_THROWS_AS(parse_config("delta = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("delta = -0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("f = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("M = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("s = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("branches = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("D = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("batch_size = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("epochs = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("patience = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("lr = nan\n"), ConfigError);
}

TEST_CASE("boundary values that must parse") {
  CHECK(parse_config("delta = 1\n").model.decay_rate == 1.0);
  CHECK(parse_config("lr = 0\n").train.lr == 0.0);
  CHECK(parse_config("patience = 0\n").train.patience == 0);
  CHECK(parse_config("").model == ModelConfig{});
}

TEST_CASE("unreadable config paths are a data error") {
  CHECK_THROWS_AS(load_config_file("/nonexistent/path/run.ini"), DataError);
}
