#include "fcstgnn/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "fcstgnn/errors.hpp"

namespace fcstgnn {

namespace {

std::string trim(std::string s) {
  size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, const char* what) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [end, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || end != last) {
    throw ConfigError(key + ": '" + value + "' is not " + what);
  }
  return out;
}

}  // namespace

FileConfig parse_config(const std::string& text) {
  FileConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[model]" && line != "[train]") {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unknown section " + line);
      }
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("config: duplicate key '" + key + "'");
    }

    if (key == "f") {
      cfg.model.patch_size = parse_number<int>(key, value, "an integer");
    } else if (key == "d") {
      cfg.model.feature_dim = parse_number<int>(key, value, "an integer");
    } else if (key == "M") {
      cfg.model.window_size = parse_number<int>(key, value, "an integer");
    } else if (key == "s") {
      cfg.model.stride = parse_number<int>(key, value, "an integer");
    } else if (key == "delta") {
      cfg.model.decay_rate = parse_number<double>(key, value, "a number");
    } else if (key == "branches") {
      cfg.model.branches = parse_number<int>(key, value, "an integer");
    } else if (key == "D") {
      cfg.model.repr_dim = parse_number<int>(key, value, "an integer");
    } else if (key == "head") {
      if (value == "regression") {
        cfg.model.head = TaskKind::kRegression;
      } else if (value == "classification") {
        cfg.model.head = TaskKind::kClassification;
      } else {
        throw ConfigError("head: unknown value '" + value +
                          "' (regression|classification)");
      }
    } else if (key == "ablation") {
      cfg.model.ablation = ablation_from_name(value);
    } else if (key == "batch_size") {
      cfg.train.batch_size = parse_number<int>(key, value, "an integer");
    } else if (key == "epochs") {
      cfg.train.epochs = parse_number<int>(key, value, "an integer");
    } else if (key == "lr") {
      cfg.train.lr = parse_number<double>(key, value, "a number");
    } else if (key == "seed") {
      cfg.train.seed = parse_number<uint64_t>(key, value, "a nonnegative integer");
    } else if (key == "patience") {
      cfg.train.patience = parse_number<int>(key, value, "an integer");
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  cfg.model.validate();
  cfg.train.validate();
  return cfg;
}

FileConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(std::move(buf).str());
}

std::string serialize_config(const FileConfig& cfg) {
  std::ostringstream out;
  out << "[model]\n";
  out << "f = " << cfg.model.patch_size << "\n";
  out << "d = " << cfg.model.feature_dim << "\n";
  out << "M = " << cfg.model.window_size << "\n";
  out << "s = " << cfg.model.stride << "\n";
  out << "delta = " << format_metric(cfg.model.decay_rate) << "\n";
  out << "branches = " << cfg.model.branches << "\n";
  out << "D = " << cfg.model.repr_dim << "\n";
  out << "head = " << task_name(cfg.model.head) << "\n";
  out << "ablation = " << ablation_name(cfg.model.ablation) << "\n";
  out << "\n[train]\n";
  out << "batch_size = " << cfg.train.batch_size << "\n";
  out << "epochs = " << cfg.train.epochs << "\n";
  out << "lr = " << format_metric(cfg.train.lr) << "\n";
  out << "seed = " << cfg.train.seed << "\n";
  out << "patience = " << cfg.train.patience << "\n";
  return std::move(out).str();
}

}  // namespace fcstgnn
