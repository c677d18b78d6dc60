#include "fcstgnn/data.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "fcstgnn/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace fcstgnn {

const std::vector<Sample>& Dataset::split(std::string_view name) const {
  if (name == "train") return train;
  if (name == "val") return val;
  if (name == "test") return test;
  throw DataError("unknown split '" + std::string(name) + "' (train|val|test)");
}

namespace {

constexpr char kMagic[6] = {'F', 'C', 'S', 'T', 'G', '1'};
constexpr uint32_t kBlobVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t get_u32(const std::string& in, size_t& pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<unsigned char>(in[pos + static_cast<size_t>(i)]))
         << (8 * i);
  }
  pos += 4;
  return v;
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<uint32_t>(f)); }

float get_f32(const std::string& in, size_t& pos) {
  return std::bit_cast<float>(get_u32(in, pos));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(path.string() + ": write failed");
}

std::string encode_split(const std::vector<Sample>& samples, const DatasetManifest& m) {
  std::string out;
  const size_t payload = static_cast<size_t>(samples.size()) *
                         (static_cast<size_t>(m.sensors) * m.timesteps * 4 + 4);
  out.reserve(26 + payload);
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kBlobVersion);
  put_u32(out, static_cast<uint32_t>(samples.size()));
  put_u32(out, static_cast<uint32_t>(m.sensors));
  put_u32(out, static_cast<uint32_t>(m.timesteps));
  put_u32(out, m.task == TaskKind::kRegression ? 0u : 1u);
  for (const Sample& s : samples) {
    for (double v : s.values.data) put_f32(out, static_cast<float>(v));
    if (m.task == TaskKind::kRegression) {
      put_f32(out, static_cast<float>(s.target));
    } else {
      put_u32(out, static_cast<uint32_t>(s.label));
    }
  }
  return out;
}

std::vector<Sample> decode_split(const std::string& bytes, const DatasetManifest& m,
                                 const std::string& what, int expect_count) {
  if (bytes.size() < 26 || std::string_view(bytes.data(), 6) != std::string_view(kMagic, 6)) {
    throw DataError(what + ": bad magic, not a dataset blob");
  }
  size_t pos = 6;
  const uint32_t version = get_u32(bytes, pos);
  if (version != kBlobVersion) {
    throw DataError(what + ": unsupported blob version " + std::to_string(version));
  }
  const uint32_t count = get_u32(bytes, pos);
  const uint32_t sensors = get_u32(bytes, pos);
  const uint32_t timesteps = get_u32(bytes, pos);
  const uint32_t label_kind = get_u32(bytes, pos);
  if (sensors != static_cast<uint32_t>(m.sensors) ||
      timesteps != static_cast<uint32_t>(m.timesteps)) {
    throw DataError(what + ": blob is " + std::to_string(sensors) + "x" +
                    std::to_string(timesteps) + ", manifest says " +
                    std::to_string(m.sensors) + "x" + std::to_string(m.timesteps));
  }
  const uint32_t want_kind = m.task == TaskKind::kRegression ? 0u : 1u;
  if (label_kind != want_kind) {
    throw DataError(what + ": label kind " + std::to_string(label_kind) +
                    " does not match task " + task_name(m.task));
  }
  if (count != static_cast<uint32_t>(expect_count)) {
    throw DataError(what + ": blob holds " + std::to_string(count) +
                    " samples, manifest says " + std::to_string(expect_count));
  }
  const size_t sample_bytes = static_cast<size_t>(sensors) * timesteps * 4 + 4;
  if (bytes.size() - pos != count * sample_bytes) {
    throw DataError(what + ": payload is " + std::to_string(bytes.size() - pos) +
                    " bytes, expected " + std::to_string(count * sample_bytes));
  }
  std::vector<Sample> samples(count);
  for (uint32_t k = 0; k < count; ++k) {
    Sample& s = samples[k];
    s.values = Tensor({static_cast<int>(sensors), static_cast<int>(timesteps)});
    for (double& v : s.values.data) v = static_cast<double>(get_f32(bytes, pos));
    if (m.task == TaskKind::kRegression) {
      s.target = static_cast<double>(get_f32(bytes, pos));
    } else {
      s.label = static_cast<int>(get_u32(bytes, pos));
      if (s.label < 0 || s.label >= m.classes) {
        throw DataError(what + ": sample " + std::to_string(k) + " label " +
                        std::to_string(s.label) + " outside [0, " +
                        std::to_string(m.classes) + ")");
      }
    }
  }
  return samples;
}

json manifest_to_json(const DatasetManifest& m) {
  json j;
  j["format_version"] = 1;
  j["name"] = m.name;
  j["task"] = task_name(m.task);
  j["sensors"] = m.sensors;
  j["timesteps"] = m.timesteps;
  if (m.task == TaskKind::kClassification) {
    j["classes"] = m.classes;
  } else {
    j["max_rul"] = m.max_rul;
  }
  j["splits"] = {{"train", m.train_count}, {"val", m.val_count}, {"test", m.test_count}};
  j["standardization"] = {{"mean", m.mean},
                          {"std", m.stddev},
                          {"constant_sensors", m.constant_sensors}};
  j["generator"] = m.generator.empty() ? json() : json::parse(m.generator);
  return j;
}

DatasetManifest manifest_from_json(const json& j, const std::string& what) {
  DatasetManifest m;
  try {
    if (j.at("format_version").get<int>() != 1) {
      throw DataError(what + ": unsupported manifest version");
    }
    m.name = j.at("name").get<std::string>();
    const std::string task = j.at("task").get<std::string>();
    if (task == "regression") {
      m.task = TaskKind::kRegression;
      m.max_rul = j.at("max_rul").get<double>();
    } else if (task == "classification") {
      m.task = TaskKind::kClassification;
      m.classes = j.at("classes").get<int>();
    } else {
      throw DataError(what + ": unknown task '" + task + "'");
    }
    m.sensors = j.at("sensors").get<int>();
    m.timesteps = j.at("timesteps").get<int>();
    m.train_count = j.at("splits").at("train").get<int>();
    m.val_count = j.at("splits").at("val").get<int>();
    m.test_count = j.at("splits").at("test").get<int>();
    const json& st = j.at("standardization");
    m.mean = st.at("mean").get<std::vector<double>>();
    m.stddev = st.at("std").get<std::vector<double>>();
    m.constant_sensors = st.at("constant_sensors").get<std::vector<int>>();
    if (!j.at("generator").is_null()) m.generator = j.at("generator").dump();
  } catch (const json::exception& e) {
    throw DataError(what + ": " + e.what());
  }
  if (m.sensors < 1 || m.timesteps < 1) {
    throw DataError(what + ": sensors/timesteps must be positive");
  }
  return m;
}

}  // namespace

void save_dataset(const std::string& dir, const Dataset& data) {
  const DatasetManifest& m = data.manifest;
  if (m.train_count != static_cast<int>(data.train.size()) ||
      m.val_count != static_cast<int>(data.val.size()) ||
      m.test_count != static_cast<int>(data.test.size())) {
    throw DataError("save_dataset: manifest split counts do not match the data");
  }
  fs::create_directories(dir);
  write_file(fs::path(dir) / "manifest.json", manifest_to_json(m).dump(2) + "\n");
  write_file(fs::path(dir) / "train.bin", encode_split(data.train, m));
  write_file(fs::path(dir) / "val.bin", encode_split(data.val, m));
  write_file(fs::path(dir) / "test.bin", encode_split(data.test, m));
}

Dataset load_dataset(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::exists(root / "manifest.json")) {
    throw DataError(dir + ": no manifest.json (not a dataset container)");
  }
  json j;
  try {
    j = json::parse(read_file(root / "manifest.json"));
  } catch (const json::exception& e) {
    throw DataError(dir + "/manifest.json: " + e.what());
  }
  Dataset data;
  data.manifest = manifest_from_json(j, dir + "/manifest.json");
  data.train = decode_split(read_file(root / "train.bin"), data.manifest, dir + "/train.bin",
                            data.manifest.train_count);
  data.val = decode_split(read_file(root / "val.bin"), data.manifest, dir + "/val.bin",
                          data.manifest.val_count);
  data.test = decode_split(read_file(root / "test.bin"), data.manifest, dir + "/test.bin",
                           data.manifest.test_count);
  return data;
}

void standardize(Dataset& data) {
  DatasetManifest& m = data.manifest;
  if (data.train.empty()) throw DataError("standardize: train split is empty");
  const int sensors = m.sensors;
  const int timesteps = m.timesteps;
  const double count = static_cast<double>(data.train.size()) * timesteps;

  std::vector<double> mean(static_cast<size_t>(sensors), 0.0);
  std::vector<double> var(static_cast<size_t>(sensors), 0.0);
  for (const Sample& s : data.train) {
    for (int i = 0; i < sensors; ++i) {
      for (int t = 0; t < timesteps; ++t) mean[static_cast<size_t>(i)] += s.values.at2(i, t);
    }
  }
  for (double& v : mean) v /= count;
  for (const Sample& s : data.train) {
    for (int i = 0; i < sensors; ++i) {
      for (int t = 0; t < timesteps; ++t) {
        const double d = s.values.at2(i, t) - mean[static_cast<size_t>(i)];
        var[static_cast<size_t>(i)] += d * d;
      }
    }
  }

  m.mean = mean;
  m.stddev.assign(static_cast<size_t>(sensors), 1.0);
  m.constant_sensors.clear();
  for (int i = 0; i < sensors; ++i) {
    const double sd = std::sqrt(var[static_cast<size_t>(i)] / count);
    if (sd > 1e-12) {
      m.stddev[static_cast<size_t>(i)] = sd;
    } else {
      m.constant_sensors.push_back(i);
    }
  }

  for (std::vector<Sample>* split : {&data.train, &data.val, &data.test}) {
    for (Sample& s : *split) {
      for (int i = 0; i < sensors; ++i) {
        for (int t = 0; t < timesteps; ++t) {
          s.values.at2(i, t) =
              (s.values.at2(i, t) - m.mean[static_cast<size_t>(i)]) /
              m.stddev[static_cast<size_t>(i)];
        }
      }
    }
  }
}

namespace {

// 60/20/20 of count, with a nonempty train split for any count >= 1.
void split_counts(int count, int* n_train, int* n_val, int* n_test) {
  *n_train = std::max(1, count * 3 / 5);
  const int rest = count - *n_train;
  *n_val = rest / 2;
  *n_test = rest - *n_val;
}

double parse_cell(const std::string& cell, const std::string& where) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [end, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || end != last) {
    throw DataError(where + ": '" + cell + "' is not a number");
  }
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    std::string cell = line.substr(start, comma == std::string::npos ? comma : comma - start);
    // trim spaces and a trailing CR
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r' || cell.back() == '\t')) {
      cell.pop_back();
    }
    size_t lead = 0;
    while (lead < cell.size() && (cell[lead] == ' ' || cell[lead] == '\t')) ++lead;
    cells.push_back(cell.substr(lead));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

// Rows of numeric cells keyed by 1-based line number; blank lines skipped.
std::vector<std::pair<int, std::vector<std::string>>> read_csv_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open");
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line) {
      if (c != ' ' && c != '\t') {
        blank = false;
        break;
      }
    }
    if (blank) continue;
    rows.emplace_back(lineno, split_line(line));
  }
  return rows;
}

struct RawSample {
  std::string id;
  std::vector<std::vector<double>> by_timestep;  // L rows of N values
};

std::vector<RawSample> read_per_file(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const std::string stem = entry.path().stem().string();
    if (stem == "labels") continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError(dir.string() + ": no sample .csv files found");

  std::vector<RawSample> samples;
  for (const fs::path& file : files) {
    RawSample s;
    s.id = file.stem().string();
    for (const auto& [lineno, cells] : read_csv_rows(file)) {
      std::vector<double> row;
      row.reserve(cells.size());
      for (size_t c = 0; c < cells.size(); ++c) {
        row.push_back(parse_cell(cells[c], file.filename().string() + ":" +
                                               std::to_string(lineno)));
      }
      s.by_timestep.push_back(std::move(row));
    }
    if (s.by_timestep.empty()) throw DataError(file.string() + ": no rows");
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<RawSample> read_long_format(const fs::path& dir) {
  const fs::path file = dir / "data.csv";
  std::vector<RawSample> samples;
  std::map<std::string, int> seen;  // id -> index into samples while its block is open
  std::string open_id;
  for (const auto& [lineno, cells] : read_csv_rows(file)) {
    const std::string where = "data.csv:" + std::to_string(lineno);
    if (cells.size() < 2) throw DataError(where + ": need sample_id plus sensor values");
    const std::string& id = cells[0];
    if (id != open_id) {
      if (seen.count(id)) {
        throw DataError(where + ": sample '" + id + "' reappears; rows must be contiguous");
      }
      seen[id] = static_cast<int>(samples.size());
      samples.push_back(RawSample{id, {}});
      open_id = id;
    }
    std::vector<double> row;
    row.reserve(cells.size() - 1);
    for (size_t c = 1; c < cells.size(); ++c) row.push_back(parse_cell(cells[c], where));
    samples.back().by_timestep.push_back(std::move(row));
  }
  if (samples.empty()) throw DataError(file.string() + ": no rows");
  return samples;
}

}  // namespace

Dataset ingest_csv(const IngestOptions& opts) {
  const fs::path dir(opts.source_dir);
  if (!fs::is_directory(dir)) throw DataError(opts.source_dir + ": not a directory");

  std::vector<RawSample> raw =
      opts.long_format ? read_long_format(dir) : read_per_file(dir);

  // First sample pins the dataset shape.
  const int timesteps = static_cast<int>(raw[0].by_timestep.size());
  const int sensors = static_cast<int>(raw[0].by_timestep[0].size());
  const std::string src = opts.long_format ? "data.csv" : raw[0].id + ".csv";
  for (const RawSample& s : raw) {
    const std::string name = opts.long_format ? "data.csv sample '" + s.id + "'"
                                              : s.id + ".csv";
    if (static_cast<int>(s.by_timestep.size()) != timesteps) {
      throw DataError(name + ": expected " + std::to_string(timesteps) +
                      " timesteps, got " + std::to_string(s.by_timestep.size()));
    }
    for (size_t r = 0; r < s.by_timestep.size(); ++r) {
      if (static_cast<int>(s.by_timestep[r].size()) != sensors) {
        throw DataError(name + " row " + std::to_string(r + 1) + ": expected " +
                        std::to_string(sensors) + " sensor columns, got " +
                        std::to_string(s.by_timestep[r].size()));
      }
    }
  }

  // Labels: id -> raw string.
  const fs::path labels_path = dir / "labels.csv";
  if (!fs::exists(labels_path)) throw DataError(labels_path.string() + ": missing");
  std::map<std::string, std::pair<int, std::string>> labels;  // id -> (line, value)
  for (const auto& [lineno, cells] : read_csv_rows(labels_path)) {
    if (cells.size() != 2) {
      throw DataError("labels.csv:" + std::to_string(lineno) + ": expected 'id,label'");
    }
    if (!labels.emplace(cells[0], std::make_pair(lineno, cells[1])).second) {
      throw DataError("labels.csv:" + std::to_string(lineno) + ": duplicate id '" +
                      cells[0] + "'");
    }
  }

  std::vector<Sample> samples;
  samples.reserve(raw.size());
  int max_class = 0;
  for (const RawSample& r : raw) {
    auto it = labels.find(r.id);
    if (it == labels.end()) {
      throw DataError("labels.csv: no label for sample '" + r.id + "'");
    }
    const std::string where = "labels.csv:" + std::to_string(it->second.first);
    Sample s;
    s.values = Tensor({sensors, timesteps});
    for (int t = 0; t < timesteps; ++t) {
      for (int i = 0; i < sensors; ++i) {
        s.values.at2(i, t) = r.by_timestep[static_cast<size_t>(t)][static_cast<size_t>(i)];
      }
    }
    if (opts.task == TaskKind::kClassification) {
      const double v = parse_cell(it->second.second, where);
      s.label = static_cast<int>(v);
      if (s.label < 0 || static_cast<double>(s.label) != v) {
        throw DataError(where + ": class label must be a nonnegative integer, got '" +
                        it->second.second + "'");
      }
      max_class = std::max(max_class, s.label);
    } else {
      s.target = parse_cell(it->second.second, where);
      if (opts.max_rul > 0.0) s.target = std::min(s.target, opts.max_rul);
    }
    samples.push_back(std::move(s));
    labels.erase(it);
  }
  if (!labels.empty()) {
    throw DataError("labels.csv:" + std::to_string(labels.begin()->second.first) +
                    ": label for unknown sample '" + labels.begin()->first + "'");
  }

  Dataset data;
  data.manifest.name = opts.name;
  data.manifest.task = opts.task;
  data.manifest.sensors = sensors;
  data.manifest.timesteps = timesteps;
  if (opts.task == TaskKind::kClassification) {
    data.manifest.classes = max_class + 1;
  } else {
    data.manifest.max_rul = opts.max_rul;
  }

  std::vector<int> order(samples.size());
  for (size_t i = 0; i < order.size(); ++i) order[static_cast<size_t>(i)] = static_cast<int>(i);
  Rng shuffle_rng = Rng(opts.seed).derive("ingest/split");
  shuffle_rng.shuffle(order);
  int n_train = 0, n_val = 0, n_test = 0;
  split_counts(static_cast<int>(samples.size()), &n_train, &n_val, &n_test);
  for (int k = 0; k < static_cast<int>(order.size()); ++k) {
    Sample& s = samples[static_cast<size_t>(order[static_cast<size_t>(k)])];
    if (k < n_train) {
      data.train.push_back(std::move(s));
    } else if (k < n_train + n_val) {
      data.val.push_back(std::move(s));
    } else {
      data.test.push_back(std::move(s));
    }
  }
  data.manifest.train_count = n_train;
  data.manifest.val_count = n_val;
  data.manifest.test_count = n_test;
  standardize(data);
  return data;
}

Dataset synth_dedt(const DedtOptions& opts) {
  if (opts.sensors < 2) throw ConfigError("synth_dedt: need >= 2 sensors");
  if (opts.lag < 1) throw ConfigError("synth_dedt: lag must be >= 1");
  if (opts.per_class < 1) throw ConfigError("synth_dedt: per_class must be >= 1");
  if (!(opts.sigma >= 0.0)) throw ConfigError("synth_dedt: sigma must be >= 0");
  if (!(opts.texture >= 0.0)) throw ConfigError("synth_dedt: texture must be >= 0");

  const int N = opts.sensors;
  const int L = opts.timesteps;
  const int tau = opts.lag;
  const int span = L - tau;        // coupled source positions
  const int src_blocks = span / tau;
  // Class-0 shifts move whole blocks so within-patch structure stays
  // identical across classes. The preferred range keeps every residual
  // alignment at least 2 blocks away (invisible to any 2-patch window);
  // shorter series fall back to a 1-block margin.
  int klo = 3, khi = src_blocks - 3;
  if (klo > khi) {
    klo = 2;
    khi = src_blocks - 2;
  }
  if (klo > khi) {
    throw ConfigError("synth_dedt: timesteps must cover >= 5 lag-length blocks, got " +
                      std::to_string(opts.timesteps));
  }
  const Rng master(opts.seed);

  // Hidden coupled pair, fixed for the whole dataset.
  Rng pair_rng = master.derive("dedt/pair");
  const int src = static_cast<int>(pair_rng.below(N));
  const int dst = static_cast<int>((src + 1 + pair_rng.below(N - 1)) % N);

  const int total = 2 * opts.per_class;
  std::vector<Sample> all(static_cast<size_t>(total));
  for (int g = 0; g < total; ++g) {
    const int cls = g < opts.per_class ? 0 : 1;
    Rng rng = master.derive("dedt/sample", static_cast<uint64_t>(g));
    Sample& s = all[static_cast<size_t>(g)];
    s.label = cls;
    s.values = Tensor({N, L});
    for (int i = 0; i < N; ++i) {
      double level = 0.0;
      for (int t = 0; t < L; ++t) {
        if (t % tau == 0) level = rng.normal();
        s.values.at2(i, t) = level + opts.texture * rng.normal();
      }
    }
    // Drawn for both classes to keep the streams aligned; class 1 ignores it.
    const int shift = tau * (klo + static_cast<int>(rng.below(khi - klo + 1)));
    // Head of the coupled sensor: an unseen source block keeps its marginals
    // equal to the coupled tail's.
    const double head_level = rng.normal();
    for (int t = 0; t < tau; ++t) {
      s.values.at2(dst, t) =
          opts.alpha * (head_level + opts.texture * rng.normal()) +
          opts.sigma * rng.normal();
    }
    for (int t = 0; t < span; ++t) {
      const int at = cls == 1 ? t : (t + shift) % span;
      s.values.at2(dst, t + tau) =
          opts.alpha * s.values.at2(src, at) + opts.sigma * rng.normal();
    }
  }

  Dataset data;
  data.manifest.name = "synth_dedt";
  data.manifest.task = TaskKind::kClassification;
  data.manifest.sensors = N;
  data.manifest.timesteps = L;
  data.manifest.classes = 2;
  {
    json gen;
    gen["kind"] = "dedt";
    gen["seed"] = opts.seed;
    gen["alpha"] = opts.alpha;
    gen["lag"] = tau;
    gen["sigma"] = opts.sigma;
    gen["texture"] = opts.texture;
    gen["per_class"] = opts.per_class;
    data.manifest.generator = gen.dump();
  }

  // Balanced 60/20/20 split within each class.
  int n_train = 0, n_val = 0, n_test = 0;
  split_counts(opts.per_class, &n_train, &n_val, &n_test);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<int> order(static_cast<size_t>(opts.per_class));
    for (int k = 0; k < opts.per_class; ++k) {
      order[static_cast<size_t>(k)] = cls * opts.per_class + k;
    }
    Rng split_rng = master.derive("dedt/split", static_cast<uint64_t>(cls));
    split_rng.shuffle(order);
    for (int k = 0; k < opts.per_class; ++k) {
      Sample& s = all[static_cast<size_t>(order[static_cast<size_t>(k)])];
      if (k < n_train) {
        data.train.push_back(std::move(s));
      } else if (k < n_train + n_val) {
        data.val.push_back(std::move(s));
      } else {
        data.test.push_back(std::move(s));
      }
    }
  }
  data.manifest.train_count = static_cast<int>(data.train.size());
  data.manifest.val_count = static_cast<int>(data.val.size());
  data.manifest.test_count = static_cast<int>(data.test.size());
  standardize(data);
  return data;
}

Dataset synth_rul(const RulOptions& opts) {
  if (opts.sensors < 2) throw ConfigError("synth_rul: need >= 2 sensors");
  if (opts.trajectories < 1) throw ConfigError("synth_rul: trajectories must be >= 1");
  if (opts.samples_per_trajectory < 1) {
    throw ConfigError("synth_rul: samples_per_trajectory must be >= 1");
  }
  if (opts.age_stride < 1) throw ConfigError("synth_rul: age_stride must be >= 1");
  if (opts.timesteps < 1) throw ConfigError("synth_rul: timesteps must be >= 1");
  if (!(opts.noise >= 0.0)) throw ConfigError("synth_rul: noise must be >= 0");
  if (!(opts.max_rul > 0.0)) throw ConfigError("synth_rul: max_rul must be > 0");

  const int N = opts.sensors;
  const int L = opts.timesteps;
  const int per = opts.samples_per_trajectory;
  const Rng master(opts.seed);

  // One sensor response model for the whole fleet: offset plus gain times the
  // degradation level.
  Rng prof = master.derive("rul/profile");
  std::vector<double> offset(static_cast<size_t>(N)), gain(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) offset[static_cast<size_t>(i)] = prof.uniform(-1.0, 1.0);
  for (int i = 0; i < N; ++i) gain[static_cast<size_t>(i)] = prof.uniform(0.5, 2.0);

  std::vector<std::vector<Sample>> by_traj(static_cast<size_t>(opts.trajectories));
  for (int k = 0; k < opts.trajectories; ++k) {
    Rng rng = master.derive("rul/traj", static_cast<uint64_t>(k));
    const int span_needed = L + (per - 1) * opts.age_stride;
    const int fail_time = span_needed + static_cast<int>(rng.below(L + 1));
    for (int m = 0; m < per; ++m) {
      const int age = m * opts.age_stride;
      Sample s;
      s.values = Tensor({N, L});
      for (int i = 0; i < N; ++i) {
        for (int t = 0; t < L; ++t) {
          const double level = static_cast<double>(age + t) / fail_time;
          s.values.at2(i, t) = offset[static_cast<size_t>(i)] +
                               gain[static_cast<size_t>(i)] * level +
                               opts.noise * rng.normal();
        }
      }
      s.target = std::min(opts.max_rul, static_cast<double>(fail_time - (age + L - 1)));
      by_traj[static_cast<size_t>(k)].push_back(std::move(s));
    }
  }

  Dataset data;
  data.manifest.name = "synth_rul";
  data.manifest.task = TaskKind::kRegression;
  data.manifest.sensors = N;
  data.manifest.timesteps = L;
  data.manifest.max_rul = opts.max_rul;
  {
    json gen;
    gen["kind"] = "rul";
    gen["seed"] = opts.seed;
    gen["trajectories"] = opts.trajectories;
    gen["samples_per_trajectory"] = per;
    gen["age_stride"] = opts.age_stride;
    gen["noise"] = opts.noise;
    data.manifest.generator = gen.dump();
  }

  // Whole trajectories stay in one split so test windows are from unseen
  // degradation curves.
  std::vector<int> order(static_cast<size_t>(opts.trajectories));
  for (int k = 0; k < opts.trajectories; ++k) order[static_cast<size_t>(k)] = k;
  Rng split_rng = master.derive("rul/split");
  split_rng.shuffle(order);
  int n_train = 0, n_val = 0, n_test = 0;
  split_counts(opts.trajectories, &n_train, &n_val, &n_test);
  for (int k = 0; k < opts.trajectories; ++k) {
    std::vector<Sample>& traj = by_traj[static_cast<size_t>(order[static_cast<size_t>(k)])];
    std::vector<Sample>* dest = k < n_train            ? &data.train
                                : k < n_train + n_val  ? &data.val
                                                       : &data.test;
    for (Sample& s : traj) dest->push_back(std::move(s));
  }
  data.manifest.train_count = static_cast<int>(data.train.size());
  data.manifest.val_count = static_cast<int>(data.val.size());
  data.manifest.test_count = static_cast<int>(data.test.size());
  standardize(data);
  return data;
}

std::vector<std::vector<int>> make_eval_batches(int count, int batch_size) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  std::vector<std::vector<int>> batches;
  for (int start = 0; start < count; start += batch_size) {
    std::vector<int> batch;
    for (int i = start; i < std::min(count, start + batch_size); ++i) batch.push_back(i);
    batches.push_back(std::move(batch));
  }
  return batches;
}

std::vector<std::vector<int>> make_batches(int count, int batch_size, Rng& rng) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  std::vector<int> order(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) order[static_cast<size_t>(i)] = i;
  rng.shuffle(order);
  std::vector<std::vector<int>> batches;
  for (int start = 0; start < count; start += batch_size) {
    std::vector<int> batch(order.begin() + start,
                           order.begin() + std::min(count, start + batch_size));
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace fcstgnn
