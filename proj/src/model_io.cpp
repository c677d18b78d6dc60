#include "fcstgnn/model_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "fcstgnn/errors.hpp"

namespace fcstgnn {

namespace {

constexpr char kMagic[8] = {'F', 'C', 'S', 'T', 'G', 'P', '0', '1'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

struct Reader {
  const std::string& bytes;
  size_t pos = 0;
  std::string what;

  void need(size_t n) const {
    if (bytes.size() - pos < n) throw DataError(what + ": truncated params file");
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes[pos++])) << (8 * i);
    }
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<uint64_t>(static_cast<unsigned char>(bytes[pos++])) << (8 * i);
    }
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(bytes[pos++]);
  }
  std::string str(size_t n) {
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

void save_params(const std::string& path, const Model& model, const TrainConfig& train) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_u64(out, model.seed());

  const std::string config_text = serialize_config(FileConfig{model.config(), train});
  put_u32(out, static_cast<uint32_t>(config_text.size()));
  out += config_text;

  const DataDims& dims = model.dims();
  put_u32(out, static_cast<uint32_t>(dims.sensors));
  put_u32(out, static_cast<uint32_t>(dims.timesteps));
  out.push_back(dims.task == TaskKind::kRegression ? '\0' : '\1');
  put_u32(out, static_cast<uint32_t>(dims.classes));
  put_f64(out, dims.max_rul);

  const ParamStore& store = model.params();
  put_u32(out, static_cast<uint32_t>(store.count()));
  for (int b = 0; b < store.count(); ++b) {
    const std::string& name = store.name(b);
    put_u32(out, static_cast<uint32_t>(name.size()));
    out += name;
    const Tensor& value = store.value(b);
    put_u32(out, static_cast<uint32_t>(value.rank()));
    for (int r = 0; r < value.rank(); ++r) {
      put_u32(out, static_cast<uint32_t>(value.extent(r)));
    }
    for (double v : value.data) put_f64(out, v);
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError(path + ": cannot open for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw DataError(path + ": write failed");
}

LoadedModel load_params(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError(path + ": cannot open params file");
  std::ostringstream buf;
  buf << file.rdbuf();
  const std::string bytes = std::move(buf).str();

  Reader in{bytes, 0, path};
  in.need(sizeof(kMagic));
  if (std::string_view(bytes.data(), sizeof(kMagic)) !=
      std::string_view(kMagic, sizeof(kMagic))) {
    throw DataError(path + ": bad magic, not a params file");
  }
  in.pos = sizeof(kMagic);
  const uint32_t version = in.u32();
  if (version != kVersion) {
    throw DataError(path + ": unsupported params version " + std::to_string(version));
  }
  const uint64_t seed = in.u64();
  const uint32_t config_len = in.u32();
  const FileConfig config = parse_config(in.str(config_len));

  DataDims dims;
  dims.sensors = static_cast<int>(in.u32());
  dims.timesteps = static_cast<int>(in.u32());
  dims.task = in.u8() == 0 ? TaskKind::kRegression : TaskKind::kClassification;
  dims.classes = static_cast<int>(in.u32());
  dims.max_rul = in.f64();

  LoadedModel loaded{config, dims, seed, Model(config.model, dims, seed)};
  ParamStore& store = loaded.model.params();
  const uint32_t blocks = in.u32();
  if (blocks != static_cast<uint32_t>(store.count())) {
    throw DataError(path + ": file holds " + std::to_string(blocks) +
                    " parameter blocks, model has " + std::to_string(store.count()));
  }
  for (uint32_t b = 0; b < blocks; ++b) {
    const std::string name = in.str(in.u32());
    if (!store.has(name)) throw DataError(path + ": unknown parameter block '" + name + "'");
    Tensor& value = store.value(store.id(name));
    const uint32_t rank = in.u32();
    Shape shape;
    for (uint32_t r = 0; r < rank; ++r) shape.push_back(static_cast<int>(in.u32()));
    if (shape != value.shape) {
      throw DataError(path + ": block '" + name + "' is " + shape_str(shape) +
                      ", model expects " + shape_str(value.shape));
    }
    for (double& v : value.data) v = in.f64();
  }
  if (in.pos != bytes.size()) {
    throw DataError(path + ": " + std::to_string(bytes.size() - in.pos) +
                    " trailing bytes");
  }
  return loaded;
}

}  // namespace fcstgnn
