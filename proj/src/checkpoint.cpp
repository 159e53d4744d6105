#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ipp/qlearn.hpp"

namespace ipp {

// Layout (little-endian):
//   "IPPQNET\0" | u32 version | i32 hidden | i32 outputs | i32 input_dim
//   | f64 x_offset x_scale y_offset y_scale
//   | i32 vertex_count | i32 start | i32 terminal | f64 budget | f64 spacing
//   | u64 seed | i32 episodes | f64 gamma | f64 learning_rate
//   | u64 n | f64[n] parameters | u64 fnv1a64(all preceding bytes)

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

namespace {

constexpr char kMagic[8] = {'I', 'P', 'P', 'Q', 'N', 'E', 'T', '\0'};

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void put(const T& v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > in_.size()) throw CheckpointError("checkpoint is truncated");
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string save_checkpoint(const QNetwork& net, const TrainingConfig& cfg,
                            const CheckpointMeta& meta) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::int32_t>(net.hidden_size());
  w.put<std::int32_t>(net.output_size());
  w.put<std::int32_t>(2);
  const auto& n = net.normalization();
  w.put(n.x_offset);
  w.put(n.x_scale);
  w.put(n.y_offset);
  w.put(n.y_scale);
  w.put<std::int32_t>(meta.vertex_count);
  w.put<std::int32_t>(meta.start);
  w.put<std::int32_t>(meta.terminal);
  w.put(meta.budget);
  w.put(meta.spacing);
  w.put<std::uint64_t>(cfg.seed);
  w.put<std::int32_t>(cfg.episodes);
  w.put(cfg.gamma);
  w.put(cfg.learning_rate);
  const auto params = net.parameters();
  w.put<std::uint64_t>(params.size());
  for (double p : params) w.put(p);
  const auto sum = fnv1a(w.str());
  w.put(sum);
  return std::move(w.str());
}

Checkpoint load_checkpoint(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) + 8) throw CheckpointError("checkpoint is truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw CheckpointError("not a Q-network checkpoint (bad magic)");
  Reader r(bytes.substr(sizeof(kMagic)));
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) +
                          " (expected " + std::to_string(kCheckpointVersion) + ")");
  const int hidden = r.get<std::int32_t>();
  const int outputs = r.get<std::int32_t>();
  const int input_dim = r.get<std::int32_t>();
  if (hidden < 1 || outputs < 1 || input_dim != 2) throw CheckpointError("bad layer shape header");
  Normalization norm;
  norm.x_offset = r.get<double>();
  norm.x_scale = r.get<double>();
  norm.y_offset = r.get<double>();
  norm.y_scale = r.get<double>();
  Checkpoint ck;
  ck.meta.vertex_count = r.get<std::int32_t>();
  ck.meta.start = r.get<std::int32_t>();
  ck.meta.terminal = r.get<std::int32_t>();
  ck.meta.budget = r.get<double>();
  ck.meta.spacing = r.get<double>();
  ck.meta.seed = r.get<std::uint64_t>();
  ck.meta.episodes = r.get<std::int32_t>();
  ck.meta.gamma = r.get<double>();
  ck.meta.learning_rate = r.get<double>();
  const auto count = r.get<std::uint64_t>();
  if (count != QNetwork::parameter_count(hidden, outputs))
    throw CheckpointError("parameter count does not match the layer shapes");
  QNetwork net = QNetwork::zeros(hidden, outputs, norm);
  auto params = net.parameters();
  for (auto& p : params) p = r.get<double>();
  const std::size_t payload = sizeof(kMagic) + r.pos();
  const auto stored = r.get<std::uint64_t>();
  if (stored != fnv1a(bytes.substr(0, payload))) throw CheckpointError("checkpoint checksum mismatch");
  if (sizeof(kMagic) + r.pos() != bytes.size())
    throw CheckpointError("trailing bytes after checkpoint payload");
  ck.network = std::move(net);
  return ck;
}

void write_checkpoint_file(const std::string& filename, const std::string& bytes) {
  std::ofstream f(filename, std::ios::binary);
  if (!f) throw CheckpointError("cannot write checkpoint '" + filename + "'");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_checkpoint_file(const std::string& filename) {
  std::ifstream f(filename, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint '" + filename + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace ipp
