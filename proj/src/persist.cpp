#include "wsnauth/persist.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace wsnauth {

namespace {

using KvPairs = std::vector<std::pair<std::string, std::string>>;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

Result<KvPairs> parse_kv(const std::string& text) {
  KvPairs out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) return Error::DecodeError;
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) return Error::DecodeError;
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

const std::string* find_kv(const KvPairs& kv, std::string_view key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return &v;
  }
  return nullptr;
}

}  // namespace

Result<std::string> read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error::IoError;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Result<void> write_file(const std::filesystem::path& path, BytesView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return Error::IoError;
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) return Error::IoError;
  return {};
}

Result<Bytes> read_binary_file(const std::filesystem::path& path) {
  auto text = read_text_file(path);
  if (!text.ok()) return text.error();
  return to_bytes(text.value());
}

Result<void> save_params_file(const std::filesystem::path& path,
                              const SysParams& p) {
  return write_file(path, to_bytes(format_params(p)));
}

Result<SysParams> load_params_file(const std::filesystem::path& path) {
  auto text = read_text_file(path);
  if (!text.ok()) return text.error();
  return parse_params(text.value());
}

Result<void> save_gateway_state(const std::filesystem::path& path,
                                const GatewaySecrets& gw) {
  std::ostringstream os;
  os << "id_gw = " << to_hex(gw.id_gw) << "\n";
  os << "y = " << to_hex(gw.y.bytes()) << "\n";
  os << "y_pub = " << to_hex(gw.y_pub.bytes()) << "\n";
  os << "z = " << to_hex(gw.z.k) << "\n";
  for (const auto& [id, key] : gw.sensor_registry) {
    os << "sensor." << to_hex(id) << " = " << to_hex(key.k) << "\n";
  }
  return write_file(path, to_bytes(os.str()));
}

Result<GatewaySecrets> load_gateway_state(const std::filesystem::path& path) {
  auto text = read_text_file(path);
  if (!text.ok()) return text.error();
  auto kv = parse_kv(text.value());
  if (!kv.ok()) return kv.error();

  const std::string* id_gw = find_kv(kv.value(), "id_gw");
  const std::string* y = find_kv(kv.value(), "y");
  const std::string* y_pub = find_kv(kv.value(), "y_pub");
  const std::string* z = find_kv(kv.value(), "z");
  if (id_gw == nullptr || y == nullptr || y_pub == nullptr || z == nullptr) {
    return Error::DecodeError;
  }

  GatewaySecrets gw;
  auto id = from_hex(*id_gw);
  if (!id.ok()) return id.error();
  gw.id_gw = std::move(id).value();

  auto y_raw = from_hex(*y);
  if (!y_raw.ok()) return y_raw.error();
  auto y_scalar = Scalar::from_bytes(y_raw.value());
  if (!y_scalar.ok()) return y_scalar.error();
  gw.y = std::move(y_scalar).value();

  auto y_pub_raw = from_hex(*y_pub);
  if (!y_pub_raw.ok()) return y_pub_raw.error();
  auto y_point = GroupElement::decode(y_pub_raw.value());
  if (!y_point.ok()) return y_point.error();
  gw.y_pub = std::move(y_point).value();

  auto z_raw = from_hex(*z);
  if (!z_raw.ok()) return z_raw.error();
  gw.z = SymKey{std::move(z_raw).value()};

  for (const auto& [key, value] : kv.value()) {
    if (key.rfind("sensor.", 0) != 0) continue;
    auto sensor_id = from_hex(key.substr(7));
    auto sensor_key = from_hex(value);
    if (!sensor_id.ok() || !sensor_key.ok()) return Error::DecodeError;
    gw.sensor_registry.emplace(std::move(sensor_id).value(),
                               SymKey{std::move(sensor_key).value()});
  }
  return gw;
}

Result<void> save_card(const std::filesystem::path& path, const Suite& suite,
                       const SmartCard& card) {
  return write_file(path, card.image(suite));
}

Result<SmartCard> load_card(const std::filesystem::path& path,
                            const Suite& suite) {
  auto raw = read_binary_file(path);
  if (!raw.ok()) return raw.error();
  return SmartCard::from_image(suite, raw.value());
}

Result<void> save_sensor_key(const std::filesystem::path& path,
                             const SensorIdentity& sensor) {
  std::ostringstream os;
  os << "id = " << to_hex(sensor.id) << "\n";
  os << "k_gs = " << to_hex(sensor.k_gs.k) << "\n";
  return write_file(path, to_bytes(os.str()));
}

Result<SensorIdentity> load_sensor_key(const std::filesystem::path& path,
                                       const SysParams& p) {
  auto text = read_text_file(path);
  if (!text.ok()) return text.error();
  auto kv = parse_kv(text.value());
  if (!kv.ok()) return kv.error();
  const std::string* id = find_kv(kv.value(), "id");
  const std::string* k = find_kv(kv.value(), "k_gs");
  if (id == nullptr || k == nullptr) return Error::DecodeError;

  auto id_raw = from_hex(*id);
  auto k_raw = from_hex(*k);
  if (!id_raw.ok() || !k_raw.ok()) return Error::DecodeError;
  if (id_raw.value().size() != p.id_len ||
      k_raw.value().size() != p.ell_bytes()) {
    return Error::LengthMismatch;
  }
  return SensorIdentity{std::move(id_raw).value(),
                        SymKey{std::move(k_raw).value()}};
}

Result<DirLock> DirLock::acquire(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return Error::IoError;
  std::filesystem::path file = dir / ".lock";
  int fd = ::open(file.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) return Error::IoError;
  ::close(fd);
  return DirLock(std::move(file));
}

DirLock::~DirLock() {
  if (!file_.empty()) {
    std::error_code ec;
    std::filesystem::remove(file_, ec);
  }
}

DirLock::DirLock(DirLock&& other) noexcept : file_(std::move(other.file_)) {
  other.file_.clear();
}

DirLock& DirLock::operator=(DirLock&& other) noexcept {
  if (this != &other) {
    if (!file_.empty()) {
      std::error_code ec;
      std::filesystem::remove(file_, ec);
    }
    file_ = std::move(other.file_);
    other.file_.clear();
  }
  return *this;
}

}  // namespace wsnauth
