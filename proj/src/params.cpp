#include "wsnauth/params.hpp"

#include <charconv>
#include <sstream>

namespace wsnauth {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string format_params(const SysParams& p) {
  std::ostringstream os;
  os << "curve_id = " << p.curve_id << "\n"
     << "kappa = " << p.kappa << "\n"
     << "ell = " << p.ell << "\n"
     << "id_len = " << p.id_len << "\n"
     << "ts_window = " << p.ts_window << "\n";
  return os.str();
}

Result<SysParams> parse_params(std::string_view text) {
  SysParams p;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;

    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) return Error::DecodeError;
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) return Error::DecodeError;

    std::int64_t n = 0;
    if (key == "curve_id") {
      p.curve_id = std::string(value);
    } else if (key == "kappa") {
      if (!parse_int(value, n)) return Error::DecodeError;
      p.kappa = static_cast<std::uint32_t>(n);
    } else if (key == "ell") {
      if (!parse_int(value, n)) return Error::DecodeError;
      p.ell = static_cast<std::uint32_t>(n);
    } else if (key == "id_len") {
      if (!parse_int(value, n)) return Error::DecodeError;
      p.id_len = static_cast<std::uint32_t>(n);
    } else if (key == "ts_window") {
      if (!parse_int(value, n)) return Error::DecodeError;
      p.ts_window = n;
    } else {
      return Error::DecodeError;
    }
  }
  if (auto v = validate_params(p); !v.ok()) return v.error();
  return p;
}

Result<void> validate_params(const SysParams& p) {
  if (p.curve_id != "p256") return Error::DecodeError;
  if (p.kappa < 64 || p.kappa > 256 || p.kappa % 8 != 0) {
    return Error::DecodeError;
  }
  // The cipher in this suite is keyed with exactly 256 bits.
  if (p.ell != 256) return Error::DecodeError;
  if (p.id_len < 1 || p.id_len > 64) return Error::DecodeError;
  if (p.ts_window < 1) return Error::DecodeError;
  return {};
}

Result<Bytes> pad_id(const SysParams& p, BytesView raw) {
  if (raw.empty() || raw.size() > p.id_len) return Error::IdError;
  Bytes out(raw.begin(), raw.end());
  out.resize(p.id_len, 0x00);
  return out;
}

}  // namespace wsnauth
