#ifndef WSNAUTH_PERSIST_HPP
#define WSNAUTH_PERSIST_HPP

#include <filesystem>
#include <string>

#include "wsnauth/roles.hpp"

namespace wsnauth {

Result<std::string> read_text_file(const std::filesystem::path& path);
Result<void> write_file(const std::filesystem::path& path, BytesView data);
Result<Bytes> read_binary_file(const std::filesystem::path& path);

Result<void> save_params_file(const std::filesystem::path& path,
                              const SysParams& p);
Result<SysParams> load_params_file(const std::filesystem::path& path);

// Gateway state uses the same key = value format as the parameter file,
// with sorted sensor rows so equal states serialize identically.
Result<void> save_gateway_state(const std::filesystem::path& path,
                                const GatewaySecrets& gw);
Result<GatewaySecrets> load_gateway_state(const std::filesystem::path& path);

Result<void> save_card(const std::filesystem::path& path, const Suite& suite,
                       const SmartCard& card);
Result<SmartCard> load_card(const std::filesystem::path& path,
                            const Suite& suite);

Result<void> save_sensor_key(const std::filesystem::path& path,
                             const SensorIdentity& sensor);
Result<SensorIdentity> load_sensor_key(const std::filesystem::path& path,
                                       const SysParams& p);

// Exclusive advisory lock via O_EXCL lock-file creation; released on
// destruction. Guards the state directory against concurrent mutation.
class DirLock {
 public:
  static Result<DirLock> acquire(const std::filesystem::path& dir);
  ~DirLock();

  DirLock(DirLock&& other) noexcept;
  DirLock& operator=(DirLock&& other) noexcept;
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  explicit DirLock(std::filesystem::path file) : file_(std::move(file)) {}
  std::filesystem::path file_;
};

}  // namespace wsnauth

#endif
