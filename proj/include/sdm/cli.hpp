#pragma once

#include <filesystem>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace sdm::cli {

enum ExitCode : int { ok = 0, usage = 2, data_format = 3, numerical = 4 };

/// `key = value` lines; `#` starts a comment. Keys are normalized to dashes.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);
std::string format_config(const std::map<std::string, std::string>& values);

std::string normalize_key(std::string key);

/// Merged view of one command's options (flag > config file > default).
class Resolved {
 public:
  Resolved() = default;
  explicit Resolved(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const;
  const std::string& str(const std::string& key) const;
  double num(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;
  std::vector<std::size_t> size_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

 private:
  std::map<std::string, std::string> values_;
};

/// Entry point shared by the `sdm` binary and the integration tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdm::cli
