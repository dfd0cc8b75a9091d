#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sdm/cli.hpp"
#include "sdm/error.hpp"

namespace sdm::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = normalize_key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string format_config(const std::map<std::string, std::string>& values) {
  std::ostringstream os;
  for (const auto& [k, v] : values) os << k << " = " << v << '\n';
  return os.str();
}

bool Resolved::has(const std::string& key) const {
  const auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

const std::string& Resolved::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing option --" + key);
  return it->second;
}

double Resolved::num(const std::string& key) const {
  const auto& s = str(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("option --" + key + " expects a number, got '" + s + "'");
  }
}

std::size_t Resolved::count(const std::string& key) const {
  return static_cast<std::size_t>(u64(key));
}

std::uint64_t Resolved::u64(const std::string& key) const {
  const auto& s = str(key);
  try {
    std::size_t used = 0;
    if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("option --" + key + " expects a non-negative integer, got '" + s + "'");
  }
}

bool Resolved::flag(const std::string& key) const {
  const auto& s = str(key);
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw ConfigError("option --" + key + " expects true/false, got '" + s + "'");
}

std::vector<std::string> Resolved::list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::size_t> Resolved::size_list(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : list(key)) {
    Resolved one(std::map<std::string, std::string>{{key, item}});
    out.push_back(one.count(key));
  }
  return out;
}

}  // namespace sdm::cli
