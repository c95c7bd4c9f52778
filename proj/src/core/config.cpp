#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tbnpb {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_num(const std::string& key, const std::string& raw) {
  double v = 0;
  const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  require(res.ec == std::errc() && res.ptr == raw.data() + raw.size(),
          ErrorCode::parse_failure,
          "config key '" + key + "': bad number '" + raw + "'");
  return v;
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& name) {
  Config cfg;
  cfg.name_ = name;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']' && line.size() > 2, ErrorCode::parse_failure,
              name + ":" + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::parse_failure,
            name + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty(), ErrorCode::parse_failure,
            name + ":" + std::to_string(line_no) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), ErrorCode::io_failure, "cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_string(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

std::string Config::get_str(const std::string& key) const {
  const auto it = values_.find(key);
  require(it != values_.end(), ErrorCode::invalid_argument,
          name_ + ": missing config key '" + key + "'");
  return it->second;
}

std::string Config::get_str(const std::string& key,
                            const std::string& def) const {
  const auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

double Config::get_num(const std::string& key) const {
  return to_num(key, get_str(key));
}

double Config::get_num(const std::string& key, double def) const {
  const auto it = values_.find(key);
  return it == values_.end() ? def : to_num(key, it->second);
}

long Config::get_int(const std::string& key, long def) const {
  const double v = get_num(key, static_cast<double>(def));
  require(v == static_cast<double>(static_cast<long>(v)),
          ErrorCode::parse_failure,
          "config key '" + key + "' must be an integer");
  return static_cast<long>(v);
}

bool Config::get_bool(const std::string& key, bool def) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorCode::parse_failure,
       "config key '" + key + "': bad boolean '" + it->second + "'");
}

std::vector<double> Config::get_vec(const std::string& key) const {
  const std::string raw = get_str(key);
  std::vector<double> out;
  std::string cur;
  for (char c : raw) {
    if (c == ',') {
      out.push_back(to_num(key, trim(cur)));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  const std::string last = trim(cur);
  if (!last.empty() || !out.empty()) out.push_back(to_num(key, last));
  return out;
}

std::vector<double> Config::get_vec(const std::string& key,
                                    const std::vector<double>& def) const {
  return has(key) ? get_vec(key) : def;
}

}  // namespace tbnpb
