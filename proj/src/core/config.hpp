#pragma once

#include <map>
#include <string>
#include <vector>

#include "error.hpp"

namespace tbnpb {

// Flat key-value configuration parsed from INI-style text: [section]
// headers, key = value lines, '#' comments. Keys are addressed as
// "section.key". Values are parsed on access.
class Config {
 public:
  Config() = default;

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& name = "<config>");

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_str(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& def) const;
  double get_num(const std::string& key) const;
  double get_num(const std::string& key, double def) const;
  long get_int(const std::string& key, long def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::vector<double> get_vec(const std::string& key) const;
  std::vector<double> get_vec(const std::string& key,
                              const std::vector<double>& def) const;

  void set(const std::string& key, const std::string& value);

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string name_ = "<config>";
};

}  // namespace tbnpb
