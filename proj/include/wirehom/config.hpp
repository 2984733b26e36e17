#pragma once

// Experiment configuration ingestion.  Primary format: flat key-value text
// with [section] headers (diff-friendly provenance); JSON accepted as an
// alternative and flattened to the same dotted-key map.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace wirehom {

struct ConfigMap {
  std::map<std::string, std::string> values;  // "section.key" -> value
  std::string source;                         // file name for diagnostics

  bool has(const std::string& key) const { return values.count(key) > 0; }

  const std::string& get_string(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end())
      throw std::invalid_argument("config " + source + ": missing key '" + key + "'");
    return it->second;
  }
  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = values.find(key);
    return it == values.end() ? dflt : it->second;
  }

  double get_double(const std::string& key) const { return parse_double(key, get_string(key)); }
  double get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
  }

  long get_int(const std::string& key) const {
    const std::string& s = get_string(key);
    try {
      std::size_t pos = 0;
      const long v = std::stol(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument("config " + source + ": key '" + key +
                                  "' is not an integer: '" + s + "'");
    }
  }
  long get_int(const std::string& key, long dflt) const {
    return has(key) ? get_int(key) : dflt;
  }

  bool get_bool(const std::string& key) const {
    std::string s = get_string(key);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw std::invalid_argument("config " + source + ": key '" + key +
                                "' is not a boolean: '" + s + "'");
  }
  bool get_bool(const std::string& key, bool dflt) const {
    return has(key) ? get_bool(key) : dflt;
  }

  // Comma/space separated list of doubles.
  std::vector<double> get_double_list(const std::string& key) const {
    std::string s = get_string(key);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_double(key, tok));
    return out;
  }

 private:
  double parse_double(const std::string& key, const std::string& s) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument("config " + source + ": key '" + key +
                                  "' is not a number: '" + s + "'");
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline void flatten_json(const nlohmann::json& j, const std::string& prefix,
                         ConfigMap& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten_json(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(),
                   out);
    return;
  }
  if (j.is_array()) {
    // Arrays become comma-separated scalars.
    std::string list;
    for (const auto& v : j) {
      if (!list.empty()) list += ",";
      list += v.is_string() ? v.get<std::string>() : v.dump();
    }
    out.values[prefix] = list;
    return;
  }
  out.values[prefix] = j.is_string() ? j.get<std::string>() : j.dump();
}

}  // namespace detail

// Flat key-value format:  "# comment", "[section]", "key = value".
inline ConfigMap parse_config_text(std::istream& in, const std::string& source) {
  ConfigMap cfg;
  cfg.source = source;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::invalid_argument("config " + source + ":" +
                                    std::to_string(line_no) +
                                    ": unterminated section header");
      section = detail::trim(t.substr(1, t.size() - 2));
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config " + source + ":" +
                                  std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config " + source + ":" +
                                  std::to_string(line_no) + ": empty key");
    cfg.values[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

inline ConfigMap parse_config_json(const std::string& text,
                                   const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config " + source + ": JSON parse error: " +
                                e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("config " + source +
                                ": top-level JSON value must be an object");
  ConfigMap cfg;
  cfg.source = source;
  detail::flatten_json(j, "", cfg);
  return cfg;
}

inline ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const std::string t = detail::trim(text);
  if (t.empty())
    throw std::invalid_argument("config " + path + ": file is empty");
  if (t.front() == '{') return parse_config_json(text, path);
  std::istringstream is(text);
  return parse_config_text(is, path);
}

}  // namespace wirehom
