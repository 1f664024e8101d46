#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lv/error.hpp"
#include "lv/io.hpp"

namespace lv {

/// Flat experiment configuration: `section.key=value` lines, `#` starts a comment.
/// Later lines win over earlier ones.
struct ConfigFile {
  std::vector<std::pair<std::string, std::string>> entries;

  static ConfigFile parse(std::string_view text) {
    ConfigFile c;
    std::size_t lineno = 0;
    for (auto line : split(text, '\n')) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string_view::npos) line = line.substr(0, hash);
      const auto key = trim(line.substr(0, line.find('=')));
      if (key.empty() && trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos || key.empty())
        fail(Errc::InvalidParams, "config line " + std::to_string(lineno) + ": expected key=value");
      c.set(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return c;
  }

  static ConfigFile load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

  void set(std::string key, std::string value) {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.first == key; });
    if (it != entries.end())
      it->second = std::move(value);
    else
      entries.emplace_back(std::move(key), std::move(value));
  }

  const std::string* get(std::string_view key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }

 private:
  static std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  }
};

struct ConfigKey {
  std::string_view key;
  std::string_view flag;
};

// Config keys and the command-line flag each one stands for.
inline constexpr ConfigKey kConfigKeys[] = {
    {"seed", "--seed"},
    {"jobs", "--jobs"},
    {"dataset.manifest", "--manifest"},
    {"dataset.features", "--features"},
    {"synth.n", "--n"},
    {"synth.defect_frac", "--defect-frac"},
    {"synth.stats", "--stats"},
    {"synth.size", "--size"},
    {"descriptor.name", "--desc"},
    {"descriptor.cell", "--cell"},
    {"descriptor.resize", "--resize"},
    {"edge.high", "--edge-high"},
    {"edge.low", "--edge-low"},
    {"edge.threshold", "--edge-threshold"},
    {"classifier.name", "--classifier"},
    {"protocol.k", "--folds"},
    {"protocol.grid", "--grid"},
    {"output.dir", "--out"},
    {"ann.hidden", "--g"},
    {"ann.split", "--split"},
    {"ann.epochs", "--epochs"},
    {"ann.activation", "--activation"},
    {"ann.output", "--output"},
    {"ann.lr", "--lr"},
    {"ann.batch", "--batch"},
};

inline std::string_view config_flag(std::string_view key) {
  for (const auto& k : kConfigKeys)
    if (k.key == key) return k.flag;
  return {};
}

/// Turns the entries into `--flag value` tokens, keeping those `accepts`
/// allows. Unknown keys are rejected so typos do not pass silently.
template <typename Accepts>
std::vector<std::string> config_tokens(const ConfigFile& c, Accepts&& accepts) {
  std::vector<std::string> out;
  for (const auto& [key, value] : c.entries) {
    const auto flag = config_flag(key);
    if (flag.empty()) fail(Errc::UnknownName, "unknown config key: " + key);
    if (!accepts(flag)) continue;
    out.emplace_back(flag);
    out.push_back(value);
  }
  return out;
}

}  // namespace lv
