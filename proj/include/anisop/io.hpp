#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace anisop {

/// Shortest round-trippable decimal form; '.' decimal point, locale-free.
std::string fmt_g17(double v);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

/// Collects emitted files so a run can close with a manifest of
/// (path, size, content hash) entries.
class OutputSet {
 public:
  explicit OutputSet(std::string dir);

  const std::string& dir() const { return dir_; }

  /// Writes text to dir/name and records it.
  void write_text(const std::string& name, const std::string& text);
  void write_json(const std::string& name, const nlohmann::json& j);
  /// Registers a file already produced under dir (e.g. CSV writers).
  void record(const std::string& name);

  void write_manifest() const;  // dir/manifest.json, not self-listed

 private:
  std::string dir_;
  std::vector<std::string> names_;
};

}  // namespace anisop
