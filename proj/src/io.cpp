#include "anisop/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace anisop {

std::string fmt_g17(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("fmt_g17 failed");
  return std::string(buf, ptr);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

OutputSet::OutputSet(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir_);
}

void OutputSet::write_text(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::path(dir_) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
  names_.push_back(name);
}

void OutputSet::write_json(const std::string& name, const nlohmann::json& j) {
  write_text(name, j.dump(2) + "\n");
}

void OutputSet::record(const std::string& name) { names_.push_back(name); }

void OutputSet::write_manifest() const {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& name : names_) {
    const auto path = std::filesystem::path(dir_) / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("manifest: cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    files.push_back({{"path", name},
                     {"bytes", bytes.size()},
                     {"fnv1a64", fnv1a64_hex(bytes)}});
  }
  nlohmann::json manifest = {{"files", files}};
  const auto path = std::filesystem::path(dir_) / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << manifest.dump(2) << "\n";
}

}  // namespace anisop
