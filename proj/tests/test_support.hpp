#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "textgcn/rng.hpp"

// Scratch directory removed when the test scope ends.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("textgcn-test-" + std::to_string(textgcn::mix64(reinterpret_cast<std::uintptr_t>(this) ^ ++counter)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}
