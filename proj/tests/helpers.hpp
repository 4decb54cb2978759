#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace testutil {

inline std::filesystem::path data_dir() {
  const char* env = std::getenv("GRIDPLAN_DATA");
  if (env) return env;
  return std::filesystem::path(__FILE__).parent_path().parent_path() / "data";
}

// Fresh scratch directory per call.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto p = std::filesystem::temp_directory_path() /
           ("gridplan_" + tag + "_" + std::to_string(rng()));
  std::filesystem::create_directories(p);
  return p;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace testutil
