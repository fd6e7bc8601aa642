#pragma once

#include "lvcheck/error.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace lvtest {

inline std::string fixture(const std::string& name) { return std::string(LVCHECK_FIXTURES) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("lvcheck_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

template <class F>
lvcheck::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const lvcheck::Error& e) {
    return e.code();
  }
  FAIL("expected an lvcheck::Error");
  return lvcheck::ErrorCode::Io;
}

}  // namespace lvtest
