#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qvar {

// Errors raised while reading on-disk artifacts. `line` is 1-based, 0 when
// the error is not tied to a specific line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(format(file, line, what)), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& file, std::size_t line,
                            const std::string& what) {
    if (line == 0) return file + ": " + what;
    return file + ":" + std::to_string(line) + ": " + what;
  }
  std::size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string_view> split_char(std::string_view s, char sep);

// FNV-1a, used for config/input/analyzer fingerprints in manifests and the
// index header. Stable across platforms.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

std::string read_file(const std::filesystem::path& path);

// Write via temp file + rename so partially written outputs are never visible.
void atomic_write(const std::filesystem::path& path, std::string_view contents);

// Splittable counter-based RNG (splitmix64). All experiment randomness flows
// through this so outputs are identical across platforms and thread counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Modulo bias is negligible for the small n used here.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  // Derive an independent stream, e.g. one per topic.
  Rng split(std::uint64_t salt) {
    return Rng(next() ^ (salt * 0x9e3779b97f4a7c15ULL) ^ salt);
  }

 private:
  std::uint64_t state_;
};

}  // namespace qvar
