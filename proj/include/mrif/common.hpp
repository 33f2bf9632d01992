#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mrif {

enum class ErrorKind {
  InvalidInput,
  Capacity,
  NoCoverage,
  Configuration,
  Parse,
  Integrity,
  Injection,
  InvalidAction,
  Evaluation,
  Training,
  State,
  Split,
  Fit,
  Compatibility,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

/// Planar position in meters. x is the longitude-like axis, y latitude-like.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double linear) {
  return 10.0 * std::log10(linear);
}

/// 64-bit FNV-1a, used for config and schema digests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex_digest(std::uint64_t value);

}  // namespace mrif
