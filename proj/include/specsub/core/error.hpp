#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specsub {

enum class Errc {
  invalid_argument,
  all_zero,
  rank_deficient_sketch,
  overflow,
  breakdown,
  not_converged,
  dimension_cap,
  cap_reached,
  disconnected_graph,
  io,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::all_zero: return "AllZero";
    case Errc::rank_deficient_sketch: return "RankDeficientSketch";
    case Errc::overflow: return "Overflow";
    case Errc::breakdown: return "Breakdown";
    case Errc::not_converged: return "NotConverged";
    case Errc::dimension_cap: return "DimensionCap";
    case Errc::cap_reached: return "CapReached";
    case Errc::disconnected_graph: return "DisconnectedGraph";
    case Errc::io: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool condition, const char* what) {
  if (!condition) throw Error(Errc::invalid_argument, what);
}

}  // namespace specsub
