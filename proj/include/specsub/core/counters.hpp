#pragma once

#include <chrono>
#include <cstdint>

namespace specsub {

// Per-run cost instrumentation. All fields only ever grow within a run.
struct CostCounters {
  std::uint64_t matvecs = 0;          // operator applications inside Lanczos
  std::uint64_t matvec_entries = 0;   // matrix entries touched by those applications
  std::uint64_t sampled_columns = 0;  // columns drawn by column sketches
  std::uint64_t product_samples = 0;  // rows drawn by the gradient product sketch
  std::uint64_t dense_passes = 0;     // full O(n^2) sweeps over an iterate matrix
  double seconds_sketch = 0.0;
  double seconds_eig = 0.0;
  double seconds_gradient = 0.0;
  double seconds_prox = 0.0;
  double seconds_gap = 0.0;

  double solver_seconds() const {
    return seconds_sketch + seconds_eig + seconds_gradient + seconds_prox;
  }

  CostCounters& operator+=(const CostCounters& o) {
    matvecs += o.matvecs;
    matvec_entries += o.matvec_entries;
    sampled_columns += o.sampled_columns;
    product_samples += o.product_samples;
    dense_passes += o.dense_passes;
    seconds_sketch += o.seconds_sketch;
    seconds_eig += o.seconds_eig;
    seconds_gradient += o.seconds_gradient;
    seconds_prox += o.seconds_prox;
    seconds_gap += o.seconds_gap;
    return *this;
  }
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Adds the elapsed time of its scope to `sink`.
class ScopedTimer {
 public:
  explicit ScopedTimer(double& sink) : sink_(sink) {}
  ~ScopedTimer() { sink_ += watch_.seconds(); }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  double& sink_;
  Stopwatch watch_;
};

}  // namespace specsub
