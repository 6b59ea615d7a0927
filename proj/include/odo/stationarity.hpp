#pragma once

#include <deque>

#include "odo/propagation.hpp"

namespace odo {

struct DetectorConfig {
  double window = 0.25;      // s of accelerometer magnitude kept
  double df_critical = -3.0; // unit-root test threshold (more negative = stricter)
  double std_max = 0.04;     // m/s², magnitude-dispersion gate
  int min_samples = 8;
};

struct StationarityVerdict {
  double t = 0.0;
  bool stationary = false;
  double df_stat = 0.0;    // Dickey–Fuller statistic of the current window
  double window_std = 0.0; // sample std of |a| in the window
};

// Rolling augmented-Dickey–Fuller (lag 0) test on the accelerometer
// magnitude: a strongly mean-reverting, low-dispersion window means the
// device is at rest. One verdict per pushed sample.
class StationarityDetector {
 public:
  explicit StationarityDetector(const DetectorConfig& cfg) : cfg_(cfg) {}

  StationarityVerdict push_sample(const ImuSample& s);
  void reset() { window_.clear(); }

 private:
  struct Entry {
    double t;
    double mag;
  };
  DetectorConfig cfg_;
  std::deque<Entry> window_;
};

}  // namespace odo
