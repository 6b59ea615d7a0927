#pragma once

#include <string>
#include <utility>
#include <vector>

#include "odo/log_io.hpp"
#include "odo/smoother.hpp"

namespace odo {

struct SessionOptions {
  bool smooth = false;  // record the trace and run the RTS pass
};

struct UpdateRecord {
  double t = 0.0;
  std::string label;
  int dof = 0;
  double nis = 0.0;
};

struct BiasRecord {
  double t = 0.0;
  Vec3 b_a = Vec3::Zero();
  Vec3 b_w = Vec3::Zero();
  Vec3 t_a = Vec3::Ones();
};

struct WallRecord {
  double t = 0.0;
  int id = 0;
  double theta = 0.0;
  double d = 0.0;
};

struct Diagnostics {
  std::vector<UpdateRecord> updates;
  std::vector<StationarityVerdict> verdicts;
  std::vector<BiasRecord> bias;   // one per output row
  std::vector<WallRecord> walls;  // posterior line after each touch
  std::vector<std::string> warnings;
};

struct SessionResult {
  std::vector<TrajectoryRow> filtered;
  std::vector<TrajectoryRow> smoothed;  // empty unless smoothing requested
  Diagnostics diagnostics;
  GaussianBelief final_belief;
  std::vector<std::pair<std::string, std::string>> summary;
};

// Runs the full pipeline over a parsed, time-sorted log: initialization from
// the first init_window seconds of accelerometer data (events arriving before
// that are queued and replayed in order), then predict on every IMU sample
// with stationarity-gated ZUPT / pseudo-speed updates and event-driven
// fix / loop-closure / wall / baro updates. One output row per IMU sample,
// reflecting all updates up to the next sample.
SessionResult run_session(const std::vector<LogRecord>& log, const Configs& cfg,
                          const SessionOptions& opt);

void write_diagnostics(std::ostream& out, const Diagnostics& d);
void write_summary(std::ostream& out, const SessionResult& r);

}  // namespace odo
