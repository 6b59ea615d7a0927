#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "odo/stationarity.hpp"
#include "odo/state_model.hpp"
#include "odo/updates.hpp"

namespace odo {

// Input log records, one CSV line each:
//   imu,t,ax,ay,az,wx,wy,wz
//   baro,t,pressure_hpa
//   fix,t,x,y,z,sx,sy,sz
//   lc_open,t,id      lc_close,t,id
//   wall_open,t,id    wall_touch,t,id
// '#' starts a comment, blank lines are skipped. Records may arrive up to
// 10 ms out of order (stable-sorted on read); beyond that the log is
// rejected. Records at equal timestamps apply as imu, then baro, then fix,
// then events in file order.

enum class RecordKind { kImu, kBaro, kFix, kLcOpen, kLcClose, kWallOpen, kWallTouch };

struct LogRecord {
  RecordKind kind = RecordKind::kImu;
  double t = 0.0;
  Vec3 a = Vec3::Zero();      // imu
  Vec3 w = Vec3::Zero();      // imu
  double pressure_hpa = 0.0;  // baro
  Vec3 fix_pos = Vec3::Zero();   // fix
  Vec3 fix_sigma = Vec3::Zero(); // fix, per-axis std
  int id = 0;                 // lc / wall handle
  int src_line = 0;           // provenance for error messages
};

std::vector<LogRecord> parse_log(std::istream& in);
void write_log(std::ostream& out, const std::vector<LogRecord>& records);

// Output trajectory rows: t, position, velocity, attitude, 3σ position.
struct TrajectoryRow {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Quat q;
  Vec3 pos_std3 = Vec3::Zero();
};

void write_trajectory(std::ostream& out, const std::vector<TrajectoryRow>& rows);
std::vector<TrajectoryRow> parse_trajectory(std::istream& in);

// Flat key = value configuration covering FilterConfig and DetectorConfig.
// Unknown keys raise ConfigError. Triples are comma-separated.
struct Configs {
  FilterConfig filter;
  DetectorConfig detector;
};
Configs parse_config(std::istream& in);

}  // namespace odo
