#include "odo/log_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "odo/errors.hpp"

namespace odo {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_num(const std::string& tok, int line) {
  const std::string t = trim(tok);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last) {
    throw ParseError(line, "bad number '" + t + "'");
  }
  return v;
}

int parse_id(const std::string& tok, int line) {
  const double v = parse_num(tok, line);
  const int id = static_cast<int>(v);
  if (id != v || id < 0) throw ParseError(line, "bad id '" + tok + "'");
  return id;
}

int kind_priority(RecordKind k) {
  switch (k) {
    case RecordKind::kImu: return 0;
    case RecordKind::kBaro: return 1;
    case RecordKind::kFix: return 2;
    default: return 3;  // lc / wall events keep file order among themselves
  }
}

void fmt(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::vector<LogRecord> parse_log(std::istream& in) {
  std::vector<LogRecord> recs;
  std::string line;
  int lineno = 0;
  double t_max = -std::numeric_limits<double>::infinity();

  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;

    const auto f = split(s, ',');
    LogRecord r;
    r.src_line = lineno;
    const std::string& kind = f[0];

    auto need = [&](size_t n) {
      if (f.size() != n) {
        throw ParseError(lineno, kind + " record needs " + std::to_string(n) +
                                     " fields, got " + std::to_string(f.size()));
      }
    };

    if (kind == "imu") {
      need(8);
      r.kind = RecordKind::kImu;
      r.t = parse_num(f[1], lineno);
      for (int i = 0; i < 3; ++i) r.a[i] = parse_num(f[2 + i], lineno);
      for (int i = 0; i < 3; ++i) r.w[i] = parse_num(f[5 + i], lineno);
    } else if (kind == "baro") {
      need(3);
      r.kind = RecordKind::kBaro;
      r.t = parse_num(f[1], lineno);
      r.pressure_hpa = parse_num(f[2], lineno);
    } else if (kind == "fix") {
      need(8);
      r.kind = RecordKind::kFix;
      r.t = parse_num(f[1], lineno);
      for (int i = 0; i < 3; ++i) r.fix_pos[i] = parse_num(f[2 + i], lineno);
      for (int i = 0; i < 3; ++i) r.fix_sigma[i] = parse_num(f[5 + i], lineno);
      if (r.fix_sigma.minCoeff() <= 0.0) {
        throw ParseError(lineno, "fix sigma must be positive");
      }
    } else if (kind == "lc_open" || kind == "lc_close" || kind == "wall_open" ||
               kind == "wall_touch") {
      need(3);
      r.kind = kind == "lc_open"     ? RecordKind::kLcOpen
               : kind == "lc_close"  ? RecordKind::kLcClose
               : kind == "wall_open" ? RecordKind::kWallOpen
                                     : RecordKind::kWallTouch;
      r.t = parse_num(f[1], lineno);
      r.id = parse_id(f[2], lineno);
    } else {
      throw ParseError(lineno, "unknown record kind '" + kind + "'");
    }

    if (!std::isfinite(r.t)) throw ParseError(lineno, "non-finite timestamp");
    if (r.t < t_max - 0.01) {
      throw NonMonotoneTime("line " + std::to_string(lineno) + ": t = " +
                            std::to_string(r.t) + " regresses more than 10 ms");
    }
    t_max = std::max(t_max, r.t);
    recs.push_back(std::move(r));
  }

  std::stable_sort(recs.begin(), recs.end(), [](const LogRecord& a, const LogRecord& b) {
    if (a.t != b.t) return a.t < b.t;
    return kind_priority(a.kind) < kind_priority(b.kind);
  });

  // Handles must be opened before use and never re-opened.
  std::vector<int> lc_open, wall_open;
  for (const auto& r : recs) {
    auto seen = [](const std::vector<int>& v, int id) {
      return std::find(v.begin(), v.end(), id) != v.end();
    };
    switch (r.kind) {
      case RecordKind::kLcOpen:
        if (seen(lc_open, r.id)) {
          throw ParseError(r.src_line, "lc id " + std::to_string(r.id) + " reopened");
        }
        lc_open.push_back(r.id);
        break;
      case RecordKind::kLcClose:
        if (!seen(lc_open, r.id)) {
          throw ParseError(r.src_line, "lc id " + std::to_string(r.id) + " never opened");
        }
        break;
      case RecordKind::kWallOpen:
        if (seen(wall_open, r.id)) {
          throw ParseError(r.src_line, "wall id " + std::to_string(r.id) + " reopened");
        }
        wall_open.push_back(r.id);
        break;
      case RecordKind::kWallTouch:
        if (!seen(wall_open, r.id)) {
          throw ParseError(r.src_line, "wall id " + std::to_string(r.id) + " never opened");
        }
        break;
      default:
        break;
    }
  }
  return recs;
}

void write_log(std::ostream& out, const std::vector<LogRecord>& records) {
  std::string buf;
  for (const auto& r : records) {
    buf.clear();
    switch (r.kind) {
      case RecordKind::kImu:
        buf = "imu,";
        fmt(buf, r.t);
        for (int i = 0; i < 3; ++i) { buf += ','; fmt(buf, r.a[i]); }
        for (int i = 0; i < 3; ++i) { buf += ','; fmt(buf, r.w[i]); }
        break;
      case RecordKind::kBaro:
        buf = "baro,";
        fmt(buf, r.t);
        buf += ',';
        fmt(buf, r.pressure_hpa);
        break;
      case RecordKind::kFix:
        buf = "fix,";
        fmt(buf, r.t);
        for (int i = 0; i < 3; ++i) { buf += ','; fmt(buf, r.fix_pos[i]); }
        for (int i = 0; i < 3; ++i) { buf += ','; fmt(buf, r.fix_sigma[i]); }
        break;
      case RecordKind::kLcOpen:
      case RecordKind::kLcClose:
      case RecordKind::kWallOpen:
      case RecordKind::kWallTouch: {
        const char* k = r.kind == RecordKind::kLcOpen     ? "lc_open"
                        : r.kind == RecordKind::kLcClose  ? "lc_close"
                        : r.kind == RecordKind::kWallOpen ? "wall_open"
                                                          : "wall_touch";
        buf = k;
        buf += ',';
        fmt(buf, r.t);
        buf += ',';
        buf += std::to_string(r.id);
        break;
      }
    }
    out << buf << '\n';
  }
  if (!out) throw IoError("failed writing log");
}

void write_trajectory(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << "# t,x,y,z,vx,vy,vz,qw,qx,qy,qz,sx3,sy3,sz3\n";
  std::string buf;
  for (const auto& r : rows) {
    buf.clear();
    fmt(buf, r.t);
    for (int i = 0; i < 3; ++i) { buf += ','; fmt(buf, r.p[i]); }
    for (int i = 0; i < 3; ++i) { buf += ','; fmt(buf, r.v[i]); }
    const Vec4& q = r.q.coeffs();
    for (int i = 0; i < 4; ++i) { buf += ','; fmt(buf, q[i]); }
    for (int i = 0; i < 3; ++i) { buf += ','; fmt(buf, r.pos_std3[i]); }
    out << buf << '\n';
  }
  if (!out) throw IoError("failed writing trajectory");
}

std::vector<TrajectoryRow> parse_trajectory(std::istream& in) {
  std::vector<TrajectoryRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto f = split(s, ',');
    if (f.size() != 11 && f.size() != 14) {
      throw ParseError(lineno, "trajectory row needs 11 or 14 fields, got " +
                                   std::to_string(f.size()));
    }
    TrajectoryRow r;
    r.t = parse_num(f[0], lineno);
    for (int i = 0; i < 3; ++i) r.p[i] = parse_num(f[1 + i], lineno);
    for (int i = 0; i < 3; ++i) r.v[i] = parse_num(f[4 + i], lineno);
    r.q = Quat(parse_num(f[7], lineno), parse_num(f[8], lineno),
               parse_num(f[9], lineno), parse_num(f[10], lineno));
    if (f.size() == 14) {
      for (int i = 0; i < 3; ++i) r.pos_std3[i] = parse_num(f[11 + i], lineno);
    }
    rows.push_back(r);
  }
  return rows;
}

Configs parse_config(std::istream& in) {
  Configs c;
  FilterConfig& fc = c.filter;
  DetectorConfig& dc = c.detector;

  auto vec3 = [](Vec3* dst) {
    return [dst](const std::string& v, int line) {
      const auto parts = split(v, ',');
      if (parts.size() == 1) {
        dst->setConstant(parse_num(parts[0], line));
      } else if (parts.size() == 3) {
        for (int i = 0; i < 3; ++i) (*dst)[i] = parse_num(parts[i], line);
      } else {
        throw ParseError(line, "expected 1 or 3 comma-separated values");
      }
    };
  };
  auto num = [](double* dst) {
    return [dst](const std::string& v, int line) { *dst = parse_num(v, line); };
  };
  auto integer = [](int* dst) {
    return [dst](const std::string& v, int line) { *dst = parse_id(v, line); };
  };

  const std::map<std::string, std::function<void(const std::string&, int)>> table = {
      {"sigma_acc", vec3(&fc.sigma_acc)},
      {"sigma_gyro", vec3(&fc.sigma_gyro)},
      {"bias_acc_rw", num(&fc.bias_acc_rw)},
      {"bias_gyro_rw", num(&fc.bias_gyro_rw)},
      {"scale_rw", num(&fc.scale_rw)},
      {"gravity", vec3(&fc.gravity)},
      {"prior_pos_std", num(&fc.prior_pos_std)},
      {"prior_vel_std", num(&fc.prior_vel_std)},
      {"prior_quat_std", num(&fc.prior_quat_std)},
      {"prior_yaw_std", num(&fc.prior_yaw_std)},
      {"prior_bias_acc_std", num(&fc.prior_bias_acc_std)},
      {"prior_bias_gyro_std", num(&fc.prior_bias_gyro_std)},
      {"prior_scale_std", num(&fc.prior_scale_std)},
      {"zupt_noise_std", num(&fc.zupt_noise_std)},
      {"zupt_cadence", num(&fc.zupt_cadence)},
      {"pseudo_speed_target", num(&fc.pseudo_speed_target)},
      {"pseudo_speed_std", num(&fc.pseudo_speed_std)},
      {"pseudo_speed_gate", num(&fc.pseudo_speed_gate)},
      {"pseudo_cadence", num(&fc.pseudo_cadence)},
      {"lc_anchor_prior_std", num(&fc.lc_anchor_prior_std)},
      {"lc_meas_std", num(&fc.lc_meas_std)},
      {"baro_coeff_m_per_hpa", num(&fc.baro_coeff_m_per_hpa)},
      {"baro_noise_std", num(&fc.baro_noise_std)},
      {"alt_anchor_prior_std", num(&fc.alt_anchor_prior_std)},
      {"alt_anchor_open_std", num(&fc.alt_anchor_open_std)},
      {"wall_pos_std", num(&fc.wall_pos_std)},
      {"wall_angle_std", num(&fc.wall_angle_std)},
      {"wall_prior_theta_std", num(&fc.wall_prior_theta_std)},
      {"wall_prior_d_std", num(&fc.wall_prior_d_std)},
      {"wall_min_normal_xy", num(&fc.wall_min_normal_xy)},
      {"max_dt", num(&fc.max_dt)},
      {"init_window", num(&fc.init_window)},
      {"cov_jitter", num(&fc.cov_jitter)},
      {"detector_window", num(&dc.window)},
      {"df_critical", num(&dc.df_critical)},
      {"std_max", num(&dc.std_max)},
      {"min_samples", integer(&dc.min_samples)},
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key == "baro_mode") {
      if (val == "absolute") {
        fc.baro_mode = BaroMode::kAbsolute;
      } else if (val == "relative") {
        fc.baro_mode = BaroMode::kRelative;
      } else {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": baro_mode must be absolute or relative");
      }
      continue;
    }
    const auto it = table.find(key);
    if (it == table.end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    try {
      it->second(val, lineno);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("config ") + e.what());
    }
  }
  return c;
}

}  // namespace odo
