#include "odo/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "odo/errors.hpp"

namespace odo {

namespace {

struct Rng {
  explicit Rng(uint64_t seed) : g(seed) {}
  double uniform() { return (g() >> 11) * (1.0 / 9007199254740992.0); }  // [0,1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double gauss() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * uniform());
  }
  std::mt19937_64 g;
};

// Cosine speed window: 0 at both segment ends, 1 in the cruise middle.
double window(double tau, double T, double tr) {
  auto ramp = [](double u) { return 0.5 * (1.0 - std::cos(M_PI * u)); };
  if (tau <= 0.0 || tau >= T) return 0.0;
  if (tau < tr) return ramp(tau / tr);
  if (tau > T - tr) return ramp((T - tau) / tr);
  return 1.0;
}

// C¹ interpolation profile for angles: 0→1 with zero slope at both ends.
double angle_blend(double u) { return u - std::sin(2.0 * M_PI * u) / (2.0 * M_PI); }

struct PoseAngles {
  double heading = 0.0;
  double mount = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

class Profile {
 public:
  explicit Profile(const SimScenario& sc) : sc_(sc) {
    if (sc.segments.empty()) throw InvalidScenario("scenario has no segments");
    PoseAngles a{sc.init_heading, sc.init_mount_yaw, sc.init_pitch, sc.init_roll};
    double t = 0.0;
    for (const auto& s : sc.segments) {
      if (!(s.duration > 0.05)) throw InvalidScenario("segment duration too small");
      Node n;
      n.spec = s;
      n.t0 = t;
      n.t1 = t + s.duration;
      n.start = a;
      n.end = a;
      switch (s.kind) {
        case SegmentSpec::Kind::kTurn:
          n.end.heading = a.heading + s.dyaw;
          break;
        case SegmentSpec::Kind::kPose:
          if (!std::isnan(s.pitch)) n.end.pitch = s.pitch;
          if (!std::isnan(s.roll)) n.end.roll = s.roll;
          if (!std::isnan(s.mount_yaw)) n.end.mount = s.mount_yaw;
          break;
        default:
          break;
      }
      a = n.end;
      t = n.t1;
      nodes_.push_back(n);
    }
    duration_ = t;
  }

  double duration() const { return duration_; }

  Vec3 velocity(double t) const {
    const Node& n = at(t);
    const auto& s = n.spec;
    const double T = s.duration;
    const double tau = t - n.t0;
    const double tr = std::min(0.6, T / 3.0);
    const double w = window(tau, T, tr);

    Vec3 v = Vec3::Zero();
    if (s.kind == SegmentSpec::Kind::kWalk || s.kind == SegmentSpec::Kind::kStairs) {
      const double fwd = s.speed * w;
      v[0] = fwd * std::cos(n.start.heading);
      v[1] = fwd * std::sin(n.start.heading);
      if (s.kind == SegmentSpec::Kind::kStairs) {
        v[2] = s.rise / (T - tr) * w;
      }
      // Vertical gait bounce, windowed so segment boundaries stay at rest.
      v[2] += sc_.gait_amp / (2.0 * M_PI * sc_.gait_freq) * w *
              std::sin(2.0 * M_PI * sc_.gait_freq * tau);
    }
    return v;
  }

  PoseAngles angles(double t) const {
    const Node& n = at(t);
    PoseAngles a = n.start;
    const double u = angle_blend(std::clamp((t - n.t0) / n.spec.duration, 0.0, 1.0));
    a.heading += (n.end.heading - n.start.heading) * u;
    a.mount += (n.end.mount - n.start.mount) * u;
    a.pitch += (n.end.pitch - n.start.pitch) * u;
    a.roll += (n.end.roll - n.start.roll) * u;
    return a;
  }

  Quat attitude(double t) const {
    const PoseAngles a = angles(t);
    return Quat::from_axis_angle(Vec3(0, 0, a.heading + a.mount)) *
           Quat::from_axis_angle(Vec3(0, a.pitch, 0)) *
           Quat::from_axis_angle(Vec3(a.roll, 0, 0));
  }

 private:
  struct Node {
    SegmentSpec spec;
    double t0 = 0.0, t1 = 0.0;
    PoseAngles start, end;
  };

  const Node& at(double t) const {
    if (t <= nodes_.front().t0) return nodes_.front();
    for (const auto& n : nodes_) {
      if (t < n.t1) return n;
    }
    return nodes_.back();
  }

  const SimScenario& sc_;
  std::vector<Node> nodes_;
  double duration_ = 0.0;
};

int sort_priority(RecordKind k) {
  switch (k) {
    case RecordKind::kImu: return 0;
    case RecordKind::kBaro: return 1;
    case RecordKind::kFix: return 2;
    default: return 3;
  }
}

void write_kv(std::ostream& out, const char* key, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << key << " = " << buf << '\n';
}

}  // namespace

Vec3 SimTruth::position_at(double time) const {
  if (t.empty()) throw TimeRangeMismatch("empty truth");
  if (time < t.front() - 1e-6 || time > t.back() + 1e-6) {
    throw TimeRangeMismatch("t = " + std::to_string(time) + " outside truth span");
  }
  const auto it = std::lower_bound(t.begin(), t.end(), time);
  if (it == t.begin()) return p.front();
  if (it == t.end()) return p.back();
  const size_t i = it - t.begin();
  const double lam = (time - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - lam) * p[i - 1] + lam * p[i];
}

SimResult simulate(const SimScenario& sc, uint64_t seed) {
  if (!(sc.rate_hz >= 1.0 && sc.rate_hz <= 2000.0)) {
    throw InvalidScenario("rate_hz out of range");
  }
  if (!(sc.jitter_frac >= 0.0 && sc.jitter_frac < 0.5)) {
    throw InvalidScenario("jitter_frac out of range");
  }
  if ((sc.scale_acc.array() < 0.5).any() || (sc.scale_acc.array() > 2.0).any()) {
    throw InvalidScenario("scale_acc out of range");
  }

  Profile prof(sc);
  const double D = prof.duration();
  Rng rng(seed);

  SimResult out;
  SimTruth& tr = out.truth;
  tr.bias_acc = sc.bias_acc;
  tr.bias_gyro = sc.bias_gyro;
  tr.scale_acc = sc.scale_acc;

  // --- sample clock ---------------------------------------------------
  const double dt_nom = 1.0 / sc.rate_hz;
  {
    double t = 0.0;
    while (t <= D) {
      tr.t.push_back(t);
      t += dt_nom * (1.0 + sc.jitter_frac * rng.uniform(-1.0, 1.0));
    }
  }
  const size_t N = tr.t.size();
  if (N < 2) throw InvalidScenario("scenario too short for the sample rate");

  // --- truth rollout (discrete, matching the filter's recursion) -------
  tr.p.resize(N);
  tr.v.resize(N);
  tr.q.resize(N);
  tr.p[0] = Vec3::Zero();
  for (size_t k = 0; k < N; ++k) {
    tr.v[k] = prof.velocity(tr.t[k]);
    tr.q[k] = prof.attitude(tr.t[k]);
    if (k > 0) {
      const double dt = tr.t[k] - tr.t[k - 1];
      tr.p[k] = tr.p[k - 1] + tr.v[k - 1] * dt;
      tr.path_length += (tr.p[k] - tr.p[k - 1]).norm();
    }
  }

  // --- ideal IMU stream by inverting the mechanization -----------------
  const Vec3 inv_scale = sc.scale_acc.cwiseInverse();
  for (size_t k = 0; k < N; ++k) {
    LogRecord r;
    r.kind = RecordKind::kImu;
    r.t = tr.t[k];
    Vec3 a_true, w_true;
    double dt = dt_nom;
    if (k == 0) {
      // No preceding sample; the driver only uses this record for the
      // initial gravity average, so emit the static values.
      a_true = tr.q[0].conjugate().rotate(sc.gravity);
      w_true = Vec3::Zero();
    } else {
      dt = tr.t[k] - tr.t[k - 1];
      w_true = quat_log(tr.q[k] * tr.q[k - 1].conjugate()) / dt;
      a_true = tr.q[k].conjugate().rotate((tr.v[k] - tr.v[k - 1]) / dt + sc.gravity);
    }
    Vec3 eps_a, eps_w;
    for (int i = 0; i < 3; ++i) {
      eps_a[i] = sc.sigma_acc[i] * std::sqrt(dt) * rng.gauss();
      eps_w[i] = sc.sigma_gyro[i] * std::sqrt(dt) * rng.gauss();
    }
    r.a = inv_scale.cwiseProduct(a_true - eps_a + sc.bias_acc);
    r.w = w_true - eps_w + sc.bias_gyro;
    out.log.push_back(r);
  }

  // Events must stay within the realized sample span (the jittered clock
  // usually stops slightly short of the nominal duration).
  const double t_end = tr.t.back();

  // --- barometer -------------------------------------------------------
  if (sc.emit_baro) {
    const double dtb = 1.0 / sc.baro_rate_hz;
    double t = 0.5 * dtb;
    while (t <= t_end) {
      LogRecord r;
      r.kind = RecordKind::kBaro;
      r.t = t;
      const double z = tr.position_at(t)[2];
      r.pressure_hpa = sc.ref_pressure_hpa - z / sc.baro_coeff_m_per_hpa +
                       sc.baro_drift_hpa_per_min * (t / 60.0) +
                       sc.baro_noise_std_m / sc.baro_coeff_m_per_hpa * rng.gauss();
      out.log.push_back(r);
      t += dtb * (1.0 + sc.jitter_frac * rng.uniform(-1.0, 1.0));
    }
  }

  // --- scheduled events -------------------------------------------------
  for (const auto& f : sc.fixes) {
    if (f.t < 0.0 || f.t > t_end) throw InvalidScenario("fix event outside scenario");
    LogRecord r;
    r.kind = RecordKind::kFix;
    r.t = f.t;
    const Vec3 p_true = tr.position_at(f.t);
    for (int i = 0; i < 3; ++i) r.fix_pos[i] = p_true[i] + f.sigma * rng.gauss();
    r.fix_sigma = Vec3::Constant(f.sigma);
    out.log.push_back(r);
  }
  for (const auto& e : sc.lcs) {
    if (e.t < 0.0 || e.t > t_end) throw InvalidScenario("lc event outside scenario");
    LogRecord r;
    r.kind = e.open ? RecordKind::kLcOpen : RecordKind::kLcClose;
    r.t = e.t;
    r.id = e.id;
    out.log.push_back(r);
  }
  for (const auto& e : sc.walls) {
    if (e.t < 0.0 || e.t > t_end) throw InvalidScenario("wall event outside scenario");
    LogRecord r;
    r.kind = e.open ? RecordKind::kWallOpen : RecordKind::kWallTouch;
    r.t = e.t;
    r.id = e.id;
    out.log.push_back(r);
  }

  std::stable_sort(out.log.begin(), out.log.end(),
                   [](const LogRecord& a, const LogRecord& b) {
                     if (a.t != b.t) return a.t < b.t;
                     return sort_priority(a.kind) < sort_priority(b.kind);
                   });
  return out;
}

void write_truth(std::ostream& out, const SimTruth& truth) {
  std::vector<TrajectoryRow> rows(truth.t.size());
  for (size_t i = 0; i < truth.t.size(); ++i) {
    rows[i].t = truth.t[i];
    rows[i].p = truth.p[i];
    rows[i].v = truth.v[i];
    rows[i].q = truth.q[i];
  }
  write_trajectory(out, rows);
}

void write_truth_params(std::ostream& out, const SimTruth& truth) {
  write_kv(out, "bias_acc_x", truth.bias_acc[0]);
  write_kv(out, "bias_acc_y", truth.bias_acc[1]);
  write_kv(out, "bias_acc_z", truth.bias_acc[2]);
  write_kv(out, "bias_gyro_x", truth.bias_gyro[0]);
  write_kv(out, "bias_gyro_y", truth.bias_gyro[1]);
  write_kv(out, "bias_gyro_z", truth.bias_gyro[2]);
  write_kv(out, "scale_acc_x", truth.scale_acc[0]);
  write_kv(out, "scale_acc_y", truth.scale_acc[1]);
  write_kv(out, "scale_acc_z", truth.scale_acc[2]);
  write_kv(out, "path_length", truth.path_length);
  if (!out) throw IoError("failed writing truth parameters");
}

ScoreMetrics score(const std::vector<TrajectoryRow>& estimate, const SimTruth& truth) {
  if (estimate.empty()) throw TimeRangeMismatch("empty estimate");
  ScoreMetrics m;
  m.duration = estimate.back().t - estimate.front().t;
  m.truth_path_length = truth.path_length;

  double se = 0.0, se_alt = 0.0;
  for (const auto& r : estimate) {
    const Vec3 p_true = truth.position_at(r.t);
    const double e = (r.p - p_true).norm();
    se += e * e;
    se_alt += (r.p[2] - p_true[2]) * (r.p[2] - p_true[2]);
    m.max_pos_error = std::max(m.max_pos_error, e);
  }
  m.rmse_pos = std::sqrt(se / estimate.size());
  m.rmse_alt = std::sqrt(se_alt / estimate.size());
  m.endpoint_error = (estimate.back().p - truth.position_at(estimate.back().t)).norm();
  m.endpoint_pct =
      truth.path_length > 0.0 ? 100.0 * m.endpoint_error / truth.path_length : 0.0;
  return m;
}

SimTruth truth_from_rows(const std::vector<TrajectoryRow>& rows) {
  SimTruth tr;
  tr.t.reserve(rows.size());
  for (const auto& r : rows) {
    tr.t.push_back(r.t);
    tr.p.push_back(r.p);
    tr.v.push_back(r.v);
    tr.q.push_back(r.q);
    if (tr.p.size() > 1) {
      tr.path_length += (tr.p.back() - tr.p[tr.p.size() - 2]).norm();
    }
  }
  return tr;
}

// --- scenario text format ---------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double snum(const std::string& s, int line) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw InvalidScenario("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

Vec3 svec3(const std::string& s, int line) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() == 1) return Vec3::Constant(snum(parts[0], line));
  if (parts.size() != 3) {
    throw InvalidScenario("line " + std::to_string(line) + ": expected 1 or 3 values");
  }
  return Vec3(snum(parts[0], line), snum(parts[1], line), snum(parts[2], line));
}

constexpr double kDeg = M_PI / 180.0;

}  // namespace

SimScenario parse_scenario(std::istream& in) {
  SimScenario sc;
  std::string line;
  int lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw InvalidScenario("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));

    if (key == "segment") {
      const auto tk = tokens(val);
      if (tk.size() < 2) {
        throw InvalidScenario("line " + std::to_string(lineno) +
                              ": segment needs '<kind> <duration> [k=v ...]'");
      }
      SegmentSpec seg;
      if (tk[0] == "rest") {
        seg.kind = SegmentSpec::Kind::kRest;
      } else if (tk[0] == "walk") {
        seg.kind = SegmentSpec::Kind::kWalk;
      } else if (tk[0] == "turn") {
        seg.kind = SegmentSpec::Kind::kTurn;
      } else if (tk[0] == "stairs") {
        seg.kind = SegmentSpec::Kind::kStairs;
      } else if (tk[0] == "pose") {
        seg.kind = SegmentSpec::Kind::kPose;
      } else {
        throw InvalidScenario("line " + std::to_string(lineno) +
                              ": unknown segment kind '" + tk[0] + "'");
      }
      seg.duration = snum(tk[1], lineno);
      for (size_t i = 2; i < tk.size(); ++i) {
        const auto peq = tk[i].find('=');
        if (peq == std::string::npos) {
          throw InvalidScenario("line " + std::to_string(lineno) +
                                ": segment parameter needs k=v");
        }
        const std::string pk = tk[i].substr(0, peq);
        const double pv = snum(tk[i].substr(peq + 1), lineno);
        if (pk == "speed") {
          seg.speed = pv;
        } else if (pk == "dyaw_deg") {
          seg.dyaw = pv * kDeg;
        } else if (pk == "rise") {
          seg.rise = pv;
        } else if (pk == "pitch_deg") {
          seg.pitch = pv * kDeg;
        } else if (pk == "roll_deg") {
          seg.roll = pv * kDeg;
        } else if (pk == "mount_yaw_deg") {
          seg.mount_yaw = pv * kDeg;
        } else {
          throw InvalidScenario("line " + std::to_string(lineno) +
                                ": unknown segment parameter '" + pk + "'");
        }
      }
      sc.segments.push_back(seg);
      continue;
    }

    if (key == "event") {
      const auto tk = tokens(val);
      if (tk.size() < 2) {
        throw InvalidScenario("line " + std::to_string(lineno) +
                              ": event needs '<kind> <t> [k=v ...]'");
      }
      const double t = snum(tk[1], lineno);
      double sigma = 0.3;
      int id = 0;
      for (size_t i = 2; i < tk.size(); ++i) {
        const auto peq = tk[i].find('=');
        if (peq == std::string::npos) {
          throw InvalidScenario("line " + std::to_string(lineno) +
                                ": event parameter needs k=v");
        }
        const std::string pk = tk[i].substr(0, peq);
        const double pv = snum(tk[i].substr(peq + 1), lineno);
        if (pk == "sigma") {
          sigma = pv;
        } else if (pk == "id") {
          id = static_cast<int>(pv);
        } else {
          throw InvalidScenario("line " + std::to_string(lineno) +
                                ": unknown event parameter '" + pk + "'");
        }
      }
      if (tk[0] == "fix") {
        sc.fixes.push_back({t, sigma});
      } else if (tk[0] == "lc_open") {
        sc.lcs.push_back({t, id, true});
      } else if (tk[0] == "lc_close") {
        sc.lcs.push_back({t, id, false});
      } else if (tk[0] == "wall_open") {
        sc.walls.push_back({t, id, true});
      } else if (tk[0] == "wall_touch") {
        sc.walls.push_back({t, id, false});
      } else {
        throw InvalidScenario("line " + std::to_string(lineno) +
                              ": unknown event kind '" + tk[0] + "'");
      }
      continue;
    }

    if (key == "rate_hz") {
      sc.rate_hz = snum(val, lineno);
    } else if (key == "jitter_frac") {
      sc.jitter_frac = snum(val, lineno);
    } else if (key == "sigma_acc") {
      sc.sigma_acc = svec3(val, lineno);
    } else if (key == "sigma_gyro") {
      sc.sigma_gyro = svec3(val, lineno);
    } else if (key == "bias_acc") {
      sc.bias_acc = svec3(val, lineno);
    } else if (key == "bias_gyro") {
      sc.bias_gyro = svec3(val, lineno);
    } else if (key == "scale_acc") {
      sc.scale_acc = svec3(val, lineno);
    } else if (key == "emit_baro") {
      sc.emit_baro = snum(val, lineno) != 0.0;
    } else if (key == "baro_rate_hz") {
      sc.baro_rate_hz = snum(val, lineno);
    } else if (key == "baro_noise_std_m") {
      sc.baro_noise_std_m = snum(val, lineno);
    } else if (key == "baro_drift_hpa_per_min") {
      sc.baro_drift_hpa_per_min = snum(val, lineno);
    } else if (key == "ref_pressure_hpa") {
      sc.ref_pressure_hpa = snum(val, lineno);
    } else if (key == "baro_coeff_m_per_hpa") {
      sc.baro_coeff_m_per_hpa = snum(val, lineno);
    } else if (key == "init_heading_deg") {
      sc.init_heading = snum(val, lineno) * kDeg;
    } else if (key == "init_mount_yaw_deg") {
      sc.init_mount_yaw = snum(val, lineno) * kDeg;
    } else if (key == "init_pitch_deg") {
      sc.init_pitch = snum(val, lineno) * kDeg;
    } else if (key == "init_roll_deg") {
      sc.init_roll = snum(val, lineno) * kDeg;
    } else if (key == "gait_amp") {
      sc.gait_amp = snum(val, lineno);
    } else if (key == "gait_freq") {
      sc.gait_freq = snum(val, lineno);
    } else if (key == "gravity") {
      sc.gravity = svec3(val, lineno);
    } else {
      throw InvalidScenario("line " + std::to_string(lineno) + ": unknown key '" +
                            key + "'");
    }
  }
  if (sc.segments.empty()) throw InvalidScenario("scenario has no segments");
  return sc;
}

}  // namespace odo
