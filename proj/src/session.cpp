#include "odo/session.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include "odo/errors.hpp"
#include "odo/propagation.hpp"
#include "odo/updates.hpp"

namespace odo {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

struct Driver {
  Driver(const Configs& cfg, const SessionOptions& options)
      : fc(cfg.filter), opt(options), detector(cfg.detector), tracer(options.smooth) {}

  const FilterConfig& fc;
  SessionOptions opt;
  StationarityDetector detector;
  TraceBuilder tracer;
  SessionResult res;

  GaussianBelief belief;
  bool initialized = false;
  std::vector<ImuSample> init_buf;
  std::vector<LogRecord> pending;

  double last_zupt = -1e18;
  double last_pseudo = -1e18;
  bool row_pending = false;
  int dropped = 0;

  bool have_ref = false;
  double ref_pressure = 0.0;
  double prev_pressure = 0.0;
  int alt_anchor = -1;
  std::map<int, int> lc_blocks;    // log handle → block id
  std::map<int, int> wall_blocks;

  void finalize_row() {
    if (!row_pending) return;
    TrajectoryRow row;
    row.t = belief.t;
    row.p = belief.mean.p;
    row.v = belief.mean.v;
    row.q = belief.mean.q;
    row.pos_std3 =
        3.0 * belief.cov.diagonal().head<3>().cwiseMax(0.0).cwiseSqrt();
    res.filtered.push_back(row);
    res.diagnostics.bias.push_back(
        {belief.t, belief.mean.b_a, belief.mean.b_w, belief.mean.t_a});
    row_pending = false;
  }

  void apply(const MeasurementModel& m) {
    auto r = ekf_update(belief, m);
    belief = std::move(r.belief);
    tracer.on_update(belief);
    res.diagnostics.updates.push_back(
        {belief.t, m.label, static_cast<int>(m.y.size()), r.stats.nis});
  }

  void retire(int block_id) {
    const int off = belief.mean.block_offset(block_id);
    const int len = aug_dim(belief.mean.block(block_id).kind);
    const int n = belief.dim();
    std::vector<int> kept;
    kept.reserve(n - len);
    for (int i = 0; i < n; ++i) {
      if (i < off || i >= off + len) kept.push_back(i);
    }
    belief = remove_block(belief, block_id);
    tracer.on_retire(belief, kept);
  }

  void open_altitude(double pressure) {
    const MatX prior = MatX::Constant(
        1, 1, fc.alt_anchor_prior_std * fc.alt_anchor_prior_std);
    auto [grown, bid] = augment_block(belief, AugKind::kAltitudeAnchor,
                                      VecX::Constant(1, belief.mean.p[2]), prior);
    belief = std::move(grown);
    tracer.on_augment(belief);
    apply(make_altitude_tie(belief, bid, fc));
    alt_anchor = bid;
    prev_pressure = pressure;
  }

  void on_imu(const LogRecord& rec) {
    const ImuSample s{rec.t, rec.a, rec.w};
    if (!initialized) {
      init_buf.push_back(s);
      res.diagnostics.verdicts.push_back(detector.push_sample(s));
      if (init_buf.back().t - init_buf.front().t >= fc.init_window) {
        Vec3 mean_a = Vec3::Zero();
        for (const auto& b : init_buf) mean_a += b.a;
        mean_a /= static_cast<double>(init_buf.size());
        belief = init_belief(fc, mean_a, s.t);
        initialized = true;
        tracer.begin(belief);
        for (const auto& p : pending) on_event(p);
        pending.clear();
      }
      return;
    }

    const double dt = s.t - belief.t;
    if (dt <= 0.0) {
      ++dropped;
      res.diagnostics.warnings.push_back("dropped imu sample with dt <= 0 at t = " +
                                         std::to_string(s.t));
      return;
    }
    finalize_row();  // previous sample's row now includes all its updates

    MatX F;
    belief = ekf_predict(belief, s, fc, tracer.active() ? &F : nullptr);
    tracer.on_predict(F, belief, /*emit_row=*/true);
    row_pending = true;

    const auto verdict = detector.push_sample(s);
    res.diagnostics.verdicts.push_back(verdict);

    if (verdict.stationary) {
      if (s.t >= last_zupt + fc.zupt_cadence) {
        apply(make_zupt(belief, fc));
        last_zupt = s.t;
      }
    } else if (s.t >= last_pseudo + fc.pseudo_cadence) {
      if (auto m = make_pseudo_speed(belief, fc)) {
        apply(*m);
        last_pseudo = s.t;
      }
    }
  }

  void on_event(const LogRecord& rec) {
    switch (rec.kind) {
      case RecordKind::kBaro: {
        if (!have_ref) {
          have_ref = true;
          ref_pressure = rec.pressure_hpa;
        }
        if (fc.baro_mode == BaroMode::kAbsolute) {
          apply(make_baro_absolute(belief, {rec.t, rec.pressure_hpa}, ref_pressure, fc));
        } else {
          if (alt_anchor >= 0) {
            const double delta =
                -fc.baro_coeff_m_per_hpa * (rec.pressure_hpa - prev_pressure);
            apply(make_baro_relative(belief, alt_anchor, delta, fc));
            retire(alt_anchor);
            alt_anchor = -1;
          }
          open_altitude(rec.pressure_hpa);
        }
        break;
      }
      case RecordKind::kFix: {
        const Mat3 R = rec.fix_sigma.cwiseAbs2().asDiagonal();
        apply(make_position_fix(belief, rec.fix_pos, R));
        break;
      }
      case RecordKind::kLcOpen: {
        const MatX prior = fc.lc_anchor_prior_std * fc.lc_anchor_prior_std *
                           Mat3::Identity();
        auto [grown, bid] = augment_block(belief, AugKind::kLoopClosureAnchor,
                                          VecX::Zero(3), prior);
        belief = std::move(grown);
        tracer.on_augment(belief);
        lc_blocks[rec.id] = bid;
        auto m = make_loop_closure(belief, bid, fc);
        m.label = "lc_open";
        apply(m);
        break;
      }
      case RecordKind::kLcClose: {
        apply(make_loop_closure(belief, lc_blocks.at(rec.id), fc));
        break;
      }
      case RecordKind::kWallOpen: {
        auto [grown, bid] = augment_wall_line(belief, fc);
        belief = std::move(grown);
        tracer.on_augment(belief);
        wall_blocks[rec.id] = bid;
        break;
      }
      case RecordKind::kWallTouch: {
        const int bid = wall_blocks.at(rec.id);
        apply(make_wall_observation(belief, bid, fc));
        const VecX& w = belief.mean.block(bid).value;
        res.diagnostics.walls.push_back({belief.t, rec.id, w[0], w[1]});
        break;
      }
      default:
        break;
    }
  }

  void finish() {
    if (!initialized) {
      throw InvalidScenario("log provides less than init_window of imu data");
    }
    finalize_row();
    res.final_belief = belief;

    if (opt.smooth) {
      const auto steps = rts_smooth(tracer.take(), [](VecX& m) {
        const double n = m.segment<4>(kQuatOff).norm();
        if (n > 1e-12) m.segment<4>(kQuatOff) /= n;
      });
      for (const auto& s : steps) {
        if (!s.emit_row) continue;
        TrajectoryRow row;
        row.t = s.t;
        row.p = s.m.segment<3>(kPosOff);
        row.v = s.m.segment<3>(kVelOff);
        row.q = Quat(Vec4(s.m.segment<4>(kQuatOff)));
        row.pos_std3 =
            3.0 * s.P.diagonal().head<3>().cwiseMax(0.0).cwiseSqrt();
        res.smoothed.push_back(row);
      }
    }

    // Summary, fixed key order.
    std::map<std::string, int> counts;
    for (const auto& u : res.diagnostics.updates) ++counts[u.label];
    int stationary = 0;
    for (const auto& v : res.diagnostics.verdicts) stationary += v.stationary ? 1 : 0;
    double path = 0.0;
    for (size_t i = 1; i < res.filtered.size(); ++i) {
      path += (res.filtered[i].p - res.filtered[i - 1].p).norm();
    }

    auto& s = res.summary;
    const auto& rows = res.filtered;
    s.emplace_back("duration_s",
                   num(rows.empty() ? 0.0 : rows.back().t - rows.front().t));
    s.emplace_back("rows", std::to_string(rows.size()));
    s.emplace_back("dropped_samples", std::to_string(dropped));
    s.emplace_back("zupt_count", std::to_string(counts["zupt"]));
    s.emplace_back("pseudo_count", std::to_string(counts["pseudo_speed"]));
    s.emplace_back("fix_count", std::to_string(counts["fix"]));
    s.emplace_back("baro_count",
                   std::to_string(counts["baro_abs"] + counts["baro_rel"]));
    s.emplace_back("lc_count",
                   std::to_string(counts["lc_open"] + counts["loop_closure"]));
    s.emplace_back("wall_count", std::to_string(counts["wall"]));
    s.emplace_back("stationary_fraction",
                   num(res.diagnostics.verdicts.empty()
                           ? 0.0
                           : static_cast<double>(stationary) /
                                 res.diagnostics.verdicts.size()));
    const Vec3 end = rows.empty() ? Vec3::Zero() : rows.back().p;
    s.emplace_back("endpoint_x", num(end[0]));
    s.emplace_back("endpoint_y", num(end[1]));
    s.emplace_back("endpoint_z", num(end[2]));
    s.emplace_back("path_estimate_m", num(path));
    const NavState& f = res.final_belief.mean;
    s.emplace_back("final_bias_acc", num(f.b_a[0]) + "," + num(f.b_a[1]) + "," +
                                         num(f.b_a[2]));
    s.emplace_back("final_bias_gyro", num(f.b_w[0]) + "," + num(f.b_w[1]) + "," +
                                          num(f.b_w[2]));
    s.emplace_back("final_scale_acc", num(f.t_a[0]) + "," + num(f.t_a[1]) + "," +
                                          num(f.t_a[2]));
  }
};

}  // namespace

SessionResult run_session(const std::vector<LogRecord>& log, const Configs& cfg,
                          const SessionOptions& opt) {
  Driver d(cfg, opt);
  for (const auto& rec : log) {
    if (rec.kind == RecordKind::kImu) {
      d.on_imu(rec);
    } else if (!d.initialized) {
      d.pending.push_back(rec);
    } else {
      d.on_event(rec);
    }
  }
  d.finish();
  return std::move(d.res);
}

void write_diagnostics(std::ostream& out, const Diagnostics& d) {
  out << "# update,t,label,dof,nis\n";
  for (const auto& u : d.updates) {
    out << "update," << num(u.t) << ',' << u.label << ',' << u.dof << ','
        << num(u.nis) << '\n';
  }
  out << "# verdict,t,stationary,df_stat,window_std\n";
  for (const auto& v : d.verdicts) {
    out << "verdict," << num(v.t) << ',' << (v.stationary ? 1 : 0) << ','
        << num(v.df_stat) << ',' << num(v.window_std) << '\n';
  }
  out << "# bias,t,bax,bay,baz,bwx,bwy,bwz,tax,tay,taz\n";
  for (const auto& b : d.bias) {
    out << "bias," << num(b.t);
    for (int i = 0; i < 3; ++i) out << ',' << num(b.b_a[i]);
    for (int i = 0; i < 3; ++i) out << ',' << num(b.b_w[i]);
    for (int i = 0; i < 3; ++i) out << ',' << num(b.t_a[i]);
    out << '\n';
  }
  out << "# wall,t,id,theta,d\n";
  for (const auto& w : d.walls) {
    out << "wall," << num(w.t) << ',' << w.id << ',' << num(w.theta) << ','
        << num(w.d) << '\n';
  }
  if (!out) throw IoError("failed writing diagnostics");
}

void write_summary(std::ostream& out, const SessionResult& r) {
  for (const auto& [k, v] : r.summary) out << k << " = " << v << '\n';
  if (!out) throw IoError("failed writing summary");
}

}  // namespace odo
