#include "odo/smoother.hpp"

#include "odo/errors.hpp"
#include "odo/gaussian.hpp"

namespace odo {

void TraceBuilder::begin(const GaussianBelief& b) {
  if (!active_) return;
  trace_.t0 = b.t;
  trace_.m0 = flatten(b.mean);
  trace_.P0 = b.cov;
}

void TraceBuilder::on_predict(const MatX& F, const GaussianBelief& after,
                              bool emit_row) {
  if (!active_) return;
  TraceStep s;
  s.kind = TraceStep::Kind::kPredict;
  s.t = after.t;
  s.emit_row = emit_row;
  s.F = F;
  s.m_pred = flatten(after.mean);
  s.P_pred = after.cov;
  s.m_filt = s.m_pred;
  s.P_filt = s.P_pred;
  trace_.steps.push_back(std::move(s));
}

void TraceBuilder::on_augment(const GaussianBelief& after) {
  if (!active_) return;
  const int n_new = after.dim();
  const int n_old = trace_.steps.empty() ? static_cast<int>(trace_.m0.size())
                                         : static_cast<int>(trace_.steps.back().m_filt.size());
  TraceStep s;
  s.kind = TraceStep::Kind::kAugment;
  s.t = after.t;
  s.F = MatX::Zero(n_new, n_old);
  s.F.topLeftCorner(n_old, n_old).setIdentity();
  s.m_pred = flatten(after.mean);
  s.P_pred = after.cov;
  s.m_filt = s.m_pred;
  s.P_filt = s.P_pred;
  trace_.steps.push_back(std::move(s));
}

void TraceBuilder::on_retire(const GaussianBelief& after,
                             const std::vector<int>& kept) {
  if (!active_) return;
  const int n_old = trace_.steps.empty() ? static_cast<int>(trace_.m0.size())
                                         : static_cast<int>(trace_.steps.back().m_filt.size());
  TraceStep s;
  s.kind = TraceStep::Kind::kRetire;
  s.t = after.t;
  s.F = MatX::Zero(static_cast<int>(kept.size()), n_old);
  for (size_t i = 0; i < kept.size(); ++i) s.F(static_cast<int>(i), kept[i]) = 1.0;
  s.m_pred = flatten(after.mean);
  s.P_pred = after.cov;
  s.m_filt = s.m_pred;
  s.P_filt = s.P_pred;
  trace_.steps.push_back(std::move(s));
}

void TraceBuilder::on_update(const GaussianBelief& b) {
  if (!active_) return;
  if (trace_.steps.empty()) {
    trace_.m0 = flatten(b.mean);
    trace_.P0 = b.cov;
    return;
  }
  trace_.steps.back().m_filt = flatten(b.mean);
  trace_.steps.back().P_filt = b.cov;
}

std::vector<SmoothedStep> rts_smooth(
    const FilterTrace& trace, const std::function<void(VecX&)>& postprocess) {
  const int S = static_cast<int>(trace.steps.size());
  std::vector<SmoothedStep> out(S + 1);

  out[0].t = trace.t0;
  out[0].emit_row = false;
  if (S == 0) {
    out[0].m = trace.m0;
    out[0].P = trace.P0;
    if (postprocess) postprocess(out[0].m);
    return out;
  }

  // Backward pass seed: last filtered belief is already smoothed.
  out[S].t = trace.steps[S - 1].t;
  out[S].emit_row = trace.steps[S - 1].emit_row;
  out[S].m = trace.steps[S - 1].m_filt;
  out[S].P = trace.steps[S - 1].P_filt;
  if (postprocess) postprocess(out[S].m);

  for (int k = S - 1; k >= 0; --k) {
    const TraceStep& next = trace.steps[k];  // transition k → k+1 in output indexing
    const VecX& m_f = k == 0 ? trace.m0 : trace.steps[k - 1].m_filt;
    const MatX& P_f = k == 0 ? trace.P0 : trace.steps[k - 1].P_filt;

    // G = P_f Fᵀ (P_pred)⁻¹, computed as (P_pred⁻¹ F P_f)ᵀ.
    const MatX G = spd_solve(next.P_pred, next.F * P_f).transpose();

    out[k].t = k == 0 ? trace.t0 : trace.steps[k - 1].t;
    out[k].emit_row = k == 0 ? false : trace.steps[k - 1].emit_row;
    out[k].m = m_f + G * (out[k + 1].m - next.m_pred);
    out[k].P = P_f + G * (out[k + 1].P - next.P_pred) * G.transpose();
    out[k].P = 0.5 * (out[k].P + out[k].P.transpose()).eval();
    if (postprocess) postprocess(out[k].m);
  }
  return out;
}

}  // namespace odo
