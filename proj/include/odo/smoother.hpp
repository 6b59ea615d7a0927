#pragma once

#include <functional>
#include <vector>

#include "odo/state_model.hpp"

namespace odo {

// One structural step of the forward pass. Between two consecutive steps any
// number of measurement updates may have been applied; they are folded into
// m_filt / P_filt of the step they follow. Augmentations and retirements are
// ordinary steps with a rectangular transition.
struct TraceStep {
  enum class Kind { kPredict, kAugment, kRetire };
  Kind kind = Kind::kPredict;
  double t = 0.0;
  bool emit_row = false;  // predict steps that correspond to an output row
  MatX F;                 // dim_k × dim_{k−1}
  VecX m_pred;
  MatX P_pred;
  VecX m_filt;
  MatX P_filt;
};

struct FilterTrace {
  double t0 = 0.0;
  VecX m0;  // filtered initial belief
  MatX P0;
  std::vector<TraceStep> steps;
};

// Collects the trace during a forward run. Each structural operation pushes
// a step whose filtered belief is then kept current by on_update().
class TraceBuilder {
 public:
  explicit TraceBuilder(bool active) : active_(active) {}
  bool active() const { return active_; }

  void begin(const GaussianBelief& b);
  void on_predict(const MatX& F, const GaussianBelief& after, bool emit_row);
  // `after` has the new block appended at the end (transition [I; 0]).
  void on_augment(const GaussianBelief& after);
  // `kept` lists the surviving flat indices, in order.
  void on_retire(const GaussianBelief& after, const std::vector<int>& kept);
  void on_update(const GaussianBelief& b);

  FilterTrace take() { return std::move(trace_); }

 private:
  bool active_;
  FilterTrace trace_;
};

struct SmoothedStep {
  double t = 0.0;
  bool emit_row = false;
  VecX m;
  MatX P;
};

// Extended Rauch–Tung–Striebel pass over the trace:
//   G_k = P^f_k F_{k+1}ᵀ (P^pred_{k+1})⁻¹,
//   m^s_k = m^f_k + G_k (m^s_{k+1} − m^pred_{k+1}),
//   P^s_k = P^f_k + G_k (P^s_{k+1} − P^pred_{k+1}) G_kᵀ.
// Output index 0 is the smoothed initial belief, index k the smoothed step
// k−1; length is steps.size() + 1. `postprocess` (optional) fixes up each
// smoothed mean, e.g. quaternion renormalization; the identity keeps the
// smoother exact on linear problems. Throws SingularPredictedCovariance if a
// predicted covariance cannot be inverted.
std::vector<SmoothedStep> rts_smooth(
    const FilterTrace& trace,
    const std::function<void(VecX&)>& postprocess = nullptr);

}  // namespace odo
