#pragma once

#include <vector>

namespace syncdrive::mpc {

// Controller weights, horizon and actuator bounds.
//
// The cost being minimized each controller step is
//
//   J(u) = sum_{k=0..H-1} [ c_v (v_{k+1} - v_ref - a_ref (k+1) t_s)^2
//                         + c_a (u_k - a_ref)^2 ] + c_u |u - u_prev|^2
//
// with predicted speeds v_{k+1} = v_k + u_k * t_s, v_0 = v_ego. The sampled
// reference speed is carried forward with the sampled reference acceleration,
// which is exactly the delta-v recursion the speed errors derive from; both
// sampled values are otherwise held constant over the horizon. J is a
// strictly convex quadratic in u whenever the config invariants hold, so the
// box-constrained minimum is unique.
struct MpcConfig {
  double c_v = 1.0;        // speed-error weight
  double c_a = 0.5;        // acceleration-error weight
  double c_u = 0.1;        // control-change penalty
  double t_s = 0.2;        // prediction time step [s]
  int horizon = 15;        // prediction horizon H >= 1
  double a_min = -3.0;     // actuator lower bound [m/s^2]
  double a_max = 2.0;      // actuator upper bound [m/s^2]
  double solver_tol = 1e-8;  // projected-gradient stationarity tolerance
  int max_iters = 200;

  // Throws std::invalid_argument when invariants are violated
  // (c_v + c_a > 0, weights >= 0, a_min < a_max, t_s > 0, horizon >= 1).
  void validate() const;
};

// Latest leader state received over the air. Both values are sampled once
// per controller step; the cost carries the sampled speed forward with the
// sampled acceleration across the horizon.
struct ReferenceState {
  double v_ref_mps = 0.0;
  double a_ref_mps2 = 0.0;
  double source_timestamp_s = 0.0;  // generation time of the message it came from
};

// Acceleration sequence u in R^H for one controller step.
struct ControlSequence {
  std::vector<double> u;  // [m/s^2], length = horizon
  int step_index = 0;     // controller step i this sequence belongs to
};

// All-zero sequence sized for cfg; the usual warm-start seed at step 0.
ControlSequence zero_sequence(const MpcConfig& cfg);

// Predicted speeds v_1..v_H from applying u starting at v_ego. The reference
// enters the cost, not the speed recursion; no standstill clamp is applied
// inside the prediction.
std::vector<double> rollout(double v_ego_mps, const ReferenceState& ref,
                            const ControlSequence& seq, const MpcConfig& cfg);

// Horizon cost of a candidate sequence against the previous applied sequence.
// Throws std::invalid_argument when lengths disagree with the horizon.
double cost(const ControlSequence& seq, const ControlSequence& prev_seq, double v_ego_mps,
            const ReferenceState& ref, const MpcConfig& cfg);

// Exact analytic gradient of cost() with respect to u (affine in u).
std::vector<double> cost_gradient(const ControlSequence& seq, const ControlSequence& prev_seq,
                                  double v_ego_mps, const ReferenceState& ref,
                                  const MpcConfig& cfg);

struct SolveResult {
  ControlSequence sequence;   // optimizer output, elementwise within [a_min, a_max]
  bool converged = false;     // stationarity tolerance met within max_iters
  int iterations = 0;
  double cost = 0.0;          // achieved cost at sequence
  double stationarity = 0.0;  // |u - clamp(u - grad J(u))| at exit
};

// Solves min_u J(u) s.t. a_min <= u_k <= a_max with projected gradient and
// exact line search, warm-started from prev_seq shifted left by one step with
// the last element repeated. Descent is monotone across iterations. When
// max_iters runs out before the tolerance is met, the best iterate is
// returned with converged=false; the caller decides how to react.
SolveResult solve(double v_ego_mps, const ReferenceState& ref, const ControlSequence& prev_seq,
                  const MpcConfig& cfg);

// First element of the sequence, clamped to the actuator bounds. This is the
// value that drives the plant. Throws std::invalid_argument on an empty
// sequence.
double apply_first(const ControlSequence& seq, const MpcConfig& cfg);

}  // namespace syncdrive::mpc
