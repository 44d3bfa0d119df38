#include "syncdrive/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace syncdrive::mpc {

namespace {

double clamp_to_box(double x, const MpcConfig& cfg) {
  return std::clamp(x, cfg.a_min, cfg.a_max);
}

void check_lengths(const ControlSequence& seq, const ControlSequence& prev_seq,
                   const MpcConfig& cfg) {
  const auto h = static_cast<std::size_t>(cfg.horizon);
  if (seq.u.size() != h) {
    throw std::invalid_argument("control sequence length does not match the horizon");
  }
  if (prev_seq.u.size() != seq.u.size()) {
    throw std::invalid_argument("control sequence lengths differ");
  }
}

std::vector<double> raw_rollout(double v_ego, const std::vector<double>& u, double t_s) {
  std::vector<double> v(u.size());
  double cur = v_ego;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cur += u[k] * t_s;
    v[k] = cur;
  }
  return v;
}

// Reference speed at prediction step k+1: the sampled v_ref carried forward
// with the sampled a_ref, matching the delta-v recursion the speed errors
// come from. Without the extrapolation the acceleration feed-forward cancels
// itself against the speed term.
double ref_speed_at(const ReferenceState& ref, std::size_t k, double t_s) {
  return ref.v_ref_mps + ref.a_ref_mps2 * static_cast<double>(k + 1) * t_s;
}

double raw_cost(const std::vector<double>& u, const std::vector<double>& u_prev, double v_ego,
                const ReferenceState& ref, const MpcConfig& cfg) {
  const std::vector<double> v = raw_rollout(v_ego, u, cfg.t_s);
  double total = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double ev = v[k] - ref_speed_at(ref, k, cfg.t_s);
    const double ea = u[k] - ref.a_ref_mps2;
    const double du = u[k] - u_prev[k];
    total += cfg.c_v * ev * ev + cfg.c_a * ea * ea + cfg.c_u * du * du;
  }
  return total;
}

// grad_m = 2 c_v t_s sum_{k>=m} (v_{k+1} - ref_k) + 2 c_a (u_m - a_ref)
//        + 2 c_u (u_m - u_prev_m)
std::vector<double> raw_gradient(const std::vector<double>& u, const std::vector<double>& u_prev,
                                 double v_ego, const ReferenceState& ref, const MpcConfig& cfg) {
  const std::vector<double> v = raw_rollout(v_ego, u, cfg.t_s);
  std::vector<double> g(u.size());
  double suffix = 0.0;
  for (std::size_t m = u.size(); m-- > 0;) {
    suffix += v[m] - ref_speed_at(ref, m, cfg.t_s);
    g[m] = 2.0 * cfg.c_v * cfg.t_s * suffix + 2.0 * cfg.c_a * (u[m] - ref.a_ref_mps2) +
           2.0 * cfg.c_u * (u[m] - u_prev[m]);
  }
  return g;
}

// Hessian-vector product H d = 2 (c_v t_s^2 L^T L d + (c_a + c_u) d),
// where L is the lower-triangular all-ones matrix (prefix sums).
std::vector<double> hessian_times(const std::vector<double>& d, const MpcConfig& cfg) {
  std::vector<double> out(d.size());
  double prefix = 0.0;
  std::vector<double> ld(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    prefix += d[k];
    ld[k] = prefix;
  }
  double suffix = 0.0;
  for (std::size_t m = d.size(); m-- > 0;) {
    suffix += ld[m];
    out[m] = 2.0 * (cfg.c_v * cfg.t_s * cfg.t_s * suffix + (cfg.c_a + cfg.c_u) * d[m]);
  }
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// |u - clamp(u - g)|_2, the projected-gradient stationarity measure.
double stationarity_norm(const std::vector<double>& u, const std::vector<double>& g,
                         const MpcConfig& cfg) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double diff = u[i] - clamp_to_box(u[i] - g[i], cfg);
    s += diff * diff;
  }
  return std::sqrt(s);
}

}  // namespace

void MpcConfig::validate() const {
  if (!(c_v >= 0.0) || !(c_a >= 0.0) || !(c_u >= 0.0)) {
    throw std::invalid_argument("mpc weights must be non-negative");
  }
  if (!(c_v + c_a > 0.0)) {
    throw std::invalid_argument("mpc requires c_v + c_a > 0");
  }
  if (!(t_s > 0.0)) {
    throw std::invalid_argument("mpc requires t_s > 0");
  }
  if (horizon < 1) {
    throw std::invalid_argument("mpc requires horizon >= 1");
  }
  if (!(a_min < a_max)) {
    throw std::invalid_argument("mpc requires a_min < a_max");
  }
  if (!(solver_tol > 0.0) || max_iters < 1) {
    throw std::invalid_argument("mpc requires solver_tol > 0 and max_iters >= 1");
  }
}

ControlSequence zero_sequence(const MpcConfig& cfg) {
  cfg.validate();
  return ControlSequence{std::vector<double>(static_cast<std::size_t>(cfg.horizon), 0.0), 0};
}

std::vector<double> rollout(double v_ego_mps, const ReferenceState& /*ref*/,
                            const ControlSequence& seq, const MpcConfig& cfg) {
  cfg.validate();
  if (seq.u.size() != static_cast<std::size_t>(cfg.horizon)) {
    throw std::invalid_argument("control sequence length does not match the horizon");
  }
  return raw_rollout(v_ego_mps, seq.u, cfg.t_s);
}

double cost(const ControlSequence& seq, const ControlSequence& prev_seq, double v_ego_mps,
            const ReferenceState& ref, const MpcConfig& cfg) {
  cfg.validate();
  check_lengths(seq, prev_seq, cfg);
  return raw_cost(seq.u, prev_seq.u, v_ego_mps, ref, cfg);
}

std::vector<double> cost_gradient(const ControlSequence& seq, const ControlSequence& prev_seq,
                                  double v_ego_mps, const ReferenceState& ref,
                                  const MpcConfig& cfg) {
  cfg.validate();
  check_lengths(seq, prev_seq, cfg);
  return raw_gradient(seq.u, prev_seq.u, v_ego_mps, ref, cfg);
}

SolveResult solve(double v_ego_mps, const ReferenceState& ref, const ControlSequence& prev_seq,
                  const MpcConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(v_ego_mps)) {
    throw std::invalid_argument("solve requires finite v_ego");
  }
  const auto h = static_cast<std::size_t>(cfg.horizon);
  if (prev_seq.u.size() != h) {
    throw std::invalid_argument("previous control sequence length does not match the horizon");
  }

  // Warm start: previous solution shifted left, last element repeated.
  std::vector<double> u(h);
  for (std::size_t k = 0; k + 1 < h; ++k) u[k] = prev_seq.u[k + 1];
  u[h - 1] = prev_seq.u[h - 1];
  for (double& x : u) x = clamp_to_box(x, cfg);

  // Upper bound on the Hessian's largest eigenvalue (|L|_2 <= H), giving the
  // classic safe projected-gradient step 1/L with guaranteed descent.
  const double h_real = static_cast<double>(h);
  const double lipschitz_bound =
      2.0 * (cfg.c_v * cfg.t_s * cfg.t_s * h_real * h_real + cfg.c_a + cfg.c_u);
  const double safe_step = 1.0 / lipschitz_bound;

  bool converged = false;
  int iterations = 0;
  double station = 0.0;

  for (int it = 0; it < cfg.max_iters; ++it) {
    const std::vector<double> g = raw_gradient(u, prev_seq.u, v_ego_mps, ref, cfg);
    station = stationarity_norm(u, g, cfg);
    if (station <= cfg.solver_tol) {
      converged = true;
      break;
    }

    // Exact line search along -g; the minimizer of the quadratic on that ray
    // always descends, so the step can be taken outright while it stays
    // inside the box. When it would leave the box, fall back to the safe
    // projected step, which descends as well. Both branches are monotone
    // without any floating-point cost comparison.
    const double gg = dot(g, g);
    const double gHg = dot(g, hessian_times(g, cfg));
    const double exact_step = gHg > 0.0 ? gg / gHg : safe_step;

    bool interior = true;
    for (std::size_t k = 0; k < h; ++k) {
      const double trial = u[k] - exact_step * g[k];
      if (trial < cfg.a_min || trial > cfg.a_max) {
        interior = false;
        break;
      }
    }
    const double step = interior ? exact_step : std::min(exact_step, safe_step);
    for (std::size_t k = 0; k < h; ++k) {
      u[k] = clamp_to_box(u[k] - step * g[k], cfg);
    }
    ++iterations;
  }

  if (!converged) {
    const std::vector<double> g = raw_gradient(u, prev_seq.u, v_ego_mps, ref, cfg);
    station = stationarity_norm(u, g, cfg);
    converged = station <= cfg.solver_tol;
  }

  SolveResult result;
  result.cost = raw_cost(u, prev_seq.u, v_ego_mps, ref, cfg);
  result.sequence = ControlSequence{std::move(u), prev_seq.step_index + 1};
  result.converged = converged;
  result.iterations = iterations;
  result.stationarity = station;
  return result;
}

double apply_first(const ControlSequence& seq, const MpcConfig& cfg) {
  cfg.validate();
  if (seq.u.empty()) {
    throw std::invalid_argument("apply_first requires a non-empty control sequence");
  }
  return clamp_to_box(seq.u.front(), cfg);
}

}  // namespace syncdrive::mpc
