#include "lamarck/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lamarck {
namespace {

long steps_for(double duration, double dt, const char* what) {
  const long steps = std::lround(duration / dt);
  if (steps < 0 || std::abs(static_cast<double>(steps) * dt - duration) > 1e-9) {
    throw std::invalid_argument(std::string(what) + " duration must be divisible by dt");
  }
  return steps;
}

}  // namespace

double fitness(const SimResult& r, const SimConfig& cfg) {
  if (r.c_hinge > cfg.contact_cutoff) return -1.0;
  return r.d - r.l - cfg.contact_penalty * static_cast<double>(r.c_hinge);
}

SimResult simulate(const BodyPhenotype& p, const ParamVector& params, const SimConfig& cfg,
                   SimTrace* trace) {
  if (!check_feasibility(p).feasible) {
    throw std::invalid_argument("simulate: infeasible body");
  }
  if (!(cfg.dt > 0.0) || !(cfg.omega_max > 0.0) || !(cfg.theta_range > 0.0)) {
    throw std::invalid_argument("simulate: nonpositive timing/range constants");
  }
  if (!(cfg.c_forward > cfg.c_back) || cfg.c_back < 0.0) {
    throw std::invalid_argument("simulate: traction gains require c_forward > c_back >= 0");
  }
  const long settle_steps = steps_for(cfg.settle_duration, cfg.dt, "settle");
  const long active_steps = steps_for(cfg.active_duration, cfg.dt, "active");

  const int h = p.h;
  const Network net = decode(params, NetworkSpec{h});  // throws on size mismatch

  Eigen::VectorXd engagement(h);
  for (int i = 0; i < h; ++i) {
    engagement(i) =
        (1.0 + p.descendant_counts.at(p.hinge_ids[static_cast<size_t>(i)])) / p.m;
  }

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(h);
  double x = 0.0;
  double v = 0.0;
  int contacts = 0;
  int gstep = 0;

  const auto record = [&] {
    if (!trace) return;
    SimTrace::Row row;
    row.step = gstep;
    row.x = x;
    row.v = v;
    row.theta.assign(theta.data(), theta.data() + h);
    row.contacts = contacts;
    trace->rows.push_back(std::move(row));
  };

  // Settle phase: zero commands, joints pinned at zero, nothing scored.
  for (long s = 0; s < settle_steps; ++s) {
    record();
    ++gstep;
  }

  Eigen::VectorXd input = Eigen::VectorXd::Zero(9 + h);
  Eigen::VectorXd a1(32), a2(16), a3(32), out(h);
  const double max_step = cfg.omega_max * cfg.dt;

  for (long s = 0; s < active_steps; ++s) {
    // inputs: orientation (0,0,0) | linear velocity (v,0,0) | angular (0,0,0) | θ
    input(3) = v;
    input.segment(9, h) = theta;
    a1 = (net.weights[0].transpose() * input + net.biases[0]).array().tanh().matrix();
    a2 = (net.weights[1].transpose() * a1 + net.biases[1]).array().tanh().matrix();
    a3 = (net.weights[2].transpose() * a2 + net.biases[2]).array().tanh().matrix();
    out = (net.weights[3].transpose() * a3 + net.biases[3]).array().tanh().matrix();

    double dx = 0.0;
    for (int i = 0; i < h; ++i) {
      const double target = out(i) * cfg.theta_range;
      const double slewed = std::clamp(target - theta(i), -max_step, max_step);
      const double next = std::clamp(theta(i) + slewed, -cfg.theta_range, cfg.theta_range);
      const double delta = next - theta(i);
      dx += engagement(i) *
            (cfg.c_forward * std::max(delta, 0.0) + cfg.c_back * std::min(delta, 0.0));
      if (theta(i) > -cfg.theta_contact && next <= -cfg.theta_contact) ++contacts;
      theta(i) = next;
    }
    x += dx;
    v = dx / cfg.dt;
    record();
    ++gstep;
  }

  SimResult r;
  r.d = std::abs(x);
  r.l = cfg.height_coeff * static_cast<double>(p.z_max);
  r.c_hinge = contacts;
  r.contact_cutoff_hit = contacts > cfg.contact_cutoff;
  r.f = fitness(r, cfg);
  return r;
}

}  // namespace lamarck
