#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "lamarck/evaluator.hpp"
#include "test_util.hpp"

using namespace lamarck;
using namespace testutil;

namespace {

// Four hinges on the core's side slots: m = 5, every engagement = 0.4,
// z_max = 0.  The workhorse body for closed-form stroke arithmetic.
BodyPhenotype star4() {
  BodyGenotype g;
  g.root = core(0, {hinge(1, 0), hinge(2, 1), hinge(3, 2), hinge(4, 3)});
  return build_phenotype(g);
}

// All-zero controller except the output biases: every joint tracks the
// constant target tanh(bias) * theta_range, unaffected by any feedback.
ParamVector constant_target_params(int h, double out_value) {
  ParamVector p = ParamVector::Zero(param_count(h));
  const double bias = std::atanh(out_value);
  for (int i = 0; i < h; ++i) p[p.size() - h + i] = bias;
  return p;
}

}  // namespace

TEST_CASE("fitness formula is exact") {
  SimConfig cfg;  // contact_penalty 0.005, cutoff 200
  CHECK(fitness({2.5, 0.3, 0, 0.0, false}, cfg) == 2.2);
  CHECK(fitness({1.0, 0.0, 100, 0.0, false}, cfg) == 0.5);
  CHECK(fitness({1.0, 0.0, 201, 0.0, false}, cfg) == -1.0);
  CHECK(fitness({1.0, 0.0, 200, 0.0, false}, cfg) == 0.0);  // at the cutoff, not beyond
  CHECK(fitness({0.0, 0.05, 0, 0.0, false}, cfg) == -0.05);
}

TEST_CASE("a zero controller leaves the body in place") {
  SimConfig cfg;
  BodyPhenotype p = star4();
  SimResult r = simulate(p, ParamVector::Zero(param_count(4)), cfg);
  CHECK(r.d == 0.0);
  CHECK(r.l == 0.0);
  CHECK(r.c_hinge == 0);
  CHECK(r.f == 0.0);
}

TEST_CASE("constant positive strokes advance by engagement-weighted traction") {
  SimConfig cfg;
  BodyPhenotype p = star4();
  const double out = std::tanh(std::atanh(0.5));  // network-rounded 0.5
  SimResult r = simulate(p, constant_target_params(4, 0.5), cfg);
  // Each joint sweeps from 0 to out*theta_range once; engagement 0.4 each.
  const double want = 4 * 0.4 * cfg.c_forward * (out * cfg.theta_range);
  CHECK(r.d == doctest::Approx(want).epsilon(1e-12));
  CHECK(r.c_hinge == 0);
  CHECK(r.f == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("negative strokes cost the smaller backward traction") {
  SimConfig cfg;
  BodyPhenotype p = star4();
  const double out = std::tanh(std::atanh(-0.5));
  SimResult r = simulate(p, constant_target_params(4, -0.5), cfg);
  const double want = 4 * 0.4 * cfg.c_back * (-out * cfg.theta_range);
  CHECK(r.d == doctest::Approx(want).epsilon(1e-12));  // |x|, x itself is negative
  CHECK(r.c_hinge == 0);  // -pi/4 never reaches the -1.2 contact angle
}

TEST_CASE("deep negative strokes touch ground exactly once per joint") {
  SimConfig cfg;
  BodyPhenotype p = star4();
  const double out = std::tanh(std::atanh(-0.9));
  SimResult r = simulate(p, constant_target_params(4, -0.9), cfg);
  CHECK(r.c_hinge == 4);  // one downward crossing of -1.2 per joint, no return
  CHECK_FALSE(r.contact_cutoff_hit);
  const double want_d = 4 * 0.4 * cfg.c_back * (-out * cfg.theta_range);
  CHECK(r.d == doctest::Approx(want_d).epsilon(1e-12));
  CHECK(r.f == doctest::Approx(want_d - cfg.contact_penalty * 4).epsilon(1e-12));
}

TEST_CASE("exceeding the contact cutoff floors fitness at -1") {
  SimConfig cfg;
  cfg.contact_cutoff = 3;  // the 4-contact gait above now busts the budget
  BodyPhenotype p = star4();
  SimResult r = simulate(p, constant_target_params(4, -0.9), cfg);
  CHECK(r.c_hinge == 4);
  CHECK(r.contact_cutoff_hit);
  CHECK(r.f == -1.0);
  CHECK(r.d > 0.0);  // displacement still measured and reported
}

TEST_CASE("initial height is penalized through z_max") {
  SimConfig cfg;
  BodyGenotype g;
  g.root = core(0, {hinge(1, 0), hinge(2, 1), hinge(3, 2), hinge(4, 4)});  // one on top
  BodyPhenotype p = build_phenotype(g);
  REQUIRE(p.z_max == 1);
  SimResult r = simulate(p, ParamVector::Zero(param_count(4)), cfg);
  CHECK(r.d == 0.0);
  CHECK(r.l == doctest::Approx(cfg.height_coeff).epsilon(1e-15));
  CHECK(r.f == doctest::Approx(-cfg.height_coeff).epsilon(1e-15));
}

TEST_CASE("engagement scales with the structure a hinge carries") {
  SimConfig cfg;
  // Hinge 1 carries a brick (subtree of 2 placed modules); hinges 2-4 are
  // bare.  m = 6: engagements 0.5, 1/3, 1/3, 1/3.
  BodyGenotype g;
  g.root = core(0, {hinge(1, 0, 0, {brick(5, 0)}), hinge(2, 1), hinge(3, 2), hinge(4, 3)});
  BodyPhenotype p = build_phenotype(g);
  REQUIRE(p.m == 6);
  REQUIRE(p.descendant_counts.at(1) == 2);
  const double out = std::tanh(std::atanh(0.5));
  SimResult r = simulate(p, constant_target_params(4, 0.5), cfg);
  const double want = (3.0 / 6.0 + 3.0 * 2.0 / 6.0) * cfg.c_forward * (out * cfg.theta_range);
  CHECK(r.d == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("trace covers settle plus active steps with slew-limited onsets") {
  SimConfig cfg;
  BodyPhenotype p = star4();
  SimTrace trace;
  SimResult r = simulate(p, constant_target_params(4, -0.5), cfg, &trace);
  const long settle = 250, active = 1500;
  REQUIRE(static_cast<long>(trace.rows.size()) == settle + active);

  for (long s = 0; s < settle; ++s) {
    const auto& row = trace.rows[static_cast<size_t>(s)];
    CHECK(row.step == s);
    CHECK(row.x == 0.0);
    CHECK(row.v == 0.0);
    CHECK(row.contacts == 0);
    REQUIRE(row.theta.size() == 4);
    for (double t : row.theta) CHECK(t == 0.0);
  }

  // First active step: each joint moves exactly one slew-limit quantum down.
  const auto& first = trace.rows[static_cast<size_t>(settle)];
  CHECK(first.step == settle);
  const double quantum = cfg.omega_max * cfg.dt;
  for (double t : first.theta) CHECK(t == -quantum);  // bit-exact: 0 + clamp hit
  const double dx0 = 4 * 0.4 * cfg.c_back * (-quantum);
  CHECK(first.x == doctest::Approx(dx0).epsilon(1e-13));
  CHECK(first.v == doctest::Approx(dx0 / cfg.dt).epsilon(1e-13));

  // Last row carries the cumulative state the result reports.
  const auto& last = trace.rows.back();
  CHECK(last.step == settle + active - 1);
  CHECK(std::abs(last.x) == doctest::Approx(r.d).epsilon(1e-15));
  CHECK(last.contacts == r.c_hinge);
}

TEST_CASE("simulation is bit-exact deterministic") {
  SimConfig cfg;
  BodyPhenotype p = star4();
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss(0.0, 0.4);
  ParamVector params(param_count(4));
  for (Eigen::Index i = 0; i < params.size(); ++i) params[i] = gauss(rng);

  SimTrace t1, t2;
  SimResult a = simulate(p, params, cfg, &t1);
  SimResult b = simulate(p, params, cfg, &t2);
  CHECK(a.f == b.f);
  CHECK(a.d == b.d);
  CHECK(a.l == b.l);
  CHECK(a.c_hinge == b.c_hinge);
  REQUIRE(t1.rows.size() == t2.rows.size());
  for (size_t i = 0; i < t1.rows.size(); ++i) {
    CHECK(t1.rows[i].x == t2.rows[i].x);
    CHECK(t1.rows[i].v == t2.rows[i].v);
    CHECK(t1.rows[i].theta == t2.rows[i].theta);
    CHECK(t1.rows[i].contacts == t2.rows[i].contacts);
  }
}

TEST_CASE("closed loop matches an independent scalar reimplementation") {
  SimConfig cfg;
  cfg.active_duration = 10.0;  // 500 scored steps is plenty for the check
  BodyPhenotype p = star4();
  const int h = 4;
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> gauss(0.0, 0.5);
  ParamVector params(param_count(h));
  for (Eigen::Index i = 0; i < params.size(); ++i) params[i] = gauss(rng);

  SimResult got = simulate(p, params, cfg);

  // Reference: plain scalar loops over the decoded network and the stroke
  // integration, sharing no Eigen expression code with the implementation.
  Network net = decode(params, NetworkSpec{h});
  auto layer = [&](const std::vector<double>& in, int l) {
    const int rows = static_cast<int>(net.weights[l].rows());
    const int cols = static_cast<int>(net.weights[l].cols());
    std::vector<double> out(static_cast<size_t>(cols));
    for (int j = 0; j < cols; ++j) {
      double s = net.biases[l][j];
      for (int i = 0; i < rows; ++i) s += in[static_cast<size_t>(i)] * net.weights[l](i, j);
      out[static_cast<size_t>(j)] = std::tanh(s);
    }
    return out;
  };

  std::vector<double> theta(h, 0.0);
  double x = 0.0, v = 0.0;
  int contacts = 0;
  const double max_step = cfg.omega_max * cfg.dt;
  const double eng = 2.0 / 5.0;
  for (int s = 0; s < 500; ++s) {
    std::vector<double> in(static_cast<size_t>(9 + h), 0.0);
    in[3] = v;
    for (int i = 0; i < h; ++i) in[static_cast<size_t>(9 + i)] = theta[static_cast<size_t>(i)];
    std::vector<double> out = layer(layer(layer(layer(in, 0), 1), 2), 3);
    double dx = 0.0;
    for (int i = 0; i < h; ++i) {
      const double target = out[static_cast<size_t>(i)] * cfg.theta_range;
      double slewed = target - theta[static_cast<size_t>(i)];
      slewed = std::clamp(slewed, -max_step, max_step);
      double next = std::clamp(theta[static_cast<size_t>(i)] + slewed, -cfg.theta_range,
                               cfg.theta_range);
      const double delta = next - theta[static_cast<size_t>(i)];
      dx += eng * (cfg.c_forward * std::max(delta, 0.0) + cfg.c_back * std::min(delta, 0.0));
      if (theta[static_cast<size_t>(i)] > -cfg.theta_contact && next <= -cfg.theta_contact) {
        ++contacts;
      }
      theta[static_cast<size_t>(i)] = next;
    }
    x += dx;
    v = dx / cfg.dt;
  }

  CHECK(got.d == doctest::Approx(std::abs(x)).epsilon(1e-9));
  CHECK(got.c_hinge == contacts);
  CHECK(got.l == 0.0);
}

TEST_CASE("simulation rejects infeasible bodies") {
  SimConfig cfg;
  BodyPhenotype p = build_phenotype(hinge_chain(3));
  CHECK_THROWS_AS(simulate(p, ParamVector::Zero(param_count(3)), cfg), std::invalid_argument);
}

TEST_CASE("simulation rejects mismatched parameter vectors") {
  SimConfig cfg;
  BodyPhenotype p = star4();
  CHECK_THROWS_AS(simulate(p, ParamVector::Zero(param_count(5)), cfg), std::invalid_argument);
}

TEST_CASE("simulation validates its configuration") {
  BodyPhenotype p = star4();
  ParamVector z = ParamVector::Zero(param_count(4));
  SimConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(simulate(p, z, cfg), std::invalid_argument);
  cfg = SimConfig{};
  cfg.omega_max = -1.0;
  CHECK_THROWS_AS(simulate(p, z, cfg), std::invalid_argument);
  cfg = SimConfig{};
  cfg.theta_range = 0.0;
  CHECK_THROWS_AS(simulate(p, z, cfg), std::invalid_argument);
  cfg = SimConfig{};
  cfg.c_back = cfg.c_forward;  // requires strict anisotropy
  CHECK_THROWS_AS(simulate(p, z, cfg), std::invalid_argument);
  cfg = SimConfig{};
  cfg.c_back = -0.01;
  CHECK_THROWS_AS(simulate(p, z, cfg), std::invalid_argument);
  cfg = SimConfig{};
  cfg.settle_duration = 5.01;  // not a multiple of dt = 0.02
  CHECK_THROWS_AS(simulate(p, z, cfg), std::invalid_argument);
  cfg = SimConfig{};
  cfg.active_duration = 30.03;
  CHECK_THROWS_AS(simulate(p, z, cfg), std::invalid_argument);
  cfg = SimConfig{};
  CHECK_NOTHROW(simulate(p, z, cfg));
}
