#pragma once

#include <vector>

#include "lamarck/controller.hpp"
#include "lamarck/morphology.hpp"

namespace lamarck {

// Deterministic surrogate locomotion model.  A closed-loop network drives the
// joints through slew-limited strokes; anisotropic traction (forward strokes
// pull harder than backward strokes cost) turns oscillation into net
// displacement, weighted by how much structure each hinge moves.
struct SimConfig {
  double dt = 0.02;                // s
  double settle_duration = 5.0;    // s, zero commands, not scored
  double active_duration = 30.0;   // s, scored
  double omega_max = 3.14159265358979323846;   // rad/s joint slew limit
  double theta_range = 1.57079632679489661923; // rad, joint clamp ±π/2
  double c_forward = 0.05;         // m per rad of positive stroke
  double c_back = 0.02;            // m per rad of negative stroke (cost)
  double theta_contact = 1.2;      // rad, ground-contact threshold
  double contact_penalty = 0.005;  // fitness per contact event
  int contact_cutoff = 200;        // events; beyond this fitness = -1
  double height_coeff = 0.05;      // m per module-unit of initial height
};

struct SimResult {
  double d = 0.0;   // |x_final - x_start|
  double l = 0.0;   // initial-height penalty, height_coeff * z_max
  int c_hinge = 0;  // hinge-ground contact events
  double f = 0.0;
  bool contact_cutoff_hit = false;
};

// Optional per-step trace for the replay command.
struct SimTrace {
  struct Row {
    int step = 0;  // global step index, settle phase included
    double x = 0.0;
    double v = 0.0;
    std::vector<double> theta;
    int contacts = 0;  // cumulative
  };
  std::vector<Row> rows;
};

// f = -1 if c_hinge exceeds the cutoff, else d - l - contact_penalty * c_hinge.
double fitness(const SimResult& r, const SimConfig& cfg);

// Settle then active phase; see SimConfig.  Pure and deterministic: identical
// inputs give bit-identical results.  Throws on infeasible bodies or on a
// params/morphology dimension mismatch.
SimResult simulate(const BodyPhenotype& p, const ParamVector& params, const SimConfig& cfg,
                   SimTrace* trace = nullptr);

}  // namespace lamarck
