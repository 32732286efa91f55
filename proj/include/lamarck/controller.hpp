#pragma once

#include <Eigen/Core>
#include <array>

namespace lamarck {

using ParamVector = Eigen::VectorXd;

// Fixed-topology feedforward controller: 9+h inputs (Euler orientation 3,
// linear velocity 3, angular velocity 3, joint positions h in BFS hinge
// order), hidden sizes 32/16/32, h outputs, tanh everywhere.
struct NetworkSpec {
  int h = 0;
  std::array<int, 5> layer_sizes() const { return {9 + h, 32, 16, 32, h}; }
};

// ((9+h)*32+32) + (32*16+16) + (16*32+32) + (32*h+h) = 1392 + 65h
int param_count(int h);

struct Network {
  NetworkSpec spec;
  // weights[l] is (n_l x n_{l+1}): entry (i, j) connects unit i of layer l to
  // unit j of layer l+1.  Flat layout per layer: row-major weights, then bias.
  std::array<Eigen::MatrixXd, 4> weights;
  std::array<Eigen::VectorXd, 4> biases;
};

Network decode(const ParamVector& params, const NetworkSpec& spec);
ParamVector flatten(const Network& net);

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& inputs);

}  // namespace lamarck
