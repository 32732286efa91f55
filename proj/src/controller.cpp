#include "lamarck/controller.hpp"

#include <stdexcept>

namespace lamarck {

int param_count(int h) {
  if (h < 0) throw std::invalid_argument("param_count requires h >= 0");
  const NetworkSpec spec{h};
  const auto n = spec.layer_sizes();
  int total = 0;
  for (int l = 0; l < 4; ++l) total += n[l] * n[l + 1] + n[l + 1];
  return total;  // = 1392 + 65h
}

Network decode(const ParamVector& params, const NetworkSpec& spec) {
  if (params.size() != param_count(spec.h))
    throw std::invalid_argument("parameter/morphology dimension mismatch");
  Network net{spec, {}, {}};
  const auto n = spec.layer_sizes();
  Eigen::Index off = 0;
  for (int l = 0; l < 4; ++l) {
    const int rows = n[l], cols = n[l + 1];
    // row-major block: row i = outgoing weights of unit i in layer l
    net.weights[l] = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                    Eigen::RowMajor>>(params.data() + off, rows, cols);
    off += rows * cols;
    net.biases[l] = params.segment(off, cols);
    off += cols;
  }
  return net;
}

ParamVector flatten(const Network& net) {
  const auto n = net.spec.layer_sizes();
  ParamVector params(param_count(net.spec.h));
  Eigen::Index off = 0;
  for (int l = 0; l < 4; ++l) {
    const int rows = n[l], cols = n[l + 1];
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        params.data() + off, rows, cols) = net.weights[l];
    off += rows * cols;
    params.segment(off, cols) = net.biases[l];
    off += cols;
  }
  return params;
}

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& inputs) {
  if (inputs.size() != 9 + net.spec.h)
    throw std::invalid_argument("input length does not match network spec");
  if (!inputs.allFinite()) throw std::invalid_argument("non-finite network input");
  Eigen::VectorXd x = inputs;
  for (int l = 0; l < 4; ++l)
    x = (net.weights[l].transpose() * x + net.biases[l]).array().tanh().matrix();
  return x;
}

}  // namespace lamarck
