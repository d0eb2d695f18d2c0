#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "softsense/align.hpp"

namespace softsense {

// Fully connected network with ReLU hidden layers and a linear output.
struct MlpNet {
  std::vector<int> sizes;          // e.g. {8, 30, 30, 7}
  std::vector<Eigen::MatrixXd> w;  // w[l] maps sizes[l] -> sizes[l+1]
  std::vector<Eigen::VectorXd> b;

  // Xavier (Glorot) normal weights, zero biases.
  static MlpNet init(const std::vector<int>& sizes, std::uint64_t seed);

  // x: samples x sizes.front(); returns samples x sizes.back().
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
};

struct MlpGradients {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
};

double huber(double r, double delta);
double huber_derivative(double r, double delta);

// Mean Huber loss over all elements of (prediction - target); fills the
// parameter gradients via backpropagation when grads is non-null.
double mlp_loss(const MlpNet& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double delta,
                MlpGradients* grads = nullptr);

// Adam with bias correction; step counter is 1-based.
class AdamOptimizer {
 public:
  AdamOptimizer(const MlpNet& net, double learning_rate);
  void step(MlpNet& net, const MlpGradients& grads);

 private:
  double lr_;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
};

// Strict-improvement checkpoint bookkeeping (epochs are 1-based).
struct BestTracker {
  double best = std::numeric_limits<double>::infinity();
  int best_epoch = 0;

  bool offer(int epoch, double value) {
    if (value < best) {
      best = value;
      best_epoch = epoch;
      return true;
    }
    return false;
  }
};

struct TrainConfig {
  std::vector<int> hidden = {30, 30};
  int max_epochs = 10000;
  double learning_rate = 1e-3;
  double huber_delta = 1.0;
  std::uint64_t seed = 42;
};

struct TrainResult {
  MlpNet net;               // parameters from the best checkpoint
  int best_epoch = 0;       // 1-based
  double best_test_mae = 0; // degC, averaged over points and samples
  int epochs_run = 0;
};

// Full-batch training on the train split, checkpointing on strict test-MAE
// improvement in original units.
TrainResult train_mlp(const AlignedDataset& data, const TrainConfig& cfg);

struct ModelBundle {
  MlpNet net;
  Scaler x_scaler, y_scaler;
  std::vector<std::string> feature_names;
  std::uint64_t seed = 0;
  std::uint32_t best_epoch = 0;
  double best_test_mae = 0.0;
};

// Scales inputs, runs the network, and inverts the output scaler.
Eigen::MatrixXd predict_celsius(const ModelBundle& bundle, const Eigen::MatrixXd& x_raw);

void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

}  // namespace softsense
