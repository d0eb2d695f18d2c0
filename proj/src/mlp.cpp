#include "softsense/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "softsense/rng.hpp"
#include "softsense/tables.hpp"

namespace softsense {

MlpNet MlpNet::init(const std::vector<int>& sizes, std::uint64_t seed) {
  if (sizes.size() < 2) throw InputError("mlp: need at least input and output layers");
  for (int s : sizes) {
    if (s < 1) throw InputError("mlp: layer sizes must be positive");
  }
  Rng rng(seed);
  MlpNet net;
  net.sizes = sizes;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l];
    const int fan_out = sizes[l + 1];
    const double std = std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = std * rng.normal();
    }
    net.w.push_back(std::move(w));
    net.b.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

namespace {

// Pre-activations and activations for every layer; a[0] is the input.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> z;  // z[l] = a[l] * w[l]^T + b[l]
  std::vector<Eigen::MatrixXd> a;  // a[l+1] = relu(z[l]) except the last (linear)
};

ForwardCache forward_cached(const MlpNet& net, const Eigen::MatrixXd& x) {
  ForwardCache cache;
  cache.a.push_back(x);
  for (std::size_t l = 0; l < net.w.size(); ++l) {
    Eigen::MatrixXd z = cache.a.back() * net.w[l].transpose();
    z.rowwise() += net.b[l].transpose();
    if (l + 1 < net.w.size()) {
      cache.a.push_back(z.cwiseMax(0.0));
    } else {
      cache.a.push_back(z);
    }
    cache.z.push_back(std::move(z));
  }
  return cache;
}

}  // namespace

Eigen::MatrixXd MlpNet::forward(const Eigen::MatrixXd& x) const {
  if (x.cols() != sizes.front()) throw InputError("mlp: input width mismatch");
  return forward_cached(*this, x).a.back();
}

double huber(double r, double delta) {
  const double ar = std::abs(r);
  return ar <= delta ? 0.5 * r * r : delta * (ar - 0.5 * delta);
}

double huber_derivative(double r, double delta) { return std::clamp(r, -delta, delta); }

double mlp_loss(const MlpNet& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double delta,
                MlpGradients* grads) {
  if (x.rows() != y.rows()) throw InputError("mlp: input and target row counts differ");
  if (y.cols() != net.sizes.back()) throw InputError("mlp: target width mismatch");
  if (x.rows() == 0) throw InputError("mlp: empty batch");
  if (!(delta > 0.0)) throw InputError("mlp: huber delta must be positive");

  const auto cache = forward_cached(net, x);
  const Eigen::MatrixXd r = cache.a.back() - y;
  const double denom = static_cast<double>(r.rows() * r.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.cols(); ++j) loss += huber(r(i, j), delta);
  }
  loss /= denom;
  if (!grads) return loss;

  grads->w.assign(net.w.size(), {});
  grads->b.assign(net.b.size(), {});
  Eigen::MatrixXd delta_l =
      r.unaryExpr([delta](double v) { return huber_derivative(v, delta); }) / denom;
  for (std::size_t l = net.w.size(); l-- > 0;) {
    grads->w[l] = delta_l.transpose() * cache.a[l];
    grads->b[l] = delta_l.colwise().sum().transpose();
    if (l > 0) {
      delta_l = (delta_l * net.w[l]).cwiseProduct(
          cache.z[l - 1].unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    }
  }
  return loss;
}

AdamOptimizer::AdamOptimizer(const MlpNet& net, double learning_rate) : lr_(learning_rate) {
  for (const auto& w : net.w) {
    mw_.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    vw_.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : net.b) {
    mb_.push_back(Eigen::VectorXd::Zero(b.size()));
    vb_.push_back(Eigen::VectorXd::Zero(b.size()));
  }
}

void AdamOptimizer::step(MlpNet& net, const MlpGradients& grads) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-7;
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t l = 0; l < net.w.size(); ++l) {
    mw_[l] = kBeta1 * mw_[l] + (1.0 - kBeta1) * grads.w[l];
    vw_[l].array() = kBeta2 * vw_[l].array() + (1.0 - kBeta2) * grads.w[l].array().square();
    net.w[l].array() -= lr_ * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + kEps);
    mb_[l] = kBeta1 * mb_[l] + (1.0 - kBeta1) * grads.b[l];
    vb_[l].array() = kBeta2 * vb_[l].array() + (1.0 - kBeta2) * grads.b[l].array().square();
    net.b[l].array() -= lr_ * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + kEps);
  }
}

namespace {

double mean_abs_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().mean();
}

}  // namespace

TrainResult train_mlp(const AlignedDataset& data, const TrainConfig& cfg) {
  data.check_invariants();
  if (data.train_idx.empty() || data.test_idx.empty()) {
    throw InputError("mlp: training requires non-empty train and test splits");
  }
  if (cfg.max_epochs < 1) throw InputError("mlp: max_epochs must be positive");
  if (!(cfg.learning_rate > 0.0)) throw InputError("mlp: learning rate must be positive");
  if (cfg.hidden.empty()) throw InputError("mlp: need at least one hidden layer");

  const Eigen::MatrixXd xs = apply_scaler(data.x_scaler, data.X);
  const Eigen::MatrixXd ys = apply_scaler(data.y_scaler, data.Y);
  const Eigen::MatrixXd x_train = select_rows(xs, data.train_idx);
  const Eigen::MatrixXd y_train = select_rows(ys, data.train_idx);
  const Eigen::MatrixXd x_test = select_rows(xs, data.test_idx);
  const Eigen::MatrixXd y_test_raw = select_rows(data.Y, data.test_idx);

  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(data.X.cols()));
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(kNumLabPoints);

  MlpNet net = MlpNet::init(sizes, cfg.seed ^ fnv1a64("mlp.init"));
  AdamOptimizer adam(net, cfg.learning_rate);

  TrainResult result;
  result.net = net;
  BestTracker tracker;
  MlpGradients grads;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    mlp_loss(net, x_train, y_train, cfg.huber_delta, &grads);
    adam.step(net, grads);
    const Eigen::MatrixXd pred = invert_scaler(data.y_scaler, net.forward(x_test));
    if (tracker.offer(epoch, mean_abs_error(pred, y_test_raw))) {
      result.net = net;
    }
    result.epochs_run = epoch;
  }
  result.best_epoch = tracker.best_epoch;
  result.best_test_mae = tracker.best;
  return result;
}

Eigen::MatrixXd predict_celsius(const ModelBundle& bundle, const Eigen::MatrixXd& x_raw) {
  return invert_scaler(bundle.y_scaler, bundle.net.forward(apply_scaler(bundle.x_scaler, x_raw)));
}

namespace {

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* p, std::size_t n, const std::string& path) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n)) {
    throw InputError(path + ": truncated model bundle");
  }
}

void write_u32(std::ofstream& out, std::uint32_t v) { write_bytes(out, &v, 4); }

std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  read_bytes(in, &v, 4, path);
  return v;
}

void write_f64(std::ofstream& out, double v) { write_bytes(out, &v, 8); }

double read_f64(std::ifstream& in, const std::string& path) {
  double v = 0;
  read_bytes(in, &v, 8, path);
  return v;
}

void write_scaler(std::ofstream& out, const Scaler& s) {
  write_u32(out, static_cast<std::uint32_t>(s.mean.size()));
  for (Eigen::Index i = 0; i < s.mean.size(); ++i) write_f64(out, s.mean(i));
  for (Eigen::Index i = 0; i < s.std.size(); ++i) write_f64(out, s.std(i));
}

Scaler read_scaler(std::ifstream& in, const std::string& path) {
  const std::uint32_t n = read_u32(in, path);
  Scaler s;
  s.mean.resize(n);
  s.std.resize(n);
  for (Eigen::Index i = 0; i < s.mean.size(); ++i) s.mean(i) = read_f64(in, path);
  for (Eigen::Index i = 0; i < s.std.size(); ++i) s.std(i) = read_f64(in, path);
  return s;
}

}  // namespace

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  if (bundle.net.sizes.size() < 2) throw InputError("bundle: uninitialized network");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open file for writing: " + path);
  out.write("SSMB", 4);
  write_u32(out, 1);  // version
  write_u32(out, static_cast<std::uint32_t>(bundle.net.sizes.size()));
  for (int s : bundle.net.sizes) write_u32(out, static_cast<std::uint32_t>(s));
  for (std::size_t l = 0; l < bundle.net.w.size(); ++l) {
    const auto& w = bundle.net.w[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) write_f64(out, w(r, c));
    }
    for (Eigen::Index i = 0; i < bundle.net.b[l].size(); ++i) write_f64(out, bundle.net.b[l](i));
  }
  write_scaler(out, bundle.x_scaler);
  write_scaler(out, bundle.y_scaler);
  write_u32(out, static_cast<std::uint32_t>(bundle.feature_names.size()));
  for (const std::string& name : bundle.feature_names) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    write_bytes(out, name.data(), name.size());
  }
  write_bytes(out, &bundle.seed, 8);
  write_u32(out, bundle.best_epoch);
  write_f64(out, bundle.best_test_mae);
  if (!out) throw InputError("write failed: " + path);
}

ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("missing model bundle: " + path);
  char magic[4] = {};
  read_bytes(in, magic, 4, path);
  if (std::memcmp(magic, "SSMB", 4) != 0) throw InputError(path + ": not a model bundle");
  const std::uint32_t version = read_u32(in, path);
  if (version != 1) throw InputError(path + ": unsupported version");

  ModelBundle bundle;
  const std::uint32_t n_layers = read_u32(in, path);
  if (n_layers < 2 || n_layers > 64) throw InputError(path + ": malformed header");
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const std::uint32_t s = read_u32(in, path);
    if (s < 1 || s > 100000) throw InputError(path + ": malformed header");
    bundle.net.sizes.push_back(static_cast<int>(s));
  }
  for (std::uint32_t l = 0; l + 1 < n_layers; ++l) {
    Eigen::MatrixXd w(bundle.net.sizes[l + 1], bundle.net.sizes[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = read_f64(in, path);
    }
    Eigen::VectorXd b(bundle.net.sizes[l + 1]);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = read_f64(in, path);
    bundle.net.w.push_back(std::move(w));
    bundle.net.b.push_back(std::move(b));
  }
  bundle.x_scaler = read_scaler(in, path);
  bundle.y_scaler = read_scaler(in, path);
  const std::uint32_t n_names = read_u32(in, path);
  if (n_names > 100000) throw InputError(path + ": malformed header");
  for (std::uint32_t i = 0; i < n_names; ++i) {
    const std::uint32_t len = read_u32(in, path);
    if (len > 4096) throw InputError(path + ": malformed header");
    std::string name(len, '\0');
    read_bytes(in, name.data(), len, path);
    bundle.feature_names.push_back(std::move(name));
  }
  read_bytes(in, &bundle.seed, 8, path);
  bundle.best_epoch = read_u32(in, path);
  bundle.best_test_mae = read_f64(in, path);
  if (bundle.x_scaler.mean.size() != bundle.net.sizes.front() ||
      bundle.y_scaler.mean.size() != bundle.net.sizes.back()) {
    throw InputError(path + ": scaler widths do not match the network");
  }
  return bundle;
}

}  // namespace softsense
