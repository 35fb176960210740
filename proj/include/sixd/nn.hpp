#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "sixd/rng.hpp"

namespace sixd::nn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Parameter {
  std::string name;
  Mat value;
  Mat grad;

  Parameter() = default;
  Parameter(std::string n, int rows, int cols)
      : name(std::move(n)), value(Mat::Zero(rows, cols)), grad(Mat::Zero(rows, cols)) {}
};

using ParamRefs = std::vector<Parameter*>;

void zero_grads(const ParamRefs& params);
double grad_norm(const ParamRefs& params);

/// Fully connected layer on row-per-item matrices.
struct Linear {
  Parameter w;  // out x in
  Parameter b;  // out x 1

  Linear() = default;
  Linear(const std::string& name, int in, int out)
      : w(name + ".w", out, in), b(name + ".b", out, 1) {}

  int in_dim() const { return static_cast<int>(w.value.cols()); }
  int out_dim() const { return static_cast<int>(w.value.rows()); }

  void init_xavier(Rng& rng);

  // x: items x in -> items x out
  Mat forward(const Mat& x) const {
    return (x * w.value.transpose()).rowwise() + b.value.col(0).transpose();
  }

  // Accumulates into w.grad / b.grad; returns dL/dx unless skip_dx.
  Mat backward(const Mat& x, const Mat& dy, bool skip_dx = false) {
    w.grad.noalias() += dy.transpose() * x;
    b.grad.col(0).noalias() += dy.colwise().sum().transpose();
    if (skip_dx) return {};
    return dy * w.value;
  }

  void collect(ParamRefs& out) {
    out.push_back(&w);
    out.push_back(&b);
  }
};

inline Mat tanh_forward(const Mat& x) { return x.array().tanh(); }
inline Mat tanh_backward(const Mat& y, const Mat& dy) {
  return (dy.array() * (1.0 - y.array().square())).matrix();
}

double softplus(double x);
double sigmoid(double x);

/// Channels-last feature map: rows are pixels (row-major over H x W),
/// columns are channels.
struct FeatureMap {
  int width = 0, height = 0;
  Mat data;  // (height*width) x channels

  FeatureMap() = default;
  FeatureMap(int w, int h, int channels)
      : width(w), height(h), data(Mat::Zero(static_cast<Eigen::Index>(w) * h, channels)) {}
  int channels() const { return static_cast<int>(data.cols()); }
  Eigen::Index pixel(int u, int v) const {
    return static_cast<Eigen::Index>(v) * width + u;
  }
};

/// 3x3 same-padding convolution via im2col.
struct Conv3x3 {
  Parameter w;  // out x (9*in)
  Parameter b;  // out x 1
  int in_ch = 0, out_ch = 0;

  Conv3x3() = default;
  Conv3x3(const std::string& name, int in, int out)
      : w(name + ".w", out, 9 * in), b(name + ".b", out, 1), in_ch(in), out_ch(out) {}

  void init_xavier(Rng& rng);

  Mat im2col(const FeatureMap& x) const;
  FeatureMap forward(const FeatureMap& x, Mat* cols_cache = nullptr) const;
  // dy matches forward output; returns dL/dx unless skip_dx.
  FeatureMap backward(const FeatureMap& x, const Mat& cols, const FeatureMap& dy,
                      bool skip_dx = false);

  void collect(ParamRefs& out) {
    out.push_back(&w);
    out.push_back(&b);
  }
};

/// 1x1 convolution is a Linear over pixel rows; helpers keep call sites tidy.
FeatureMap conv1x1_forward(const Linear& layer, const FeatureMap& x);
FeatureMap conv1x1_backward(Linear& layer, const FeatureMap& x, const FeatureMap& dy,
                            bool skip_dx = false);

// 2x2 average pool, stride 2 (even dimensions required).
FeatureMap avgpool2_forward(const FeatureMap& x);
FeatureMap avgpool2_backward(const FeatureMap& dy, int in_width, int in_height);

// Nearest-neighbor 2x upsample.
FeatureMap upsample2_forward(const FeatureMap& x);
FeatureMap upsample2_backward(const FeatureMap& dy);

FeatureMap map_tanh_forward(const FeatureMap& x);
FeatureMap map_tanh_backward(const FeatureMap& y, const FeatureMap& dy);

/// SGD with momentum and per-call gradient-norm clipping.
struct Sgd {
  double lr = 1e-3;
  double momentum = 0.9;
  double clip_norm = 5.0;  // <= 0 disables clipping

  void step(const ParamRefs& params);

  std::unordered_map<Parameter*, Mat> velocity;
};

// Named-matrix blob: parameters and optimizer state share the format.
void write_param_blob(const std::string& path,
                      const std::vector<std::pair<std::string, const Mat*>>& entries);
std::map<std::string, Mat> read_param_blob(const std::string& path);

/// Copies matching names from the blob into params; throws if a name is
/// missing or a shape differs (message names the parameter).
void load_params(const std::map<std::string, Mat>& blob, const ParamRefs& params);

}  // namespace sixd::nn
