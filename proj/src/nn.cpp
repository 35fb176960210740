#include "sixd/nn.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sixd::nn {

void zero_grads(const ParamRefs& params) {
  for (Parameter* p : params) p->grad.setZero();
}

double grad_norm(const ParamRefs& params) {
  double sq = 0.0;
  for (const Parameter* p : params) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

void Linear::init_xavier(Rng& rng) {
  const double limit = std::sqrt(6.0 / (in_dim() + out_dim()));
  for (Eigen::Index i = 0; i < w.value.size(); ++i)
    w.value.data()[i] = rng.uniform(-limit, limit);
  b.value.setZero();
}

double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void Conv3x3::init_xavier(Rng& rng) {
  const double limit = std::sqrt(6.0 / (9.0 * in_ch + out_ch));
  for (Eigen::Index i = 0; i < w.value.size(); ++i)
    w.value.data()[i] = rng.uniform(-limit, limit);
  b.value.setZero();
}

Mat Conv3x3::im2col(const FeatureMap& x) const {
  const int w_ = x.width, h_ = x.height, c = x.channels();
  Mat cols = Mat::Zero(static_cast<Eigen::Index>(w_) * h_, 9 * c);
  for (int v = 0; v < h_; ++v) {
    for (int dy = -1; dy <= 1; ++dy) {
      const int sv = v + dy;
      if (sv < 0 || sv >= h_) continue;
      for (int dx = -1; dx <= 1; ++dx) {
        const int k = (dy + 1) * 3 + (dx + 1);
        const int u0 = std::max(0, -dx), u1 = w_ - std::max(0, dx);
        if (u0 >= u1) continue;
        // rows [v*w+u0, v*w+u1) read from [sv*w+u0+dx, ...)
        cols.block(x.pixel(u0, v), static_cast<Eigen::Index>(k) * c, u1 - u0, c) =
            x.data.block(x.pixel(u0 + dx, sv), 0, u1 - u0, c);
      }
    }
  }
  return cols;
}

FeatureMap Conv3x3::forward(const FeatureMap& x, Mat* cols_cache) const {
  Mat cols = im2col(x);
  FeatureMap out(x.width, x.height, out_ch);
  out.data.noalias() = cols * w.value.transpose();
  out.data.rowwise() += b.value.col(0).transpose();
  if (cols_cache) *cols_cache = std::move(cols);
  return out;
}

FeatureMap Conv3x3::backward(const FeatureMap& x, const Mat& cols, const FeatureMap& dy,
                             bool skip_dx) {
  w.grad.noalias() += dy.data.transpose() * cols;
  b.grad.col(0).noalias() += dy.data.colwise().sum().transpose();
  if (skip_dx) return {};

  const Mat dcols = dy.data * w.value;  // (H*W) x 9C
  FeatureMap dx(x.width, x.height, x.channels());
  const int w_ = x.width, h_ = x.height, c = x.channels();
  for (int v = 0; v < h_; ++v) {
    for (int dy_ = -1; dy_ <= 1; ++dy_) {
      const int sv = v + dy_;
      if (sv < 0 || sv >= h_) continue;
      for (int dx_ = -1; dx_ <= 1; ++dx_) {
        const int k = (dy_ + 1) * 3 + (dx_ + 1);
        const int u0 = std::max(0, -dx_), u1 = w_ - std::max(0, dx_);
        if (u0 >= u1) continue;
        dx.data.block(x.pixel(u0 + dx_, sv), 0, u1 - u0, c) +=
            dcols.block(x.pixel(u0, v), static_cast<Eigen::Index>(k) * c, u1 - u0, c);
      }
    }
  }
  return dx;
}

FeatureMap conv1x1_forward(const Linear& layer, const FeatureMap& x) {
  FeatureMap out(x.width, x.height, layer.out_dim());
  out.data = layer.forward(x.data);
  return out;
}

FeatureMap conv1x1_backward(Linear& layer, const FeatureMap& x, const FeatureMap& dy,
                            bool skip_dx) {
  Mat dx = layer.backward(x.data, dy.data, skip_dx);
  if (skip_dx) return {};
  FeatureMap out(x.width, x.height, x.channels());
  out.data = std::move(dx);
  return out;
}

FeatureMap avgpool2_forward(const FeatureMap& x) {
  const int ow = x.width / 2, oh = x.height / 2;
  FeatureMap out(ow, oh, x.channels());
  for (int v = 0; v < oh; ++v)
    for (int u = 0; u < ow; ++u)
      out.data.row(out.pixel(u, v)) =
          0.25 * (x.data.row(x.pixel(2 * u, 2 * v)) + x.data.row(x.pixel(2 * u + 1, 2 * v)) +
                  x.data.row(x.pixel(2 * u, 2 * v + 1)) +
                  x.data.row(x.pixel(2 * u + 1, 2 * v + 1)));
  return out;
}

FeatureMap avgpool2_backward(const FeatureMap& dy, int in_width, int in_height) {
  FeatureMap dx(in_width, in_height, dy.channels());
  for (int v = 0; v < dy.height; ++v)
    for (int u = 0; u < dy.width; ++u) {
      const auto g = 0.25 * dy.data.row(dy.pixel(u, v));
      dx.data.row(dx.pixel(2 * u, 2 * v)) = g;
      dx.data.row(dx.pixel(2 * u + 1, 2 * v)) = g;
      dx.data.row(dx.pixel(2 * u, 2 * v + 1)) = g;
      dx.data.row(dx.pixel(2 * u + 1, 2 * v + 1)) = g;
    }
  return dx;
}

FeatureMap upsample2_forward(const FeatureMap& x) {
  FeatureMap out(x.width * 2, x.height * 2, x.channels());
  for (int v = 0; v < out.height; ++v)
    for (int u = 0; u < out.width; ++u)
      out.data.row(out.pixel(u, v)) = x.data.row(x.pixel(u / 2, v / 2));
  return out;
}

FeatureMap upsample2_backward(const FeatureMap& dy) {
  FeatureMap dx(dy.width / 2, dy.height / 2, dy.channels());
  for (int v = 0; v < dy.height; ++v)
    for (int u = 0; u < dy.width; ++u)
      dx.data.row(dx.pixel(u / 2, v / 2)) += dy.data.row(dy.pixel(u, v));
  return dx;
}

FeatureMap map_tanh_forward(const FeatureMap& x) {
  FeatureMap out = x;
  out.data = tanh_forward(x.data);
  return out;
}

FeatureMap map_tanh_backward(const FeatureMap& y, const FeatureMap& dy) {
  FeatureMap out = y;
  out.data = tanh_backward(y.data, dy.data);
  return out;
}

void Sgd::step(const ParamRefs& params) {
  double scale = 1.0;
  if (clip_norm > 0.0) {
    const double norm = grad_norm(params);
    if (norm > clip_norm) scale = clip_norm / norm;
  }
  for (Parameter* p : params) {
    Mat& v = velocity.try_emplace(p, Mat::Zero(p->value.rows(), p->value.cols()))
                 .first->second;
    v = momentum * v - lr * scale * p->grad;
    p->value += v;
  }
}

void write_param_blob(const std::string& path,
                      const std::vector<std::pair<std::string, const Mat*>>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const char magic[8] = {'S', 'I', 'X', 'D', 'P', 'A', 'R', 'M'};
  out.write(magic, 8);
  std::uint64_t n = entries.size();
  out.write(reinterpret_cast<const char*>(&n), 8);
  for (const auto& [name, mat] : entries) {
    std::uint32_t len = static_cast<std::uint32_t>(name.size());
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(name.data(), len);
    std::uint64_t rows = mat->rows(), cols = mat->cols();
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);
    out.write(reinterpret_cast<const char*>(mat->data()),
              static_cast<std::streamsize>(sizeof(double) * mat->size()));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::map<std::string, Mat> read_param_blob(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "SIXDPARM", 8) != 0)
    throw std::runtime_error("not a parameter blob: " + path);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  std::map<std::string, Mat> out;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 4);
    std::string name(len, '\0');
    in.read(name.data(), len);
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    Mat m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!in) throw std::runtime_error("truncated parameter blob: " + path);
    out.emplace(std::move(name), std::move(m));
  }
  return out;
}

void load_params(const std::map<std::string, Mat>& blob, const ParamRefs& params) {
  for (Parameter* p : params) {
    auto it = blob.find(p->name);
    if (it == blob.end())
      throw std::runtime_error("checkpoint missing parameter: " + p->name);
    if (it->second.rows() != p->value.rows() || it->second.cols() != p->value.cols())
      throw std::runtime_error("checkpoint shape mismatch for parameter: " + p->name);
    p->value = it->second;
  }
}

}  // namespace sixd::nn
