#pragma once

#include <optional>

#include "sixd/geometry.hpp"
#include "sixd/image.hpp"
#include "sixd/nn.hpp"

namespace sixd {

struct FusionConfig {
  int d_rgb = 32;
  int d_geo = 32;
  int d_global = 64;
  int cnn_base = 16;       // encoder channel widths: base, 2*base, 4*base
  int geo_hidden = 64;
  int fusion_hidden = 128;
  int n_pixels = 500;      // N sampled pixels per frame-object

  int fused_dim() const { return d_rgb + d_geo + d_global; }
  void validate() const;
};

/// Minimum crop edge accepted by the color encoder-decoder (three 2x
/// poolings).
constexpr int kMinCropSize = 8;

/// Per-pixel color features over a crop; (x0, y0) anchors the crop in frame
/// coordinates.
struct ColorFeatureMap {
  int x0 = 0, y0 = 0;
  nn::FeatureMap features;  // crop-sized, d_rgb channels
};

/// 3-down/3-up encoder-decoder; output spatial size equals input size
/// (internally padded to a multiple of 8).
class ColorEncoderDecoder {
 public:
  ColorEncoderDecoder(const FusionConfig& config, Rng& rng);

  struct Cache {
    int crop_w = 0, crop_h = 0;
    nn::FeatureMap input;  // padded
    std::vector<nn::FeatureMap> pre_pool;   // activated maps before each pool
    std::vector<nn::FeatureMap> activated;  // every tanh output, in order
    std::vector<nn::Mat> cols;              // im2col cache per conv
  };

  /// crop_rgb is crop-sized with 3 channels in [0, 1]. Throws when either
  /// crop edge is under kMinCropSize.
  nn::FeatureMap forward(const nn::FeatureMap& crop_rgb, Cache* cache = nullptr) const;

  /// d_out matches forward's output; accumulates parameter gradients.
  void backward(const Cache& cache, const nn::FeatureMap& d_out);

  void collect(nn::ParamRefs& out);

 private:
  nn::Conv3x3 enc1_, enc2_, enc3_, bottom_, dec3_, dec2_, dec1_;
  nn::Linear head_;  // 1x1 projection to d_rgb
};

/// Shared per-point MLP; the pooled vector is the average of the last
/// hidden activation over points.
class GeoEmbed {
 public:
  GeoEmbed(const std::string& name, int in_dim, int hidden, int out_dim, Rng& rng);

  struct Cache {
    nn::Mat input, h1, h2;
  };
  struct Output {
    nn::Mat per_point;  // P x out_dim
    nn::Vec pooled;     // hidden
  };

  /// points: P x in_dim, P >= 1.
  Output forward(const nn::Mat& points, Cache* cache = nullptr) const;

  /// Either gradient may be empty (treated as zero).
  void backward(const Cache& cache, const nn::Mat& d_per_point, const nn::Vec& d_pooled);

  void collect(nn::ParamRefs& out);
  int in_dim() const { return l1_.in_dim(); }
  int hidden_dim() const { return l2_.out_dim(); }

 private:
  nn::Linear l1_, l2_, l3_;
};

/// Pairwise color+geometry MLP whose average-pooled output is the global
/// feature.
class FusionMlp {
 public:
  FusionMlp(const FusionConfig& config, Rng& rng);

  struct Cache {
    nn::Mat input, h1, out;
  };

  // pairs: N x (d_rgb + d_geo) -> N x d_global
  nn::Mat forward(const nn::Mat& pairs, Cache* cache = nullptr) const;
  nn::Mat backward(const Cache& cache, const nn::Mat& d_out);

  void collect(nn::ParamRefs& out);

 private:
  nn::Linear f1_, f2_;
};

/// Per-pixel [color | geo | global] features for the N sampled pixels.
struct FusedFeatureSet {
  nn::Mat features;                // N x fused_dim
  std::vector<int> sample_idx;     // into the masked point list, ascending
  std::vector<PixelCoord> pixels;  // frame coordinates per sampled pixel
  PointCloud points;               // deprojected 3-d point per sampled pixel
  int d_rgb = 0, d_geo = 0, d_global = 0;
};

struct FuseCache {
  FusionMlp::Cache mlp;
  nn::Mat color_rows, geo_rows;  // gathered inputs, N x d
};

/// Samples up to n_samples pixels without replacement (all when fewer are
/// available), pairs each pixel's color and geometry features, and pools the
/// MLP outputs into the shared global segment.
FusedFeatureSet fuse(const ColorFeatureMap& colors, const nn::Mat& geo_features,
                     const std::vector<PixelCoord>& pixels, const PointCloud& cloud,
                     int n_samples, Rng& rng, const FusionMlp& mlp,
                     FuseCache* cache = nullptr);

/// Converts an 8-bit crop to a [0,1] feature map.
nn::FeatureMap crop_to_feature_map(const ColorImage& crop);

/// Point-cloud rows for the estimator-side geometry embedding:
/// [p - centroid | centroid] per point.
nn::Mat geometry_input_rows(const PointCloud& cloud);

/// Raw coordinate rows, used by the refiner-side embedding.
nn::Mat point_rows(const PointCloud& cloud);

}  // namespace sixd
