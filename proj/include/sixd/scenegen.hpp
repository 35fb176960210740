#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sixd/geometry.hpp"
#include "sixd/image.hpp"
#include "sixd/metrics.hpp"

namespace sixd {

struct Frame {
  int frame_id = 0;
  ColorImage color;
  DepthMap depth;  // meters, quantized to whole millimeters
  MaskImage mask;  // object ids, 0 = background
  std::map<int, Pose> gt_poses;
  CameraIntrinsics intrinsics;

  /// Mask ids must be registered, masked depth positive, every masked
  /// object posed.
  void validate(const std::vector<int>& registered_ids) const;
};

/// ObjectModel plus per-point albedo for rendering.
struct SceneModel {
  ObjectModel model;
  std::vector<Vec3> albedo;  // per point, [0, 1]
};

enum class SymmetricShape { Cylinder, Box };

/// Cylinder: complete rings of kAngularSamples points about +z, so any
/// rotation about the axis stays within chord(r_max, pi/kAngularSamples)
/// of a sample. Box: square cross-section, face grids closed under 90deg
/// rotation about +z (discrete(4)). Point count rounds up to a full-ring
/// multiple.
SceneModel make_symmetric_model(std::uint64_t seed, SymmetricShape kind, int n_points,
                                int object_id = 0, const std::string& name = {});

/// Smooth random blob: Fibonacci-sphere directions with a seeded low-order
/// harmonic radius field. Rejects (and reseeds, up to 10 attempts) any draw
/// whose ADD-S to a rotated copy on a rotation grid is within 5x the
/// sampling gap.
SceneModel make_asymmetric_model(std::uint64_t seed, int n_points, int object_id = 0,
                                 const std::string& name = {});

constexpr int kCylinderAngularSamples = 32;

/// Max over points of the nearest-other-point distance.
double sampling_gap(const PointCloud& points);

struct RenderSettings {
  double lighting_gain = 1.0;
  double noise_sigma = 0.0;  // gaussian pixel noise in [0,1] units
  double splat_radius = 1.0;
  std::uint64_t noise_seed = 0;
  Rgb8 background{18, 18, 22};
};

/// Z-buffer point-splat rendering; nearest point wins each pixel. A model
/// with every point outside the frustum is warned about on stderr and left
/// out of the mask (its gt pose is kept).
Frame render(const std::vector<const SceneModel*>& models, const std::vector<Pose>& poses,
             const CameraIntrinsics& k, const RenderSettings& settings);

struct ObjectSpec {
  std::string kind;  // "cylinder" | "box" | "blob"
  std::uint64_t seed = 0;
  int n_points = 512;
};

struct DatasetConfig {
  std::string out_dir;
  std::uint64_t seed = 1;
  int width = 160, height = 120;
  double fx = 140.0, fy = 140.0, cx = 79.5, cy = 59.5;
  int n_train = 300, n_test = 50;
  int clutter = 2;  // frames hold 1..clutter objects
  std::vector<ObjectSpec> objects;
  double light_lo = 0.4, light_hi = 1.3;
  double noise_sigma = 4.0 / 255.0;
  TranslationBounds bounds{{-0.22, -0.15, 0.8}, {0.22, 0.15, 1.4}};

  CameraIntrinsics intrinsics() const {
    return {fx, fy, cx, cy, width, height};
  }
};

struct ManifestObject {
  int id = 0;
  std::string name;
  bool symmetric = false;
  std::optional<SymmetryDescriptor> symmetry;
  double diameter = 0.0;
  std::string points_file;  // relative to the dataset root
};

struct FrameRecord {
  int frame_id = 0;
  std::string color_path, depth_path;
  std::string mask_path;  // empty -> mask synthesized from models + poses
  std::map<int, Pose> poses;
};

struct DatasetManifest {
  std::string root;
  std::uint64_t seed = 0;
  std::string config_hash;
  CameraIntrinsics intrinsics;
  std::vector<ManifestObject> objects;
  std::map<int, FrameRecord> frames;
  std::vector<int> train_ids, test_ids;

  const FrameRecord& frame(int id) const;
};

/// Renders and writes the whole dataset; deterministic in config + seed.
DatasetManifest generate_dataset(const DatasetConfig& config);

DatasetManifest load_manifest(const std::string& dir);
Frame load_frame(const DatasetManifest& manifest, int frame_id);
std::map<int, SceneModel> load_scene_models(const DatasetManifest& manifest);
ModelRegistry load_models(const DatasetManifest& manifest);

// ASCII "x y z r g b" per line, full double precision.
void save_model_points(const std::string& path, const SceneModel& m);
void load_model_points(const std::string& path, SceneModel& m);

/// Reads the documented per-object tree (points.xyz, gt.json, split.json,
/// rgb/, depth/) for the 13 canonical LineMOD objects; eggbox and glue are
/// flagged symmetric. Throws naming the first missing path.
DatasetManifest load_linemod_layout(const std::string& root);

const std::vector<std::string>& linemod_object_names();

}  // namespace sixd
