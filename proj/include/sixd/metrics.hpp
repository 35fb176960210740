#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sixd/geometry.hpp"

namespace sixd {

enum class SymmetryKind { Continuous, Discrete };

struct SymmetryDescriptor {
  Vec3 axis = Vec3::UnitZ();
  SymmetryKind kind = SymmetryKind::Continuous;
  int order = 0;  // n for Discrete(n); ignored for Continuous
};

struct ObjectModel {
  int object_id = 0;
  std::string name;
  PointCloud points;  // the M sampled model points, object frame, meters
  double diameter = 0.0;
  bool symmetric = false;
  std::optional<SymmetryDescriptor> symmetry;

  /// Checks M >= 4, finite points, diameter > 0 and consistent with the
  /// points (1e-9), symmetry descriptor present iff symmetric.
  void validate() const;
};

/// Max pairwise point distance, O(n^2).
double model_diameter(const PointCloud& points);

struct EvalRecord {
  int object_id = 0;
  Pose gt_pose;
  Pose pred_pose;
  double add = 0.0;   // meters
  double adds = 0.0;  // meters
  int refinement_iterations = 0;
  double inference_seconds = 0.0;
};

struct ThresholdRule {
  enum class Kind { Relative, Absolute } kind = Kind::Relative;
  double value = 0.1;  // fraction of diameter, or meters

  static ThresholdRule relative(double fraction);
  static ThresholdRule absolute(double meters);
  double threshold_for(const ObjectModel& model) const;
};

/// Mean distance between gt- and pred-transformed model points.
double add_metric(const Pose& gt, const Pose& pred, const ObjectModel& model);

/// Matching direction for the symmetric metric. AsWritten matches each
/// gt-transformed point to its nearest pred-transformed point; Transposed
/// swaps the roles.
enum class MatchDirection { AsWritten, Transposed };

/// Mean nearest-point distance between the two transformed point sets.
double adds_metric(const Pose& gt, const Pose& pred, const ObjectModel& model,
                   MatchDirection direction = MatchDirection::AsWritten);

using ModelRegistry = std::map<int, ObjectModel>;

struct ObjectAccuracy {
  int object_id = 0;
  std::string name;
  bool symmetric = false;
  int n_frames = 0;
  double fraction = 0.0;  // records below threshold / records
  double mean_add = 0.0;
  double mean_adds = 0.0;
};

struct AccuracyResult {
  std::vector<ObjectAccuracy> objects;  // ordered by object_id
  double mean_fraction = 0.0;           // unweighted over objects
};

/// Per-object success fractions; ADD-S governs symmetric objects, ADD the
/// rest. Throws on an object_id missing from the registry.
AccuracyResult accuracy(const std::vector<EvalRecord>& records,
                        const ModelRegistry& models, const ThresholdRule& rule);

struct ReportRow {
  std::string object;
  bool symmetric = false;
  int n_frames = 0;
  double accuracy_percent = 0.0;
  double mean_add = 0.0;
  double mean_adds = 0.0;
  std::optional<double> mean_seconds;
};

struct Report {
  std::vector<ReportRow> rows;  // per object
  ReportRow mean;               // unweighted over objects; n_frames is the total
  std::optional<double> mean_frame_seconds;
  std::optional<double> median_frame_seconds;
};

/// Table-shaped report; timing fields stay absent when no timings are given.
Report report_table(const AccuracyResult& acc, const std::vector<double>& frame_seconds);

std::string report_to_csv(const Report& report);
std::string report_to_json(const Report& report);
Report report_from_json(const std::string& text);

}  // namespace sixd
