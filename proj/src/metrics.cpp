#include "sixd/metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sixd/kdtree.hpp"

namespace sixd {

using nlohmann::json;

namespace {

constexpr int kBruteForceCutoff = 64;  // below this a tree buys nothing

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ObjectModel::validate() const {
  if (points.size() < 4)
    throw std::invalid_argument("ObjectModel '" + name + "': needs at least 4 points");
  for (const Vec3& p : points)
    if (!p.allFinite())
      throw std::invalid_argument("ObjectModel '" + name + "': non-finite point");
  if (!(diameter > 0.0))
    throw std::invalid_argument("ObjectModel '" + name + "': diameter must be positive");
  if (std::abs(diameter - model_diameter(points)) > 1e-9)
    throw std::invalid_argument("ObjectModel '" + name +
                                "': diameter inconsistent with points");
  if (symmetric != symmetry.has_value())
    throw std::invalid_argument("ObjectModel '" + name +
                                "': symmetry descriptor must be present iff symmetric");
}

double model_diameter(const PointCloud& points) {
  double best = 0.0;
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      best = std::max(best, (points[i] - points[j]).squaredNorm());
  return std::sqrt(best);
}

ThresholdRule ThresholdRule::relative(double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("ThresholdRule: relative fraction must be in (0, 1]");
  return {Kind::Relative, fraction};
}

ThresholdRule ThresholdRule::absolute(double meters) {
  if (!(meters > 0.0))
    throw std::invalid_argument("ThresholdRule: absolute threshold must be positive");
  return {Kind::Absolute, meters};
}

double ThresholdRule::threshold_for(const ObjectModel& model) const {
  return kind == Kind::Relative ? value * model.diameter : value;
}

double add_metric(const Pose& gt, const Pose& pred, const ObjectModel& model) {
  if (model.points.empty()) throw std::invalid_argument("add_metric: empty model");
  const Mat3 rg = gt.rotation_matrix(), rp = pred.rotation_matrix();
  double sum = 0.0;
  for (const Vec3& x : model.points) {
    const Vec3 a = rg * x + gt.translation;
    const Vec3 b = rp * x + pred.translation;
    sum += (a - b).norm();
  }
  return sum / static_cast<double>(model.points.size());
}

double adds_metric(const Pose& gt, const Pose& pred, const ObjectModel& model,
                   MatchDirection direction) {
  if (model.points.empty()) throw std::invalid_argument("adds_metric: empty model");
  const Pose& query_pose = direction == MatchDirection::AsWritten ? gt : pred;
  const Pose& target_pose = direction == MatchDirection::AsWritten ? pred : gt;
  const PointCloud queries = apply(query_pose, model.points);
  const PointCloud targets = apply(target_pose, model.points);

  double sum = 0.0;
  if (targets.size() < kBruteForceCutoff) {
    for (const Vec3& q : queries) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& t : targets) best = std::min(best, (q - t).squaredNorm());
      sum += std::sqrt(best);
    }
  } else {
    KdTree3 tree(targets);
    for (const Vec3& q : queries) sum += tree.nearest(q).distance;
  }
  return sum / static_cast<double>(queries.size());
}

AccuracyResult accuracy(const std::vector<EvalRecord>& records,
                        const ModelRegistry& models, const ThresholdRule& rule) {
  struct Tally {
    int n = 0, hits = 0;
    double sum_add = 0.0, sum_adds = 0.0;
  };
  std::map<int, Tally> tallies;
  for (const EvalRecord& rec : records) {
    auto it = models.find(rec.object_id);
    if (it == models.end())
      throw std::invalid_argument("accuracy: unknown object_id " +
                                  std::to_string(rec.object_id));
    const ObjectModel& model = it->second;
    const double governing = model.symmetric ? rec.adds : rec.add;
    Tally& t = tallies[rec.object_id];
    ++t.n;
    if (governing < rule.threshold_for(model)) ++t.hits;
    t.sum_add += rec.add;
    t.sum_adds += rec.adds;
  }

  AccuracyResult out;
  double mean_sum = 0.0;
  for (const auto& [id, t] : tallies) {
    const ObjectModel& model = models.at(id);
    ObjectAccuracy oa;
    oa.object_id = id;
    oa.name = model.name;
    oa.symmetric = model.symmetric;
    oa.n_frames = t.n;
    oa.fraction = static_cast<double>(t.hits) / t.n;
    oa.mean_add = t.sum_add / t.n;
    oa.mean_adds = t.sum_adds / t.n;
    mean_sum += oa.fraction;
    out.objects.push_back(std::move(oa));
  }
  if (!out.objects.empty()) out.mean_fraction = mean_sum / out.objects.size();
  return out;
}

Report report_table(const AccuracyResult& acc, const std::vector<double>& frame_seconds) {
  if (acc.objects.empty()) throw std::invalid_argument("report_table: empty results");
  Report report;
  double acc_sum = 0.0, add_sum = 0.0, adds_sum = 0.0;
  int frames_total = 0;
  for (const ObjectAccuracy& oa : acc.objects) {
    ReportRow row;
    row.object = oa.name;
    row.symmetric = oa.symmetric;
    row.n_frames = oa.n_frames;
    row.accuracy_percent = 100.0 * oa.fraction;
    row.mean_add = oa.mean_add;
    row.mean_adds = oa.mean_adds;
    report.rows.push_back(row);
    acc_sum += row.accuracy_percent;
    add_sum += row.mean_add;
    adds_sum += row.mean_adds;
    frames_total += row.n_frames;
  }
  const double n = static_cast<double>(report.rows.size());
  report.mean.object = "MEAN";
  report.mean.symmetric = false;
  report.mean.n_frames = frames_total;
  report.mean.accuracy_percent = acc_sum / n;
  report.mean.mean_add = add_sum / n;
  report.mean.mean_adds = adds_sum / n;

  if (!frame_seconds.empty()) {
    double sum = 0.0;
    for (double s : frame_seconds) sum += s;
    report.mean_frame_seconds = sum / frame_seconds.size();
    std::vector<double> sorted = frame_seconds;
    std::sort(sorted.begin(), sorted.end());
    const size_t m = sorted.size();
    report.median_frame_seconds =
        m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    report.mean.mean_seconds = *report.mean_frame_seconds;
    for (ReportRow& row : report.rows) row.mean_seconds = *report.mean_frame_seconds;
  }
  return report;
}

std::string report_to_csv(const Report& report) {
  std::string out = "object,symmetric,n_frames,accuracy_percent,mean_add,mean_adds,mean_seconds\n";
  auto emit = [&out](const ReportRow& row) {
    out += row.object;
    out += row.symmetric ? ",true," : ",false,";
    out += std::to_string(row.n_frames);
    out += "," + fmt_full(row.accuracy_percent);
    out += "," + fmt_full(row.mean_add);
    out += "," + fmt_full(row.mean_adds);
    out += ",";
    if (row.mean_seconds) out += fmt_full(*row.mean_seconds);
    out += "\n";
  };
  for (const ReportRow& row : report.rows) emit(row);
  emit(report.mean);
  return out;
}

namespace {

json row_to_json(const ReportRow& row) {
  json j{{"object", row.object},
         {"symmetric", row.symmetric},
         {"n_frames", row.n_frames},
         {"accuracy_percent", row.accuracy_percent},
         {"mean_add", row.mean_add},
         {"mean_adds", row.mean_adds}};
  if (row.mean_seconds) j["mean_seconds"] = *row.mean_seconds;
  return j;
}

ReportRow row_from_json(const json& j) {
  ReportRow row;
  row.object = j.at("object").get<std::string>();
  row.symmetric = j.at("symmetric").get<bool>();
  row.n_frames = j.at("n_frames").get<int>();
  row.accuracy_percent = j.at("accuracy_percent").get<double>();
  row.mean_add = j.at("mean_add").get<double>();
  row.mean_adds = j.at("mean_adds").get<double>();
  if (j.contains("mean_seconds")) row.mean_seconds = j.at("mean_seconds").get<double>();
  return row;
}

}  // namespace

std::string report_to_json(const Report& report) {
  json j;
  j["objects"] = json::array();
  for (const ReportRow& row : report.rows) j["objects"].push_back(row_to_json(row));
  j["mean"] = row_to_json(report.mean);
  if (report.mean_frame_seconds) {
    j["timing"] = {{"mean_frame_seconds", *report.mean_frame_seconds},
                   {"median_frame_seconds", *report.median_frame_seconds}};
  }
  return j.dump(2);
}

Report report_from_json(const std::string& text) {
  const json j = json::parse(text);
  Report report;
  for (const json& row : j.at("objects")) report.rows.push_back(row_from_json(row));
  report.mean = row_from_json(j.at("mean"));
  if (j.contains("timing")) {
    report.mean_frame_seconds = j["timing"].at("mean_frame_seconds").get<double>();
    report.median_frame_seconds = j["timing"].at("median_frame_seconds").get<double>();
  }
  return report;
}

}  // namespace sixd
