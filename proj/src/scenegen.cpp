#include "sixd/scenegen.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include "sixd/ioutil.hpp"
#include "sixd/kdtree.hpp"

namespace sixd {

namespace fs = std::filesystem;
using nlohmann::json;

void Frame::validate(const std::vector<int>& registered_ids) const {
  const std::set<int> ids(registered_ids.begin(), registered_ids.end());
  std::set<int> seen;
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      const int id = mask.at(u, v);
      if (id == 0) continue;
      if (!ids.count(id))
        throw std::runtime_error("frame " + std::to_string(frame_id) +
                                 ": unregistered mask id " + std::to_string(id));
      if (!(depth.at(u, v) > 0.0))
        throw std::runtime_error("frame " + std::to_string(frame_id) +
                                 ": masked pixel without depth");
      seen.insert(id);
    }
  }
  for (int id : seen)
    if (!gt_poses.count(id))
      throw std::runtime_error("frame " + std::to_string(frame_id) +
                               ": masked object without gt pose: " + std::to_string(id));
}

double sampling_gap(const PointCloud& points) {
  double worst = 0.0;
  for (size_t j = 0; j < points.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < points.size(); ++k) {
      if (k == j) continue;
      best = std::min(best, (points[j] - points[k]).squaredNorm());
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

namespace {

Vec3 height_band_albedo(double t, double hue_shift) {
  // smooth banded palette along the object axis
  const double a = 6.2831853 * (t + hue_shift);
  return {0.55 + 0.4 * std::sin(a), 0.55 + 0.4 * std::sin(a + 2.094),
          0.55 + 0.4 * std::sin(a + 4.189)};
}

void finalize_model(SceneModel& sm, int object_id, const std::string& name,
                    const std::string& fallback) {
  sm.model.object_id = object_id;
  sm.model.name = name.empty() ? fallback : name;
  sm.model.diameter = model_diameter(sm.model.points);
  sm.model.validate();
}

SceneModel make_cylinder(Rng& rng, int n_points) {
  const double radius = rng.uniform(0.035, 0.05);
  const double height = rng.uniform(0.10, 0.14);
  const double hue = rng.uniform();

  const int ka = kCylinderAngularSamples;
  const int rings_total = std::max(4, (n_points + ka - 1) / ka);
  const double side_area = 2.0 * M_PI * radius * height;
  const double cap_area = 2.0 * M_PI * radius * radius;
  int cap_rings = std::max(1, static_cast<int>(std::lround(
                                  rings_total * 0.5 * cap_area / (side_area + cap_area))));
  int side_rings = rings_total - 2 * cap_rings;
  if (side_rings < 2) {
    side_rings = 2;
    cap_rings = std::max(1, (rings_total - side_rings) / 2);
  }

  SceneModel sm;
  auto add_ring = [&](double ring_radius, double z, double phase, double band_t) {
    for (int i = 0; i < ka; ++i) {
      const double a = phase + 2.0 * M_PI * i / ka;
      sm.model.points.emplace_back(ring_radius * std::cos(a), ring_radius * std::sin(a), z);
      sm.albedo.push_back(height_band_albedo(band_t, hue));
    }
  };
  for (int i = 0; i < side_rings; ++i) {
    const double t = (i + 0.5) / side_rings;
    add_ring(radius, -height / 2 + height * t, (i % 2) * M_PI / ka, t);
  }
  for (int i = 0; i < cap_rings; ++i) {
    const double rr = radius * (i + 0.5) / cap_rings;
    add_ring(rr, height / 2, 0.0, 1.0);
    add_ring(rr, -height / 2, 0.0, 0.0);
  }

  sm.model.symmetric = true;
  sm.model.symmetry = SymmetryDescriptor{Vec3::UnitZ(), SymmetryKind::Continuous, 0};
  return sm;
}

SceneModel make_box(Rng& rng, int n_points) {
  const double a = rng.uniform(0.05, 0.07);   // square cross-section
  const double h = rng.uniform(0.09, 0.13);
  const double hue = rng.uniform();

  // grid sizes: 4 sides of g x gz plus 2 caps of g x g
  const int g = std::max(4, static_cast<int>(std::lround(
                                std::sqrt(n_points / (4.0 * h / a + 2.0)))));
  const int gz = std::max(4, static_cast<int>(std::lround(g * h / a)));

  SceneModel sm;
  auto push = [&](double x, double y, double z) {
    sm.model.points.emplace_back(x, y, z);
    sm.albedo.push_back(height_band_albedo(z / h + 0.5, hue));
  };
  // side faces share one grid so a 90deg turn about z maps samples to samples
  for (int i = 0; i < g; ++i) {
    const double s = -a / 2 + a * (i + 0.5) / g;
    for (int j = 0; j < gz; ++j) {
      const double z = -h / 2 + h * (j + 0.5) / gz;
      push(s, -a / 2, z);
      push(s, a / 2, z);
      push(-a / 2, s, z);
      push(a / 2, s, z);
    }
  }
  for (int i = 0; i < g; ++i) {
    const double x = -a / 2 + a * (i + 0.5) / g;
    for (int j = 0; j < g; ++j) {
      const double y = -a / 2 + a * (j + 0.5) / g;
      push(x, y, h / 2);
      push(x, y, -h / 2);
    }
  }

  sm.model.symmetric = true;
  sm.model.symmetry = SymmetryDescriptor{Vec3::UnitZ(), SymmetryKind::Discrete, 4};
  return sm;
}

PointCloud blob_points(Rng& rng, int n_points, double r0) {
  // Fibonacci sphere directions
  std::vector<Vec3> dirs(n_points);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n_points; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n_points;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    dirs[i] = {r * std::cos(phi), r * std::sin(phi), z};
  }
  // low-order polynomial radius field, normalized to a fixed amplitude
  std::vector<double> coeff(10);
  for (double& c : coeff) c = rng.uniform(-1.0, 1.0);
  auto field = [&](const Vec3& d) {
    const double x = d.x(), y = d.y(), z = d.z();
    return coeff[0] * x + coeff[1] * y + coeff[2] * z + coeff[3] * x * y +
           coeff[4] * y * z + coeff[5] * z * x + coeff[6] * (x * x - y * y) +
           coeff[7] * (3 * z * z - 1) + coeff[8] * x * y * z +
           coeff[9] * x * (x * x - 3 * y * y);
  };
  double peak = 0.0;
  for (const Vec3& d : dirs) peak = std::max(peak, std::abs(field(d)));
  const double amplitude = 0.35;
  PointCloud pts(n_points);
  for (int i = 0; i < n_points; ++i)
    pts[i] = dirs[i] * r0 * (1.0 + amplitude * field(dirs[i]) / peak);
  return pts;
}

}  // namespace

SceneModel make_symmetric_model(std::uint64_t seed, SymmetricShape kind, int n_points,
                                int object_id, const std::string& name) {
  if (n_points < 64)
    throw std::invalid_argument("make_symmetric_model: need at least 64 points");
  Rng rng(seed_mix(seed, 0x5c31));
  SceneModel sm = kind == SymmetricShape::Cylinder ? make_cylinder(rng, n_points)
                                                   : make_box(rng, n_points);
  finalize_model(sm, object_id, name,
                 kind == SymmetricShape::Cylinder ? "cylinder" : "box");
  return sm;
}

SceneModel make_asymmetric_model(std::uint64_t seed, int n_points, int object_id,
                                 const std::string& name) {
  if (n_points < 64)
    throw std::invalid_argument("make_asymmetric_model: need at least 64 points");
  for (int attempt = 0; attempt < 10; ++attempt) {
    Rng rng(seed_mix(seed, 0xB10B, attempt));
    const double r0 = rng.uniform(0.055, 0.075);
    SceneModel sm;
    sm.model.points = blob_points(rng, n_points, r0);
    sm.albedo.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
      const Vec3 d = sm.model.points[i].normalized();
      sm.albedo[i] = Vec3(0.5, 0.5, 0.5) + 0.45 * d;
    }
    sm.model.symmetric = false;

    // reject draws that look symmetric on a rotation grid
    ObjectModel probe = sm.model;
    probe.object_id = 1;
    probe.name = "probe";
    probe.diameter = model_diameter(probe.points);
    const double gap = sampling_gap(probe.points);
    const std::vector<Vec3> axes = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(),
                                    Vec3(1, 1, 1).normalized(), Vec3(1, -1, 0).normalized()};
    double min_adds = std::numeric_limits<double>::infinity();
    for (const Vec3& axis : axes) {
      for (int step = 1; step <= 4; ++step) {
        Pose rot;
        rot.rotation = axis_angle(axis, step * M_PI / 4.0);  // 45..180 deg
        min_adds = std::min(min_adds, adds_metric(Pose::identity(), rot, probe));
      }
    }
    if (min_adds > 5.0 * gap) {
      finalize_model(sm, object_id, name, "blob");
      return sm;
    }
  }
  throw std::runtime_error("make_asymmetric_model: asymmetry check failed 10 times");
}

Frame render(const std::vector<const SceneModel*>& models, const std::vector<Pose>& poses,
             const CameraIntrinsics& k, const RenderSettings& settings) {
  if (models.size() != poses.size())
    throw std::invalid_argument("render: models/poses size mismatch");
  Frame frame;
  frame.intrinsics = k;
  frame.color = ColorImage(k.width, k.height);
  frame.depth = DepthMap(k.width, k.height);
  frame.mask = MaskImage(k.width, k.height);

  Grid<double> zbuf(k.width, k.height, std::numeric_limits<double>::infinity());
  std::vector<Vec3> albedo_buf(static_cast<size_t>(k.width) * k.height, Vec3::Zero());

  const double r = settings.splat_radius;
  for (size_t m = 0; m < models.size(); ++m) {
    const SceneModel& sm = *models[m];
    const Mat3 rot = poses[m].rotation_matrix();
    bool any_in_frustum = false;
    for (size_t j = 0; j < sm.model.points.size(); ++j) {
      const Vec3 q = rot * sm.model.points[j] + poses[m].translation;
      if (!(q.z() > 1e-6)) continue;
      const Vec2 uv = project(q, k);
      const int u_lo = static_cast<int>(std::ceil(uv.x() - r));
      const int u_hi = static_cast<int>(std::floor(uv.x() + r));
      const int v_lo = static_cast<int>(std::ceil(uv.y() - r));
      const int v_hi = static_cast<int>(std::floor(uv.y() + r));
      for (int pv = v_lo; pv <= v_hi; ++pv) {
        if (pv < 0 || pv >= k.height) continue;
        for (int pu = u_lo; pu <= u_hi; ++pu) {
          if (pu < 0 || pu >= k.width) continue;
          const double du = pu - uv.x(), dv = pv - uv.y();
          if (du * du + dv * dv > r * r) continue;
          any_in_frustum = true;
          if (q.z() < zbuf.at(pu, pv)) {
            zbuf.at(pu, pv) = q.z();
            frame.mask.at(pu, pv) = static_cast<std::uint8_t>(sm.model.object_id);
            albedo_buf[frame.mask.width * static_cast<size_t>(pv) + pu] = sm.albedo[j];
          }
        }
      }
    }
    if (!any_in_frustum)
      std::cerr << "warning: object " << sm.model.object_id
                << " fully outside frustum; omitted from mask\n";
    frame.gt_poses[sm.model.object_id] = poses[m];
  }

  Rng noise(settings.noise_seed);
  const Vec3 bg(settings.background.r / 255.0, settings.background.g / 255.0,
                settings.background.b / 255.0);
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      Vec3 c = frame.mask.at(u, v)
                   ? albedo_buf[static_cast<size_t>(v) * k.width + u] * settings.lighting_gain
                   : bg;
      if (settings.noise_sigma > 0.0)
        for (int ch = 0; ch < 3; ++ch) c[ch] += settings.noise_sigma * noise.gaussian();
      frame.color.at(u, v) = {
          static_cast<std::uint8_t>(std::lround(std::clamp(c.x(), 0.0, 1.0) * 255)),
          static_cast<std::uint8_t>(std::lround(std::clamp(c.y(), 0.0, 1.0) * 255)),
          static_cast<std::uint8_t>(std::lround(std::clamp(c.z(), 0.0, 1.0) * 255))};
      if (frame.mask.at(u, v))
        frame.depth.at(u, v) = std::round(zbuf.at(u, v) * 1000.0) / 1000.0;  // mm grid
    }
  }
  return frame;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json pose_to_json(const Pose& p) {
  const Mat3 r = p.rotation_matrix();
  json jr = json::array();
  for (int i = 0; i < 3; ++i) jr.push_back({r(i, 0), r(i, 1), r(i, 2)});
  return {{"rotation", jr},
          {"translation", {p.translation.x(), p.translation.y(), p.translation.z()}}};
}

Pose pose_from_json(const json& j) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) r(i, c) = j.at("rotation").at(i).at(c).get<double>();
  Pose p;
  p.rotation = UnitQuaternion::from_matrix(r);
  const auto& t = j.at("translation");
  p.translation = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
  return p;
}

json intrinsics_to_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx},
          {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from_json(const json& j) {
  return {j.at("fx").get<double>(),  j.at("fy").get<double>(),
          j.at("cx").get<double>(),  j.at("cy").get<double>(),
          j.at("width").get<int>(),  j.at("height").get<int>()};
}

std::string frame_dir_name(int frame_id) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", frame_id);
  return buf;
}

json symmetry_to_json(const SymmetryDescriptor& s) {
  json j{{"axis", {s.axis.x(), s.axis.y(), s.axis.z()}}};
  if (s.kind == SymmetryKind::Continuous) {
    j["kind"] = "continuous";
  } else {
    j["kind"] = "discrete";
    j["order"] = s.order;
  }
  return j;
}

SymmetryDescriptor symmetry_from_json(const json& j) {
  SymmetryDescriptor s;
  const auto& a = j.at("axis");
  s.axis = Vec3(a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>());
  if (j.at("kind") == "continuous") {
    s.kind = SymmetryKind::Continuous;
  } else {
    s.kind = SymmetryKind::Discrete;
    s.order = j.at("order").get<int>();
  }
  return s;
}

json dataset_config_to_json(const DatasetConfig& c) {
  json objs = json::array();
  for (const ObjectSpec& o : c.objects)
    objs.push_back({{"kind", o.kind}, {"seed", o.seed}, {"n_points", o.n_points}});
  return {{"seed", c.seed},
          {"width", c.width},
          {"height", c.height},
          {"fx", c.fx},
          {"fy", c.fy},
          {"cx", c.cx},
          {"cy", c.cy},
          {"n_train", c.n_train},
          {"n_test", c.n_test},
          {"clutter", c.clutter},
          {"objects", objs},
          {"light_lo", c.light_lo},
          {"light_hi", c.light_hi},
          {"noise_sigma", c.noise_sigma},
          {"bounds_lo", {c.bounds.lo.x(), c.bounds.lo.y(), c.bounds.lo.z()}},
          {"bounds_hi", {c.bounds.hi.x(), c.bounds.hi.y(), c.bounds.hi.z()}}};
}

}  // namespace

void save_model_points(const std::string& path, const SceneModel& m) {
  std::ostringstream out;
  for (size_t i = 0; i < m.model.points.size(); ++i) {
    const Vec3& p = m.model.points[i];
    const Vec3& a = m.albedo[i];
    out << fmt17(p.x()) << ' ' << fmt17(p.y()) << ' ' << fmt17(p.z()) << ' '
        << fmt17(a.x()) << ' ' << fmt17(a.y()) << ' ' << fmt17(a.z()) << '\n';
  }
  write_text_file(path, out.str());
}

void load_model_points(const std::string& path, SceneModel& m) {
  std::istringstream in(read_text_file(path));
  m.model.points.clear();
  m.albedo.clear();
  double x, y, z, r, g, b;
  while (in >> x >> y >> z >> r >> g >> b) {
    m.model.points.emplace_back(x, y, z);
    m.albedo.emplace_back(r, g, b);
  }
  if (m.model.points.empty())
    throw std::runtime_error("empty model point file: " + path);
}

const FrameRecord& DatasetManifest::frame(int id) const {
  auto it = frames.find(id);
  if (it == frames.end())
    throw std::invalid_argument("unknown frame id " + std::to_string(id));
  return it->second;
}

DatasetManifest generate_dataset(const DatasetConfig& config) {
  if (config.objects.empty())
    throw std::invalid_argument("generate_dataset: no objects configured");
  const CameraIntrinsics k = config.intrinsics();

  std::error_code ec;
  fs::create_directories(fs::path(config.out_dir) / "models", ec);
  fs::create_directories(fs::path(config.out_dir) / "frames", ec);
  if (ec) throw std::runtime_error("cannot create dataset directory: " + config.out_dir);

  // models
  std::vector<SceneModel> models;
  json jobjects = json::array();
  for (size_t i = 0; i < config.objects.size(); ++i) {
    const ObjectSpec& spec = config.objects[i];
    const int id = static_cast<int>(i) + 1;
    const std::string name = spec.kind + std::to_string(id);
    SceneModel sm;
    if (spec.kind == "cylinder")
      sm = make_symmetric_model(spec.seed, SymmetricShape::Cylinder, spec.n_points, id, name);
    else if (spec.kind == "box")
      sm = make_symmetric_model(spec.seed, SymmetricShape::Box, spec.n_points, id, name);
    else if (spec.kind == "blob")
      sm = make_asymmetric_model(spec.seed, spec.n_points, id, name);
    else
      throw std::invalid_argument("generate_dataset: unknown object kind '" + spec.kind + "'");

    const std::string rel = "models/" + name + ".xyz";
    save_model_points((fs::path(config.out_dir) / rel).string(), sm);
    json jo{{"id", id},
            {"name", name},
            {"symmetric", sm.model.symmetric},
            {"diameter", sm.model.diameter},
            {"points_file", rel}};
    if (sm.model.symmetry) jo["symmetry"] = symmetry_to_json(*sm.model.symmetry);
    jobjects.push_back(jo);
    models.push_back(std::move(sm));
  }

  const int total = config.n_train + config.n_test;
  for (int fid = 0; fid < total; ++fid) {
    Rng rng(seed_mix(config.seed, static_cast<std::uint64_t>(fid), 0xA11CE));
    const int max_count = std::min<int>(config.clutter, static_cast<int>(models.size()));
    const int count = 1 + static_cast<int>(rng.uniform_index(std::max(1, max_count)));
    std::vector<int> order(models.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    rng.shuffle(order);
    order.resize(count);
    std::sort(order.begin(), order.end());

    std::vector<const SceneModel*> chosen;
    std::vector<Pose> poses;
    for (int idx : order) {
      chosen.push_back(&models[idx]);
      poses.push_back(random_pose(rng, config.bounds, &k));
    }
    RenderSettings settings;
    settings.lighting_gain = rng.uniform(config.light_lo, config.light_hi);
    settings.noise_sigma = config.noise_sigma;
    settings.noise_seed = seed_mix(config.seed, static_cast<std::uint64_t>(fid), 0x9015E);
    Frame frame = render(chosen, poses, k, settings);
    frame.frame_id = fid;

    const fs::path dir = fs::path(config.out_dir) / "frames" / frame_dir_name(fid);
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create frame directory: " + dir.string());
    write_ppm((dir / "color.ppm").string(), frame.color);
    DepthImage16 depth_mm(frame.depth.width, frame.depth.height);
    for (size_t i = 0; i < frame.depth.data.size(); ++i) {
      const double mm = std::round(frame.depth.data[i] * 1000.0);
      depth_mm.data[i] = static_cast<std::uint16_t>(std::clamp(mm, 0.0, 65535.0));
    }
    write_pgm16((dir / "depth.pgm").string(), depth_mm);
    write_pgm8((dir / "mask.pgm").string(), frame.mask);

    json jposes = json::array();
    for (const auto& [oid, pose] : frame.gt_poses) {
      json jp = pose_to_json(pose);
      jp["object_id"] = oid;
      jposes.push_back(jp);
    }
    write_text_file((dir / "poses.json").string(),
                    json{{"frame_id", fid}, {"objects", jposes}}.dump(2));
  }

  json manifest{{"format", "sixd-dataset-v1"},
                {"seed", config.seed},
                {"config_hash", fnv1a64_hex(dataset_config_to_json(config).dump())},
                {"intrinsics", intrinsics_to_json(k)},
                {"objects", jobjects}};
  json train = json::array(), test = json::array();
  for (int fid = 0; fid < config.n_train; ++fid) train.push_back(fid);
  for (int fid = config.n_train; fid < total; ++fid) test.push_back(fid);
  manifest["train"] = train;
  manifest["test"] = test;
  write_text_file((fs::path(config.out_dir) / "manifest.json").string(), manifest.dump(2));

  return load_manifest(config.out_dir);
}

DatasetManifest load_manifest(const std::string& dir) {
  const fs::path root(dir);
  const std::string manifest_path = (root / "manifest.json").string();
  const json j = json::parse(read_text_file(manifest_path));

  DatasetManifest m;
  m.root = dir;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config_hash = j.value("config_hash", "");
  m.intrinsics = intrinsics_from_json(j.at("intrinsics"));
  for (const json& jo : j.at("objects")) {
    ManifestObject o;
    o.id = jo.at("id").get<int>();
    o.name = jo.at("name").get<std::string>();
    o.symmetric = jo.at("symmetric").get<bool>();
    o.diameter = jo.at("diameter").get<double>();
    o.points_file = jo.at("points_file").get<std::string>();
    if (jo.contains("symmetry")) o.symmetry = symmetry_from_json(jo["symmetry"]);
    if (!fs::exists(root / o.points_file))
      throw std::runtime_error("manifest references missing file: " +
                               (root / o.points_file).string());
    m.objects.push_back(std::move(o));
  }
  for (const json& v : j.at("train")) m.train_ids.push_back(v.get<int>());
  for (const json& v : j.at("test")) m.test_ids.push_back(v.get<int>());

  auto load_record = [&](int fid) {
    const fs::path dir_ = root / "frames" / frame_dir_name(fid);
    FrameRecord rec;
    rec.frame_id = fid;
    rec.color_path = (dir_ / "color.ppm").string();
    rec.depth_path = (dir_ / "depth.pgm").string();
    rec.mask_path = (dir_ / "mask.pgm").string();
    for (const char* p : {"color.ppm", "depth.pgm", "mask.pgm", "poses.json"})
      if (!fs::exists(dir_ / p))
        throw std::runtime_error("manifest references missing file: " + (dir_ / p).string());
    const json jp = json::parse(read_text_file((dir_ / "poses.json").string()));
    for (const json& jo : jp.at("objects"))
      rec.poses[jo.at("object_id").get<int>()] = pose_from_json(jo);
    m.frames.emplace(fid, std::move(rec));
  };
  for (int fid : m.train_ids) load_record(fid);
  for (int fid : m.test_ids) load_record(fid);
  return m;
}

std::map<int, SceneModel> load_scene_models(const DatasetManifest& manifest) {
  std::map<int, SceneModel> out;
  for (const ManifestObject& o : manifest.objects) {
    SceneModel sm;
    load_model_points((fs::path(manifest.root) / o.points_file).string(), sm);
    sm.model.object_id = o.id;
    sm.model.name = o.name;
    sm.model.symmetric = o.symmetric;
    sm.model.symmetry = o.symmetry;
    sm.model.diameter = model_diameter(sm.model.points);
    if (o.diameter > 0.0 && std::abs(sm.model.diameter - o.diameter) > 1e-9)
      throw std::runtime_error("model diameter mismatch for object " + o.name);
    sm.model.validate();
    out.emplace(o.id, std::move(sm));
  }
  return out;
}

ModelRegistry load_models(const DatasetManifest& manifest) {
  ModelRegistry out;
  for (auto& [id, sm] : load_scene_models(manifest)) out.emplace(id, std::move(sm.model));
  return out;
}

namespace {

MaskImage splat_mask(const std::map<int, Pose>& poses,
                     const std::map<int, SceneModel>& models, const CameraIntrinsics& k) {
  MaskImage mask(k.width, k.height);
  Grid<double> zbuf(k.width, k.height, std::numeric_limits<double>::infinity());
  for (const auto& [oid, pose] : poses) {
    auto it = models.find(oid);
    if (it == models.end()) continue;
    const Mat3 rot = pose.rotation_matrix();
    for (const Vec3& x : it->second.model.points) {
      const Vec3 q = rot * x + pose.translation;
      if (!(q.z() > 1e-6)) continue;
      const Vec2 uv = project(q, k);
      for (int pv = static_cast<int>(std::ceil(uv.y() - 1)); pv <= std::floor(uv.y() + 1);
           ++pv) {
        if (pv < 0 || pv >= k.height) continue;
        for (int pu = static_cast<int>(std::ceil(uv.x() - 1)); pu <= std::floor(uv.x() + 1);
             ++pu) {
          if (pu < 0 || pu >= k.width) continue;
          const double du = pu - uv.x(), dv = pv - uv.y();
          if (du * du + dv * dv > 1.0) continue;
          if (q.z() < zbuf.at(pu, pv)) {
            zbuf.at(pu, pv) = q.z();
            mask.at(pu, pv) = static_cast<std::uint8_t>(oid);
          }
        }
      }
    }
  }
  return mask;
}

}  // namespace

Frame load_frame(const DatasetManifest& manifest, int frame_id) {
  const FrameRecord& rec = manifest.frame(frame_id);
  Frame frame;
  frame.frame_id = frame_id;
  frame.intrinsics = manifest.intrinsics;
  frame.gt_poses = rec.poses;
  frame.color = read_ppm(rec.color_path);
  const DepthImage16 depth_mm = read_pgm16(rec.depth_path);
  frame.depth = DepthMap(depth_mm.width, depth_mm.height);
  for (size_t i = 0; i < depth_mm.data.size(); ++i)
    frame.depth.data[i] = depth_mm.data[i] / 1000.0;
  if (!rec.mask_path.empty()) {
    frame.mask = read_pgm8(rec.mask_path);
  } else {
    // LineMOD-style trees carry no masks; synthesize one from the gt pose.
    frame.mask = splat_mask(rec.poses, load_scene_models(manifest), manifest.intrinsics);
    for (int i = 0; i < frame.mask.width * frame.mask.height; ++i)
      if (frame.mask.data[i] && !(frame.depth.data[i] > 0.0)) frame.mask.data[i] = 0;
  }
  return frame;
}

const std::vector<std::string>& linemod_object_names() {
  static const std::vector<std::string> names = {
      "ape",  "benchvise", "camera", "can",  "cat",  "driller",    "duck",
      "eggbox", "glue",    "holepuncher", "iron", "lamp", "phone"};
  return names;
}

DatasetManifest load_linemod_layout(const std::string& root) {
  const fs::path base(root);
  auto require = [](const fs::path& p) {
    if (!fs::exists(p))
      throw std::runtime_error("linemod layout: missing " + p.string());
  };
  require(base);
  require(base / "intrinsics.json");

  DatasetManifest m;
  m.root = root;
  m.seed = 0;
  m.intrinsics =
      intrinsics_from_json(json::parse(read_text_file((base / "intrinsics.json").string())));

  const auto& names = linemod_object_names();
  for (size_t i = 0; i < names.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    const std::string& name = names[i];
    const fs::path dir = base / name;
    require(dir);
    require(dir / "points.xyz");
    require(dir / "gt.json");
    require(dir / "split.json");

    SceneModel sm;
    load_model_points((dir / "points.xyz").string(), sm);

    ManifestObject o;
    o.id = id;
    o.name = name;
    o.symmetric = (name == "eggbox" || name == "glue");
    if (o.symmetric) o.symmetry = SymmetryDescriptor{Vec3::UnitZ(), SymmetryKind::Discrete, 2};
    o.diameter = model_diameter(sm.model.points);
    o.points_file = name + "/points.xyz";
    m.objects.push_back(o);

    std::map<int, Pose> gt;
    for (const json& jf :
         json::parse(read_text_file((dir / "gt.json").string())).at("frames"))
      gt[jf.at("frame").get<int>()] = pose_from_json(jf);

    const json split = json::parse(read_text_file((dir / "split.json").string()));
    auto add_frames = [&](const json& list, std::vector<int>& ids) {
      for (const json& v : list) {
        const int local = v.get<int>();
        const fs::path rgb = dir / "rgb" / (frame_dir_name(local) + std::string(".ppm"));
        const fs::path depth = dir / "depth" / (frame_dir_name(local) + std::string(".pgm"));
        require(rgb);
        require(depth);
        auto it = gt.find(local);
        if (it == gt.end())
          throw std::runtime_error("linemod layout: missing gt for frame " +
                                   std::to_string(local) + " in " + (dir / "gt.json").string());
        FrameRecord rec;
        rec.frame_id = id * 1000000 + local;
        rec.color_path = rgb.string();
        rec.depth_path = depth.string();
        rec.poses[id] = it->second;
        ids.push_back(rec.frame_id);
        m.frames.emplace(rec.frame_id, std::move(rec));
      }
    };
    add_frames(split.at("train"), m.train_ids);
    add_frames(split.at("test"), m.test_ids);
  }
  return m;
}

}  // namespace sixd
