#include "ridgeguard/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <string>

#include "ridgeguard/error.hpp"
#include "ridgeguard/rng.hpp"

namespace ridgeguard {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
// Angle between a bifurcation's connector and the ridge it leaves.
constexpr double kConnectorAngle = 35.0 * kDeg;

PointF operator+(PointF a, PointF b) { return {a.x + b.x, a.y + b.y}; }
PointF operator-(PointF a, PointF b) { return {a.x - b.x, a.y - b.y}; }
PointF operator*(double k, PointF a) { return {k * a.x, k * a.y}; }
double dot(PointF a, PointF b) { return a.x * b.x + a.y * b.y; }
double cross(PointF a, PointF b) { return a.x * b.y - a.y * b.x; }
double norm(PointF a) { return std::hypot(a.x, a.y); }
PointF rotate(PointF a, double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}
double angle_deg(PointF d) { return normalize_degrees(std::atan2(d.y, d.x) / kDeg); }

struct Segment {
  PointF a, b;
};

double point_segment_distance(PointF p, const Segment& s) {
  const PointF ab = s.b - s.a;
  const double len2 = dot(ab, ab);
  const double u = len2 == 0.0 ? 0.0 : std::clamp(dot(p - s.a, ab) / len2, 0.0, 1.0);
  return norm(p - (s.a + u * ab));
}

double segment_distance(const Segment& s1, const Segment& s2) {
  const PointF d1 = s1.b - s1.a, d2 = s2.b - s2.a;
  const double c1 = cross(d1, s2.a - s1.a), c2 = cross(d1, s2.b - s1.a);
  const double c3 = cross(d2, s1.a - s2.a), c4 = cross(d2, s1.b - s2.a);
  if (((c1 < 0) != (c2 < 0)) && ((c3 < 0) != (c4 < 0))) return 0.0;
  return std::min({point_segment_distance(s1.a, s2), point_segment_distance(s1.b, s2),
                   point_segment_distance(s2.a, s1), point_segment_distance(s2.b, s1)});
}

struct Wave {
  double amp, kx, ky, phase;
};

// Ridges are the level lines value(q) = k * period.
class PhaseField {
 public:
  double period = 9.0;
  PointF normal{1.0, 0.0};
  double offset = 0.0;
  std::vector<Wave> waves;

  double value(PointF q) const {
    double v = dot(q, normal) + offset;
    for (const auto& w : waves) v += w.amp * std::sin(w.kx * q.x + w.ky * q.y + w.phase);
    return v;
  }
  PointF gradient(PointF q) const {
    PointF g = normal;
    for (const auto& w : waves) {
      const double c = w.amp * std::cos(w.kx * q.x + w.ky * q.y + w.phase);
      g.x += c * w.kx;
      g.y += c * w.ky;
    }
    return g;
  }
  long ridge_index(PointF q) const { return std::lround(value(q) / period); }
  PointF tangent(PointF q) const {
    const PointF g = gradient(q);
    const double n = norm(g);
    return {-g.y / n, g.x / n};
  }
  // Newton steps onto the nearest level line.
  PointF snap(PointF q) const {
    for (int it = 0; it < 6; ++it) {
      const PointF g = gradient(q);
      const double excess = value(q) - static_cast<double>(ridge_index(q)) * period;
      q = q - (excess / dot(g, g)) * g;
    }
    return q;
  }
};

struct Planted {
  MinutiaKind kind = MinutiaKind::ending;
  PointF cut;  // ridge `ridge` stops here
  long ridge = 0;
  PointF dir;  // unit, pointing into the gap
  double gap_length = 0.0;
  PointF junction;  // bifurcations only
  PointF position;
  double theta = 0.0;

  std::vector<Segment> segments() const {
    std::vector<Segment> out{{cut, cut + gap_length * dir}};
    if (kind == MinutiaKind::bifurcation) out.push_back({cut, junction});
    return out;
  }
};

struct Model {
  PhaseField field;
  PointF center;
  double radius = 0.0;        // finger area
  double place_radius = 0.0;  // minutiae stay inside this
  std::vector<Planted> planted;
};

PointF random_in_disc(CounterStream& rng, PointF center, double radius) {
  const double r = radius * std::sqrt(rng.uniform());
  const double a = rng.uniform(0.0, 2.0 * kPi);
  return center + PointF{r * std::cos(a), r * std::sin(a)};
}

Model build_model(const SynthSpec& spec) {
  CounterStream rng(derive_seed(spec.seed, 0));
  Model model;
  model.center = {(spec.width - 1) / 2.0, (spec.height - 1) / 2.0};
  model.radius = 0.4 * std::min(spec.width, spec.height);
  const double p = spec.ridge_period;
  model.place_radius = model.radius - 2.5 * p;

  auto& field = model.field;
  field.period = p;
  const double base = rng.uniform(0.0, kPi);
  field.normal = {std::cos(base), std::sin(base)};
  field.offset = rng.uniform(0.0, p);
  if (spec.orientation_field == OrientationField::smooth_random) {
    for (int k = 0; k < 3; ++k) {
      const double wavelength = rng.uniform(140.0, 280.0);
      const double dir = rng.uniform(0.0, 2.0 * kPi);
      const double kmag = 2.0 * kPi / wavelength;
      // Gradient perturbation amp * |k| stays below 0.12 per wave.
      const double amp = rng.uniform(0.05, 0.12) / kmag;
      field.waves.push_back({amp, kmag * std::cos(dir), kmag * std::sin(dir),
                             rng.uniform(0.0, 2.0 * kPi)});
    }
  }

  if (model.place_radius <= 0.0 && spec.n_minutiae > 0) {
    throw ValidationError("image too small for the ridge period");
  }
  const double min_spacing = 1.5 * p;
  const double disc_area = kPi * model.place_radius * model.place_radius;
  if (spec.n_minutiae * kPi * 0.25 * min_spacing * min_spacing > 0.5 * disc_area) {
    throw ValidationError("minutiae count infeasible for image size");
  }

  const int max_attempts = 400 * std::max(spec.n_minutiae, 1);
  int attempts = 0;
  while (static_cast<int>(model.planted.size()) < spec.n_minutiae) {
    if (++attempts > max_attempts) throw ValidationError("minutiae count infeasible for image size");

    Planted cand;
    cand.cut = field.snap(random_in_disc(rng, model.center, model.place_radius));
    cand.ridge = field.ridge_index(cand.cut);
    cand.dir = field.tangent(cand.cut);
    if (rng.bernoulli(0.5)) cand.dir = -1.0 * cand.dir;
    cand.gap_length = rng.uniform(1.5 * p, 3.0 * p);
    const bool bifurcation = rng.bernoulli(spec.bifurcation_fraction);
    const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;

    if (!bifurcation) {
      cand.kind = MinutiaKind::ending;
      cand.position = cand.cut;
      cand.theta = angle_deg(cand.dir);
    } else {
      cand.kind = MinutiaKind::bifurcation;
      const PointF e = rotate(cand.dir, side * kConnectorAngle);
      const double slope = dot(field.gradient(cand.cut), e);
      const double target = static_cast<double>(cand.ridge + (slope > 0 ? 1 : -1)) * p;
      auto f = [&](double t) { return field.value(cand.cut + t * e) - target; };
      const double t_max = 3.0 * p / std::sin(kConnectorAngle);
      double lo = 0.0, hi = -1.0;
      for (double t = 0.25; t <= t_max; t += 0.25) {
        if ((f(t) < 0) != (f(0.0) < 0)) {
          hi = t;
          break;
        }
        lo = t;
      }
      if (hi < 0) continue;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) < 0) == (f(lo) < 0) ? lo : hi) = mid;
      }
      cand.junction = cand.cut + (0.5 * (lo + hi)) * e;
      cand.position = cand.junction;
      PointF along = field.tangent(cand.junction);
      if (dot(along, cand.dir) < 0) along = -1.0 * along;
      cand.theta = angle_deg(along);
    }

    const auto segs = cand.segments();
    bool ok = norm(cand.position - model.center) <= model.place_radius;
    for (const auto& s : segs) ok = ok && norm(s.b - model.center) <= model.radius - p;
    for (const auto& other : model.planted) {
      if (!ok) break;
      if (norm(other.position - cand.position) < min_spacing) ok = false;
      const auto other_segs = other.segments();
      for (const auto& s : other_segs) {
        if (point_segment_distance(cand.position, s) < 0.75 * p) ok = false;
        for (const auto& c : segs)
          if (segment_distance(s, c) < 0.5 * p) ok = false;
      }
      for (const auto& c : segs)
        if (point_segment_distance(other.position, c) < 0.75 * p) ok = false;
    }
    if (ok) model.planted.push_back(cand);
  }
  return model;
}

struct Box {
  int x0, y0, x1, y1;
};

Box image_box(const RigidTransform& tf, const std::vector<PointF>& points, double pad, int w, int h) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto& p : points) {
    const PointF q = tf.apply(p);
    x0 = std::min(x0, q.x);
    y0 = std::min(y0, q.y);
    x1 = std::max(x1, q.x);
    y1 = std::max(y1, q.y);
  }
  return {std::max(0, static_cast<int>(std::floor(x0 - pad))),
          std::max(0, static_cast<int>(std::floor(y0 - pad))),
          std::min(w - 1, static_cast<int>(std::ceil(x1 + pad))),
          std::min(h - 1, static_cast<int>(std::ceil(y1 + pad)))};
}

// Naive digital line test: signed distance `sd` along a unit normal whose
// image-space components are (nx, ny).
bool on_digital_line(double sd, PointF image_normal) {
  const double half = 0.5 * std::max(std::abs(image_normal.x), std::abs(image_normal.y));
  return sd >= -half && sd < half;
}

SkeletonImage render(const Model& model, const RigidTransform& tf, int width, int height) {
  SkeletonImage img(width, height);
  const auto& field = model.field;
  const double p = field.period;
  const double rot = tf.rotation_deg * kDeg;

  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const PointF q = tf.inverse({static_cast<double>(x), static_cast<double>(y)});
      if (norm(q - model.center) > model.radius) continue;
      const double phi = field.value(q);
      const PointF g = field.gradient(q);
      const double gn = norm(g);
      const double sd = (phi - std::round(phi / p) * p) / gn;
      if (on_digital_line(sd, rotate((1.0 / gn) * g, rot))) img.set(x, y, true);
    }

  for (const auto& pl : model.planted) {
    const PointF end = pl.cut + pl.gap_length * pl.dir;
    const Box box = image_box(tf, {pl.cut, end}, p, width, height);
    for (int y = box.y0; y <= box.y1; ++y)
      for (int x = box.x0; x <= box.x1; ++x) {
        const PointF q = tf.inverse({static_cast<double>(x), static_cast<double>(y)});
        if (field.ridge_index(q) != pl.ridge) continue;
        const PointF v = q - pl.cut;
        const double along = dot(v, pl.dir);
        if (along > 0.0 && along <= pl.gap_length && std::abs(cross(pl.dir, v)) <= 0.5 * p) {
          img.set(x, y, false);
        }
      }
  }

  for (const auto& pl : model.planted) {
    if (pl.kind != MinutiaKind::bifurcation) continue;
    const PointF span = pl.junction - pl.cut;
    const double len = norm(span);
    const PointF e = (1.0 / len) * span;
    const PointF nrm{-e.y, e.x};
    const PointF image_normal = rotate(nrm, rot);
    const Box box = image_box(tf, {pl.cut, pl.junction}, 2.0, width, height);
    for (int y = box.y0; y <= box.y1; ++y)
      for (int x = box.x0; x <= box.x1; ++x) {
        const PointF v = tf.inverse({static_cast<double>(x), static_cast<double>(y)}) - pl.cut;
        const double along = dot(v, e);
        if (along >= 0.0 && along <= len && on_digital_line(dot(v, nrm), image_normal)) {
          img.set(x, y, true);
        }
      }
  }
  return img;
}

Impression make_impression(const Model& model, const SynthSpec& spec, const RigidTransform& tf,
                           CounterStream& rng, std::string subject_id, std::string impression_id) {
  const auto& noise = spec.noise;
  Impression imp;
  imp.skeleton = render(model, tf, spec.width, spec.height);
  imp.minutiae.subject_id = std::move(subject_id);
  imp.minutiae.impression_id = std::move(impression_id);

  std::set<std::pair<int, int>> used;
  auto emit = [&](PointF q, double theta) {
    const int x = static_cast<int>(std::lround(q.x));
    const int y = static_cast<int>(std::lround(q.y));
    if (x < 0 || y < 0 || x >= spec.width || y >= spec.height) return;
    if (!used.emplace(x, y).second) return;
    imp.minutiae.minutiae.push_back({x, y, normalize_degrees(theta)});
  };

  // Every minutia draws the same number of variates whatever the noise
  // settings, so impressions of one seed stay aligned across specs.
  for (const auto& pl : model.planted) {
    const double u_drop = rng.uniform();
    const double jitter_angle = rng.uniform(0.0, 2.0 * kPi);
    const double jitter_radius = rng.uniform(0.0, noise.position_jitter_px);
    const double jitter_theta = rng.uniform(-noise.theta_jitter_deg, noise.theta_jitter_deg);
    if (u_drop < noise.drop_rate) continue;
    const PointF q = tf.apply(pl.position) +
                     PointF{jitter_radius * std::cos(jitter_angle), jitter_radius * std::sin(jitter_angle)};
    emit(q, pl.theta + tf.rotation_deg + jitter_theta);
  }
  for (std::size_t k = 0; k < model.planted.size(); ++k) {
    const double u_spurious = rng.uniform();
    const PointF raw = random_in_disc(rng, model.center, model.place_radius);
    const bool flip = rng.bernoulli(0.5);
    if (u_spurious >= noise.spurious_rate) continue;
    const PointF q = model.field.snap(raw);
    PointF along = model.field.tangent(q);
    if (flip) along = -1.0 * along;
    emit(tf.apply(q), angle_deg(along) + tf.rotation_deg);
  }
  return imp;
}

std::string numbered(const char* prefix, int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, value);
  return buf;
}

}  // namespace

PointF RigidTransform::apply(PointF p) const {
  const PointF r = rotate(p - PointF{cx, cy}, rotation_deg * kDeg);
  return {r.x + cx + tx, r.y + cy + ty};
}

PointF RigidTransform::inverse(PointF p) const {
  const PointF r = rotate(PointF{p.x - tx - cx, p.y - ty - cy}, -rotation_deg * kDeg);
  return {r.x + cx, r.y + cy};
}

void SynthSpec::validate() const {
  if (width < 16 || height < 16) throw ValidationError("synthetic image must be at least 16x16");
  if (!(ridge_period >= 4.0)) throw ValidationError("ridge period must be >= 4 px");
  if (n_minutiae < 0) throw ValidationError("negative minutiae count");
  if (n_impressions < 0) throw ValidationError("negative impression count");
  auto rate = [](double r, const char* what) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError(std::string(what) + " must be in [0, 1]");
  };
  rate(bifurcation_fraction, "bifurcation fraction");
  rate(noise.drop_rate, "drop rate");
  rate(noise.spurious_rate, "spurious rate");
  if (noise.rotation_deg_range < 0 || noise.translation_px_range < 0 ||
      noise.theta_jitter_deg < 0 || noise.position_jitter_px < 0) {
    throw ValidationError("noise ranges must be non-negative");
  }
}

SynthSubject generate_subject(const SynthSpec& spec) {
  spec.validate();
  const Model model = build_model(spec);

  SynthSubject subject;
  RigidTransform identity{0.0, 0.0, 0.0, model.center.x, model.center.y};
  subject.ground_truth.skeleton = render(model, identity, spec.width, spec.height);
  for (const auto& pl : model.planted) {
    subject.ground_truth.minutiae.minutiae.push_back(
        {static_cast<int>(std::lround(pl.position.x)), static_cast<int>(std::lround(pl.position.y)),
         pl.theta});
    subject.kinds.push_back(pl.kind);
    subject.planted.push_back(pl.position);
  }
  subject.ground_truth.minutiae.impression_id = "truth";

  for (int k = 0; k < spec.n_impressions; ++k) {
    CounterStream rng(derive_seed(spec.seed, 0x1000 + static_cast<std::uint64_t>(k)));
    RigidTransform tf;
    tf.rotation_deg = rng.uniform(-spec.noise.rotation_deg_range, spec.noise.rotation_deg_range);
    tf.tx = rng.uniform(-spec.noise.translation_px_range, spec.noise.translation_px_range);
    tf.ty = rng.uniform(-spec.noise.translation_px_range, spec.noise.translation_px_range);
    tf.cx = model.center.x;
    tf.cy = model.center.y;
    subject.transforms.push_back(tf);
    subject.impressions.push_back(make_impression(model, spec, tf, rng, {}, std::to_string(k + 1)));
  }
  return subject;
}

Impression render_impression(const SynthSpec& spec, double rotation_deg, double tx, double ty,
                             std::uint64_t stream) {
  spec.validate();
  const Model model = build_model(spec);
  const RigidTransform tf{rotation_deg, tx, ty, model.center.x, model.center.y};
  CounterStream rng(derive_seed(spec.seed, 0x2000 + stream));
  return make_impression(model, spec, tf, rng, {}, "r" + std::to_string(stream));
}

Dataset generate_population(std::uint64_t base_seed, int n_subjects, int impressions_per_subject,
                            const SynthSpec& spec_template) {
  if (n_subjects < 1 || impressions_per_subject < 1) {
    throw ValidationError("population needs at least one subject and one impression");
  }
  Dataset dataset;
  const int digits = n_subjects >= 1000 ? 4 : 3;
  for (int i = 0; i < n_subjects; ++i) {
    SynthSpec spec = spec_template;
    spec.seed = derive_seed(base_seed, static_cast<std::uint64_t>(i) + 1);
    spec.n_impressions = impressions_per_subject;
    auto generated = generate_subject(spec);
    Subject subject{numbered("s", i + 1, digits), std::move(generated.impressions)};
    for (auto& imp : subject.impressions) imp.minutiae.subject_id = subject.id;
    dataset.subjects.push_back(std::move(subject));
  }
  return dataset;
}

SynthSpec synth_preset(std::string_view name) {
  SynthSpec spec;
  if (name == "clean") return spec;
  if (name == "default") {
    spec.noise.theta_jitter_deg = 5.0;
    spec.noise.position_jitter_px = 2.0;
    spec.noise.drop_rate = 0.10;
    return spec;
  }
  if (name == "rigid") {
    spec = synth_preset("default");
    spec.noise.rotation_deg_range = 15.0;
    spec.noise.translation_px_range = 10.0;
    return spec;
  }
  throw ValidationError("unknown synthetic preset `" + std::string(name) + "`");
}

}  // namespace ridgeguard
