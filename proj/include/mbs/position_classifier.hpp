#pragma once

// Position-based recognition: a gesture is its integrated endpoint plus the
// rotation class of its final pose, matched to the nearest template that
// shares the class.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbs/error.hpp"
#include "mbs/kinematics.hpp"
#include "mbs/text.hpp"
#include "mbs/vec3.hpp"

namespace mbs {

inline constexpr double kReachLimit = 1.5;       // m, |endpoint| bound
inline constexpr double kMaxUserHeight = 2.5;    // m
inline constexpr double kDefaultModelHeight = 1.80;

class RotationClass {
 public:
  explicit RotationClass(int id) : id_(id) {
    if (id < 1 || id > 6) throw Error(Errc::invalid_argument, "rotation class must be 1..6");
  }
  int id() const noexcept { return id_; }
  friend bool operator==(RotationClass, RotationClass) = default;
  friend auto operator<=>(RotationClass, RotationClass) = default;

 private:
  int id_;
};

// 1: within 45 degrees of the reference pose; 2/3: pitched up/down past 45;
// 4/5: rolled right/left past 45; 6: upside down. A value of exactly 45
// stays in the lower class.
inline RotationClass rotation_class_of(const RotationAngles& a) {
  const double pitch = a.pitch();
  const double roll = a.roll();
  if (std::abs(pitch) <= 45.0 && std::abs(roll) <= 45.0) return RotationClass(a.inverted() ? 6 : 1);
  if (pitch > 45.0) return RotationClass(2);
  if (pitch < -45.0) return RotationClass(3);
  if (roll > 45.0) return RotationClass(4);
  return RotationClass(5);
}

struct GestureTemplate {
  std::string label;
  Vec3 endpoint;  // m, relative to the chest start
  RotationClass rotation_class{1};
};

struct BodyModel {
  double model_height = kDefaultModelHeight;
  std::vector<GestureTemplate> templates;
};

inline void validate(const BodyModel& model) {
  if (!(model.model_height > 0.0) || !std::isfinite(model.model_height)) {
    throw Error(Errc::invalid_height, "model height must be positive");
  }
  std::set<std::string> seen;
  for (const auto& t : model.templates) {
    if (t.label.empty()) throw Error(Errc::empty_label, "template without a label");
    if (!seen.insert(t.label).second) throw Error(Errc::invalid_argument, "duplicate template label " + t.label);
    const Vec3& e = t.endpoint;
    if (!std::isfinite(e.x) || !std::isfinite(e.y) || !std::isfinite(e.z) || norm(e) > kReachLimit) {
      throw Error(Errc::invalid_argument, "template " + t.label + " endpoint outside arm's reach");
    }
  }
}

// Eight-head rule: body proportions scale linearly with height.
inline BodyModel scale_templates(const BodyModel& model, double user_height) {
  if (!(user_height > 0.0) || user_height > kMaxUserHeight || !std::isfinite(user_height)) {
    throw Error(Errc::invalid_height, "user height must be in (0, 2.5] m");
  }
  BodyModel out = model;
  const double factor = user_height / model.model_height;
  for (auto& t : out.templates) t.endpoint *= factor;
  out.model_height = user_height;
  return out;
}

// Index of the Euclidean-nearest item whose class matches; first wins on ties.
template <class Range, class EndpointOf, class ClassOf>
std::optional<std::size_t> nearest_in_class(const Range& items, const Vec3& query, RotationClass rclass,
                                            EndpointOf endpoint_of, ClassOf class_of) {
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  for (const auto& item : items) {
    if (class_of(item) == rclass) {
      const double d = distance(endpoint_of(item), query);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    ++i;
  }
  return best;
}

// nullopt means the gesture is not recognized.
inline std::optional<std::string> classify_default(const Vec3& endpoint, RotationClass rclass,
                                                   const BodyModel& model) {
  const auto hit = nearest_in_class(
      model.templates, endpoint, rclass, [](const GestureTemplate& t) { return t.endpoint; },
      [](const GestureTemplate& t) { return t.rotation_class; });
  if (!hit) return std::nullopt;
  return model.templates[*hit].label;
}

struct PositionSample {
  std::string label;
  Vec3 endpoint;
  RotationClass rotation_class{1};
};

struct PersonalGesture {
  std::string label;
  Vec3 centroid;
  RotationClass rotation_class{1};
  std::size_t training_count = 0;
};

struct PersonalGestureSet {
  std::vector<PersonalGesture> gestures;  // in order of first appearance
};

// Centroid of each label's endpoints and its most frequent rotation class
// (ties go to the lowest class id).
inline PersonalGestureSet train_personal(std::span<const PositionSample> samples) {
  if (samples.empty()) throw Error(Errc::empty_label, "no training samples");
  struct Acc {
    Vec3 sum;
    std::size_t count = 0;
    std::array<std::size_t, 7> class_votes{};
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  for (const auto& s : samples) {
    if (s.label.empty()) throw Error(Errc::empty_label, "training sample without a label");
    auto [it, inserted] = acc.try_emplace(s.label);
    if (inserted) order.push_back(s.label);
    it->second.sum += s.endpoint;
    it->second.count += 1;
    it->second.class_votes[static_cast<std::size_t>(s.rotation_class.id())] += 1;
  }
  PersonalGestureSet out;
  for (const auto& label : order) {
    const Acc& a = acc.at(label);
    int mode = 1;
    for (int c = 2; c <= 6; ++c) {
      if (a.class_votes[static_cast<std::size_t>(c)] > a.class_votes[static_cast<std::size_t>(mode)]) mode = c;
    }
    out.gestures.push_back({label, a.sum * (1.0 / static_cast<double>(a.count)), RotationClass(mode), a.count});
  }
  return out;
}

inline std::optional<std::string> classify_personal(const Vec3& endpoint, RotationClass rclass,
                                                    const PersonalGestureSet& set) {
  const auto hit = nearest_in_class(
      set.gestures, endpoint, rclass, [](const PersonalGesture& g) { return g.centroid; },
      [](const PersonalGesture& g) { return g.rotation_class; });
  if (!hit) return std::nullopt;
  return set.gestures[*hit].label;
}

// Body-model file: `# model_height=1.80`, then `label,x,y,z,rotation_class` rows.
inline BodyModel parse_body_model(std::string_view contents) {
  BodyModel model;
  bool saw_height = false;
  for (const auto& raw : text::lines(contents)) {
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = text::trim(line.substr(1));
      if (body.starts_with("model_height=")) {
        model.model_height = text::parse_double(body.substr(13));
        saw_height = true;
      }
      continue;
    }
    if (line == "label,x,y,z,rotation_class") continue;
    const auto c = text::split(line, ',');
    if (c.size() != 5) throw Error(Errc::parse_error, "body-model rows need 5 columns");
    model.templates.push_back({c[0],
                               {text::parse_double(c[1]), text::parse_double(c[2]), text::parse_double(c[3])},
                               RotationClass(static_cast<int>(text::parse_int(c[4])))});
  }
  if (!saw_height) throw Error(Errc::parse_error, "missing '# model_height=' header");
  validate(model);
  return model;
}

inline std::string format_body_model(const BodyModel& model) {
  std::string out = "# model_height=" + text::format_fixed(model.model_height, 2) + "\n";
  out += "label,x,y,z,rotation_class\n";
  for (const auto& t : model.templates) {
    out += t.label + ',' + text::format_double(t.endpoint.x) + ',' + text::format_double(t.endpoint.y) + ',' +
           text::format_double(t.endpoint.z) + ',' + std::to_string(t.rotation_class.id()) + '\n';
  }
  return out;
}

// Reference-pose templates measured at 1.80 m; the same contents ship as
// data/default_body_model.csv.
inline constexpr std::string_view kDefaultBodyModelCsv =
    "# model_height=1.80\n"
    "label,x,y,z,rotation_class\n"
    "Mouth,0,0.1,0.3,1\n"
    "Chest,0,0.2,0,1\n"
    "Navel,0,0.1,-0.25,1\n"
    "Shoulder,0.2,0,0.15,5\n"
    "Neck,0,0.05,0.2,3\n"
    "Ear,0.15,0,0.4,4\n"
    "Head,0,0,0.55,2\n"
    "Leg,0.2,0.05,-0.6,3\n"
    "Wrist,-0.25,0.3,-0.25,2\n"
    "Eye,0.05,0.05,0.42,2\n";

inline BodyModel default_body_model() { return parse_body_model(kDefaultBodyModelCsv); }

}  // namespace mbs
