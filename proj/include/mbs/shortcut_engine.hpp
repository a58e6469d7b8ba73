#pragma once

// Interaction logic of the shortcut prototype: suggestion lists from a
// ranking, the confirm window with Multichoice and cancel, feedback events
// and session logging. Time is logical; the engine never reads a clock.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mbs/error.hpp"
#include "mbs/feature_classifier.hpp"
#include "mbs/text.hpp"

namespace mbs {

inline constexpr double kConfirmWindowMs = 2000.0;

// Body part -> applications in priority order. Parts keep file order and
// are matched case-insensitively.
class BodyMap {
 public:
  struct Entry {
    std::string part;
    std::vector<std::string> apps;
  };

  void add(std::string part, std::vector<std::string> apps) {
    if (part.empty()) throw Error(Errc::empty_label, "body part without a name");
    if (apps.empty()) throw Error(Errc::invalid_argument, "body part '" + part + "' has no applications");
    for (std::size_t i = 0; i < apps.size(); ++i) {
      if (apps[i].empty()) throw Error(Errc::invalid_argument, "empty application id for '" + part + "'");
      if (std::find(apps.begin(), apps.begin() + static_cast<std::ptrdiff_t>(i), apps[i]) !=
          apps.begin() + static_cast<std::ptrdiff_t>(i)) {
        throw Error(Errc::invalid_argument, "duplicate application '" + apps[i] + "' for '" + part + "'");
      }
    }
    if (find(part)) throw Error(Errc::invalid_argument, "body part '" + part + "' listed twice");
    entries_.push_back({std::move(part), std::move(apps)});
  }

  const std::vector<std::string>* find(std::string_view part) const {
    const std::string key = text::to_lower(part);
    for (const auto& e : entries_) {
      if (text::to_lower(e.part) == key) return &e.apps;
    }
    return nullptr;
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::vector<Entry> entries_;
};

// One part per line: `head: contacts, calculator`. `#` starts a comment.
inline BodyMap parse_body_map(std::string_view contents) {
  BodyMap map;
  for (const auto& raw : text::lines(contents)) {
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw Error(Errc::parse_error, "body-map line without ':'");
    std::vector<std::string> apps;
    for (auto& a : text::split(line.substr(colon + 1), ',')) apps.push_back(std::move(a));
    if (apps.size() == 1 && apps[0].empty()) apps.clear();
    map.add(std::string(text::trim(line.substr(0, colon))), std::move(apps));
  }
  return map;
}

inline std::string format_body_map(const BodyMap& map) {
  std::string out;
  for (const auto& e : map.entries()) out += e.part + ": " + text::join(e.apps, ", ") + '\n';
  return out;
}

// All apps of the top part, then the first app of the next two parts.
inline std::vector<std::string> suggestions(const Ranking& ranking, const BodyMap& map) {
  if (ranking.empty()) throw Error(Errc::invalid_argument, "empty ranking");
  std::vector<std::string> out;
  auto push = [&](const std::string& app) {
    if (std::find(out.begin(), out.end(), app) == out.end()) out.push_back(app);
  };
  const std::size_t depth = std::min(ranking.size(), kRankingSize);
  for (std::size_t r = 0; r < depth; ++r) {
    const auto* apps = map.find(ranking.entries[r].label);
    if (!apps) continue;
    if (r == 0) {
      for (const auto& a : *apps) push(a);
    } else {
      push(apps->front());
    }
  }
  if (out.empty()) throw Error(Errc::no_suggestions, "no ranked body part has applications");
  return out;
}

enum class FeedbackKind { audio_name, visual_progress, vibration };

constexpr std::string_view to_string(FeedbackKind k) noexcept {
  switch (k) {
    case FeedbackKind::audio_name: return "audio_name";
    case FeedbackKind::visual_progress: return "visual_progress";
    case FeedbackKind::vibration: return "vibration";
  }
  return "?";
}

struct FeedbackEvent {
  FeedbackKind kind = FeedbackKind::vibration;
  std::string app;             // audio_name, visual_progress
  double vibration_s = 0.0;    // vibration
  friend bool operator==(const FeedbackEvent&, const FeedbackEvent&) = default;
};

// Shorter vibration means a more confident recognition.
inline FeedbackEvent feedback_for(double confidence) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) throw Error(Errc::invalid_argument, "confidence outside [0, 1]");
  double s = 2.0;
  if (confidence >= 0.85) {
    s = 0.25;
  } else if (confidence >= 0.65) {
    s = 1.0;
  }
  return {FeedbackKind::vibration, {}, s};
}

enum class SessionState { idle, recording, awaiting_recognition, pending, triggered, cancelled };

constexpr std::string_view to_string(SessionState s) noexcept {
  switch (s) {
    case SessionState::idle: return "idle";
    case SessionState::recording: return "recording";
    case SessionState::awaiting_recognition: return "awaiting_recognition";
    case SessionState::pending: return "pending";
    case SessionState::triggered: return "triggered";
    case SessionState::cancelled: return "cancelled";
  }
  return "?";
}

enum class EventKind { action_press, cancel_press, timer_expired, gesture_recognized };

constexpr std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::action_press: return "action";
    case EventKind::cancel_press: return "cancel";
    case EventKind::timer_expired: return "timer";
    case EventKind::gesture_recognized: return "gesture";
  }
  return "?";
}

struct Event {
  EventKind kind = EventKind::action_press;
  double t_ms = 0.0;
  Ranking ranking;  // gesture_recognized only

  static Event action(double t) { return {EventKind::action_press, t, {}}; }
  static Event cancel(double t) { return {EventKind::cancel_press, t, {}}; }
  static Event timer(double t) { return {EventKind::timer_expired, t, {}}; }
  static Event gesture(double t, Ranking r) { return {EventKind::gesture_recognized, t, std::move(r)}; }
};

struct Session {
  SessionState state = SessionState::idle;
  Ranking ranking;
  std::vector<std::string> suggestions;
  std::size_t index = 0;
  double deadline_ms = 0.0;
  double confidence = 0.0;
  double start_ms = 0.0;
  double end_ms = 0.0;
  double last_ms = 0.0;
  std::size_t multichoice = 0;
  std::size_t presses = 0;
  std::optional<std::string> triggered;

  bool is_final() const noexcept { return state == SessionState::triggered || state == SessionState::cancelled; }
};

struct StepResult {
  Session session;
  std::vector<FeedbackEvent> feedback;
  std::optional<std::string> triggered;
};

// Recording starts and ends with an action press; the recognizer then
// delivers a ranking. While pending, action is Multichoice, cancel aborts,
// and the timer at the deadline triggers the current suggestion.
class ShortcutEngine {
 public:
  explicit ShortcutEngine(BodyMap map, double confirm_ms = kConfirmWindowMs)
      : map_(std::move(map)), confirm_ms_(confirm_ms) {
    if (!(confirm_ms > 0.0)) throw Error(Errc::invalid_argument, "confirm window must be positive");
  }

  const BodyMap& body_map() const noexcept { return map_; }
  double confirm_ms() const noexcept { return confirm_ms_; }

  StepResult step(Session s, const Event& e) const {
    if (!std::isfinite(e.t_ms) || (s.state != SessionState::idle && e.t_ms < s.last_ms)) {
      illegal(s, e, "time runs backwards");
    }
    StepResult out;
    switch (s.state) {
      case SessionState::idle:
        if (e.kind != EventKind::action_press) illegal(s, e);
        s.state = SessionState::recording;
        s.start_ms = e.t_ms;
        s.presses = 1;
        break;
      case SessionState::recording:
        if (e.kind != EventKind::action_press) illegal(s, e);
        s.state = SessionState::awaiting_recognition;
        s.presses += 1;
        break;
      case SessionState::awaiting_recognition: {
        if (e.kind != EventKind::gesture_recognized) illegal(s, e);
        if (e.ranking.empty()) throw Error(Errc::invalid_argument, "recognized gesture without a ranking");
        s.ranking = e.ranking;
        s.confidence = e.ranking.top().confidence;
        try {
          s.suggestions = suggestions(e.ranking, map_);
        } catch (const Error& err) {
          if (err.code() != Errc::no_suggestions) throw;
          s.state = SessionState::cancelled;
          s.end_ms = e.t_ms;
          break;
        }
        s.state = SessionState::pending;
        s.index = 0;
        s.deadline_ms = e.t_ms + confirm_ms_;
        out.feedback.push_back(feedback_for(s.confidence));
        announce(s, out.feedback);
        break;
      }
      case SessionState::pending:
        if (e.kind == EventKind::timer_expired) {
          if (e.t_ms < s.deadline_ms) illegal(s, e, "timer before the deadline");
          s.state = SessionState::triggered;
          s.triggered = s.suggestions[s.index];
          s.end_ms = e.t_ms;
          out.triggered = s.triggered;
          break;
        }
        if (e.t_ms >= s.deadline_ms) illegal(s, e, "confirm window already over");
        if (e.kind == EventKind::cancel_press) {
          s.state = SessionState::cancelled;
          s.end_ms = e.t_ms;
        } else if (e.kind == EventKind::action_press) {
          s.presses += 1;
          s.multichoice += 1;
          if (s.index + 1 >= s.suggestions.size()) {
            s.state = SessionState::cancelled;
            s.end_ms = e.t_ms;
          } else {
            s.index += 1;
            s.deadline_ms = e.t_ms + confirm_ms_;
            announce(s, out.feedback);
          }
        } else {
          illegal(s, e);
        }
        break;
      case SessionState::triggered:
      case SessionState::cancelled:
        illegal(s, e);
    }
    s.last_ms = e.t_ms;
    out.session = std::move(s);
    return out;
  }

 private:
  static void announce(const Session& s, std::vector<FeedbackEvent>& fb) {
    fb.push_back({FeedbackKind::visual_progress, s.suggestions[s.index], 0.0});
    fb.push_back({FeedbackKind::audio_name, s.suggestions[s.index], 0.0});
  }

  [[noreturn]] static void illegal(const Session& s, const Event& e, std::string_view why = "not accepted") {
    throw Error(Errc::illegal_event, std::string(to_string(e.kind)) + " in state " + std::string(to_string(s.state)) +
                                         ": " + std::string(why));
  }

  BodyMap map_;
  double confirm_ms_;
};

struct LogRecord {
  std::string iso_time;
  std::vector<std::string> ranking;
  std::vector<std::string> suggestions;
  std::optional<std::string> app;  // nullopt when cancelled
  double elapsed_ms = 0.0;
  std::size_t multichoice = 0;
  std::size_t presses = 0;
};

// `epoch_ms` is the wall time of logical time 0, in ms since the Unix epoch.
inline std::string iso_time_utc(std::int64_t epoch_ms) {
  const auto ms = std::chrono::milliseconds(epoch_ms);
  const auto secs = std::chrono::floor<std::chrono::seconds>(ms);
  const std::time_t tt = static_cast<std::time_t>(secs.count());
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  const auto frac = (ms - secs).count();
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03lldZ", buf, static_cast<long long>(frac));
  return out;
}

inline LogRecord log_entry(const Session& s, std::int64_t epoch_ms = 0) {
  if (!s.is_final()) throw Error(Errc::session_not_final, "session still " + std::string(to_string(s.state)));
  return {iso_time_utc(epoch_ms + static_cast<std::int64_t>(std::llround(s.start_ms))),
          s.ranking.labels(),
          s.suggestions,
          s.state == SessionState::triggered ? s.triggered : std::nullopt,
          s.end_ms - s.start_ms,
          s.multichoice,
          s.presses};
}

// iso_time, ranking, suggestions, outcome, elapsed_ms, multichoice, presses.
inline std::string format_log_record(const LogRecord& r) {
  std::string out = r.iso_time;
  out += '\t' + text::join(r.ranking, ",");
  out += '\t' + text::join(r.suggestions, ",");
  out += '\t' + (r.app ? *r.app : std::string("cancelled"));
  out += '\t' + text::format_double(r.elapsed_ms);
  out += '\t' + std::to_string(r.multichoice);
  out += '\t' + std::to_string(r.presses);
  return out;
}

}  // namespace mbs
