// mbs: calibrate, synthesize, extract, train, classify, evaluate, replay
// sessions and run the preliminary detectors from the command line.

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mbs/mbs.hpp"

namespace fs = std::filesystem;
using namespace mbs;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<std::size_t> window;
  std::string calibration;

  Config load() const {
    Config c = config_path.empty() ? Config{} : load_config(config_path);
    if (seed) c.seed = *seed;
    if (k) c.k = *k;
    if (window) c.smoothing_window = *window;
    if (!calibration.empty()) c.calibration = calibration;
    validate(c);
    return c;
  }
};

FeatureConfig feature_config(const Config& c) {
  FeatureConfig f;
  f.baseline_ms = c.baseline_ms;
  f.smoothing.window = c.smoothing_window;
  return f;
}

KinematicsConfig kinematics_config(const Config& c) {
  KinematicsConfig k;
  k.baseline_ms = c.baseline_ms;
  k.smoothing.window = c.smoothing_window;
  k.noise_threshold = c.noise_threshold;
  k.zero_velocity = c.zero_velocity;
  return k;
}

// Raw count traces need a calibration file.
Trace load_trace(const std::string& path, const Config& c) {
  Trace t = read_trace(path);
  if (t.calibrated) return t;
  if (!c.calibration) throw Error(Errc::invalid_argument, path + " is in counts; pass --calibration");
  return mbs::calibrate(t, parse_calibration(text::read_file(*c.calibration)));
}

Vec3 mean_reading(const Trace& t) {
  Vec3 m;
  for (const auto& s : t.samples) m += s.accel();
  return m * (1.0 / static_cast<double>(t.size()));
}

std::string fs_relative(const fs::path& base, const std::string& file) {
  fs::path p(file);
  return p.is_relative() ? (base / p).string() : p.string();
}

void print_ranking(const Ranking& r) {
  for (const auto& e : r.entries) std::cout << e.label << ',' << text::format_double(e.confidence) << '\n';
}

TrainingSet load_training(const std::optional<std::string>& path, const char* what) {
  if (!path) throw Error(Errc::invalid_argument, std::string("missing ") + what);
  return parse_training_set(text::read_file(*path));
}

std::vector<synth::GestureClass> synthetic_classes(int count, double noise) {
  if (count == 12) return synth::default_gesture_classes(noise);
  if (count == 5) return synth::five_gesture_classes(noise);
  throw Error(Errc::invalid_argument, "--classes must be 12 or 5");
}

Ranking classify_with(const std::string& method, const Point<kFeatureCount>& x, const TrainingSet& user,
                      const TrainingSet* pooled, std::size_t k) {
  if (method == "knn") {
    TrainingSet merged = pooled ? *pooled : TrainingSet{};
    merged.append(user);
    return knn_classify(x, merged, k);
  }
  if (method == "bayes") return bayes_classify(x, user);
  return classify_policy(x, user, pooled, k);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Body-shortcut gesture pipeline"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "random seed (overrides config)");
  app.add_option("--k", common.k, "kNN neighbors (overrides config)")->check(CLI::PositiveNumber);
  app.add_option("--window", common.window, "smoothing window, odd (overrides config)")
      ->check(CLI::Validator(
          [](std::string& v) {
            unsigned long w = 0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), w);
            const bool ok = ec == std::errc{} && ptr == v.data() + v.size() && w % 2 == 1;
            return ok ? std::string() : std::string("window must be an odd positive integer");
          },
          "ODD"));
  app.add_option("--calibration", common.calibration, "calibration CSV for count traces");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "derive a calibration from +g/-g recordings, or apply one");
  std::vector<std::string> cal_plus, cal_minus;
  std::string cal_apply, cal_trace;
  cal->add_option("--plus", cal_plus, "+g recording: one file, or one per axis x y z");
  cal->add_option("--minus", cal_minus, "-g recording: one file, or one per axis x y z");
  cal->add_option("--apply", cal_apply, "calibration CSV to apply to --trace");
  cal->add_option("--trace", cal_trace, "count trace to calibrate");

  // synth
  auto* syn = app.add_subcommand("synth", "write a seeded synthetic gesture corpus");
  std::string syn_out;
  int syn_classes = 12;
  std::size_t syn_n = 20;
  double syn_jitter = 0.03, syn_noise = 0.05;
  syn->add_option("--out", syn_out, "output directory")->required();
  syn->add_option("--classes", syn_classes, "12 or 5");
  syn->add_option("--n", syn_n, "samples per class");
  syn->add_option("--jitter", syn_jitter, "displacement jitter sigma, m");
  syn->add_option("--noise", syn_noise, "sensor noise sigma, m/s^2");

  // features
  auto* fea = app.add_subcommand("features", "trace files to a feature CSV");
  std::vector<std::string> fea_traces;
  std::string fea_label;
  fea->add_option("traces", fea_traces, "trace CSV files")->required();
  fea->add_option("--label", fea_label, "label written on every row");

  // train
  auto* trn = app.add_subcommand("train", "training-set CSV from a ground-truth sidecar");
  std::string trn_truth;
  trn->add_option("--truth", trn_truth, "ground_truth.csv; trace paths are relative to it")->required();

  // classify
  auto* cls = app.add_subcommand("classify", "rank body parts for one gesture");
  std::string cls_trace, cls_features, cls_method = "policy", cls_training, cls_pooled, cls_model;
  double cls_height = 0.0;
  auto* cls_src = cls->add_option_group("input");
  cls_src->add_option("--trace", cls_trace, "gesture trace");
  cls_src->add_option("--features", cls_features, "feature CSV; the first row is classified");
  cls_src->require_option(1);
  cls->add_option("--method", cls_method, "policy | knn | bayes | position")
      ->check(CLI::IsMember({"policy", "knn", "bayes", "position"}));
  cls->add_option("--training", cls_training, "user training set");
  cls->add_option("--pooled", cls_pooled, "pooled training set");
  cls->add_option("--body-model", cls_model, "body-model CSV for --method position");
  cls->add_option("--height", cls_height, "user height in m for --method position");

  // evaluate
  auto* evl = app.add_subcommand("evaluate", "leave-one-out or train/test confusion matrix");
  std::string evl_training, evl_test, evl_method = "policy";
  bool evl_synthetic = false;
  int evl_classes = 12;
  std::size_t evl_n = 20;
  double evl_jitter = 0.03;
  evl->add_option("--training", evl_training, "training set (leave-one-out unless --test)");
  evl->add_option("--test", evl_test, "held-out test set");
  evl->add_flag("--synthetic", evl_synthetic, "evaluate a freshly generated synthetic corpus");
  evl->add_option("--classes", evl_classes, "12 or 5, with --synthetic");
  evl->add_option("--n", evl_n, "samples per class, with --synthetic");
  evl->add_option("--jitter", evl_jitter, "displacement jitter, with --synthetic");
  evl->add_option("--method", evl_method, "policy | knn | bayes")->check(CLI::IsMember({"policy", "knn", "bayes"}));

  // session
  auto* ses = app.add_subcommand("session", "replay an event script through the shortcut engine");
  std::string ses_script, ses_map, ses_training, ses_pooled, ses_log, ses_events;
  std::int64_t ses_epoch = 0;
  ses->add_option("--script", ses_script, "event script: `<t_ms> action|cancel|timer|gesture <trace>`")->required();
  ses->add_option("--map", ses_map, "body map file");
  ses->add_option("--training", ses_training, "user training set");
  ses->add_option("--pooled", ses_pooled, "pooled training set");
  ses->add_option("--log", ses_log, "also write the session log here");
  ses->add_option("--events", ses_events, "write feedback and trigger events here");
  ses->add_option("--epoch", ses_epoch, "wall time of t=0, ms since the Unix epoch");

  // detectors
  auto* tlt = app.add_subcommand("tilt", "detect tilt gestures in a trace");
  std::string tlt_trace;
  tlt->add_option("trace", tlt_trace, "trace CSV")->required();
  auto* mot = app.add_subcommand("motion", "per-window motion state of a trace");
  std::string mot_trace;
  mot->add_option("trace", mot_trace, "trace CSV")->required();
  auto* fal = app.add_subcommand("fall", "threshold fall detection on a trace");
  std::string fal_trace;
  fal->add_option("trace", fal_trace, "trace CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    const Config cfg = common.load();

    if (*cal) {
      if (!cal_apply.empty()) {
        if (cal_trace.empty()) throw CLI::ValidationError("--apply needs --trace");
        std::cout << format_trace(mbs::calibrate(read_trace(cal_trace), parse_calibration(text::read_file(cal_apply))));
        return 0;
      }
      if (cal_plus.size() != cal_minus.size() || (cal_plus.size() != 1 && cal_plus.size() != 3)) {
        throw CLI::ValidationError("give --plus and --minus once each, or three times each (x y z)");
      }
      Vec3 plus, minus;
      for (int axis = 0; axis < 3; ++axis) {
        const std::size_t file = cal_plus.size() == 1 ? 0 : static_cast<std::size_t>(axis);
        plus[axis] = mean_reading(read_trace(cal_plus[file]))[axis];
        minus[axis] = mean_reading(read_trace(cal_minus[file]))[axis];
      }
      std::cout << format_calibration(derive_calibration(plus, minus));
      return 0;
    }

    if (*syn) {
      synth::CorpusOptions opt;
      opt.n_per_class = syn_n;
      opt.jitter_m = syn_jitter;
      opt.seed = cfg.seed;
      const auto classes = synthetic_classes(syn_classes, syn_noise);
      fs::create_directories(syn_out);
      std::vector<synth::GroundTruthRow> truth;
      for (const auto& g : synth::corpus(classes, opt)) {
        const std::string file = g.name + ".csv";
        write_trace((fs::path(syn_out) / file).string(), g.gesture.trace);
        truth.push_back({file, g.label, g.gesture.truth});
      }
      const std::string gt = synth::format_ground_truth(truth);
      text::write_file((fs::path(syn_out) / "ground_truth.csv").string(), gt);
      std::cout << gt;
      return 0;
    }

    if (*fea) {
      std::cout << feature_csv_header() << '\n';
      for (const auto& path : fea_traces) {
        std::cout << format_feature_row(extract_features(load_trace(path, cfg), feature_config(cfg)).values, fea_label)
                  << '\n';
      }
      return 0;
    }

    if (*trn) {
      const auto base = fs::path(trn_truth).parent_path();
      TrainingSet ts;
      for (const auto& row : synth::parse_ground_truth(text::read_file(trn_truth))) {
        const Trace t = load_trace(fs_relative(base, row.file), cfg);
        ts.add(extract_features(t, feature_config(cfg)).values, row.label);
      }
      std::cout << format_training_set(ts);
      return 0;
    }

    if (*cls) {
      if (cls_method == "position") {
        if (cls_trace.empty()) throw CLI::ValidationError("--method position needs --trace");
        BodyModel model = cls_model.empty() ? default_body_model() : parse_body_model(text::read_file(cls_model));
        if (cfg.body_model && cls_model.empty()) model = parse_body_model(text::read_file(*cfg.body_model));
        if (cls_height > 0.0) model = scale_templates(model, cls_height);
        const Trace t = load_trace(cls_trace, cfg);
        const auto hit = classify_default(gesture_displacement(t, kinematics_config(cfg)),
                                          rotation_class_of(final_rotation(t, cfg.tail_ms)), model);
        if (hit) {
          std::cout << *hit << ",1\n";
        } else {
          std::cerr << "gesture not recognized\n";
        }
        return 0;
      }
      Point<kFeatureCount> x;
      if (!cls_trace.empty()) {
        x = extract_features(load_trace(cls_trace, cfg), feature_config(cfg)).values;
      } else {
        const auto rows = parse_feature_rows(text::read_file(cls_features));
        if (rows.empty()) throw Error(Errc::parse_error, cls_features + " has no feature rows");
        x = rows.front().values;
      }
      const auto user_path = cls_training.empty() ? cfg.training : std::optional<std::string>(cls_training);
      const auto pooled_path = cls_pooled.empty() ? cfg.pooled : std::optional<std::string>(cls_pooled);
      const TrainingSet user = user_path ? load_training(user_path, "--training") : TrainingSet{};
      const std::optional<TrainingSet> pooled =
          pooled_path ? std::optional<TrainingSet>(load_training(pooled_path, "--pooled")) : std::nullopt;
      print_ranking(classify_with(cls_method, x, user, pooled ? &*pooled : nullptr, cfg.k));
      return 0;
    }

    if (*evl) {
      TrainingSet corpus;
      if (evl_synthetic) {
        synth::CorpusOptions opt;
        opt.n_per_class = evl_n;
        opt.jitter_m = evl_jitter;
        opt.seed = cfg.seed;
        for (const auto& g : synth::corpus(synthetic_classes(evl_classes, 0.05), opt)) {
          corpus.add(extract_features(g.gesture.trace, feature_config(cfg)).values, g.label);
        }
      } else {
        const auto path = evl_training.empty() ? cfg.training : std::optional<std::string>(evl_training);
        corpus = load_training(path, "--training or --synthetic");
      }
      // The evaluated corpus plays the pooled role, so policy means kNN.
      auto classify = [&](const Point<kFeatureCount>& x, const TrainingSet& train) {
        if (evl_method == "bayes") return bayes_classify(x, train);
        return knn_classify(x, train, cfg.k);
      };
      const ConfusionMatrix m = evl_test.empty()
                                    ? leave_one_out(corpus, classify)
                                    : evaluate_split(corpus, parse_training_set(text::read_file(evl_test)), classify);
      std::cout << format_matrix_report(m);
      return 0;
    }

    if (*ses) {
      const auto map_path = ses_map.empty() ? cfg.body_map : std::optional<std::string>(ses_map);
      if (!map_path) throw CLI::ValidationError("session needs --map");
      const ShortcutEngine engine(parse_body_map(text::read_file(*map_path)), cfg.confirm_ms);
      const auto user_path = ses_training.empty() ? cfg.training : std::optional<std::string>(ses_training);
      const auto pooled_path = ses_pooled.empty() ? cfg.pooled : std::optional<std::string>(ses_pooled);
      const TrainingSet user = user_path ? load_training(user_path, "--training") : TrainingSet{};
      const std::optional<TrainingSet> pooled =
          pooled_path ? std::optional<TrainingSet>(load_training(pooled_path, "--pooled")) : std::nullopt;
      const auto base = fs::path(ses_script).parent_path();

      std::string log, events;
      Session s;
      auto apply = [&](const Event& e) {
        StepResult r = engine.step(s, e);
        for (const auto& f : r.feedback) {
          events += text::format_double(e.t_ms) + '\t' + std::string(to_string(f.kind)) + '\t' +
                    (f.kind == FeedbackKind::vibration ? text::format_double(f.vibration_s) : f.app) + '\n';
        }
        if (r.triggered) events += text::format_double(e.t_ms) + "\ttrigger\t" + *r.triggered + '\n';
        s = std::move(r.session);
        if (s.is_final()) {
          log += format_log_record(log_entry(s, ses_epoch)) + '\n';
          s = Session{};
        }
      };
      // Timers are implicit: any event at or past the deadline is preceded
      // by the expiry, and a pending session at the end of the script expires.
      auto expire_until = [&](double t) {
        if (s.state == SessionState::pending && t >= s.deadline_ms) apply(Event::timer(s.deadline_ms));
      };

      for (const auto& raw : text::lines(text::read_file(ses_script))) {
        const auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        std::istringstream in{std::string(line)};
        std::string t_text, kind, arg;
        in >> t_text >> kind;
        std::getline(in >> std::ws, arg);
        const double t = text::parse_double(t_text);
        if (kind == "timer") {
          apply(Event::timer(t));
          continue;
        }
        expire_until(t);
        if (kind == "action") {
          apply(Event::action(t));
        } else if (kind == "cancel") {
          apply(Event::cancel(t));
        } else if (kind == "gesture") {
          if (arg.empty()) throw Error(Errc::parse_error, "gesture event without a trace path");
          const auto x = extract_features(load_trace(fs_relative(base, arg), cfg), feature_config(cfg)).values;
          apply(Event::gesture(t, classify_policy(x, user, pooled ? &*pooled : nullptr, cfg.k)));
        } else {
          throw Error(Errc::parse_error, "unknown script event '" + kind + "'");
        }
      }
      if (s.state == SessionState::pending) apply(Event::timer(s.deadline_ms));
      if (s.state != SessionState::idle) std::cerr << "script ends with an unfinished session\n";

      if (!ses_log.empty()) text::write_file(ses_log, log);
      if (!ses_events.empty()) text::write_file(ses_events, events);
      std::cout << log;
      return 0;
    }

    if (*tlt) {
      TiltConfig tc;
      tc.threshold_deg = cfg.tilt_threshold_deg;
      tc.baseline_ms = cfg.baseline_ms;
      tc.smoothing.window = cfg.smoothing_window;
      const auto events = detect_tilts(load_trace(tlt_trace, cfg), tc);
      std::cout << "direction,peak_deg,start_ms,end_ms\n";
      for (const auto& e : events) {
        std::cout << to_string(e.direction) << ',' << text::format_fixed(e.peak_deg, 3) << ','
                  << text::format_double(e.start_ms) << ',' << text::format_double(e.end_ms) << '\n';
      }
      return 0;
    }

    if (*mot) {
      MotionConfig mc{cfg.hold_threshold, cfg.walk_threshold, cfg.run_threshold, cfg.motion_window_ms};
      const auto windows = classify_motion_stream(load_trace(mot_trace, cfg), mc);
      std::cout << "start_ms,state,deviation\n";
      for (const auto& w : windows) {
        std::cout << text::format_double(w.start_ms) << ',' << to_string(w.state) << ','
                  << text::format_fixed(w.deviation, 4) << '\n';
      }
      return 0;
    }

    if (*fal) {
      FallConfig fc;
      fc.spike_threshold = cfg.spike_threshold;
      fc.angle_threshold_deg = cfg.fall_angle_deg;
      std::cout << "fall," << (detect_fall(load_trace(fal_trace, cfg), fc) ? "true" : "false") << '\n';
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
