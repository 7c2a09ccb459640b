// teachdim: construct, bound, verify and falsify teaching sets from the shell.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or validation error.

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "teachdim/bounds.hpp"
#include "teachdim/construct.hpp"
#include "teachdim/error.hpp"
#include "teachdim/io.hpp"
#include "teachdim/oracle.hpp"
#include "teachdim/verify.hpp"

using namespace teachdim;
using io::Json;

namespace {

constexpr std::uint64_t kDefaultSeed = 0x7e4c4d1aULL;

struct Options {
  std::string command;
  std::string learner;
  std::optional<bool> homogeneous;
  std::optional<double> lambda;
  std::optional<Vector> theta;
  std::optional<Vector> w;
  std::optional<double> b;
  std::optional<Vector> reg_diag;
  std::string goal = "parameter";
  std::optional<std::uint64_t> seed;
  std::string output;

  double scale_a = 1.0;
  std::optional<Vector> offset;
  std::optional<double> boundary_scale;

  std::string set_path;
  std::optional<TeachingSet> inline_set;
  int restarts = 4;
  std::optional<long> max_iterations;
  std::optional<double> solver_tol;
  std::optional<double> tol_kkt, tol_kkt_hinge, tol_recovery, tol_recovery_hinge, tol_gap, tol_unique,
      tol_unique_hinge;

  std::optional<long> size;
  long trials = 1000;
  std::optional<double> box_radius;

  std::vector<double> lambdas{0.3, 1.0, 2.5, 5.0, 9.7};
  std::vector<int> dims{1, 2, 5, 20};
  int targets = 5;
  std::string format = "json";
};

[[noreturn]] void usage_error(const std::string& message) { throw Error(errc::invalid_option, message); }

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(errc::parse_error, std::string("cannot parse '") + s + "' as a number for " + what);
  }
  return v;
}

Vector parse_csv(const std::string& csv, const char* what) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string field;
  while (std::getline(ss, field, ',')) values.push_back(parse_double(field, what));
  if (!csv.empty() && csv.back() == ',') throw Error(errc::parse_error, std::string("trailing comma in ") + what);
  if (values.empty()) throw Error(errc::parse_error, std::string(what) + " is empty");
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::uint64_t parse_seed(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(errc::invalid_option, "seed must be an unsigned 64-bit integer, got '" + s + "'");
  }
  return v;
}

std::uint64_t seed_of(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("TEACHDIM_SEED")) return parse_seed(env);
  return kDefaultSeed;
}

LearnerSpec learner_of(const Options& o) {
  if (o.learner.empty()) usage_error("--learner is required");
  if (!o.lambda) usage_error("--lambda is required");
  const LossKind loss = parse_loss(o.learner);
  std::optional<PsdMatrix> reg;
  if (o.reg_diag) reg = PsdMatrix(Matrix(o.reg_diag->asDiagonal()));
  return LearnerSpec(loss, o.homogeneous.value_or(true), *o.lambda, reg);
}

Goal goal_of(const std::string& g) {
  if (g == "parameter") return Goal::exact_parameter;
  if (g == "boundary") return Goal::decision_boundary;
  usage_error("--goal must be 'parameter' or 'boundary'");
}

TargetModel target_of(const Options& o, const LearnerSpec& spec) {
  TargetModel t;
  t.goal = goal_of(o.goal);
  if (spec.homogeneous()) {
    if (o.w || o.b) usage_error("homogeneous learners take --theta, not --w/--b");
    if (!o.theta) usage_error("--theta is required for homogeneous learners");
    t.weights = *o.theta;
  } else {
    if (o.theta) usage_error("inhomogeneous learners take --w and --b, not --theta");
    if (!o.w || !o.b) usage_error("--w and --b are required for inhomogeneous learners");
    t.weights = *o.w;
    t.bias = *o.b;
  }
  validate_target(spec, t);
  return t;
}

VerifyConfig verify_config_of(const Options& o) {
  VerifyConfig cfg;
  if (o.restarts < 2) usage_error("--restarts must be >= 2");
  cfg.restarts = o.restarts;
  cfg.solver.seed = seed_of(o);
  cfg.solver.max_iterations = o.max_iterations;
  cfg.solver.tolerance = o.solver_tol;
  const auto set = [](double& field, const std::optional<double>& v, const char* name) {
    if (!v) return;
    if (!(*v > 0.0)) usage_error(std::string(name) + " must be positive");
    field = *v;
  };
  set(cfg.kkt_tol_smooth, o.tol_kkt, "--tol-kkt");
  set(cfg.kkt_tol_hinge, o.tol_kkt_hinge, "--tol-kkt-hinge");
  set(cfg.recovery_tol_smooth, o.tol_recovery, "--tol-recovery");
  set(cfg.recovery_tol_hinge, o.tol_recovery_hinge, "--tol-recovery-hinge");
  set(cfg.objective_gap_tol_hinge, o.tol_gap, "--tol-gap");
  set(cfg.uniqueness_tol_smooth, o.tol_unique, "--tol-unique");
  set(cfg.uniqueness_tol_hinge, o.tol_unique_hinge, "--tol-unique-hinge");
  return cfg;
}

ConstructionOptions construction_of(const Options& o) {
  ConstructionOptions c;
  c.scale_a = o.scale_a;
  c.orthogonal_offset = o.offset;
  c.boundary_scale = o.boundary_scale;
  return c;
}

TeachingSet read_set(const Options& o) {
  if (o.inline_set) return *o.inline_set;
  if (o.set_path.empty()) usage_error("--set is required");
  if (o.set_path != "-") return io::read_teaching_set(o.set_path);
  Json j;
  try {
    j = Json::parse(std::cin);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(errc::parse_error, std::string("invalid JSON on standard input: ") + e.what());
  }
  return io::teaching_set_from_json(j);
}

struct Result {
  Json body;
  std::string text;  // used instead of body when non-empty
  int exit_code = 0;
};

Result cmd_construct(const Options& o) {
  const LearnerSpec spec = learner_of(o);
  return {io::to_json(teach(spec, target_of(o, spec), construction_of(o))), {}, 0};
}

Result cmd_bounds(const Options& o) {
  const LearnerSpec spec = learner_of(o);
  return {io::to_json(bound_report(spec, target_of(o, spec))), {}, 0};
}

Result cmd_verify(const Options& o) {
  const LearnerSpec spec = learner_of(o);
  const TargetModel target = target_of(o, spec);
  const TeachingSet set = read_set(o);
  const VerifyConfig cfg = verify_config_of(o);
  const VerifyReport rep = target.goal == Goal::decision_boundary
                               ? verify_construction(spec, target, set, cfg)
                               : verify_teaching_set(spec, set.items, target, cfg);
  Json body{{"seed", cfg.solver.seed}};
  body.update(io::to_json(rep));
  return {std::move(body), {}, rep.passed ? 0 : 1};
}

Result cmd_falsify(const Options& o) {
  const LearnerSpec spec = learner_of(o);
  const TargetModel target = target_of(o, spec);
  const long size = o.size.value_or(lower_bound(spec, target) - 1);
  const double radius = o.box_radius.value_or(default_box_radius(target));
  const auto rep =
      falsify_smaller_sets(spec, target, size, o.trials, radius, seed_of(o), verify_config_of(o));
  return {io::to_json(rep), {}, rep.successes == 0 ? 0 : 1};
}

struct TableLearner {
  const char* name;
  LossKind loss;
  bool homogeneous;
};

constexpr TableLearner kTableLearners[] = {
    {"hom ridge", LossKind::squared, true},     {"hom svm", LossKind::hinge, true},
    {"hom logistic", LossKind::logistic, true}, {"inhom ridge", LossKind::squared, false},
    {"inhom svm", LossKind::hinge, false},      {"inhom logistic", LossKind::logistic, false},
};

Json td_json(const TdValue& td) { return td.exact() ? Json(td.lo) : Json{{"lo", td.lo}, {"hi", td.hi}}; }

std::string td_text(const TdValue& td) {
  return td.exact() ? std::to_string(td.lo) : "[" + std::to_string(td.lo) + ", " + std::to_string(td.hi) + "]";
}

Result cmd_tables(const Options& o) {
  const Goal goal = goal_of(o.goal);
  const std::uint64_t seed = seed_of(o);
  if (o.targets < 1) usage_error("--targets must be >= 1");
  std::optional<LossKind> only_loss;
  if (!o.learner.empty()) only_loss = parse_loss(o.learner);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> norm(0.25, 3.0);
  std::uniform_real_distribution<double> bias(-2.0, 2.0);
  VerifyConfig cfg;
  cfg.solver.seed = seed;

  Json rows = Json::array();
  std::ostringstream text;
  text << "seed " << seed << ", goal " << o.goal << "\n";
  text << std::left << std::setw(16) << "learner" << std::setw(8) << "lambda" << std::setw(5) << "d"
       << std::setw(10) << "|w*|" << std::setw(10) << "b*" << std::setw(10) << "TD" << std::setw(6) << "LB"
       << std::setw(6) << "size" << "verdict\n";
  long cells = 0;
  long passed = 0;
  for (double l : o.lambdas) {
    for (int d : o.dims) {
      if (d < 1) usage_error("--dims entries must be >= 1");
      for (int k = 0; k < o.targets; ++k) {
        Vector w(d);
        do {
          for (auto& c : w) c = normal(rng);
        } while (w.norm() < 1e-3);
        w *= (k == 0 ? 1.0 : norm(rng)) / w.norm();
        const double b = bias(rng);
        for (const auto& tl : kTableLearners) {
          if (only_loss && tl.loss != *only_loss) continue;
          if (o.homogeneous && tl.homogeneous != *o.homogeneous) continue;
          if (goal == Goal::decision_boundary && tl.loss == LossKind::squared) continue;
          const LearnerSpec spec(tl.loss, tl.homogeneous, l);
          const TargetModel target{w, tl.homogeneous ? std::nullopt : std::optional<double>(b), goal};
          const TdValue td = td_formula(spec, target);
          const TeachingSet set = teach(spec, target);
          const long lb = lower_bound(spec, target);
          const VerifyReport rep = verify_construction(spec, target, set, cfg);
          const bool size_ok = static_cast<long>(set.items.size()) == td.hi;
          const bool ok = rep.passed && size_ok;
          ++cells;
          if (ok) ++passed;
          Json row{{"learner", tl.name}, {"lambda", l},        {"d", d},
                   {"w_norm", w.norm()}, {"b", nullptr},       {"td", td_json(td)},
                   {"lower_bound", lb},  {"size", set.items.size()}, {"verified", ok}};
          if (!tl.homogeneous) row["b"] = b;
          if (set.scale_factor != 1.0) row["scale_factor"] = set.scale_factor;
          rows.push_back(std::move(row));
          std::ostringstream bs;
          if (!tl.homogeneous) bs << std::setprecision(4) << b;
          text << std::left << std::setw(16) << tl.name << std::setw(8) << l << std::setw(5) << d << std::setw(10)
               << std::setprecision(4) << w.norm() << std::setw(10) << (tl.homogeneous ? "-" : bs.str())
               << std::setw(10) << td_text(td) << std::setw(6) << lb << std::setw(6) << set.items.size()
               << (ok ? "pass" : "FAIL") << "\n";
        }
      }
    }
  }
  text << passed << "/" << cells << " cells passed\n";
  Json body{{"seed", seed},
            {"goal", o.goal},
            {"rows", std::move(rows)},
            {"summary", {{"cells", cells}, {"passed", passed}, {"all_passed", passed == cells}}}};
  const int code = passed == cells ? 0 : 1;
  if (o.format == "text") return {nullptr, text.str(), code};
  if (o.format != "json") usage_error("--format must be 'json' or 'text'");
  return {std::move(body), {}, code};
}

// Job files: {"command", "learner": {...}, "target": {...}, "options": {...}, "output_path"}.
void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw Error(errc::parse_error, std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(errc::parse_error, "unknown field '" + key + "' in " + where);
  }
}

template <class T>
std::optional<T> field(const Json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(errc::parse_error, std::string("field '") + key + "' has the wrong type");
  }
}

Options options_from_job(const Json& job) {
  reject_unknown(job, {"command", "learner", "target", "options", "output_path"}, "job");
  Options o;
  o.command = field<std::string>(job, "command").value_or("");
  o.output = field<std::string>(job, "output_path").value_or("");
  if (job.contains("learner")) {
    const Json& l = job["learner"];
    reject_unknown(l, {"loss", "homogeneous", "lambda", "regularizer_diag"}, "learner");
    o.learner = field<std::string>(l, "loss").value_or("");
    o.homogeneous = field<bool>(l, "homogeneous");
    o.lambda = field<double>(l, "lambda");
    if (l.contains("regularizer_diag")) o.reg_diag = io::vector_from_json(l["regularizer_diag"], "regularizer_diag");
  }
  if (job.contains("target")) {
    const Json& t = job["target"];
    reject_unknown(t, {"theta", "w", "b", "goal"}, "target");
    if (t.contains("theta")) o.theta = io::vector_from_json(t["theta"], "theta");
    if (t.contains("w")) o.w = io::vector_from_json(t["w"], "w");
    o.b = field<double>(t, "b");
    o.goal = field<std::string>(t, "goal").value_or("parameter");
  }
  if (job.contains("options")) {
    const Json& p = job["options"];
    reject_unknown(p,
                   {"seed", "scale_a", "offset", "boundary_scale", "set", "restarts", "max_iterations",
                    "solver_tol", "tol_kkt", "tol_kkt_hinge", "tol_recovery", "tol_recovery_hinge", "tol_gap",
                    "tol_unique", "tol_unique_hinge", "size", "trials", "box_radius", "lambdas", "dims",
                    "targets", "format"},
                   "options");
    o.seed = field<std::uint64_t>(p, "seed");
    o.scale_a = field<double>(p, "scale_a").value_or(1.0);
    if (p.contains("offset")) o.offset = io::vector_from_json(p["offset"], "offset");
    o.boundary_scale = field<double>(p, "boundary_scale");
    if (p.contains("set")) {
      if (p["set"].is_string()) {
        o.set_path = p["set"].get<std::string>();
      } else {
        o.inline_set = io::teaching_set_from_json(p["set"]);
      }
    }
    o.restarts = field<int>(p, "restarts").value_or(4);
    o.max_iterations = field<long>(p, "max_iterations");
    o.solver_tol = field<double>(p, "solver_tol");
    o.tol_kkt = field<double>(p, "tol_kkt");
    o.tol_kkt_hinge = field<double>(p, "tol_kkt_hinge");
    o.tol_recovery = field<double>(p, "tol_recovery");
    o.tol_recovery_hinge = field<double>(p, "tol_recovery_hinge");
    o.tol_gap = field<double>(p, "tol_gap");
    o.tol_unique = field<double>(p, "tol_unique");
    o.tol_unique_hinge = field<double>(p, "tol_unique_hinge");
    o.size = field<long>(p, "size");
    o.trials = field<long>(p, "trials").value_or(1000);
    o.box_radius = field<double>(p, "box_radius");
    if (auto v = field<std::vector<double>>(p, "lambdas")) o.lambdas = *v;
    if (auto v = field<std::vector<int>>(p, "dims")) o.dims = *v;
    o.targets = field<int>(p, "targets").value_or(5);
    o.format = field<std::string>(p, "format").value_or("json");
  }
  return o;
}

Options read_job(const std::string& path) {
  Json j;
  try {
    if (path == "-") {
      j = Json::parse(std::cin);
    } else {
      std::ifstream in(path);
      if (!in) throw Error(errc::io_error, "cannot open '" + path + "'");
      j = Json::parse(in);
    }
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(errc::parse_error, std::string("invalid job JSON: ") + e.what());
  }
  return options_from_job(j);
}

Result dispatch(const Options& o) {
  if (o.command == "construct") return cmd_construct(o);
  if (o.command == "bounds") return cmd_bounds(o);
  if (o.command == "verify") return cmd_verify(o);
  if (o.command == "falsify") return cmd_falsify(o);
  if (o.command == "tables") return cmd_tables(o);
  usage_error("unknown command '" + o.command + "'");
}

void emit(const Result& r, const std::string& path) {
  const std::string out = r.text.empty() ? r.body.dump(2) + "\n" : r.text;
  if (path.empty() || path == "-") {
    std::cout << out;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(errc::io_error, "cannot write '" + path + "'");
  f << out;
}

int fail(const std::string& code, const std::string& message) {
  std::cout << Json{{"error", {{"code", code}, {"message", message}}}}.dump(2) << "\n";
  return 2;
}

// String-valued CLI fields converted into Options after parsing.
struct RawFlags {
  std::string theta, w, reg_diag, offset, seed, lambdas, dims;
  std::optional<double> b;
  bool hom = false;
  bool inhom = false;
};

void add_learner_flags(CLI::App* app, Options& o, RawFlags& raw) {
  app->add_option("--learner", o.learner, "ridge | svm | logistic");
  app->add_flag("--homogeneous", raw.hom, "learner without bias (default)");
  app->add_flag("--inhomogeneous", raw.inhom, "learner with an unregularized bias");
  app->add_option("--lambda", o.lambda, "regularization strength");
  app->add_option("--reg-diag", raw.reg_diag, "diagonal of the regularizer A (comma-separated; default I)");
  app->add_option("--seed", raw.seed, "random seed (default: $TEACHDIM_SEED or a fixed value)");
  app->add_option("--output", o.output, "output file (default standard output)");
}

void add_target_flags(CLI::App* app, Options& o, RawFlags& raw) {
  app->add_option("--theta", raw.theta, "homogeneous target, comma-separated");
  app->add_option("--w", raw.w, "inhomogeneous target weights, comma-separated");
  app->add_option("--b", raw.b, "inhomogeneous target bias");
  app->add_option("--goal", o.goal, "parameter | boundary")->check(CLI::IsMember({"parameter", "boundary"}));
}

void add_verify_flags(CLI::App* app, Options& o) {
  app->add_option("--restarts", o.restarts, "uniqueness restarts");
  app->add_option("--max-iterations", o.max_iterations, "solver iteration cap");
  app->add_option("--solver-tol", o.solver_tol, "solver stopping tolerance");
  app->add_option("--tol-kkt", o.tol_kkt);
  app->add_option("--tol-kkt-hinge", o.tol_kkt_hinge);
  app->add_option("--tol-recovery", o.tol_recovery);
  app->add_option("--tol-recovery-hinge", o.tol_recovery_hinge);
  app->add_option("--tol-gap", o.tol_gap);
  app->add_option("--tol-unique", o.tol_unique);
  app->add_option("--tol-unique-hinge", o.tol_unique_hinge);
}

void finish_options(Options& o, const RawFlags& raw) {
  if (raw.hom && raw.inhom) usage_error("--homogeneous and --inhomogeneous are exclusive");
  if (raw.hom) o.homogeneous = true;
  if (raw.inhom) o.homogeneous = false;
  if (!raw.theta.empty()) o.theta = parse_csv(raw.theta, "--theta");
  if (!raw.w.empty()) o.w = parse_csv(raw.w, "--w");
  if (raw.b) o.b = raw.b;
  if (!raw.reg_diag.empty()) o.reg_diag = parse_csv(raw.reg_diag, "--reg-diag");
  if (!raw.offset.empty()) o.offset = parse_csv(raw.offset, "--offset");
  if (!raw.seed.empty()) o.seed = parse_seed(raw.seed);
  if (!raw.lambdas.empty()) {
    const Vector v = parse_csv(raw.lambdas, "--lambdas");
    o.lambdas.assign(v.data(), v.data() + v.size());
  }
  if (!raw.dims.empty()) {
    const Vector v = parse_csv(raw.dims, "--dims");
    o.dims.clear();
    for (double x : v) {
      if (x != std::floor(x)) usage_error("--dims entries must be integers");
      o.dims.push_back(static_cast<int>(x));
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teaching sets for ridge regression, SVM and logistic regression"};
  app.require_subcommand(1);
  Options o;
  RawFlags raw;
  std::string job_path;

  auto* construct = app.add_subcommand("construct", "build a minimal teaching set");
  add_learner_flags(construct, o, raw);
  add_target_flags(construct, o, raw);
  construct->add_option("--scale-a", o.scale_a, "free scale of the ridge constructions");
  construct->add_option("--offset", raw.offset, "component orthogonal to w* for inhomogeneous svm/logistic");
  construct->add_option("--boundary-scale", o.boundary_scale, "scale t for decision-boundary teaching");

  auto* bounds = app.add_subcommand("bounds", "lower bounds and closed-form teaching dimension");
  add_learner_flags(bounds, o, raw);
  add_target_flags(bounds, o, raw);

  auto* verify = app.add_subcommand("verify", "check that a training set teaches the target");
  add_learner_flags(verify, o, raw);
  add_target_flags(verify, o, raw);
  add_verify_flags(verify, o);
  verify->add_option("--set", o.set_path, "teaching-set JSON file, or - for standard input");

  auto* falsify = app.add_subcommand("falsify", "search random sets below the lower bound");
  add_learner_flags(falsify, o, raw);
  add_target_flags(falsify, o, raw);
  add_verify_flags(falsify, o);
  falsify->add_option("--size", o.size, "set size to test (default lower bound - 1)");
  falsify->add_option("--trials", o.trials, "number of random sets");
  falsify->add_option("--box-radius", o.box_radius, "sampling box radius (default 5 (1 + |theta*|))");

  auto* tables = app.add_subcommand("tables", "closed forms, constructions and verdicts over a grid");
  add_learner_flags(tables, o, raw);
  tables->add_option("--goal", o.goal, "parameter | boundary")->check(CLI::IsMember({"parameter", "boundary"}));
  tables->add_option("--lambdas", raw.lambdas, "comma-separated lambda grid");
  tables->add_option("--dims", raw.dims, "comma-separated dimension grid");
  tables->add_option("--targets", o.targets, "random targets per (lambda, d); the first has unit norm");
  tables->add_option("--format", o.format, "json | text")->check(CLI::IsMember({"json", "text"}));

  auto* job = app.add_subcommand("job", "run a JSON job file");
  job->add_option("file", job_path, "job file, or - for standard input")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (job->parsed()) {
      o = read_job(job_path);
    } else {
      o.command = app.get_subcommands().front()->get_name();
      finish_options(o, raw);
    }
    const Result r = dispatch(o);
    emit(r, o.output);
    return r.exit_code;
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}
