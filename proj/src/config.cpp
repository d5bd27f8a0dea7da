#include "cbo/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cbo/errors.hpp"
#include "cbo/harness/idx.hpp"
#include "cbo/objectives.hpp"

namespace cbo::harness {

using json = nlohmann::json;

std::string suggest_key(const std::string& key, const std::vector<std::string>& candidates) {
  auto distance = [](const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t diag = row[0];
      row[0] = i;
      for (std::size_t j = 1; j <= b.size(); ++j) {
        const std::size_t up = row[j];
        row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
        diag = up;
      }
    }
    return row[b.size()];
  };
  std::string best;
  std::size_t best_d = 3;
  for (const auto& c : candidates) {
    const std::size_t d = distance(key, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

// Strict view of one JSON object: every key must be read before finish().
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "config" : path_, "must be an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* raw(const std::string& key) {
    known_.push_back(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_number()) fail(field(key), "expected a number");
    return v->get<double>();
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const json* v = raw(key);
    if (!v) return def;
    return to_count(*v, field(key));
  }

  std::uint64_t u64(const std::string& key, std::uint64_t def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0))
      fail(field(key), "expected a non-negative integer");
    return v->get<std::uint64_t>();
  }

  bool flag(const std::string& key, bool def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_string()) fail(field(key), "expected a string");
    return v->get<std::string>();
  }

  template <class E>
  E choice(const std::string& key, E def, const std::vector<std::pair<std::string, E>>& options) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_string()) fail(field(key), "expected a string");
    const auto s = v->get<std::string>();
    std::vector<std::string> names;
    for (const auto& [name, value] : options) {
      if (name == s) return value;
      names.push_back(name);
    }
    std::string msg = "unknown value '" + s + "'";
    if (auto hint = suggest_key(s, names); !hint.empty()) msg += "; did you mean '" + hint + "'?";
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
    fail(field(key), msg + " (expected one of: " + all + ")");
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(known_.begin(), known_.end(), key) != known_.end()) continue;
      std::string msg = "unknown key '" + key + "'";
      if (auto hint = suggest_key(key, known_); !hint.empty())
        msg += "; did you mean '" + hint + "'?";
      fail(path_.empty() ? "config" : path_, msg);
    }
  }

  static std::size_t to_count(const json& v, const std::string& field) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      fail(field, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> known_;
};

std::vector<double> number_list(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(field, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> rows_of(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(number_list(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

const std::vector<std::pair<std::string, Schedule::Kind>> kSchedules{
    {"constant", Schedule::Kind::constant},
    {"log_decay", Schedule::Kind::log_decay},
    {"geometric", Schedule::Kind::geometric}};

const std::vector<std::pair<std::string, AnchoredScheme>> kAnchored{
    {"componentwise_euler", AnchoredScheme::componentwise_euler},
    {"splitting", AnchoredScheme::splitting},
    {"exact_gbm", AnchoredScheme::exact_gbm},
    {"isotropic_euler", AnchoredScheme::isotropic_euler}};

const std::vector<std::pair<std::string, ObjectiveSpec::Kind>> kObjectives{
    {"rastrigin", ObjectiveSpec::Kind::rastrigin},
    {"oscillatory", ObjectiveSpec::Kind::oscillatory},
    {"quadratic", ObjectiveSpec::Kind::quadratic},
    {"softmax_net", ObjectiveSpec::Kind::softmax_net}};

const std::vector<std::pair<std::string, MethodSpec::Kind>> kMethods{
    {"cbo", MethodSpec::Kind::cbo},
    {"isotropic_cbo", MethodSpec::Kind::isotropic_cbo},
    {"sgd", MethodSpec::Kind::sgd}};

template <class E>
std::string name_of(E value, const std::vector<std::pair<std::string, E>>& options) {
  for (const auto& [name, v] : options)
    if (v == value) return name;
  return "?";
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

BlobSpec parse_blobs(Node n) {
  BlobSpec b;
  b.n_train = n.count("n_train", b.n_train);
  b.n_test = n.count("n_test", b.n_test);
  b.input_dim = n.count("input_dim", b.input_dim);
  b.n_classes = n.count("n_classes", b.n_classes);
  b.spread = n.number("spread", b.spread);
  b.seed = n.u64("seed", b.seed);
  n.finish();
  return b;
}

DatasetSpec parse_dataset(Node n, const std::filesystem::path& base) {
  DatasetSpec d;
  d.source = n.choice<DatasetSpec::Source>(
      "source", d.source, {{"idx", DatasetSpec::Source::idx}, {"blobs", DatasetSpec::Source::blobs}});
  auto path = [&](const char* key, std::filesystem::path& out) {
    const auto s = n.text(key, "");
    if (!s.empty()) out = resolve(s, base);
  };
  path("train_images", d.train_images);
  path("train_labels", d.train_labels);
  path("test_images", d.test_images);
  path("test_labels", d.test_labels);
  d.train_limit = n.count("train_limit", 0);
  d.test_limit = n.count("test_limit", 0);
  d.fallback_to_blobs = n.flag("fallback_to_blobs", false);
  if (const json* b = n.raw("blobs")) d.blobs = parse_blobs(Node(*b, n.field("blobs")));
  n.finish();
  return d;
}

ObjectiveSpec parse_objective(Node n, const std::filesystem::path& base) {
  ObjectiveSpec o;
  if (!n.raw("type")) fail(n.field("type"), "is required");
  o.kind = n.choice("type", o.kind, kObjectives);
  o.dim = n.count("dim", o.dim);
  o.shift = n.number("shift", o.shift);
  o.lift = n.number("lift", o.lift);
  o.n_samples = n.count("n_samples", o.n_samples);
  o.seed = n.u64("seed", o.seed);
  if (const json* c = n.raw("centers")) o.centers = rows_of(*c, n.field("centers"));
  o.scale = n.number("scale", o.scale);
  if (const json* d = n.raw("dataset")) o.dataset = parse_dataset(Node(*d, n.field("dataset")), base);
  n.finish();
  return o;
}

StallConfig parse_stall(Node n) {
  StallConfig s;
  s.enabled = n.flag("enabled", true);
  s.epsilon_stall = n.number("epsilon_stall", s.epsilon_stall);
  s.consecutive = n.count("consecutive", s.consecutive);
  s.kick_sigma = n.number("kick_sigma", s.kick_sigma);
  s.max_restarts = n.count("max_restarts", s.max_restarts);
  s.min_rel_decrease = n.number("min_rel_decrease", s.min_rel_decrease);
  s.patience = n.count("patience", s.patience);
  n.finish();
  return s;
}

MethodSpec parse_method(Node n, std::size_t index) {
  MethodSpec m;
  m.kind = n.choice("type", m.kind, kMethods);
  m.name = n.text("name", name_of(m.kind, kMethods) + (index ? std::to_string(index) : ""));
  if (m.name.empty() || m.name.find_first_of("/\\ ,") != std::string::npos)
    fail(n.field("name"), "must be non-empty without spaces, commas or slashes");

  if (m.kind == MethodSpec::Kind::sgd) {
    m.sgd.gamma = n.number("gamma", m.sgd.gamma);
    m.sgd.batch = n.count("batch", m.sgd.batch);
    m.sgd.max_iters = n.count("max_iters", m.sgd.max_iters);
    n.finish();
    return m;
  }

  CboParams& p = m.cbo;
  p.lambda = n.number("lambda", p.lambda);
  p.sigma = n.number("sigma", p.sigma);
  p.beta = n.number("beta", p.beta);
  p.gamma = n.number("gamma", p.gamma);
  p.n_particles = n.count("n_particles", p.n_particles);
  p.batch_particles = n.count("batch_particles", p.n_particles);
  if (const json* b = n.raw("batch_data")) {
    if (b->is_string() && b->get<std::string>() == "full")
      p.batch_data.reset();
    else
      p.batch_data = Node::to_count(*b, n.field("batch_data"));
  }
  p.update_mode = n.choice<UpdateMode>("update_mode", p.update_mode,
                                       {{"partial", UpdateMode::partial}, {"full", UpdateMode::full}});
  p.consensus_mode = n.choice<ConsensusMode>(
      "consensus_mode", p.consensus_mode,
      {{"weighted", ConsensusMode::weighted}, {"argmin", ConsensusMode::argmin}});
  p.scheme = n.choice<Scheme>("scheme", p.scheme,
                              {{"euler", Scheme::euler},
                               {"splitting", Scheme::splitting},
                               {"exact_gbm", Scheme::exact_gbm}});
  p.sigma_schedule = n.choice("sigma_schedule", p.sigma_schedule, kSchedules);
  p.sigma_rate = n.number("sigma_rate", p.sigma_rate);
  p.beta_schedule = n.choice("beta_schedule", p.beta_schedule, kSchedules);
  p.beta_rate = n.number("beta_rate", p.beta_rate);
  p.beta_max = n.number("beta_max", p.beta_max);
  p.stop_on_criterion = n.flag("stop_on_criterion", p.stop_on_criterion);
  p.epsilon_stop = n.number("epsilon_stop", p.epsilon_stop);
  p.max_iters = n.count("max_iters", p.max_iters);
  p.trace_every = n.count("trace_every", 0);
  if (const json* s = n.raw("stall")) p.stall = parse_stall(Node(*s, n.field("stall")));
  if (m.kind == MethodSpec::Kind::isotropic_cbo) {
    m.heaviside = n.choice<Heaviside>("heaviside", m.heaviside,
                                      {{"off", Heaviside::off}, {"logistic", Heaviside::logistic}});
    m.heaviside_eps = n.number("heaviside_eps", m.heaviside_eps);
  }
  n.finish();
  return m;
}

InitSpec parse_init(Node n) {
  InitSpec init;
  const auto kind = n.choice<InitSpec::Kind>(
      "type", InitSpec::Kind::uniform,
      {{"uniform", InitSpec::Kind::uniform},
       {"gaussian", InitSpec::Kind::gaussian},
       {"explicit", InitSpec::Kind::explicit_positions}});
  init.kind = kind;
  init.low = n.number("low", -3.0);
  init.high = n.number("high", 3.0);
  init.mean = n.number("mean", 0.0);
  init.stddev = n.number("stddev", 1.0);
  if (const json* p = n.raw("positions")) {
    for (const auto& row : rows_of(*p, n.field("positions")))
      init.positions.insert(init.positions.end(), row.begin(), row.end());
  }
  n.finish();
  return init;
}

DiagnosticsSpec parse_diagnostics(Node n) {
  DiagnosticsSpec d;
  if (const json* a = n.raw("anchored")) {
    if (!a->is_array()) fail(n.field("anchored"), "expected an array");
    for (std::size_t i = 0; i < a->size(); ++i) {
      Node e((*a)[i], n.field("anchored") + "[" + std::to_string(i) + "]");
      AnchoredSpec s;
      s.scheme = e.choice("scheme", s.scheme, kAnchored);
      s.lambda = e.number("lambda", s.lambda);
      s.sigma = e.number("sigma", s.sigma);
      s.gamma = e.number("gamma", s.gamma);
      s.dim = e.count("dim", s.dim);
      s.particles = e.count("particles", s.particles);
      s.steps = e.count("steps", s.steps);
      e.finish();
      d.anchored.push_back(s);
    }
  }
  if (const json* c = n.raw("certificate")) {
    Node e(*c, n.field("certificate"));
    CertificateSpec s;
    s.loss_min = e.number("loss_min", s.loss_min);
    if (const json* k = e.raw("curvature")) {
      if (!k->is_number()) fail(e.field("curvature"), "expected a number");
      s.curvature = k->get<double>();
    }
    e.finish();
    d.certificate = s;
  }
  if (const json* l = n.raw("laplace")) {
    Node e(*l, n.field("laplace"));
    LaplaceSpec s;
    if (const json* b = e.raw("betas")) s.betas = number_list(*b, e.field("betas"));
    s.samples = e.count("samples", s.samples);
    e.finish();
    d.laplace = s;
  }
  if (const json* s = n.raw("semidiscrete")) {
    Node e(*s, n.field("semidiscrete"));
    SemidiscreteSpec spec;
    spec.refresh_every = e.count("refresh_every", spec.refresh_every);
    e.finish();
    d.semidiscrete = spec;
  }
  n.finish();
  return d;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (name.empty() || name.find_first_of("/\\") != std::string::npos)
    fail("name", "must be non-empty without slashes");
  if (repetitions < 1) fail("repetitions", "must be at least 1");
  if (threads < 1) fail("threads", "must be at least 1");
  if (methods.empty()) fail("methods", "at least one method is required");
  if (success_threshold && !(*success_threshold > 0.0)) fail("success.threshold", "must be positive");

  const auto& o = objective;
  switch (o.kind) {
    case ObjectiveSpec::Kind::rastrigin:
      if (o.dim < 1) fail("objective.dim", "must be at least 1");
      break;
    case ObjectiveSpec::Kind::oscillatory:
      if (o.n_samples < 1) fail("objective.n_samples", "must be at least 1");
      break;
    case ObjectiveSpec::Kind::quadratic:
      if (o.dim < 1) fail("objective.dim", "must be at least 1");
      if (!(o.scale > 0.0)) fail("objective.scale", "must be positive");
      for (std::size_t i = 0; i < o.centers.size(); ++i)
        if (o.centers[i].size() != o.dim)
          fail("objective.centers[" + std::to_string(i) + "]", "length must equal objective.dim");
      break;
    case ObjectiveSpec::Kind::softmax_net: {
      const auto& d = o.dataset;
      if (d.source == DatasetSpec::Source::idx) {
        const std::pair<const char*, const std::filesystem::path*> files[] = {
            {"objective.dataset.train_images", &d.train_images},
            {"objective.dataset.train_labels", &d.train_labels},
            {"objective.dataset.test_images", &d.test_images},
            {"objective.dataset.test_labels", &d.test_labels}};
        for (const auto& [field, path] : files) {
          if (path->empty()) fail(field, "is required for source idx");
          if (!d.fallback_to_blobs && !std::filesystem::is_regular_file(*path))
            fail(field, "file not found: " + path->string());
        }
      }
      if (d.source == DatasetSpec::Source::blobs || d.fallback_to_blobs) {
        try {
          d.blobs.validate();
        } catch (const ConfigError& e) {
          throw ConfigError(std::string("objective.dataset.") + e.what());
        }
        if (d.blobs.n_test == 0) fail("objective.dataset.blobs.n_test", "test set is empty");
      }
      break;
    }
  }

  if (init.kind == InitSpec::Kind::uniform && !(init.low < init.high))
    fail("init.high", "must exceed init.low");
  if (init.kind == InitSpec::Kind::gaussian && !(init.stddev >= 0.0))
    fail("init.stddev", "must be non-negative");
  if (init.kind == InitSpec::Kind::explicit_positions && init.positions.empty())
    fail("init.positions", "required for explicit init");

  std::vector<std::string> names;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto& m = methods[i];
    const std::string prefix = "methods[" + std::to_string(i) + "].";
    if (std::find(names.begin(), names.end(), m.name) != names.end())
      fail(prefix + "name", "duplicate method name '" + m.name + "'");
    names.push_back(m.name);
    try {
      if (m.kind == MethodSpec::Kind::sgd)
        m.sgd.validate();
      else
        IsotropicCboParams{m.cbo, m.heaviside, m.heaviside_eps}.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(prefix + e.what());
    }
    if (m.kind == MethodSpec::Kind::sgd && o.kind == ObjectiveSpec::Kind::rastrigin)
      fail(prefix + "type", "sgd needs a finite-sum objective with gradients");
  }

  for (std::size_t i = 0; i < diagnostics.anchored.size(); ++i) {
    const auto& a = diagnostics.anchored[i];
    const std::string prefix = "diagnostics.anchored[" + std::to_string(i) + "].";
    if (a.particles < 1000) fail(prefix + "particles", "must be at least 1000");
    if (a.steps < 5) fail(prefix + "steps", "must be at least 5");
    if (a.dim < 1) fail(prefix + "dim", "must be at least 1");
    if (!(a.gamma > 0.0)) fail(prefix + "gamma", "must be positive");
  }
  if (diagnostics.laplace) {
    if (diagnostics.laplace->betas.empty()) fail("diagnostics.laplace.betas", "must not be empty");
    for (double b : diagnostics.laplace->betas)
      if (!(b > 0.0)) fail("diagnostics.laplace.betas", "must be positive");
    if (diagnostics.laplace->samples < 1) fail("diagnostics.laplace.samples", "must be at least 1");
  }
  if (diagnostics.certificate && diagnostics.certificate->curvature &&
      !(*diagnostics.certificate->curvature > 0.0))
    fail("diagnostics.certificate.curvature", "must be positive");
  if (diagnostics.semidiscrete && diagnostics.semidiscrete->refresh_every < 1)
    fail("diagnostics.semidiscrete.refresh_every", "must be at least 1");
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                              const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    // e.what() carries "at line L, column C".
    throw ConfigError(origin + ": " + e.what());
  }

  Node n(root, "");
  ExperimentConfig c;
  c.name = n.text("name", c.name);
  const json* obj = n.raw("objective");
  if (!obj) fail("objective", "is required");
  c.objective = parse_objective(Node(*obj, "objective"), base_dir);

  const json* methods = n.raw("methods");
  if (!methods) fail("methods", "is required");
  if (!methods->is_array()) fail("methods", "expected an array");
  for (std::size_t i = 0; i < methods->size(); ++i)
    c.methods.push_back(parse_method(Node((*methods)[i], "methods[" + std::to_string(i) + "]"), i));

  if (const json* i = n.raw("init")) c.init = parse_init(Node(*i, "init"));
  if (const json* r = n.raw("repetitions")) {
    if (r->is_number_integer() && !r->is_number_unsigned() && r->get<std::int64_t>() < 0)
      fail("repetitions", "must be at least 1");
    c.repetitions = Node::to_count(*r, "repetitions");
  }
  if (const json* s = n.raw("success")) {
    if (s->is_null()) {
      c.success_threshold.reset();
    } else {
      Node sn(*s, "success");
      const bool enabled = sn.flag("enabled", true);
      const double threshold = sn.number("threshold", 0.25);
      sn.finish();
      if (enabled)
        c.success_threshold = threshold;
      else
        c.success_threshold.reset();
    }
  }
  if (const json* s = n.raw("seeds")) {
    Node sn(*s, "seeds");
    c.seeds.base = sn.u64("base", c.seeds.base);
    c.seeds.stride = sn.u64("stride", c.seeds.stride);
    sn.finish();
  }
  c.output_dir = n.text("output_dir", c.output_dir.string());
  c.threads = n.count("threads", c.threads);
  c.record_timing = n.flag("record_timing", c.record_timing);
  if (const json* t = n.raw("training")) {
    Node tn(*t, "training");
    c.training.epochs = tn.count("epochs", c.training.epochs);
    c.training.loss_subset = tn.count("loss_subset", c.training.loss_subset);
    tn.finish();
  }
  if (const json* d = n.raw("diagnostics")) c.diagnostics = parse_diagnostics(Node(*d, "diagnostics"));
  n.finish();

  // Isotropic and cbo runs share the objective dimension; the explicit init must match it.
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot read config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), path.parent_path());
}

namespace {

json to_json(const CboParams& p) {
  json j;
  j["lambda"] = p.lambda;
  j["sigma"] = p.sigma;
  j["beta"] = p.beta;
  j["gamma"] = p.gamma;
  j["n_particles"] = p.n_particles;
  j["batch_particles"] = p.batch_particles;
  j["batch_data"] = p.batch_data ? json(*p.batch_data) : json("full");
  j["update_mode"] = to_string(p.update_mode);
  j["consensus_mode"] = to_string(p.consensus_mode);
  j["scheme"] = to_string(p.scheme);
  j["sigma_schedule"] = to_string(p.sigma_schedule);
  j["sigma_rate"] = p.sigma_rate;
  j["beta_schedule"] = to_string(p.beta_schedule);
  j["beta_rate"] = p.beta_rate;
  // JSON has no infinity; a huge cap means "none".
  j["beta_max"] = std::isfinite(p.beta_max) ? p.beta_max : std::numeric_limits<double>::max();
  j["stop_on_criterion"] = p.stop_on_criterion;
  j["epsilon_stop"] = p.epsilon_stop;
  j["max_iters"] = p.max_iters;
  j["trace_every"] = p.trace_every;
  j["stall"] = {{"enabled", p.stall.enabled},
                {"epsilon_stall", p.stall.epsilon_stall},
                {"consecutive", p.stall.consecutive},
                {"kick_sigma", p.stall.kick_sigma},
                {"max_restarts", p.stall.max_restarts},
                {"min_rel_decrease", p.stall.min_rel_decrease},
                {"patience", p.stall.patience}};
  return j;
}

}  // namespace

std::string describe_config(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  const auto& o = c.objective;
  json obj{{"type", name_of(o.kind, kObjectives)}};
  switch (o.kind) {
    case ObjectiveSpec::Kind::rastrigin:
      obj["dim"] = o.dim;
      obj["shift"] = o.shift;
      obj["lift"] = o.lift;
      break;
    case ObjectiveSpec::Kind::oscillatory:
      obj["n_samples"] = o.n_samples;
      obj["seed"] = o.seed;
      break;
    case ObjectiveSpec::Kind::quadratic:
      obj["dim"] = o.dim;
      obj["centers"] = o.centers;
      obj["scale"] = o.scale;
      break;
    case ObjectiveSpec::Kind::softmax_net: {
      const auto& d = o.dataset;
      json ds{{"source", d.source == DatasetSpec::Source::idx ? "idx" : "blobs"}};
      if (d.source == DatasetSpec::Source::idx) {
        ds["train_images"] = d.train_images.string();
        ds["train_labels"] = d.train_labels.string();
        ds["test_images"] = d.test_images.string();
        ds["test_labels"] = d.test_labels.string();
        ds["train_limit"] = d.train_limit;
        ds["test_limit"] = d.test_limit;
        ds["fallback_to_blobs"] = d.fallback_to_blobs;
      }
      ds["blobs"] = {{"n_train", d.blobs.n_train},     {"n_test", d.blobs.n_test},
                     {"input_dim", d.blobs.input_dim}, {"n_classes", d.blobs.n_classes},
                     {"spread", d.blobs.spread},       {"seed", d.blobs.seed}};
      obj["dataset"] = ds;
      break;
    }
  }
  j["objective"] = obj;

  j["methods"] = json::array();
  for (const auto& m : c.methods) {
    json mj;
    if (m.kind == MethodSpec::Kind::sgd) {
      mj = {{"gamma", m.sgd.gamma}, {"batch", m.sgd.batch}, {"max_iters", m.sgd.max_iters}};
    } else {
      mj = to_json(m.cbo);
      if (m.kind == MethodSpec::Kind::isotropic_cbo) {
        mj["heaviside"] = m.heaviside == Heaviside::off ? "off" : "logistic";
        mj["heaviside_eps"] = m.heaviside_eps;
      }
    }
    mj["name"] = m.name;
    mj["type"] = name_of(m.kind, kMethods);
    j["methods"].push_back(mj);
  }

  json init;
  switch (c.init.kind) {
    case InitSpec::Kind::uniform:
      init = {{"type", "uniform"}, {"low", c.init.low}, {"high", c.init.high}};
      break;
    case InitSpec::Kind::gaussian:
      init = {{"type", "gaussian"}, {"mean", c.init.mean}, {"stddev", c.init.stddev}};
      break;
    case InitSpec::Kind::explicit_positions:
      init = {{"type", "explicit"}, {"positions", json::array({c.init.positions})}};
      break;
  }
  j["init"] = init;
  j["repetitions"] = c.repetitions;
  j["success"] = c.success_threshold ? json{{"enabled", true}, {"threshold", *c.success_threshold}}
                                     : json{{"enabled", false}};
  j["seeds"] = {{"base", c.seeds.base}, {"stride", c.seeds.stride}};
  j["output_dir"] = c.output_dir.string();
  j["threads"] = c.threads;
  j["record_timing"] = c.record_timing;
  j["training"] = {{"epochs", c.training.epochs}, {"loss_subset", c.training.loss_subset}};

  json diag = json::object();
  if (!c.diagnostics.anchored.empty()) {
    diag["anchored"] = json::array();
    for (const auto& a : c.diagnostics.anchored)
      diag["anchored"].push_back({{"scheme", name_of(a.scheme, kAnchored)},
                                  {"lambda", a.lambda},
                                  {"sigma", a.sigma},
                                  {"gamma", a.gamma},
                                  {"dim", a.dim},
                                  {"particles", a.particles},
                                  {"steps", a.steps}});
  }
  if (const auto& cert = c.diagnostics.certificate) {
    diag["certificate"] = {{"loss_min", cert->loss_min}};
    if (cert->curvature) diag["certificate"]["curvature"] = *cert->curvature;
  }
  if (const auto& l = c.diagnostics.laplace)
    diag["laplace"] = {{"betas", l->betas}, {"samples", l->samples}};
  if (const auto& s = c.diagnostics.semidiscrete)
    diag["semidiscrete"] = {{"refresh_every", s->refresh_every}};
  j["diagnostics"] = diag;
  return j.dump(2);
}

Dataset load_dataset(const DatasetSpec& spec) {
  Dataset out;
  bool use_blobs = spec.source == DatasetSpec::Source::blobs;
  if (!use_blobs && spec.fallback_to_blobs) {
    for (const auto* p : {&spec.train_images, &spec.train_labels, &spec.test_images, &spec.test_labels})
      if (!std::filesystem::is_regular_file(*p)) use_blobs = true;
  }
  if (use_blobs) {
    auto blobs = make_blobs(spec.blobs);
    out.train = std::make_shared<const LabeledData>(std::move(blobs.train));
    out.test = std::make_shared<const LabeledData>(std::move(blobs.test));
    out.source = "blobs";
  } else {
    auto train = load_idx(spec.train_images, spec.train_labels, spec.train_limit);
    auto test = load_idx(spec.test_images, spec.test_labels, spec.test_limit);
    if (train.data.input_dim != test.data.input_dim)
      throw ConsistencyError("train and test images differ in size");
    out.train = std::make_shared<const LabeledData>(std::move(train.data));
    out.test = std::make_shared<const LabeledData>(std::move(test.data));
    out.source = "idx";
  }
  if (out.test->size() == 0) throw ConfigError("objective.dataset: test set is empty");
  if (out.train->size() == 0) throw ConfigError("objective.dataset: training set is empty");
  return out;
}

std::unique_ptr<Objective> build_objective(const ObjectiveSpec& spec, Dataset* dataset) {
  switch (spec.kind) {
    case ObjectiveSpec::Kind::rastrigin:
      return std::make_unique<Rastrigin>(spec.dim, spec.shift, spec.lift);
    case ObjectiveSpec::Kind::oscillatory:
      return std::make_unique<Oscillatory>(spec.n_samples, spec.seed);
    case ObjectiveSpec::Kind::quadratic: {
      std::vector<double> flat;
      if (spec.centers.empty()) flat.assign(spec.dim, 0.0);
      for (const auto& c : spec.centers) flat.insert(flat.end(), c.begin(), c.end());
      return std::make_unique<Quadratic>(spec.dim, std::move(flat), spec.scale);
    }
    case ObjectiveSpec::Kind::softmax_net: {
      Dataset data = load_dataset(spec.dataset);
      auto net = std::make_unique<SoftmaxNet>(data.train);
      if (dataset) *dataset = std::move(data);
      return net;
    }
  }
  throw ConfigError("objective.type: unsupported");
}

}  // namespace cbo::harness
