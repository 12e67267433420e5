#include "cli.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "artifacts.hpp"
#include "json.hpp"
#include "mochlab/error.hpp"
#include "mochlab/estimates.hpp"
#include "mochlab/io.hpp"
#include "mochlab/random_fields.hpp"

namespace mochlab::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void raise(int code, std::string message) { throw CliError{code, std::move(message)}; }

enum class Type { Int, Double, Bool, String, IntList, IntOrAuto };

struct KeySpec {
  std::string name;
  Type type;
  json fallback;
  std::string help;
};

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

const std::vector<KeySpec>& global_keys() {
  static const std::vector<KeySpec> keys{
      {"out_dir", Type::String, ".", "Directory for all outputs (created if missing)"},
      {"threads", Type::Int, 1, "Worker threads for sweep members"},
      {"svg", Type::Bool, false, "Also write SVG plots"},
      {"seed", Type::Int, 1, "Base seed for random fields"},
  };
  return keys;
}

const std::map<std::string, std::vector<KeySpec>>& command_keys() {
  static const std::map<std::string, std::vector<KeySpec>> keys{
      {"lp-check",
       {{"points", Type::Int, 4096, "Grid points (power of two)"},
        {"fields", Type::Int, 200, "Random fields for the reconstruction check"}}},
      {"norms",
       {{"input", Type::String, nullptr, "Field snapshot to analyse"},
        {"refined", Type::Bool, true, "Newton-polished block maxima (--no-refined for sampled)"}}},
      {"gen-init",
       {{"N", Type::Int, 6, "Frequency parameter N"},
        {"corrector", Type::String, "regular", "Corrector symbol: regular or literal"},
        {"points", Type::IntOrAuto, "auto", "Grid points or 'auto' (2^{N+8})"}}},
      {"solve",
       {{"init", Type::String, nullptr, "Initial field snapshot"},
        {"lambda", Type::Double, 1.0, "Parameter lambda (nonzero)"},
        {"dt", Type::Double, 1e-4, "Time step"},
        {"T", Type::Double, 0.1, "Horizon"},
        {"dealias", Type::Bool, true, "2/3-rule dealiasing (--no-dealias to disable)"},
        {"record_every", Type::Int, 10, "Norm-series stride in steps"},
        {"flow", Type::Bool, false, "Integrate the flow map alongside"},
        {"blowup_ceiling", Type::Double, 1e6, "Halt once ||gamma||_inf exceeds this"}}},
      {"estimates",
       {{"ensemble", Type::Int, 100, "Ensemble size"},
        {"family", Type::String, "all", "Inequalities to report: products, commutators or all"},
        {"points", Type::Int, 1024, "Grid points (power of two)"},
        {"max_mode", Type::Int, 64, "Highest random mode"},
        {"decay", Type::Double, 1.0, "Coefficient decay exponent"},
        {"lambda", Type::Double, 1.0, "Parameter lambda (nonzero)"}}},
      {"sweep-212",
       {{"N", Type::IntList, json::array({6, 7, 8, 9, 10, 11, 12}), "Frequency parameters"},
        {"corrector", Type::String, "regular", "Corrector symbol: regular or literal"}}},
      {"inflate",
       {{"N", Type::IntList, json::array({6, 8, 10}), "Frequency parameters"},
        {"lambda", Type::Double, 1.0, "Parameter lambda (nonzero)"},
        {"dt", Type::Double, 1e-4, "Base time step (used for N <= 8, halved per N above)"},
        {"samples", Type::Int, 100, "Norm samples over [0, T]"},
        {"corrector", Type::String, "regular", "Corrector symbol: regular or literal"}}},
  };
  return keys;
}

const KeySpec* find_key(const std::string& command, const std::string& key) {
  for (const auto& k : global_keys())
    if (k.name == key) return &k;
  for (const auto& k : command_keys().at(command))
    if (k.name == key) return &k;
  return nullptr;
}

// Converts a config-file value, or raises kOutOfRange on a type mismatch.
json coerce_json(const KeySpec& spec, const json& v) {
  auto bad = [&]() -> json { raise(kOutOfRange, "invalid type for key '" + spec.name + "'"); };
  switch (spec.type) {
    case Type::Int:
      if (v.is_number_integer()) return v;
      if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())
        return static_cast<long long>(v.get<double>());
      return bad();
    case Type::Double:
      if (v.is_number()) return v.get<double>();
      return bad();
    case Type::Bool:
      if (v.is_boolean()) return v;
      return bad();
    case Type::String:
      if (v.is_string()) return v;
      return bad();
    case Type::IntOrAuto:
      if (v.is_number_integer() || (v.is_string() && v.get<std::string>() == "auto")) return v;
      return bad();
    case Type::IntList:
      if (v.is_number_integer()) return json::array({v});
      if (!v.is_array()) return bad();
      for (const auto& e : v)
        if (!e.is_number_integer()) return bad();
      return v;
  }
  return bad();
}

long long parse_int(const std::string& flag, const std::string& s) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  raise(kUsage, "invalid value '" + s + "' for " + flag);
}

double parse_double(const std::string& flag, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  raise(kUsage, "invalid value '" + s + "' for " + flag);
}

// Command-line storage for one subcommand's keys.
struct FlagBinding {
  const KeySpec* spec;
  CLI::Option* option = nullptr;
  std::string scalar;
  std::vector<std::string> list;
};

struct CommandFlags {
  CLI::App* app = nullptr;
  std::vector<std::unique_ptr<FlagBinding>> bindings;
};

void bind(CLI::App* app, std::vector<std::unique_ptr<FlagBinding>>& out, const KeySpec& k) {
  auto b = std::make_unique<FlagBinding>();
  b->spec = &k;
  const std::string flag = flag_name(k.name);
  if (k.type == Type::Bool) {
    const bool default_on = k.fallback.get<bool>();
    b->option = app->add_flag(default_on ? "--no-" + flag.substr(2) : flag, k.help);
  } else if (k.type == Type::IntList) {
    b->option = app->add_option(flag, b->list, k.help)->delimiter(',');
  } else {
    b->option = app->add_option(flag, b->scalar, k.help);
  }
  out.push_back(std::move(b));
}

json flag_value(const FlagBinding& b) {
  const auto& k = *b.spec;
  const std::string flag = flag_name(k.name);
  switch (k.type) {
    case Type::Int:
      return parse_int(flag, b.scalar);
    case Type::Double:
      return parse_double(flag, b.scalar);
    case Type::Bool:
      return !k.fallback.get<bool>();
    case Type::String:
      return b.scalar;
    case Type::IntOrAuto:
      if (b.scalar == "auto") return "auto";
      return parse_int(flag, b.scalar);
    case Type::IntList: {
      json a = json::array();
      for (const auto& s : b.list) a.push_back(parse_int(flag, s));
      return a;
    }
  }
  return nullptr;
}

json load_config(const std::string& path) {
  if (!fs::exists(path)) raise(kNotFound, "input not found: " + path);
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    raise(kNotFound, "input not found: " + path + " (" + e.what() + ")");
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    raise(kConfigParse, std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) raise(kConfigParse, "config parse error: top level must be a JSON object");
  // A manifest from an earlier run replays its config echo.
  if (j.contains("tool") && j.contains("config") && j.contains("files")) {
    if (!j["config"].is_object()) raise(kConfigParse, "config parse error: manifest config must be an object");
    return j["config"];
  }
  return j;
}

// ----------------------------------------------------------------------------
// Validation helpers.

void check(bool ok, const std::string& message) {
  if (!ok) raise(kOutOfRange, message);
}

void check_lambda(const json& cfg) {
  const double l = cfg.at("lambda").get<double>();
  check(std::isfinite(l) && l != 0.0, "λ must be nonzero (got " + format_double(l) + ")");
}

void check_points(long long n, const std::string& key) {
  check(n >= 64 && n <= (1ll << 26) && std::has_single_bit(static_cast<unsigned long long>(n)),
        key + " must be a power of two in [64, 2^26] (got " + std::to_string(n) + ")");
}

void check_N(long long N) {
  check(N >= 1 && N <= 18, "N must lie in [1, 18] (got " + std::to_string(N) + ")");
}

CorrectorMode corrector_of(const json& cfg) {
  try {
    return parse_corrector_mode(cfg.at("corrector").get<std::string>());
  } catch (const Error& e) {
    raise(kOutOfRange, e.what());
  }
}

void validate(const std::string& command, const json& cfg) {
  check(cfg.at("threads").get<long long>() >= 1 && cfg.at("threads").get<long long>() <= 256,
        "threads must lie in [1, 256]");
  check(cfg.at("seed").get<long long>() >= 0, "seed must be non-negative");
  for (const auto& k : command_keys().at(command))
    if (cfg.at(k.name).is_null()) raise(kUsage, "missing required option " + flag_name(k.name));

  if (command == "lp-check") {
    check_points(cfg.at("points").get<long long>(), "points");
    check(cfg.at("fields").get<long long>() >= 1, "fields must be at least 1");
  } else if (command == "gen-init") {
    check_N(cfg.at("N").get<long long>());
    corrector_of(cfg);
    if (cfg.at("points").is_number()) check_points(cfg.at("points").get<long long>(), "points");
  } else if (command == "solve") {
    check_lambda(cfg);
    const double dt = cfg.at("dt").get<double>(), T = cfg.at("T").get<double>();
    check(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    check(std::isfinite(T) && T > 0.0, "T must be positive");
    check(dt < T, "dt must be smaller than T");
    check(T / dt <= 1e8, "T / dt exceeds 1e8 steps");
    check(cfg.at("record_every").get<long long>() >= 1, "record_every must be at least 1");
    check(cfg.at("blowup_ceiling").get<double>() > 0.0, "blowup_ceiling must be positive");
  } else if (command == "estimates") {
    check_lambda(cfg);
    const long long n = cfg.at("points").get<long long>();
    check_points(n, "points");
    check(cfg.at("ensemble").get<long long>() >= 1, "ensemble must be at least 1");
    const auto fam = cfg.at("family").get<std::string>();
    check(fam == "products" || fam == "commutators" || fam == "all",
          "family must be products, commutators or all (got '" + fam + "')");
    const long long K = cfg.at("max_mode").get<long long>();
    check(K >= 1 && 8 * K < n, "max_mode must lie in [1, points/8)");
    check(std::isfinite(cfg.at("decay").get<double>()), "decay must be finite");
  } else if (command == "sweep-212") {
    check(!cfg.at("N").empty(), "N list must not be empty");
    for (const auto& N : cfg.at("N")) check_N(N.get<long long>());
    corrector_of(cfg);
  } else if (command == "inflate") {
    check_lambda(cfg);
    check(!cfg.at("N").empty(), "N list must not be empty");
    for (const auto& N : cfg.at("N")) check_N(N.get<long long>());
    const double dt = cfg.at("dt").get<double>();
    check(std::isfinite(dt) && dt > 0.0 && dt < 0.01, "dt must lie in (0, 0.01)");
    check(cfg.at("samples").get<long long>() >= 1, "samples must be at least 1");
    corrector_of(cfg);
  }
}

// ----------------------------------------------------------------------------

// Runs f(0..n-1) on up to `threads` workers; results keep index order.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, int threads, F f) {
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < n; i += static_cast<std::size_t>(threads)) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1 || n <= 1) {
    threads = 1;
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, static_cast<std::size_t>(t));
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

RealField load_snapshot(const std::string& path) {
  if (!fs::exists(path)) raise(kNotFound, "input not found: " + path);
  try {
    return read_snapshot(path);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) raise(kNotFound, "input not found: " + path);
    raise(kConfigParse, "malformed snapshot " + path + ": " + e.what());
  }
}

struct Context {
  std::string command;
  json cfg;
  ArtifactSet* out;
  std::ostream* log;
  bool svg() const { return cfg.at("svg").get<bool>(); }
  int threads() const { return static_cast<int>(cfg.at("threads").get<long long>()); }
  std::uint64_t seed() const { return static_cast<std::uint64_t>(cfg.at("seed").get<long long>()); }
};

int cmd_lp_check(Context& c) {
  const auto n = static_cast<std::size_t>(c.cfg.at("points").get<long long>());
  const auto fields = static_cast<std::size_t>(c.cfg.at("fields").get<long long>());
  const DyadicPartition part(Grid::make(n));
  const Grid& g = part.grid();

  double coverage = 0.0, disjoint = 0.0;
  for (std::size_t k = 0; k < g.num_modes(); ++k) {
    double s = 0.0;
    for (int j = -1; j <= part.j_max(); ++j) {
      s += part.multiplier(j, k);
      for (int jj = j + 2; jj <= part.j_max(); ++jj)
        disjoint = std::max(disjoint, std::abs(part.multiplier(j, k) * part.multiplier(jj, k)));
    }
    coverage = std::max(coverage, std::abs(s - 1.0));
  }

  double recon = 0.0;
  for (std::size_t i = 0; i < fields; ++i) {
    const auto u = random_bandlimited(g, c.seed() + i, g.nyquist_index() - 1);
    RealField sum(g);
    for (const auto& b : part.blocks(u)) sum += b;
    recon = std::max(recon, (sum - u).sup_norm() / u.sup_norm());
  }

  double pure = 0.0;
  for (int j = 1; j <= part.j_max(); ++j) {
    for (double f : {1.0, 1.5}) {
      const double k = f * std::ldexp(1.0, j);
      if (k >= static_cast<double>(g.nyquist_index())) continue;
      const auto u = RealField::from_function(g, [k](double x) { return std::cos(k * x); });
      pure = std::max(pure, std::abs(bernstein_check(part, u, j, 1).ratio - f));
    }
  }

  std::size_t outside = 0, tried = 0;
  for (int j = 1; j <= part.j_max() - 1; ++j) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto r = bernstein_check(part, random_annulus_field(part, j, c.seed() + 1000 * j + s), j, 2);
      ++tried;
      if (!r.within()) ++outside;
    }
  }

  struct Row {
    std::string name;
    double value, tol;
  };
  const std::vector<Row> rows{{"partition_coverage", coverage, 1e-12},
                              {"block_disjointness", disjoint, 1e-12},
                              {"reconstruction_relative", recon, 1e-10},
                              {"bernstein_pure_mode", pure, 1e-12},
                              {"bernstein_annulus_outside_window", static_cast<double>(outside), 0.0}};
  std::string csv = "check,value,tolerance,pass\n";
  bool ok = true;
  for (const auto& r : rows) {
    const bool pass = r.value <= r.tol;
    ok = ok && pass;
    csv += r.name + ',' + format_double(r.value) + ',' + format_double(r.tol) + ',' + (pass ? "1" : "0") + '\n';
    *c.log << r.name << " = " << format_double(r.value) << (pass ? "  ok" : "  FAILED") << '\n';
  }
  *c.log << "bernstein annulus fields checked: " << tried << '\n';
  c.out->write("lp_check.csv", csv);
  if (!ok) raise(kCheckFailed, "lp-check failed");
  return kOk;
}

std::string quantity_csv(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out = "quantity,value\n";
  for (const auto& [k, v] : rows) out += k + ',' + v + '\n';
  return out;
}

// "quantity,value" rows as a flat JSON object; numeric values stay numbers.
json quantity_json(const std::string& csv) {
  json out = json::object();
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const std::string key = line.substr(0, comma), value = line.substr(comma + 1);
    try {
      std::size_t pos = 0;
      const double v = std::stod(value, &pos);
      out[key] = pos == value.size() ? json(v) : json(value);
    } catch (const std::exception&) {
      out[key] = value;
    }
  }
  return out;
}

int cmd_norms(Context& c) {
  const auto u = load_snapshot(c.cfg.at("input").get<std::string>());
  const DyadicPartition part(u.grid());
  const bool refined = c.cfg.at("refined").get<bool>();
  const auto prof = refined ? norm_profile_refined(part, u) : norm_profile(part, u);
  const double linf = refined ? refined_sup_norm(to_spectral(u)) : u.sup_norm();
  const auto w = prof.weighted();
  c.out->write("norms_profile.csv", prof.to_csv());
  c.out->write("norms.csv", quantity_csv({{"grid_size", std::to_string(u.size())},
                                          {"B0inf1", format_double(prof.b0_inf_1())},
                                          {"B0infinf1_weighted", format_double(w.value)},
                                          {"weighted_argmax_j", w.argmax_j ? std::to_string(*w.argmax_j) : std::string("none")},
                                          {"Linf", format_double(linf)}}));
  if (c.svg()) {
    Series s{"block sup norm", {}, {}};
    for (std::size_t i = 0; i < prof.j_values.size(); ++i) {
      s.x.push_back(prof.j_values[i]);
      s.y.push_back(prof.block_sup_norms[i]);
    }
    c.out->write("norms_profile.svg", render_svg({"Littlewood-Paley profile", "j", "||Delta_j u||_inf"}, {s}));
  }
  *c.log << "B0inf1 = " << format_double(prof.b0_inf_1()) << '\n';
  return kOk;
}

int cmd_gen_init(Context& c) {
  const int N = static_cast<int>(c.cfg.at("N").get<long long>());
  const auto& pts = c.cfg.at("points");
  const Grid g = pts.is_string() ? inflation_grid(N) : Grid::make(static_cast<std::size_t>(pts.get<long long>()));
  const DyadicPartition part(g);
  const auto d = build_gamma0(part, N, corrector_of(c.cfg));
  c.out->write("gamma0.snap", encode_snapshot(d.gamma0));
  c.out->write("gamma0.csv", field_to_csv(d.gamma0));
  c.out->write("init_norms.csv",
               quantity_csv({{"N", std::to_string(N)},
                             {"grid_size", std::to_string(g.size())},
                             {"corrector", to_string(d.corrector)},
                             {"u0_B0inf1", format_double(d.norm_b0_inf_1)},
                             {"u0_B0infinf1_weighted", format_double(d.norm_weighted)},
                             {"u0sq_B0inf1", format_double(d.norm_square_b0_inf_1)},
                             {"defect_ratio", format_double(d.norm_square_b0_inf_1 /
                                                            (d.norm_b0_inf_1 * d.norm_b0_inf_1))},
                             {"below_asymptotic_range", d.below_asymptotic_range ? "1" : "0"}}));
  if (c.svg()) {
    Series s{"gamma0", {}, {}};
    const std::size_t stride = std::max<std::size_t>(1, g.size() / 4096);
    for (std::size_t i = 0; i < g.size(); i += stride) {
      s.x.push_back(g.node(i));
      s.y.push_back(d.gamma0[i]);
    }
    c.out->write("gamma0.svg", render_svg({"Initial datum N = " + std::to_string(N), "x", "gamma0"}, {s}));
  }
  if (d.below_asymptotic_range) *c.log << "note: N <= 10 lies below the asymptotic range of the result\n";
  *c.log << "grid " << g.size() << ", ||u0||_B0inf1 = " << format_double(d.norm_b0_inf_1) << '\n';
  return kOk;
}

int cmd_solve(Context& c) {
  const auto u0 = load_snapshot(c.cfg.at("init").get<std::string>());
  const DyadicPartition part(u0.grid());
  MochParams p;
  p.lambda = c.cfg.at("lambda").get<double>();
  p.dt = c.cfg.at("dt").get<double>();
  p.t_final = c.cfg.at("T").get<double>();
  p.dealias_on = c.cfg.at("dealias").get<bool>();
  p.record_every = static_cast<int>(c.cfg.at("record_every").get<long long>());
  p.blowup_ceiling = c.cfg.at("blowup_ceiling").get<double>();
  std::optional<FlowOptions> flow;
  if (c.cfg.at("flow").get<bool>()) flow.emplace();
  const auto tr = solve(u0, part, p, flow);
  c.out->write("norm_series.csv", tr.norm_series_csv());
  c.out->write("final.snap", encode_snapshot(tr.states.back()));
  c.out->write("final.csv", field_to_csv(tr.states.back()));
  if (tr.flow) {
    std::string csv = "t,min_y_xi,max_y_xi,max_jacobian_rel_error\n";
    for (const auto& s : tr.flow->samples)
      csv += format_double(s.t) + ',' + format_double(s.min_y_xi) + ',' + format_double(s.max_y_xi) + ',' +
             format_double(s.max_jacobian_rel_error) + '\n';
    c.out->write("flow.csv", csv);
  }
  if (c.svg()) {
    Series a{"B0inf1", {}, {}}, b{"Linf", {}, {}};
    for (const auto& s : tr.norm_series) {
      a.x.push_back(s.t);
      a.y.push_back(s.b0_inf_1);
      b.x.push_back(s.t);
      b.y.push_back(s.linf);
    }
    c.out->write("norm_series.svg", render_svg({"Norm series", "t", "norm"}, {a, b}));
  }
  *c.log << "steps " << tr.steps_taken << ", t = " << format_double(tr.last_valid_time) << '\n';
  if (tr.truncated) raise(kNumerical, "solver halted: " + tr.truncation_reason);
  return kOk;
}

bool in_family(const std::string& family, const std::string& id) {
  if (family == "all") return true;
  const bool commutator = id.find("commutator") != std::string::npos;
  return family == "commutators" ? commutator : !commutator;
}

int cmd_estimates(Context& c) {
  EnsembleSpec spec;
  spec.grid_size = static_cast<std::size_t>(c.cfg.at("points").get<long long>());
  spec.max_mode = static_cast<std::size_t>(c.cfg.at("max_mode").get<long long>());
  spec.decay = c.cfg.at("decay").get<double>();
  spec.members = static_cast<std::size_t>(c.cfg.at("ensemble").get<long long>());
  spec.lambda = c.cfg.at("lambda").get<double>();
  spec.first_seed = c.seed();
  const auto family = c.cfg.at("family").get<std::string>();
  const auto full = run_ensemble(spec);

  EnsembleSummary e = full;
  e.lemma_ids.clear();
  e.max_ratio.clear();
  e.reports.clear();
  for (std::size_t i = 0; i < full.lemma_ids.size(); ++i) {
    if (!in_family(family, full.lemma_ids[i])) continue;
    e.lemma_ids.push_back(full.lemma_ids[i]);
    e.max_ratio.push_back(full.max_ratio[i]);
  }
  for (const auto& r : full.reports)
    if (in_family(family, r.lemma_id)) e.reports.push_back(r);

  c.out->write("ensemble.csv", e.to_csv());
  std::string csv = "lemma_id,max_ratio\n";
  json summary = {{"ensemble", spec.members}, {"first_seed", spec.first_seed}, {"all_finite", e.all_finite}};
  for (std::size_t i = 0; i < e.lemma_ids.size(); ++i) {
    csv += e.lemma_ids[i] + ',' + format_double(e.max_ratio[i]) + '\n';
    summary["max_ratio"][e.lemma_ids[i]] = e.max_ratio[i];
    *c.log << e.lemma_ids[i] << " max ratio " << format_double(e.max_ratio[i]) << '\n';
  }
  c.out->write("ensemble_summary.csv", csv);
  c.out->write("summary.json", summary.dump(2) + "\n");
  if (!e.all_finite) raise(kNumerical, "non-finite estimate ratio in ensemble");
  return kOk;
}

int cmd_sweep_212(Context& c) {
  const auto Ns = c.cfg.at("N").get<std::vector<int>>();
  const auto mode = corrector_of(c.cfg);
  auto rows = parallel_map<ScalingRow>(Ns.size(), c.threads(), [&](std::size_t i) { return scaling_row(Ns[i], mode); });
  const auto s = summarize_scaling(std::move(rows));
  c.out->write("sweep_212.csv", s.to_csv());
  c.out->write("sweep_212_fit.csv", s.fit_csv());
  c.out->write("summary.json", quantity_json(s.fit_csv()).dump(2) + "\n");
  if (c.svg()) {
    Series a{"||u0||_B0inf1", {}, {}}, w{"||u0||_weighted", {}, {}}, b{"||u0^2||_B0inf1", {}, {}};
    for (const auto& r : s.rows) {
      a.x.push_back(r.N), a.y.push_back(r.norm_b0_inf_1);
      w.x.push_back(r.N), w.y.push_back(r.norm_weighted);
      b.x.push_back(r.N), b.y.push_back(r.norm_square_b0_inf_1);
    }
    c.out->write("sweep_212.svg", render_svg({"Initial-datum scalings", "N", "norm", true, true}, {a, w, b}));
  }
  *c.log << "exponent of ||u0^2|| = " << format_double(s.exponent_square) << '\n';
  return kOk;
}

int cmd_inflate(Context& c) {
  const auto Ns = c.cfg.at("N").get<std::vector<int>>();
  InflationPolicy pol;
  pol.lambda = c.cfg.at("lambda").get<double>();
  pol.base_dt = c.cfg.at("dt").get<double>();
  pol.samples = static_cast<int>(c.cfg.at("samples").get<long long>());
  pol.corrector = corrector_of(c.cfg);
  auto reports =
      parallel_map<InflationReport>(Ns.size(), c.threads(), [&](std::size_t i) { return inflation_run(Ns[i], pol); });
  const auto sweep = summarize_inflation(std::move(reports));
  c.out->write("inflation.csv", sweep.to_csv());
  c.out->write("inflation_summary.csv", sweep.summary_csv());
  c.out->write("summary.json", quantity_json(sweep.summary_csv()).dump(2) + "\n");
  std::vector<Series> plot;
  for (const auto& r : sweep.reports) {
    std::string csv = "t,B0inf1,B0infinf1_weighted,Linf\n";
    Series s{"N = " + std::to_string(r.N), {}, {}};
    for (const auto& n : r.norm_series) {
      csv += format_double(n.t) + ',' + format_double(n.b0_inf_1) + ',' + format_double(n.weighted) + ',' +
             format_double(n.linf) + '\n';
      s.x.push_back(n.t);
      s.y.push_back(n.b0_inf_1);
    }
    c.out->write("inflation_series_N" + std::to_string(r.N) + ".csv", csv);
    plot.push_back(std::move(s));
    *c.log << "N = " << r.N << ": amplification " << format_double(r.amplification)
           << (r.truncated ? " (truncated: " + r.truncation_reason + ")" : std::string()) << '\n';
  }
  if (c.svg()) c.out->write("inflation.svg", render_svg({"||gamma(t)||_B0inf1", "t", "norm"}, plot));
  return kOk;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::GridMismatch:
    case ErrorKind::Resolution:
      return kOutOfRange;
    case ErrorKind::NonFinite:
    case ErrorKind::BlowUp:
    case ErrorKind::Diffeomorphism:
      return kNumerical;
    case ErrorKind::Io:
      return kUnwritable;
    case ErrorKind::Format:
      return kConfigParse;
  }
  return kNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical lab for the modified Camassa-Holm equation in Besov spaces", "mochlab"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  std::vector<std::unique_ptr<FlagBinding>> globals;
  for (const auto& k : global_keys()) bind(&app, globals, k);

  std::map<std::string, CommandFlags> subs;
  for (const auto& [name, keys] : command_keys()) {
    auto& cf = subs[name];
    cf.app = app.add_subcommand(name);
    for (const auto& k : keys) bind(cf.app, cf.bindings, k);
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (args.size() >= 2 && args[1].rfind("-", 0) != 0 && !subs.count(args[1])) {
    err << "error: unknown subcommand '" << args[1] << "'\n";
    return kUsage;
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  const auto t_start = std::chrono::steady_clock::now();
  try {
    json file;
    if (!config_path.empty()) file = load_config(config_path);

    std::string command;
    for (const auto& [name, cf] : subs)
      if (cf.app->parsed()) command = name;
    if (file.contains("command")) {
      if (!file["command"].is_string()) raise(kOutOfRange, "invalid type for key 'command'");
      const auto fc = file["command"].get<std::string>();
      if (!subs.count(fc)) raise(kUsage, "unknown subcommand '" + fc + "' in config");
      if (!command.empty() && command != fc)
        raise(kUsage, "config command '" + fc + "' does not match subcommand '" + command + "'");
      command = fc;
    }
    if (command.empty()) raise(kUsage, "no subcommand given (try --help)");

    json cfg;
    cfg["command"] = command;
    for (const auto& k : global_keys()) cfg[k.name] = k.fallback;
    for (const auto& k : command_keys().at(command)) cfg[k.name] = k.fallback;
    for (const auto& [key, value] : file.items()) {
      if (key == "command") continue;
      const KeySpec* spec = find_key(command, key);
      if (!spec) raise(kUnknownKey, "unknown key '" + key + "' for command '" + command + "'");
      cfg[key] = coerce_json(*spec, value);
    }
    for (const auto& b : globals)
      if (b->option->count() > 0) cfg[b->spec->name] = flag_value(*b);
    for (const auto& [name, cf] : subs) {
      if (!cf.app->parsed()) continue;
      for (const auto& b : cf.bindings)
        if (b->option->count() > 0) cfg[b->spec->name] = flag_value(*b);
    }
    validate(command, cfg);

    const fs::path dir = cfg.at("out_dir").get<std::string>();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) raise(kUnwritable, "output directory not writable: " + dir.string());
    ArtifactSet artifacts(dir);
    Context ctx{command, cfg, &artifacts, &out};

    int code = kOk;
    std::optional<CliError> deferred;
    try {
      if (command == "lp-check") code = cmd_lp_check(ctx);
      else if (command == "norms") code = cmd_norms(ctx);
      else if (command == "gen-init") code = cmd_gen_init(ctx);
      else if (command == "solve") code = cmd_solve(ctx);
      else if (command == "estimates") code = cmd_estimates(ctx);
      else if (command == "sweep-212") code = cmd_sweep_212(ctx);
      else if (command == "inflate") code = cmd_inflate(ctx);
    } catch (const CliError& e) {
      // Checks that fail after writing their tables still get a manifest.
      if (e.code != kCheckFailed && e.code != kNumerical) throw;
      deferred = e;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    artifacts.write_manifest(cfg, wall);
    if (deferred) throw *deferred;
    return code;
  } catch (const CliError& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const Error& e) {
    const int code = exit_code_for(e);
    if (code == kUnwritable)
      err << "error: output not writable: " << e.what() << '\n';
    else
      err << "error: " << e.what() << '\n';
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace mochlab::cli
