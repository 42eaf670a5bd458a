#include "stabletp/cli.hpp"

#include "stabletp/acceptance.hpp"
#include "stabletp/asymptotics.hpp"
#include "stabletp/errors.hpp"
#include "stabletp/factorization.hpp"
#include "stabletp/kernels.hpp"
#include "stabletp/shape.hpp"
#include "stabletp/stable.hpp"
#include "stabletp/tp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace stabletp::cli {

using nlohmann::ordered_json;
using stable::StableParams;

namespace {

const std::vector<std::string> kernel_names = {"positive", "stable", "cauchy", "fracint", "radial", "gauss"};

double parse_number(const std::string& s, const std::string& spec) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) throw InvalidParams("malformed grid '" + spec + "'");
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
const T& need(const std::optional<T>& v, const char* flag, const std::string& command) {
  if (!v) throw InvalidParams(command + " requires --" + flag);
  return *v;
}

StableParams params(const RunConfig& c) {
  return StableParams(need(c.alpha, "alpha", c.command), need(c.rho, "rho", c.command));
}

stable::EvalConfig eval_config(const RunConfig& c) {
  stable::EvalConfig e;
  e.precision = Precision(c.digits);
  return e;
}

kernels::Kernel make_kernel(const RunConfig& c) {
  const std::string& k = c.kernel;
  if (k == "positive") return kernels::positive_stable_kernel(need(c.alpha, "alpha", c.command));
  if (k == "stable") return kernels::stable_convolution_kernel(params(c));
  if (k == "cauchy") return kernels::cauchy_type_kernel(need(c.alpha, "alpha", c.command));
  if (k == "fracint") return kernels::fractional_integration_kernel(need(c.beta, "beta", c.command));
  if (k == "radial") return kernels::radial_kernel(need(c.alpha, "alpha", c.command), need(c.dim, "dim", c.command));
  if (k == "gauss") return kernels::gaussian_spacetime_kernel();
  throw InvalidParams("unknown kernel '" + k + "'");
}

// Which predicate produced the predicted order.
std::string branch(const RunConfig& c, const kernels::TPOrder& order) {
  const std::string& k = c.kernel;
  if (k == "positive" || k == "cauchy" || k == "radial") {
    return order.is_infinite() ? "reciprocal-integer: 1/alpha is an integer" : "floor(1/alpha)";
  }
  if (k == "stable") {
    return order.is_infinite() ? "(gamma, delta) both integers" : "inf-bound: floor(min(gamma, delta)) + 1";
  }
  if (k == "fracint") return order.is_infinite() ? "integer beta" : "smallest n with beta <= n";
  return "gaussian kernel";
}

ordered_json wrap(ordered_json report) { return {{"schema", 1}, {"report", std::move(report)}}; }

struct Output {
  std::string text;
  int code = ok;
};

Output emit_json(const ordered_json& report, int code = ok) { return {wrap(report).dump(2) + "\n", code}; }

Output cmd_eval(const RunConfig& c) {
  StableParams p = params(c);
  stable::EvalConfig e = eval_config(c);
  std::vector<double> xs = parse_grid(c.grid);
  std::vector<double> fs;
  for (double x : xs) fs.push_back(stable::density<double>(p, x, e));
  if (c.format == "csv") {
    std::string s = "x,density\n";
    for (std::size_t i = 0; i < xs.size(); ++i) s += fmt(xs[i]) + "," + fmt(fs[i]) + "\n";
    return {s};
  }
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back({{"x", xs[i]}, {"density", fs[i]}});
  return emit_json({{"command", "eval"}, {"alpha", p.alpha}, {"rho", p.rho}, {"rows", rows}});
}

Output cmd_predict(const RunConfig& c) {
  kernels::Kernel k = make_kernel(c);
  kernels::TPOrder order = k.predicted_order().value();
  ordered_json r = {{"command", "predict"}, {"kernel", k.name()}, {"predicted_order", order.str()},
                    {"branch", branch(c, order)}};
  if (c.kernel == "stable") {
    StableParams p = params(c);
    r["gamma"] = p.gamma_param();
    r["delta"] = p.delta_param();
  }
  return emit_json(r);
}

Output cmd_tpcheck(const RunConfig& c) {
  kernels::Kernel k = make_kernel(c);
  int order = need(c.order, "order", c.command);
  Precision prec(c.digits);
  tp::TPReport r = order == 1 ? tp::positivity_scan(k, c.budget, c.seed, prec)
                              : tp::tp_search(k, order, c.budget, c.seed, prec);
  return emit_json(r.to_json(), r.verdict == tp::Verdict::refuted ? refutation : ok);
}

Output cmd_delta(const RunConfig& c) {
  StableParams p = params(c);
  int k = need(c.order, "order", c.command);
  stable::EvalConfig e = eval_config(c);
  std::vector<double> zs = parse_grid(c.grid);
  std::vector<asymptotics::DeltaValue> vals;
  for (double z : zs) vals.push_back(asymptotics::delta_k_value(p, k, z, {}, e));
  if (c.format == "csv") {
    std::string s = "z,delta\n";
    for (std::size_t i = 0; i < zs.size(); ++i) s += fmt(zs[i]) + "," + fmt(to_double(vals[i].value)) + "\n";
    return {s};
  }
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < zs.size(); ++i) {
    rows.push_back({{"z", zs[i]}, {"delta", to_double(vals[i].value)}, {"sign", tp::to_string(vals[i].classification)}});
  }
  return emit_json({{"command", "delta"}, {"alpha", p.alpha}, {"rho", p.rho}, {"k", k},
                    {"at_zero", asymptotics::delta_k_at_zero(p, k)}, {"rows", rows}});
}

Output cmd_factorize(const RunConfig& c) {
  double alpha = need(c.alpha, "alpha", c.command);
  int n = c.order.value_or(10);
  factorization::BetaProductSpec spec = factorization::beta_product_spec(alpha, n);
  std::vector<double> xs;
  if (!c.grid.empty()) xs = parse_grid(c.grid);
  std::vector<double> h, hn;
  if (!xs.empty()) {
    h = factorization::density_from_cf([&](double s) { return factorization::h_hat(alpha, s); }, xs);
    hn = factorization::density_from_cf([&](double s) { return factorization::h_hat_n(alpha, n, s); }, xs);
  }
  if (c.format == "csv") {
    std::string s = "x,h,h_n\n";
    for (std::size_t i = 0; i < xs.size(); ++i) s += fmt(xs[i]) + "," + fmt(h[i]) + "," + fmt(hn[i]) + "\n";
    return {s};
  }
  ordered_json factors = ordered_json::array();
  for (const auto& f : spec.factors) factors.push_back({{"a", f.a}, {"b", f.b}, {"scale", f.scale}});
  ordered_json r = {{"command", "factorize"}, {"alpha", alpha}, {"n", n}, {"global_scale", spec.global_scale},
                    {"factors", factors}, {"sup_distance", factorization::sup_distance(alpha, n)}};
  if (!xs.empty()) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back({{"x", xs[i]}, {"h", h[i]}, {"h_n", hn[i]}});
    r["log_densities"] = rows;
  }
  return emit_json(r);
}

Output cmd_shape(const RunConfig& c) {
  StableParams p = params(c);
  int bell = c.order.value_or(p.rho == 0.5 && p.alpha < 2 ? 3 : -1);
  shape::ShapeReport r = shape::shape_report(p, {0.5, 2.0}, bell, eval_config(c));
  return emit_json(r.to_json());
}

Output cmd_selftest(const RunConfig& c, std::ostream& err) {
  acceptance::AcceptanceConfig a;
  a.seed = c.seed;
  a.precision = Precision(c.digits);
  a.quick = c.quick;
  std::vector<int> ids = a.quick ? acceptance::quick_subset() : std::vector<int>{};
  if (!a.quick) {
    for (int i = 1; i <= acceptance::criterion_count; ++i) ids.push_back(i);
  }
  std::vector<acceptance::CriterionResult> results;
  bool all = true;
  for (int id : ids) {
    results.push_back(acceptance::run_criterion(id, a));
    const auto& r = results.back();
    err << "criterion " << r.id << " (" << r.name << "): " << (r.passed ? "PASS" : "FAIL") << std::endl;
    all = all && r.passed;
  }
  return emit_json(acceptance::summary(results, a), all ? ok : selftest_failure);
}

// Raw flag storage shared by every subcommand; only one subcommand is parsed per run.
struct Flags {
  double alpha = 0, rho = 0, beta = 0;
  int dim = 0, order = 0, digits = 60;
  std::uint64_t budget = 10000, seed = 1234;
  std::string kernel, grid, format = "json", out, config;
  bool quick = false;
};

void add_flags(CLI::App* sub, Flags& f, std::map<std::string, CLI::Option*>& opts) {
  opts["alpha"] = sub->add_option("--alpha", f.alpha, "Stability index");
  opts["rho"] = sub->add_option("--rho", f.rho, "Positivity parameter P(X > 0)");
  opts["beta"] = sub->add_option("--beta", f.beta, "Fractional integration order");
  opts["dim"] = sub->add_option("--dim", f.dim, "Dimension of the radial kernel");
  opts["kernel"] = sub->add_option("--kernel", f.kernel, "Kernel")->check(CLI::IsMember(kernel_names));
  opts["order"] = sub->add_option("--order", f.order, "TP order, Delta index or Beta-product length");
  opts["budget"] = sub->add_option("--budget", f.budget, "Number of sampled grid pairs");
  opts["seed"] = sub->add_option("--seed", f.seed, "Random seed");
  opts["digits"] = sub->add_option("--digits", f.digits, "Working decimal digits");
  opts["grid"] = sub->add_option("--grid", f.grid, "a:b:n or log:a:b:n");
  opts["format"] = sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  opts["out"] = sub->add_option("--out", f.out, "Output file (default stdout)");
  opts["quick"] = sub->add_flag("--quick", f.quick, "Quick acceptance subset");
  sub->add_option("--config", f.config, "JSON file with the same keys; flags override it");
}

// Flag value when given, else the config file value, else the default.
RunConfig merge(const std::string& command, const Flags& f, const std::map<std::string, CLI::Option*>& opts,
                const ordered_json& file) {
  for (const auto& [key, value] : file.items()) {
    if (!opts.count(key)) throw InvalidParams("unknown config key '" + key + "'");
  }
  auto given = [&](const char* key) { return opts.at(key)->count() > 0; };
  auto pick = [&](const char* key, auto flag_value) -> std::optional<decltype(flag_value)> {
    if (given(key)) return flag_value;
    if (file.contains(key)) {
      try {
        return file.at(key).template get<decltype(flag_value)>();
      } catch (const nlohmann::json::exception&) {
        throw InvalidParams(std::string("config key '") + key + "' has the wrong type");
      }
    }
    return std::nullopt;
  };
  RunConfig c;
  c.command = command;
  c.alpha = pick("alpha", f.alpha);
  c.rho = pick("rho", f.rho);
  c.beta = pick("beta", f.beta);
  c.dim = pick("dim", f.dim);
  c.kernel = pick("kernel", f.kernel).value_or("");
  c.order = pick("order", f.order);
  c.budget = pick("budget", f.budget).value_or(c.budget);
  c.seed = pick("seed", f.seed).value_or(c.seed);
  c.digits = pick("digits", f.digits).value_or(c.digits);
  c.grid = pick("grid", f.grid).value_or("");
  c.format = pick("format", f.format).value_or(c.format);
  c.out = pick("out", f.out).value_or("");
  c.quick = pick("quick", f.quick).value_or(false);
  return c;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  bool log = !parts.empty() && parts[0] == "log";
  if (log) parts.erase(parts.begin());
  if (parts.size() != 3) throw InvalidParams("grid must be a:b:n or log:a:b:n, got '" + spec + "'");
  double a = parse_number(parts[0], spec);
  double b = parse_number(parts[1], spec);
  double nd = parse_number(parts[2], spec);
  if (nd < 1 || nd != std::floor(nd) || nd > 1e7) throw InvalidParams("grid needs a positive integer count: '" + spec + "'");
  if (log && !(a > 0 && b > 0)) throw InvalidParams("log grid bounds must be positive: '" + spec + "'");
  int n = static_cast<int>(nd);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    v[i] = log ? std::pow(10.0, std::log10(a) + t * (std::log10(b) - std::log10(a))) : a + t * (b - a);
  }
  if (n > 1) v.back() = b;
  return v;
}

void RunConfig::validate() const {
  Precision check(digits);
  (void)check;
  if (format != "json" && format != "csv") throw InvalidParams("format must be json or csv");
  bool table = command == "eval" || command == "delta" || command == "factorize";
  if (format == "csv" && !table) throw InvalidParams(command + " has no CSV output");
  if (command == "eval" || command == "delta") {
    if (grid.empty()) throw InvalidParams(command + " requires --grid");
    parse_grid(grid);
  }
  if (command == "factorize" && format == "csv" && grid.empty()) throw InvalidParams("CSV output of factorize requires --grid");
  if (command == "delta" && (!order || *order < 1 || *order > 5)) throw InvalidParams("delta requires --order in 1..5");
  if (command == "predict" || command == "tpcheck") {
    if (kernel.empty()) throw InvalidParams(command + " requires --kernel");
  }
  if (command == "tpcheck") {
    if (!order || *order < 1) throw InvalidParams("tpcheck requires --order >= 1");
    if (budget < 1) throw InvalidParams("tpcheck requires --budget >= 1");
  }
  if (command == "factorize" && order && *order < 0) throw InvalidParams("factorize requires --order >= 0");
  if (command == "shape" && order && *order > 4) throw InvalidParams("shape accepts --order up to 4");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stable densities, total positivity checks and shape analysis"};
  app.require_subcommand(1);
  Flags f;
  std::map<CLI::App*, std::map<std::string, CLI::Option*>> opts;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"eval", "Density f_{alpha,rho} over a grid"},
      {"predict", "Predicted TP order of a kernel"},
      {"tpcheck", "Randomised search for a negative minor"},
      {"delta", "Derivative determinant Delta^k over a grid"},
      {"factorize", "Beta-product approximation of Z_alpha^{-alpha}"},
      {"shape", "Bell shape, MLR, intersections and likelihood slope"},
      {"selftest", "Acceptance suite"}};
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_flags(sub, f, opts[sub]);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }
  CLI::App* sub = app.get_subcommands().front();
  RunConfig c;
  Output result;
  try {
    ordered_json file = ordered_json::object();
    if (!f.config.empty()) {
      std::ifstream in(f.config);
      if (!in) throw InvalidParams("cannot read config file '" + f.config + "'");
      try {
        file = ordered_json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InvalidParams("config file is not valid JSON: " + std::string(e.what()));
      }
      if (!file.is_object()) throw InvalidParams("config file must hold a JSON object");
    }
    c = merge(sub->get_name(), f, opts[sub], file);
    c.validate();
  } catch (const InvalidParams& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  }

  try {
    const std::string& cmd = c.command;
    if (cmd == "eval") result = cmd_eval(c);
    else if (cmd == "predict") result = cmd_predict(c);
    else if (cmd == "tpcheck") result = cmd_tpcheck(c);
    else if (cmd == "delta") result = cmd_delta(c);
    else if (cmd == "factorize") result = cmd_factorize(c);
    else if (cmd == "shape") result = cmd_shape(c);
    else result = cmd_selftest(c, err);
  } catch (const InvalidParams& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return numeric_failure;
  }

  if (c.out.empty()) {
    out << result.text;
  } else {
    std::ofstream file(c.out);
    if (!file) {
      err << "error: cannot write '" << c.out << "'\n";
      return usage;
    }
    file << result.text;
  }
  return result.code;
}

}  // namespace stabletp::cli
