#include "frsf/run_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "frsf/field_io.hpp"

namespace frsf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr const char* kVersion = "frsf 0.1.0";
}

ProblemParams RunConfig::params() const { return make_params(N, s, p, q, eps); }

Grid RunConfig::grid() const { return make_grid(N, M, L); }

std::vector<double> RunConfig::resolved_eps_list() const {
  if (!eps_list.empty()) return eps_list;
  if (!(eps_max > eps_min && eps_min > 0))
    throw ConfigError("geometric sweep requires eps_max > eps_min > 0");
  if (eps_count < 4) throw ConfigError("sweep needs at least 4 eps values");
  std::vector<double> out(eps_count);
  const double ratio = eps_min / eps_max;
  for (int i = 0; i < eps_count; ++i)
    out[i] = eps_max * std::pow(ratio, double(i) / (eps_count - 1));
  return out;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  if (args.empty())
    throw ConfigError("usage: frsf <solve|sweep|certify|bubble|epsstar|limit> [options]");
  cfg.command = args[0];
  const bool known = cfg.command == "solve" || cfg.command == "sweep" ||
                     cfg.command == "certify" || cfg.command == "bubble" ||
                     cfg.command == "epsstar" || cfg.command == "limit";
  if (!known) throw ConfigError("unknown command: " + cfg.command);

  CLI::App app{kVersion};
  app.set_config("--config", "", "flat key = value configuration file");
  app.add_option("--N", cfg.N, "space dimension (1, 2 or 3)");
  app.add_option("--s", cfg.s, "fractional order in (0,1)");
  app.add_option("--p", cfg.p, "lower exponent, p > 2");
  app.add_option("--q", cfg.q, "upper exponent, q > p");
  app.add_option("--eps", cfg.eps, "vanishing parameter");
  app.add_option("--M", cfg.M, "grid points per axis (even)");
  app.add_option("--L", cfg.L, "box half length");
  app.add_option("--eps-list", cfg.eps_list, "explicit sweep eps values, descending");
  app.add_option("--eps-max", cfg.eps_max, "geometric sweep start");
  app.add_option("--eps-min", cfg.eps_min, "geometric sweep end");
  app.add_option("--eps-count", cfg.eps_count, "geometric sweep length");
  app.add_option("--max-iterations", cfg.minimize.max_iterations);
  app.add_option("--rel-tol", cfg.minimize.rel_tol);
  app.add_option("--stationarity-tol", cfg.minimize.stationarity_tol);
  app.add_option("--initial-step", cfg.minimize.step_rule.initial_step);
  app.add_option("--shrink", cfg.minimize.step_rule.shrink);
  app.add_option("--sufficient-decrease", cfg.minimize.step_rule.sufficient_decrease);
  app.add_flag("--no-preconditioner{false},--preconditioner{true}", cfg.minimize.preconditioner);
  app.add_flag("--no-positivity{false},--positivity{true}", cfg.minimize.positivity_projection);
  app.add_flag("--radial-symmetrization", cfg.minimize.radial_symmetrization);
  app.add_option("--radial-every", cfg.minimize.radial_every);
  app.add_option("--fft-threads", cfg.minimize.fft_threads);
  app.add_option("--init", cfg.init, "gaussian | bubble");
  app.add_option("--init-lambda", cfg.init_lambda);
  app.add_option("--init-width", cfg.init_width);
  app.add_option("--init-amplitude", cfg.init_amplitude);
  app.add_option("--limit-M", cfg.limit_M, "grid points for the limit solve");
  app.add_option("--limit-L", cfg.limit_L, "box half length for the limit solve");
  app.add_option("--output-dir", cfg.output_dir);
  app.add_flag("--emit-fields", cfg.emit_fields);
  app.add_flag("--emit-plots", cfg.emit_plots);
  app.add_option("--seed", cfg.seed);
  app.add_option("--field", cfg.field_path, "input field for certify");
  app.add_option("--theta", cfg.theta, "multiplier for certify");

  std::vector<std::string> rest(args.begin() + 1, args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (cfg.command == "epsstar") {
    if (!(cfg.q > cfg.p && cfg.p > 2.0)) throw ConfigError("epsstar needs q > p > 2");
    return cfg;
  }
  try {
    ProblemParams pr{cfg.N, cfg.s, cfg.p, cfg.q, cfg.command == "limit" ? 0.0 : cfg.eps};
    pr.validate();
  } catch (const InvalidParams& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.command == "solve" || cfg.command == "sweep" || cfg.command == "certify") {
    const double estar = eps_star(cfg.p, cfg.q);
    auto check = [&](double e) {
      if (e >= estar)
        throw ConfigError("eps = " + format_g17(e) +
                          " is not below the non-existence threshold eps_* = " +
                          format_g17(estar));
    };
    if (cfg.command == "sweep") {
      for (double e : cfg.resolved_eps_list()) check(e);
    } else {
      check(cfg.eps);
    }
  }
  if (cfg.command == "certify" && cfg.field_path.empty())
    throw ConfigError("certify needs --field");
  if (cfg.M < 2 || cfg.M % 2 != 0) throw ConfigError("M must be even and >= 2");
  if (!(cfg.L > 0)) throw ConfigError("L must be positive");
  return cfg;
}

std::string csv_header() {
  return "eps,S_eps,u_center,lambda_eps,norm2sq,normp_p,normq_q,poho_res,nehari_res,"
         "energy_res,asymmetry,mono_viol,decay_exp,decay_r2,converged,iterations,wall_s";
}

std::string csv_row(const SweepRecord& rec) {
  std::ostringstream out;
  auto put = [&](double v, bool valid = true) {
    if (valid) out << format_g17(v);
    out << ",";
  };
  auto get = [&](const char* key, double& dst) {
    auto it = rec.norms.find(key);
    if (it == rec.norms.end()) return false;
    dst = it->second;
    return true;
  };
  out << format_g17(rec.eps) << ",";
  if (!rec.ok()) {
    // failed record: eps plus empty cells, converged 0
    out << ",,,,,,,,,,,,,0,0,";
    return out.str();
  }
  put(rec.s_eps);
  put(rec.u_center);
  put(rec.lambda_eps, rec.lambda_eps > 0);
  double v = 0;
  put(v, get("norm2sq", v));
  put(v, get("normp_p", v));
  put(v, get("normq_q", v));
  put(rec.certificate.pohozaev_res);
  put(rec.certificate.nehari_res);
  put(rec.certificate.energy_level_res);
  put(rec.certificate.asymmetry);
  put(rec.certificate.monotonicity_violation);
  put(rec.certificate.decay.exponent, rec.certificate.decay_valid);
  put(rec.certificate.decay.r_squared, rec.certificate.decay_valid);
  out << (rec.converged ? 1 : 0) << "," << rec.iterations << ",";
  // wall_s stays empty: summary.csv is byte-reproducible, timings live in
  // the manifest
  return out.str();
}

namespace {

struct OutputSink {
  fs::path dir;
  json files = json::array();

  explicit OutputSink(const std::string& d) : dir(d) { fs::create_directories(dir); }

  void note(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    files.push_back({{"path", fs::relative(path, dir).string()},
                     {"bytes", bytes.size()},
                     {"fnv1a64", hex}});
  }

  fs::path write_text(const std::string& name, const std::string& content) {
    const fs::path p = dir / name;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    out.close();
    note(p);
    return p;
  }

  fs::path write_field_file(const std::string& name, const Field& f) {
    const fs::path p = dir / name;
    write_field(p.string(), f);
    note(p);
    return p;
  }
};

json config_echo(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["N"] = cfg.N;
  j["s"] = cfg.s;
  j["p"] = cfg.p;
  j["q"] = cfg.q;
  j["eps"] = cfg.eps;
  j["M"] = cfg.M;
  j["L"] = cfg.L;
  j["eps_list"] = cfg.eps_list;
  j["eps_max"] = cfg.eps_max;
  j["eps_min"] = cfg.eps_min;
  j["eps_count"] = cfg.eps_count;
  j["max_iterations"] = cfg.minimize.max_iterations;
  j["rel_tol"] = cfg.minimize.rel_tol;
  j["stationarity_tol"] = cfg.minimize.stationarity_tol;
  j["preconditioner"] = cfg.minimize.preconditioner;
  j["positivity_projection"] = cfg.minimize.positivity_projection;
  j["radial_symmetrization"] = cfg.minimize.radial_symmetrization;
  j["init"] = cfg.init;
  j["init_lambda"] = cfg.init_lambda;
  j["init_width"] = cfg.init_width;
  j["init_amplitude"] = cfg.init_amplitude;
  j["limit_M"] = cfg.limit_M;
  j["limit_L"] = cfg.limit_L;
  j["output_dir"] = cfg.output_dir;
  j["emit_fields"] = cfg.emit_fields;
  j["emit_plots"] = cfg.emit_plots;
  j["seed"] = cfg.seed;
  j["field"] = cfg.field_path;
  j["theta"] = cfg.theta;
  return j;
}

void write_manifest(OutputSink& sink, const RunConfig& cfg, const json& extra,
                    double total_wall) {
  json m;
  m["artifact"] = kVersion;
  m["config"] = config_echo(cfg);
  m["determinism"] = {{"fft_planner", "estimate"},
                      {"fft_threads", cfg.minimize.fft_threads},
                      {"float_format", "%.17g"}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  m["total_wall_s"] = total_wall;
  m["files"] = sink.files;
  const fs::path p = sink.dir / "manifest.json";
  std::ofstream out(p, std::ios::binary);
  out << m.dump(2) << "\n";
}

std::string profile_csv(const RadialProfile& prof) {
  std::ostringstream out;
  out << "radius,value\n";
  for (Eigen::Index i = 0; i < prof.radii.size(); ++i)
    out << format_g17(prof.radii[i]) << "," << format_g17(prof.values[i]) << "\n";
  return out.str();
}

std::string vegalite_loglog(const std::string& csv_name, const std::string& xfield,
                            const std::string& yfield, bool with_fit) {
  json spec;
  spec["$schema"] = "https://vega.github.io/schema/vega-lite/v5.json";
  spec["data"] = {{"url", csv_name}};
  json x = {{"field", xfield}, {"type", "quantitative"}, {"scale", {{"type", "log"}}}};
  json y = {{"field", yfield}, {"type", "quantitative"}, {"scale", {{"type", "log"}}}};
  json pts = {{"mark", "point"}, {"encoding", {{"x", x}, {"y", y}}}};
  json layers = json::array({pts});
  if (with_fit) {
    json yf = {{"field", "fit"}, {"type", "quantitative"}, {"scale", {{"type", "log"}}}};
    layers.push_back({{"mark", "line"}, {"encoding", {{"x", x}, {"y", yf}}}});
  }
  spec["layer"] = layers;
  return spec.dump(2) + "\n";
}

InitSpec init_from_config(const RunConfig& cfg) {
  if (cfg.init == "bubble") return BubbleInit{cfg.init_lambda};
  if (cfg.init == "gaussian") return GaussianInit{cfg.init_width, cfg.init_amplitude};
  throw ConfigError("unknown init shape: " + cfg.init);
}

SweepRecord solve_record(const RunConfig& cfg, const ProblemParams& pr, const Grid& grid,
                         Field* w_out, Field* u_out) {
  SweepRecord rec;
  rec.eps = pr.eps;
  const auto t0 = std::chrono::steady_clock::now();
  MinimizerResult res = minimize(pr, grid, init_from_config(cfg), cfg.minimize);
  const Field u = ground_state(res, pr);
  rec.s_eps = res.s_eps;
  rec.u_center = center_value(res.w);
  rec.iterations = res.iterations;
  rec.converged = res.converged;
  rec.norms["norm2sq"] = l2_sq(res.w);
  rec.norms["normp_p"] = lt_pow(res.w, pr.p);
  rec.norms["normq_q"] = lt_pow(res.w, pr.q);
  if (pr.regime() == Regime::Subcritical) {
    const Field v = rescale_subcritical(u, pr);
    const auto [wp, kappa] =
        normalize_constraint_family(v, Nonlinearity::rescaled_subcritical(pr), pr.s);
    rec.certificate = make_report(res, u, pr, &wp);
  } else {
    rec.certificate = make_report(res, u, pr, nullptr);
    if (pr.regime() == Regime::Critical) {
      const SStarResult ss = compute_S_star(pr, grid);
      rec.sigma_eps = rec.s_eps - ss.value;
      rec.lambda_eps = concentration_lambda(res.w, pr, q_star(grid, pr, ss.value));
      rec.certificate.regime_identities["sigma_eps"] = rec.sigma_eps;
    }
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (w_out) *w_out = res.w;
  if (u_out) *u_out = u;
  return rec;
}

int run_solve(const RunConfig& cfg) {
  OutputSink sink(cfg.output_dir);
  const ProblemParams pr = cfg.params();
  const Grid grid = cfg.grid();
  Field w, u;
  const SweepRecord rec = solve_record(cfg, pr, grid, &w, &u);
  sink.write_text("summary.csv", csv_header() + "\n" + csv_row(rec) + "\n");
  sink.write_text("certificate.txt", serialize_report(rec.certificate));
  if (cfg.emit_fields) {
    sink.write_field_file("w.frsf", w);
    sink.write_field_file("u.frsf", u);
  }
  if (cfg.emit_plots) {
    sink.write_text("plots/profile.csv", profile_csv(radialize(u)));
    sink.write_text("plots/profile.vl.json",
                    vegalite_loglog("profile.csv", "radius", "value", false));
  }
  std::cout << "S_eps = " << format_g17(rec.s_eps) << "\n"
            << "u(0) = " << format_g17(rec.u_center) << "\n"
            << "converged = " << (rec.converged ? 1 : 0) << " after " << rec.iterations
            << " iterations\n";
  json extra;
  extra["records"] = json::array({{{"eps", rec.eps},
                                   {"wall_s", rec.wall_time},
                                   {"error", rec.error},
                                   {"converged", rec.converged}}});
  write_manifest(sink, cfg, extra, rec.wall_time);
  return rec.converged ? 0 : 2;
}

int run_sweep(const RunConfig& cfg) {
  OutputSink sink(cfg.output_dir);
  const ProblemParams base = cfg.params();
  SweepOptions opts;
  opts.grid = cfg.grid();
  opts.minimize = cfg.minimize;
  if (cfg.limit_M > 0 && cfg.limit_L > 0) {
    opts.limit_grid = make_grid(cfg.N, cfg.limit_M, cfg.limit_L);
    opts.has_limit_grid = true;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const ScalingStudy study = sweep(base, cfg.resolved_eps_list(), opts);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream csv;
  csv << csv_header() << "\n";
  for (const auto& rec : study.records) csv << csv_row(rec) << "\n";
  sink.write_text("summary.csv", csv.str());

  int idx = 0;
  for (const auto& rec : study.records) {
    char name[64];
    std::snprintf(name, sizeof name, "certificate_%03d.txt", idx++);
    if (rec.ok()) sink.write_text(name, serialize_report(rec.certificate));
  }

  std::ostringstream fits;
  fits << "regime=" << regime_name(study.regime) << "\n";
  fits << "s_star=" << format_g17(study.s_star) << "\n";
  fits << "q_star=" << format_g17(study.q_star) << "\n";
  fits << "s_limit=" << format_g17(study.s_limit) << "\n";
  fits << "limit_center=" << format_g17(study.limit_center) << "\n";
  fits << "fits_skipped=" << (study.fits_skipped ? 1 : 0) << "\n";
  for (const auto& [name, fit] : study.fits) {
    fits << name << ".slope=" << format_g17(fit.slope) << "\n";
    fits << name << ".intercept=" << format_g17(fit.intercept) << "\n";
    fits << name << ".r_squared=" << format_g17(fit.r_squared) << "\n";
  }
  sink.write_text("fits.txt", fits.str());
  std::cout << fits.str();

  if (cfg.emit_plots) {
    for (const auto& [name, fit] : study.fits) {
      std::ostringstream pc;
      pc << "eps,value,fit\n";
      for (const auto& rec : study.records) {
        if (!rec.ok()) continue;
        double y = 0;
        if (name == "u_center") y = rec.u_center;
        else if (name == "lambda_eps") y = rec.lambda_eps;
        else if (name == "sigma_eps") y = rec.sigma_eps;
        else if (rec.norms.count(name)) y = rec.norms.at(name);
        if (!(y > 0)) continue;
        const double yfit = std::exp(fit.intercept + fit.slope * std::log(rec.eps));
        pc << format_g17(rec.eps) << "," << format_g17(y) << "," << format_g17(yfit) << "\n";
      }
      sink.write_text("plots/" + name + ".csv", pc.str());
      sink.write_text("plots/" + name + ".vl.json",
                      vegalite_loglog(name + ".csv", "eps", "value", true));
    }
  }
  if (cfg.emit_fields) {
    // re-solving to emit fields would violate the single-pass design; fields
    // are emitted by `solve` runs
  }

  json recs = json::array();
  bool any_failed = false;
  for (const auto& rec : study.records) {
    recs.push_back({{"eps", rec.eps},
                    {"wall_s", rec.wall_time},
                    {"error", rec.error},
                    {"converged", rec.converged}});
    if (!rec.ok() || !rec.converged) any_failed = true;
  }
  json extra;
  extra["records"] = recs;
  write_manifest(sink, cfg, extra, wall);
  return any_failed ? 2 : 0;
}

int run_bubble(const RunConfig& cfg) {
  OutputSink sink(cfg.output_dir);
  ProblemParams pr{cfg.N, cfg.s, 0, 0, 0};
  pr.p = pr.two_star();
  pr.q = pr.p + 2.0;
  const Grid grid = cfg.grid();
  const double c = bubble_constant(cfg.N, cfg.s);
  const SStarResult ss = compute_S_star(pr, grid);
  const double qs = q_star(grid, pr, ss.value);
  std::cout << "c_Ns = " << format_g17(c) << "\n"
            << "S_star = " << format_g17(ss.value) << "\n"
            << "self_consistency_residual = " << format_g17(ss.self_consistency_residual) << "\n"
            << "Q_star = " << format_g17(qs) << "\n";
  const Field u1 = sample_bubble(grid, pr, 1.0, BubbleFamily::U);
  sink.write_text("bubble_profile.csv", profile_csv(radialize(u1)));
  json extra;
  extra["c_Ns"] = c;
  extra["S_star"] = ss.value;
  extra["Q_star"] = qs;
  write_manifest(sink, cfg, extra, 0.0);
  return 0;
}

int run_certify(const RunConfig& cfg) {
  OutputSink sink(cfg.output_dir);
  const Field u = read_field(cfg.field_path);
  ProblemParams pr{u.grid.dim, cfg.s, cfg.p, cfg.q, cfg.eps};
  pr.validate();
  const CertificateReport rep = make_solution_report(u, pr, cfg.theta);
  const std::string text = serialize_report(rep);
  std::cout << text;
  sink.write_text("certificate.txt", text);
  write_manifest(sink, cfg, json::object(), 0.0);
  return 0;
}

int run_limit(const RunConfig& cfg) {
  OutputSink sink(cfg.output_dir);
  ProblemParams pr{cfg.N, cfg.s, cfg.p, cfg.q, 0.0};
  pr.validate();
  Grid grid = cfg.grid();
  if (cfg.limit_M > 0 && cfg.limit_L > 0) grid = make_grid(cfg.N, cfg.limit_M, cfg.limit_L);
  const auto t0 = std::chrono::steady_clock::now();
  const LimitSolution lim = solve_limit_problem(pr.regime(), pr, grid, cfg.minimize);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "regime = " << regime_name(pr.regime()) << "\n"
            << "level = " << format_g17(lim.level) << "\n"
            << "center = " << format_g17(center_value(lim.field)) << "\n";
  if (cfg.emit_fields) sink.write_field_file("limit.frsf", lim.field);
  sink.write_text("limit_profile.csv", profile_csv(radialize(lim.field)));
  json extra;
  extra["level"] = lim.level;
  extra["center"] = center_value(lim.field);
  write_manifest(sink, cfg, extra, wall);
  return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
  if (cfg.command == "epsstar") {
    std::cout << "eps_star = " << format_g17(eps_star(cfg.p, cfg.q)) << "\n";
    return 0;
  }
  if (cfg.command == "solve") return run_solve(cfg);
  if (cfg.command == "sweep") return run_sweep(cfg);
  if (cfg.command == "bubble") return run_bubble(cfg);
  if (cfg.command == "certify") return run_certify(cfg);
  if (cfg.command == "limit") return run_limit(cfg);
  throw ConfigError("unknown command: " + cfg.command);
}

}  // namespace frsf
