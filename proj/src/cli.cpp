#include "rankbound/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rankbound/errors.hpp"
#include "rankbound/hierarchies.hpp"
#include "rankbound/instances.hpp"
#include "rankbound/sdpa_io.hpp"

namespace rankbound {

namespace {

struct Config {
  std::string gen;
  std::string file;
  bool transpose = false;
  std::string row_scale;

  std::string kind = "cpsd";
  int t = 1;
  bool dagger = false;
  std::vector<std::string> V;
  int sphere_grid = 0;
  bool kernel = false;
  std::vector<std::string> bilinear;
  bool bilinear_cross = false;
  std::vector<int> tensor_levels;
  bool extra_monomials = false;
  bool psd_ideal_rows = false;

  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
  double rank_tol = 1e-6;
  bool verbose = false;
  bool no_presolve = false;

  std::string csv;
  std::string out;
  bool to_stdout = false;
  bool equality_extension = false;

  std::string family;
  std::string p1;
  std::string p2;
  std::string extra;
  int jobs = 1;
  bool skip_existing = false;
};

struct Instance {
  Eigen::MatrixXd A;
  std::string provenance;
  std::vector<double> params;
};

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  int col = 0;
  while (std::getline(ss, tok, ',')) {
    ++col;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0' || !std::isfinite(v)) {
      throw ParseError("bad number '" + tok + "' in " + what, 1, col);
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> spec_params(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return {};
  return parse_list(spec.substr(colon + 1), "generator parameters");
}

Eigen::MatrixXd shape(Eigen::MatrixXd A, const Config& cfg) {
  if (cfg.transpose) A.transposeInPlace();
  if (!cfg.row_scale.empty()) {
    const std::vector<double> d = parse_list(cfg.row_scale, "--row-scale");
    if (static_cast<Eigen::Index>(d.size()) != A.rows()) {
      throw ParamRange("--row-scale needs " + std::to_string(A.rows()) + " factors");
    }
    for (Eigen::Index i = 0; i < A.rows(); ++i) A.row(i) *= d[static_cast<std::size_t>(i)];
  }
  return A;
}

Instance load_instance(const Config& cfg) {
  if (cfg.gen.empty() == cfg.file.empty()) throw CLI::ValidationError("exactly one of --gen and --file is required");
  Instance inst;
  MatrixInstance mi = cfg.gen.empty() ? load(cfg.file) : gen_spec(cfg.gen);
  if (!cfg.gen.empty()) inst.params = spec_params(cfg.gen);
  inst.A = shape(mi.values, cfg);
  inst.provenance = mi.provenance;
  if (cfg.transpose) inst.provenance += " transposed";
  if (!cfg.row_scale.empty()) inst.provenance += " rows scaled by (" + cfg.row_scale + ")";
  return inst;
}

Variants make_variants(const Config& cfg, Eigen::Index n) {
  Variants v;
  v.dagger = cfg.dagger;
  v.kernel = cfg.kernel;
  v.bilinear_cross = cfg.bilinear_cross;
  v.tensor_levels = cfg.tensor_levels;
  v.extra_monomial_localizers = cfg.extra_monomials;
  v.psd_ideal_rows = cfg.psd_ideal_rows;
  for (const std::string& s : cfg.V) {
    std::stringstream ss(s);
    std::string vec;
    while (std::getline(ss, vec, ';')) {
      const std::vector<double> x = parse_list(vec, "--V");
      if (static_cast<Eigen::Index>(x.size()) != n) {
        throw ParamRange("--V vector needs " + std::to_string(n) + " entries");
      }
      v.V.push_back(Eigen::Map<const Eigen::VectorXd>(x.data(), n));
    }
  }
  if (cfg.sphere_grid > 0) {
    for (const auto& u : sphere_grid(static_cast<int>(n), cfg.sphere_grid)) v.V.push_back(u);
  }
  for (const std::string& s : cfg.bilinear) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ParseError("--bilinear expects i:j", 1, 1);
    const std::vector<double> a = parse_list(s.substr(0, colon) + "," + s.substr(colon + 1), "--bilinear");
    v.bilinear_pairs.emplace_back(static_cast<int>(a[0]), static_cast<int>(a[1]));
  }
  return v;
}

BoundOptions make_options(const Config& cfg) {
  BoundOptions o;
  o.solver.feas_tol = cfg.feas_tol;
  o.solver.gap_tol = cfg.gap_tol;
  o.solver.max_iter = cfg.max_iter;
  o.solver.verbose = cfg.verbose;
  o.solver.presolve = !cfg.no_presolve;
  o.rank_tol = cfg.rank_tol;
  return o;
}

std::string fmt(double v, const char* f = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Parameter values on a grid are rounded so that 0.1*3 prints as 0.3.
double grid_value(double lo, double step, int i) { return std::round((lo + i * step) * 1e12) / 1e12; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string csv_row(const std::vector<double>& params, const std::string& kind, int t, const std::string& variants,
                    const std::optional<double>& value, const std::string& status) {
  std::string row;
  row += (params.size() > 0 ? fmt(params[0]) : "") + ",";
  row += (params.size() > 1 ? fmt(params[1]) : "") + ",";
  row += csv_field(kind) + "," + std::to_string(t) + "," + csv_field(variants) + ",";
  row += (value ? fmt(*value, "%.12g") : "") + "," + csv_field(status);
  return row;
}

void append_csv(const std::string& path, const std::string& row) {
  bool fresh = true;
  {
    std::ifstream in(path);
    fresh = !in || in.peek() == std::ifstream::traits_type::eof();
  }
  std::ofstream o(path, std::ios::app | std::ios::binary);
  if (!o) throw std::runtime_error("cannot write '" + path + "'");
  if (fresh) o << kCsvHeader << "\n";
  o << row << "\n";
}

void print_baselines(std::ostream& out, const std::map<std::string, double>& b) {
  out << "baselines:\n";
  if (b.empty()) out << "  (none applicable)\n";
  for (const auto& [k, v] : b) out << "  " << k << " = " << fmt(v) << "\n";
}

int cmd_bound(const Config& cfg, std::ostream& out, std::ostream& err) {
  const Instance inst = load_instance(cfg);
  BoundRequest req;
  req.kind = parse_kind(cfg.kind);
  req.A = inst.A;
  req.t = cfg.t;
  req.variants = make_variants(cfg, inst.A.rows());
  BoundOptions opts = make_options(cfg);
  opts.baselines = true;
  const BoundResult r = compute_bound(req, opts);

  out << "instance: " << inst.provenance << " (" << inst.A.rows() << "x" << inst.A.cols() << ")\n";
  out << "kind: " << to_string(r.kind) << "  t: " << r.t << "  variants: " << r.variants << "\n";
  out << "sdp: " << r.nvars << " variables, blocks";
  for (int d : r.block_dims) out << " " << d;
  out << "\n";
  out << "status: " << to_string(r.status) << "\n";
  if (r.value) out << "value: " << fmt(*r.value) << "\n";
  const SdpSolution& s = r.solution;
  out << "residuals: gap " << fmt(s.relative_gap, "%.2e") << ", psd " << fmt(s.max_psd_violation, "%.2e") << ", eq "
      << fmt(s.max_eq_residual, "%.2e") << ", ineq " << fmt(s.max_ineq_violation, "%.2e") << ", iterations "
      << s.iterations << "\n";
  if (!s.diagnostics.empty()) out << "diagnostics: " << s.diagnostics << "\n";
  if (r.flat) {
    out << "flatness (rank_tol " << fmt(cfg.rank_tol, "%.1e") << "):";
    for (const auto& e : r.flat->entries) {
      out << " delta=" << e.delta << " " << e.rank_t << "/" << e.rank_lower << (e.flat ? " flat" : "");
      out << ";";
    }
    out << "\n";
  }
  print_baselines(out, r.baselines);
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  if (!cfg.csv.empty()) {
    append_csv(cfg.csv, csv_row(inst.params, to_string(r.kind), r.t, r.variants, r.value, to_string(r.status)));
  }
  const bool failed = r.status == SolveStatus::max_iter || r.status == SolveStatus::numerical_error;
  return failed ? kExitSolver : kExitOk;
}

struct Range {
  double lo = 0, hi = 0, step = 1;
  int count() const {
    if (hi < lo) return 0;
    return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  }
};

Range parse_range(const std::string& s, const char* flag) {
  std::string t = s;
  for (char& c : t) {
    if (c == ':') c = ',';
  }
  const std::vector<double> v = parse_list(t, flag);
  if (v.size() != 3 || !(v[2] > 0)) throw ParseError(std::string(flag) + " expects lo:hi:step with step > 0", 1, 1);
  return {v[0], v[1], v[2]};
}

int cmd_sweep(const Config& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.family.empty()) throw CLI::ValidationError("--family is required");
  if (cfg.p1.empty()) throw CLI::ValidationError("--p1 is required");
  if (cfg.skip_existing && cfg.csv.empty()) throw CLI::ValidationError("--skip-existing needs --csv");
  const Range r1 = parse_range(cfg.p1, "--p1");
  const Range r2 = cfg.p2.empty() ? Range{0, 0, 1} : parse_range(cfg.p2, "--p2");
  const bool two = !cfg.p2.empty();
  const std::vector<double> extra = cfg.extra.empty() ? std::vector<double>{} : parse_list(cfg.extra, "--extra");
  const RankKind kind = parse_kind(cfg.kind);
  // Validate the family name once, before any work.
  {
    std::vector<double> probe{r1.lo};
    if (two) probe.push_back(r2.lo);
    probe.insert(probe.end(), extra.begin(), extra.end());
    if (r1.count() > 0 && r2.count() > 0) gen(cfg.family, probe);
  }

  std::vector<std::vector<double>> points;
  for (int i = 0; i < r1.count(); ++i) {
    for (int j = 0; j < (two ? r2.count() : 1); ++j) {
      std::vector<double> p{grid_value(r1.lo, r1.step, i)};
      if (two) p.push_back(grid_value(r2.lo, r2.step, j));
      points.push_back(std::move(p));
    }
  }

  const BoundOptions opts = make_options(cfg);

  // Rows are keyed by their first five columns.
  auto key_of = [&](const std::vector<double>& p, const std::string& variants) {
    const std::string row = csv_row(p, to_string(kind), cfg.t, variants, std::nullopt, "");
    return row.substr(0, row.size() - 2);
  };
  std::map<std::string, std::string> existing;
  if (cfg.skip_existing) {
    std::ifstream in(cfg.csv);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (first) {
        first = false;
        continue;
      }
      int commas = 0;
      std::size_t cut = 0;
      for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == ',' && ++commas == 5) {
          cut = i;
          break;
        }
      }
      if (commas == 5) existing[line.substr(0, cut)] = line;
    }
  }

  std::vector<std::string> rows(points.size());
  std::vector<std::string> notes(points.size());
  auto work = [&](std::size_t idx) {
    const std::vector<double>& p = points[idx];
    std::vector<double> params = p;
    params.insert(params.end(), extra.begin(), extra.end());
    std::string status;
    std::optional<double> value;
    std::string variants = "none";
    try {
      BoundRequest req;
      req.kind = kind;
      req.A = shape(gen(cfg.family, params).values, cfg);
      req.t = cfg.t;
      req.variants = make_variants(cfg, req.A.rows());
      variants = req.variants.str();
      if (auto it = existing.find(key_of(p, variants)); it != existing.end()) {
        rows[idx] = it->second;
        return;
      }
      const BoundResult r = compute_bound(req, opts);
      status = to_string(r.status);
      value = r.value;
    } catch (const std::exception& e) {
      status = "error";
      notes[idx] = e.what();
    }
    rows[idx] = csv_row(p, to_string(kind), cfg.t, variants, value, status);
  };
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || points.size() < 2) {
    for (std::size_t i = 0; i < points.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < points.size(); i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::string text = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) text += r + "\n";
  for (std::size_t i = 0; i < notes.size(); ++i) {
    if (!notes[i].empty()) err << "point " << i + 1 << ": " << notes[i] << "\n";
  }
  if (cfg.csv.empty()) {
    out << text;
  } else {
    std::ofstream o(cfg.csv, std::ios::binary | std::ios::trunc);
    if (!o) throw std::runtime_error("cannot write '" + cfg.csv + "'");
    o << text;
    out << "wrote " << rows.size() << " rows to " << cfg.csv << "\n";
  }
  return kExitOk;
}

int cmd_export(const Config& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.out.empty() == !cfg.to_stdout) throw CLI::ValidationError("give exactly one of --out and --stdout");
  const Instance inst = load_instance(cfg);
  BoundRequest req;
  req.kind = parse_kind(cfg.kind);
  req.A = inst.A;
  req.t = cfg.t;
  req.variants = make_variants(cfg, inst.A.rows());
  BuiltProblem bp = build(req);
  for (const auto& w : bp.warnings) err << "warning: " << w << "\n";
  SdpaOptions so;
  so.equality_extension = cfg.equality_extension;
  const std::string text = export_sdpa(bp.problem, so);
  if (cfg.to_stdout) {
    out << text;
  } else {
    std::ofstream o(cfg.out, std::ios::binary | std::ios::trunc);
    if (!o) throw std::runtime_error("cannot write '" + cfg.out + "'");
    o << text;
    if (!o.flush()) throw std::runtime_error("cannot write '" + cfg.out + "'");
    out << "wrote " << cfg.out << " (" << bp.problem.nvars << " variables, " << bp.problem.blocks.size()
        << " blocks)\n";
  }
  return kExitOk;
}

int cmd_baselines(const Config& cfg, std::ostream& out, std::ostream&) {
  const Instance inst = load_instance(cfg);
  const RankKind kind = parse_kind(cfg.kind);
  out << "instance: " << inst.provenance << " (" << inst.A.rows() << "x" << inst.A.cols() << ")\n";
  out << "kind: " << to_string(kind) << "\n";
  print_baselines(out, baselines(kind, inst.A, make_options(cfg).solver));
  return kExitOk;
}

int cmd_check(const Config& cfg, std::ostream& out, std::ostream& err) {
  const RankKind kind = parse_kind(cfg.kind);
  if (kind != RankKind::cp && kind != RankKind::cpsd) {
    err << "error: check supports --kind cp or cpsd only\n";
    return kExitUsage;
  }
  const Instance inst = load_instance(cfg);
  const Eigen::Index n = inst.A.rows();
  const double cap = static_cast<double>(n * (n + 1) / 2);
  out << "instance: " << inst.provenance << " (" << n << "x" << inst.A.cols() << ")\n";
  for (int t = 1; t <= cfg.t; ++t) {
    BoundRequest req;
    req.kind = kind;
    req.A = inst.A;
    req.t = t;
    req.variants = make_variants(cfg, n);
    const BoundResult r = compute_bound(req, make_options(cfg));
    out << "level " << t << ": status " << to_string(r.status);
    if (r.value) out << ", value " << fmt(*r.value);
    out << "\n";
    if (r.status == SolveStatus::infeasible) {
      out << "result: not " << (kind == RankKind::cp ? "completely positive" : "cpsd")
          << " (relaxation infeasible at level " << t << ")\n";
      if (!r.solution.diagnostics.empty()) out << "certificate: " << r.solution.diagnostics << "\n";
      return kExitOk;
    }
    if (!r.value) {
      out << "result: inconclusive (solver stopped with status " << to_string(r.status) << ")\n";
      return kExitSolver;
    }
    if (kind == RankKind::cp && *r.value > cap + 1e-6 * (1.0 + cap)) {
      out << "result: not completely positive (bound " << fmt(*r.value) << " exceeds cp-rank cap " << fmt(cap)
          << " at level " << t << ")\n";
      return kExitOk;
    }
  }
  out << "result: inconclusive";
  if (kind == RankKind::cp) out << " (bounds stay within cp-rank cap " << fmt(cap) << ")";
  out << "\n";
  return kExitOk;
}

double env_tol(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  char* end = nullptr;
  const double d = std::strtod(v, &end);
  if (*end != '\0' || !(d > 0)) throw CLI::ValidationError(std::string(name) + " must be a positive number");
  return d;
}

void add_instance(CLI::App* sc, Config& cfg) {
  sc->add_option("--gen", cfg.gen, "generator spec name[:p1,p2,...]");
  sc->add_option("--file", cfg.file, "matrix file (comma or whitespace separated)");
  sc->add_flag("--transpose", cfg.transpose, "use the transposed matrix");
  sc->add_option("--row-scale", cfg.row_scale, "comma-separated row factors d, A <- diag(d) A");
}

void add_model(CLI::App* sc, Config& cfg) {
  sc->add_option("--kind", cfg.kind, "cpsd | cp | nonneg | psd | nuclear")->capture_default_str();
  sc->add_option("--t", cfg.t, "hierarchy level")->capture_default_str()->check(CLI::PositiveNumber);
  sc->add_flag("--dagger", cfg.dagger, "positivity rows (+ tensor constraints for cp)");
  sc->add_option("--V", cfg.V, "localizer vectors 'v1,...,vn;w1,...,wn'");
  sc->add_option("--sphere-grid", cfg.sphere_grid, "add the level-k sphere grid to V");
  sc->add_flag("--kernel", cfg.kernel, "kernel and zero-entry ideal (cpsd)");
  sc->add_option("--bilinear", cfg.bilinear, "bilinear block on localizer pair i:j (0-based)");
  sc->add_flag("--bilinear-cross", cfg.bilinear_cross, "all (x_i, colsum_j - x_{m+j}) bilinear blocks (psd)");
  sc->add_option("--tensor-levels", cfg.tensor_levels, "extra tensor levels (cp)");
  sc->add_flag("--extra-monomials", cfg.extra_monomials, "monomials of degree 1 and 2 as localizers (cp)");
  sc->add_flag("--psd-ideal-rows", cfg.psd_ideal_rows, "impose sum x_i = 1 by ideal rows instead of elimination");
}

void add_solver(CLI::App* sc, Config& cfg) {
  sc->add_option("--feas-tol", cfg.feas_tol, "feasibility tolerance")->capture_default_str();
  sc->add_option("--gap-tol", cfg.gap_tol, "relative gap tolerance")->capture_default_str();
  sc->add_option("--max-iter", cfg.max_iter, "iteration limit")->capture_default_str();
  sc->add_option("--rank-tol", cfg.rank_tol, "relative numeric rank threshold")->capture_default_str();
  sc->add_flag("--verbose", cfg.verbose, "print solver iterations to stderr");
  sc->add_flag("--no-presolve", cfg.no_presolve, "keep equality rows and block kernels in the IPM");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"SDP lower bounds on cpsd-, cp-, nonnegative and psd-rank", "rankbound"};
  app.require_subcommand(1);
  try {
    cfg.feas_tol = env_tol("RANKBOUND_FEAS_TOL", cfg.feas_tol);
    cfg.gap_tol = env_tol("RANKBOUND_GAP_TOL", cfg.gap_tol);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App* bound = app.add_subcommand("bound", "compute one bound");
  add_instance(bound, cfg);
  add_model(bound, cfg);
  add_solver(bound, cfg);
  bound->add_option("--csv", cfg.csv, "append a CSV row to this file");

  CLI::App* sweep = app.add_subcommand("sweep", "bounds over a parameter grid");
  sweep->add_option("--family", cfg.family, "generator family")->required();
  sweep->add_option("--p1", cfg.p1, "first parameter grid lo:hi:step")->required();
  sweep->add_option("--p2", cfg.p2, "second parameter grid lo:hi:step");
  sweep->add_option("--extra", cfg.extra, "fixed parameters appended after the swept ones");
  sweep->add_flag("--transpose", cfg.transpose, "use transposed matrices");
  sweep->add_option("--row-scale", cfg.row_scale, "comma-separated row factors");
  add_model(sweep, cfg);
  add_solver(sweep, cfg);
  sweep->add_option("--csv", cfg.csv, "output CSV (default: stdout)");
  sweep->add_option("--jobs", cfg.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_flag("--skip-existing", cfg.skip_existing, "reuse rows already present in --csv");

  CLI::App* exp = app.add_subcommand("export", "write the SDP in sparse SDPA format");
  add_instance(exp, cfg);
  add_model(exp, cfg);
  exp->add_option("--out", cfg.out, "output path");
  exp->add_flag("--stdout", cfg.to_stdout, "write to standard output");
  exp->add_flag("--equality-extension", cfg.equality_extension, "keep equalities as a marked block");

  CLI::App* base = app.add_subcommand("baselines", "closed-form and simple SDP baselines");
  add_instance(base, cfg);
  base->add_option("--kind", cfg.kind, "cpsd | cp | nonneg | psd | nuclear")->capture_default_str();
  add_solver(base, cfg);

  CLI::App* check = app.add_subcommand("check", "cp / cpsd non-membership test over levels 1..t");
  add_instance(check, cfg);
  add_model(check, cfg);
  add_solver(check, cfg);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (!app.get_subcommands().empty()) err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (bound->parsed()) return cmd_bound(cfg, out, err);
    if (sweep->parsed()) return cmd_sweep(cfg, out, err);
    if (exp->parsed()) return cmd_export(cfg, out, err);
    if (base->parsed()) return cmd_baselines(cfg, out, err);
    if (check->parsed()) return cmd_check(cfg, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitInput;
  } catch (const UnknownFamily& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ParamRange& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace rankbound
