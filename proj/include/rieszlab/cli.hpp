#pragma once
//
// Command-line driver: run configuration, the experiments behind each
// subcommand, and CSV output. Kept in a header so the tests can drive it
// in-process; tools/rieszlab.cpp only forwards argv.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "rieszlab/errors.hpp"
#include "rieszlab/helson_szego.hpp"
#include "rieszlab/multiplier.hpp"
#include "rieszlab/projection.hpp"
#include "rieszlab/similarity.hpp"
#include "rieszlab/weights.hpp"

namespace rieszlab::cli {

inline constexpr const char* kCsvHeader =
    "command,weight,alpha,param,n,quantity,value,certified_bound,cond_estimate,wall_time_ms,seed";

struct RunConfig {
  std::string command;
  // weight
  std::string weight;
  std::vector<double> alpha;
  double scale = 1.0;
  double power = 1.0;
  std::vector<double> levels;
  std::vector<double> breakpoints;
  std::string samples;
  // sizes
  std::vector<int> sections;
  std::vector<int> dim;
  int degree = 400;
  int grid = 8192;
  int iters = 1000;
  // multiplier
  std::string family = "gauss";
  double c = 1.0;
  std::vector<std::uint64_t> powers;
  int patterns = 64;
  std::uint64_t seed = 1;
  // sweep
  std::vector<double> exponents;
  // switches
  bool extrapolate = false;
  bool basis = false;
  bool tail = false;
  bool explicit_sector = false;
  bool timing = false;
  // files and tolerances
  std::string out;
  std::string cert;
  double tol = 1e-10;
  double quad_tol = 1e-10;
};

struct ResultRow {
  std::string command;
  std::string weight;
  std::optional<double> alpha;
  std::string param;
  std::optional<std::uint64_t> n;
  std::string quantity;
  std::optional<double> value;  // empty on an error row
  std::optional<double> certified_bound;
  std::optional<double> cond_estimate;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
};

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_alpha(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

inline std::string format_param(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

inline void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const ResultRow& r : rows) {
    out << r.command << ',' << r.weight << ',' << (r.alpha ? format_alpha(*r.alpha) : std::string()) << ',' << r.param << ','
        << (r.n ? std::to_string(*r.n) : std::string()) << ',' << r.quantity << ',' << opt(r.value) << ','
        << opt(r.certified_bound) << ',' << opt(r.cond_estimate) << ',' << format_number(r.wall_time_ms) << ','
        << r.seed << '\n';
  }
}

/// Rows ordered by command, weight, alpha, parameter, n, quantity.
inline void sort_rows(std::vector<ResultRow>& rows) {
  auto key = [](const ResultRow& r) {
    return std::make_tuple(r.command, r.weight, r.alpha.value_or(-1.0), r.param, r.n.value_or(0), r.quantity);
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const ResultRow& a, const ResultRow& b) { return key(a) < key(b); });
}

/// key=value lines, sorted by key, for every setting that affects the output.
inline std::string canonical_config(const RunConfig& c) {
  auto list = [](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(v[i])>>)
        s += format_number(v[i]);
      else
        s += std::to_string(v[i]);
    }
    return s;
  };
  std::map<std::string, std::string> kv{
      {"command", c.command},           {"weight", c.weight},
      {"alpha", list(c.alpha)},         {"scale", format_number(c.scale)},
      {"power", format_number(c.power)}, {"levels", list(c.levels)},
      {"breakpoints", list(c.breakpoints)}, {"samples", c.samples},
      {"sections", list(c.sections)},   {"dim", list(c.dim)},
      {"degree", std::to_string(c.degree)}, {"grid", std::to_string(c.grid)},
      {"iters", std::to_string(c.iters)}, {"family", c.family},
      {"c", format_number(c.c)},        {"powers", list(c.powers)},
      {"patterns", std::to_string(c.patterns)}, {"seed", std::to_string(c.seed)},
      {"exponents", list(c.exponents)}, {"extrapolate", c.extrapolate ? "true" : "false"},
      {"basis", c.basis ? "true" : "false"}, {"tail", c.tail ? "true" : "false"},
      {"explicit", c.explicit_sector ? "true" : "false"}, {"cert", c.cert},
      {"tol", format_number(c.tol)},    {"quad-tol", format_number(c.quad_tol)}};
  std::string s;
  for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
  return s;
}

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline bool uses_alpha(const std::string& family) { return family == "tan-alpha" || family == "abs-theta-alpha"; }

inline WeightSpec read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read samples file " + path);
  return read_sampled_weight(in);
}

// One weight per alpha value (a single entry with no alpha for the other families).
inline std::vector<std::pair<std::optional<double>, WeightSpec>> weights(const RunConfig& c) {
  if (c.weight.empty()) throw DomainError("--weight is required");
  std::vector<std::pair<std::optional<double>, WeightSpec>> out;
  auto finish = [&](WeightSpec w) {
    if (c.power != 1.0) w = WeightSpec::power_of(w, c.power);
    if (c.scale != 1.0) w = w.scaled(c.scale);
    return w;
  };
  if (uses_alpha(c.weight)) {
    if (c.alpha.empty()) throw DomainError("--alpha is required for " + c.weight);
    for (double a : c.alpha)
      out.emplace_back(a, finish(c.weight == "tan-alpha" ? WeightSpec::tan_alpha(a) : WeightSpec::abs_theta_alpha(a)));
    return out;
  }
  if (!c.alpha.empty()) throw DomainError("--alpha applies only to tan-alpha and abs-theta-alpha");
  if (c.weight == "constant")
    out.emplace_back(std::nullopt, finish(WeightSpec::constant()));
  else if (c.weight == "piecewise-step")
    out.emplace_back(std::nullopt, finish(WeightSpec::piecewise_step(c.levels, c.breakpoints)));
  else if (c.weight == "sampled") {
    if (c.samples.empty()) throw DomainError("--samples is required for sampled weights");
    out.emplace_back(std::nullopt, finish(read_samples(c.samples)));
  } else
    throw DomainError("unknown weight family " + c.weight);
  return out;
}

inline MultiplierSequence sequence(const RunConfig& c, int length) {
  if (c.family != "gauss") throw Unsupported("multiplier family " + c.family + " is not available from the CLI");
  return MultiplierSequence::gauss(c.c, std::max(length, 2));
}

class Stopwatch {
 public:
  explicit Stopwatch(bool on) : on_(on), t0_(std::chrono::steady_clock::now()) {}
  double ms() const {
    if (!on_) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point t0_;
};

inline std::string section_param(const RunConfig& c, int M) {
  return "M=" + std::to_string(M) + " " + c.family + " c=" + format_param(c.c);
}

}  // namespace detail

/// Runs one subcommand. Per-row failures in sweep are recorded as rows with an
/// empty value and their messages appended to `notes`; everything else throws.
inline std::vector<ResultRow> run(const RunConfig& c, std::vector<std::string>& notes) {
  std::vector<ResultRow> rows;
  const QuadratureConfig quad{.abs_tol = c.quad_tol};
  const PowerIterationOptions pio{.tol = c.tol};
  auto row = [&](const WeightSpec& w, std::optional<double> a) {
    ResultRow r;
    r.command = c.command;
    r.weight = w.id();
    r.alpha = a;
    r.seed = c.seed;
    return r;
  };

  if (c.command == "riesz-norm") {
    std::vector<int> sections = c.sections.empty() ? std::vector<int>{16, 32, 64} : c.sections;
    std::sort(sections.begin(), sections.end());
    sections.erase(std::unique(sections.begin(), sections.end()), sections.end());
    for (const auto& [a, w] : detail::weights(c)) {
      const FourierTable ft = fourier_coeffs(w, 2 * sections.back(), quad);
      for (int N : sections) {
        detail::Stopwatch sw(c.timing);
        const AngleResult res = riesz_norm_section(ft, N, pio);
        ResultRow r = row(w, a);
        r.param = "section";
        r.n = static_cast<std::uint64_t>(N);
        r.quantity = "sec_phi";
        r.value = res.sec_phi;
        r.cond_estimate = res.cond_estimate;
        r.wall_time_ms = sw.ms();
        rows.push_back(r);
      }
      if (c.extrapolate) {
        detail::Stopwatch sw(c.timing);
        const Extrapolation e = riesz_norm_extrapolate(ft, sections, pio);
        ResultRow r = row(w, a);
        r.param = "aitken (experimental)";
        r.n = static_cast<std::uint64_t>(sections.back());
        r.quantity = "sec_phi";
        r.value = e.value;
        r.wall_time_ms = sw.ms();
        rows.push_back(r);
      }
    }
  } else if (c.command == "hs-certificate") {
    const auto ws = detail::weights(c);
    if (!c.cert.empty() && ws.size() != 1) throw DomainError("--cert needs exactly one weight");
    for (const auto& [a, w] : ws) {
      detail::Stopwatch sw(c.timing);
      AnalyticCertificate cert;
      std::string param = "degree=" + std::to_string(c.degree) + " grid=" + std::to_string(c.grid);
      if (c.explicit_sector) {
        if (w.family() != WeightSpec::Family::tan_alpha || c.scale != 1.0 || c.power != 1.0)
          throw DomainError("--explicit certifies the plain tan-alpha family only");
        cert = explicit_sector_certificate(w.alpha(), c.degree, c.grid);
        param = "explicit " + param;
      } else {
        cert = hs_search(w, c.degree, c.grid, c.iters);
      }
      ResultRow r = row(w, a);
      r.param = param;
      r.n = static_cast<std::uint64_t>(c.degree);
      r.quantity = "hs_ratio";
      r.value = cert.ratio;
      if (cert.ratio < 1.0) r.certified_bound = certificate_to_bound(cert);
      r.wall_time_ms = sw.ms();
      rows.push_back(r);
      if (!c.cert.empty()) {
        std::ofstream f(c.cert);
        if (!f) throw DomainError("cannot write certificate file " + c.cert);
        write_certificate(f, cert);
      }
    }
  } else if (c.command == "verify") {
    if (c.cert.empty()) throw DomainError("--cert is required");
    const auto ws = detail::weights(c);
    if (ws.size() != 1) throw DomainError("verify needs exactly one weight");
    std::ifstream f(c.cert);
    if (!f) throw DomainError("cannot read certificate file " + c.cert);
    const AnalyticCertificate cert = read_certificate(f);
    const auto& [a, w] = ws.front();
    WeightSpec target = w;
    if (c.explicit_sector) target = sector_weight(w.alpha());
    detail::Stopwatch sw(c.timing);
    const double s = verify_certificate(target, cert);
    ResultRow r = row(w, a);
    r.param = "verified degree=" + std::to_string(cert.degree) + " grid=" + std::to_string(cert.grid);
    r.n = static_cast<std::uint64_t>(cert.degree);
    r.quantity = "hs_ratio";
    r.value = s;
    r.certified_bound = 1.0 / std::sqrt((1.0 - s) * (1.0 + s));
    r.wall_time_ms = sw.ms();
    rows.push_back(r);
  } else if (c.command == "power-norms") {
    const std::vector<int> dims = c.dim.empty() ? std::vector<int>{64} : c.dim;
    const int L = *std::max_element(dims.begin(), dims.end());
    const MultiplierSequence seq = detail::sequence(c, L);
    const PowerSchedule sched(seq);
    const std::vector<std::uint64_t> powers =
        c.powers.empty() ? power_sweep_grid(sched, std::min(4, sched.size() - 1)) : c.powers;
    for (const auto& [a, w] : detail::weights(c)) {
      const FourierTable ft = fourier_coeffs(w, L, quad);
      for (int M : dims) {
        const MultiplierSection sec(ft, M);
        const std::string param = detail::section_param(c, M);
        for (std::uint64_t p : powers) {
          detail::Stopwatch sw(c.timing);
          ResultRow r = row(w, a);
          r.param = param;
          r.n = p;
          r.quantity = "power_norm";
          r.value = power_norm(seq, sec, p);
          r.cond_estimate = sec.cholesky_factor().cond_estimate();
          r.wall_time_ms = sw.ms();
          rows.push_back(r);
        }
        std::optional<double> bc;
        if (c.basis || (c.tail && !certified_riesz_norm(w))) {
          detail::Stopwatch sw(c.timing);
          bc = basis_constant_section(sec);
          if (c.basis) {
            ResultRow r = row(w, a);
            r.param = param;
            r.n = static_cast<std::uint64_t>(M);
            r.quantity = "basis_constant";
            r.value = *bc;
            r.certified_bound = certified_riesz_norm(w);
            r.cond_estimate = sec.cholesky_factor().cond_estimate();
            r.wall_time_ms = sw.ms();
            rows.push_back(r);
          }
        }
        if (c.tail) {
          const std::optional<double> exact = certified_riesz_norm(w);
          for (int n = 1; n <= 4 && n + 1 < M && n < sched.size(); ++n) {
            detail::Stopwatch sw(c.timing);
            const TailGap t = tail_gap(seq, sched, sec, n, exact ? *exact : *bc, exact.has_value());
            ResultRow r = row(w, a);
            r.param = param + (t.truncation_dominated ? " truncation-dominated" : "");
            r.n = static_cast<std::uint64_t>(n);
            r.quantity = "tail_gap";
            r.value = t.gap;
            if (t.certified) r.certified_bound = t.analytic_bound;
            r.wall_time_ms = sw.ms();
            rows.push_back(r);
          }
        }
      }
    }
  } else if (c.command == "sign-norms") {
    const std::vector<int> dims = c.dim.empty() ? std::vector<int>{64} : c.dim;
    const int L = *std::max_element(dims.begin(), dims.end());
    for (const auto& [a, w] : detail::weights(c)) {
      const FourierTable ft = fourier_coeffs(w, L, quad);
      for (int M : dims) {
        detail::Stopwatch sw(c.timing);
        const SignSweep s = max_sign_multiplier_norm(MultiplierSection(ft, M), c.patterns, c.seed);
        ResultRow r = row(w, a);
        r.param = "patterns=" + std::to_string(c.patterns);
        r.n = static_cast<std::uint64_t>(M);
        r.quantity = "sign_norm";
        r.value = s.max_norm;
        r.wall_time_ms = sw.ms();
        rows.push_back(r);
      }
    }
  } else if (c.command == "sweep") {
    for (const auto& [a, w] : detail::weights(c)) {
      {
        ResultRow r = row(w, a);
        r.param = "sec(pi/2p)";
        r.quantity = "floor";
        r.value = similarity_floor(critical_exponent(w));
        rows.push_back(r);
      }
      if (!c.exponents.empty()) {
        const int N = c.sections.empty() ? 64 : *std::max_element(c.sections.begin(), c.sections.end());
        for (const ScanRow& s : exponent_scan(w, c.exponents, N, quad, pio)) {
          ResultRow r = row(w, a);
          r.param = "w^" + format_param(s.a);
          r.n = static_cast<std::uint64_t>(N);
          r.quantity = "sec_phi";
          if (s.result) {
            r.value = s.result->sec_phi;
            r.cond_estimate = s.result->cond_estimate;
          } else {
            notes.push_back(w.id() + " w^" + format_param(s.a) + ": " + s.error);
          }
          rows.push_back(r);
        }
      }
      for (int M : c.dim) {
        detail::Stopwatch sw(c.timing);
        const SandwichReport rep = sandwich(w, detail::sequence(c, M), M, quad);
        const double ms = sw.ms();
        const std::string param = detail::section_param(c, M);
        for (const auto& [q, v] : {std::pair<const char*, double>{"lower", rep.lower}, {"upper", rep.upper}}) {
          ResultRow r = row(w, a);
          r.param = param;
          r.n = static_cast<std::uint64_t>(M);
          r.quantity = q;
          r.value = v;
          r.wall_time_ms = ms;
          rows.push_back(r);
        }
      }
    }
  } else {
    throw DomainError("unknown command " + c.command);
  }
  sort_rows(rows);
  return rows;
}

/// Exit status for an exception escaping run(): 2 for configuration
/// problems, 1 for numerical failures.
inline int exit_status(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 1;
  return 1;
}

/// Parses argv, runs, writes CSV to --out (or `out`), diagnostics to `err`.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Finite-section experiments on weighted Hardy spaces", "rieszlab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--weight", c.weight, "constant, tan-alpha, abs-theta-alpha, piecewise-step, sampled");
  app.add_option("--alpha", c.alpha, "exponent(s) in (0,1), comma separated")->delimiter(',');
  app.add_option("--scale", c.scale, "positive multiple of the weight")->check(CLI::PositiveNumber);
  app.add_option("--power", c.power, "raise the weight to this power")->check(CLI::PositiveNumber);
  app.add_option("--levels", c.levels, "piecewise-step levels")->delimiter(',');
  app.add_option("--breakpoints", c.breakpoints, "piecewise-step breakpoints in (-pi,pi)")->delimiter(',');
  app.add_option("--samples", c.samples, "file of 'theta value' lines for sampled weights");
  app.add_option("--sections", c.sections, "section sizes N")->delimiter(',')->check(CLI::PositiveNumber);
  app.add_option("--dim", c.dim, "section dims M")->delimiter(',')->check(CLI::Range(2, 4096));
  app.add_option("--degree", c.degree, "certificate degree D")->check(CLI::NonNegativeNumber);
  app.add_option("--grid", c.grid, "certificate grid size")->check(CLI::PositiveNumber);
  app.add_option("--iters", c.iters, "reweighting iterations for hs-certificate")->check(CLI::NonNegativeNumber);
  app.add_option("--family", c.family, "multiplier family (gauss)");
  app.add_option("--c", c.c, "gauss parameter: nu_n = exp(-c n^2)")->check(CLI::PositiveNumber);
  app.add_option("--powers", c.powers, "powers n for power-norms; default sweeps 0..N_4")->delimiter(',');
  app.add_option("--patterns", c.patterns, "sign patterns per dim")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "seed for sign patterns");
  app.add_option("--exponents", c.exponents, "exponent scan grid for sweep")->delimiter(',');
  app.add_flag("--extrapolate", c.extrapolate, "add an Aitken row to riesz-norm");
  app.add_flag("--basis", c.basis, "add basis_constant rows to power-norms");
  app.add_flag("--tail", c.tail, "add tail_gap rows (n = 1..4) to power-norms");
  app.add_flag("--explicit", c.explicit_sector, "use the explicit sector certificate");
  app.add_flag("--timing", c.timing, "fill wall_time_ms (otherwise 0, keeping output reproducible)");
  app.add_option("--out", c.out, "CSV output path (default stdout)");
  app.add_option("--cert", c.cert, "certificate file to write (hs-certificate) or read (verify)");
  app.add_option("--tol", c.tol, "power-iteration tolerance")->check(CLI::PositiveNumber);
  app.add_option("--quad-tol", c.quad_tol, "quadrature tolerance")->check(CLI::PositiveNumber);

  for (const char* name : {"riesz-norm", "hs-certificate", "verify", "power-norms", "sign-norms", "sweep"})
    app.add_subcommand(name)->callback([&c, name] { c.command = name; });
  app.get_subcommand("riesz-norm")->description("sec(phi) on sections N");
  app.get_subcommand("hs-certificate")->description("search (or build) an analytic certificate");
  app.get_subcommand("verify")->description("recheck a certificate file against a weight");
  app.get_subcommand("power-norms")->description("||T^n|| of a fast multiplier on M-sections");
  app.get_subcommand("sign-norms")->description("max sign-multiplier norm over seeded patterns");
  app.get_subcommand("sweep")->description("floors, exponent scans and sandwiches");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  err << "# config " << config_hash(c) << '\n';
  std::vector<std::string> notes;
  std::vector<ResultRow> rows;
  try {
    for (int M : c.dim)
      if (M < 2) throw DomainError("--dim entries must be at least 2");
    rows = run(c, notes);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_status(e);
  }
  for (const std::string& n : notes) err << "row error: " << n << '\n';

  if (c.out.empty()) {
    write_csv(out, rows);
  } else {
    std::ofstream f(c.out);
    if (!f) {
      err << "error: cannot write " << c.out << '\n';
      return 2;
    }
    write_csv(f, rows);
  }
  return 0;
}

}  // namespace rieszlab::cli
