#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "proxuc/config.hpp"
#include "proxuc/errors.hpp"
#include "proxuc/moduli.hpp"
#include "proxuc/spaces.hpp"
#include "proxuc/verify.hpp"
#include "proxuc/young.hpp"

namespace {

using nlohmann::json;
using namespace proxuc;

constexpr const char* kVersion = "1.0.0";

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Lower quantile of a sorted sample, no interpolation (keeps replays bitwise).
double quantile(const std::vector<double>& sorted, double p) {
  size_t i = static_cast<size_t>(p * static_cast<double>(sorted.size() - 1));
  return sorted[std::min(i, sorted.size() - 1)];
}

std::string iso_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_report(const std::filesystem::path& dir, const CheckOutcome& out) {
  json rep;
  rep["name"] = out.name;
  rep["kind"] = check_kind_name(out.kind);
  rep["pass"] = out.pass;
  rep["samples"] = out.samples;
  rep["violations"] = out.violations;
  rep["solver_failures"] = out.solver_failures;
  rep["min_margin"] = out.min_margin;  // nonfinite serializes as null
  if (out.margins.empty()) {
    rep["margin_quantiles"] = nullptr;
  } else {
    std::vector<double> m = out.margins;
    std::sort(m.begin(), m.end());
    rep["margin_quantiles"] = {{"min", m.front()},
                               {"q01", quantile(m, 0.01)},
                               {"median", quantile(m, 0.5)},
                               {"max", m.back()}};
  }
  rep["witness"] = out.witness_json.empty() ? json() : json::parse(out.witness_json);
  rep["notes"] = out.notes;

  std::ofstream f(dir / (out.name + ".json"), std::ios::binary);
  if (!f) throw InternalError("cannot write report for check '" + out.name + "'");
  f << rep.dump(2) << "\n";
  // Wall-clock facts live on this single line so byte comparisons can drop it.
  json meta;
  meta["_meta"] = {{"runtime_seconds", out.runtime_seconds}, {"written_at", iso_now()}};
  f << meta.dump() << "\n";
}

void append_csv_row(std::ostream& csv, const CheckOutcome& out) {
  csv << out.name << ',' << check_kind_name(out.kind) << ',' << out.samples << ','
      << out.violations << ',' << out.solver_failures << ',' << fmt17(out.min_margin);
  if (out.margins.empty()) {
    csv << ",nan,nan,nan";
  } else {
    std::vector<double> m = out.margins;
    std::sort(m.begin(), m.end());
    csv << ',' << fmt17(quantile(m, 0.01)) << ',' << fmt17(quantile(m, 0.5)) << ','
        << fmt17(m.back());
  }
  csv << ',' << (out.pass ? "pass" : "fail") << '\n';
}

int run_batch(const Config& cfg, const std::string& out_override, int workers_override) {
  const std::filesystem::path dir =
      out_override.empty() ? std::filesystem::path(cfg.run.out_dir)
                           : std::filesystem::path(out_override);
  std::filesystem::create_directories(dir);

  const size_t n = cfg.run.checks.size();
  if (n == 0) {
    std::cerr << "config defines no checks\n";
    return 2;
  }

  int workers = workers_override > 0 ? workers_override : cfg.run.workers;
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<size_t>(workers, n));

  std::vector<CheckOutcome> outcomes(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> cursor{0};
  auto work = [&]() {
    for (;;) {
      size_t i = cursor.fetch_add(1);
      if (i >= n) return;
      try {
        outcomes[i] = run_check(cfg.run.checks[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (size_t i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);

  std::ofstream csv(dir / "margins.csv", std::ios::binary);
  if (!csv) throw InternalError("cannot write margins.csv");
  csv << "name,kind,samples,violations,solver_failures,min_margin,q01,median,max,verdict\n";

  bool all_pass = true;
  for (const CheckOutcome& out : outcomes) {
    write_report(dir, out);
    append_csv_row(csv, out);
    all_pass = all_pass && out.pass;
    std::printf("%s %s [%s] samples=%ld violations=%ld solver_failures=%ld min_margin=%s (%.2fs)\n",
                out.pass ? "PASS" : "FAIL", out.name.c_str(),
                check_kind_name(out.kind).c_str(), out.samples, out.violations,
                out.solver_failures, fmt17(out.min_margin).c_str(), out.runtime_seconds);
  }
  std::printf("%zu/%zu checks passed, reports in %s\n",
              static_cast<size_t>(std::count_if(outcomes.begin(), outcomes.end(),
                                                [](const CheckOutcome& o) { return o.pass; })),
              n, dir.string().c_str());
  return all_pass ? 0 : 1;
}

struct ModulusRow {
  std::string table;
  double space_p;
  std::string young;
  double young_p;  // 0 for the transcendental kernels
  double param_r;
  double lam;
  double eps;
  double value;
};

// Continuity moduli of the proximal map on the Hilbert ball of radius 10.
// The base table ignores the step parameter entirely; the step-aware table
// holds the transcendental kernels, whose values tighten strictly as the
// step shrinks. Power kernels are omitted from the step-aware table because
// the step cancels for them and the rows would repeat the base table.
std::vector<ModulusRow> moduli_rows() {
  const NormedSpace S = make_lp_space(2, 2.0);
  const double R = 10.0;
  const std::vector<double> lams = {1.0, 0.5, 0.1};
  const std::vector<double> epss = {0.5, 1.0, 1.5};

  std::vector<ModulusRow> rows;
  for (const YoungFunction& F : {power_young(2.0), exp_young(), cosh_young()}) {
    const double yp = F.kind == YoungKind::Power ? F.p : 0.0;
    const Modulus base = prox_uc_modulus(S, F, R);
    for (double lam : lams)
      for (double eps : epss)
        rows.push_back({"prox_uc", S.p, young_name(F), yp, R, lam, eps, base(eps)});
  }
  for (const YoungFunction& F : {exp_young(), cosh_young()}) {
    for (double lam : lams) {
      const Modulus alt = prox_uc_modulus_alt(S, F, R, lam);
      for (double eps : epss)
        rows.push_back({"prox_uc_alt", S.p, young_name(F), 0.0, R, lam, eps, alt(eps)});
    }
  }
  return rows;
}

int run_tabulate(const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  const std::vector<ModulusRow> rows = moduli_rows();

  std::ofstream csv(dir / "moduli.csv", std::ios::binary);
  if (!csv) throw InternalError("cannot write moduli.csv");
  csv << "table,space_p,young,young_p,param_r,lam,eps,value\n";
  json arr = json::array();
  for (const ModulusRow& r : rows) {
    csv << r.table << ',' << fmt17(r.space_p) << ',' << r.young << ',' << fmt17(r.young_p) << ','
        << fmt17(r.param_r) << ',' << fmt17(r.lam) << ',' << fmt17(r.eps) << ','
        << fmt17(r.value) << '\n';
    arr.push_back({{"table", r.table},
                   {"space_p", r.space_p},
                   {"young", r.young},
                   {"young_p", r.young_p},
                   {"param_r", r.param_r},
                   {"lam", r.lam},
                   {"eps", r.eps},
                   {"value", r.value}});
  }
  std::ofstream js(dir / "moduli.json", std::ios::binary);
  if (!js) throw InternalError("cannot write moduli.json");
  js << arr.dump(2) << "\n";
  std::printf("wrote %zu modulus rows to %s\n", rows.size(), dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified moduli and sampled checks for proximal maps on l_p spaces"};
  app.require_subcommand(1);

  std::string run_config, run_out, tab_config, tab_out;
  int run_workers = 0;
  CLI::App* run = app.add_subcommand("run", "execute the checks in a config file");
  run->add_option("config", run_config, "configuration file")->required();
  run->add_option("--out", run_out, "report directory (overrides the config)");
  run->add_option("--workers", run_workers, "worker threads (overrides the config)")
      ->check(CLI::PositiveNumber);

  CLI::App* tab = app.add_subcommand("tabulate", "write the modulus tables");
  tab->add_option("config", tab_config, "configuration file supplying [tabulate] settings");
  tab->add_option("--out", tab_out, "table directory (overrides the config)");

  CLI::App* list = app.add_subcommand("list-checks", "describe the available check kinds");
  CLI::App* ver = app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ver->parsed()) {
      std::printf("proxuc %s\n", kVersion);
      return 0;
    }
    if (list->parsed()) {
      for (proxuc::CheckKind k : proxuc::all_check_kinds())
        std::printf("%-24s %s\n", proxuc::check_kind_name(k).c_str(),
                    proxuc::check_kind_summary(k).c_str());
      return 0;
    }
    if (tab->parsed()) {
      std::string out = "tables";
      if (!tab_config.empty()) out = proxuc::parse_config_file(tab_config).tabulate.out_dir;
      if (!tab_out.empty()) out = tab_out;
      return run_tabulate(out);
    }
    proxuc::Config cfg = proxuc::parse_config_file(run_config);
    return run_batch(cfg, run_out, run_workers);
  } catch (const proxuc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
