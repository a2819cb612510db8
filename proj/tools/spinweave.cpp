// spinweave: design and analyze exchange-coupling distributions for
// near-perfect state transfer on XXZ spin chains.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinweave/analysis.hpp"
#include "spinweave/chain.hpp"
#include "spinweave/disorder.hpp"
#include "spinweave/io.hpp"
#include "spinweave/manifest.hpp"
#include "spinweave/optimize.hpp"
#include "spinweave/spectral.hpp"
#include "spinweave/transfer.hpp"
#include "spinweave/version.hpp"

namespace fs = std::filesystem;
using namespace spinweave;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitTargetUnreached = 4;

// Shortest exact decimal form, used for file names; data rows use the
// fixed 17-digit form from format_double.
std::string format_compact(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Arrival times may be given as plain numbers or as multiples of the
// chain length: "90", "3N", "0.5N", "N".
double parse_time_spec(const std::string& spec, int n_sites) {
  std::string s = spec;
  if (s.empty()) throw std::invalid_argument("empty time specification");
  double scale = 1.0;
  if (s.back() == 'N' || s.back() == 'n') {
    scale = static_cast<double>(n_sites);
    s.pop_back();
    if (s.empty()) return scale;
  }
  std::size_t used = 0;
  double value = std::stod(s, &used);
  if (used != s.size()) {
    throw std::invalid_argument("cannot parse time '" + spec + "'");
  }
  return value * scale;
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t used = 0;
  std::uint64_t v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return v;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SPINWEAVE_SEED")) {
    return parse_u64(env);
  }
  return 0;
}

NoiseLaw parse_law(const std::string& name) {
  if (name == "uniform") return NoiseLaw::uniform_unit_variance;
  if (name == "gaussian") return NoiseLaw::gaussian_unit_variance;
  throw std::invalid_argument("unknown noise law '" + name +
                              "' (expected uniform or gaussian)");
}

struct OptimizerFlags {
  int population = 0;
  int max_generations = 5000;
  double relocation_scale = 0.3;
  double anneal_factor = 0.97;
  int stall_generations = 200;
  double gradient_tolerance = 1e-10;

  OptimizerConfig to_config(std::uint64_t seed, int threads) const {
    OptimizerConfig cfg;
    cfg.population_size = population;
    cfg.max_generations = max_generations;
    cfg.relocation_scale = relocation_scale;
    cfg.anneal_factor = anneal_factor;
    cfg.stall_generations = stall_generations;
    cfg.gradient_tolerance = gradient_tolerance;
    cfg.rng_seed = seed;
    cfg.threads = threads;
    return cfg;
  }

  void store(std::map<std::string, std::string>& p) const {
    p["population"] = std::to_string(population);
    p["max-generations"] = std::to_string(max_generations);
    p["relocation-scale"] = format_double(relocation_scale);
    p["anneal-factor"] = format_double(anneal_factor);
    p["stall-generations"] = std::to_string(stall_generations);
    p["gradient-tolerance"] = format_double(gradient_tolerance);
  }

  static OptimizerFlags load(const std::map<std::string, std::string>& p) {
    OptimizerFlags f;
    f.population = std::stoi(p.at("population"));
    f.max_generations = std::stoi(p.at("max-generations"));
    f.relocation_scale = std::stod(p.at("relocation-scale"));
    f.anneal_factor = std::stod(p.at("anneal-factor"));
    f.stall_generations = std::stoi(p.at("stall-generations"));
    f.gradient_tolerance = std::stod(p.at("gradient-tolerance"));
    return f;
  }

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--population", population,
                    "probe population size (0 = max(20, 2M))");
    cmd->add_option("--max-generations", max_generations,
                    "generation cap per cube");
    cmd->add_option("--relocation-scale", relocation_scale,
                    "respawn radius as a fraction of the cube side");
    cmd->add_option("--anneal-factor", anneal_factor,
                    "per-generation shrink factor of the respawn radius");
    cmd->add_option("--stall-generations", stall_generations,
                    "stop after this many generations without improvement");
    cmd->add_option("--gradient-tolerance", gradient_tolerance,
                    "projected-gradient norm at which refinement stops");
  }
};

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

// ---------------------------------------------------------------- design

struct DesignOptions {
  int n = 0;
  double delta = 1.0;
  std::string time_spec;
  double j_start = 1.0;
  double j_end = 0.0;
  double j_step = 0.5;
  std::optional<std::uint64_t> seed_flag;
  std::optional<double> target;
  bool asymmetric = false;
  OptimizerFlags opt;
  std::string out_dir = ".";
  int threads = 0;
};

int run_design(const DesignOptions& o) {
  ChainParameters params{o.n, o.delta};
  double arrival = parse_time_spec(o.time_spec, o.n);
  std::uint64_t seed = resolve_seed(o.seed_flag);
  OptimizerConfig cfg = o.opt.to_config(seed, o.threads);

  auto records = hypercube_sweep(params, arrival, o.j_start, o.j_end,
                                 o.j_step, cfg, !o.asymmetric, o.target);

  fs::create_directories(o.out_dir);
  RunManifest manifest;
  manifest.command = "design";
  manifest.rng_seed = seed;
  auto& p = manifest.parameters;
  p["n"] = std::to_string(o.n);
  p["delta"] = format_double(o.delta);
  p["time"] = format_double(arrival);
  p["jmax-start"] = format_double(o.j_start);
  p["jmax-end"] = format_double(o.j_end);
  p["jmax-step"] = format_double(o.j_step);
  p["seed"] = std::to_string(seed);
  p["asymmetric"] = o.asymmetric ? "1" : "0";
  if (o.target) p["target"] = format_double(*o.target);
  o.opt.store(p);

  std::string stem = "ecd_N" + std::to_string(o.n) + "_d" +
                     format_compact(o.delta) + "_T" + format_compact(arrival);
  for (const auto& rec : records) {
    std::string name = stem + "_k" + std::to_string(rec.k) + ".csv";
    write_ecd_file((fs::path(o.out_dir) / name).string(),
                   EcdFileData{o.n, o.delta, arrival, rec.j_max,
                               rec.population, rec.ecd});
    manifest.artifact_paths.push_back(name);
    std::cout << "k=" << rec.k << " jmax=" << format_compact(rec.j_max)
              << " P=" << format_double(rec.population) << "\n";
  }
  write_manifest((fs::path(o.out_dir) / ("manifest_" + stem + ".json")).string(),
                 manifest);

  if (o.target && records.back().population < *o.target) {
    std::cerr << "target " << format_compact(*o.target)
              << " not reached by jmax=" << format_compact(o.j_end) << "\n";
    return kExitTargetUnreached;
  }
  return kExitOk;
}

// -------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string ecd_file;
  std::optional<double> delta_override;
  std::string time_spec;
  std::string grid_spec;
  std::string out;
};

int run_evaluate(const EvaluateOptions& o) {
  EcdFileData data = read_ecd_file(o.ecd_file);
  double delta = o.delta_override ? *o.delta_override : data.delta;
  ChainParameters params{data.n_sites, delta};
  SpectralDecomposition decomp = decompose(params, data.ecd);

  auto emit_row = [&](std::ostream& os, double t) {
    double pop = transferred_population(decomp, t);
    os << format_double(t) << "," << format_double(pop) << ","
       << format_double(averaged_fidelity(pop)) << "\n";
  };

  std::vector<double> times;
  if (!o.grid_spec.empty()) {
    auto parts = split(o.grid_spec, ':');
    if (parts.size() != 3) {
      throw std::invalid_argument("grid must be start:end:step");
    }
    double t0 = parse_time_spec(parts[0], data.n_sites);
    double t1 = parse_time_spec(parts[1], data.n_sites);
    double dt = parse_time_spec(parts[2], data.n_sites);
    if (!(dt > 0.0) || t1 < t0) {
      throw std::invalid_argument("bad grid '" + o.grid_spec + "'");
    }
    for (int i = 0;; ++i) {
      double t = t0 + i * dt;
      if (t > t1 + 1e-12 * std::max(1.0, std::abs(t1))) break;
      times.push_back(t);
    }
  } else {
    times.push_back(parse_time_spec(o.time_spec, data.n_sites));
  }

  if (o.out.empty()) {
    for (double t : times) emit_row(std::cout, t);
    return kExitOk;
  }

  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot open '" + o.out + "'");
  for (double t : times) emit_row(out, t);
  out.flush();

  RunManifest manifest;
  manifest.command = "evaluate";
  manifest.parameters["ecd"] = fs::absolute(o.ecd_file).string();
  if (o.delta_override) {
    manifest.parameters["delta"] = format_double(*o.delta_override);
  }
  if (!o.grid_spec.empty()) {
    manifest.parameters["grid"] = o.grid_spec;
  } else {
    manifest.parameters["time"] = o.time_spec;
  }
  manifest.parameters["out"] = fs::path(o.out).filename().string();
  manifest.artifact_paths.push_back(fs::path(o.out).filename().string());
  write_manifest(o.out + ".manifest.json", manifest);
  return kExitOk;
}

// -------------------------------------------------------------- disorder

struct DisorderOptions {
  std::vector<std::string> ecd_files;
  std::optional<double> delta_override;
  std::string time_spec;
  std::vector<double> amplitudes;
  int n_r = 0;  // 0: 10000 for a single file, 1000 for a grid
  std::optional<std::uint64_t> seed_flag;
  std::string law = "uniform";
  std::string out = "disorder.csv";
  int threads = 0;
};

int run_disorder(const DisorderOptions& o) {
  if (o.ecd_files.empty()) throw std::invalid_argument("no ECD files given");
  if (o.amplitudes.empty()) throw std::invalid_argument("no amplitudes given");

  std::vector<EcdFileData> files;
  for (const auto& path : o.ecd_files) files.push_back(read_ecd_file(path));
  int n = files.front().n_sites;
  for (const auto& f : files) {
    if (f.n_sites != n) {
      throw std::invalid_argument("ECD files disagree on chain length");
    }
  }
  double delta = o.delta_override ? *o.delta_override : files.front().delta;
  ChainParameters params{n, delta};
  double arrival = o.time_spec.empty()
                       ? files.front().arrival_time
                       : parse_time_spec(o.time_spec, n);
  std::uint64_t seed = resolve_seed(o.seed_flag);
  NoiseLaw law = parse_law(o.law);
  int n_r = o.n_r > 0 ? o.n_r : (files.size() == 1 ? 10000 : 1000);

  std::vector<SweepRecord> records;
  for (std::size_t i = 0; i < files.size(); ++i) {
    records.push_back(SweepRecord{static_cast<int>(i) + 1, files[i].j_max,
                                  files[i].ecd, files[i].population});
  }
  auto cells = disorder_grid(params, records, arrival, o.amplitudes, n_r,
                             seed, law, o.threads);

  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot open '" + o.out + "'");
  if (files.size() == 1) {
    std::vector<std::pair<double, DisorderStatistics>> rows;
    for (const auto& cell : cells) rows.emplace_back(cell.amplitude, cell.stats);
    write_line_scan_csv(out, rows, seed, n_r, law);
  } else {
    write_grid_csv(out, cells, seed, n_r, law);
  }
  out.flush();

  RunManifest manifest;
  manifest.command = "disorder";
  manifest.rng_seed = seed;
  auto& p = manifest.parameters;
  std::vector<std::string> abs_paths;
  for (const auto& path : o.ecd_files) {
    abs_paths.push_back(fs::absolute(path).string());
  }
  p["ecd"] = join(abs_paths, ';');
  if (o.delta_override) p["delta"] = format_double(*o.delta_override);
  p["time"] = format_double(arrival);
  std::vector<std::string> amp_strings;
  for (double a : o.amplitudes) amp_strings.push_back(format_double(a));
  p["amplitudes"] = join(amp_strings, ',');
  p["nr"] = std::to_string(n_r);
  p["seed"] = std::to_string(seed);
  p["law"] = o.law;
  p["out"] = fs::path(o.out).filename().string();
  manifest.artifact_paths.push_back(fs::path(o.out).filename().string());
  write_manifest(o.out + ".manifest.json", manifest);
  return kExitOk;
}

// ------------------------------------------------------------------ jmin

struct JminOptions {
  int n = 0;
  double delta = 1.0;
  std::string time_spec;
  double target = 0.98;
  double j_start = 0.5;
  double j_end = 0.0;
  std::optional<std::uint64_t> seed_flag;
  bool asymmetric = false;
  OptimizerFlags opt;
  std::string out = "jmin.csv";
  int threads = 0;
};

int run_jmin(const JminOptions& o) {
  ChainParameters params{o.n, o.delta};
  double arrival = parse_time_spec(o.time_spec, o.n);
  std::uint64_t seed = resolve_seed(o.seed_flag);
  OptimizerConfig cfg = o.opt.to_config(seed, o.threads);

  JminSearch search = find_jmin(params, arrival, o.target, o.j_start, o.j_end,
                                cfg, !o.asymmetric);

  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot open '" + o.out + "'");
  if (search.found) {
    out << o.n << "," << format_double(search.found->arrival_time) << ","
        << format_double(search.found->j_min) << ","
        << format_double(search.found->achieved_population) << "\n";
    std::cout << "j_min=" << format_compact(search.found->j_min)
              << " P=" << format_double(search.found->achieved_population)
              << "\n";
  } else {
    out << "# target unreached: best jmax="
        << format_double(search.best.j_max)
        << " P=" << format_double(search.best.population) << "\n";
    std::cerr << "target " << format_compact(o.target)
              << " unreached; best P="
              << format_double(search.best.population) << " at jmax="
              << format_compact(search.best.j_max) << "\n";
  }
  out.flush();

  RunManifest manifest;
  manifest.command = "jmin";
  manifest.rng_seed = seed;
  auto& p = manifest.parameters;
  p["n"] = std::to_string(o.n);
  p["delta"] = format_double(o.delta);
  p["time"] = format_double(arrival);
  p["target"] = format_double(o.target);
  p["jmax-start"] = format_double(o.j_start);
  p["jmax-end"] = format_double(o.j_end);
  p["seed"] = std::to_string(seed);
  p["asymmetric"] = o.asymmetric ? "1" : "0";
  o.opt.store(p);
  p["out"] = fs::path(o.out).filename().string();
  manifest.artifact_paths.push_back(fs::path(o.out).filename().string());
  write_manifest(o.out + ".manifest.json", manifest);
  return search.found ? kExitOk : kExitTargetUnreached;
}

// ------------------------------------------------------------------- fit

struct FitOptions {
  std::string input;
  int n = 0;
  std::string out = "fit.json";
};

int run_fit(const FitOptions& o) {
  std::ifstream in(o.input);
  if (!in) throw std::runtime_error("cannot open '" + o.input + "'");
  std::vector<std::pair<double, double>> points;
  int n_from_rows = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, ',');
    if (cols.size() == 2) {
      points.emplace_back(std::stod(cols[0]), std::stod(cols[1]));
    } else if (cols.size() == 4) {
      int row_n = std::stoi(cols[0]);
      if (n_from_rows == 0) n_from_rows = row_n;
      if (row_n != n_from_rows) {
        throw ParseError(line_no, "rows disagree on chain length");
      }
      points.emplace_back(std::stod(cols[1]), std::stod(cols[2]));
    } else {
      throw ParseError(line_no, "expected 'T,j' or 'N,T,j_min,P' rows");
    }
  }
  int n = o.n > 0 ? o.n : n_from_rows;
  if (n < 1) {
    throw std::invalid_argument(
        "chain length unknown: pass --n or use 4-column input");
  }

  ExponentialFit fit = fit_exponential(points, n);
  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot open '" + o.out + "'");
  out << "{\n  \"A\": " << format_double(fit.a_coef)
      << ",\n  \"B\": " << format_double(fit.b_coef)
      << ",\n  \"C\": " << format_double(fit.c_coef)
      << ",\n  \"rms\": " << format_double(fit.rms_residual) << "\n}\n";
  out.flush();
  std::cout << "A=" << format_double(fit.a_coef)
            << " B=" << format_double(fit.b_coef)
            << " C=" << format_double(fit.c_coef)
            << " rms=" << format_double(fit.rms_residual) << "\n";

  RunManifest manifest;
  manifest.command = "fit";
  manifest.parameters["input"] = fs::absolute(o.input).string();
  manifest.parameters["n"] = std::to_string(n);
  manifest.parameters["out"] = fs::path(o.out).filename().string();
  manifest.artifact_paths.push_back(fs::path(o.out).filename().string());
  write_manifest(o.out + ".manifest.json", manifest);
  return kExitOk;
}

// ----------------------------------------------------------------- peaks

struct PeaksOptions {
  std::string ecd_file;
  std::optional<double> delta_override;
  std::optional<double> kappa;
  int max_peaks = 5;
  double grid_step = 0.05;
  std::string out = "peaks.csv";
  int threads = 0;
};

int run_peaks(const PeaksOptions& o) {
  EcdFileData data = read_ecd_file(o.ecd_file);
  double delta = o.delta_override ? *o.delta_override : data.delta;
  ChainParameters params{data.n_sites, delta};
  double kappa = o.kappa ? *o.kappa : data.arrival_time / data.n_sites;

  PeakSet peaks =
      scaled_peaks(params, data.ecd, kappa, o.max_peaks, o.grid_step, o.threads);

  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot open '" + o.out + "'");
  for (std::size_t i = 0; i < peaks.heights.size(); ++i) {
    out << format_double(peaks.scaled_times[i]) << ","
        << format_double(peaks.heights[i]) << "\n";
  }
  out.flush();
  std::cout << peaks.heights.size() << " peaks\n";

  RunManifest manifest;
  manifest.command = "peaks";
  auto& p = manifest.parameters;
  p["ecd"] = fs::absolute(o.ecd_file).string();
  if (o.delta_override) p["delta"] = format_double(*o.delta_override);
  p["kappa"] = format_double(kappa);
  p["max-peaks"] = std::to_string(o.max_peaks);
  p["grid-step"] = format_double(o.grid_step);
  p["out"] = fs::path(o.out).filename().string();
  manifest.artifact_paths.push_back(fs::path(o.out).filename().string());
  write_manifest(o.out + ".manifest.json", manifest);
  return kExitOk;
}

// ------------------------------------------------------------ divergence

struct DivergenceOptions {
  std::vector<std::string> ecd_files;
  std::optional<double> delta_override;
  std::string time_spec;
  int site = 1;
  std::string out = "divergence.csv";
};

int run_divergence(const DivergenceOptions& o) {
  if (o.ecd_files.size() != 2) {
    throw std::invalid_argument("divergence needs exactly two --ecd files");
  }
  EcdFileData first = read_ecd_file(o.ecd_files[0]);
  EcdFileData second = read_ecd_file(o.ecd_files[1]);
  if (first.n_sites != second.n_sites) {
    throw std::invalid_argument("ECD files disagree on chain length");
  }
  int n = first.n_sites;
  double arrival = o.time_spec.empty() ? first.arrival_time
                                       : parse_time_spec(o.time_spec, n);
  if (o.site < 1 || o.site > n) {
    throw std::invalid_argument("site must lie in [1, N]");
  }

  auto site_row = [&](const EcdFileData& data) {
    double delta = o.delta_override ? *o.delta_override : data.delta;
    ChainParameters params{n, delta};
    auto matrix = site_population_matrix(decompose(params, data.ecd), arrival);
    std::vector<double> row(n);
    for (int j = 0; j < n; ++j) {
      row[j] = matrix[static_cast<std::size_t>(o.site - 1) * n + j];
    }
    return row;
  };

  double divergence = renyi_half_divergence(site_row(first), site_row(second));
  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot open '" + o.out + "'");
  out << format_double(divergence) << "\n";
  out.flush();
  std::cout << format_double(divergence) << "\n";

  RunManifest manifest;
  manifest.command = "divergence";
  auto& p = manifest.parameters;
  p["ecd"] = join({fs::absolute(o.ecd_files[0]).string(),
                   fs::absolute(o.ecd_files[1]).string()},
                  ';');
  if (o.delta_override) p["delta"] = format_double(*o.delta_override);
  p["time"] = format_double(arrival);
  p["site"] = std::to_string(o.site);
  p["out"] = fs::path(o.out).filename().string();
  manifest.artifact_paths.push_back(fs::path(o.out).filename().string());
  write_manifest(o.out + ".manifest.json", manifest);
  return kExitOk;
}

// ---------------------------------------------------------------- replay

std::optional<double> load_optional_double(
    const std::map<std::string, std::string>& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) return std::nullopt;
  return std::stod(it->second);
}

int run_replay(const std::string& manifest_path,
               const std::optional<std::string>& out_dir, int threads) {
  RunManifest m = read_manifest(manifest_path);
  const auto& p = m.parameters;
  fs::path dir = out_dir ? fs::path(*out_dir)
                         : fs::absolute(manifest_path).parent_path();
  fs::create_directories(dir);

  if (m.command == "design") {
    DesignOptions o;
    o.n = std::stoi(p.at("n"));
    o.delta = std::stod(p.at("delta"));
    o.time_spec = p.at("time");
    o.j_start = std::stod(p.at("jmax-start"));
    o.j_end = std::stod(p.at("jmax-end"));
    o.j_step = std::stod(p.at("jmax-step"));
    o.seed_flag = parse_u64(p.at("seed"));
    o.asymmetric = p.at("asymmetric") == "1";
    o.target = load_optional_double(p, "target");
    o.opt = OptimizerFlags::load(p);
    o.out_dir = dir.string();
    o.threads = threads;
    return run_design(o);
  }
  if (m.command == "evaluate") {
    EvaluateOptions o;
    o.ecd_file = p.at("ecd");
    o.delta_override = load_optional_double(p, "delta");
    if (p.count("grid")) {
      o.grid_spec = p.at("grid");
    } else {
      o.time_spec = p.at("time");
    }
    o.out = (dir / p.at("out")).string();
    return run_evaluate(o);
  }
  if (m.command == "disorder") {
    DisorderOptions o;
    o.ecd_files = split(p.at("ecd"), ';');
    o.delta_override = load_optional_double(p, "delta");
    o.time_spec = p.at("time");
    for (const auto& a : split(p.at("amplitudes"), ',')) {
      o.amplitudes.push_back(std::stod(a));
    }
    o.n_r = std::stoi(p.at("nr"));
    o.seed_flag = parse_u64(p.at("seed"));
    o.law = p.at("law");
    o.out = (dir / p.at("out")).string();
    o.threads = threads;
    return run_disorder(o);
  }
  if (m.command == "jmin") {
    JminOptions o;
    o.n = std::stoi(p.at("n"));
    o.delta = std::stod(p.at("delta"));
    o.time_spec = p.at("time");
    o.target = std::stod(p.at("target"));
    o.j_start = std::stod(p.at("jmax-start"));
    o.j_end = std::stod(p.at("jmax-end"));
    o.seed_flag = parse_u64(p.at("seed"));
    o.asymmetric = p.at("asymmetric") == "1";
    o.opt = OptimizerFlags::load(p);
    o.out = (dir / p.at("out")).string();
    o.threads = threads;
    return run_jmin(o);
  }
  if (m.command == "fit") {
    FitOptions o;
    o.input = p.at("input");
    o.n = std::stoi(p.at("n"));
    o.out = (dir / p.at("out")).string();
    return run_fit(o);
  }
  if (m.command == "peaks") {
    PeaksOptions o;
    o.ecd_file = p.at("ecd");
    o.delta_override = load_optional_double(p, "delta");
    o.kappa = std::stod(p.at("kappa"));
    o.max_peaks = std::stoi(p.at("max-peaks"));
    o.grid_step = std::stod(p.at("grid-step"));
    o.out = (dir / p.at("out")).string();
    o.threads = threads;
    return run_peaks(o);
  }
  if (m.command == "divergence") {
    DivergenceOptions o;
    o.ecd_files = split(p.at("ecd"), ';');
    o.delta_override = load_optional_double(p, "delta");
    o.time_spec = p.at("time");
    o.site = std::stoi(p.at("site"));
    o.out = (dir / p.at("out")).string();
    return run_divergence(o);
  }
  throw std::invalid_argument("manifest has unknown command '" + m.command +
                              "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ECD design and analysis for near-perfect state transfer "
               "on XXZ spin chains"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  DesignOptions design;
  auto* cmd_design = app.add_subcommand(
      "design", "optimize ECDs over a growing hypercube succession");
  cmd_design->add_option("--n", design.n, "chain length")->required();
  cmd_design->add_option("--delta", design.delta, "anisotropy (default 1)");
  cmd_design->add_option("--time", design.time_spec,
                         "arrival time (number or multiple of N, e.g. 2N)")
      ->required();
  cmd_design->add_option("--jmax-start", design.j_start,
                         "first cube side (default 1)");
  cmd_design->add_option("--jmax-end", design.j_end, "last cube side")
      ->required();
  cmd_design->add_option("--jmax-step", design.j_step,
                         "cube side increment (default 0.5)");
  cmd_design->add_option("--seed", design.seed_flag,
                         "RNG seed (falls back to SPINWEAVE_SEED, then 0)");
  cmd_design->add_option("--target", design.target,
                         "stop the sweep once P reaches this value");
  cmd_design->add_flag("--asymmetric", design.asymmetric,
                       "optimize all N-1 couplings instead of the "
                       "centro-symmetric half");
  cmd_design->add_option("--out-dir", design.out_dir,
                         "output directory (default .)");
  cmd_design->add_option("--threads", design.threads,
                         "worker threads (0 = all cores)");
  design.opt.add_flags(cmd_design);

  EvaluateOptions evaluate;
  auto* cmd_evaluate = app.add_subcommand(
      "evaluate", "transferred population and fidelity of an ECD file");
  cmd_evaluate->add_option("--ecd", evaluate.ecd_file, "ECD file")->required();
  cmd_evaluate->add_option("--delta", evaluate.delta_override,
                           "override the file's anisotropy");
  auto* eval_time = cmd_evaluate->add_option(
      "--time", evaluate.time_spec, "single evaluation time (e.g. 100 or 2N)");
  auto* eval_grid = cmd_evaluate->add_option(
      "--grid", evaluate.grid_spec, "time grid start:end:step (accepts N syntax)");
  eval_time->excludes(eval_grid);
  cmd_evaluate->add_option("--out", evaluate.out,
                           "write t,P,F rows here instead of standard output");

  DisorderOptions disorder;
  auto* cmd_disorder = app.add_subcommand(
      "disorder", "static-disorder statistics for one or more ECD files");
  cmd_disorder->add_option("--ecd", disorder.ecd_files, "ECD file (repeatable)")
      ->required();
  cmd_disorder->add_option("--delta", disorder.delta_override,
                           "override the files' anisotropy");
  cmd_disorder->add_option("--time", disorder.time_spec,
                           "arrival time (default: first file's header)");
  cmd_disorder
      ->add_option("--amplitudes", disorder.amplitudes,
                   "disorder amplitudes, comma separated")
      ->required()
      ->delimiter(',');
  cmd_disorder->add_option("--nr", disorder.n_r,
                           "realizations (default 10000 line / 1000 grid)");
  cmd_disorder->add_option("--seed", disorder.seed_flag,
                           "RNG seed (falls back to SPINWEAVE_SEED, then 0)");
  cmd_disorder->add_option("--law", disorder.law,
                           "noise law: uniform or gaussian");
  cmd_disorder->add_option("--out", disorder.out,
                           "output CSV (default disorder.csv)");
  cmd_disorder->add_option("--threads", disorder.threads,
                           "worker threads (0 = all cores)");

  JminOptions jmin;
  auto* cmd_jmin = app.add_subcommand(
      "jmin", "smallest cube side reaching a target population");
  cmd_jmin->add_option("--n", jmin.n, "chain length")->required();
  cmd_jmin->add_option("--delta", jmin.delta, "anisotropy (default 1)");
  cmd_jmin->add_option("--time", jmin.time_spec, "arrival time")->required();
  cmd_jmin->add_option("--target", jmin.target,
                       "target population (default 0.98)");
  cmd_jmin->add_option("--jmax-start", jmin.j_start,
                       "first cube side (default 0.5)");
  cmd_jmin->add_option("--jmax-end", jmin.j_end, "last cube side")->required();
  cmd_jmin->add_option("--seed", jmin.seed_flag,
                       "RNG seed (falls back to SPINWEAVE_SEED, then 0)");
  cmd_jmin->add_flag("--asymmetric", jmin.asymmetric,
                     "optimize all N-1 couplings");
  cmd_jmin->add_option("--out", jmin.out, "output CSV (default jmin.csv)");
  cmd_jmin->add_option("--threads", jmin.threads,
                       "worker threads (0 = all cores)");
  jmin.opt.add_flags(cmd_jmin);

  FitOptions fit;
  auto* cmd_fit = app.add_subcommand(
      "fit", "fit j_min(T) = A + B exp(-C T/N) to jmin rows");
  cmd_fit->add_option("--input", fit.input,
                      "CSV with 'T,j' or 'N,T,j_min,P' rows")
      ->required();
  cmd_fit->add_option("--n", fit.n,
                      "chain length (default: from 4-column rows)");
  cmd_fit->add_option("--out", fit.out, "output JSON (default fit.json)");

  PeaksOptions peaks;
  auto* cmd_peaks = app.add_subcommand(
      "peaks", "transfer peaks of an ECD on the scaled time axis");
  cmd_peaks->add_option("--ecd", peaks.ecd_file, "ECD file")->required();
  cmd_peaks->add_option("--delta", peaks.delta_override,
                        "override the file's anisotropy");
  cmd_peaks->add_option("--kappa", peaks.kappa,
                        "time scale factor (default: header T/N)");
  cmd_peaks->add_option("--max-peaks", peaks.max_peaks,
                        "number of peaks to report (default 5)");
  cmd_peaks->add_option("--grid-step", peaks.grid_step,
                        "sampling step in t (default 0.05)");
  cmd_peaks->add_option("--out", peaks.out, "output CSV (default peaks.csv)");
  cmd_peaks->add_option("--threads", peaks.threads,
                        "worker threads (0 = all cores)");

  DivergenceOptions divergence;
  auto* cmd_divergence = app.add_subcommand(
      "divergence", "Renyi-1/2 divergence between two ECDs' site populations");
  cmd_divergence
      ->add_option("--ecd", divergence.ecd_files, "two ECD files")
      ->required()
      ->expected(2);
  cmd_divergence->add_option("--delta", divergence.delta_override,
                             "override the files' anisotropy");
  cmd_divergence->add_option("--time", divergence.time_spec,
                             "evaluation time (default: first file's header)");
  cmd_divergence->add_option("--site", divergence.site,
                             "source site of the compared distributions");
  cmd_divergence->add_option("--out", divergence.out,
                             "output CSV (default divergence.csv)");

  std::string replay_manifest;
  std::optional<std::string> replay_out_dir;
  int replay_threads = 0;
  auto* cmd_replay = app.add_subcommand(
      "replay", "re-run a manifest and regenerate its artifacts");
  cmd_replay->add_option("manifest", replay_manifest, "manifest JSON path")
      ->required();
  cmd_replay->add_option("--out-dir", replay_out_dir,
                         "write artifacts here instead of the manifest's "
                         "directory");
  cmd_replay->add_option("--threads", replay_threads,
                         "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_design->parsed()) return run_design(design);
    if (cmd_evaluate->parsed()) return run_evaluate(evaluate);
    if (cmd_disorder->parsed()) return run_disorder(disorder);
    if (cmd_jmin->parsed()) return run_jmin(jmin);
    if (cmd_fit->parsed()) return run_fit(fit);
    if (cmd_peaks->parsed()) return run_peaks(peaks);
    if (cmd_divergence->parsed()) return run_divergence(divergence);
    if (cmd_replay->parsed()) {
      return run_replay(replay_manifest, replay_out_dir, replay_threads);
    }
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
