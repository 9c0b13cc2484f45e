#pragma once

// Command-line front end. dispatch() is kept in a header so the test suite can
// drive it in-process; main.cpp only forwards argv.

#include <openssl/evp.h>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "noisynn/experiments.hpp"
#include "noisynn/noisynn.hpp"

namespace noisynn::cli {

using Json = nlohmann::ordered_json;

/// Bad flag values; reported with exit status 1 like CLI11's own parse errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSeed = 20221;
inline constexpr const char* kSeedEnv = "NOISYNN_SEED";

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline std::string fmt(double v) { return io::format_double(v); }
inline std::string fmt(const std::optional<double>& v) { return v ? io::format_double(*v) : ""; }

inline Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

struct Artifact {
  std::string name;
  std::string content;
};

struct Outcome {
  std::vector<Artifact> artifacts;
  Json config = Json::object();
  std::optional<std::uint64_t> seed;
};

struct Common {
  std::string format;  // empty until resolved per verb
  std::string out_dir;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 0;
};

// Converts flag-value errors raised by the library into usage errors.
template <class F>
auto resolve(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidParameter& e) {
    throw UsageError(e.what());
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
}

// ---- triples ---------------------------------------------------------------

struct TripleArgs {
  std::string triple;
  std::string x, y, z;

  [[nodiscard]] bool from_builtin() const { return !triple.empty(); }
};

inline std::optional<std::vector<double>> builtin_vector(std::string_view name, std::size_t d) {
  auto need_d = [&] {
    if (d == 0) throw UsageError("builtin vector '" + std::string(name) + "' needs --d/--dims");
  };
  if (name == "zero") {
    need_d();
    return std::vector<double>(d, 0.0);
  }
  if (name == "ones") {
    need_d();
    return std::vector<double>(d, 1.0);
  }
  if (name == "e1") {
    need_d();
    std::vector<double> v(d, 0.0);
    v[0] = 1.0;
    return v;
  }
  if (name.starts_with("hyper:")) {
    need_d();
    return resolve([&] { return growth_sequence(parse_rate(name.substr(6)), d); });
  }
  if (name.starts_with("pow:")) {
    need_d();
    const double p = resolve([&] { return io::parse_double_or_throw(name.substr(4), "power"); });
    std::vector<double> v(d);
    for (std::size_t k = 0; k < d; ++k) v[k] = std::pow(static_cast<double>(k + 1), p);
    return v;
  }
  return std::nullopt;
}

inline TripleSignal resolve_triple(const TripleArgs& a, std::size_t d) {
  if (a.from_builtin()) {
    if (!a.x.empty() || !a.y.empty() || !a.z.empty()) {
      throw UsageError("--triple cannot be combined with --x/--y/--z");
    }
    if (d == 0) throw UsageError("--triple needs --d/--dims");
    const std::string_view name = a.triple;
    if (name == "set1") return builtin_triple(BuiltinTriple::BoundedBounded, d);
    if (name == "set2") return builtin_triple(BuiltinTriple::UnboundedBounded, d);
    if (name == "set3") return builtin_triple(BuiltinTriple::UnboundedUnbounded, d);
    if (name.starts_with("hyper:")) {
      return resolve([&] { return growth_triple(parse_rate(name.substr(6)), d); });
    }
    throw UsageError("unknown triple '" + a.triple + "' (expected set1|set2|set3|hyper:<alpha>)");
  }
  if (a.x.empty() || a.y.empty() || a.z.empty()) {
    throw UsageError("give either --triple or all of --x, --y, --z");
  }
  TripleSignal t;
  std::vector<double>* slots[] = {&t.x, &t.y, &t.z};
  const std::string* specs[] = {&a.x, &a.y, &a.z};
  // Files first: without --d their common length sets the dimension of any builtin.
  bool is_file[3] = {false, false, false};
  std::size_t full = d;
  for (int i = 0; i < 3; ++i) {
    if (builtin_vector(*specs[i], 1)) continue;
    is_file[i] = true;
    *slots[i] = io::load_vector(*specs[i]);
    const std::size_t len = slots[i]->size();
    if (d != 0 && len < d) throw UsageError(*specs[i] + ": requested dimension exceeds the vector length");
    if (d == 0 && full != 0 && len != full) throw UsageError("--x/--y/--z files differ in length");
    if (full == 0) full = len;
  }
  for (int i = 0; i < 3; ++i) {
    if (is_file[i]) {
      slots[i]->resize(full);
    } else {
      *slots[i] = *builtin_vector(*specs[i], full);
    }
  }
  t.validate();
  return t;
}

inline Json triple_config(const TripleArgs& a) {
  if (a.from_builtin()) return Json{{"triple", a.triple}};
  return Json{{"x", a.x}, {"y", a.y}, {"z", a.z}};
}

// ---- verbs -----------------------------------------------------------------

struct PredictArgs {
  TripleArgs triple;
  std::string dims;
  std::string noise = "uniform:0.75";
};

inline Outcome run_predict(const PredictArgs& a, const Common& c) {
  const auto noise = resolve([&] { return io::parse_noise(a.noise); });
  const auto dims = a.dims.empty() ? std::vector<std::size_t>{}
                                   : resolve([&] { return io::parse_dims(a.dims); });
  const auto t = resolve_triple(a.triple, dims.empty() ? 0 : dims.back());
  const auto grid = dims.empty() ? std::vector<std::size_t>{t.dim()} : dims;
  const auto stats = prefix_triple_stats(t, grid);

  std::optional<double> limit;
  if (a.triple.triple.starts_with("hyper:")) {
    const auto rate = parse_rate(std::string_view(a.triple.triple).substr(6));
    if (rate.is_infinite() || rate.alpha() > 2.0) {
      const auto spec = rate.is_infinite() ? HyperharmonicSpec::infinite() : HyperharmonicSpec::of(rate.alpha());
      limit = limiting_probability(spec, noise);
    }
  }

  Json records = Json::array();
  std::ostringstream csv;
  csv << "d,zeta,probability,gap\n";
  for (const auto& s : stats) {
    const double z = zeta(s, noise);
    const double p = predicted_preservation_prob(s, noise);
    Json r{{"d", s.d}, {"zeta", z}, {"probability", p}, {"gap", s.gap()}, {"delta_inf", s.delta_inf}};
    if (limit) r["limit"] = *limit;
    records.push_back(std::move(r));
    csv << s.d << ',' << fmt(z) << ',' << fmt(p) << ',' << fmt(s.gap()) << '\n';
  }
  Outcome o;
  o.config = triple_config(a.triple);
  o.config["dims"] = grid;
  o.config["noise"] = io::format_noise(noise);
  if (c.format == "json") {
    const Json body = records.size() == 1 ? records.front() : records;
    o.artifacts.push_back({"predict.json", body.dump(2) + "\n"});
  } else {
    o.artifacts.push_back({"predict.csv", csv.str()});
  }
  return o;
}

struct SimulateArgs {
  TripleArgs triple;
  std::string dims = "100,1000,10000";
  std::string noise = "uniform:0.75";
  std::size_t replicates = 5000;
  std::string emit = "prob";
};

inline Outcome run_simulate(const SimulateArgs& a, const Common& c) {
  const auto noise = resolve([&] { return io::parse_noise(a.noise); });
  const auto dims = resolve([&] { return io::parse_dims(a.dims); });
  if (a.emit != "prob" && a.emit != "y-samples" && a.emit != "rc") {
    throw UsageError("--emit must be prob, y-samples or rc");
  }
  SimConfig cfg;
  cfg.replicates = a.replicates;
  cfg.seed = SeedSpec{c.seed};
  cfg.workers = c.workers;
  cfg.dims = dims;
  resolve([&] { cfg.validate(); return 0; });
  const std::size_t full = a.triple.from_builtin() ? dims.back() : 0;
  auto t = resolve_triple(a.triple, full);
  if (t.dim() < dims.back()) throw UsageError("dims exceed the vector length");

  Outcome o;
  o.seed = c.seed;
  o.config = triple_config(a.triple);
  o.config["dims"] = dims;
  o.config["noise"] = io::format_noise(noise);
  o.config["replicates"] = a.replicates;
  o.config["emit"] = a.emit;
  o.config["format"] = c.format;
  const std::string header_line = "# noisynn " + std::string(kVersion) + " seed=" + std::to_string(c.seed) +
                                  " config=" + sha256_hex(o.config.dump()).substr(0, 16) + "\n";

  std::ostringstream csv;
  Json body = Json::array();
  if (a.emit == "prob") {
    const auto res = simulate_preservation(t, noise, cfg, SimOptions{false, true});
    std::vector<std::optional<double>> rc(dims.size());
    try {
      const std::vector<std::vector<double>> pts{t.x, t.y, t.z};
      const auto samples = relative_contrast_samples(pts, noise, cfg);
      for (std::size_t i = 0; i < dims.size(); ++i) rc[i] = mean(samples[i]);
    } catch (const DomainError&) {
      // coincident points: relative contrast undefined
    }
    const auto nd = empirical_noise_distances(noise, cfg);
    csv << "d,p_hat,ci,ks,qq,rc_mean,noise_dist\n";
    for (std::size_t i = 0; i < res.records.size(); ++i) {
      const auto& r = res.records[i];
      csv << r.d << ',' << fmt(r.p_hat) << ',' << fmt(r.ci_half_width) << ',' << fmt(r.ks) << ','
          << fmt(r.qq) << ',' << fmt(rc[i]) << ',' << fmt(nd[i]) << '\n';
      body.push_back(Json{{"d", r.d}, {"p_hat", r.p_hat}, {"ci", r.ci_half_width},
                          {"predicted", opt_json(r.predicted)}, {"ks", opt_json(r.ks)},
                          {"qq", opt_json(r.qq)}, {"rc_mean", opt_json(rc[i])}, {"noise_dist", nd[i]}});
    }
  } else if (a.emit == "y-samples") {
    const auto ys = resolve([&] { return standardized_samples(t, noise, cfg); });
    csv << "d,replicate,y\n";
    for (std::size_t i = 0; i < dims.size(); ++i) {
      for (std::size_t r = 0; r < ys[i].size(); ++r) {
        csv << dims[i] << ',' << r << ',' << fmt(ys[i][r]) << '\n';
        body.push_back(Json{{"d", dims[i]}, {"replicate", r}, {"y", ys[i][r]}});
      }
    }
  } else {
    const std::vector<std::vector<double>> pts{t.x, t.y, t.z};
    const auto rc = relative_contrast_samples(pts, noise, cfg);
    csv << "d,replicate,rc\n";
    for (std::size_t i = 0; i < dims.size(); ++i) {
      for (std::size_t r = 0; r < rc[i].size(); ++r) {
        csv << dims[i] << ',' << r << ',' << fmt(rc[i][r]) << '\n';
        body.push_back(Json{{"d", dims[i]}, {"replicate", r}, {"rc", rc[i][r]}});
      }
    }
  }
  if (c.format == "json") {
    o.artifacts.push_back({"simulate.json", body.dump(2) + "\n"});
  } else {
    o.artifacts.push_back({"simulate.csv", header_line + csv.str()});
  }
  return o;
}

struct PhaseArgs {
  std::string gaps;
  double band_low = 0.45;
  double band_high = 0.55;
  std::string fit = "increments";
};

inline ExponentFit parse_fit(const std::string& s) {
  if (s == "increments") return ExponentFit::Increments;
  if (s == "loglog") return ExponentFit::LogLog;
  throw UsageError("--fit must be increments or loglog");
}

inline Json verdict_json(const PhaseVerdict& v) {
  return Json{{"exponent", v.exponent}, {"band", {v.band.first, v.band.second}}, {"label", to_string(v.label)}};
}

inline GrowthSeries load_gap_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  GrowthSeries s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = io::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto cells = io::split(text, ',');
    double d = 0.0;
    double g = 0.0;
    if (cells.size() != 2 || !io::parse_double(cells[0], d) || !io::parse_double(cells[1], g)) {
      if (s.dims.empty() && line_no == 1) continue;  // header row
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 'd,gap'");
    }
    s.dims.push_back(d);
    s.gap.push_back(g);
  }
  if (s.dims.empty()) throw ParseError(path + ": empty gap file");
  return s;
}

inline Outcome run_phase(const PhaseArgs& a, const Common& c) {
  const auto fit = parse_fit(a.fit);
  if (!(a.band_low <= a.band_high)) throw UsageError("--band-low must not exceed --band-high");
  const auto series = load_gap_series(a.gaps);
  const auto v = estimate_growth_exponent(series, {a.band_low, a.band_high}, fit);
  Outcome o;
  o.config = Json{{"gaps", a.gaps}, {"band", {a.band_low, a.band_high}}, {"fit", a.fit}};
  if (c.format == "csv") {
    o.artifacts.push_back({"phase.csv", "exponent,band_low,band_high,label\n" + fmt(v.exponent) + "," +
                                            fmt(v.band.first) + "," + fmt(v.band.second) + "," +
                                            to_string(v.label) + "\n"});
  } else {
    o.artifacts.push_back({"phase.json", verdict_json(v).dump(2) + "\n"});
  }
  return o;
}

struct DiagnoseArgs {
  std::string matrix;
  std::string noise = "uniform:1.25";
  std::size_t k = 5;
  std::size_t replicates = 20;
};

/// Growth exponent of the squared diameter over column prefixes on a
/// geometric grid; nullopt when fewer than three distinct prefixes exist or
/// the diameter vanishes on a prefix.
inline std::optional<PhaseVerdict> prefix_phase(const DataMatrix& m) {
  GrowthSeries s;
  for (double frac : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    const auto cols = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(m.cols()), frac)));
    if (cols == 0 || (!s.dims.empty() && static_cast<double>(cols) <= s.dims.back())) continue;
    const double diam = dataset_diameter(leading_columns(m, cols));
    s.dims.push_back(static_cast<double>(cols));
    s.gap.push_back(diam * diam);
  }
  if (s.dims.size() < 3) return std::nullopt;
  try {
    return estimate_growth_exponent(s);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

inline Outcome run_diagnose(const DiagnoseArgs& a, const Common& c) {
  const auto noise = resolve([&] { return io::parse_noise(a.noise); });
  if (a.replicates == 0) throw UsageError("--replicates must be >= 1");
  const auto m = io::load_matrix(a.matrix);
  if (a.k == 0 || a.k >= m.rows()) throw UsageError("--k must satisfy 1 <= k < rows");

  const auto report = inversion_probabilities(m, noise);
  const double diam = dataset_diameter(m);
  const auto phase = prefix_phase(m);
  double agreement = 0.0;
  for (std::size_t r = 0; r < a.replicates; ++r) {
    agreement += knn_agreement(m, add_noise(m, noise, SeedSpec{c.seed}, r), a.k);
  }
  agreement /= static_cast<double>(a.replicates);

  Json summary{{"rows", m.rows()},
               {"cols", m.cols()},
               {"diameter", diam},
               {"max_inversion_prob", report.max_probability},
               {"argmax", report.argmax},
               {"phase", phase ? verdict_json(*phase) : Json(nullptr)},
               {"knn_k", a.k},
               {"knn_agreement", agreement}};
  Outcome o;
  o.seed = c.seed;
  o.config = Json{{"matrix", a.matrix}, {"noise", io::format_noise(noise)}, {"k", a.k}, {"replicates", a.replicates}};
  if (c.format == "csv") {
    std::ostringstream csv;
    csv << "# diameter=" << fmt(diam) << " max_inversion_prob=" << fmt(report.max_probability)
        << " phase=" << (phase ? to_string(phase->label) : "undetermined")
        << " knn_agreement=" << fmt(agreement) << '\n';
    csv << "index,closest,furthest,probability\n";
    for (const auto& p : report.points) {
      csv << p.index << ',' << p.closest << ',' << p.furthest << ',' << fmt(p.probability) << '\n';
    }
    o.artifacts.push_back({"diagnose.csv", csv.str()});
  } else {
    Json points = Json::array();
    for (const auto& p : report.points) {
      points.push_back(Json{{"index", p.index}, {"closest", p.closest}, {"furthest", p.furthest},
                            {"probability", p.probability}});
    }
    o.artifacts.push_back({"diagnose.json", Json{{"points", points}, {"summary", summary}}.dump(2) + "\n"});
  }
  return o;
}

struct DimredArgs {
  std::size_t n = 25;
  std::string alpha = "inf";
  std::string dims = "100,1000,10000";
  std::string noise = "uniform:1.25";
  std::size_t replicates = 100;
  std::string methods = "pca,isomap:10,diffusion";
  std::string correlation = "spearman";
};

inline std::vector<MethodSpec> parse_methods(std::string_view text) {
  std::vector<MethodSpec> out;
  for (auto tok : io::split(io::trim(text), ',')) {
    tok = io::trim(tok);
    if (tok == "pca") {
      out.push_back(MethodSpec::pca());
    } else if (tok == "diffusion") {
      out.push_back(MethodSpec::diffusion());
    } else if (tok.starts_with("diffusion:")) {
      out.push_back(MethodSpec::diffusion(Bandwidth::fixed(io::parse_double_or_throw(tok.substr(10), "bandwidth"))));
    } else if (tok == "isomap") {
      out.push_back(MethodSpec::isomap());
    } else if (tok.starts_with("isomap:")) {
      const double k = io::parse_double_or_throw(tok.substr(7), "isomap k");
      if (!(k >= 1.0) || k != std::floor(k)) throw ParseError("isomap k must be a positive integer");
      out.push_back(MethodSpec::isomap(static_cast<std::size_t>(k)));
    } else {
      throw ParseError("unknown method '" + std::string(tok) + "'");
    }
  }
  return out;
}

inline std::string bench_csv(const std::vector<BenchSweepRow>& rows, bool with_alpha, const std::string& metric) {
  std::ostringstream csv;
  csv << (with_alpha ? "alpha," : "") << "method,d,mean_abs_" << metric << ",stderr,failures\n";
  for (const auto& r : rows) {
    if (with_alpha) csv << r.label << ',';
    csv << r.cell.method << ',' << r.cell.d << ',' << fmt(r.cell.mean_abs_corr) << ',' << fmt(r.cell.std_error)
        << ',' << r.cell.failures << '\n';
  }
  return csv.str();
}

inline Json bench_json(const std::vector<BenchSweepRow>& rows) {
  Json body = Json::array();
  for (const auto& r : rows) {
    body.push_back(Json{{"alpha", r.label}, {"method", r.cell.method}, {"d", r.cell.d},
                        {"mean_abs_corr", r.cell.mean_abs_corr}, {"stderr", r.cell.std_error},
                        {"failures", r.cell.failures}, {"valid", r.cell.valid}});
  }
  return body;
}

inline Outcome run_dimred(const DimredArgs& a, const Common& c) {
  LineExperimentConfig cfg;
  resolve([&] {
    cfg.n = a.n;
    cfg.alpha = parse_rate(a.alpha);
    cfg.dims = io::parse_dims(a.dims);
    cfg.noise = io::parse_noise(a.noise);
    cfg.replicates = a.replicates;
    cfg.methods = parse_methods(a.methods);
    if (a.correlation == "spearman") {
      cfg.correlation = OrderCorrelation::Spearman;
    } else if (a.correlation == "pearson") {
      cfg.correlation = OrderCorrelation::Pearson;
    } else {
      throw ParseError("--correlation must be spearman or pearson");
    }
    cfg.seed = SeedSpec{c.seed};
    cfg.workers = c.workers;
    cfg.validate();
    return 0;
  });
  const auto rows = dimred_sweep({cfg.alpha}, cfg);
  Outcome o;
  o.seed = c.seed;
  Json methods = Json::array();
  for (const auto& m : cfg.methods) methods.push_back(m.label());
  o.config = Json{{"n", a.n}, {"alpha", rate_label(cfg.alpha)}, {"dims", cfg.dims},
                  {"noise", io::format_noise(cfg.noise)}, {"replicates", a.replicates},
                  {"methods", methods}, {"correlation", a.correlation}};
  if (c.format == "json") {
    o.artifacts.push_back({"dimred.json", bench_json(rows).dump(2) + "\n"});
  } else {
    o.artifacts.push_back({"dimred.csv", bench_csv(rows, false, a.correlation)});
  }
  return o;
}

// ---- canned reproduction targets ------------------------------------------

inline const std::vector<std::string>& repro_targets() {
  static const std::vector<std::string> names{"figure3", "figure5-left", "figure5-middle", "figure5-right",
                                              "figure7"};
  return names;
}

inline SimConfig canned_sim_config(std::vector<std::size_t> dims, const Common& c, std::size_t replicates) {
  SimConfig cfg;
  cfg.replicates = replicates;
  cfg.seed = SeedSpec{c.seed};
  cfg.workers = c.workers;
  cfg.dims = std::move(dims);
  return cfg;
}

inline Outcome run_canned(const std::string& target, std::size_t replicates_override, const Common& c) {
  Outcome o;
  o.seed = c.seed;
  o.config = Json{{"target", target}};
  if (replicates_override != 0) o.config["replicates"] = replicates_override;
  auto reps = [&](std::size_t def) { return replicates_override != 0 ? replicates_override : def; };
  std::ostringstream csv;
  Json body = Json::array();

  if (target == "figure3") {
    const auto noise = NoiseSpec::uniform(0.75);
    const auto rows = normality_sweep(noise, canned_sim_config({10, 100, 1000, 10000}, c, reps(5000)));
    csv << "set,d,ks,qq\n";
    for (const auto& r : rows) {
      csv << r.label << ',' << r.record.d << ',' << fmt(r.record.ks) << ',' << fmt(r.record.qq) << '\n';
      body.push_back(Json{{"set", r.label}, {"d", r.record.d}, {"ks", opt_json(r.record.ks)}, {"qq", opt_json(r.record.qq)}});
    }
  } else if (target == "figure5-left") {
    const auto noise = NoiseSpec::uniform(1.25);
    const auto cfg = canned_sim_config({10, 100, 1000, 10000}, c, reps(5000));
    const auto nd = empirical_noise_distances(noise, cfg);
    csv << "d,noise_dist,sqrt_expected_sq\n";
    for (std::size_t i = 0; i < nd.size(); ++i) {
      const double expect = std::sqrt(expected_noise_sq_distance(noise, cfg.dims[i]));
      csv << cfg.dims[i] << ',' << fmt(nd[i]) << ',' << fmt(expect) << '\n';
      body.push_back(Json{{"d", cfg.dims[i]}, {"noise_dist", nd[i]}, {"sqrt_expected_sq", expect}});
    }
  } else if (target == "figure5-middle") {
    const auto rows = contrast_sweep(standard_rates(), NoiseSpec::uniform(1.25),
                                     canned_sim_config({100, 1000, 10000}, c, reps(5000)));
    csv << "alpha,d,rc_mean\n";
    for (const auto& r : rows) {
      csv << r.label << ',' << r.record.d << ',' << fmt(r.record.rc_mean) << '\n';
      body.push_back(Json{{"alpha", r.label}, {"d", r.record.d}, {"rc_mean", opt_json(r.record.rc_mean)}});
    }
  } else if (target == "figure5-right") {
    const auto rows = alpha_sweep(standard_rates(), NoiseSpec::uniform(1.25),
                                  canned_sim_config({100, 1000, 10000}, c, reps(5000)));
    csv << "alpha,d,p_hat,ci,predicted\n";
    for (const auto& r : rows) {
      csv << r.label << ',' << r.record.d << ',' << fmt(r.record.p_hat) << ',' << fmt(r.record.ci_half_width)
          << ',' << fmt(r.record.predicted) << '\n';
      body.push_back(Json{{"alpha", r.label}, {"d", r.record.d}, {"p_hat", r.record.p_hat},
                          {"ci", r.record.ci_half_width}, {"predicted", opt_json(r.record.predicted)}});
    }
  } else if (target == "figure7") {
    LineExperimentConfig cfg;
    cfg.replicates = reps(100);
    cfg.seed = SeedSpec{c.seed};
    cfg.workers = c.workers;
    const auto rows = dimred_sweep(standard_rates(), cfg);
    csv << bench_csv(rows, true, "spearman");
    body = bench_json(rows);
  } else {
    throw UsageError("unknown repro target '" + target + "'");
  }
  if (c.format == "json") {
    o.artifacts.push_back({target + ".json", body.dump(2) + "\n"});
  } else {
    o.artifacts.push_back({target + ".csv", csv.str()});
  }
  return o;
}

// ---- manifests -------------------------------------------------------------

// Drops --out and --seed (both forms) so a manifest can be replayed with
// its recorded seed into a fresh directory.
inline std::vector<std::string> replayable_args(const std::vector<std::string>& args) {
  std::vector<std::string> keep;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--out" || a == "--seed") {
      ++i;
      continue;
    }
    if (a.starts_with("--out=") || a.starts_with("--seed=")) continue;
    keep.push_back(a);
  }
  return keep;
}

inline Json make_manifest(const std::string& verb, const std::vector<std::string>& args, const Outcome& o,
                          const std::string& started) {
  Json outputs = Json::object();
  for (const auto& a : o.artifacts) outputs[a.name] = sha256_hex(a.content);
  return Json{{"tool", "noisynn"},
              {"version", kVersion},
              {"verb", verb},
              {"argv", replayable_args(args)},
              {"config", o.config},
              {"seed", o.seed ? Json(*o.seed) : Json(nullptr)},
              {"started", started},
              {"finished", utc_now()},
              {"outputs", outputs}};
}

inline void emit(const std::string& verb, const std::vector<std::string>& args, const Outcome& o,
                 const Common& c, const std::string& started, std::ostream& out, std::ostream& err) {
  const Json manifest = make_manifest(verb, args, o, started);
  if (c.out_dir.empty()) {
    for (const auto& a : o.artifacts) out << a.content;
    err << manifest.dump() << '\n';
    return;
  }
  namespace fs = std::filesystem;
  fs::create_directories(c.out_dir);
  for (const auto& a : o.artifacts) {
    std::ofstream f(fs::path(c.out_dir) / a.name, std::ios::binary);
    f << a.content;
    if (!f) throw std::runtime_error("cannot write " + (fs::path(c.out_dir) / a.name).string());
  }
  std::ofstream f(fs::path(c.out_dir) / "run.json", std::ios::binary);
  f << manifest.dump(2) << '\n';
  if (!f) throw std::runtime_error("cannot write manifest in " + c.out_dir);
  out << (fs::path(c.out_dir) / "run.json").string() << '\n';
}

inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

inline int replay_manifest(const std::string& path, const Common& c, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open manifest");
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": not a manifest (" + e.what() + ")");
  }
  if (!manifest.contains("argv") || !manifest.contains("outputs")) throw ParseError(path + ": not a manifest");

  std::vector<std::string> args = manifest["argv"].get<std::vector<std::string>>();
  if (!manifest["seed"].is_null()) {
    args.push_back("--seed");
    args.push_back(std::to_string(manifest["seed"].get<std::uint64_t>()));
  }
  const fs::path dir = c.out_dir.empty()
                           ? fs::temp_directory_path() / ("noisynn-repro-" + sha256_hex(path + utc_now()).substr(0, 12))
                           : fs::path(c.out_dir);
  args.push_back("--out");
  args.push_back(dir.string());
  std::ostringstream sink;
  const int status = dispatch(args, sink, err);
  if (status != 0) return status;

  bool match = true;
  Json report = Json::object();
  for (const auto& [name, digest] : manifest["outputs"].items()) {
    std::ifstream f(dir / name, std::ios::binary);
    std::string actual;
    if (f) {
      std::ostringstream ss;
      ss << f.rdbuf();
      actual = sha256_hex(ss.str());
    }
    const bool same = actual == digest.get<std::string>();
    match = match && same;
    report[name] = Json{{"expected", digest}, {"actual", actual}, {"match", same}};
  }
  if (c.out_dir.empty()) fs::remove_all(dir);
  out << Json{{"manifest", path}, {"match", match}, {"outputs", report}}.dump(2) << '\n';
  return match ? 0 : 2;
}

// ---- dispatch --------------------------------------------------------------

inline void add_common(CLI::App* sub, Common& c, bool seeded) {
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out_dir, "Write outputs and run.json into this directory");
  if (seeded) {
    sub->add_option("--seed", c.seed, "Master seed")->envname(kSeedEnv);
    sub->add_option("--workers", c.workers, "Worker threads (0 = all cores); never changes results");
  }
}

inline void add_triple(CLI::App* sub, TripleArgs& t) {
  sub->add_option("--triple", t.triple, "Builtin triple: set1|set2|set3|hyper:<alpha>");
  sub->add_option("--x", t.x, "x: vector file or zero|ones|e1|hyper:<alpha>|pow:<p>");
  sub->add_option("--y", t.y, "y: vector file or builtin");
  sub->add_option("--z", t.z, "z: vector file or builtin");
}

inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neighbor preservation under dense noise: predictions, simulations and diagnostics", "noisynn"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  PredictArgs predict;
  SimulateArgs simulate;
  PhaseArgs phase;
  DiagnoseArgs diagnose;
  DimredArgs dimred;
  std::string repro_target;
  std::size_t repro_replicates = 0;

  auto* p = app.add_subcommand("predict", "Predicted preservation probability Phi(zeta) of a triple");
  add_triple(p, predict.triple);
  p->add_option("--d,--dims", predict.dims, "Dimension or comma-separated prefix grid");
  p->add_option("--noise", predict.noise, "uniform:<a> | gaussian:<s> | zero");
  add_common(p, common, false);

  auto* s = app.add_subcommand("simulate", "Monte Carlo preservation probability and normality of a triple");
  add_triple(s, simulate.triple);
  s->add_option("--dims", simulate.dims, "Comma-separated strictly increasing dimensions");
  s->add_option("--noise", simulate.noise, "uniform:<a> | gaussian:<s> | zero");
  s->add_option("--replicates", simulate.replicates, "Noise replicates");
  s->add_option("--emit", simulate.emit, "prob | y-samples | rc");
  add_common(s, common, true);

  auto* ph = app.add_subcommand("phase", "Growth exponent and phase label of a d,gap series");
  ph->add_option("--gaps", phase.gaps, "CSV file of d,gap rows")->required();
  ph->add_option("--band-low", phase.band_low, "Lower edge of the critical band");
  ph->add_option("--band-high", phase.band_high, "Upper edge of the critical band");
  ph->add_option("--fit", phase.fit, "increments | loglog");
  add_common(ph, common, false);

  auto* dg = app.add_subcommand("diagnose", "Diameter, inversion probabilities and kNN agreement of a dataset");
  dg->add_option("--matrix", diagnose.matrix, "CSV file, one point per row")->required();
  dg->add_option("--noise", diagnose.noise, "uniform:<a> | gaussian:<s> | zero");
  dg->add_option("--k", diagnose.k, "Neighbors for the kNN agreement");
  dg->add_option("--replicates", diagnose.replicates, "Noise replicates for the kNN agreement");
  add_common(dg, common, true);

  auto* dr = app.add_subcommand("dimred", "Noisy line-segment recovery by PCA, Isomap and diffusion maps");
  dr->add_option("--n", dimred.n, "Points on the segment");
  dr->add_option("--alpha", dimred.alpha, "Growth rate alpha >= 2 or inf");
  dr->add_option("--dims", dimred.dims, "Comma-separated strictly increasing dimensions");
  dr->add_option("--noise", dimred.noise, "uniform:<a> | gaussian:<s> | zero");
  dr->add_option("--replicates", dimred.replicates, "Noise replicates");
  dr->add_option("--methods", dimred.methods, "pca,isomap:<k>,diffusion[:<eps>]");
  dr->add_option("--correlation", dimred.correlation, "spearman | pearson");
  add_common(dr, common, true);

  auto* rp = app.add_subcommand("repro", "Run a canned experiment or replay a run.json manifest");
  rp->add_option("target", repro_target, "figure3|figure5-left|figure5-middle|figure5-right|figure7 or a manifest path")
      ->required();
  rp->add_option("--replicates", repro_replicates, "Override the canned replicate count");
  add_common(rp, common, true);

  if (args.empty()) {
    err << app.help();
    return 1;
  }

  const std::string& first = args.front();
  if (!first.starts_with("-") && app.get_subcommand_no_throw(first) == nullptr) {
    err << "unknown verb '" << first << "' (expected predict, simulate, phase, diagnose, dimred or repro)\n";
    return 1;
  }

  const std::string started = utc_now();
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    if (common.format.empty()) common.format = (p->parsed() || ph->parsed() || dg->parsed()) ? "json" : "csv";

    Outcome o;
    std::string verb;
    if (p->parsed()) {
      verb = "predict";
      o = run_predict(predict, common);
    } else if (s->parsed()) {
      verb = "simulate";
      o = run_simulate(simulate, common);
    } else if (ph->parsed()) {
      verb = "phase";
      o = run_phase(phase, common);
    } else if (dg->parsed()) {
      verb = "diagnose";
      o = run_diagnose(diagnose, common);
    } else if (dr->parsed()) {
      verb = "dimred";
      o = run_dimred(dimred, common);
    } else {
      const auto& names = repro_targets();
      if (std::find(names.begin(), names.end(), repro_target) == names.end()) {
        if (std::filesystem::is_regular_file(repro_target)) return replay_manifest(repro_target, common, out, err);
        throw UsageError("unknown repro target '" + repro_target + "' and no such manifest file");
      }
      verb = "repro";
      o = run_canned(repro_target, repro_replicates, common);
    }
    emit(verb, args, o, common, started, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace noisynn::cli
