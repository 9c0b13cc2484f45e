#pragma once

// Canned experiment sweeps shared by the command-line tool and the acceptance
// harness. Each returns plot-ready rows.

#include <cstddef>
#include <string>
#include <vector>

#include "noisynn/dimred.hpp"
#include "noisynn/io.hpp"
#include "noisynn/simulation.hpp"

namespace noisynn {

inline std::string rate_label(const GrowthRate& rate) {
  return rate.is_infinite() ? "inf" : io::format_double(rate.alpha());
}

inline GrowthRate parse_rate(std::string_view text) {
  text = io::trim(text);
  if (text == "inf" || text == "infinity") return GrowthRate::infinite();
  return GrowthRate::of(io::parse_double_or_throw(text, "alpha"));
}

/// alpha in {2, 3, 4, 5, 6, inf}
inline std::vector<GrowthRate> standard_rates() {
  return {GrowthRate::of(2.0), GrowthRate::of(3.0), GrowthRate::of(4.0),
          GrowthRate::of(5.0), GrowthRate::of(6.0), GrowthRate::infinite()};
}

inline const char* builtin_name(BuiltinTriple kind) {
  switch (kind) {
    case BuiltinTriple::BoundedBounded: return "set1";
    case BuiltinTriple::UnboundedBounded: return "set2";
    case BuiltinTriple::UnboundedUnbounded: return "set3";
  }
  return "unknown";
}

struct SweepRow {
  std::string label;  // alpha or set name
  SimRecord record;
};

/// Preservation probability on x = y = 0, z = z(alpha) for every rate.
inline std::vector<SweepRow> alpha_sweep(const std::vector<GrowthRate>& rates, const NoiseSpec& noise,
                                         const SimConfig& cfg) {
  cfg.validate();
  if (cfg.dims.empty()) throw InvalidParameter("alpha sweep: dims must be given");
  std::vector<SweepRow> rows;
  for (const auto& rate : rates) {
    auto res = simulate_preservation(growth_triple(rate, cfg.dims.back()), noise, cfg,
                                     SimOptions{false, false});
    for (auto& rec : res.records) rows.push_back({rate_label(rate), std::move(rec)});
  }
  return rows;
}

/// Mean relative contrast of the three points {0, 0, z(alpha)} per rate and d.
inline std::vector<SweepRow> contrast_sweep(const std::vector<GrowthRate>& rates, const NoiseSpec& noise,
                                            const SimConfig& cfg) {
  cfg.validate();
  if (cfg.dims.empty()) throw InvalidParameter("contrast sweep: dims must be given");
  std::vector<SweepRow> rows;
  for (const auto& rate : rates) {
    const auto t = growth_triple(rate, cfg.dims.back());
    const std::vector<std::vector<double>> pts{t.x, t.y, t.z};
    const auto rc = relative_contrast_samples(pts, noise, cfg);
    for (std::size_t i = 0; i < cfg.dims.size(); ++i) {
      SweepRow row{rate_label(rate), {}};
      row.record.d = cfg.dims[i];
      row.record.rc_mean = mean(rc[i]);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

/// Normality of y(d) for the three builtin validation triples.
inline std::vector<SweepRow> normality_sweep(const NoiseSpec& noise, const SimConfig& cfg) {
  cfg.validate();
  if (cfg.dims.empty()) throw InvalidParameter("normality sweep: dims must be given");
  std::vector<SweepRow> rows;
  for (auto kind : {BuiltinTriple::BoundedBounded, BuiltinTriple::UnboundedBounded,
                    BuiltinTriple::UnboundedUnbounded}) {
    auto res = simulate_preservation(builtin_triple(kind, cfg.dims.back()), noise, cfg,
                                     SimOptions{false, true});
    for (auto& rec : res.records) rows.push_back({builtin_name(kind), std::move(rec)});
  }
  return rows;
}

struct BenchSweepRow {
  std::string label;
  BenchCell cell;
};

inline std::vector<BenchSweepRow> dimred_sweep(const std::vector<GrowthRate>& rates,
                                               LineExperimentConfig cfg) {
  std::vector<BenchSweepRow> rows;
  for (const auto& rate : rates) {
    cfg.alpha = rate;
    for (auto& cell : line_experiment(cfg).cells) rows.push_back({rate_label(rate), std::move(cell)});
  }
  return rows;
}

}  // namespace noisynn
