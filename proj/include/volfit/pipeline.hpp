#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "volfit/diag.hpp"
#include "volfit/fit.hpp"

namespace volfit::pipeline {

enum class SeriesKind { Level, LogReturn, PreprocessedReturn };

struct SeriesFrame {
  std::string name;
  std::vector<std::string> dates;  // ISO-8601, strictly increasing
  std::vector<double> values;
  SeriesKind kind = SeriesKind::Level;
  std::size_t dropped_rows = 0;  // malformed CSV rows skipped at load
};

struct CsvSpec {
  std::string date_col = "Date";
  std::string value_col = "Close";
  int skip_header_rows = 0;  // preamble lines before the header
};

// Date/value CSV loader.  Malformed rows (wrong field count, bad date, value
// that does not parse to a finite number) are dropped and counted;
// out-of-order dates are structural and throw.
SeriesFrame load_level_csv(const std::string& path, const CsvSpec& spec = {});

// Log returns between consecutive levels; output has one fewer row and
// carries the date of each interval's end point.
SeriesFrame to_returns(const SeriesFrame& levels);

// Keeps frames with at least min_points values (inclusive); names of dropped
// frames are appended to dropped_names when given.
std::vector<SeriesFrame> min_length_filter(std::vector<SeriesFrame> frames,
                                           std::size_t min_points = 200,
                                           std::vector<std::string>* dropped_names = nullptr);

struct LabeledFit {
  std::string family;
  std::optional<fit::FitResult> result;  // empty when the family failed to fit
  std::string error;                     // failure reason when result is empty
  nlohmann::ordered_json to_json() const;
  static LabeledFit from_json(const nlohmann::ordered_json& j);
  friend bool operator==(const LabeledFit& a, const LabeledFit& b) = default;
};

struct PreprocessSummary {
  std::size_t n_returns = 0;
  double mean_log_return = 0.0;
  double stdev_log_return = 0.0;
  double annualized_log_return = 0.0;  // 252 trading days per year
  nlohmann::ordered_json to_json() const;
  static PreprocessSummary from_json(const nlohmann::ordered_json& j);
  friend bool operator==(const PreprocessSummary& a, const PreprocessSummary& b) = default;
};

struct Report {
  std::string dataset;
  std::string mode;  // "volatility" | "returns"
  std::size_t n = 0;
  std::optional<PreprocessSummary> preprocessing;
  std::vector<LabeledFit> fits;
  std::optional<diag::TailFit> tail_right;
  std::optional<diag::TailFit> tail_left;
  std::optional<diag::SpectrumFit> spectrum;
  nlohmann::ordered_json to_json() const;
  static Report from_json(const nlohmann::ordered_json& j);
  friend bool operator==(const Report& a, const Report& b) = default;
};

// Fits the level values as a volatility sample against the GIGa, IGa, Ga and
// LN families (log-likelihoods reported relative to LN), plus upper-tail and
// spectrum diagnostics.  Requires at least 50 points.  A family that fails
// is recorded with its error; the rest of the report still completes.
Report run_volatility_report(const SeriesFrame& frame);

struct ReturnsOptions {
  fit::SimplexConfig simplex = {};
  std::vector<std::string> families;  // empty -> all seven product families
};

// Normalizes returns and fits the product families
//   GIGa*N, GIGa2*N, IGa*N, LN*N, GGa*N, Ga*N, GGa2*N
// (2 marks gamma pinned at 2; log-likelihoods relative to LN*N), plus both
// tail fits and the spectrum of the normalized returns.  Requires at least
// 300 returns.
Report run_returns_report(const SeriesFrame& frame, const ReturnsOptions& opts = {});

}  // namespace volfit::pipeline
