#include "volfit/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "volfit/errors.hpp"

namespace volfit::pipeline {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (std::isspace(static_cast<unsigned char>(s[a])) || s[a] == '"')) ++a;
  while (b > a && (std::isspace(static_cast<unsigned char>(s[b - 1])) || s[b - 1] == '"')) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool valid_iso_date(const std::string& d) {
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(d[i]))) return false;
  }
  const int mm = (d[5] - '0') * 10 + (d[6] - '0');
  const int dd = (d[8] - '0') * 10 + (d[9] - '0');
  return mm >= 1 && mm <= 12 && dd >= 1 && dd <= 31;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::string stem_of(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  const auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

const std::vector<std::string> kVolFamilies = {"GIGa", "IGa", "Ga", "LN"};
const std::vector<std::string> kReturnsFamilies = {"GIGa*N", "GIGa2*N", "IGa*N", "LN*N",
                                                   "GGa*N", "Ga*N", "GGa2*N"};

void attach_rel_loglik(std::vector<LabeledFit>& fits, const std::string& baseline) {
  const auto it = std::find_if(fits.begin(), fits.end(), [&](const LabeledFit& f) {
    return f.family == baseline && f.result.has_value();
  });
  if (it == fits.end()) return;
  const double base = it->result->mean_loglik;
  for (auto& f : fits) {
    if (f.result) f.result->rel_loglik = f.result->mean_loglik - base;
  }
}

}  // namespace

SeriesFrame load_level_csv(const std::string& path, const CsvSpec& spec) {
  std::ifstream in(path);
  if (!in) throw DataError("load_level_csv: cannot open " + path);
  if (spec.skip_header_rows < 0) {
    throw std::domain_error("load_level_csv: skip_header_rows must be >= 0");
  }

  std::string line;
  for (int i = 0; i < spec.skip_header_rows; ++i) {
    if (!std::getline(in, line)) throw DataError("load_level_csv: file ends in preamble");
  }
  if (!std::getline(in, line)) throw DataError("load_level_csv: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_csv(line);
  std::ptrdiff_t date_idx = -1, value_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = trim(header[i]);
    if (name == spec.date_col) date_idx = static_cast<std::ptrdiff_t>(i);
    if (name == spec.value_col) value_idx = static_cast<std::ptrdiff_t>(i);
  }
  if (date_idx < 0) throw DataError("load_level_csv: column not found: " + spec.date_col);
  if (value_idx < 0) throw DataError("load_level_csv: column not found: " + spec.value_col);

  SeriesFrame frame;
  frame.name = stem_of(path);
  frame.kind = SeriesKind::Level;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      ++frame.dropped_rows;
      continue;
    }
    const std::string date = trim(fields[static_cast<std::size_t>(date_idx)]);
    double value;
    if (!valid_iso_date(date) ||
        !parse_double(trim(fields[static_cast<std::size_t>(value_idx)]), value)) {
      ++frame.dropped_rows;
      continue;
    }
    if (!frame.dates.empty() && date <= frame.dates.back()) {
      throw DataError("load_level_csv: dates not strictly increasing at data row " +
                      std::to_string(row_no));
    }
    frame.dates.push_back(date);
    frame.values.push_back(value);
  }
  if (frame.values.empty()) throw DataError("load_level_csv: no valid data rows in " + path);
  return frame;
}

SeriesFrame to_returns(const SeriesFrame& levels) {
  if (levels.kind != SeriesKind::Level) {
    throw DataError("to_returns: input must be a level series");
  }
  if (levels.values.size() < 2) throw DataError("to_returns: need at least 2 levels");
  SeriesFrame out;
  out.name = levels.name;
  out.kind = SeriesKind::LogReturn;
  out.dropped_rows = levels.dropped_rows;
  out.dates.assign(levels.dates.begin() + 1, levels.dates.end());
  out.values.reserve(levels.values.size() - 1);
  for (std::size_t i = 0; i + 1 < levels.values.size(); ++i) {
    if (!(levels.values[i] > 0.0) || !(levels.values[i + 1] > 0.0)) {
      throw DataError("to_returns: levels must be positive");
    }
    out.values.push_back(std::log(levels.values[i + 1]) - std::log(levels.values[i]));
  }
  return out;
}

std::vector<SeriesFrame> min_length_filter(std::vector<SeriesFrame> frames,
                                           std::size_t min_points,
                                           std::vector<std::string>* dropped_names) {
  std::vector<SeriesFrame> kept;
  kept.reserve(frames.size());
  for (auto& f : frames) {
    if (f.values.size() >= min_points) {
      kept.push_back(std::move(f));
    } else if (dropped_names) {
      dropped_names->push_back(f.name);
    }
  }
  return kept;
}

nlohmann::ordered_json LabeledFit::to_json() const {
  nlohmann::ordered_json j;
  j["family"] = family;
  if (result) {
    j["result"] = result->to_json();
  } else {
    j["result"] = nullptr;
    j["error"] = error;
  }
  return j;
}

LabeledFit LabeledFit::from_json(const nlohmann::ordered_json& j) {
  try {
    LabeledFit f;
    f.family = j.at("family").get<std::string>();
    if (!j.at("result").is_null()) {
      f.result = fit::FitResult::from_json(j.at("result"));
    } else {
      f.error = j.at("error").get<std::string>();
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("LabeledFit::from_json: ") + e.what());
  }
}

nlohmann::ordered_json PreprocessSummary::to_json() const {
  return {{"n_returns", n_returns},
          {"mean_log_return", mean_log_return},
          {"stdev_log_return", stdev_log_return},
          {"annualized_log_return", annualized_log_return}};
}

PreprocessSummary PreprocessSummary::from_json(const nlohmann::ordered_json& j) {
  try {
    return {j.at("n_returns").get<std::size_t>(),
            j.at("mean_log_return").get<double>(),
            j.at("stdev_log_return").get<double>(),
            j.at("annualized_log_return").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("PreprocessSummary::from_json: ") + e.what());
  }
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["dataset"] = dataset;
  j["mode"] = mode;
  j["n"] = n;
  j["preprocessing"] = preprocessing ? preprocessing->to_json() : nlohmann::ordered_json();
  nlohmann::ordered_json fj = nlohmann::ordered_json::array();
  for (const auto& f : fits) fj.push_back(f.to_json());
  j["fits"] = fj;
  j["tail_right"] = tail_right ? tail_right->to_json() : nlohmann::ordered_json();
  j["tail_left"] = tail_left ? tail_left->to_json() : nlohmann::ordered_json();
  j["spectrum"] = spectrum ? spectrum->to_json() : nlohmann::ordered_json();
  return j;
}

Report Report::from_json(const nlohmann::ordered_json& j) {
  try {
    Report r;
    r.dataset = j.at("dataset").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.n = j.at("n").get<std::size_t>();
    if (!j.at("preprocessing").is_null()) {
      r.preprocessing = PreprocessSummary::from_json(j.at("preprocessing"));
    }
    for (const auto& f : j.at("fits")) r.fits.push_back(LabeledFit::from_json(f));
    if (!j.at("tail_right").is_null()) r.tail_right = diag::TailFit::from_json(j.at("tail_right"));
    if (!j.at("tail_left").is_null()) r.tail_left = diag::TailFit::from_json(j.at("tail_left"));
    if (!j.at("spectrum").is_null()) r.spectrum = diag::SpectrumFit::from_json(j.at("spectrum"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("Report::from_json: ") + e.what());
  }
}

Report run_volatility_report(const SeriesFrame& frame) {
  if (frame.values.size() < 50) {
    throw DataError("run_volatility_report: need at least 50 points");
  }
  for (double v : frame.values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DataError("run_volatility_report: volatility values must be positive");
    }
  }
  const std::span<const double> xs(frame.values);

  Report rep;
  rep.dataset = frame.name;
  rep.mode = "volatility";
  rep.n = frame.values.size();

  for (const auto& family : kVolFamilies) {
    LabeledFit lf;
    lf.family = family;
    try {
      if (family == "GIGa") {
        lf.result = fit::fit_gga_giga(xs);
      } else if (family == "IGa") {
        lf.result = fit::fit_fixed_gamma(xs, 1.0, true);
      } else if (family == "Ga") {
        lf.result = fit::fit_fixed_gamma(xs, 1.0, false);
      } else {
        lf.result = fit::fit_ln(xs);
      }
    } catch (const std::exception& e) {
      lf.error = e.what();
    }
    rep.fits.push_back(std::move(lf));
  }
  attach_rel_loglik(rep.fits, "LN");

  rep.tail_right = diag::tail_loglog_fit(xs);
  rep.spectrum = diag::spectrum_slope(xs);
  return rep;
}

Report run_returns_report(const SeriesFrame& frame, const ReturnsOptions& opts) {
  fit::PreprocessedReturns pre;
  switch (frame.kind) {
    case SeriesKind::Level:
      pre = fit::preprocess_returns(frame.values);
      break;
    case SeriesKind::LogReturn: {
      // Already differenced: only center and scale.
      const auto& r = frame.values;
      if (r.size() < 2) throw DataError("run_returns_report: need at least 2 returns");
      double m = 0.0;
      for (double v : r) m += v;
      m /= static_cast<double>(r.size());
      double ss = 0.0;
      for (double v : r) ss += (v - m) * (v - m);
      const double s = std::sqrt(ss / static_cast<double>(r.size()));
      if (!(s > 0.0)) throw DataError("run_returns_report: constant log returns");
      pre.mean_log_return = m;
      pre.stdev_log_return = s;
      pre.z.reserve(r.size());
      for (double v : r) pre.z.push_back((v - m) / s);
      break;
    }
    case SeriesKind::PreprocessedReturn:
      pre.z = frame.values;
      pre.mean_log_return = 0.0;
      pre.stdev_log_return = 1.0;
      break;
  }
  if (pre.z.size() < 300) {
    throw DataError("run_returns_report: need at least 300 returns");
  }

  // The report always lists families in the canonical menu order, whatever
  // order the caller asked for them in.
  std::vector<std::string> families;
  if (opts.families.empty()) {
    families = kReturnsFamilies;
  } else {
    for (const auto& f : opts.families) {
      if (std::find(kReturnsFamilies.begin(), kReturnsFamilies.end(), f) ==
          kReturnsFamilies.end()) {
        throw DataError("run_returns_report: unknown family " + f);
      }
    }
    for (const auto& f : kReturnsFamilies) {
      if (std::find(opts.families.begin(), opts.families.end(), f) !=
          opts.families.end()) {
        families.push_back(f);
      }
    }
  }

  const std::span<const double> zs(pre.z);
  Report rep;
  rep.dataset = frame.name;
  rep.mode = "returns";
  rep.n = pre.z.size();
  rep.preprocessing = PreprocessSummary{
      pre.z.size(), pre.mean_log_return, pre.stdev_log_return,
      252.0 * pre.mean_log_return};

  // Fixed-gamma fits run first so the free-gamma searches can reuse their
  // optima as additional starting points.
  std::optional<fit::FitResult> giga2, gga2;
  const auto fit_family = [&](const std::string& family) -> fit::FitResult {
    using dist::Kind;
    if (family == "GIGa*N") {
      std::vector<std::vector<double>> starts;
      if (giga2) {
        starts.push_back({std::log(giga2->model.alpha()), std::log(giga2->model.beta()),
                          std::log(2.0)});
      }
      return fit::fit_product(zs, Kind::GIGa, std::nullopt, opts.simplex, starts);
    }
    if (family == "GIGa2*N") return fit::fit_product(zs, Kind::GIGa, 2.0, opts.simplex);
    if (family == "IGa*N") return fit::fit_product(zs, Kind::IGa, std::nullopt, opts.simplex);
    if (family == "LN*N") return fit::fit_product(zs, Kind::LN, std::nullopt, opts.simplex);
    if (family == "GGa*N") {
      std::vector<std::vector<double>> starts;
      if (gga2) {
        starts.push_back({std::log(gga2->model.alpha()), std::log(gga2->model.beta()),
                          std::log(2.0)});
      }
      return fit::fit_product(zs, Kind::GGa, std::nullopt, opts.simplex, starts);
    }
    if (family == "Ga*N") return fit::fit_product(zs, Kind::Ga, std::nullopt, opts.simplex);
    return fit::fit_product(zs, Kind::GGa, 2.0, opts.simplex);  // GGa2*N
  };

  const bool wants_giga_free =
      std::find(families.begin(), families.end(), "GIGa*N") != families.end();
  const bool wants_gga_free =
      std::find(families.begin(), families.end(), "GGa*N") != families.end();

  std::vector<LabeledFit> fits;
  const auto run_one = [&](const std::string& family) {
    LabeledFit lf;
    lf.family = family;
    try {
      lf.result = fit_family(family);
      if (family == "GIGa2*N") giga2 = lf.result;
      if (family == "GGa2*N") gga2 = lf.result;
    } catch (const std::exception& e) {
      lf.error = e.what();
    }
    fits.push_back(std::move(lf));
  };

  std::vector<std::string> first_pass, second_pass;
  for (const auto& f : families) {
    const bool pinned_first = (f == "GIGa2*N" && wants_giga_free) ||
                              (f == "GGa2*N" && wants_gga_free);
    (pinned_first ? first_pass : second_pass).push_back(f);
  }
  for (const auto& f : first_pass) run_one(f);
  for (const auto& f : second_pass) run_one(f);

  // Restore the canonical family order for the report.
  rep.fits.reserve(fits.size());
  for (const auto& f : families) {
    const auto it = std::find_if(fits.begin(), fits.end(),
                                 [&](const LabeledFit& lf) { return lf.family == f; });
    rep.fits.push_back(*it);
  }
  attach_rel_loglik(rep.fits, "LN*N");

  rep.tail_right = diag::tail_loglog_fit(zs, 0.9, 0.99, diag::TailSide::Right);
  rep.tail_left = diag::tail_loglog_fit(zs, 0.9, 0.99, diag::TailSide::LeftAbs);
  rep.spectrum = diag::spectrum_slope(zs);
  return rep;
}

}  // namespace volfit::pipeline
