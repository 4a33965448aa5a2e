#include "volfit/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "volfit/diag.hpp"
#include "volfit/errors.hpp"
#include "volfit/fit.hpp"
#include "volfit/pipeline.hpp"
#include "volfit/sde.hpp"

namespace volfit::cli {

namespace {

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot open output file " + out_path);
  out << text;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvFlags {
  std::string date_col = "Date";
  std::string value_col = "Close";
  int skip = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--date-col", date_col, "date column name")->capture_default_str();
    cmd->add_option("--value-col", value_col, "value column name")->capture_default_str();
    cmd->add_option("--skip", skip, "preamble rows before the header")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
  }

  pipeline::SeriesFrame load(const std::string& path) const {
    return pipeline::load_level_csv(path, {date_col, value_col, skip});
  }
};

// Centered, unit-variance log returns of a level frame, for the diagnostic
// subcommands that accept --returns.
std::vector<double> normalized_returns(const pipeline::SeriesFrame& frame) {
  return fit::preprocess_returns(frame.values).z;
}

sde::SdeSpec build_spec(const CLI::App& cmd, const std::string& kind, double J, double theta,
                        double Sigma, double gamma, double v_bar, double phi, double mu) {
  const auto need = [&](std::initializer_list<const char*> flags) {
    for (const char* f : flags) {
      if (cmd.count(f) == 0) {
        throw CLI::RequiredError(std::string(f) + " (required for --kind " + kind + ")");
      }
    }
  };
  if (kind == "giga" || kind == "gga-a" || kind == "gga-b" || kind == "gga-c") {
    need({"--J", "--theta", "--Sigma", "--gamma"});
    if (kind == "giga") return sde::SdeSpec::giga_vol(J, theta, Sigma, gamma);
    if (kind == "gga-a") return sde::SdeSpec::gga_vol_a(J, theta, Sigma, gamma);
    if (kind == "gga-b") return sde::SdeSpec::gga_vol_b(J, theta, Sigma, gamma);
    return sde::SdeSpec::gga_vol_c(J, theta, Sigma, gamma);
  }
  if (kind == "variance-iga") {
    need({"--J", "--Sigma", "--Vbar"});
    return sde::SdeSpec::variance_iga(J, Sigma, v_bar);
  }
  if (kind == "heston") {
    need({"--J", "--Vbar", "--phi"});
    return sde::SdeSpec::heston(J, v_bar, phi);
  }
  // ou | ln
  need({"--theta", "--mu", "--Sigma"});
  if (kind == "ou") return sde::SdeSpec::ou_log(theta, mu, Sigma);
  return sde::SdeSpec::ln_vol(theta, mu, Sigma);
}

}  // namespace

int run_cli(std::vector<std::string> args) {
  CLI::App app{"volatility and returns model toolkit"};
  app.require_subcommand(1);

  // --- fit-vol ---------------------------------------------------------
  auto* fit_vol = app.add_subcommand("fit-vol", "fit volatility families to a level CSV");
  std::string fv_path;
  CsvFlags fv_csv;
  std::vector<std::string> fv_families;
  fit_vol->add_option("csv", fv_path, "input CSV")->required();
  fv_csv.attach(fit_vol);
  fit_vol->add_option("--family", fv_families, "restrict output to these families")
      ->check(CLI::IsMember({"GIGa", "IGa", "Ga", "LN"}));

  // --- fit-returns -----------------------------------------------------
  auto* fit_ret = app.add_subcommand("fit-returns", "fit product families to level CSV returns");
  std::string fr_path;
  CsvFlags fr_csv;
  std::vector<std::string> fr_families;
  double fr_fix_gamma = 0.0;
  fit_ret->add_option("csv", fr_path, "input CSV")->required();
  fr_csv.attach(fit_ret);
  fit_ret->add_option("--family", fr_families, "fit only these product families")
      ->check(CLI::IsMember({"GIGa*N", "GIGa2*N", "IGa*N", "LN*N", "GGa*N", "Ga*N", "GGa2*N"}));
  auto* fr_fix_opt =
      fit_ret
          ->add_option("--fix-gamma", fr_fix_gamma,
                       "fit a single GIGa-base product with gamma pinned at this value")
          ->check(CLI::PositiveNumber);

  // --- simulate --------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "integrate one path of a mean-reverting SDE");
  std::string sim_kind = "giga", sim_out;
  double sim_J = 0.0, sim_theta = 0.0, sim_Sigma = 0.0, sim_gamma = 0.0;
  double sim_vbar = 0.0, sim_phi = 0.0, sim_mu = 0.0;
  sde::SimConfig sim_cfg;
  sim->add_option("--kind", sim_kind, "SDE kind")
      ->required()
      ->check(CLI::IsMember(
          {"giga", "variance-iga", "heston", "gga-a", "gga-b", "gga-c", "ou", "ln"}));
  sim->add_option("--J", sim_J, "mean-reversion strength");
  sim->add_option("--theta", sim_theta, "target scale (or rate for ou/ln)");
  sim->add_option("--Sigma", sim_Sigma, "noise amplitude");
  sim->add_option("--gamma", sim_gamma, "shape exponent");
  sim->add_option("--Vbar", sim_vbar, "mean variance level");
  sim->add_option("--phi", sim_phi, "square-root diffusion amplitude");
  sim->add_option("--mu", sim_mu, "log-space mean");
  sim->add_option("--dt", sim_cfg.dt, "time step")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim->add_option("--steps", sim_cfg.steps, "number of steps")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim->add_option("--x0", sim_cfg.x0, "initial value")->capture_default_str();
  sim->add_option("--seed", sim_cfg.seed, "RNG seed")->capture_default_str();
  sim->add_option("--out", sim_out, "output CSV path (stdout when omitted)");

  // --- relax -----------------------------------------------------------
  auto* relax = app.add_subcommand("relax", "ensemble relaxation-time experiment");
  double rx_J = 0.0, rx_Sigma = 0.0;
  std::string rx_out;
  sde::RelaxConfig rx_cfg;
  relax->add_option("--J", rx_J, "mean-reversion strength")->required()
      ->check(CLI::PositiveNumber);
  relax->add_option("--Sigma", rx_Sigma, "noise amplitude")->required()
      ->check(CLI::PositiveNumber);
  relax->add_option("--paths", rx_cfg.n_paths, "ensemble size")->capture_default_str()
      ->check(CLI::PositiveNumber);
  relax->add_option("--p", rx_cfg.p_threshold, "KS p-value threshold")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  relax->add_option("--dt", rx_cfg.dt, "time step")->capture_default_str()
      ->check(CLI::PositiveNumber);
  relax->add_option("--x0", rx_cfg.x0, "common start value")->capture_default_str()
      ->check(CLI::PositiveNumber);
  relax->add_flag("--stationary-start", rx_cfg.stationary_start,
                  "start from stationary draws instead of x0");
  relax->add_option("--max-time", rx_cfg.max_time, "give up after this horizon (0 = auto)")
      ->capture_default_str();
  relax->add_option("--seed", rx_cfg.seed, "RNG seed")->capture_default_str();
  relax->add_option("--out", rx_out, "output JSON path (stdout when omitted)");

  // --- tails -----------------------------------------------------------
  auto* tails = app.add_subcommand("tails", "log-log tail fit of a CSV sample");
  std::string tl_path, tl_side = "right";
  CsvFlags tl_csv;
  double tl_lo = 0.9, tl_hi = 0.99;
  bool tl_returns = false;
  tails->add_option("csv", tl_path, "input CSV")->required();
  tl_csv.attach(tails);
  tails->add_option("--lo", tl_lo, "lower CDF bound of the fit window")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  tails->add_option("--hi", tl_hi, "upper CDF bound of the fit window")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  tails->add_option("--side", tl_side, "which tail")->capture_default_str()
      ->check(CLI::IsMember({"right", "left-abs"}));
  tails->add_flag("--returns", tl_returns, "analyze normalized log returns of the levels");

  // --- spectrum --------------------------------------------------------
  auto* spec_cmd = app.add_subcommand("spectrum", "power-spectrum slope of a CSV series");
  std::string sp_path;
  CsvFlags sp_csv;
  bool sp_returns = false;
  spec_cmd->add_option("csv", sp_path, "input CSV")->required();
  sp_csv.attach(spec_cmd);
  spec_cmd->add_flag("--returns", sp_returns, "analyze normalized log returns of the levels");

  // --- report ----------------------------------------------------------
  auto* report = app.add_subcommand("report", "full fitting report for one CSV");
  std::string rp_path, rp_mode, rp_out;
  CsvFlags rp_csv;
  report->add_option("csv", rp_path, "input CSV")->required();
  rp_csv.attach(report);
  report->add_option("--mode", rp_mode, "vol fits levels, returns fits log returns")
      ->required()
      ->check(CLI::IsMember({"vol", "returns"}));
  report->add_option("--out", rp_out, "output JSON path (stdout when omitted)");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (fit_vol->parsed()) {
      auto rep = pipeline::run_volatility_report(fv_csv.load(fv_path));
      if (!fv_families.empty()) {
        std::erase_if(rep.fits, [&](const pipeline::LabeledFit& f) {
          return std::find(fv_families.begin(), fv_families.end(), f.family) ==
                 fv_families.end();
        });
      }
      write_text("", rep.to_json().dump(2) + "\n");
      return 0;
    }

    if (fit_ret->parsed()) {
      const auto frame = fr_csv.load(fr_path);
      if (fr_fix_opt->count() > 0) {
        const auto pre = fit::preprocess_returns(frame.values);
        const auto result = fit::fit_product(pre.z, dist::Kind::GIGa, fr_fix_gamma);
        write_text("", result.to_json().dump(2) + "\n");
        return 0;
      }
      pipeline::ReturnsOptions opts;
      opts.families = fr_families;
      write_text("", pipeline::run_returns_report(frame, opts).to_json().dump(2) + "\n");
      return 0;
    }

    if (sim->parsed()) {
      const auto spec = build_spec(*sim, sim_kind, sim_J, sim_theta, sim_Sigma, sim_gamma,
                                   sim_vbar, sim_phi, sim_mu);
      const auto path = sde::simulate(spec, sim_cfg);
      std::ostringstream csv;
      csv << "t,x\n";
      for (long long i = 1; i <= sim_cfg.steps; ++i) {
        csv << fmt17(static_cast<double>(i) * sim_cfg.dt) << ','
            << fmt17(path[static_cast<std::size_t>(i)]) << '\n';
      }
      write_text(sim_out, csv.str());
      return 0;
    }

    if (relax->parsed()) {
      const auto result = sde::relaxation_experiment(rx_J, rx_Sigma, rx_cfg);
      write_text(rx_out, result.to_json().dump(2) + "\n");
      return 0;
    }

    if (tails->parsed()) {
      const auto frame = tl_csv.load(tl_path);
      const std::vector<double> xs =
          tl_returns ? normalized_returns(frame) : frame.values;
      const auto side =
          tl_side == "right" ? diag::TailSide::Right : diag::TailSide::LeftAbs;
      write_text("", diag::tail_loglog_fit(xs, tl_lo, tl_hi, side).to_json().dump(2) + "\n");
      return 0;
    }

    if (spec_cmd->parsed()) {
      const auto frame = sp_csv.load(sp_path);
      const std::vector<double> xs =
          sp_returns ? normalized_returns(frame) : frame.values;
      write_text("", diag::spectrum_slope(xs).to_json().dump(2) + "\n");
      return 0;
    }

    if (report->parsed()) {
      const auto frame = rp_csv.load(rp_path);
      const auto rep = rp_mode == "vol" ? pipeline::run_volatility_report(frame)
                                        : pipeline::run_returns_report(frame);
      write_text(rp_out, rep.to_json().dump(2) + "\n");
      return 0;
    }
  } catch (const CLI::RequiredError& e) {
    // Kind-dependent simulate flags are validated after parsing.
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace volfit::cli
