#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "franson/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Franson interferometer coincidence simulator"};
  app.require_subcommand(1);

  franson::ScanArgs scan;
  std::string sign = "dip";
  auto* scan_cmd = app.add_subcommand("scan", "Evaluate a preset or configured scan and write a CSV");
  scan_cmd->add_option("--config", scan.config, "JSON run configuration");
  scan_cmd->add_option("--preset", scan.preset, "fig2a, fig2b, fig2c, fig2d, fig3, fig4 or custom");
  scan_cmd->add_option("--sign", sign, "peak (+45/+45 analyzers) or dip (+45/-45)")
      ->check(CLI::IsMember({"peak", "dip"}));
  scan_cmd->add_flag("--counts", scan.counts, "Add Poisson-sampled counts");
  scan_cmd->add_option("--out", scan.out, "CSV output path (stdout if omitted)");
  scan_cmd->add_option("--svg", scan.svg, "SVG plot output path");
  scan_cmd->add_option("--seed", scan.seed, "Random seed for --counts");
  scan_cmd->add_option("--threads", scan.threads, "Worker threads (0 = all cores)");

  franson::FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a CSV dataset");
  fit_cmd->add_option("--in", fit.in, "CSV dataset")->required();
  fit_cmd->add_option("--model", fit.model, "hom, beat, polarization, envelope or fringe")->required();
  fit_cmd->add_option("--config", fit.config, "Run configuration (accidentals, pump wavelength)");
  fit_cmd->add_option("--out", fit.out, "JSON report path (stdout if omitted)");

  franson::ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Simulate and fit every preset");
  report_cmd->add_option("--seed", report.seed, "Random seed");
  report_cmd->add_option("--threads", report.threads, "Worker threads (0 = all cores)");
  report_cmd->add_option("--out-dir", report.out_dir, "Directory for CSV and SVG files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : franson::exit_config_error;
  }

  if (*scan_cmd) {
    scan.sign = sign == "peak" ? franson::FringeSign::Peak : franson::FringeSign::Dip;
    return franson::command_scan(scan, std::cout, std::cerr);
  }
  if (*fit_cmd) return franson::command_fit(fit, std::cout, std::cerr);
  return franson::command_report(report, std::cout, std::cerr);
}
