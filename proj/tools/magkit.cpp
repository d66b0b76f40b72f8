#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"

namespace {

void add_common(CLI::App* sub, magkit::cli::Request& r, bool needs_input) {
  auto* in = sub->add_option("--input,-i", r.input, "distance CSV or JSON file");
  if (needs_input) in->required();
  sub->add_option("--output,-o", r.output, "write result here instead of stdout");
  sub->add_option("--tol-pd", r.tol_pd, "relative eigenvalue cutoff for definiteness");
}

}  // namespace

int main(int argc, char** argv) {
  using magkit::cli::Request;
  Request r;
  r.format.clear();
  CLI::App app{"Magnitude of finite metric spaces"};
  app.require_subcommand(1);

  auto* compute = app.add_subcommand("compute", "magnitude, weighting and residual summary");
  add_common(compute, r, true);
  compute->add_option("--t", r.t, "scale factor");

  auto* embed = app.add_subcommand("embed", "similarity embedding and circumsphere");
  add_common(embed, r, true);
  embed->add_option("--t", r.t, "scale factor");
  embed->add_option("--format", r.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* sweep = app.add_subcommand("sweep", "magnitude over a logarithmic scale grid");
  add_common(sweep, r, true);
  sweep->add_option("--t-min", r.t_min, "smallest scale");
  sweep->add_option("--t-max", r.t_max, "largest scale");
  sweep->add_option("--grid", r.grid, "grid points per decade");
  sweep->add_option("--format", r.format, "csv or json")->check(CLI::IsMember({"json", "csv"}));

  auto* subspace = app.add_subcommand("subspace", "magnitude of a subspace from the full space");
  add_common(subspace, r, true);
  subspace->add_option("--t", r.t, "scale factor");
  subspace->add_option("--subset", r.subset, "points to keep, e.g. \"1,2,4\"");
  subspace->add_option("--remove", r.remove, "points to remove, e.g. \"3\"");

  auto* chain = app.add_subcommand("delete-chain", "remove points one at a time");
  add_common(chain, r, true);
  chain->add_option("--t", r.t, "scale factor");
  chain->add_option("--remove", r.remove, "removal order, e.g. \"3,1\"")->required();

  auto* spd = app.add_subcommand("spd", "strong positive definiteness certificate");
  add_common(spd, r, true);
  spd->add_option("--t", r.t, "scale factor");
  spd->add_option("--t-max", r.t_max, "also search the threshold scale up to this value");

  auto* sub = app.add_subcommand("submodular", "submodularity of magnitude set functions");
  add_common(sub, r, true);
  sub->add_option("--kind", r.kind, "inverse or shifted")
      ->check(CLI::IsMember({"inverse", "shifted"}));
  sub->add_option("--t", r.t, "scale factor");
  sub->add_option("--alpha", r.alpha, "value on the empty set");
  sub->add_option("--seed", r.seed, "sampling seed for more than 16 points");
  sub->add_option("--t-min", r.t_min, "onset scan: smallest scale");
  sub->add_option("--t-max", r.t_max, "onset scan: largest scale (shifted only)");
  sub->add_option("--grid", r.grid, "onset scan: grid points per decade");

  auto* ids = app.add_subcommand("identities", "residuals of the matrix identities");
  add_common(ids, r, true);
  ids->add_option("--t", r.t, "scale factor");

  auto* repro = app.add_subcommand("reproduce", "data behind the reference figures and examples");
  add_common(repro, r, false);
  repro->add_option("--target", r.target, "fig1, fig2, example-2-3 or example-fb-2pt")
      ->required();
  repro->add_option("--t-min", r.t_min, "smallest scale");
  repro->add_option("--t-max", r.t_max, "largest scale");
  repro->add_option("--grid", r.grid, "grid size (fig1) or points per decade (fig2)");
  repro->add_option("--delta", r.delta, "similarity of the two points (example-fb-2pt)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (r.format.empty()) r.format = sweep->parsed() ? "csv" : "json";
  r.command = app.get_subcommands().front()->get_name();

  const auto outcome = magkit::cli::run(r);
  if (!outcome.diagnostic.empty()) std::cerr << outcome.diagnostic << '\n';
  if (r.output.empty()) {
    std::cout << outcome.body;
  } else {
    std::ofstream out(r.output, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write '" << r.output << "'\n";
      return 1;
    }
    out << outcome.body;
  }
  return outcome.exit_code;
}
