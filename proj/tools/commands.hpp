#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "magkit/magkit.hpp"

namespace magkit::cli {

// Point indices on the command line and in command output are one-based.
inline constexpr std::size_t kBase = 1;

struct Request {
  std::string command;
  std::string input;
  std::string output;
  std::string target;
  std::string format = "json";
  std::string kind = "inverse";
  std::string subset;
  std::string remove;
  std::optional<double> t;
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::optional<int> grid;
  double alpha = -2.0;
  double delta = 0.5;
  std::uint64_t seed = 0;
  std::optional<double> tol_pd;
};

struct Outcome {
  int exit_code = 0;
  std::string body;        // JSON or CSV payload
  std::string diagnostic;  // one line for stderr, empty on success
};

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Tolerances tolerances(const Request& r) {
  Tolerances tol;
  if (r.tol_pd) tol.pd = *r.tol_pd;
  return tol;
}

/// "2,5,7" -> zero-based indices {1,4,6}.
inline std::vector<std::size_t> parse_indices(const std::string& text, std::size_t n) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw Error(ErrorCode::ParseError, "empty index in '" + text + "'");
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad index '" + item + "'");
    }
    if (used != item.size()) throw Error(ErrorCode::ParseError, "bad index '" + item + "'");
    if (v < 1 || static_cast<std::size_t>(v) > n) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "index " + item + " outside 1.." + std::to_string(n));
    }
    out.push_back(static_cast<std::size_t>(v) - kBase);
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, "no indices given");
  return out;
}

inline MetricSpace input_space(const Request& r, const Tolerances& tol) {
  if (r.input.empty()) throw Error(ErrorCode::ParseError, "--input is required");
  MetricSpace space = load_space(r.input, tol);
  if (r.t) space = scale(space, *r.t);
  return space;
}

inline Json magnitude_block(const SimilarityData& d) {
  Json j{{"definiteness", std::string(to_string(d.definiteness))},
         {"eigenvalues", to_json(d.eigenvalues)},
         {"magnitude", to_json(d.magnitude)}};
  if (d.weighting) {
    j["weighting"] = to_json(*d.weighting);
    j["normalized_weighting"] = to_json(Vector(*d.weighting / *d.magnitude));
  } else {
    j["weighting"] = nullptr;
  }
  return j;
}

inline Outcome cmd_compute(const Request& r) {
  const Tolerances tol = tolerances(r);
  const MetricSpace space = input_space(r, tol);
  const SimilarityData d = analyze(space, tol);
  Json j = magnitude_block(d);
  j["n"] = space.size();
  j["t"] = r.t.value_or(1.0);
  if (!d.weighting) {
    j["error"] = "NoSolution";
    j["message"] = "Zw = 1 has no solution: 1 is not in the range of Z";
    return {2, dump(j), "NoSolution: magnitude does not exist at this scale"};
  }
  if (d.definiteness == Definiteness::PositiveDefinite) {
    j["circumradius"] = circumradius_equilibrium(d.z, tol).radius;
  } else {
    j["circumradius"] = nullptr;
  }
  try {
    const ResidualReport rep = identity_residuals(space, 1e-9, tol);
    j["residuals"] = {{"all_pass", rep.all_pass()}, {"max_residual", rep.max_residual()}};
  } catch (const Error& e) {
    j["residuals"] = {{"skipped", std::string(to_string(e.code()))}};
  }
  return {0, dump(j), {}};
}

inline Outcome cmd_embed(const Request& r) {
  const Tolerances tol = tolerances(r);
  const EmbeddingData e = similarity_embedding(input_space(r, tol), tol);
  if (r.format == "csv") {
    std::ostringstream os;
    const Index dim = e.sqrt_k.rows();
    for (Index k = 0; k < dim; ++k) os << (k ? "," : "") << "x" << (k + 1);
    os << '\n';
    for (Index i = 0; i < e.sqrt_k.cols(); ++i) {
      for (Index k = 0; k < dim; ++k) os << (k ? "," : "") << format_double(e.sqrt_k(k, i));
      os << '\n';
    }
    return {0, os.str(), {}};
  }
  return {0, dump(to_json(e)), {}};
}

inline std::vector<double> request_grid(const Request& r, double lo, double hi) {
  return log_grid(r.t_min.value_or(lo), r.t_max.value_or(hi), r.grid.value_or(32));
}

inline Outcome cmd_sweep(const Request& r) {
  const Tolerances tol = tolerances(r);
  if (r.input.empty()) throw Error(ErrorCode::ParseError, "--input is required");
  const MetricSpace space = load_space(r.input, tol);
  const auto points = magnitude_sweep(space, request_grid(r, 1e-2, 1e2), tol);
  if (r.format == "json") {
    Json a = Json::array();
    for (const auto& p : points) {
      a.push_back({{"t", p.t},
                   {"magnitude", to_json(p.magnitude)},
                   {"q", p.q_below_floor ? Json(nullptr) : to_json(p.q)},
                   {"q_below_floor", p.q_below_floor},
                   {"R_squared", to_json(p.r_squared)},
                   {"asymptote", to_json(p.asymptote)},
                   {"definiteness", std::string(to_string(p.definiteness))}});
    }
    return {0, dump(a), {}};
  }
  std::ostringstream os;
  write_sweep_csv(os, points);
  return {0, os.str(), {}};
}

inline Outcome cmd_subspace(const Request& r) {
  const Tolerances tol = tolerances(r);
  const MetricSpace space = input_space(r, tol);
  const std::size_t n = space.size();
  if (r.subset.empty() == r.remove.empty()) {
    throw Error(ErrorCode::ParseError, "give exactly one of --subset or --remove");
  }
  const SubsetSelector subset =
      r.subset.empty() ? SubsetSelector(parse_indices(r.remove, n)).complement(n)
                       : SubsetSelector(parse_indices(r.subset, n));
  if (subset.empty()) throw Error(ErrorCode::EmptySubset, "nothing left after removal");
  const SubspaceResult inc = checked_subspace(space, subset, tol);
  const SubspaceResult rec = recompute_subspace(space, subset, tol);
  Json j = to_json(inc, kBase);
  j["recomputed"] = to_json(rec, kBase);
  j["full_magnitude"] = full_space_result(space, tol).magnitude;
  return {0, dump(j), {}};
}

inline Outcome cmd_delete_chain(const Request& r) {
  const Tolerances tol = tolerances(r);
  const MetricSpace space = input_space(r, tol);
  if (r.remove.empty()) throw Error(ErrorCode::ParseError, "--remove is required");
  const auto order = parse_indices(r.remove, space.size());
  SubspaceResult current = full_space_result(space, tol);
  Json steps = Json::array();
  for (std::size_t x : order) {
    const auto pos = current.subset.position(x);
    if (!pos) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "point " + std::to_string(x + kBase) + " already removed");
    }
    const auto p = static_cast<Index>(*pos);
    const double change = 2.0 * current.weighting(p) * current.weighting(p) /
                          (current.kdag(p, p) * current.magnitude);
    SubspaceResult next = delete_point(current, x, tol);
    const SubspaceResult rec = recompute_subspace(space, next.subset, tol);
    steps.push_back({{"removed", x + kBase},
                     {"change_contribution", change},
                     {"magnitude", next.magnitude},
                     {"recomputed_magnitude", rec.magnitude},
                     {"subset", to_json(next.subset, kBase)},
                     {"normalized_weighting", to_json(next.normalized_weighting())}});
    current = std::move(next);
  }
  Json j{{"full_magnitude", full_space_result(space, tol).magnitude}, {"steps", steps}};
  return {0, dump(j), {}};
}

inline Outcome cmd_spd(const Request& r) {
  const Tolerances tol = tolerances(r);
  const MetricSpace space = input_space(r, tol);
  const Matrix z = similarity_matrix(space);
  Json j = to_json(spd_certificate_from_similarity(z, tol));
  if (classify_definiteness(z, tol) != Definiteness::Singular) {
    j["semialgebraic"] = spd_semialgebraic_check(z, tol);
  } else {
    j["semialgebraic"] = nullptr;
  }
  if (r.t_max) j["threshold"] = to_json(spd_scale_threshold(space, *r.t_max, tol));
  return {0, dump(j), {}};
}

inline Outcome cmd_submodular(const Request& r) {
  const Tolerances tol = tolerances(r);
  if (r.input.empty()) throw Error(ErrorCode::ParseError, "--input is required");
  const MetricSpace space = load_space(r.input, tol);
  SetFunctionReport rep;
  if (r.kind == "inverse") {
    const MetricSpace scaled = r.t ? scale(space, *r.t) : space;
    rep = check_inverse_submodularity(scaled, r.alpha, r.seed, 20000, tol);
    rep.t = r.t.value_or(1.0);
  } else if (r.kind == "shifted") {
    rep = check_shifted_submodularity(space, r.t.value_or(1.0), r.alpha, r.seed, 20000, tol);
  } else {
    throw Error(ErrorCode::ParseError, "--kind must be inverse or shifted");
  }
  Json j = to_json(rep, kBase);
  if (r.kind == "shifted" && r.t_max) {
    const auto onset = shifted_violation_onset(space, r.alpha,
                                               request_grid(r, 1e-1, *r.t_max), r.seed, tol);
    j["summary"]["onset_t"] = onset ? Json(*onset) : Json(nullptr);
  }
  if (!rep.hypothesis_holds) {
    return {2, dump(j), "hypothesis not satisfied: " + rep.warnings.front()};
  }
  return {0, dump(j), {}};
}

inline Outcome cmd_identities(const Request& r) {
  const Tolerances tol = tolerances(r);
  const ResidualReport rep = identity_residuals(input_space(r, tol), 1e-9, tol);
  return {0, dump(to_json(rep)), {}};
}

// ---------------------------------------------------------------------------
// Reproductions
// ---------------------------------------------------------------------------

/// Points 1, 2, 3 with d(1,2) = 2 and d(1,3) = d(2,3) = 100.
inline MetricSpace two_cluster_space() {
  Matrix d(3, 3);
  d << 0, 2, 100, 2, 0, 100, 100, 100, 0;
  return from_distance_matrix(d);
}

inline Outcome reproduce_fig1(const Request& r) {
  const auto grid = linear_grid(r.t_min.value_or(0.1), r.t_max.value_or(10.0),
                                static_cast<std::size_t>(r.grid.value_or(100)));
  Matrix d(2, 2);
  d << 0, 1, 1, 0;
  const MetricSpace pair = from_distance_matrix(d);
  const auto rows = two_point_approximation(1.0, grid);
  std::ostringstream os;
  os << "t,magnitude,q,approx,relative_error\n";
  for (const auto& row : rows) {
    const double mag = *magnitude(scale(pair, row.t));
    os << format_double(row.t) << ',' << format_double(mag) << ',' << format_double(row.exact)
       << ',' << format_double(row.approx) << ',' << format_double(row.relative_error) << '\n';
  }
  return {0, os.str(), {}};
}

inline Outcome reproduce_fig2(const Request& r) {
  const Tolerances tol = tolerances(r);
  const MetricSpace space = two_cluster_space();
  const auto grid = request_grid(r, 1e-2, 1e1);
  std::ostringstream os;
  os << "t,magnitude,p_1,p_2,p_3,change_1,change_2,change_3\n";
  for (double t : grid) {
    const SubspaceResult full = full_space_result(scale(space, t), tol);
    os << format_double(t) << ',' << format_double(full.magnitude);
    for (Index x = 0; x < 3; ++x) os << ',' << format_double(full.weighting(x) / full.magnitude);
    for (Index x = 0; x < 3; ++x) {
      const double w = full.weighting(x);
      os << ',' << format_double(2.0 * w * w / (full.kdag(x, x) * full.magnitude));
    }
    os << '\n';
  }
  return {0, os.str(), {}};
}

inline Outcome reproduce_example_2_3(const Request&) {
  Matrix z(3, 3);
  z << 1.0, 0.5, 0.1, 0.5, 1.0, 0.1, 0.1, 0.1, 1.0;
  Matrix d = -z.array().log().matrix();
  d.diagonal().setZero();
  const MetricSpace space = from_distance_matrix(d);
  Matrix printed_k(3, 3);
  printed_k << 1.9, -0.35, -1.55, -0.35, 1.9, -1.55, -1.55, -1.55, 3.1;
  printed_k /= 9.0;
  const EmbeddingData e = similarity_embedding(space);
  const Matrix gram = e.sqrt_k.transpose() * e.sqrt_k;
  Matrix sq(3, 3);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) sq(i, j) = (e.sqrt_k.col(i) - e.sqrt_k.col(j)).squaredNorm();
  }
  const SimilarityData data = analyze(space);
  Json j{{"Z", to_json(similarity_matrix(space))},
         {"K", to_json(e.k)},
         {"K_printed", to_json(printed_k)},
         {"K_max_deviation", (e.k - printed_k).cwiseAbs().maxCoeff()},
         {"embedding_gram", to_json(gram)},
         {"embedding_gram_max_deviation", (gram - printed_k).cwiseAbs().maxCoeff()},
         {"embedded_squared_distances", to_json(sq)},
         {"magnitude", to_json(data.magnitude)},
         {"magnitude_exact", 155.0 / 74.0},
         {"circumradius", e.radius()}};
  return {0, dump(j), {}};
}

inline Outcome reproduce_example_fb_2pt(const Request& r) {
  const double delta = r.delta;
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::ParseError, "--delta must lie in (0, 1)");
  }
  Matrix d(2, 2);
  d << 0, -std::log(delta), -std::log(delta), 0;
  const FiedlerBapatBlock fb = fiedler_bapat_block(from_distance_matrix(d));
  const double s = 1.0 / (1.0 - delta);
  Matrix symbolic(3, 3);
  symbolic << -(1.0 + delta), 1, 1, 1, s, -s, 1, -s, s;
  symbolic *= 0.5;
  Json j{{"delta", delta},
         {"bordered", to_json(fb.bordered)},
         {"inverse_block", to_json(fb.inverse_block)},
         {"symbolic_block", to_json(symbolic)},
         {"max_deviation", (fb.inverse_block - symbolic).cwiseAbs().maxCoeff()},
         {"product_residual", fb.product_residual()}};
  return {0, dump(j), {}};
}

inline Outcome cmd_reproduce(const Request& r) {
  if (r.target == "fig1") return reproduce_fig1(r);
  if (r.target == "fig2") return reproduce_fig2(r);
  if (r.target == "example-2-3") return reproduce_example_2_3(r);
  if (r.target == "example-fb-2pt") return reproduce_example_fb_2pt(r);
  throw Error(ErrorCode::UnknownTarget, "unknown target '" + r.target + "'");
}

/// Runs one command; library errors become exit code 1 (input) or 2
/// (mathematical nonexistence or failed hypothesis) with a JSON body.
inline Outcome run(const Request& r) {
  try {
    if (r.command == "compute") return cmd_compute(r);
    if (r.command == "embed") return cmd_embed(r);
    if (r.command == "sweep") return cmd_sweep(r);
    if (r.command == "subspace") return cmd_subspace(r);
    if (r.command == "delete-chain") return cmd_delete_chain(r);
    if (r.command == "spd") return cmd_spd(r);
    if (r.command == "submodular") return cmd_submodular(r);
    if (r.command == "identities") return cmd_identities(r);
    if (r.command == "reproduce") return cmd_reproduce(r);
    throw Error(ErrorCode::ParseError, "unknown command '" + r.command + "'");
  } catch (const Error& e) {
    const Json j{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    return {is_input_error(e.code()) ? 1 : 2, dump(j), e.what()};
  }
}

}  // namespace magkit::cli
