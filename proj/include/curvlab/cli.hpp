#ifndef CURVLAB_CLI_HPP
#define CURVLAB_CLI_HPP

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "curvlab/io.hpp"
#include "curvlab/suites.hpp"

// Command implementations behind the curvlab binary. Kept header-side so the
// test and acceptance suites can drive the exact code paths the CLI uses.
// Exit codes: 0 success / all checks pass, 1 verification failures,
// 2 configuration or input errors.

namespace curvlab::cli {

struct RunConfig {
  std::string command;      // verify | analyze | search | catalog | oracle
  std::string input_path;
  std::uint64_t seed = 0;
  int samples = 0;          // 0: per-suite defaults
  double tol = 0.0;         // 0: per-suite defaults
  std::string format = "json";
  std::string out_path;
  std::string algebra = "so4";
  int threads = 1;          // CURVLAB_THREADS caps suite parallelism
};

inline void validate(const RunConfig& c) {
  if (c.samples < 0) throw Error("samples must be >= 1");
  if (c.tol < 0.0) throw Error("tol must be > 0");
  if (c.format != "json" && c.format != "csv")
    throw Error("format must be json or csv");
}

inline json config_echo(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  if (!c.input_path.empty()) j["input"] = c.input_path;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["tol"] = c.tol;
  j["format"] = c.format;
  j["algebra"] = c.algebra;
  return j;
}

inline void emit(const RunConfig& c, const std::string& text) {
  if (c.out_path.empty())
    std::cout << text << "\n";
  else
    atomic_write(c.out_path, text + "\n");
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

inline std::string render_verify_report(const RunConfig& c,
                                        const std::vector<suites::SuiteResult>& results) {
  if (c.format == "csv") {
    std::string out = "suite,verdict,worst,note\n";
    for (const auto& r : results) {
      out += r.name;
      out += r.pass ? ",PASS," : ",FAIL,";
      out += suites::detail::fmt(r.worst) + ",\"" + r.note + "\"\n";
    }
    return out;
  }
  json j;
  j["schema"] = 1;
  j["command"] = "verify";
  j["config"] = config_echo(c);
  j["results"] = json::array();
  for (const auto& r : results) {
    json e;
    e["suite"] = r.name;
    e["verdict"] = r.pass ? "PASS" : "FAIL";
    e["worst"] = r.worst;
    e["note"] = r.note;
    j["results"].push_back(std::move(e));
  }
  return j.dump(2);
}

inline int cmd_verify(const RunConfig& c) {
  validate(c);
  suites::SuiteOptions o;
  o.seed = c.seed;
  o.samples = c.samples;
  o.tol = c.tol;
  const auto results = suites::run_all(o);
  bool all = true;
  for (const auto& r : results) {
    std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.note << "\n";
    all = all && r.pass;
  }
  emit(c, render_verify_report(c, results));
  return all ? 0 : 1;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

inline json analyze_to_json(const RunConfig& c, const LieAlgebra& l,
                            const MetricFile& f, std::vector<PairSample>* table) {
  json j;
  j["schema"] = 1;
  j["command"] = "analyze";
  j["config"] = config_echo(c);
  const int samples = c.samples > 0 ? c.samples : 2000;
  const int planes = c.samples > 0 ? c.samples : 5000;
  const double tol = c.tol > 0.0 ? c.tol : tol::verdict;
  json reports = json::array();

  Direction psi = f.psi ? *f.psi : direction_from_metric(*f.phi);
  if (f.phi) {
    if (l.dim() == 6) {
      const auto v = classify_metric(l, *f.phi);
      json cj;
      cj["kind"] = to_string(v.kind);
      cj["residual"] = v.residual;
      cj["has_singular_eigenvector"] = v.has_singular_eigenvector;
      if (v.constraint_checked) {
        cj["constraint_ok"] = v.constraint_ok;
        cj["constraint_margin"] = v.constraint_margin;
        if (!v.constraint_ok) {
          const auto w = torus_proof_plane_witness(l, *f.phi, v);
          cj["negative_plane_value"] = w.value;
          cj["negative_plane_Z1"] = vec_to_json(w.Z1);
          cj["negative_plane_Z2"] = vec_to_json(w.Z2);
        }
      }
      j["classification"] = std::move(cj);
    }
    reports.push_back(to_json(global_rigidity_check(l, *f.phi, samples, tol, c.seed)));
    const auto est = min_curvature_estimate(l, *f.phi, planes, 50, c.seed);
    json mj;
    mj["check"] = "min_curvature_estimate";
    mj["value"] = est.value;
    mj["Z1"] = vec_to_json(est.Z1);
    mj["Z2"] = vec_to_json(est.Z2);
    j["min_curvature"] = std::move(mj);
  } else if (l.dim() == 6) {
    const auto v = classify_direction(l, psi);
    json cj;
    cj["kind"] = to_string(v.kind);
    cj["residual"] = v.residual;
    cj["has_singular_eigenvector"] = v.has_singular_eigenvector;
    j["classification"] = std::move(cj);
  }
  reports.push_back(
      to_json(infinitesimal_nonnegativity_report(l, psi, samples, tol, c.seed, table)));
  reports.push_back(to_json(lemma_k_check(l, psi, samples, tol, c.seed)));
  j["reports"] = std::move(reports);
  return j;
}

inline int cmd_analyze(const RunConfig& c) {
  validate(c);
  if (c.input_path.empty()) throw Error("analyze requires --input FILE");
  const MetricFile f = load_metric_file(c.input_path);
  const LieAlgebra l = load_algebra(f.algebra.empty() ? c.algebra : f.algebra);
  if ((f.phi && f.phi->dim() != l.dim()) || (f.psi && f.psi->dim() != l.dim()))
    throw Error("matrix dimension does not match algebra " + l.name());
  std::vector<PairSample> table;
  const json j = analyze_to_json(c, l, f, &table);
  if (c.format == "csv") {
    std::string out = "delta,d_norm\n";
    for (const auto& s : table)
      out += suites::detail::fmt(s.delta) + "," + suites::detail::fmt(s.d_norm) + "\n";
    emit(c, out);
  } else {
    emit(c, j.dump(2));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

inline Direction search_draw(const LieAlgebra& l, Rng& rng, int kind, std::string& label) {
  switch (kind) {
    case 0: {
      label = "generic";
      return Direction(rng.symmetric(6));
    }
    case 1: {
      // random direction conditioned to own a singular eigenvector
      label = "singular";
      Mat s = rng.symmetric(6);
      s.row(0).setZero();
      s.col(0).setZero();
      s(0, 0) = rng.normal();
      Mat r = Mat::Zero(6, 6);
      // block rotation from QR of random factor matrices
      for (int half = 0; half < 2; ++half) {
        Mat q = Eigen::HouseholderQR<Mat>(rng.symmetric(3)).householderQ();
        if (q.determinant() < 0.0) q.col(0) *= -1.0;
        r.block(3 * half, 3 * half, 3, 3) = q;
      }
      return Direction(Mat(r * s * r.transpose()));
    }
    default: {
      const int family = static_cast<int>(rng.uniform() * 3.0);
      if (family == 0) {
        label = "catalog_product";
        Mat m = Mat::Zero(6, 6);
        m.topLeftCorner(3, 3) = rng.symmetric(3);
        m.bottomRightCorner(3, 3) = rng.symmetric(3);
        return Direction(m);
      }
      if (family == 1) {
        label = "catalog_torus";
        TorusParams p;
        p.c = rng.normal();
        p.d = rng.normal();
        p.a1 = rng.normal();
        p.a2 = rng.normal();
        p.a3 = rng.normal();
        return torus_direction(p);
      }
      label = "catalog_gg";
      const double base = rng.uniform(0.4, 2.0);
      return s3_direction(rng.normal(), rng.normal(), {base, base, base});
    }
  }
}

inline int cmd_search(const RunConfig& c) {
  validate(c);
  const LieAlgebra l = load_algebra(c.algebra);
  require_so4(l);
  const int draws = c.samples > 0 ? c.samples : 500;
  const int pair_budget = 400;
  const double tol = c.tol > 0.0 ? c.tol : tol::verdict;
  json findings = json::array();
  int survivors = 0;
  for (int i = 0; i < draws; ++i) {
    Rng rng = Rng::stream(c.seed, i);
    std::string label;
    const Direction raw = search_draw(l, rng, i % 3, label);
    const Direction psi = canonical_direction(raw);
    const auto rep =
        infinitesimal_nonnegativity_report(l, psi, pair_budget, tol, c.seed + i);
    if (!rep.passed()) continue;
    ++survivors;
    const auto v = classify_direction(l, psi);
    json e;
    e["draw"] = i;
    e["draw_kind"] = label;
    e["classified"] = to_string(v.kind);
    e["residual"] = v.residual;
    if (v.kind == MetricKind::NO_SINGULAR_EIGENVECTOR)
      e["gg_fit_residual"] = fit_gg_pattern(psi).residual;
    findings.push_back(std::move(e));
  }
  json j;
  j["schema"] = 1;
  j["command"] = "search";
  j["config"] = config_echo(c);
  j["draws"] = draws;
  j["survivors"] = survivors;
  j["findings"] = std::move(findings);
  emit(c, j.dump(2));
  return 0;
}

// ---------------------------------------------------------------------------
// catalog / oracle
// ---------------------------------------------------------------------------

inline int cmd_catalog(const RunConfig& c) {
  validate(c);
  namespace fs = std::filesystem;
  const fs::path dir = c.out_path.empty() ? fs::path("catalog") : fs::path(c.out_path);
  int written = 0;
  auto write = [&](const std::string& family, int idx, const MetricForm& phi,
                   json params) {
    json j;
    j["algebra"] = "so4";
    j["family"] = family;
    j["params"] = std::move(params);
    j["phi"] = mat_to_json(phi.phi());
    atomic_write(dir / (family + "_" + std::to_string(idx) + ".json"), j.dump(2));
    ++written;
  };

  const std::vector<std::array<double, 3>> so3_triples = {
      {1.0, 1.0, 1.0}, {1.0, 1.05, 1.1}, {0.9, 1.0, 1.1}, {0.8, 0.8, 1.0}};
  int idx = 0;
  for (size_t i = 0; i < so3_triples.size(); ++i)
    for (size_t j2 = i; j2 < so3_triples.size(); ++j2) {
      Mat m = Mat::Zero(6, 6);
      Vec d1(3), d2(3);
      for (int k = 0; k < 3; ++k) {
        d1(k) = so3_triples[i][k];
        d2(k) = so3_triples[j2][k];
      }
      m.topLeftCorner(3, 3) = d1.asDiagonal();
      m.bottomRightCorner(3, 3) = d2.asDiagonal();
      json params;
      params["factor1"] = so3_triples[i];
      params["factor2"] = so3_triples[j2];
      write("product", idx++, MetricForm(m), std::move(params));
    }

  idx = 0;
  for (const auto& [cc, dd] : std::vector<std::pair<double, double>>{{1.0, 1.0},
                                                                     {1.5, 0.8}})
    for (double s : {0.5, 0.75, 1.0}) {
      TorusParams p;
      p.c = cc;
      p.d = dd;
      p.a1 = s * 4.0 * cc / 3.0;
      p.a2 = s * 4.0 * dd / 3.0;
      p.a3 = 0.0;
      json params;
      params["c"] = cc;
      params["d"] = dd;
      params["block"] = mat_to_json(p.block());
      write("torus", idx++, torus_metric(p), std::move(params));
    }
  {
    TorusParams p;
    p.c = 1.2;
    p.d = 0.9;
    p.a1 = 1.0;
    p.a2 = 0.8;
    p.a3 = 0.15;
    json params;
    params["c"] = p.c;
    params["d"] = p.d;
    params["block"] = mat_to_json(p.block());
    write("torus", idx++, torus_metric(p), std::move(params));
  }

  idx = 0;
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{1.0, 1.0},
                                                                   {1.3, 0.7}})
    for (const auto& lam : std::vector<std::array<double, 3>>{{1.0, 1.0, 1.0},
                                                              {0.9, 1.0, 1.1}}) {
      S3Params p;
      p.a = a;
      p.b = b;
      p.lambda = lam;
      json params;
      params["a"] = a;
      params["b"] = b;
      params["lambda"] = lam;
      write("s3", idx++, s3_metric(p), std::move(params));
    }

  std::cout << "wrote " << written << " catalog files to " << dir.string() << "\n";
  return 0;
}

inline int cmd_oracle(const RunConfig& c) {
  validate(c);
  const int draws = c.samples > 0 ? c.samples : 1000;
  const double tol = c.tol > 0.0 ? c.tol : 1e-9;
  const auto r = suites::oracle_equivalence(draws, tol, c.seed);
  if (c.format == "csv") {
    emit(c, "suite,verdict,worst\noracle_equivalence," +
                std::string(r.pass ? "PASS," : "FAIL,") + suites::detail::fmt(r.worst));
  } else {
    json j;
    j["schema"] = 1;
    j["command"] = "oracle";
    j["config"] = config_echo(c);
    j["max_relative_deviation"] = r.worst;
    j["verdict"] = r.pass ? "PASS" : "FAIL";
    emit(c, j.dump(2));
  }
  std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.note << "\n";
  return r.pass ? 0 : 1;
}

inline int run(const RunConfig& c) {
  if (c.command == "verify") return cmd_verify(c);
  if (c.command == "analyze") return cmd_analyze(c);
  if (c.command == "search") return cmd_search(c);
  if (c.command == "catalog") return cmd_catalog(c);
  if (c.command == "oracle") return cmd_oracle(c);
  throw Error("unknown command " + c.command);
}

}  // namespace curvlab::cli

#endif  // CURVLAB_CLI_HPP
