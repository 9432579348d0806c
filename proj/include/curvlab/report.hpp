#ifndef CURVLAB_REPORT_HPP
#define CURVLAB_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvlab/common.hpp"

namespace curvlab {

using json = nlohmann::ordered_json;

enum class Verdict { PASS, FAIL, INCONCLUSIVE };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::PASS: return "PASS";
    case Verdict::FAIL: return "FAIL";
    default: return "INCONCLUSIVE";
  }
}

struct Witness {
  std::string kind;
  Vec X, Y;
  double t = 0.0;
  double value = 0.0;
};

/// Outcome of a verification run: verdict plus the witnesses that produced it.
/// Reproducible from (seed, samples, tolerance).
struct AnalysisReport {
  Verdict verdict = Verdict::INCONCLUSIVE;
  std::vector<Witness> witnesses;
  int samples_used = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::string check;  // which check produced this report

  bool failed() const { return verdict == Verdict::FAIL; }
  bool passed() const { return verdict == Verdict::PASS; }
};

inline json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json to_json(const Witness& w) {
  json j;
  j["kind"] = w.kind;
  j["X"] = vec_to_json(w.X);
  j["Y"] = vec_to_json(w.Y);
  j["t"] = w.t;
  j["value"] = w.value;
  return j;
}

inline json to_json(const AnalysisReport& r) {
  json j;
  j["check"] = r.check;
  j["verdict"] = to_string(r.verdict);
  j["tolerance"] = r.tolerance;
  j["seed"] = r.seed;
  j["samples"] = r.samples_used;
  j["witnesses"] = json::array();
  for (const auto& w : r.witnesses) j["witnesses"].push_back(to_json(w));
  return j;
}

}  // namespace curvlab

#endif  // CURVLAB_REPORT_HPP
