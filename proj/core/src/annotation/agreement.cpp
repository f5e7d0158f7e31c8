#include "ombudsman/annotation/agreement.hpp"

#include <map>
#include <set>

#include "ombudsman/error.hpp"

using nlohmann::json;

namespace ombudsman::annotation {

std::optional<double> krippendorff_alpha_nominal(const std::vector<std::vector<int>>& units) {
  // Coincidence matrix o[c][k]: each ordered pair of values within a unit
  // contributes 1 / (m_u - 1).
  std::map<int, std::map<int, double>> o;
  std::size_t pairable = 0;
  for (const auto& u : units) {
    const auto m = u.size();
    if (m < 2) continue;
    ++pairable;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j) o[u[i]][u[j]] += w;
      }
    }
  }
  if (pairable < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "alpha needs at least 2 items with 2 or more ratings, got " + std::to_string(pairable));
  }
  std::map<int, double> n_c;
  double n = 0;
  double observed = 0;  // sum of off-diagonal coincidences
  for (const auto& [c, row] : o) {
    for (const auto& [k, v] : row) {
      n_c[c] += v;
      n += v;
      if (c != k) observed += v;
    }
  }
  double expected = 0;  // sum over c != k of n_c * n_k
  for (const auto& [c, nc] : n_c) {
    for (const auto& [k, nk] : n_c) {
      if (c != k) expected += nc * nk;
    }
  }
  if (expected == 0.0) return std::nullopt;
  return 1.0 - (n - 1.0) * observed / expected;
}

std::optional<double> cohen_kappa(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "kappa inputs differ in length");
  if (a.empty()) throw Error(ErrorCode::kInvalidArgument, "kappa needs at least one jointly rated item");
  const double n = static_cast<double>(a.size());
  std::map<int, double> pa, pb;
  double agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  double p_e = 0;
  for (const auto& [c, ca] : pa) {
    if (auto it = pb.find(c); it != pb.end()) p_e += (ca / n) * (it->second / n);
  }
  if (p_e >= 1.0) return std::nullopt;
  return (agree / n - p_e) / (1.0 - p_e);
}

namespace {

int code(Label l) { return l == Label::kPositive ? 1 : 0; }

std::map<std::string, int> by_post(const std::vector<AnnotationRecord>& rs) {
  std::map<std::string, int> out;
  for (const auto& r : rs) out.emplace(r.post_id, code(r.label));
  return out;
}

template <typename F>
std::optional<double> guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    return std::nullopt;
  }
}

}  // namespace

std::optional<double> cohen_kappa(const std::vector<AnnotationRecord>& a, const std::vector<AnnotationRecord>& b) {
  auto ma = by_post(a);
  auto mb = by_post(b);
  std::vector<int> va, vb;
  for (const auto& [post, la] : ma) {
    if (auto it = mb.find(post); it != mb.end()) {
      va.push_back(la);
      vb.push_back(it->second);
    }
  }
  return cohen_kappa(va, vb);
}

void to_json(json& j, const AgreementReport& r) {
  json kappa = json::object();
  for (const auto& [k, v] : r.pairwise_kappa) kappa[k] = v ? json(*v) : json();
  j = json{{"krippendorff_alpha", r.krippendorff_alpha ? json(*r.krippendorff_alpha) : json()},
           {"pairwise_kappa", kappa},
           {"n_items", r.n_items},
           {"n_raters", r.n_raters}};
}

AgreementReport compute_agreement(const std::vector<AnnotationRecord>& records) {
  AgreementReport report;
  std::map<std::string, std::vector<int>> units;
  std::map<Affiliation, std::vector<AnnotationRecord>> partisan;
  std::map<std::string, std::vector<AnnotationRecord>> experts;
  std::set<std::string> raters;
  for (const auto& r : records) {
    if (is_partisan(r.affiliation)) {
      units[r.post_id].push_back(code(r.label));
      partisan[r.affiliation].push_back(r);
      raters.insert(r.annotator_id);
    } else if (r.affiliation == Affiliation::kExpert) {
      experts[r.annotator_id].push_back(r);
    }
  }
  std::vector<std::vector<int>> table;
  for (auto& [_, u] : units) {
    if (u.size() >= 2) ++report.n_items;
    table.push_back(std::move(u));
  }
  report.n_raters = raters.size();
  report.krippendorff_alpha = guarded([&] { return krippendorff_alpha_nominal(table); });

  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      auto a = kPartisan[i];
      auto b = kPartisan[j];
      std::string ka(to_string(a)), kb(to_string(b));
      std::string key = ka < kb ? ka + "|" + kb : kb + "|" + ka;
      report.pairwise_kappa[key] = guarded([&] { return cohen_kappa(partisan[a], partisan[b]); });
    }
  }
  for (auto it = experts.begin(); it != experts.end(); ++it) {
    for (auto jt = std::next(it); jt != experts.end(); ++jt) {
      std::string key = "expert:" + it->first + "|expert:" + jt->first;
      report.pairwise_kappa[key] = guarded([&] { return cohen_kappa(it->second, jt->second); });
    }
  }
  return report;
}

}  // namespace ombudsman::annotation
