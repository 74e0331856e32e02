#include "lrsm/synth.hpp"

#include "lrsm/error.hpp"
#include "lrsm/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace lrsm::synth {

using nlohmann::json;

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "none") return NoiseKind::None;
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "empirical_prob") return NoiseKind::EmpiricalProb;
  throw ArgumentError("unknown noise kind '" + name + "'");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::EmpiricalProb: return "empirical_prob";
  }
  return "none";
}

void InstanceSpec::validate() const {
  if (p < 1 || r < 1 || r > p) throw ArgumentError("instance spec: need 1 <= r <= p");
  if (s < 0 || s > p * p) throw ArgumentError("instance spec: need 0 <= s <= p^2");
  if (!(t >= 0.0)) throw ArgumentError("instance spec: t must be nonnegative");
  if (!(sigma_noise >= 0.0)) throw ArgumentError("instance spec: sigma_noise must be nonnegative");
  if (n_noise < 1) throw ArgumentError("instance spec: n_noise must be positive");
}

InstanceSpec parse_instance_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("instance spec: invalid JSON: ") + e.what());
  }
  static const std::set<std::string> known = {"p", "r", "s", "t", "sigma_noise", "noise_kind", "n_noise", "seed"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw ArgumentError("instance spec: unknown field '" + it.key() + "'");
  InstanceSpec spec;
  try {
    if (doc.contains("p")) spec.p = doc["p"].get<Index>();
    spec.s = spec.p;
    if (doc.contains("r")) spec.r = doc["r"].get<Index>();
    if (doc.contains("s")) spec.s = doc["s"].get<Index>();
    if (doc.contains("t")) spec.t = doc["t"].get<double>();
    if (doc.contains("sigma_noise")) spec.sigma_noise = doc["sigma_noise"].get<double>();
    if (doc.contains("noise_kind")) spec.noise_kind = parse_noise_kind(doc["noise_kind"].get<std::string>());
    if (doc.contains("n_noise")) spec.n_noise = doc["n_noise"].get<Index>();
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("instance spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

namespace {

struct Factors {
  DenseMatrix ad;  // A D
  DenseMatrix b;
  DenseMatrix adb;
  SparseEntrySet sparse;
};

// Thin SVD of (left)(right) from QR factors of each side, so only an r x r
// core is decomposed.
FactoredLowRank product_svd(const DenseMatrix& left, const DenseMatrix& right) {
  const Index r = left.cols();
  Eigen::HouseholderQR<DenseMatrix> ql(left), qr(right.transpose());
  const DenseMatrix qa = ql.householderQ() * DenseMatrix::Identity(left.rows(), r);
  const DenseMatrix qb = qr.householderQ() * DenseMatrix::Identity(right.cols(), r);
  const DenseMatrix ra = ql.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const DenseMatrix rb = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const FactoredLowRank core = thin_svd(ra * rb.transpose(), r);
  return FactoredLowRank{qa * core.U, core.sigma, qb * core.V};
}

// A (p x r), D (r), B (r x p) with Uniform(0,1) entries, then s support
// coordinates without replacement and their Uniform(0,1) values.
Factors draw_factors(Index p, Index r, Index s, Rng& rng) {
  DenseMatrix a(p, r);
  for (Index i = 0; i < p; ++i)
    for (Index k = 0; k < r; ++k) a(i, k) = rng.uniform();
  Vector d(r);
  for (Index k = 0; k < r; ++k) d(k) = rng.uniform();
  DenseMatrix b(r, p);
  for (Index k = 0; k < r; ++k)
    for (Index j = 0; j < p; ++j) b(k, j) = rng.uniform();

  // Floyd's sampling of s distinct linear coordinates out of p^2.
  const std::uint64_t total = static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(p);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(s) * 2);
  for (std::uint64_t j = total - static_cast<std::uint64_t>(s); j < total; ++j) {
    const std::uint64_t t = rng.uniform_index(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> coords(chosen.begin(), chosen.end());
  std::sort(coords.begin(), coords.end());
  std::vector<SparseEntry> entries;
  entries.reserve(coords.size());
  for (auto c : coords)
    entries.push_back({static_cast<Index>(c / static_cast<std::uint64_t>(p)),
                       static_cast<Index>(c % static_cast<std::uint64_t>(p)), rng.uniform()});
  DenseMatrix ad = a * d.asDiagonal();
  DenseMatrix adb = ad * b;
  return Factors{std::move(ad), std::move(b), std::move(adb), SparseEntrySet(p, p, std::move(entries))};
}

}  // namespace

LowRankSparse gen_lowrank_sparse(const InstanceSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Factors f = draw_factors(spec.p, spec.r, spec.s, rng);
  LowRankSparse out;
  out.low_rank = product_svd(f.ad, f.b);
  out.low_rank_dense = f.adb;
  out.m = f.adb;
  f.sparse.add_to(out.m);
  out.sparse = std::move(f.sparse);
  return out;
}

TransitionInstance gen_transition(const InstanceSpec& spec) {
  spec.validate();
  const Index p = spec.p;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(stable_hash({spec.seed, static_cast<std::uint64_t>(attempt), 0x7472616eULL}));
    Factors f = draw_factors(p, spec.r, spec.s, rng);
    DenseMatrix lowrank = spec.t * f.adb;
    DenseMatrix p0 = lowrank;
    f.sparse.add_to(p0);
    p0 = p0.cwiseAbs();
    const Vector rowsum = p0.rowwise().sum();
    if ((rowsum.array() <= 0.0).any()) continue;
    DenseMatrix pm = rowsum.cwiseInverse().asDiagonal() * p0;
    for (Index i = 0; i < p; ++i) pm.row(i) /= pm.row(i).sum();
    if (!markov::ergodicity(pm).ergodic()) continue;

    markov::TransitionMatrix tm(pm);
    Vector pi = markov::stationary_distribution(tm);
    DenseMatrix fm = pi.asDiagonal() * pm;
    fm /= fm.sum();

    // Exact split: F = diag(w) (t A D B) + diag(w) S with w = pi / rowsum(P0).
    const Vector w = pi.cwiseQuotient(rowsum);
    FactoredLowRank l_star = spec.t > 0.0 ? product_svd(spec.t * (w.asDiagonal() * f.ad), f.b)
                                          : FactoredLowRank::zero(p, p, spec.r);
    std::vector<SparseEntry> scaled;
    for (const auto& e : f.sparse.entries()) {
      const double v = w(e.row) * e.value;
      if (v != 0.0) scaled.push_back({e.row, e.col, v});
    }
    return TransitionInstance{std::move(tm),  markov::FrequencyMatrix(std::move(fm)),
                              std::move(pi),  std::move(l_star),
                              SparseEntrySet(p, p, std::move(scaled)), attempt + 1};
  }
  throw NumericError("gen_transition: no ergodic kernel after 100 attempts", 100);
}

DenseMatrix noise_gaussian(Index p, Index q, double sigma, std::uint64_t seed) {
  if (p < 1 || q < 1) throw ArgumentError("noise_gaussian: bad shape");
  DenseMatrix w(p, q);
  if (sigma == 0.0) return DenseMatrix::Zero(p, q);
  Rng rng(seed);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < q; ++j) w(i, j) = sigma * rng.normal();
  return w;
}

DenseMatrix noise_empirical_prob(Index p, Index n, std::uint64_t seed) {
  if (p < 1) throw ArgumentError("noise_empirical_prob: p must be positive");
  if (n < 1) throw ArgumentError("noise_empirical_prob: n must be positive");
  Rng rng(seed);
  DenseMatrix w(p, p);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(p));
  const double inv_n = 1.0 / static_cast<double>(n);
  const double inv_p = 1.0 / static_cast<double>(p);
  for (Index i = 0; i < p; ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    for (Index k = 0; k < n; ++k) ++counts[rng.uniform_index(static_cast<std::uint64_t>(p))];
    for (Index j = 0; j < p; ++j) w(i, j) = static_cast<double>(counts[static_cast<std::size_t>(j)]) * inv_n - inv_p;
  }
  return w;
}

DenseMatrix noise_for(const InstanceSpec& spec, std::uint64_t seed) {
  switch (spec.noise_kind) {
    case NoiseKind::None: return DenseMatrix::Zero(spec.p, spec.p);
    case NoiseKind::Gaussian: return noise_gaussian(spec.p, spec.p, spec.sigma_noise, seed);
    case NoiseKind::EmpiricalProb: return noise_empirical_prob(spec.p, spec.n_noise, seed);
  }
  return DenseMatrix::Zero(spec.p, spec.p);
}

}  // namespace lrsm::synth
