#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "saarp/rng.hpp"

namespace saarp {

// Chain of Q microservices; microservice q has candidate_counts[q-1]
// candidates. Global candidate indices are dense 1..sum(C_q), ordered by
// microservice then candidate; 0 is reserved for "empty slot".
class ApplicationSpec {
 public:
  explicit ApplicationSpec(std::vector<int> candidate_counts)
      : counts_(std::move(candidate_counts)) {
    if (counts_.empty()) throw std::invalid_argument("Q must be >= 1");
    offsets_.reserve(counts_.size() + 1);
    offsets_.push_back(0);
    for (int c : counts_) {
      if (c < 1) throw std::invalid_argument("every C_q must be >= 1");
      offsets_.push_back(offsets_.back() + c);
    }
  }

  int q_count() const { return static_cast<int>(counts_.size()); }
  int candidates(int q) const { return counts_[check_q(q)]; }
  const std::vector<int>& candidate_counts() const { return counts_; }
  int total_candidates() const { return offsets_.back(); }

  // (q, c) -> global index in 1..total_candidates().
  int global_index(int q, int c) const {
    std::size_t qi = check_q(q);
    if (c < 1 || c > counts_[qi])
      throw std::out_of_range("candidate index out of range");
    return offsets_[qi] + c;
  }

  // global index -> (q, c)
  std::pair<int, int> locate(int g) const {
    if (g < 1 || g > total_candidates())
      throw std::out_of_range("global candidate index out of range");
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), g - 1);
    int q = static_cast<int>(it - offsets_.begin());
    return {q, g - offsets_[static_cast<std::size_t>(q - 1)]};
  }

 private:
  std::size_t check_q(int q) const {
    if (q < 1 || q > q_count())
      throw std::out_of_range("microservice index out of range");
    return static_cast<std::size_t>(q - 1);
  }

  std::vector<int> counts_;
  std::vector<int> offsets_;
};

// Per-device chosen candidates, one per microservice (1-based within each
// microservice).
using Scheme = std::vector<int>;

// One Monte Carlo realization: a scheme per device.
using CompositionBatch = std::vector<Scheme>;

// First-order composition model: a distribution over the first
// microservice's candidates and a row-stochastic transition matrix per
// subsequent step. A unit-vector row encodes a hard fore-and-aft
// correlation (the conditional probability is identically 1).
class CompositionModel {
 public:
  CompositionModel(ApplicationSpec spec, std::vector<double> initial,
                   std::vector<std::vector<std::vector<double>>> transitions)
      : spec_(std::move(spec)), initial_(std::move(initial)),
        transitions_(std::move(transitions)) {
    check_stochastic();
  }

  const ApplicationSpec& spec() const { return spec_; }
  const std::vector<double>& initial() const { return initial_; }

  // Row P(. | E(s^{c1}_{q-1})) for step q in 2..Q.
  const std::vector<double>& transition_row(int q, int c1) const {
    if (q < 2 || q > spec_.q_count())
      throw std::out_of_range("transition step out of range");
    const auto& mat = transitions_[static_cast<std::size_t>(q - 2)];
    if (c1 < 1 || c1 > static_cast<int>(mat.size()))
      throw std::out_of_range("candidate index out of range");
    return mat[static_cast<std::size_t>(c1 - 1)];
  }

  // Chain-rule probability of a full scheme.
  double scheme_probability(const Scheme& scheme) const {
    if (static_cast<int>(scheme.size()) != spec_.q_count())
      throw std::invalid_argument("scheme length must equal Q");
    check_candidate(1, scheme[0]);
    double p = initial_[static_cast<std::size_t>(scheme[0] - 1)];
    for (int q = 2; q <= spec_.q_count(); ++q) {
      check_candidate(q, scheme[static_cast<std::size_t>(q - 1)]);
      p *= transition_row(q, scheme[static_cast<std::size_t>(q - 2)])
               [static_cast<std::size_t>(scheme[static_cast<std::size_t>(q - 1)] - 1)];
    }
    return p;
  }

  Scheme sample_composition(RngStream& rng) const {
    Scheme s(static_cast<std::size_t>(spec_.q_count()));
    s[0] = sample_row(initial_, rng);
    for (int q = 2; q <= spec_.q_count(); ++q)
      s[static_cast<std::size_t>(q - 1)] =
          sample_row(transition_row(q, s[static_cast<std::size_t>(q - 2)]), rng);
    return s;
  }

  // r independent batches of n device schemes each; devices draw i.i.d.
  std::vector<CompositionBatch> sample_batch(int n, int r,
                                             RngStream& rng) const {
    if (n < 1 || r < 1) throw std::invalid_argument("n and r must be >= 1");
    std::vector<CompositionBatch> batches(static_cast<std::size_t>(r));
    for (auto& batch : batches) {
      batch.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) batch.push_back(sample_composition(rng));
    }
    return batches;
  }

  // Enumerate every scheme (small Q/C only).
  std::vector<Scheme> enumerate_schemes() const {
    std::vector<Scheme> all;
    Scheme cur(static_cast<std::size_t>(spec_.q_count()), 1);
    for (;;) {
      all.push_back(cur);
      int q = spec_.q_count();
      while (q >= 1) {
        auto& v = cur[static_cast<std::size_t>(q - 1)];
        if (v < spec_.candidates(q)) {
          ++v;
          break;
        }
        v = 1;
        --q;
      }
      if (q < 1) break;
    }
    return all;
  }

  void save(std::ostream& out) const {
    char buf[64];
    auto num = [&buf](double v) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return std::string(buf);
    };
    out << "Q " << spec_.q_count() << "\nC";
    for (int c : spec_.candidate_counts()) out << " " << c;
    out << "\ninitial";
    for (double p : initial_) out << " " << num(p);
    out << "\n";
    for (int q = 2; q <= spec_.q_count(); ++q) {
      for (int c1 = 1; c1 <= spec_.candidates(q - 1); ++c1) {
        out << "t " << q << " " << c1;
        for (double p : transition_row(q, c1)) out << " " << num(p);
        out << "\n";
      }
    }
  }

  void save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    save(out);
  }

  static CompositionModel load(std::istream& in) {
    std::string tag;
    int q_count = 0;
    if (!(in >> tag >> q_count) || tag != "Q")
      throw std::runtime_error("model file: expected Q header");
    if (!(in >> tag) || tag != "C")
      throw std::runtime_error("model file: expected C line");
    std::vector<int> counts(static_cast<std::size_t>(q_count));
    for (auto& c : counts)
      if (!(in >> c)) throw std::runtime_error("model file: bad C line");
    ApplicationSpec spec(counts);
    if (!(in >> tag) || tag != "initial")
      throw std::runtime_error("model file: expected initial line");
    std::vector<double> initial(static_cast<std::size_t>(counts[0]));
    for (auto& p : initial)
      if (!(in >> p)) throw std::runtime_error("model file: bad initial line");
    std::vector<std::vector<std::vector<double>>> transitions;
    for (int q = 2; q <= q_count; ++q)
      transitions.emplace_back(
          static_cast<std::size_t>(counts[static_cast<std::size_t>(q - 2)]),
          std::vector<double>(
              static_cast<std::size_t>(counts[static_cast<std::size_t>(q - 1)]),
              0.0));
    while (in >> tag) {
      if (tag != "t") throw std::runtime_error("model file: unexpected tag");
      int q = 0, c1 = 0;
      if (!(in >> q >> c1) || q < 2 || q > q_count)
        throw std::runtime_error("model file: bad transition header");
      auto& row = transitions[static_cast<std::size_t>(q - 2)].at(
          static_cast<std::size_t>(c1 - 1));
      for (auto& p : row)
        if (!(in >> p)) throw std::runtime_error("model file: bad transition row");
    }
    return CompositionModel(std::move(spec), std::move(initial),
                            std::move(transitions));
  }

  static CompositionModel load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load(in);
  }

 private:
  void check_candidate(int q, int c) const {
    if (c < 1 || c > spec_.candidates(q))
      throw std::out_of_range("candidate index out of range");
  }

  static int sample_row(const std::vector<double>& row, RngStream& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      acc += row[c];
      if (u < acc) return static_cast<int>(c) + 1;
    }
    return static_cast<int>(row.size());  // guard against fp round-off
  }

  void check_stochastic() const {
    auto check_row = [](const std::vector<double>& row) {
      double sum = 0.0;
      for (double p : row) {
        if (p < 0.0 || p > 1.0)
          throw std::invalid_argument("probabilities must lie in [0,1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("rows must sum to 1");
    };
    if (static_cast<int>(initial_.size()) != spec_.candidates(1))
      throw std::invalid_argument("initial distribution has wrong length");
    check_row(initial_);
    if (static_cast<int>(transitions_.size()) != spec_.q_count() - 1)
      throw std::invalid_argument("one transition matrix per step q=2..Q");
    for (int q = 2; q <= spec_.q_count(); ++q) {
      const auto& mat = transitions_[static_cast<std::size_t>(q - 2)];
      if (static_cast<int>(mat.size()) != spec_.candidates(q - 1))
        throw std::invalid_argument("transition matrix has wrong row count");
      for (const auto& row : mat) {
        if (static_cast<int>(row.size()) != spec_.candidates(q))
          throw std::invalid_argument("transition row has wrong length");
        check_row(row);
      }
    }
  }

  ApplicationSpec spec_;
  std::vector<double> initial_;
  // transitions_[q-2] is C_{q-1} x C_q row-stochastic
  std::vector<std::vector<std::vector<double>>> transitions_;
};

// Initial distribution and every transition row drawn uniformly on the
// probability simplex (symmetric Dirichlet(1)).
inline CompositionModel uniform_model(const ApplicationSpec& spec,
                                      std::uint64_t seed) {
  RngStream rng(seed, /*stream_id=*/0x6d6f64);
  auto simplex = [&rng](int k) {
    std::vector<double> v(static_cast<std::size_t>(k));
    double sum = 0.0;
    for (auto& x : v) {
      x = rng.exponential();
      sum += x;
    }
    for (auto& x : v) x /= sum;
    return v;
  };
  auto initial = simplex(spec.candidates(1));
  std::vector<std::vector<std::vector<double>>> transitions;
  for (int q = 2; q <= spec.q_count(); ++q) {
    std::vector<std::vector<double>> mat;
    for (int c1 = 1; c1 <= spec.candidates(q - 1); ++c1)
      mat.push_back(simplex(spec.candidates(q)));
    transitions.push_back(std::move(mat));
  }
  return CompositionModel(spec, std::move(initial), std::move(transitions));
}

// Candidate counts drawn uniformly from [c_min, c_max] per microservice.
inline ApplicationSpec random_spec(int q_count, int c_min, int c_max,
                                   std::uint64_t seed) {
  if (q_count < 1 || c_min < 1 || c_min > c_max)
    throw std::invalid_argument("bad application spec parameters");
  RngStream rng(seed, /*stream_id=*/0x737063);
  std::vector<int> counts(static_cast<std::size_t>(q_count));
  for (auto& c : counts) c = rng.uniform_int(c_min, c_max);
  return ApplicationSpec(std::move(counts));
}

}  // namespace saarp
