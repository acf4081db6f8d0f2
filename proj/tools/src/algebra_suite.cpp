#include <algorithm>
#include <set>
#include <string>

#include "canlab/app.hpp"
#include "canlab/local_op.hpp"
#include "canlab/rng.hpp"

namespace canlab::app {

namespace {

// Random nonzero type-symmetric operator with |i - j| <= 5 and at most 12
// entries: every row holds an even number of distinct columns.
LocalOp random_ts_op(Rng& rng, Parity parity) {
  constexpr int kRange = 5, kMaxEntries = 12;
  const auto p = static_cast<std::int64_t>(parity);
  std::vector<OpEntry> entries;
  std::set<std::int64_t> used_rows;
  const int rows = 1 + static_cast<int>(rng.below(kMaxEntries / 2));
  for (int r = 0; r < rows && static_cast<int>(entries.size()) + 2 <= kMaxEntries; ++r) {
    const std::int64_t row = static_cast<std::int64_t>(rng.below(11)) - 5;
    if (!used_rows.insert(row).second) continue;
    const int room = std::min(kMaxEntries - static_cast<int>(entries.size()), 2 * kRange + 1);
    const int pairs = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, room / 2))));
    std::set<std::int64_t> cols;
    while (static_cast<int>(cols.size()) < 2 * pairs)
      cols.insert(row + static_cast<std::int64_t>(rng.below(2 * kRange + 1)) - kRange);
    for (auto c : cols) entries.push_back({DoubledIndex(2 * row + p), DoubledIndex(2 * c + p)});
  }
  return LocalOp(parity, parity, std::move(entries));
}

Config random_config(Rng& rng, Parity parity) {
  const auto first = static_cast<std::int64_t>(rng.below(41)) - 20;
  std::string bits(1 + rng.below(40), '0');
  for (auto& b : bits) b = rng.bernoulli(0.5) ? '1' : '0';
  const bool left = rng.bernoulli(0.5), right = rng.bernoulli(0.5);
  return Config::from_bits(LatticeTag::line(parity), first, bits, left, right);
}

LocalOp corrupt(const LocalOp& b) {
  auto entries = b.entries();
  const OpEntry extra{entries.front().row, entries.front().col.shifted(1)};
  const auto it = std::find(entries.begin(), entries.end(), extra);
  if (it == entries.end())
    entries.push_back(extra);
  else
    entries.erase(it);
  return LocalOp(b.row_parity(), b.col_parity(), std::move(entries));
}

}  // namespace

AlgebraReport verify_algebra(std::size_t operators, std::size_t configs, std::uint64_t seed, bool corrupt_psi) {
  AlgebraReport report;
  report.operators = operators;
  report.configs_per_operator = configs;
  auto record = [&](bool ok, std::size_t k, const std::string& what) {
    ++report.checks;
    if (ok) return;
    ++report.failures;
    if (report.first_failures.size() < 10) report.first_failures.push_back("operator " + std::to_string(k) + ": " + what);
  };
  for (std::size_t k = 0; k < operators; ++k) {
    Rng rng(seed, k);
    const Parity parity = rng.bernoulli(0.5) ? Parity::HalfInteger : Parity::Integer;
    const LocalOp a = random_ts_op(rng, parity);
    LocalOp b = psi(a);
    if (corrupt_psi) b = corrupt(b);
    try {
      record(is_parity_preserving(b), k, "psi(A) is not parity preserving");
      record(psi_inv(b) == a, k, "psi_inv(psi(A)) != A");
      record(adjoint(b) == psi_inv(adjoint(a)), k, "psi(A)^dagger != psi_inv(A^dagger)");
    } catch (const std::exception& e) {
      record(false, k, std::string("exception: ") + e.what());
    }
    for (std::size_t j = 0; j < configs; ++j) {
      const Config x = random_config(rng, parity);
      record(grad(apply(a, x)) == apply(b, grad(x)), k, "grad(Ax) != psi(A) grad(x) for " + x.to_string());
    }
  }
  return report;
}

}  // namespace canlab::app
