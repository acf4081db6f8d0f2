#include "canlab/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "canlab/error.hpp"

namespace canlab::mc {

namespace {

// Interface positions of the current state, in one of two encodings: the
// particles of Y itself, or the edges (p, p+1) where X changes value.
struct InterfaceReader {
  bool via_x = false;

  std::optional<std::pair<std::int64_t, std::int64_t>> extent(const BitLine& b) const {
    if (!via_x) {
      const auto lo = b.first_set();
      if (!lo) return std::nullopt;
      return std::make_pair(*lo, *b.last_set());
    }
    const auto fn = b.first_nonconstant();
    const auto ln = b.last_nonconstant();
    if (b.left() == b.right() && !fn) return std::nullopt;
    const std::int64_t lo = fn.value_or(b.end()) - 1;
    const std::int64_t hi = ln.value_or(b.first() - 1);
    return std::make_pair(std::min(lo, hi), std::max(lo, hi));
  }

  bool at(const BitLine& b, std::int64_t p) const { return via_x ? b.get(p) != b.get(p + 1) : b.get(p); }

  std::vector<std::int32_t> offsets(const BitLine& b) const {
    std::vector<std::int32_t> out;
    const auto ext = extent(b);
    if (!ext) return out;
    for (std::int64_t p = ext->first; p <= ext->second; ++p)
      if (at(b, p)) out.push_back(static_cast<std::int32_t>(p - ext->first));
    return out;
  }

  std::int64_t count(const Simulator& sim) const {
    if (!via_x) return sim.ones();
    const auto ext = extent(sim.bits());
    if (!ext) return 0;
    std::int64_t n = 0;
    for (std::int64_t p = ext->first; p <= ext->second; ++p) n += at(sim.bits(), p);
    return n;
  }
};

HatYRun run_hatY(Simulator& sim, const InterfaceReader& reader, const HatYOptions& opt) {
  if (!(opt.thin > 0.0)) throw ValidationError("thin must be positive");
  if (opt.burn_in < 0.0 || opt.horizon < 0.0) throw ValidationError("burn-in and horizon must be non-negative");
  if (opt.cap < 1) throw ValidationError("cap must be positive");
  HatYRun run;
  const auto count = static_cast<std::int64_t>(std::floor(opt.horizon / opt.thin + 1e-9));
  for (std::int64_t j = 0; j < count; ++j) {
    const double t = opt.burn_in + static_cast<double>(j) * opt.thin;
    while (sim.step(t)) {
      const auto ext = reader.extent(sim.bits());
      if (!ext) throw std::logic_error("interface vanished under parity-preserving dynamics");
      const std::int64_t span = ext->second - ext->first;
      run.max_span = std::max(run.max_span, span);
      if (span > opt.cap) {
        run.cap_abort = true;
        run.abort_time = sim.time();
        run.events = sim.events();
        return run;
      }
    }
    run.samples.push_back({reader.offsets(sim.bits()), opt.thin});
  }
  run.events = sim.events();
  return run;
}

std::vector<std::int64_t> positions_of(const BitLine& b) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = b.first(); p < b.end(); ++p)
    if (b.get(p)) out.push_back(p);
  return out;
}

std::vector<std::int64_t> positions_of(const Config& x) {
  if (!x.is_finite()) throw BoundaryClassError("the harmonic function needs a finite configuration");
  return positions_of(x.bits());
}

// Bits of x at positions[0] + j, j = 0..len-1.
std::vector<std::uint64_t> pack(std::span<const std::int64_t> positions, std::size_t len) {
  std::vector<std::uint64_t> w((len + 63) / 64, 0);
  for (auto p : positions) {
    const auto j = static_cast<std::size_t>(p - positions.front());
    w[j >> 6] ^= std::uint64_t{1} << (j & 63);
  }
  return w;
}

std::int64_t overlap_with_packed(std::span<const std::int32_t> offsets, const std::vector<std::uint64_t>& x,
                                 std::size_t len, std::vector<std::uint64_t>& acc) {
  // g(t) = xor over o of x(t - (maxo - o)): the overlap parity of the shift
  // placing the left-most offset at x position t - maxo.
  const auto maxo = static_cast<std::size_t>(offsets.back());
  acc.assign((len + maxo + 63) / 64, 0);
  for (auto o : offsets) {
    const std::size_t shift = maxo - static_cast<std::size_t>(o);
    const std::size_t ws = shift >> 6, bs = shift & 63;
    for (std::size_t i = 0; i < x.size(); ++i) {
      acc[i + ws] ^= x[i] << bs;
      if (bs != 0 && i + ws + 1 < acc.size()) acc[i + ws + 1] ^= x[i] >> (64 - bs);
    }
  }
  std::int64_t n = 0;
  for (auto w : acc) n += std::popcount(w);
  return n;
}

void validate_sample(const HatYSample& s) {
  if (s.offsets.empty() || s.offsets.front() != 0 || s.offsets.size() % 2 == 0)
    throw ValidationError("interface samples need an odd number of offsets starting at 0");
  if (!(s.weight >= 0.0)) throw ValidationError("sample weights must be non-negative");
}

}  // namespace

HatYRun simulate_hatY(const RateTable& interface_rt, const HatYOptions& opt) {
  if (!interface_rt.pp_table()) throw ValidationError("the interface table must be parity preserving");
  const DoubledIndex origin = DoubledIndex::at(interface_rt.lattice(), 0);
  const Config y0 = Config::from_sites(LatticeTag::line(interface_rt.lattice()), std::span(&origin, 1));
  Simulator sim(make_dynamics(interface_rt), y0, Rng(opt.seed, opt.stream));
  return run_hatY(sim, InterfaceReader{false}, opt);
}

HatYRun simulate_hatY_via_x(std::shared_ptr<const Dynamics> x_dynamics, const HatYOptions& opt) {
  const Config x0 = Config::heaviside(x_dynamics->lattice(), DoubledIndex::at(x_dynamics->lattice(), 1), true);
  Simulator sim(std::move(x_dynamics), x0, Rng(opt.seed, opt.stream));
  return run_hatY(sim, InterfaceReader{true}, opt);
}

TightnessReport interface_tightness_report(std::span<const HatYSample> samples, int n_max) {
  if (samples.empty()) throw ValidationError("no interface samples");
  if (n_max < 0) throw ValidationError("n_max must be non-negative");
  TightnessReport rep;
  rep.samples = samples.size();
  std::vector<double> w(samples.size()), delta(samples.size()), size(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    validate_sample(samples[i]);
    w[i] = samples[i].weight;
    rep.total_weight += w[i];
    delta[i] = samples[i].is_delta0() ? 1.0 : 0.0;
    size[i] = static_cast<double>(samples[i].offsets.size());
  }
  rep.p_delta0 = batch_means(delta, w);
  rep.mean_size = batch_means(size, w);
  std::vector<double> ind(samples.size());
  std::vector<double> xs, ys;
  for (int n = 0; n <= n_max; ++n) {
    for (std::size_t i = 0; i < samples.size(); ++i)
      ind[i] = samples[i].offsets.size() == static_cast<std::size_t>(2 * n + 1) ? 1.0 : 0.0;
    rep.tail.push_back(batch_means(ind, w));
    if (rep.tail.back().mean > 0.0) {
      xs.push_back(n);
      ys.push_back(std::log(rep.tail.back().mean));
    }
  }
  rep.tail_slope = ls_slope(xs, ys);
  return rep;
}

std::int64_t shifted_overlap_count(std::span<const std::int32_t> offsets, std::span<const std::int64_t> positions) {
  if (offsets.empty() || positions.empty()) return 0;
  std::vector<std::int64_t> pos(positions.begin(), positions.end());
  std::sort(pos.begin(), pos.end());
  std::vector<std::int64_t> folded;  // repeated positions cancel
  for (std::size_t i = 0; i < pos.size();) {
    std::size_t j = i;
    while (j < pos.size() && pos[j] == pos[i]) ++j;
    if ((j - i) % 2 == 1) folded.push_back(pos[i]);
    i = j;
  }
  if (folded.empty()) return 0;
  const auto len = static_cast<std::size_t>(folded.back() - folded.front() + 1);
  const auto x = pack(folded, len);
  std::vector<std::uint64_t> acc;
  return overlap_with_packed(offsets, x, len, acc);
}

HarmonicFunction HarmonicFunction::from_samples(std::span<const HatYSample> samples) {
  if (samples.empty()) throw ValidationError("no interface samples");
  std::map<std::vector<std::int32_t>, double> merged;
  double total = 0.0;
  for (const auto& s : samples) {
    validate_sample(s);
    merged[s.offsets] += s.weight;
    total += s.weight;
  }
  if (!(total > 0.0)) throw ValidationError("total sample weight must be positive");
  HarmonicFunction h;
  for (auto& [offsets, w] : merged) {
    const double nw = w / total;
    if (offsets.size() == 1) h.c_ += nw;
    h.C_ += nw * static_cast<double>(offsets.size());
    h.states_.push_back({offsets, nw});
  }
  return h;
}

double HarmonicFunction::operator()(const Config& x) const { return at_positions(positions_of(x)); }

double HarmonicFunction::at_positions(std::span<const std::int64_t> positions) const {
  if (positions.empty()) return 0.0;
  std::vector<std::int64_t> pos(positions.begin(), positions.end());
  std::sort(pos.begin(), pos.end());
  if (std::adjacent_find(pos.begin(), pos.end()) != pos.end())
    throw ValidationError("particle positions must be distinct");
  const auto len = static_cast<std::size_t>(pos.back() - pos.front() + 1);
  const auto x = pack(pos, len);
  std::vector<std::uint64_t> acc;
  double h = 0.0;
  for (const auto& s : states_)
    h += s.weight * static_cast<double>(overlap_with_packed(s.offsets, x, len, acc));
  return h;
}

EstimatorReport estimate_h(std::span<const HatYSample> samples, const Config& x) {
  if (samples.empty()) throw ValidationError("no interface samples");
  const auto pos = positions_of(x);
  EstimatorReport rep;
  rep.parameters["x"] = x.to_string();
  rep.parameters["samples"] = std::to_string(samples.size());
  if (pos.empty()) return rep;

  std::map<std::vector<std::int32_t>, double> cache;
  std::vector<double> v(samples.size()), w(samples.size());
  double c = 0.0, C = 0.0, total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    validate_sample(samples[i]);
    auto it = cache.find(samples[i].offsets);
    if (it == cache.end())
      it = cache.emplace(samples[i].offsets,
                         static_cast<double>(shifted_overlap_count(samples[i].offsets, pos))).first;
    v[i] = it->second;
    w[i] = samples[i].weight;
    total += w[i];
    if (samples[i].is_delta0()) c += w[i];
    C += w[i] * static_cast<double>(samples[i].offsets.size());
  }
  const Summary s = batch_means(v, w);
  rep.estimate = s.mean;
  rep.std_error = s.std_error;
  rep.n_effective = s.n_effective;
  const double n = static_cast<double>(pos.size());
  c /= total;
  C /= total;
  const double slack = 1e-12 * std::max(1.0, C * n);
  if (rep.estimate < c * n - slack || rep.estimate > C * n + slack)
    throw std::logic_error("harmonic estimate violates c|x| <= h(x) <= C|x|");
  return rep;
}

MartingaleResult martingale_test(const RateTable& dual_rt, const HarmonicFunction& h, const Config& x0,
                                 std::span<const double> times, std::size_t replicates,
                                 std::uint64_t seed, unsigned jobs) {
  if (!x0.is_finite() || x0.is_ring()) throw ValidationError("x0 must be a finite configuration on the line");
  if (x0.parity() != dual_rt.lattice()) throw LatticeMismatch("x0 is not on the lattice of the dual table");
  if (replicates < 2) throw ValidationError("need at least two replicates");
  std::vector<double> ts(times.begin(), times.end());
  if (!std::is_sorted(ts.begin(), ts.end()) || (!ts.empty() && ts.front() < 0.0))
    throw ValidationError("times must be sorted and non-negative");

  MartingaleResult res;
  res.h0 = h(x0);
  const auto dyn = make_dynamics(dual_rt);
  std::vector<std::vector<double>> values(ts.size(), std::vector<double>(replicates));
  parallel_for(jobs, replicates, [&](std::size_t r) {
    Simulator sim(dyn, x0, Rng(seed, r));
    for (std::size_t k = 0; k < ts.size(); ++k) {
      sim.run_until(ts[k]);
      values[k][r] = h.at_positions(positions_of(sim.bits()));
    }
  });
  for (std::size_t k = 0; k < ts.size(); ++k) {
    MartingalePoint pt;
    pt.time = ts[k];
    pt.value = mean_stderr(values[k]);
    const double diff = pt.value.mean - res.h0;
    if (pt.value.std_error > 0.0)
      pt.z = diff / pt.value.std_error;
    else
      pt.z = std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(res.h0))
                 ? 0.0
                 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    res.points.push_back(pt);
  }
  return res;
}

std::vector<CurvePoint> clustering_curve(std::shared_ptr<const Dynamics> dynamics, std::int64_t n, double p,
                                         std::span<const double> times, std::size_t replicates,
                                         std::uint64_t seed, unsigned jobs) {
  if (n < 3) throw ValidationError("ring size must be at least 3");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  if (replicates < 1) throw ValidationError("need at least one replicate");
  std::vector<double> ts(times.begin(), times.end());
  if (!std::is_sorted(ts.begin(), ts.end()) || (!ts.empty() && ts.front() < 0.0))
    throw ValidationError("times must be sorted and non-negative");

  std::vector<std::vector<double>> values(ts.size(), std::vector<double>(replicates));
  parallel_for(jobs, replicates, [&](std::size_t r) {
    Rng init(seed, (std::uint64_t{1} << 32) | r);
    std::string bits(static_cast<std::size_t>(n), '0');
    for (auto& b : bits) b = init.bernoulli(p) ? '1' : '0';
    const Config x0 = Config::from_bits(LatticeTag::ring(n, dynamics->lattice()), 0, bits);
    Simulator sim(dynamics, x0, Rng(seed, r));
    for (std::size_t k = 0; k < ts.size(); ++k) {
      sim.run_until(ts[k]);
      const View v = sim.view();
      std::int64_t d = 0;
      for (std::int64_t i = 0; i < n; ++i) d += v(i) != v(i + 1);
      values[k][r] = static_cast<double>(d) / static_cast<double>(n);
    }
  });
  std::vector<CurvePoint> out;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    Summary s = mean_stderr(values[k]);
    if (replicates == 1) s.std_error = std::numeric_limits<double>::infinity();
    out.push_back({ts[k], s});
  }
  return out;
}

EstimatorReport survival_probability(std::shared_ptr<const Dynamics> dynamics, const Config& x0, double horizon,
                                     std::size_t replicates, std::uint64_t seed, unsigned jobs) {
  if (!x0.is_finite()) throw ValidationError("survival needs a finite initial configuration");
  if (horizon < 0.0) throw ValidationError("horizon must be non-negative");
  if (replicates < 1) throw ValidationError("need at least one replicate");
  std::vector<double> alive(replicates);
  parallel_for(jobs, replicates, [&](std::size_t r) {
    Simulator sim(dynamics, x0, Rng(seed, r));
    while (sim.ones() > 0 && sim.step(horizon)) {
    }
    alive[r] = sim.ones() > 0 ? 1.0 : 0.0;
  });
  const Summary s = mean_stderr(alive);
  EstimatorReport rep;
  rep.estimate = s.mean;
  rep.std_error = replicates > 1 ? s.std_error : std::numeric_limits<double>::infinity();
  rep.n_effective = static_cast<double>(replicates);
  rep.seed = seed;
  rep.parameters["horizon"] = std::to_string(horizon);
  rep.parameters["replicates"] = std::to_string(replicates);
  rep.parameters["x0"] = x0.to_string();
  rep.parameters["dynamics"] = dynamics->describe();
  return rep;
}

InitialLaw product_law(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  return [p](Rng& rng, std::span<const std::int32_t> offsets) {
    std::vector<std::uint8_t> out(offsets.size());
    for (auto& b : out) b = rng.bernoulli(p) ? 1 : 0;
    return out;
  };
}

EstimatorReport estimate_p(const InitialLaw& law, std::span<const HatYSample> dual_samples, std::uint64_t seed,
                           std::size_t draws_per_sample) {
  if (dual_samples.empty()) throw ValidationError("no interface samples");
  if (draws_per_sample < 1) throw ValidationError("need at least one draw per sample");
  Rng rng(seed, 0x70u);
  std::vector<double> v(dual_samples.size()), w(dual_samples.size());
  for (std::size_t i = 0; i < dual_samples.size(); ++i) {
    validate_sample(dual_samples[i]);
    double odd = 0.0;
    for (std::size_t d = 0; d < draws_per_sample; ++d) {
      const auto bits = law(rng, dual_samples[i].offsets);
      int parity = 0;
      for (auto b : bits) parity ^= b & 1;
      odd += parity;
    }
    v[i] = odd / static_cast<double>(draws_per_sample);
    w[i] = dual_samples[i].weight;
  }
  const Summary s = batch_means(v, w);
  EstimatorReport rep;
  rep.estimate = s.mean;
  rep.std_error = s.std_error;
  rep.n_effective = s.n_effective;
  rep.seed = seed;
  rep.parameters["samples"] = std::to_string(dual_samples.size());
  rep.parameters["draws_per_sample"] = std::to_string(draws_per_sample);
  return rep;
}

std::string to_string(ScanVerdict v) {
  switch (v) {
    case ScanVerdict::Growth:
      return "growth";
    case ScanVerdict::Tight:
      return "tight";
    case ScanVerdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

namespace {

struct ReplicaDrift {
  double mid = 0.0;
  double late = 0.0;
  double delta_time = 0.0;  // time at δ0 during the second half
  double half_time = 0.0;
  bool aborted = false;
};

ReplicaDrift scan_replica(Simulator& sim, const InterfaceReader& reader, const ScanOptions& opt) {
  ReplicaDrift out;
  const std::uint64_t e_half = opt.events / 2;
  const std::uint64_t e_3q = opt.events - opt.events / 4;
  double mid_w = 0.0, late_w = 0.0;
  std::int64_t size = reader.count(sim);
  for (std::uint64_t e = 0; e < opt.events; ++e) {
    const double t0 = sim.time();
    if (!sim.step(std::numeric_limits<double>::infinity())) break;
    const double dt = sim.time() - t0;
    // The state before the event was held for dt.
    if (e >= e_half) {
      out.half_time += dt;
      if (size == 1) out.delta_time += dt;
      if (e < e_3q) {
        out.mid += dt * static_cast<double>(size);
        mid_w += dt;
      } else {
        out.late += dt * static_cast<double>(size);
        late_w += dt;
      }
    }
    const auto ext = reader.extent(sim.bits());
    if (ext && ext->second - ext->first > opt.cap) {
      out.aborted = true;
      return out;
    }
    size = reader.count(sim);
  }
  out.mid = mid_w > 0.0 ? out.mid / mid_w : static_cast<double>(size);
  out.late = late_w > 0.0 ? out.late / late_w : static_cast<double>(size);
  return out;
}

}  // namespace

ScanResult alpha_scan(FlipModelKind kind, std::span<const double> alphas, const ScanOptions& opt) {
  if (opt.replicas < 2) throw ValidationError("the scan needs at least two replicas per point");
  if (opt.events < 8) throw ValidationError("the scan needs at least 8 events per replica");
  ScanResult res;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const double alpha = alphas[a];
    const FlipRateModel model = FlipRateModel::make(kind, alpha, opt.range);
    std::vector<ReplicaDrift> reps(opt.replicas);
    parallel_for(opt.jobs, opt.replicas, [&](std::size_t r) {
      const std::uint64_t stream = (static_cast<std::uint64_t>(a) << 32) | r;
      if (kind == FlipModelKind::Rebellious) {
        const RateTable y = interface_table(rebellious_table(alpha));
        const DoubledIndex origin = DoubledIndex::at(y.lattice(), 0);
        Simulator sim(make_dynamics(y), Config::from_sites(LatticeTag::line(y.lattice()), std::span(&origin, 1)),
                      Rng(opt.seed, stream));
        reps[r] = scan_replica(sim, InterfaceReader{false}, opt);
      } else {
        Simulator sim(make_dynamics(model),
                      Config::heaviside(Parity::Integer, DoubledIndex::site(1), true), Rng(opt.seed, stream));
        reps[r] = scan_replica(sim, InterfaceReader{true}, opt);
      }
    });

    ScanPoint pt;
    pt.alpha = alpha;
    std::vector<double> diffs;
    double delta_time = 0.0, half_time = 0.0, mid = 0.0, late = 0.0;
    std::size_t aborted = 0;
    for (const auto& r : reps) {
      if (r.aborted) {
        ++aborted;
        continue;
      }
      diffs.push_back(r.late - r.mid);
      mid += r.mid;
      late += r.late;
      delta_time += r.delta_time;
      half_time += r.half_time;
    }
    pt.cap_abort_fraction = static_cast<double>(aborted) / static_cast<double>(opt.replicas);
    const std::size_t kept = diffs.size();
    if (kept > 0) {
      pt.mean_mid = mid / static_cast<double>(kept);
      pt.mean_late = late / static_cast<double>(kept);
      pt.p_delta0 = half_time > 0.0 ? delta_time / half_time : 0.0;
    }
    if (kept >= 2) {
      const Summary d = mean_stderr(diffs);
      pt.drift_z = d.std_error > 0.0 ? d.mean / d.std_error : 0.0;
    }
    const double ratio = pt.mean_mid > 0.0 ? pt.mean_late / pt.mean_mid : 1.0;
    if (pt.cap_abort_fraction >= 0.5 || (kept >= 2 && pt.drift_z > opt.growth_z && ratio > opt.growth_ratio))
      pt.verdict = ScanVerdict::Growth;
    else if (aborted == 0 && pt.drift_z <= opt.growth_z && pt.p_delta0 > 0.0)
      pt.verdict = ScanVerdict::Tight;
    res.points.push_back(pt);
  }

  std::optional<double> growth_max, tight_min;
  for (const auto& p : res.points) {
    if (p.verdict == ScanVerdict::Growth) growth_max = std::max(growth_max.value_or(p.alpha), p.alpha);
    if (p.verdict == ScanVerdict::Tight) tight_min = std::min(tight_min.value_or(p.alpha), p.alpha);
  }
  if (growth_max && tight_min && *growth_max < *tight_min) res.bracket = std::make_pair(*growth_max, *tight_min);
  return res;
}

}  // namespace canlab::mc
