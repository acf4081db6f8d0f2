#include "canlab/gf2.hpp"

#include <algorithm>
#include <sstream>

#include "canlab/error.hpp"

namespace canlab {

DoubledIndex DoubledIndex::from_rational(std::int64_t num, std::int64_t den) {
  if (den == 1) return DoubledIndex(2 * num);
  if (den == 2) return DoubledIndex(num);
  throw ValidationError("site denominator must be 1 or 2");
}

std::string DoubledIndex::to_string() const {
  if (parity() == Parity::Integer) return std::to_string(value_ / 2);
  return std::to_string(value_) + "/2";
}

std::string LatticeTag::to_string() const {
  std::string base = parity == Parity::Integer ? "Z" : "Z+1/2";
  if (is_ring()) return "ring(" + std::to_string(ring_size) + "," + base + ")";
  return base;
}

namespace {

void require_same_lattice(const Config& x, const Config& y, const char* what) {
  if (!(x.lattice() == y.lattice()))
    throw LatticeMismatch(std::string(what) + ": " + x.lattice().to_string() + " vs " +
                          y.lattice().to_string());
}

}  // namespace

Config Config::zeros(LatticeTag lattice) {
  if (lattice.is_ring()) return Config(lattice, BitLine(0, static_cast<std::size_t>(lattice.ring_size), false, false));
  return Config(lattice, BitLine(0, 0, false, false));
}

Config Config::ones(LatticeTag lattice) {
  if (lattice.is_ring()) {
    BitLine line(0, static_cast<std::size_t>(lattice.ring_size), false, false);
    for (std::int64_t p = 0; p < lattice.ring_size; ++p) line.set(p, true);
    return Config(lattice, std::move(line));
  }
  return Config(lattice, BitLine(0, 0, true, true));
}

Config Config::from_sites(LatticeTag lattice, std::span<const DoubledIndex> sites) {
  Config x = zeros(lattice);
  if (sites.empty()) return x;
  std::int64_t lo = sites.front().position();
  std::int64_t hi = lo;
  for (const auto& s : sites) {
    if (s.parity() != lattice.parity)
      throw LatticeMismatch("site " + s.to_string() + " is not on " + lattice.to_string());
    lo = std::min(lo, s.position());
    hi = std::max(hi, s.position());
  }
  if (lattice.is_ring()) {
    for (const auto& s : sites) {
      const auto p = floor_mod(s.position(), lattice.ring_size);
      x.bits_.set(p, !x.bits_.get(p));
    }
    return x;
  }
  BitLine line(lo, static_cast<std::size_t>(hi - lo + 1), false, false);
  for (const auto& s : sites) line.set(s.position(), !line.get(s.position()));
  return Config(lattice, std::move(line));
}

Config Config::heaviside(Parity parity, DoubledIndex from, bool ones_right) {
  if (from.parity() != parity) throw LatticeMismatch("Heaviside step site has the wrong parity");
  const LatticeTag lattice = LatticeTag::line(parity);
  if (ones_right) return Config(lattice, BitLine(from.position(), 0, false, true));
  return Config(lattice, BitLine(from.position() + 1, 0, true, false));
}

Config Config::from_bits(LatticeTag lattice, std::int64_t first_position, std::string_view bits,
                         bool left, bool right) {
  if (lattice.is_ring()) {
    if (static_cast<std::int64_t>(bits.size()) != lattice.ring_size)
      throw ValidationError("ring literal must list exactly n bits");
    if (left || right) throw ValidationError("ring configurations have no boundary bits");
    BitLine src = BitLine::from_string(0, bits, false, false);
    BitLine line(0, bits.size(), false, false);
    for (std::int64_t k = 0; k < lattice.ring_size; ++k)
      line.set(floor_mod(first_position + k, lattice.ring_size), src.get(k));
    return Config(lattice, std::move(line));
  }
  return Config(lattice, BitLine::from_string(first_position, bits, left, right));
}

Config Config::from_line(Parity parity, BitLine bits) {
  return Config(LatticeTag::line(parity), std::move(bits));
}

bool Config::at(DoubledIndex site) const {
  if (site.parity() != lattice_.parity)
    throw LatticeMismatch("site " + site.to_string() + " is not on " + lattice_.to_string());
  return at_position(site.position());
}

bool Config::at_position(std::int64_t position) const noexcept {
  if (lattice_.is_ring()) return bits_.get(floor_mod(position, lattice_.ring_size));
  return bits_.get(position);
}

std::vector<DoubledIndex> Config::support() const {
  std::vector<DoubledIndex> out;
  for (std::int64_t p = bits_.first(); p < bits_.end(); ++p)
    if (bits_.get(p)) out.push_back(DoubledIndex::at(lattice_.parity, p));
  return out;
}

std::int64_t Config::count() const {
  if (!is_finite()) throw BoundaryClassError("|x| is infinite for a configuration with a nonzero boundary");
  return bits_.window_count();
}

Config Config::operator^(const Config& other) const {
  require_same_lattice(*this, other, "xor");
  if (is_ring()) {
    Config out = *this;
    for (std::int64_t p = 0; p < lattice_.ring_size; ++p) out.bits_.set(p, bits_.get(p) != other.bits_.get(p));
    return out;
  }
  const std::int64_t lo = std::min(bits_.first(), other.bits_.first());
  const std::int64_t hi = std::max(bits_.end(), other.bits_.end());
  BitLine line(lo, static_cast<std::size_t>(hi - lo), bits_.left() != other.bits_.left(),
               bits_.right() != other.bits_.right());
  for (std::int64_t p = lo; p < hi; ++p) line.set(p, bits_.get(p) != other.bits_.get(p));
  return Config(lattice_, std::move(line));
}

bool Config::operator==(const Config& other) const {
  if (!(lattice_ == other.lattice_)) return false;
  if (bits_.left() != other.bits_.left() || bits_.right() != other.bits_.right()) return false;
  const std::int64_t lo = std::min(bits_.first(), other.bits_.first());
  const std::int64_t hi = std::max(bits_.end(), other.bits_.end());
  for (std::int64_t p = lo; p < hi; ++p)
    if (bits_.get(p) != other.bits_.get(p)) return false;
  return true;
}

std::string Config::to_string() const {
  std::ostringstream os;
  if (is_ring()) {
    os << "ring" << lattice_.ring_size << (parity() == Parity::Integer ? "" : "+1/2") << "["
       << bits_.window_string() << "]";
    return os.str();
  }
  os << "..." << bits_.left() << "[" << bits_.window_string() << "]" << bits_.right() << "...@"
     << DoubledIndex::at(parity(), bits_.first()).to_string();
  return os.str();
}

bool parity_norm(const Config& x) {
  if (!x.is_finite()) throw BoundaryClassError("parity norm needs a finite configuration");
  return (x.bits().window_count() & 1) != 0;
}

Config pointwise_product(const Config& x, const Config& y) {
  require_same_lattice(x, y, "pointwise product");
  const BitLine& a = x.bits();
  const BitLine& b = y.bits();
  if (x.is_ring()) {
    BitLine line(0, a.size(), false, false);
    for (std::int64_t p = 0; p < a.end(); ++p) line.set(p, a.get(p) && b.get(p));
    return Config::from_bits(x.lattice(), 0, line.window_string());
  }
  const std::int64_t lo = std::min(a.first(), b.first());
  const std::int64_t hi = std::max(a.end(), b.end());
  BitLine line(lo, static_cast<std::size_t>(hi - lo), a.left() && b.left(), a.right() && b.right());
  for (std::int64_t p = lo; p < hi; ++p) line.set(p, a.get(p) && b.get(p));
  return Config::from_line(x.parity(), std::move(line));
}

Config grad(const Config& x) {
  // out(q) = x(q - s) xor x(q - s + 1) in lattice positions, s = 1 when the
  // input sits on Z+1/2 (its position q-1 is the site q - 1/2).
  const std::int64_t s = x.parity() == Parity::Integer ? 0 : 1;
  const Parity out_parity = opposite(x.parity());
  if (x.is_ring()) {
    const std::int64_t n = x.lattice().ring_size;
    std::string bits(static_cast<std::size_t>(n), '0');
    for (std::int64_t q = 0; q < n; ++q)
      if (x.at_position(q - s) != x.at_position(q - s + 1)) bits[static_cast<std::size_t>(q)] = '1';
    return Config::from_bits(LatticeTag::ring(n, out_parity), 0, bits);
  }
  const BitLine& in = x.bits();
  const std::int64_t lo = in.first() - 1 + s;
  const std::int64_t hi = in.end() + s;
  BitLine line(lo, static_cast<std::size_t>(hi - lo), false, false);
  for (std::int64_t q = lo; q < hi; ++q)
    if (in.get(q - s) != in.get(q - s + 1)) line.set(q, true);
  return Config::from_line(out_parity, std::move(line));
}

Config grad_inv(const Config& y, Side side) {
  const Parity out_parity = opposite(y.parity());
  // Minus: z(q) = xor of y(p) over p <= q - t.  Plus: z(q) = xor over p >= q + u.
  const std::int64_t t = y.parity() == Parity::HalfInteger ? 1 : 0;
  const std::int64_t u = 1 - t;

  if (y.is_ring()) {
    if (parity_norm(y)) throw BoundaryClassError("grad is not onto odd-parity ring configurations");
    const std::int64_t n = y.lattice().ring_size;
    std::string bits(static_cast<std::size_t>(n), '0');
    if (side == Side::Minus) {
      bool acc = false;
      for (std::int64_t q = 0; q < n; ++q) {
        if (q - t >= 0) acc ^= y.at_position(q - t);
        bits[static_cast<std::size_t>(q)] = acc ? '1' : '0';
      }
    } else {
      bool acc = false;
      for (std::int64_t q = n - 1; q >= 0; --q) {
        if (q + u <= n - 1) acc ^= y.at_position(q + u);
        bits[static_cast<std::size_t>(q)] = acc ? '1' : '0';
      }
    }
    return Config::from_bits(LatticeTag::ring(n, out_parity), 0, bits);
  }

  const BitLine& in = y.bits();
  if (side == Side::Minus) {
    if (!y.in_s_minus()) throw BoundaryClassError("prefix inverse needs y in S_-");
    if (y.right_boundary())
      throw BoundaryClassError("prefix parity of a configuration with right boundary 1 alternates forever");
    const std::int64_t lo = in.first() + t;
    const std::int64_t hi = in.end() + t;
    bool acc = false;
    BitLine line(lo, static_cast<std::size_t>(hi - lo), false, false);
    for (std::int64_t q = lo; q < hi; ++q) {
      acc ^= in.get(q - t);
      if (acc) line.set(q, true);
    }
    BitLine out(lo, line.size(), false, acc);
    for (std::int64_t q = lo; q < hi; ++q) out.set(q, line.get(q));
    return Config::from_line(out_parity, std::move(out));
  }

  if (!y.in_s_plus()) throw BoundaryClassError("suffix inverse needs y in S_+");
  if (y.left_boundary())
    throw BoundaryClassError("suffix parity of a configuration with left boundary 1 alternates forever");
  const std::int64_t lo = in.first() - u;
  const std::int64_t hi = in.end() - u;
  bool acc = false;
  BitLine line(lo, static_cast<std::size_t>(hi - lo), false, false);
  for (std::int64_t q = hi - 1; q >= lo; --q) {
    acc ^= in.get(q + u);
    if (acc) line.set(q, true);
  }
  BitLine out(lo, line.size(), acc, false);
  for (std::int64_t q = lo; q < hi; ++q) out.set(q, line.get(q));
  return Config::from_line(out_parity, std::move(out));
}

bool pairing_admissible(const Config& x, const Config& y) noexcept {
  if (x.is_ring() || y.is_ring()) return x.lattice().ring_size == y.lattice().ring_size;
  return (x.in_s_minus() && y.in_s_plus()) || (x.in_s_plus() && y.in_s_minus()) || x.is_finite() ||
         y.is_finite();
}

}  // namespace canlab
