#include "canlab/bit_line.hpp"

#include <algorithm>
#include <bit>

#include "canlab/error.hpp"

namespace canlab {

namespace {

constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

}  // namespace

BitLine::BitLine(std::int64_t first, std::size_t size, bool left, bool right)
    : first_(first), size_(size), words_(words_for(size), 0), left_(left), right_(right) {}

BitLine BitLine::from_string(std::int64_t first, std::string_view bits, bool left, bool right) {
  BitLine line(first, bits.size(), left, right);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    const char c = bits[k];
    if (c != '0' && c != '1') throw ValidationError("bit string may contain only '0' and '1'");
    if (c == '1') line.words_[k >> 6] |= std::uint64_t{1} << (k & 63);
  }
  return line;
}

void BitLine::set(std::int64_t pos, bool value) {
  if (pos < first_ || pos >= end()) {
    if (get(pos) == value) return;
    reserve(pos, pos + 1);
  }
  const auto off = static_cast<std::uint64_t>(pos - first_);
  const std::uint64_t mask = std::uint64_t{1} << (off & 63);
  if (value)
    words_[off >> 6] |= mask;
  else
    words_[off >> 6] &= ~mask;
}

void BitLine::reserve(std::int64_t lo, std::int64_t hi) {
  if (lo >= first_ && hi <= end()) return;
  const auto cur = static_cast<std::int64_t>(size_);
  const std::int64_t grow = std::max<std::int64_t>(cur, 64);
  std::int64_t new_first = first_;
  std::int64_t new_end = end();
  if (size_ == 0) {
    new_first = lo;
    new_end = hi;
  }
  if (lo < new_first) new_first = std::min(lo, new_first - grow);
  if (hi > new_end) new_end = std::max(hi, new_end + grow);

  BitLine grown(new_first, static_cast<std::size_t>(new_end - new_first), left_, right_);
  for (std::int64_t p = new_first; p < new_end; ++p) {
    // Word-at-a-time copy would be faster; growth is rare enough not to matter.
    if (get(p)) {
      const auto off = static_cast<std::uint64_t>(p - new_first);
      grown.words_[off >> 6] |= std::uint64_t{1} << (off & 63);
    }
  }
  *this = std::move(grown);
}

void BitLine::trim(std::int64_t margin) {
  const std::int64_t a = first_nonconstant().value_or(end());
  const std::int64_t b = last_nonconstant().value_or(first_ - 1) + 1;
  if (a >= b && left_ == right_) {
    *this = BitLine(first_, 0, left_, right_);
    return;
  }
  // With differing boundaries and a constant window the step sits at a == b.
  const std::int64_t new_first = std::min(a, b) - margin;
  const std::int64_t new_end = std::max(a, b) + margin;
  BitLine trimmed(new_first, static_cast<std::size_t>(new_end - new_first), left_, right_);
  for (std::int64_t p = new_first; p < new_end; ++p) {
    if (get(p)) {
      const auto off = static_cast<std::uint64_t>(p - new_first);
      trimmed.words_[off >> 6] |= std::uint64_t{1} << (off & 63);
    }
  }
  *this = std::move(trimmed);
}

std::int64_t BitLine::window_count() const noexcept {
  std::int64_t n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

std::optional<std::int64_t> BitLine::first_set() const noexcept {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] != 0) {
      const auto off = static_cast<std::int64_t>(w * 64 + std::countr_zero(words_[w]));
      return first_ + off;
    }
  }
  return std::nullopt;
}

std::optional<std::int64_t> BitLine::last_set() const noexcept {
  for (std::size_t w = words_.size(); w-- > 0;) {
    if (words_[w] != 0) {
      const auto off = static_cast<std::int64_t>(w * 64 + 63 - std::countl_zero(words_[w]));
      return first_ + off;
    }
  }
  return std::nullopt;
}

std::optional<std::int64_t> BitLine::first_nonconstant() const noexcept {
  const std::uint64_t fill = left_ ? ~std::uint64_t{0} : 0;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t diff = words_[w] ^ fill;
    if (w + 1 == words_.size() && (size_ & 63) != 0) diff &= (std::uint64_t{1} << (size_ & 63)) - 1;
    if (diff != 0) return first_ + static_cast<std::int64_t>(w * 64 + std::countr_zero(diff));
  }
  return std::nullopt;
}

std::optional<std::int64_t> BitLine::last_nonconstant() const noexcept {
  const std::uint64_t fill = right_ ? ~std::uint64_t{0} : 0;
  for (std::size_t w = words_.size(); w-- > 0;) {
    std::uint64_t diff = words_[w] ^ fill;
    if (w + 1 == words_.size() && (size_ & 63) != 0) diff &= (std::uint64_t{1} << (size_ & 63)) - 1;
    if (diff != 0)
      return first_ + static_cast<std::int64_t>(w * 64 + 63 - std::countl_zero(diff));
  }
  return std::nullopt;
}

std::string BitLine::window_string() const {
  std::string s(size_, '0');
  for (std::size_t k = 0; k < size_; ++k)
    if ((words_[k >> 6] >> (k & 63)) & 1u) s[k] = '1';
  return s;
}

}  // namespace canlab
