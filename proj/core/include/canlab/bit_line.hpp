#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace canlab {

/// Packed bits over a window of integer positions [first, first + size),
/// with a constant bit outside the window on each side.
///
/// Writes outside the window grow it geometrically, so a long sequence of
/// writes near one edge costs amortized O(1) per write. Positions are plain
/// integers; the meaning (Z, Z+1/2, ring slot) is assigned by the owner.
class BitLine {
 public:
  BitLine() = default;
  BitLine(std::int64_t first, std::size_t size, bool left, bool right);

  /// Bits from a string of '0'/'1' characters placed at [first, first+len).
  static BitLine from_string(std::int64_t first, std::string_view bits, bool left, bool right);

  std::int64_t first() const noexcept { return first_; }
  std::int64_t end() const noexcept { return first_ + static_cast<std::int64_t>(size_); }
  std::size_t size() const noexcept { return size_; }
  bool left() const noexcept { return left_; }
  bool right() const noexcept { return right_; }

  bool get(std::int64_t pos) const noexcept {
    if (pos < first_) return left_;
    const auto off = static_cast<std::uint64_t>(pos - first_);
    if (off >= size_) return right_;
    return (words_[off >> 6] >> (off & 63)) & 1u;
  }

  void set(std::int64_t pos, bool value);
  void flip(std::int64_t pos) { set(pos, !get(pos)); }

  /// Make sure [lo, hi) lies inside the window, growing by at least doubling.
  void reserve(std::int64_t lo, std::int64_t hi);

  /// Shrink the window to the region where bits differ from the boundary
  /// constants, keeping `margin` constant bits on each side.
  void trim(std::int64_t margin);

  /// Number of ones inside the window.
  std::int64_t window_count() const noexcept;

  /// First / last position inside the window whose bit differs from the
  /// adjacent boundary constant.
  std::optional<std::int64_t> first_nonconstant() const noexcept;
  std::optional<std::int64_t> last_nonconstant() const noexcept;

  /// First / last set bit inside the window.
  std::optional<std::int64_t> first_set() const noexcept;
  std::optional<std::int64_t> last_set() const noexcept;

  std::string window_string() const;

 private:
  void clear_tail() noexcept;

  std::int64_t first_ = 0;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
  bool left_ = false;
  bool right_ = false;
};

}  // namespace canlab
