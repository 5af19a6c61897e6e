#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gasrank {

// Log-scale worth parameters, one per item.
using WorthVector = std::vector<double>;

// A complete or top-k ordering of items drawn from a universe of
// `universe_size` items. Items are 0-based indices; the ordering is listed
// best first. Items not in the ordering are "unranked" and sit below every
// ranked item.
class Ranking {
 public:
  // Throws InvalidArgument on empty universe, empty ordering, out-of-range or
  // duplicated items.
  Ranking(std::size_t universe_size, std::vector<std::size_t> ordering);

  static Ranking complete(std::vector<std::size_t> ordering);

  std::size_t universe_size() const noexcept { return universe_size_; }
  std::size_t ranked_count() const noexcept { return ordering_.size(); }
  bool is_complete() const noexcept { return ordering_.size() == universe_size_; }

  std::span<const std::size_t> ordering() const noexcept { return ordering_; }
  // Items missing from the ordering, ascending.
  std::span<const std::size_t> unranked() const noexcept { return unranked_; }

  // 1-based position of `item`, or nullopt if the item is unranked.
  std::optional<std::size_t> rank_of(std::size_t item) const;
  bool contains(std::size_t item) const { return rank_of(item).has_value(); }

  bool operator==(const Ranking& other) const {
    return universe_size_ == other.universe_size_ && ordering_ == other.ordering_;
  }

 private:
  std::size_t universe_size_;
  std::vector<std::size_t> ordering_;
  std::vector<std::size_t> unranked_;
  std::vector<std::size_t> rank_;  // 0 means unranked
};

}  // namespace gasrank
